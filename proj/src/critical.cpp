#include "periods/critical.hpp"

#include "periods/errors.hpp"
#include "periods/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

namespace periods {

std::string extremum_kind_name(ExtremumKind k) {
    return k == ExtremumKind::Minimum ? "minimum" : "maximum";
}

namespace {

constexpr double kMergeRel = 1e-4;      // adjacent same-kind brackets merge below this
constexpr double kRefineRel = 1e-6;     // golden-section target width relative to h_star
constexpr double kClusterFloor = 1e-10; // innermost relative cluster offset

std::vector<double> positive_interior_energies(const EnergyLedger& ledger) {
    std::vector<double> out;
    const std::size_t n = ledger.interior_count();
    for (std::size_t i = 0; i < n; ++i)
        if (ledger.entries[i].h > 0) out.push_back(ledger.entries[i].h);
    return out;
}

}  // namespace

std::vector<double> build_h_grid(const EnergyLedger& ledger, const GridParams& params,
                                 const System& sys, std::span<const double> extra_centers,
                                 GridMeta* meta_out) {
    if (ledger.entries.empty()) throw ValidationError("grid needs a nonempty ledger");
    if (params.global_points < 2 || params.cluster_points < 1 || params.cluster_decades < 1)
        throw ValidationError("bad grid parameters");

    const std::vector<double> interior = positive_interior_energies(ledger);
    const double h1 = interior.empty() ? 1.0 : interior.front();
    const double h_last = interior.empty() ? 1.0 : interior.back();
    const double floor = 1e-6 * h1;
    double roof;
    if (sys.annulus_roof_energy)
        roof = 0.999 * *sys.annulus_roof_energy;
    else
        roof = 1e3 * h_last;

    std::vector<double> grid;
    // (a) log-uniform global grid
    const double lf = std::log(floor), lr = std::log(roof);
    for (int i = 0; i < params.global_points; ++i)
        grid.push_back(std::exp(lf + (lr - lf) * i / (params.global_points - 1.0)));

    // (b) two-sided geometric clusters
    std::vector<double> centers = interior;
    centers.insert(centers.end(), extra_centers.begin(), extra_centers.end());
    const double off_lo = std::log(kClusterFloor);
    const double off_hi = std::log(kClusterFloor) + params.cluster_decades * std::numbers::ln10;
    for (double c : centers) {
        for (int i = 0; i < params.cluster_points; ++i) {
            const double off =
                std::exp(off_lo + (off_hi - off_lo) * i /
                                      std::max(1, params.cluster_points - 1));
            grid.push_back(c * (1.0 - off));
            grid.push_back(c * (1.0 + off));
        }
    }

    // (c) annulus-interval midpoints
    std::vector<double> edges{0.0};
    edges.insert(edges.end(), interior.begin(), interior.end());
    edges.push_back(roof);
    for (std::size_t i = 0; i + 1 < edges.size(); ++i)
        grid.push_back(0.5 * (edges[i] + edges[i + 1]));

    std::erase_if(grid, [&](double h) { return !(h > 0.0) || h > roof; });
    std::sort(grid.begin(), grid.end());
    std::vector<double> out;
    out.reserve(grid.size());
    for (double h : grid)
        if (out.empty() || h - out.back() > 1e-14 * h) out.push_back(h);

    if (meta_out) {
        meta_out->cluster_centers = std::move(centers);
        meta_out->annulus_edges =
            sys.spec.epsilon == 0 ? sys.skeleton_energies : std::vector<double>{};
        meta_out->h_floor = floor;
        meta_out->h_roof = roof;
        meta_out->epsilon = to_double(sys.spec.epsilon);
    }
    return out;
}

std::vector<double> perturbed_cluster_centers(const System& sys) {
    if (sys.spec.epsilon == 0) return {};
    const System skeleton = rebuild_with_epsilon(sys.spec, 0);
    std::vector<double> centers;
    for (const auto& s : singular_points(skeleton)) {
        if (s.kind == SingularityKind::Center || s.kind == SingularityKind::Saddle) continue;
        if (skeleton.annulus_roof_energy && s.energy >= *skeleton.annulus_roof_energy) continue;
        centers.push_back(sys.hamiltonian(s.x, s.y));
    }
    std::sort(centers.begin(), centers.end());
    return centers;
}

PeriodCurve sample_curve(const System& sys, std::span<const double> grid) {
    PeriodCurve curve;
    curve.attempted = grid.size();
    std::vector<std::optional<PeriodSample>> slots(grid.size());
    std::vector<std::string> errors(grid.size());
    parallel_for_index(grid.size(), [&](std::size_t i) {
        try {
            slots[i] = period_return_time(sys, grid[i]);
        } catch (const RangeError& e) {
            errors[i] = e.what();
        } catch (const IntegrationError& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (slots[i]) {
            curve.samples.push_back(*slots[i]);
        } else {
            ++curve.failed;
            std::ostringstream os;
            os << "dropped h=" << grid[i] << ": " << errors[i];
            curve.log.push_back(os.str());
        }
    }
    curve.meta.epsilon = to_double(sys.spec.epsilon);
    if (sys.spec.epsilon == 0) curve.meta.annulus_edges = sys.skeleton_energies;
    if (sys.annulus_roof_energy) curve.meta.h_roof = *sys.annulus_roof_energy;
    if (curve.failed * 10 > curve.attempted) {
        std::ostringstream os;
        os << "curve quality: " << curve.failed << "/" << curve.attempted << " samples failed";
        throw CurveQualityError(os.str());
    }
    return curve;
}

namespace {

struct Seed {
    double lo = 0.0, hi = 0.0;  // bracket
    double h_mid = 0.0;
    ExtremumKind kind = ExtremumKind::Minimum;
};

/// Golden-section refinement of one seed on fresh period evaluations.
std::optional<CriticalPoint> refine_seed(const System& sys, const Seed& seed,
                                         std::string* note) {
    constexpr double invphi = 0.6180339887498948482;
    auto value = [&](double h) { return period_return_time(sys, h).T; };
    const double sign = seed.kind == ExtremumKind::Maximum ? 1.0 : -1.0;
    try {
        double a = seed.lo, b = seed.hi;
        double x1 = b - invphi * (b - a);
        double x2 = a + invphi * (b - a);
        double f1 = sign * value(x1);
        double f2 = sign * value(x2);
        int budget = 240;
        while (b - a > kRefineRel * 0.5 * (a + b) && budget-- > 0) {
            if (f1 >= f2) {
                b = x2;
                x2 = x1;
                f2 = f1;
                x1 = b - invphi * (b - a);
                f1 = sign * value(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + invphi * (b - a);
                f2 = sign * value(x2);
            }
        }
        if (budget <= 0) {
            if (note) *note = "refinement did not converge";
            return std::nullopt;
        }
        CriticalPoint cp;
        cp.h_star = 0.5 * (a + b);
        cp.T_star = sign * std::max(f1, f2);
        cp.kind = seed.kind;
        cp.bracket_lo = seed.lo;
        cp.bracket_hi = seed.hi;
        cp.refined_width = b - a;
        return cp;
    } catch (const RangeError& e) {
        if (note) *note = e.what();  // refinement wandered against a separatrix
        return std::nullopt;
    } catch (const IntegrationError& e) {
        if (note) *note = e.what();
        return std::nullopt;
    }
}

}  // namespace

std::vector<CriticalPoint> detect_critical_points(const PeriodCurve& curve, const System& sys,
                                                  std::vector<std::string>* log) {
    const auto& samples = curve.samples;
    if (samples.size() < 3) return {};

    // Segment boundaries: singular levels split the curve when eps = 0; the
    // saddle roof is always a boundary.
    std::vector<double> edges;
    if (sys.spec.epsilon == 0)
        for (double e : sys.skeleton_energies)
            if (e > 0) edges.push_back(e);
    if (sys.annulus_roof_energy) edges.push_back(*sys.annulus_roof_energy);
    std::sort(edges.begin(), edges.end());

    auto segment_of = [&](double h) {
        return std::distance(edges.begin(),
                             std::upper_bound(edges.begin(), edges.end(), h));
    };

    std::vector<Seed> seeds;
    for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
        const auto& prev = samples[i - 1];
        const auto& mid = samples[i];
        const auto& next = samples[i + 1];
        if (segment_of(prev.h) != segment_of(next.h)) continue;
        // prominence must clear the evaluation noise of both comparisons
        const double lo_noise = 2.0 * (mid.err_estimate + prev.err_estimate);
        const double hi_noise = 2.0 * (mid.err_estimate + next.err_estimate);
        Seed s;
        if (mid.T > prev.T + lo_noise && mid.T > next.T + hi_noise)
            s.kind = ExtremumKind::Maximum;
        else if (mid.T < prev.T - lo_noise && mid.T < next.T - hi_noise)
            s.kind = ExtremumKind::Minimum;
        else
            continue;
        s.lo = prev.h;
        s.hi = next.h;
        s.h_mid = mid.h;
        seeds.push_back(s);
    }

    // Merge same-kind seeds that straddle one analytic extremum.
    std::vector<Seed> merged;
    for (const auto& s : seeds) {
        if (!merged.empty() && merged.back().kind == s.kind &&
            (s.lo <= merged.back().hi ||
             s.h_mid - merged.back().h_mid <= kMergeRel * s.h_mid)) {
            merged.back().hi = s.hi;
            merged.back().h_mid = 0.5 * (merged.back().h_mid + s.h_mid);
        } else {
            merged.push_back(s);
        }
    }

    std::vector<std::optional<CriticalPoint>> refined(merged.size());
    std::vector<std::string> notes(merged.size());
    parallel_for_index(merged.size(),
                       [&](std::size_t i) { refined[i] = refine_seed(sys, merged[i], &notes[i]); });

    std::vector<CriticalPoint> out;
    for (std::size_t i = 0; i < refined.size(); ++i) {
        if (refined[i]) {
            out.push_back(*refined[i]);
        } else if (log) {
            std::ostringstream os;
            os << "excluded seed near h=" << merged[i].h_mid << ": " << notes[i];
            log->push_back(os.str());
        }
    }
    std::sort(out.begin(), out.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) { return a.h_star < b.h_star; });

    // Post-merge: duplicates of one extremum refined from adjacent seams.
    std::vector<CriticalPoint> dedup;
    for (const auto& cp : out) {
        if (!dedup.empty() && dedup.back().kind == cp.kind &&
            cp.h_star - dedup.back().h_star <= kMergeRel * cp.h_star) {
            const bool better = cp.kind == ExtremumKind::Maximum ? cp.T_star > dedup.back().T_star
                                                                 : cp.T_star < dedup.back().T_star;
            if (better) dedup.back() = cp;
        } else {
            dedup.push_back(cp);
        }
    }
    return dedup;
}

int required_critical_points(Family family, int k) {
    int required = 0;
    switch (family) {
        case Family::PotentialOdd: required = 2 * k - 1; break;
        case Family::PotentialEven: required = 2 * k - 2; break;
        case Family::SeparableOdd: required = 2 * k * k + 4 * k - 1; break;
        case Family::SeparableEven: required = 2 * k * k - 2; break;
    }
    return std::max(0, required);
}

BoundReport verify_bound(const SystemSpec& spec, double epsilon_start, const GridParams& grid,
                         int max_halvings) {
    if (!(epsilon_start > 0)) throw ValidationError("epsilon_start must be positive");
    spec.validate();

    BoundReport report;
    report.family = spec.family;
    report.k = spec.k();
    report.required = required_critical_points(spec.family, spec.k());

    // Hypothesis check on the unperturbed skeleton first.
    {
        System probe = rebuild_with_epsilon(spec, 0);
        if (spec.e_scaled) {
            HypothesisVerdict v = certify_system(probe);
            if (!v.distinct) throw HypothesisError("exact certification failed");
        } else {
            EnergyLedger ledger = critical_energy_ledger(probe);
            HypothesisVerdict v = check_hypothesis_numeric(ledger);
            if (!v.distinct) {
                std::ostringstream os;
                os << "critical energies are not distinct (min gap " << v.min_gap << ")";
                throw HypothesisError(os.str());
            }
        }
    }

    const System skeleton = rebuild_with_epsilon(spec, 0);
    const EnergyLedger ledger = critical_energy_ledger(skeleton);

    Rational eps = Rational(epsilon_start);
    int best_found = -1;
    for (int trial = 0; trial <= max_halvings; ++trial) {
        System sys = rebuild_with_epsilon(spec, eps);
        std::vector<double> centers = perturbed_cluster_centers(sys);
        std::vector<double> hs = build_h_grid(ledger, grid, sys, centers);
        PeriodCurve curve = sample_curve(sys, hs);
        std::vector<CriticalPoint> points = detect_critical_points(curve, sys);

        ScheduleTrial log;
        log.epsilon = to_double(eps);
        log.found = static_cast<int>(points.size());
        log.samples = curve.samples.size();
        log.failed = curve.failed;
        report.schedule.push_back(log);

        if (log.found > best_found) {
            best_found = log.found;
            report.found = log.found;
            report.epsilon_used = log.epsilon;
            report.critical_points = std::move(points);
        }
        if (report.found >= report.required) {
            report.pass = true;
            return report;
        }
        eps /= 2;
    }
    report.pass = report.found >= report.required;
    return report;
}

double tail_exponent(const System& sys, int decades, int points_per_decade) {
    if (decades < 1) throw ValidationError("tail fit needs at least one decade");
    double h_last = 0.0;
    {
        std::vector<double> interior = sys.skeleton_energies;
        if (sys.annulus_roof_energy && !interior.empty()) interior.pop_back();
        for (double e : interior) h_last = std::max(h_last, e);
        if (h_last == 0.0) h_last = 1.0;  // harmonic fallback scale
    }
    const double lo = 1e2 * h_last;
    const double hi = lo * std::pow(10.0, decades);
    if (sys.annulus_roof_energy && hi >= *sys.annulus_roof_energy)
        throw RangeError("tail window exceeds the saddle-loop bound");

    const int n = decades * points_per_decade + 1;
    if (n < 3) throw ValidationError("insufficient samples for the tail fit");
    std::vector<double> hs(n), Ts(n);
    const double l0 = std::log(lo), l1 = std::log(hi);
    for (int i = 0; i < n; ++i) hs[i] = std::exp(l0 + (l1 - l0) * i / (n - 1.0));
    parallel_for_index(static_cast<std::size_t>(n),
                       [&](std::size_t i) { Ts[i] = period_return_time(sys, hs[i]).T; });

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        const double x = std::log(hs[i]), y = std::log(Ts[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<PeakProbe> peak_growth_probe(const SystemSpec& spec, std::span<const double> eps_list,
                                         const GridParams& grid) {
    for (std::size_t i = 1; i < eps_list.size(); ++i)
        if (!(eps_list[i] < eps_list[i - 1]))
            throw ValidationError("eps_list must be strictly decreasing");

    const System skeleton = rebuild_with_epsilon(spec, 0);
    const EnergyLedger ledger = critical_energy_ledger(skeleton);
    const std::vector<double> centers0 = positive_interior_energies(ledger);

    std::vector<PeakProbe> probes;
    for (double eps : eps_list) {
        System sys = rebuild_with_epsilon(spec, Rational(eps));
        std::vector<double> centers =
            eps > 0 ? perturbed_cluster_centers(sys) : centers0;
        PeakProbe probe;
        probe.epsilon = eps;
        for (double c : centers) {
            std::vector<double> hs;
            const double off_lo = std::log(kClusterFloor);
            const double off_hi = off_lo + grid.cluster_decades * std::numbers::ln10;
            for (int i = 0; i < grid.cluster_points; ++i) {
                const double off = std::exp(off_lo + (off_hi - off_lo) * i /
                                                         std::max(1, grid.cluster_points - 1));
                hs.push_back(c * (1.0 - off));
                hs.push_back(c * (1.0 + off));
            }
            hs.push_back(c);
            std::erase_if(hs, [&](double h) {
                if (!(h > 0)) return true;
                if (sys.annulus_roof_energy && h >= 0.999 * *sys.annulus_roof_energy) return true;
                return false;
            });
            std::vector<double> Ts(hs.size(), 0.0);
            parallel_for_index(hs.size(), [&](std::size_t i) {
                try {
                    Ts[i] = period_return_time(sys, hs[i]).T;
                } catch (const RangeError&) {
                } catch (const IntegrationError&) {
                }
            });
            probe.peak_T.push_back(*std::max_element(Ts.begin(), Ts.end()));
        }
        probes.push_back(std::move(probe));
    }
    return probes;
}

nlohmann::json report_to_json(const BoundReport& report) {
    nlohmann::json j;
    j["family"] = family_name(report.family);
    j["k"] = report.k;
    j["epsilon_used"] = report.epsilon_used;
    j["required"] = report.required;
    j["found"] = report.found;
    j["pass"] = report.pass;
    j["critical_points"] = nlohmann::json::array();
    for (const auto& cp : report.critical_points) {
        j["critical_points"].push_back({{"h", cp.h_star},
                                        {"T", cp.T_star},
                                        {"kind", extremum_kind_name(cp.kind)},
                                        {"bracket", {cp.bracket_lo, cp.bracket_hi}},
                                        {"refined_width", cp.refined_width}});
    }
    j["epsilon_schedule"] = nlohmann::json::array();
    for (const auto& t : report.schedule) {
        j["epsilon_schedule"].push_back({{"epsilon", t.epsilon},
                                         {"found", t.found},
                                         {"samples", t.samples},
                                         {"failed", t.failed}});
    }
    return j;
}

void write_curve_csv(std::ostream& os, const PeriodCurve& curve) {
    write_samples_csv(os, curve.samples);
}

}  // namespace periods
