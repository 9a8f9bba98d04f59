#include "periods/energy.hpp"

#include "periods/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace periods {

std::string singularity_kind_name(SingularityKind k) {
    switch (k) {
        case SingularityKind::Center: return "center";
        case SingularityKind::Cusp: return "cusp";
        case SingularityKind::Saddle: return "saddle";
        case SingularityKind::Degenerate: return "degenerate";
    }
    throw std::logic_error("unreachable kind");
}

double EnergyLedger::upper_bound() const {
    if (saddle_bounded) return entries.back().h;
    return std::numeric_limits<double>::infinity();
}

namespace {

struct GridPoint {
    int ix = 0;  // 0 = origin column, 1..k = beta index, -1 = saddle
    int iy = 0;  // 0 = origin row, 1..k = alpha index
    Singularity sing;
};

SingularityKind classify(int ix, int iy) {
    if (ix == 0 && iy == 0) return SingularityKind::Center;
    if (ix == -1) return iy == 0 ? SingularityKind::Saddle : SingularityKind::Degenerate;
    if (ix == 0 || iy == 0) return SingularityKind::Cusp;
    return SingularityKind::Degenerate;
}

/// All grid points (ix, iy) of the unperturbed system with coordinates,
/// kinds and energies (exact where the coefficients allow).
std::vector<GridPoint> singular_grid(const System& sys) {
    const SystemSpec& spec = sys.spec;
    const bool even = family_is_even(spec.family);
    const bool separable = family_is_separable(spec.family);

    const auto betas = spec.beta_values();
    const auto alphas = spec.alpha_values();
    const auto saddle = spec.saddle_value();

    std::vector<int> xcols{0};
    for (int i = 1; i <= static_cast<int>(betas.size()); ++i) xcols.push_back(i);
    if (even) xcols.push_back(-1);
    std::vector<int> yrows{0};
    if (separable)
        for (int j = 1; j <= static_cast<int>(alphas.size()); ++j) yrows.push_back(j);

    std::vector<GridPoint> grid;
    for (int ix : xcols) {
        for (int iy : yrows) {
            GridPoint p;
            p.ix = ix;
            p.iy = iy;
            p.sing.kind = classify(ix, iy);
            p.sing.x = ix == 0 ? 0.0 : (ix == -1 ? *saddle : betas[ix - 1]);
            p.sing.y = iy == 0 ? 0.0 : alphas[iy - 1];
            p.sing.energy = sys.hamiltonian(p.sing.x, p.sing.y);
            if (sys.exact()) {
                Rational bx = ix == 0 ? Rational(0) : (ix == -1 ? *spec.saddle_beta : spec.betas[ix - 1]);
                Rational ay = iy == 0 ? Rational(0) : spec.alphas[iy - 1];
                p.sing.energy_exact = sys.hamiltonian_exact(bx, ay);
                p.sing.energy = to_double(*p.sing.energy_exact);
            } else if (ix == 0 && sys.y_side.exact) {
                Rational ay = iy == 0 ? Rational(0) : spec.alphas[iy - 1];
                p.sing.energy_exact = sys.y_side.value_exact(ay);
                p.sing.energy = to_double(*p.sing.energy_exact);
            }
            grid.push_back(std::move(p));
        }
    }
    return grid;
}

/// Reduced x-side antiderivative for e-scaled families: G0(e u) = e^p X(u)
/// with integer-grid roots; p = 2k+2 (odd) or 2k+1 (even).
struct EScaledStructure {
    RationalPoly y_anti;  // F at integer arguments
    RationalPoly x_anti;  // X at integer arguments
    unsigned e_power = 0;
};

RationalPoly integer_grid_slope(int count, std::optional<Rational> saddle) {
    RationalPoly p(std::vector<Rational>{Rational(0), Rational(1)});
    for (int i = 1; i <= count; ++i) {
        RationalPoly lin = RationalPoly::linear_root(Rational(i));
        p = p * lin * lin;
    }
    if (saddle) p = p * RationalPoly(std::vector<Rational>{*saddle, Rational(-1)});
    return p;
}

EScaledStructure e_scaled_structure(const SystemSpec& spec) {
    EScaledStructure s;
    const bool even = family_is_even(spec.family);
    const int k = spec.k();
    const int roots = even ? k - 1 : k;
    s.y_anti = integer_grid_slope(roots, {}).antiderivative();
    s.x_anti = integer_grid_slope(roots, even ? spec.saddle_beta : std::optional<Rational>{})
                   .antiderivative();
    s.e_power = static_cast<unsigned>(even ? 2 * k + 1 : 2 * k + 2);
    return s;
}

/// Exact order of two e-scaled grid energies F(j) + e^p X(i).
int compare_e_scaled(const EScaledStructure& s, int ix1, int iy1, int ix2, int iy2,
                     const Rational& saddle_index) {
    auto xval = [&](int ix) {
        return s.x_anti(ix == -1 ? saddle_index : Rational(ix));
    };
    Rational a = s.y_anti(Rational(iy1)) - s.y_anti(Rational(iy2));
    Rational b = xval(ix1) - xval(ix2);
    return sign_linear_in_euler_power(a, b, s.e_power);
}

std::string describe_point(const Singularity& s) {
    std::ostringstream os;
    os << singularity_kind_name(s.kind) << " at (" << s.x << ", " << s.y << ")";
    return os.str();
}

}  // namespace

std::vector<Singularity> singular_points(const System& sys) {
    if (sys.spec.epsilon != 0)
        throw ValidationError(
            "perturbed system has a unique equilibrium (a global center); "
            "singularities refer to the epsilon = 0 skeleton");
    std::vector<Singularity> out;
    for (auto& p : singular_grid(sys)) out.push_back(p.sing);
    return out;
}

EnergyLedger critical_energy_ledger(const System& sys) {
    const System base = sys.spec.epsilon == 0 ? sys : rebuild_with_epsilon(sys.spec, 0);
    const bool even = family_is_even(base.spec.family);

    auto grid = singular_grid(base);

    std::vector<GridPoint> interior;
    std::optional<GridPoint> saddle;
    for (auto& p : grid) {
        if (p.ix == -1) {
            if (p.iy == 0) saddle = p;
            // saddle-column degenerate points lie outside the period annulus
            continue;
        }
        interior.push_back(p);
    }

    std::optional<EScaledStructure> structure;
    if (base.spec.e_scaled) structure = e_scaled_structure(base.spec);
    const Rational saddle_index = base.spec.saddle_beta ? *base.spec.saddle_beta : Rational(0);

    auto less = [&](const GridPoint& a, const GridPoint& b) {
        if (a.sing.energy_exact && b.sing.energy_exact)
            return *a.sing.energy_exact < *b.sing.energy_exact;
        if (structure)
            return compare_e_scaled(*structure, a.ix, a.iy, b.ix, b.iy, saddle_index) < 0;
        return a.sing.energy < b.sing.energy;
    };
    std::sort(interior.begin(), interior.end(), less);

    EnergyLedger ledger;
    for (auto& p : interior)
        ledger.entries.push_back(LedgerEntry{p.sing.energy, p.sing.energy_exact, p.sing});
    if (even && saddle) {
        ledger.entries.push_back(
            LedgerEntry{saddle->sing.energy, saddle->sing.energy_exact, saddle->sing});
        ledger.saddle_bounded = true;
    }

    ledger.min_gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 1; i < ledger.entries.size(); ++i)
        ledger.min_gap = std::min(ledger.min_gap, ledger.entries[i].h - ledger.entries[i - 1].h);
    return ledger;
}

HypothesisVerdict check_hypothesis_numeric(const EnergyLedger& ledger, double tol) {
    HypothesisVerdict v;
    v.method = HypothesisVerdict::Method::NumericGap;
    v.tolerance = tol;
    v.min_gap = ledger.min_gap;
    const double h_max = ledger.entries.empty() ? 0.0 : std::abs(ledger.entries.back().h);
    const double scale = std::max(1.0, h_max);
    v.distinct = ledger.entries.size() < 2 || ledger.min_gap > tol * scale;
    if (!v.distinct) {
        for (std::size_t i = 1; i < ledger.entries.size(); ++i) {
            if (ledger.entries[i].h - ledger.entries[i - 1].h == ledger.min_gap) {
                v.witness = std::make_pair(ledger.entries[i - 1].source, ledger.entries[i].source);
                break;
            }
        }
    }
    if (ledger.saddle_bounded) {
        double interior_max = 0.0;
        for (std::size_t i = 0; i + 1 < ledger.entries.size(); ++i)
            interior_max = std::max(interior_max, std::abs(ledger.entries[i].h));
        v.dominance_ok = std::abs(ledger.entries.back().h) > interior_max;
        if (!*v.dominance_ok) v.distinct = false;
    }
    return v;
}

HypothesisVerdict certify_example_family(int k, Parity parity) {
    if (k < 1) throw ValidationError("example family needs k >= 1");
    if (k > 4) throw ValidationError("example family supports k <= 4");
    SystemSpec spec;
    spec.family = parity == Parity::Odd ? Family::SeparableOdd : Family::SeparableEven;
    const int roots = parity == Parity::Odd ? k : k - 1;
    for (int i = 1; i <= roots; ++i) {
        spec.alphas.emplace_back(i);
        spec.betas.emplace_back(i);
    }
    if (parity == Parity::Even) spec.saddle_beta = Rational(k) * Rational(k);
    spec.e_scaled = true;
    spec.validate();

    const EScaledStructure s = e_scaled_structure(spec);

    HypothesisVerdict v;
    v.method = HypothesisVerdict::Method::ExactRationalPairs;
    v.tolerance = 0.0;

    // Strict monotonicity of the integer-argument antiderivative sequences.
    bool monotone = true;
    for (int i = 0; i < roots; ++i) {
        if (!(s.y_anti(Rational(i)) < s.y_anti(Rational(i + 1)))) monotone = false;
        if (!(s.x_anti(Rational(i)) < s.x_anti(Rational(i + 1)))) monotone = false;
    }

    // Pairwise distinctness of F(j) + e^p X(i), decided exactly.
    bool distinct = monotone;
    const int n = roots + 1;
    for (int a = 0; a < n * n && distinct; ++a) {
        for (int b = a + 1; b < n * n && distinct; ++b) {
            int i1 = a / n, j1 = a % n, i2 = b / n, j2 = b % n;
            if (compare_e_scaled(s, i1, j1, i2, j2, Rational(0)) == 0) distinct = false;
        }
    }
    v.distinct = distinct;

    if (parity == Parity::Even) {
        // Saddle dominance: e^p X(k^2) > F(k-1) + e^p X(k-1).
        Rational a = -s.y_anti(Rational(k - 1));
        Rational b = s.x_anti(Rational(k) * Rational(k)) - s.x_anti(Rational(k - 1));
        v.dominance_ok = sign_linear_in_euler_power(a, b, s.e_power) > 0;
        if (!*v.dominance_ok) v.distinct = false;
    }

    // Numeric min gap for reporting.
    System sys = build_from_spec(spec);
    EnergyLedger ledger = critical_energy_ledger(sys);
    v.min_gap = ledger.min_gap;
    return v;
}

HypothesisVerdict certify_system(const System& sys) {
    if (!sys.spec.e_scaled)
        throw ValidationError(
            "exact certification applies to the e-scaled example families only; "
            "use check_hypothesis_numeric");
    return certify_example_family(
        sys.spec.k(), family_is_even(sys.spec.family) ? Parity::Even : Parity::Odd);
}

nlohmann::json ledger_to_json(const EnergyLedger& ledger) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& e : ledger.entries) {
        nlohmann::json j;
        j["h"] = e.h;
        j["h_exact"] = e.h_exact ? nlohmann::json(to_fraction_string(*e.h_exact)) : nlohmann::json();
        j["source"] = {{"x", e.source.x},
                       {"y", e.source.y},
                       {"kind", singularity_kind_name(e.source.kind)}};
        arr.push_back(std::move(j));
    }
    return arr;
}

nlohmann::json verdict_to_json(const HypothesisVerdict& v) {
    nlohmann::json j;
    j["distinct"] = v.distinct;
    j["method"] = v.method == HypothesisVerdict::Method::NumericGap ? "numeric-gap"
                                                                    : "exact-rational-pairs";
    j["min_gap"] = v.min_gap;
    j["tolerance"] = v.tolerance;
    if (v.witness) {
        j["witness"] = {{"first", describe_point(v.witness->first)},
                        {"second", describe_point(v.witness->second)}};
    } else {
        j["witness"] = nullptr;
    }
    j["dominance_ok"] = v.dominance_ok ? nlohmann::json(*v.dominance_ok) : nlohmann::json();
    return j;
}

}  // namespace periods
