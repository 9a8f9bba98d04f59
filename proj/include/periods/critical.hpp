#pragma once

#include "periods/energy.hpp"
#include "periods/orbit.hpp"

#include <span>
#include <vector>

namespace periods {

struct GridParams {
    int global_points = 256;
    int cluster_points = 64;   // per side of each cluster center
    int cluster_decades = 8;   // relative offsets 1e-10 .. 1e-10 * 10^decades
};

struct GridMeta {
    std::vector<double> cluster_centers;
    std::vector<double> annulus_edges;  // eps=0 skeleton energies inside the range
    double h_floor = 0.0;
    double h_roof = 0.0;
    double epsilon = 0.0;
};

struct PeriodCurve {
    std::vector<PeriodSample> samples;  // ascending in h
    GridMeta meta;
    std::size_t attempted = 0;
    std::size_t failed = 0;
    std::vector<std::string> log;  // one entry per dropped sample
};

enum class ExtremumKind { Minimum, Maximum };

std::string extremum_kind_name(ExtremumKind k);

struct CriticalPoint {
    double h_star = 0.0;
    double T_star = 0.0;
    ExtremumKind kind = ExtremumKind::Minimum;
    double bracket_lo = 0.0;
    double bracket_hi = 0.0;
    double refined_width = 0.0;
};

struct ScheduleTrial {
    double epsilon = 0.0;
    int found = 0;
    std::size_t samples = 0;
    std::size_t failed = 0;
};

struct BoundReport {
    Family family = Family::PotentialOdd;
    int k = 0;
    double epsilon_used = 0.0;
    int required = 0;
    int found = 0;
    bool pass = false;
    std::vector<CriticalPoint> critical_points;
    std::vector<ScheduleTrial> schedule;
};

/// Union of (a) a log-uniform global grid on (1e-6 h_1, roof), with
/// roof = 1e3 h_last for odd families and 0.999 hbar_k for even ones,
/// (b) two-sided geometric clusters around each interior ledger entry (and
/// any extra centers, e.g. perturbed critical energies), (c) annulus-interval
/// midpoints; deduplicated and sorted.
std::vector<double> build_h_grid(const EnergyLedger& ledger, const GridParams& params,
                                 const System& sys,
                                 std::span<const double> extra_centers = {},
                                 GridMeta* meta_out = nullptr);

/// When eps > 0: the perturbed analogues H(x_s, y_s; eps) of the interior
/// singular energies, where period peaks concentrate.
std::vector<double> perturbed_cluster_centers(const System& sys);

/// Parallel map of period_return_time over the grid; near-separatrix and
/// out-of-range samples are dropped (counted in `failed`). Throws
/// CurveQualityError when more than 10% of the attempted samples fail.
PeriodCurve sample_curve(const System& sys, std::span<const double> grid);

/// Grid-seeded three-point extremum detection with golden-section refinement
/// on fresh period evaluations; refined to width <= 1e-6 h_star. Seeds of the
/// same kind closer than 1e-4 relative are merged. At eps = 0 detection works
/// per annulus so divergence toward a separatrix is never reported as an
/// extremum. Non-convergent refinements are excluded and noted in `log`.
std::vector<CriticalPoint> detect_critical_points(const PeriodCurve& curve, const System& sys,
                                                  std::vector<std::string>* log = nullptr);

/// Lower bound asserted by the family: 2k-1 / 2k-2 (potential odd/even),
/// 2k^2+4k-1 / 2k^2-2 (separable odd/even).
int required_critical_points(Family family, int k);

/// Hypothesis check, then sample + detect at epsilon_start, halving epsilon
/// (up to max_halvings) until the family's bound is met. The returned report
/// carries the full schedule log.
BoundReport verify_bound(const SystemSpec& spec, double epsilon_start,
                         const GridParams& grid = {}, int max_halvings = 12);

/// Least-squares slope of log T against log h over `decades` decades starting
/// at 1e2 * h_last, sampled with points_per_decade return-time evaluations.
double tail_exponent(const System& sys, int decades, int points_per_decade = 8);

struct PeakProbe {
    double epsilon = 0.0;
    std::vector<double> peak_T;  // one per interior ledger entry, ascending in h
};

/// For each epsilon (strictly decreasing), the maximum sampled period within
/// the cluster around each interior skeleton energy.
std::vector<PeakProbe> peak_growth_probe(const SystemSpec& spec, std::span<const double> eps_list,
                                         const GridParams& grid = {});

nlohmann::json report_to_json(const BoundReport& report);
void write_curve_csv(std::ostream& os, const PeriodCurve& curve);

}  // namespace periods
