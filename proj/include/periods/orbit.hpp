#pragma once

#include "periods/system.hpp"

#include <array>
#include <iosfwd>
#include <vector>

namespace periods {

enum class Side { Negative, Positive };

struct TurningPoints {
    double x_minus = 0.0;  // < 0
    double x_plus = 0.0;   // > 0
    double y_minus = 0.0;  // < 0
    double y_plus = 0.0;   // > 0
};

enum class PeriodMethod { ReturnTime, Quadrature };

std::string period_method_name(PeriodMethod m);

struct PeriodSample {
    double h = 0.0;
    double T = 0.0;
    PeriodMethod method = PeriodMethod::ReturnTime;
    double err_estimate = 0.0;
    double energy_drift = 0.0;  // NaN for quadrature samples
};

struct OrbitTrace {
    std::vector<std::array<double, 2>> points;  // closes back to the start
    double h = 0.0;
};

/// Integrator tolerances shared by the return-time paths.
struct OdeTolerances {
    double rel = 1e-11;
    double abs = 1e-13;
};

/// Root of side.value(t) = h on the requested side of 0, bracketed by
/// doubling then polished by bisection + guarded Newton to ~1e-13 relative
/// (limited by the conditioning of the root). Throws RangeError when h is
/// not attainable on that side (even families beyond the saddle energy).
double turning_point(const AxisPotential& side, double h, Side which);

TurningPoints turning_points(const System& sys, double h);

/// 2*pi / sqrt(f'(0) g'(0)): the small-oscillation limit of the period.
double linearized_period(const System& sys);

/// Throws NearSeparatrixError when eps = 0 and h is within 1e-12 relative of
/// a skeleton energy, and RangeError when h is outside (0, roof).
void check_energy_admissible(const System& sys, double h);

/// Period as the return time of the flow (xdot, ydot) = (f(y), -g(x)) to the
/// section {y = 0, x > 0}, starting at (x_plus(h), 0). The final section
/// landing integrates x and t with y as the independent variable from the
/// overshoot point exactly onto y = 0.
PeriodSample period_return_time(const System& sys, double h, const OdeTolerances& tol = {});

/// Time from (x_plus(h), 0) to the first section crossing at x < 0 (half a
/// revolution for systems symmetric in y).
double half_period_return_time(const System& sys, double h, const OdeTolerances& tol = {});

/// Potential-family period by Chebyshev-weighted quadrature:
///   T = sqrt(2) * Integral dx / sqrt(h - G(x)) over [x1, x2]
/// with the inverse-square-root endpoint behavior absorbed by the Chebyshev
/// weight: T ~ sqrt(2) (pi/N) sum rho(x_j)^{-1/2},
///   rho(x) = (h - G(x)) / ((x - x1)(x2 - x)),
/// which is analytic and positive on [x1, x2]. Nodes start at N = 64 and
/// double until |T_N - T_2N| <= 1e-9 T or N = 4096; the last doubling
/// difference is the error estimate.
PeriodSample period_quadrature_potential(const System& sys, double h);

/// n_points samples equally spaced in time along one revolution, plus the
/// integrated return point as a closing row.
OrbitTrace trace_orbit(const System& sys, double h, int n_points, const OdeTolerances& tol = {});

void write_trace_csv(std::ostream& os, const OrbitTrace& trace);
void write_samples_csv(std::ostream& os, const std::vector<PeriodSample>& samples);

}  // namespace periods
