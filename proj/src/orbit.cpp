#include "periods/orbit.hpp"

#include "periods/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>

namespace periods {

std::string period_method_name(PeriodMethod m) {
    return m == PeriodMethod::ReturnTime ? "return-time" : "quadrature";
}

namespace {

constexpr double kNearSeparatrixRel = 1e-12;
constexpr double kDriftBoundRel = 1e-9;

[[noreturn]] void throw_near_separatrix(double h, double level) {
    std::ostringstream os;
    os << "energy " << h << " is within 1e-12 relative of the singular level " << level;
    throw NearSeparatrixError(os.str(), h);
}

/// Root of V(x) = h inside [lo, hi], V monotone across the bracket.
/// Bisection narrows the bracket; Newton steps are taken whenever they stay
/// inside it. The constant term of V - h is formed exactly (V(0) = 0), so the
/// compensated evaluation keeps full precision near the root.
double refine_root(const DoublePoly& value, const DoublePoly& slope, double h, double lo,
                   double hi) {
    std::vector<double> c(value.coeffs().begin(), value.coeffs().end());
    if (c.empty()) c.push_back(0.0);
    c[0] -= h;
    auto f = [&](double x) { return horner_compensated(c, x); };

    double flo = f(lo), fhi = f(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
    if ((flo > 0) == (fhi > 0)) throw RangeError("root bracket does not straddle the level");

    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 120; ++iter) {
        double fx = f(x);
        if (fx == 0.0) return x;
        if ((fx > 0) == (flo > 0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
            fhi = fx;
        }
        double width = hi - lo;
        if (width <= 1e-15 * std::max(std::abs(lo), std::abs(hi)) + 1e-300) break;
        double dfx = slope(x);
        double candidate = dfx != 0.0 ? x - fx / dfx : 0.5 * (lo + hi);
        if (!(candidate > lo && candidate < hi)) candidate = 0.5 * (lo + hi);
        if (candidate == x) candidate = 0.5 * (lo + hi);
        if (candidate == lo || candidate == hi) break;
        x = candidate;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double turning_point(const AxisPotential& side, double h, Side which) {
    if (!(h > 0)) throw RangeError("turning point needs h > 0");
    if (which == Side::Positive) {
        if (side.positive_cap) {
            double cap = *side.positive_cap;
            if (side.value(cap) < h)
                throw RangeError("h above the attainable range on the positive side");
            return refine_root(side.value, side.slope, h, 0.0, cap);
        }
        double hi = 1.0;
        while (side.value(hi) < h) {
            hi *= 2.0;
            if (hi > 1e150) throw RangeError("no positive turning point below overflow guard");
        }
        return refine_root(side.value, side.slope, h, 0.0, hi);
    }
    double lo = -1.0;
    while (side.value(lo) < h) {
        lo *= 2.0;
        if (lo < -1e150) throw RangeError("no negative turning point below overflow guard");
    }
    return refine_root(side.value, side.slope, h, lo, 0.0);
}

TurningPoints turning_points(const System& sys, double h) {
    check_energy_admissible(sys, h);
    TurningPoints tp;
    tp.x_minus = turning_point(sys.x_side, h, Side::Negative);
    tp.x_plus = turning_point(sys.x_side, h, Side::Positive);
    tp.y_minus = turning_point(sys.y_side, h, Side::Negative);
    tp.y_plus = turning_point(sys.y_side, h, Side::Positive);
    return tp;
}

double linearized_period(const System& sys) {
    const double fp = sys.y_side.slope.coeff(1);
    const double gp = sys.x_side.slope.coeff(1);
    return 2.0 * std::numbers::pi / std::sqrt(fp * gp);
}

void check_energy_admissible(const System& sys, double h) {
    if (!(h > 0)) throw RangeError("energy must be positive");
    if (!std::isfinite(h)) throw RangeError("energy must be finite");
    if (sys.annulus_roof_energy) {
        const double roof = *sys.annulus_roof_energy;
        if (h >= roof) throw RangeError("energy at or above the saddle-loop bound");
        if (roof - h <= kNearSeparatrixRel * std::max(1.0, roof)) throw_near_separatrix(h, roof);
    }
    if (sys.spec.epsilon == 0) {
        for (double level : sys.skeleton_energies) {
            if (level <= 0.0) continue;
            if (std::abs(h - level) <= kNearSeparatrixRel * std::max(1.0, level))
                throw_near_separatrix(h, level);
        }
    }
}

namespace {

using State2 = std::array<double, 2>;

// Dormand-Prince 5(4) embedded pair, FSAL.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

/// One trial step; returns the scaled error norm. k1 must hold rhs(t, y);
/// k7 receives rhs(t + dt, y_new) for FSAL reuse.
template <class RHS>
double dopri5_step(const RHS& rhs, double t, const State2& y, double dt, const State2& k1,
                   State2& y_new, State2& k7, double atol, double rtol) {
    State2 k2, k3, k4, k5, k6, tmp;
    for (int i = 0; i < 2; ++i) tmp[i] = y[i] + dt * a21 * k1[i];
    rhs(t + c2 * dt, tmp, k2);
    for (int i = 0; i < 2; ++i) tmp[i] = y[i] + dt * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * dt, tmp, k3);
    for (int i = 0; i < 2; ++i) tmp[i] = y[i] + dt * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * dt, tmp, k4);
    for (int i = 0; i < 2; ++i)
        tmp[i] = y[i] + dt * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * dt, tmp, k5);
    for (int i = 0; i < 2; ++i)
        tmp[i] = y[i] + dt * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    rhs(t + dt, tmp, k6);
    for (int i = 0; i < 2; ++i)
        y_new[i] = y[i] + dt * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    rhs(t + dt, y_new, k7);

    double err = 0.0;
    for (int i = 0; i < 2; ++i) {
        double ei = dt * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] +
                          e7 * k7[i]);
        double scale = atol + rtol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        double r = ei / scale;
        err += r * r;
    }
    return std::sqrt(0.5 * err);
}

constexpr double kSafety = 0.9, kShrinkMin = 0.2, kGrowMax = 5.0;

double next_dt(double dt, double err) {
    double factor = err > 0.0 ? kSafety * std::pow(err, -0.2) : kGrowMax;
    return dt * std::clamp(factor, kShrinkMin, kGrowMax);
}

/// Adaptive integration of `state` from s0 to s1 (either direction); the last
/// step is clamped exactly onto s1.
template <class RHS>
void advance_to(const RHS& rhs, State2& state, double s0, double s1, double atol, double rtol,
                double h_for_errors) {
    if (s0 == s1) return;
    const double dir = s1 > s0 ? 1.0 : -1.0;
    const double done = 4e-16 * std::max(1.0, std::abs(s1));
    double s = s0;
    double dt = dir * std::max(1e-14, 1e-3 * std::abs(s1 - s0));
    State2 k1, k7, y_new;
    rhs(s, state, k1);
    long steps = 0;
    while (dir * (s1 - s) > done) {
        if (dir * (s + dt) > dir * s1) dt = s1 - s;
        double err = dopri5_step(rhs, s, state, dt, k1, y_new, k7, atol, rtol);
        if (err <= 1.0) {
            s += dt;
            state = y_new;
            k1 = k7;
        }
        dt = next_dt(dt, err);
        if (std::abs(dt) < 1e-17 * std::max(1.0, std::abs(s)))
            throw NearSeparatrixError("step size underflow", h_for_errors);
        if (++steps > 2'000'000) throw IntegrationError("integration budget exhausted");
    }
}

struct FlowRhs {
    const DoublePoly* f;
    const DoublePoly* g;
    void operator()(double, const State2& s, State2& d) const {
        d[0] = (*f)(s[1]);
        d[1] = -(*g)(s[0]);
    }
};

/// x and t driven by y:  dx/dy = f(y) / (-g(x)),  dt/dy = 1 / (-g(x)).
struct ExchangeRhs {
    const DoublePoly* f;
    const DoublePoly* g;
    void operator()(double y, const State2& s, State2& d) const {
        const double gx = -(*g)(s[0]);
        d[0] = (*f)(y) / gx;
        d[1] = 1.0 / gx;
    }
};

struct ReturnResult {
    double time = 0.0;
    double x_landing = 0.0;
};

/// Integrates from (x_plus(h), 0) until the requested section crossing
/// (1 = half revolution at x < 0, 2 = full revolution at x > 0), finishing
/// with the variable-exchange end-game exactly onto y = 0.
ReturnResult integrate_to_crossing(const System& sys, double h, int target_crossing,
                                   const OdeTolerances& tol) {
    check_energy_admissible(sys, h);
    const double x_start = turning_point(sys.x_side, h, Side::Positive);
    FlowRhs flow{&sys.y_side.slope, &sys.x_side.slope};

    State2 y{x_start, 0.0};
    double t = 0.0;
    const double speed0 = std::abs(sys.g(x_start));
    double dt = 1e-3 * std::max(1e-12, std::abs(x_start)) / std::max(speed0, 1e-12);
    State2 k1, k7, y_new;
    flow(t, y, k1);

    int crossings = 0;
    long steps = 0;
    while (true) {
        double err = dopri5_step(flow, t, y, dt, k1, y_new, k7, tol.abs, tol.rel);
        if (err <= 1.0) {
            const double y_prev = y[1];
            t += dt;
            const bool upward = y_prev < 0.0 && y_new[1] >= 0.0;
            const bool downward = y_prev > 0.0 && y_new[1] <= 0.0;
            y = y_new;
            k1 = k7;
            if (upward || downward) {
                ++crossings;
                if (crossings == target_crossing) break;
            }
        }
        dt = next_dt(dt, err);
        if (dt < 1e-17 * std::max(1.0, t)) throw NearSeparatrixError("step size underflow", h);
        if (++steps > 2'000'000)
            throw IntegrationError("integration budget exhausted before section closure");
    }

    // End-game: from the overshoot point, land exactly on y = 0 with y as the
    // independent variable.
    ReturnResult res;
    if (y[1] == 0.0) {
        res.time = t;
        res.x_landing = y[0];
        return res;
    }
    ExchangeRhs exchange{&sys.y_side.slope, &sys.x_side.slope};
    State2 xe{y[0], t};
    advance_to(exchange, xe, y[1], 0.0, tol.abs, tol.rel, h);
    res.x_landing = xe[0];
    res.time = xe[1];
    return res;
}

}  // namespace

PeriodSample period_return_time(const System& sys, double h, const OdeTolerances& tol) {
    ReturnResult res = integrate_to_crossing(sys, h, 2, tol);
    PeriodSample sample;
    sample.h = h;
    sample.T = res.time;
    sample.method = PeriodMethod::ReturnTime;
    sample.energy_drift = std::abs(sys.hamiltonian(res.x_landing, 0.0) - h);
    if (sample.energy_drift > kDriftBoundRel * std::max(1.0, std::abs(h))) {
        std::ostringstream os;
        os << "energy drift " << sample.energy_drift << " exceeds the 1e-9*max(1,|h|) bound at h="
           << h;
        throw IntegrationError(os.str());
    }
    sample.err_estimate = sample.energy_drift + tol.rel * sample.T;
    if (!(sample.T > 0) || !std::isfinite(sample.T))
        throw IntegrationError("nonpositive or nonfinite period");
    return sample;
}

double half_period_return_time(const System& sys, double h, const OdeTolerances& tol) {
    return integrate_to_crossing(sys, h, 1, tol).time;
}

PeriodSample period_quadrature_potential(const System& sys, double h) {
    if (family_is_separable(sys.spec.family))
        throw ValidationError("quadrature period is implemented for potential families only");
    check_energy_admissible(sys, h);
    const double x1 = turning_point(sys.x_side, h, Side::Negative);
    const double x2 = turning_point(sys.x_side, h, Side::Positive);
    const double center = 0.5 * (x1 + x2);
    const double radius = 0.5 * (x2 - x1);

    std::vector<double> q(sys.x_side.value.coeffs().begin(), sys.x_side.value.coeffs().end());
    if (q.empty()) q.push_back(0.0);
    q[0] -= h;  // -(h - G(x)) up to sign; G(0) = 0 keeps this exact

    auto rule = [&](int n) {
        double sum = 0.0;
        for (int j = 1; j <= n; ++j) {
            const double theta = (2.0 * j - 1.0) * std::numbers::pi / (2.0 * n);
            const double x = center + radius * std::cos(theta);
            const double rho = -horner_compensated(q, x) / ((x - x1) * (x2 - x));
            if (!(rho > 0.0)) throw NearSeparatrixError("quadrature weight function vanished", h);
            sum += 1.0 / std::sqrt(rho);
        }
        return std::numbers::sqrt2 * (std::numbers::pi / n) * sum;
    };

    int n = 64;
    double T = rule(n), T2 = rule(2 * n);
    while (std::abs(T - T2) > 1e-9 * std::abs(T2) && n < 4096) {
        n *= 2;
        T = T2;
        T2 = rule(2 * n);
    }

    PeriodSample sample;
    sample.h = h;
    sample.T = T2;
    sample.method = PeriodMethod::Quadrature;
    sample.err_estimate = std::abs(T - T2);
    sample.energy_drift = std::numeric_limits<double>::quiet_NaN();
    return sample;
}

OrbitTrace trace_orbit(const System& sys, double h, int n_points, const OdeTolerances& tol) {
    if (n_points < 2) throw ValidationError("trace needs at least 2 points");
    const double period = period_return_time(sys, h, tol).T;
    const double x_start = turning_point(sys.x_side, h, Side::Positive);

    FlowRhs flow{&sys.y_side.slope, &sys.x_side.slope};
    OrbitTrace trace;
    trace.h = h;
    trace.points.reserve(static_cast<std::size_t>(n_points) + 1);

    State2 state{x_start, 0.0};
    trace.points.push_back({state[0], state[1]});
    const double drift_bound = kDriftBoundRel * std::max(1.0, std::abs(h));
    for (int i = 1; i <= n_points; ++i) {
        const double t_prev = (i - 1) * period / n_points;
        const double t_next = i * period / n_points;
        advance_to(flow, state, t_prev, t_next, tol.abs, tol.rel, h);
        trace.points.push_back({state[0], state[1]});
        if (std::abs(sys.hamiltonian(state[0], state[1]) - h) > drift_bound)
            throw IntegrationError("orbit trace drifted off the level set");
    }
    return trace;
}

namespace {

void write_g17(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

}  // namespace

void write_trace_csv(std::ostream& os, const OrbitTrace& trace) {
    os << "x,y\n";
    for (const auto& p : trace.points) {
        write_g17(os, p[0]);
        os << ',';
        write_g17(os, p[1]);
        os << '\n';
    }
}

void write_samples_csv(std::ostream& os, const std::vector<PeriodSample>& samples) {
    os << "h,T,method,err,drift\n";
    for (const auto& s : samples) {
        write_g17(os, s.h);
        os << ',';
        write_g17(os, s.T);
        os << ',' << period_method_name(s.method) << ',';
        write_g17(os, s.err_estimate);
        os << ',';
        write_g17(os, s.energy_drift);
        os << '\n';
    }
}

}  // namespace periods
