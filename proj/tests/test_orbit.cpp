#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "periods/errors.hpp"
#include "periods/orbit.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

using namespace periods;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), 1e-300); }

}  // namespace

TEST_CASE("turning points on both sides") {
    System well = build_potential({Rational(1)}, 0);
    // simple root: G(1/2) = 11/192
    CHECK(rel_diff(turning_point(well.x_side, 11.0 / 192, Side::Positive), 0.5) < 1e-12);
    // cuspidal level: triple root of G(x) = 1/12 at x = 1; accuracy is
    // limited to the double-precision noise floor of the cubic tangency
    CHECK(rel_diff(turning_point(well.x_side, 1.0 / 12, Side::Positive), 1.0) < 1e-5);

    System harmonic = build_potential({}, 0);
    CHECK(rel_diff(turning_point(harmonic.x_side, 2.0, Side::Positive), 2.0) < 1e-13);
    CHECK(rel_diff(turning_point(harmonic.x_side, 2.0, Side::Negative), -2.0) < 1e-13);

    System even = build_potential({Rational(1)}, 0, Rational(4));
    CHECK_THROWS_AS(turning_point(even.x_side, 1e3, Side::Positive), RangeError);
    CHECK_NOTHROW(turning_point(even.x_side, 1e3, Side::Negative));
    CHECK_THROWS_AS(turning_point(even.x_side, -1.0, Side::Positive), RangeError);
}

TEST_CASE("turning point residuals meet the level to 1e-12") {
    System sys = build_separable({Rational(4)}, {Rational(2)}, 0);
    double h = 1.0;
    TurningPoints tp = turning_points(sys, h);
    CHECK(tp.x_minus < 0.0);
    CHECK(tp.x_plus > 0.0);
    CHECK(tp.y_minus < 0.0);
    CHECK(tp.y_plus > 0.0);
    for (double v : {sys.x_side.value(tp.x_minus), sys.x_side.value(tp.x_plus),
                     sys.y_side.value(tp.y_minus), sys.y_side.value(tp.y_plus)})
        CHECK(rel_diff(v, h) < 1e-12);
}

TEST_CASE("linearized period formulas") {
    CHECK(linearized_period(build_potential({1, 2, 3}, 0)) ==
          doctest::Approx(std::numbers::pi / 3).epsilon(1e-14));
    CHECK(linearized_period(build_separable({Rational(4)}, {Rational(2)}, 0)) ==
          doctest::Approx(std::numbers::pi / 4).epsilon(1e-14));
    CHECK(linearized_period(build_potential({Rational(1)}, Rational(1, 1000))) ==
          doctest::Approx(kTwoPi / std::sqrt(1.001)).epsilon(1e-14));
    // even family: the saddle factor contributes beta_k to g'(0)
    CHECK(linearized_period(build_potential({Rational(1)}, 0, Rational(4))) ==
          doctest::Approx(kTwoPi / 2.0).epsilon(1e-14));
}

TEST_CASE("harmonic oscillator returns in 2 pi at any energy") {
    System sys = build_potential({}, 0);
    for (double h : {0.1, 1.0, 10.0}) {
        PeriodSample s = period_return_time(sys, h);
        CHECK(rel_diff(s.T, kTwoPi) < 1e-9);
        CHECK(s.energy_drift <= 1e-9 * std::max(1.0, h));
        CHECK(s.method == PeriodMethod::ReturnTime);
        PeriodSample q = period_quadrature_potential(sys, h);
        CHECK(rel_diff(q.T, kTwoPi) < 1e-10);
        CHECK(std::isnan(q.energy_drift));
    }
}

TEST_CASE("return time and quadrature agree across annuli") {
    System well = build_potential({Rational(1)}, 0);
    for (double h : {1.0 / 24, 0.5}) {  // inner annulus, outer annulus
        PeriodSample r = period_return_time(well, h);
        PeriodSample q = period_quadrature_potential(well, h);
        CHECK(rel_diff(r.T, q.T) < 1e-6);
    }
    // frozen cross-oracle values
    CHECK(rel_diff(period_quadrature_potential(well, 1.0 / 24).T, 7.277970730121) < 1e-8);
    CHECK(rel_diff(period_quadrature_potential(well, 0.5).T, 6.805221848239) < 1e-8);
}

TEST_CASE("period grows toward a cusp level from below") {
    System well = build_potential({Rational(1)}, 0);
    const double hc = 1.0 / 12;
    double prev = 0.0;
    for (int j = 3; j <= 6; ++j) {
        double T = period_quadrature_potential(well, hc * (1.0 - std::pow(10.0, -j))).T;
        CHECK(T > prev);
        prev = T;
    }
}

TEST_CASE("near-separatrix and out-of-range energies are refused") {
    System well = build_potential({Rational(1)}, 0);
    CHECK_THROWS_AS(period_return_time(well, (1.0 / 12) * (1.0 - 1e-13)), NearSeparatrixError);
    CHECK_THROWS_AS(period_return_time(well, 1.0 / 12), NearSeparatrixError);
    CHECK_THROWS_AS(period_return_time(well, 0.0), RangeError);
    CHECK_THROWS_AS(period_return_time(well, -1.0), RangeError);

    System even = build_potential({Rational(1)}, Rational(1, 100), Rational(4));
    REQUIRE(even.annulus_roof_energy.has_value());
    CHECK_THROWS_AS(period_return_time(even, *even.annulus_roof_energy * 1.01), RangeError);
    // perturbed wells are regular: the former cusp level is admissible
    CHECK_NOTHROW(period_return_time(rebuild_with_epsilon(well.spec, Rational(1, 100)), 1.0 / 12));
}

TEST_CASE("separable small-oscillation limit") {
    System sys = build_separable({Rational(4)}, {Rational(2)}, 0);
    const double h1 = 4.0 / 3;
    double a = 1e-6 * h1;
    double Ta = period_return_time(sys, a).T;
    double T2a = period_return_time(sys, 2 * a).T;
    // the error is linear in h, so one Richardson step lands on T(0)
    double T0 = 2 * Ta - T2a;
    CHECK(rel_diff(T0, std::numbers::pi / 4) < 1e-8);
    // linear decay of the defect itself
    CHECK(rel_diff((T2a - T0) / (Ta - T0), 2.0) < 0.05);
}

TEST_CASE("potential systems close with mirror symmetry: T = 2 x half time") {
    System a = build_potential({Rational(1)}, Rational(1, 1000));
    for (double h : {0.05, 0.3}) {
        double T = period_return_time(a, h).T;
        double half = half_period_return_time(a, h);
        CHECK(rel_diff(T, 2 * half) < 1e-8);
    }
    System b = build_potential({1, 2, 3}, 0);
    double h = 0.5 * (1283.0 / 840);  // inside the first annulus
    CHECK(rel_diff(period_return_time(b, h).T, 2 * half_period_return_time(b, h)) < 1e-8);
}

TEST_CASE("scaling identity: beta -> 2 beta, eps -> 4 eps") {
    // k = 1: T_{2b,4e}(16 h) = T_{b,e}(h) / 2
    System base1 = build_potential({Rational(1)}, Rational(1, 1000));
    System scaled1 = build_potential({Rational(2)}, Rational(4, 1000));
    for (double h : {0.03, 0.2}) {
        double lhs = period_return_time(scaled1, 16 * h).T;
        double rhs = 0.5 * period_return_time(base1, h).T;
        CHECK(rel_diff(lhs, rhs) < 1e-8);
    }
    // k = 2: lambda^{2k+2} = 64, lambda^{-k} = 1/4
    System base2 = build_potential({Rational(1), Rational(2)}, Rational(1, 1000));
    System scaled2 = build_potential({Rational(2), Rational(4)}, Rational(4, 1000));
    for (double h : {0.1, 0.5}) {
        double lhs = period_return_time(scaled2, 64 * h).T;
        double rhs = 0.25 * period_return_time(base2, h).T;
        CHECK(rel_diff(lhs, rhs) < 1e-8);
    }
}

TEST_CASE("orbit trace of the unit circle") {
    System sys = build_potential({}, 0);
    OrbitTrace trace = trace_orbit(sys, 0.5, 4);
    REQUIRE(trace.points.size() == 5);
    // clockwise from (1, 0): south, west, north, home
    const double tol = 1e-9;
    CHECK(std::abs(trace.points[0][0] - 1.0) < tol);
    CHECK(std::abs(trace.points[0][1]) < tol);
    CHECK(std::abs(trace.points[1][0]) < tol);
    CHECK(std::abs(trace.points[1][1] + 1.0) < tol);
    CHECK(std::abs(trace.points[2][0] + 1.0) < tol);
    CHECK(std::abs(trace.points[3][1] - 1.0) < tol);
    CHECK(std::abs(trace.points[4][0] - trace.points[0][0]) < 1e-8);
    CHECK(std::abs(trace.points[4][1] - trace.points[0][1]) < 1e-8);
}

TEST_CASE("orbit traces stay on the level set and close") {
    System b = build_potential({1, 2, 3}, 0);
    const double h = 0.5 * (1283.0 / 840);
    OrbitTrace trace = trace_orbit(b, h, 64);
    for (const auto& p : trace.points)
        CHECK(std::abs(b.hamiltonian(p[0], p[1]) - h) <= 1e-9 * std::max(1.0, h));
    const auto& first = trace.points.front();
    const auto& last = trace.points.back();
    CHECK(std::hypot(first[0] - last[0], first[1] - last[1]) < 1e-7);

    System sep = build_separable({Rational(4)}, {Rational(2)}, 0);
    OrbitTrace st = trace_orbit(sep, 1.0, 32);
    CHECK(st.points.front()[0] == doctest::Approx(turning_point(sep.x_side, 1.0, Side::Positive)));
    for (const auto& p : st.points)
        CHECK(std::abs(sep.hamiltonian(p[0], p[1]) - 1.0) <= 1e-9);
}

TEST_CASE("monotone head and tail of the one-well period function") {
    System well = build_potential({Rational(1)}, 0);
    const double h1 = 1.0 / 12;
    double prev = 0.0;
    for (int i = 0; i < 16; ++i) {
        double h = h1 * std::pow(10.0, -4.0 + 3.9996 * i / 15);  // up to h1 (1 - 1e-4)
        double T = period_quadrature_potential(well, h).T;
        CHECK(T > prev);
        prev = T;
    }
    prev = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 16; ++i) {
        double h = h1 * (1.0 + 1e-4) * std::pow(100.0 / (1.0 + 1e-4), i / 15.0);
        double T = period_quadrature_potential(well, h).T;
        CHECK(T < prev);
        prev = T;
    }
}

TEST_CASE("small-h defect shrinks linearly") {
    System sys = build_potential({1, 2, 3}, 0);
    const double T0 = linearized_period(sys);
    const double h1 = 1283.0 / 840;
    double d1 = period_return_time(sys, 1e-7 * h1).T - T0;
    double d2 = period_return_time(sys, 2e-7 * h1).T - T0;
    CHECK(d2 / d1 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("quadrature is refused for separable systems") {
    System sys = build_separable({Rational(4)}, {Rational(2)}, 0);
    CHECK_THROWS_AS(period_quadrature_potential(sys, 0.5), ValidationError);
}

TEST_CASE("csv emission uses full precision") {
    System sys = build_potential({}, 0);
    PeriodSample s = period_return_time(sys, 1.0);
    std::ostringstream os;
    write_samples_csv(os, {s});
    const std::string text = os.str();
    CHECK(text.find("h,T,method,err,drift\n") == 0);
    CHECK(text.find("6.2831853") != std::string::npos);
    CHECK(text.find("return-time") != std::string::npos);
    // the T column round-trips: 17 significant digits
    std::size_t start = text.find(",6.2831853") + 1;
    std::size_t end = text.find(',', start);
    double parsed = std::stod(text.substr(start, end - start));
    CHECK(parsed == s.T);

    OrbitTrace tr = trace_orbit(sys, 0.5, 2);
    std::ostringstream ts;
    write_trace_csv(ts, tr);
    CHECK(ts.str().rfind("x,y\n", 0) == 0);
}
