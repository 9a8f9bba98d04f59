#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "periods/energy.hpp"
#include "periods/errors.hpp"

#include <cmath>

using namespace periods;

namespace {

int count_kind(const std::vector<Singularity>& pts, SingularityKind k) {
    int n = 0;
    for (const auto& p : pts)
        if (p.kind == k) ++n;
    return n;
}

}  // namespace

TEST_CASE("singular points of a three-well potential") {
    System sys = build_potential({1, 2, 3}, 0);
    auto pts = singular_points(sys);
    REQUIRE(pts.size() == 4);
    CHECK(count_kind(pts, SingularityKind::Center) == 1);
    CHECK(count_kind(pts, SingularityKind::Cusp) == 3);
    for (const auto& p : pts)
        if (p.kind == SingularityKind::Cusp) CHECK(p.y == 0.0);
}

TEST_CASE("singular grid of the separable example") {
    System sys = build_separable({Rational(4)}, {Rational(2)}, 0);
    auto pts = singular_points(sys);
    REQUIRE(pts.size() == 4);
    CHECK(count_kind(pts, SingularityKind::Center) == 1);
    CHECK(count_kind(pts, SingularityKind::Cusp) == 2);
    CHECK(count_kind(pts, SingularityKind::Degenerate) == 1);
    for (const auto& p : pts) {
        if (p.kind == SingularityKind::Degenerate) {
            CHECK(p.x == 2.0);
            CHECK(p.y == 4.0);
        }
    }
}

TEST_CASE("even family singularities: saddle, possibly no cusps") {
    System k1 = build_potential({}, 0, Rational(4));
    auto pts1 = singular_points(k1);
    REQUIRE(pts1.size() == 2);
    CHECK(count_kind(pts1, SingularityKind::Center) == 1);
    CHECK(count_kind(pts1, SingularityKind::Saddle) == 1);
    CHECK(count_kind(pts1, SingularityKind::Cusp) == 0);

    System k2 = build_potential({Rational(1)}, 0, Rational(4));
    auto pts2 = singular_points(k2);
    REQUIRE(pts2.size() == 3);
    CHECK(count_kind(pts2, SingularityKind::Cusp) == 1);
    CHECK(count_kind(pts2, SingularityKind::Saddle) == 1);
}

TEST_CASE("perturbed systems have no singular skeleton to enumerate") {
    System sys = build_potential({Rational(1)}, Rational(1, 100));
    CHECK_THROWS_AS(singular_points(sys), ValidationError);
}

TEST_CASE("ledger of the separable example is exact") {
    System sys = build_separable({Rational(4)}, {Rational(2)}, 0);
    EnergyLedger ledger = critical_energy_ledger(sys);
    REQUIRE(ledger.entries.size() == 4);
    CHECK_FALSE(ledger.saddle_bounded);
    REQUIRE(ledger.entries[0].h_exact.has_value());
    CHECK(*ledger.entries[0].h_exact == 0);
    CHECK(*ledger.entries[1].h_exact == Rational(4, 3));
    CHECK(*ledger.entries[2].h_exact == Rational(64, 3));
    CHECK(*ledger.entries[3].h_exact == Rational(68, 3));
    CHECK(ledger.entries[0].source.kind == SingularityKind::Center);
    CHECK(ledger.min_gap == doctest::Approx(4.0 / 3));
    CHECK(ledger.upper_bound() == std::numeric_limits<double>::infinity());
}

TEST_CASE("ledger of one potential well") {
    System sys = build_potential({Rational(1)}, 0);
    EnergyLedger ledger = critical_energy_ledger(sys);
    REQUIRE(ledger.entries.size() == 2);
    CHECK(*ledger.entries[1].h_exact == Rational(1, 12));
}

TEST_CASE("ledger is the eps=0 skeleton even for perturbed input") {
    System sys = build_potential({Rational(1)}, Rational(1, 100));
    EnergyLedger ledger = critical_energy_ledger(sys);
    REQUIRE(ledger.entries.size() == 2);
    CHECK(*ledger.entries[1].h_exact == Rational(1, 12));
}

TEST_CASE("entry counts per family") {
    for (int k = 1; k <= 3; ++k) {
        std::vector<Rational> betas, alphas;
        for (int i = 1; i <= k; ++i) {
            betas.emplace_back(i);
            alphas.emplace_back(i + k);  // distinct from betas, nonzero
        }
        EnergyLedger pot = critical_energy_ledger(build_potential(betas, 0));
        CHECK(pot.entries.size() == static_cast<std::size_t>(k + 1));

        if (k <= 2) {
            EnergyLedger sep = critical_energy_ledger(build_separable(alphas, betas, 0));
            CHECK(sep.entries.size() == static_cast<std::size_t>((k + 1) * (k + 1)));
        }

        // even potential of order k: betas are the k-1 cusps, plus the saddle
        std::vector<Rational> cusps(betas.begin(), betas.end() - 1);
        EnergyLedger even =
            critical_energy_ledger(build_potential(cusps, 0, Rational(100)));
        CHECK(even.saddle_bounded);
        CHECK(even.interior_count() == static_cast<std::size_t>(k));
        CHECK(even.entries.size() == static_cast<std::size_t>(k + 1));
        CHECK(even.entries.back().source.kind == SingularityKind::Saddle);
    }
    // even separable example: k^2 interior entries plus the saddle bound
    EnergyLedger sep_even = critical_energy_ledger(build_example_even(2, 0));
    CHECK(sep_even.saddle_bounded);
    CHECK(sep_even.interior_count() == 4);
    CHECK(sep_even.entries.size() == 5);
}

TEST_CASE("ledger starts at the center energy zero") {
    for (const System& sys :
         {build_potential({1, 2, 3}, 0), build_separable({Rational(4)}, {Rational(2)}, 0),
          build_example_odd(2, 0), build_example_even(2, 0)}) {
        EnergyLedger ledger = critical_energy_ledger(sys);
        CHECK(ledger.entries[0].h == 0.0);
        CHECK(ledger.entries[0].source.kind == SingularityKind::Center);
        for (std::size_t i = 1; i < ledger.entries.size(); ++i)
            CHECK(ledger.entries[i].h >= ledger.entries[i - 1].h);
    }
}

TEST_CASE("e-scaled ledger ordering matches the exact prediction") {
    const double e = std::exp(1.0);
    System sys = build_example_odd(1, 0);
    EnergyLedger ledger = critical_energy_ledger(sys);
    REQUIRE(ledger.entries.size() == 4);
    CHECK(ledger.entries[0].h == 0.0);
    CHECK(ledger.entries[1].h == doctest::Approx(1.0 / 12).epsilon(1e-14));
    CHECK(ledger.entries[2].h == doctest::Approx(std::pow(e, 4) / 12).epsilon(1e-13));
    CHECK(ledger.entries[3].h == doctest::Approx((1.0 + std::pow(e, 4)) / 12).epsilon(1e-13));
    // F(1) = 1/12 comes out exact on the y-axis column
    REQUIRE(ledger.entries[1].h_exact.has_value());
    CHECK(*ledger.entries[1].h_exact == Rational(1, 12));

    // exact comparator ordering == numeric ordering for k = 1..3
    for (int k = 1; k <= 3; ++k) {
        EnergyLedger l = critical_energy_ledger(build_example_odd(k, 0));
        CHECK(l.entries.size() == static_cast<std::size_t>((k + 1) * (k + 1)));
        for (std::size_t i = 1; i < l.entries.size(); ++i)
            CHECK(l.entries[i].h > l.entries[i - 1].h);
        if (k <= 3) {
            EnergyLedger le = critical_energy_ledger(build_example_even(k, 0));
            for (std::size_t i = 1; i < le.entries.size(); ++i)
                CHECK(le.entries[i].h > le.entries[i - 1].h);
        }
    }
}

TEST_CASE("numeric hypothesis verdicts") {
    EnergyLedger fig4 = critical_energy_ledger(build_separable({Rational(4)}, {Rational(2)}, 0));
    HypothesisVerdict ok = check_hypothesis_numeric(fig4, 1e-9);
    CHECK(ok.distinct);
    CHECK(ok.method == HypothesisVerdict::Method::NumericGap);
    CHECK(ok.min_gap == doctest::Approx(4.0 / 3));
    CHECK_FALSE(ok.witness.has_value());
    CHECK_FALSE(ok.dominance_ok.has_value());

    // symmetric wells collide exactly: G(1) = G(-1)
    EnergyLedger collide = critical_energy_ledger(build_potential({Rational(1), Rational(-1)}, 0));
    CHECK(collide.min_gap == 0.0);
    HypothesisVerdict bad = check_hypothesis_numeric(collide, 1e-9);
    CHECK_FALSE(bad.distinct);
    REQUIRE(bad.witness.has_value());
    CHECK(bad.witness->first.kind == SingularityKind::Cusp);

    // single-entry ledger is vacuously distinct
    EnergyLedger harmonic = critical_energy_ledger(build_potential({}, 0));
    CHECK(check_hypothesis_numeric(harmonic, 1e-9).distinct);

    // dominance flag for even families
    EnergyLedger even = critical_energy_ledger(build_potential({Rational(1)}, 0, Rational(4)));
    HypothesisVerdict v = check_hypothesis_numeric(even, 1e-9);
    REQUIRE(v.dominance_ok.has_value());
    CHECK(*v.dominance_ok);
    CHECK(v.distinct);
}

TEST_CASE("exact certification of the example families") {
    for (int k = 1; k <= 3; ++k) {
        HypothesisVerdict odd = certify_example_family(k, Parity::Odd);
        CHECK(odd.distinct);
        CHECK(odd.method == HypothesisVerdict::Method::ExactRationalPairs);
        CHECK_FALSE(odd.dominance_ok.has_value());
        CHECK(odd.min_gap > 0.0);

        HypothesisVerdict even = certify_example_family(k, Parity::Even);
        CHECK(even.distinct);
        REQUIRE(even.dominance_ok.has_value());
        CHECK(*even.dominance_ok);
    }
    CHECK_THROWS_AS(certify_example_family(0, Parity::Odd), ValidationError);
    CHECK_THROWS_AS(certify_example_family(5, Parity::Odd), ValidationError);
}

TEST_CASE("certification routing") {
    CHECK_THROWS_AS(certify_system(build_potential({Rational(1)}, 0)), ValidationError);
    CHECK(certify_system(build_example_odd(2, 0)).distinct);
    CHECK(certify_system(build_example_even(2, 0)).distinct);
}

TEST_CASE("ledger and verdict serialize") {
    System sys = build_separable({Rational(4)}, {Rational(2)}, 0);
    EnergyLedger ledger = critical_energy_ledger(sys);
    nlohmann::json j = ledger_to_json(ledger);
    REQUIRE(j.is_array());
    REQUIRE(j.size() == 4);
    CHECK(j[1]["h_exact"] == "4/3");
    CHECK(j[1]["source"]["kind"] == "cusp");
    CHECK(j[0]["source"]["kind"] == "center");

    nlohmann::json vj = verdict_to_json(check_hypothesis_numeric(ledger));
    CHECK(vj["distinct"] == true);
    CHECK(vj["method"] == "numeric-gap");
}
