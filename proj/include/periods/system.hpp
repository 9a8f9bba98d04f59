#pragma once

#include "periods/polynomial.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace periods {

enum class Family { PotentialOdd, PotentialEven, SeparableOdd, SeparableEven };

bool family_is_even(Family f);
bool family_is_separable(Family f);
std::string family_name(Family f);
Family family_from_name(const std::string& name);

/// Full parameterization of one Hamiltonian family member.
///
/// For even families `betas` holds the cusp abscissas (k-1 of them, possibly
/// none) and `saddle_beta` the saddle abscissa. When `e_scaled` is set, the
/// stored alphas/betas/saddle are integer grid indices and the realized
/// x-side parameters are e times the index; the y side stays exact.
struct SystemSpec {
    Family family = Family::PotentialOdd;
    std::vector<Rational> alphas;  // empty for potential families
    std::vector<Rational> betas;
    Rational epsilon = 0;
    std::optional<Rational> saddle_beta;
    bool e_scaled = false;

    int k() const;       // family order
    int degree() const;  // polynomial degree of the vector field

    std::vector<double> alpha_values() const;
    std::vector<double> beta_values() const;    // e-scaled: e * index
    std::optional<double> saddle_value() const; // e-scaled: e * index

    void validate() const;  // throws ValidationError
};

/// One separable side of the Hamiltonian: V = G on the x-axis or F on the
/// y-axis, with V(0) = 0, together with its slope polynomial (g or f).
struct AxisPotential {
    DoublePoly value;
    DoublePoly slope;
    RationalPoly value_exact;  // meaningful iff exact
    RationalPoly slope_exact;
    bool exact = false;
    std::optional<double> positive_cap;  // saddle abscissa capping this side

    double operator()(double t) const { return value(t); }
};

/// Immutable system: spec, both Hamiltonian sides, and the unperturbed
/// critical-energy skeleton used for range guards. Safe to share across
/// threads.
struct System {
    SystemSpec spec;
    AxisPotential x_side;  // G and g
    AxisPotential y_side;  // F and f
    std::vector<double> skeleton_energies;  // eps=0 interior energies, ascending, starts at 0
    std::optional<double> annulus_roof_energy;  // even families: H(saddle,0,eps)

    bool exact() const { return x_side.exact && y_side.exact; }
    double hamiltonian(double x, double y) const { return y_side(y) + x_side(x); }
    Rational hamiltonian_exact(const Rational& x, const Rational& y) const;

    double f(double y) const { return y_side.slope(y); }
    double g(double x) const { return x_side.slope(x); }
};

System build_potential(std::vector<Rational> betas, Rational epsilon,
                       std::optional<Rational> saddle_beta = {});
System build_separable(std::vector<Rational> alphas, std::vector<Rational> betas,
                       Rational epsilon, std::optional<Rational> saddle_beta = {});

/// e-scaled separable family of odd degree: alphas = 1..k, betas = e*1..e*k.
System build_example_odd(int k, Rational epsilon);
/// e-scaled separable family of even degree: alphas = 1..k-1, betas = e*1..e*(k-1),
/// saddle at e*k^2.
System build_example_even(int k, Rational epsilon);

System build_from_spec(const SystemSpec& spec);
/// Same system with epsilon replaced (family validation re-run).
System rebuild_with_epsilon(const SystemSpec& spec, const Rational& epsilon);

nlohmann::json spec_to_json(const SystemSpec& spec);
SystemSpec spec_from_json(const nlohmann::json& j);

}  // namespace periods
