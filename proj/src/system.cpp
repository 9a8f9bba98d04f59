#include "periods/system.hpp"

#include "periods/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace periods {

bool family_is_even(Family f) {
    return f == Family::PotentialEven || f == Family::SeparableEven;
}

bool family_is_separable(Family f) {
    return f == Family::SeparableOdd || f == Family::SeparableEven;
}

std::string family_name(Family f) {
    switch (f) {
        case Family::PotentialOdd: return "potential-odd";
        case Family::PotentialEven: return "potential-even";
        case Family::SeparableOdd: return "separable-odd";
        case Family::SeparableEven: return "separable-even";
    }
    throw std::logic_error("unreachable family");
}

Family family_from_name(const std::string& name) {
    if (name == "potential-odd") return Family::PotentialOdd;
    if (name == "potential-even") return Family::PotentialEven;
    if (name == "separable-odd") return Family::SeparableOdd;
    if (name == "separable-even") return Family::SeparableEven;
    throw ValidationError("unknown family: " + name);
}

int SystemSpec::k() const {
    if (family_is_even(family)) return static_cast<int>(betas.size()) + 1;
    return family_is_separable(family) ? static_cast<int>(alphas.size())
                                       : static_cast<int>(betas.size());
}

int SystemSpec::degree() const {
    return family_is_even(family) ? 2 * k() : 2 * k() + 1;
}

std::vector<double> SystemSpec::alpha_values() const {
    std::vector<double> v(alphas.size());
    for (std::size_t i = 0; i < alphas.size(); ++i) v[i] = to_double(alphas[i]);
    return v;
}

std::vector<double> SystemSpec::beta_values() const {
    const double scale = e_scaled ? std::numbers::e : 1.0;
    std::vector<double> v(betas.size());
    for (std::size_t i = 0; i < betas.size(); ++i) v[i] = scale * to_double(betas[i]);
    return v;
}

std::optional<double> SystemSpec::saddle_value() const {
    if (!saddle_beta) return std::nullopt;
    const double scale = e_scaled ? std::numbers::e : 1.0;
    return scale * to_double(*saddle_beta);
}

namespace {

void check_distinct_nonzero(const std::vector<Rational>& vals, const char* what) {
    std::set<Rational> seen;
    for (const auto& v : vals) {
        if (v == 0) throw ValidationError(std::string(what) + " must be nonzero");
        if (!seen.insert(v).second)
            throw ValidationError(std::string(what) + " must be pairwise distinct");
    }
}

}  // namespace

void SystemSpec::validate() const {
    if (epsilon < 0) throw ValidationError("epsilon must be >= 0");
    check_distinct_nonzero(betas, "betas");
    check_distinct_nonzero(alphas, "alphas");
    const bool even = family_is_even(family);
    const bool separable = family_is_separable(family);
    if (!separable && !alphas.empty())
        throw ValidationError("potential families take no alphas");
    if (separable) {
        if (alphas.size() != betas.size())
            throw ValidationError("separable families need matching alpha and beta counts");
        if (!even && alphas.empty())
            throw ValidationError("separable family requires k >= 1 alphas");
    }
    if (even) {
        if (!saddle_beta) throw ValidationError("even families need saddle_beta");
        if (*saddle_beta <= 0)
            throw ValidationError("saddle_beta must be positive (negative-saddle members not supported)");
        for (const auto& b : betas)
            if (abs(b) >= *saddle_beta)
                throw ValidationError("saddle_beta must be larger in magnitude than every beta");
    } else if (saddle_beta) {
        throw ValidationError("odd families take no saddle_beta");
    }
    if (e_scaled) {
        if (!separable) throw ValidationError("e_scaled applies to separable example families only");
        const int kk = k();
        for (int i = 1; i <= static_cast<int>(alphas.size()); ++i) {
            if (alphas[i - 1] != i || betas[i - 1] != i)
                throw ValidationError("e_scaled families use consecutive integer grid indices 1..k");
        }
        if (even && *saddle_beta != Rational(kk) * Rational(kk))
            throw ValidationError("e_scaled even family puts the saddle index at k^2");
    }
    const int kk = k();
    const int kmax = separable ? 4 : 6;
    if (kk > kmax)
        throw ValidationError("k = " + std::to_string(kk) + " exceeds the supported range (" +
                              std::to_string(kmax) + (separable ? " for separable" : " for potential") +
                              " families)");
}

namespace {

RationalPoly expand_slope_exact(const std::vector<Rational>& roots, const Rational& eps,
                                const std::optional<Rational>& saddle) {
    RationalPoly p(std::vector<Rational>{Rational(0), Rational(1)});  // t
    for (const auto& r : roots) {
        RationalPoly lin = RationalPoly::linear_root(r);
        p = p * (lin * lin + RationalPoly::constant(eps));
    }
    if (saddle) p = p * RationalPoly(std::vector<Rational>{*saddle, Rational(-1)});
    return p;
}

DoublePoly expand_slope_double(const std::vector<double>& roots, double eps,
                               const std::optional<double>& saddle) {
    DoublePoly p(std::vector<double>{0.0, 1.0});
    for (double r : roots) {
        DoublePoly lin(std::vector<double>{-r, 1.0});
        p = p * lin * lin + p * DoublePoly(std::vector<double>{eps});
    }
    if (saddle) p = p * DoublePoly(std::vector<double>{*saddle, -1.0});
    return p;
}

AxisPotential make_axis_exact(const std::vector<Rational>& roots, const Rational& eps,
                              const std::optional<Rational>& saddle) {
    AxisPotential side;
    side.slope_exact = expand_slope_exact(roots, eps, saddle);
    side.value_exact = side.slope_exact.antiderivative();
    side.slope = side.slope_exact.shadow();
    side.value = side.value_exact.shadow();
    side.exact = true;
    if (saddle) side.positive_cap = to_double(*saddle);
    return side;
}

AxisPotential make_axis_double(const std::vector<double>& roots, double eps,
                               const std::optional<double>& saddle) {
    AxisPotential side;
    side.slope = expand_slope_double(roots, eps, saddle);
    side.value = side.slope.antiderivative();
    side.exact = false;
    if (saddle) side.positive_cap = *saddle;
    return side;
}

AxisPotential harmonic_axis() {  // V = t^2/2
    return make_axis_exact({}, 0, {});
}

/// Unperturbed interior singular energies (plus the saddle level for even
/// families), ascending with exact duplicates collapsed.
std::vector<double> skeleton_energies_of(const SystemSpec& spec) {
    SystemSpec base = spec;
    base.epsilon = 0;
    const bool even = family_is_even(spec.family);
    const bool separable = family_is_separable(spec.family);

    std::optional<double> saddle = base.saddle_value();
    DoublePoly G0, F0;
    if (base.e_scaled) {
        G0 = expand_slope_double(base.beta_values(), 0.0,
                                 even ? saddle : std::nullopt)
                 .antiderivative();
    } else {
        G0 = expand_slope_exact(base.betas, 0,
                                even ? base.saddle_beta : std::nullopt)
                 .antiderivative()
                 .shadow();
    }
    if (separable) {
        F0 = expand_slope_exact(base.alphas, 0, {}).antiderivative().shadow();
    }

    std::vector<double> gx{0.0};
    for (double b : base.beta_values()) gx.push_back(G0(b));
    std::vector<double> fy{0.0};
    if (separable)
        for (double a : base.alpha_values()) fy.push_back(F0(a));

    std::vector<double> energies;
    for (double hg : gx)
        for (double hf : fy.empty() ? std::vector<double>{0.0} : fy) energies.push_back(hg + hf);
    if (even && saddle) energies.push_back(G0(*saddle));

    std::sort(energies.begin(), energies.end());
    energies.erase(std::unique(energies.begin(), energies.end()), energies.end());
    return energies;
}

System assemble(SystemSpec spec) {
    spec.validate();
    System sys;
    sys.spec = spec;
    const bool even = family_is_even(spec.family);
    const bool separable = family_is_separable(spec.family);

    if (spec.e_scaled) {
        sys.x_side = make_axis_double(spec.beta_values(), to_double(spec.epsilon),
                                      even ? spec.saddle_value() : std::nullopt);
    } else {
        sys.x_side = make_axis_exact(spec.betas, spec.epsilon,
                                     even ? spec.saddle_beta : std::nullopt);
    }
    sys.y_side = separable ? make_axis_exact(spec.alphas, spec.epsilon, {}) : harmonic_axis();

    sys.skeleton_energies = skeleton_energies_of(spec);
    if (even) sys.annulus_roof_energy = sys.x_side.value(*spec.saddle_value());
    return sys;
}

}  // namespace

Rational System::hamiltonian_exact(const Rational& x, const Rational& y) const {
    if (!exact()) throw std::logic_error("exact Hamiltonian unavailable: irrational coefficients");
    return y_side.value_exact(y) + x_side.value_exact(x);
}

System build_potential(std::vector<Rational> betas, Rational epsilon,
                       std::optional<Rational> saddle_beta) {
    SystemSpec spec;
    spec.family = saddle_beta ? Family::PotentialEven : Family::PotentialOdd;
    spec.betas = std::move(betas);
    spec.epsilon = std::move(epsilon);
    spec.saddle_beta = std::move(saddle_beta);
    return assemble(std::move(spec));
}

System build_separable(std::vector<Rational> alphas, std::vector<Rational> betas,
                       Rational epsilon, std::optional<Rational> saddle_beta) {
    SystemSpec spec;
    spec.family = saddle_beta ? Family::SeparableEven : Family::SeparableOdd;
    spec.alphas = std::move(alphas);
    spec.betas = std::move(betas);
    spec.epsilon = std::move(epsilon);
    spec.saddle_beta = std::move(saddle_beta);
    return assemble(std::move(spec));
}

System build_example_odd(int k, Rational epsilon) {
    if (k < 1) throw ValidationError("example family needs k >= 1");
    SystemSpec spec;
    spec.family = Family::SeparableOdd;
    for (int i = 1; i <= k; ++i) {
        spec.alphas.emplace_back(i);
        spec.betas.emplace_back(i);
    }
    spec.epsilon = std::move(epsilon);
    spec.e_scaled = true;
    return assemble(std::move(spec));
}

System build_example_even(int k, Rational epsilon) {
    if (k < 1) throw ValidationError("example family needs k >= 1");
    SystemSpec spec;
    spec.family = Family::SeparableEven;
    for (int i = 1; i < k; ++i) {
        spec.alphas.emplace_back(i);
        spec.betas.emplace_back(i);
    }
    spec.saddle_beta = Rational(k) * Rational(k);
    spec.epsilon = std::move(epsilon);
    spec.e_scaled = true;
    return assemble(std::move(spec));
}

System build_from_spec(const SystemSpec& spec) { return assemble(spec); }

System rebuild_with_epsilon(const SystemSpec& spec, const Rational& epsilon) {
    SystemSpec copy = spec;
    copy.epsilon = epsilon;
    return assemble(std::move(copy));
}

namespace {

nlohmann::json rational_to_json(const Rational& q) {
    const auto& den = denominator(q);
    if (den == 1 && abs(numerator(q)) <= BigInt(1) << 53)
        return nlohmann::json(numerator(q).template convert_to<std::int64_t>());
    // exact when the denominator is a power of two within double range
    double d = to_double(q);
    if (Rational(d) == q) return nlohmann::json(d);
    return nlohmann::json(to_fraction_string(q));
}

Rational rational_from_json(const nlohmann::json& j, const char* what) {
    if (j.is_number_integer()) return Rational(static_cast<std::int64_t>(j.get<std::int64_t>()));
    if (j.is_number_float()) return Rational(j.get<double>());
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw ValidationError(std::string(what) + ": expected number or \"p/q\" string");
}

}  // namespace

nlohmann::json spec_to_json(const SystemSpec& spec) {
    nlohmann::json j;
    j["family"] = family_name(spec.family);
    j["alphas"] = nlohmann::json::array();
    for (const auto& a : spec.alphas) j["alphas"].push_back(rational_to_json(a));
    j["betas"] = nlohmann::json::array();
    for (const auto& b : spec.betas) j["betas"].push_back(rational_to_json(b));
    j["epsilon"] = rational_to_json(spec.epsilon);
    j["saddle_beta"] = spec.saddle_beta ? rational_to_json(*spec.saddle_beta) : nlohmann::json();
    j["e_scaled"] = spec.e_scaled;
    return j;
}

SystemSpec spec_from_json(const nlohmann::json& j) {
    static const std::set<std::string> known{"family", "alphas", "betas",
                                             "epsilon", "saddle_beta", "e_scaled"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ValidationError("unknown spec key: " + it.key());
    if (!j.contains("family")) throw ValidationError("spec missing \"family\"");
    SystemSpec spec;
    spec.family = family_from_name(j.at("family").get<std::string>());
    for (const auto& a : j.value("alphas", nlohmann::json::array()))
        spec.alphas.push_back(rational_from_json(a, "alphas"));
    for (const auto& b : j.value("betas", nlohmann::json::array()))
        spec.betas.push_back(rational_from_json(b, "betas"));
    if (j.contains("epsilon")) spec.epsilon = rational_from_json(j.at("epsilon"), "epsilon");
    if (j.contains("saddle_beta") && !j.at("saddle_beta").is_null())
        spec.saddle_beta = rational_from_json(j.at("saddle_beta"), "saddle_beta");
    spec.e_scaled = j.value("e_scaled", false);
    spec.validate();
    return spec;
}

}  // namespace periods
