#pragma once

#include "periods/rational.hpp"

#include <span>
#include <vector>

namespace periods {

/// Horner evaluation with compensated summation (error-free transformations
/// via std::fma). Roughly one ulp of the exact value even for ill-conditioned
/// arguments, which matters near turning points where h - G(x) cancels.
double horner_compensated(std::span<const double> coeffs, double x);

/// Dense univariate polynomial over double, coefficient of x^i at index i.
class DoublePoly {
  public:
    DoublePoly() = default;
    explicit DoublePoly(std::vector<double> coeffs);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    double coeff(int i) const;
    std::span<const double> coeffs() const { return coeffs_; }

    double operator()(double x) const { return horner_compensated(coeffs_, x); }

    DoublePoly derivative() const;
    DoublePoly antiderivative() const;  // constant term 0

    friend DoublePoly operator+(const DoublePoly& a, const DoublePoly& b);
    friend DoublePoly operator-(const DoublePoly& a, const DoublePoly& b);
    friend DoublePoly operator*(const DoublePoly& a, const DoublePoly& b);
    DoublePoly& operator*=(double s);

  private:
    std::vector<double> coeffs_;  // empty = zero polynomial
};

/// Dense univariate polynomial with exact rational coefficients.
/// Trailing zero coefficients are trimmed, so the leading coefficient is
/// nonzero unless the polynomial is identically zero.
class RationalPoly {
  public:
    RationalPoly() = default;
    explicit RationalPoly(std::vector<Rational> coeffs);

    static RationalPoly constant(Rational c);
    /// x - root
    static RationalPoly linear_root(const Rational& root);

    int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
    bool is_zero() const { return coeffs_.empty(); }
    const Rational& coeff(int i) const;
    std::span<const Rational> coeffs() const { return coeffs_; }

    Rational operator()(const Rational& x) const;  // exact Horner

    RationalPoly derivative() const;
    RationalPoly antiderivative() const;  // q' = p, q(0) = 0, exact

    DoublePoly shadow() const;  // nearest-double image of each coefficient

    friend RationalPoly operator+(const RationalPoly& a, const RationalPoly& b);
    friend RationalPoly operator-(const RationalPoly& a, const RationalPoly& b);
    friend RationalPoly operator*(const RationalPoly& a, const RationalPoly& b);
    RationalPoly& operator*=(const Rational& s);
    bool operator==(const RationalPoly& o) const { return coeffs_ == o.coeffs_; }

  private:
    void trim();
    std::vector<Rational> coeffs_;
};

}  // namespace periods
