#include "periods/polynomial.hpp"

#include <cmath>
#include <stdexcept>

namespace periods {

namespace {

struct TwoSum {
    double sum, err;
};

inline TwoSum two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

struct TwoProd {
    double prod, err;
};

inline TwoProd two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

}  // namespace

double horner_compensated(std::span<const double> coeffs, double x) {
    if (coeffs.empty()) return 0.0;
    double s = coeffs.back();
    double correction = 0.0;
    for (std::size_t i = coeffs.size() - 1; i-- > 0;) {
        auto [p, pi] = two_prod(s, x);
        auto [t, sigma] = two_sum(p, coeffs[i]);
        s = t;
        correction = correction * x + (pi + sigma);
    }
    return s + correction;
}

DoublePoly::DoublePoly(std::vector<double> coeffs) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back() == 0.0) coeffs_.pop_back();
}

double DoublePoly::coeff(int i) const {
    return (i >= 0 && i < static_cast<int>(coeffs_.size())) ? coeffs_[i] : 0.0;
}

DoublePoly DoublePoly::derivative() const {
    if (coeffs_.size() <= 1) return DoublePoly{};
    std::vector<double> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<double>(i);
    return DoublePoly(std::move(d));
}

DoublePoly DoublePoly::antiderivative() const {
    if (coeffs_.empty()) return DoublePoly{};
    std::vector<double> a(coeffs_.size() + 1, 0.0);
    for (std::size_t i = 0; i < coeffs_.size(); ++i) a[i + 1] = coeffs_[i] / static_cast<double>(i + 1);
    return DoublePoly(std::move(a));
}

DoublePoly operator+(const DoublePoly& a, const DoublePoly& b) {
    std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
    return DoublePoly(std::move(c));
}

DoublePoly operator-(const DoublePoly& a, const DoublePoly& b) {
    std::vector<double> c(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] -= b.coeffs_[i];
    return DoublePoly(std::move(c));
}

DoublePoly operator*(const DoublePoly& a, const DoublePoly& b) {
    if (a.coeffs_.empty() || b.coeffs_.empty()) return DoublePoly{};
    std::vector<double> c(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return DoublePoly(std::move(c));
}

DoublePoly& DoublePoly::operator*=(double s) {
    for (auto& c : coeffs_) c *= s;
    if (s == 0.0) coeffs_.clear();
    return *this;
}

RationalPoly::RationalPoly(std::vector<Rational> coeffs) : coeffs_(std::move(coeffs)) { trim(); }

void RationalPoly::trim() {
    while (!coeffs_.empty() && coeffs_.back() == 0) coeffs_.pop_back();
}

RationalPoly RationalPoly::constant(Rational c) {
    return RationalPoly(std::vector<Rational>{std::move(c)});
}

RationalPoly RationalPoly::linear_root(const Rational& root) {
    return RationalPoly(std::vector<Rational>{-root, Rational(1)});
}

const Rational& RationalPoly::coeff(int i) const {
    static const Rational zero = 0;
    return (i >= 0 && i < static_cast<int>(coeffs_.size())) ? coeffs_[i] : zero;
}

Rational RationalPoly::operator()(const Rational& x) const {
    Rational acc = 0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * x + coeffs_[i];
    return acc;
}

RationalPoly RationalPoly::derivative() const {
    if (coeffs_.size() <= 1) return RationalPoly{};
    std::vector<Rational> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * Rational(static_cast<unsigned>(i));
    return RationalPoly(std::move(d));
}

RationalPoly RationalPoly::antiderivative() const {
    if (coeffs_.empty()) return RationalPoly{};
    std::vector<Rational> a(coeffs_.size() + 1, Rational(0));
    for (std::size_t i = 0; i < coeffs_.size(); ++i)
        a[i + 1] = coeffs_[i] / Rational(static_cast<unsigned>(i + 1));
    return RationalPoly(std::move(a));
}

DoublePoly RationalPoly::shadow() const {
    std::vector<double> c(coeffs_.size());
    for (std::size_t i = 0; i < coeffs_.size(); ++i) c[i] = to_double(coeffs_[i]);
    return DoublePoly(std::move(c));
}

RationalPoly operator+(const RationalPoly& a, const RationalPoly& b) {
    std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] += b.coeffs_[i];
    return RationalPoly(std::move(c));
}

RationalPoly operator-(const RationalPoly& a, const RationalPoly& b) {
    std::vector<Rational> c(std::max(a.coeffs_.size(), b.coeffs_.size()), Rational(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) c[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) c[i] -= b.coeffs_[i];
    return RationalPoly(std::move(c));
}

RationalPoly operator*(const RationalPoly& a, const RationalPoly& b) {
    if (a.coeffs_.empty() || b.coeffs_.empty()) return RationalPoly{};
    std::vector<Rational> c(a.coeffs_.size() + b.coeffs_.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
        for (std::size_t j = 0; j < b.coeffs_.size(); ++j) c[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return RationalPoly(std::move(c));
}

RationalPoly& RationalPoly::operator*=(const Rational& s) {
    for (auto& c : coeffs_) c *= s;
    trim();
    return *this;
}

}  // namespace periods
