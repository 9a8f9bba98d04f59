#include "periods/rational.hpp"

#include <cctype>
#include <stdexcept>

namespace periods {

Rational rational_pow(const Rational& base, unsigned exp) {
    Rational result = 1;
    Rational b = base;
    while (exp) {
        if (exp & 1u) result *= b;
        exp >>= 1u;
        if (exp) b *= b;
    }
    return result;
}

namespace {

bool is_digits(std::string_view s) {
    if (s.empty()) return false;
    for (char c : s)
        if (!std::isdigit(static_cast<unsigned char>(c))) return false;
    return true;
}

Rational parse_decimal(std::string_view text) {
    std::string_view mantissa = text;
    long exponent10 = 0;
    if (auto epos = text.find_first_of("eE"); epos != std::string_view::npos) {
        mantissa = text.substr(0, epos);
        std::string exp_str(text.substr(epos + 1));
        if (exp_str.empty()) throw std::invalid_argument("empty exponent");
        std::size_t used = 0;
        exponent10 = std::stol(exp_str, &used);
        if (used != exp_str.size()) throw std::invalid_argument("bad exponent");
    }
    bool negative = false;
    if (!mantissa.empty() && (mantissa.front() == '+' || mantissa.front() == '-')) {
        negative = mantissa.front() == '-';
        mantissa.remove_prefix(1);
    }
    std::string digits;
    long frac_digits = 0;
    if (auto dot = mantissa.find('.'); dot != std::string_view::npos) {
        auto whole = mantissa.substr(0, dot);
        auto frac = mantissa.substr(dot + 1);
        if (whole.empty() && frac.empty()) throw std::invalid_argument("bare decimal point");
        if (!whole.empty() && !is_digits(whole)) throw std::invalid_argument("bad mantissa");
        if (!frac.empty() && !is_digits(frac)) throw std::invalid_argument("bad mantissa");
        digits = std::string(whole) + std::string(frac);
        frac_digits = static_cast<long>(frac.size());
    } else {
        if (!is_digits(mantissa)) throw std::invalid_argument("bad mantissa");
        digits = std::string(mantissa);
    }
    if (digits.empty()) throw std::invalid_argument("empty number");
    BigInt num(digits);
    if (negative) num = -num;
    long net = exponent10 - frac_digits;
    Rational q(num);
    if (net > 0)
        q *= rational_pow(Rational(10), static_cast<unsigned>(net));
    else if (net < 0)
        q /= rational_pow(Rational(10), static_cast<unsigned>(-net));
    return q;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.empty()) throw std::invalid_argument("empty rational literal");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(text.substr(0, slash));
        Rational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) throw std::invalid_argument("zero denominator");
        return num / den;
    }
    return parse_decimal(text);
}

std::string to_fraction_string(const Rational& q) {
    std::string out = numerator(q).str();
    if (denominator(q) != 1) {
        out += '/';
        out += denominator(q).str();
    }
    return out;
}

namespace {
// 48 decimal digits of e, truncated (lower) and rounded up (upper).
const char* kEulerLo = "2.718281828459045235360287471352662497757247093699";
const char* kEulerHi = "2.718281828459045235360287471352662497757247093700";
}  // namespace

const Rational& euler_lower() {
    static const Rational lo = parse_rational(kEulerLo);
    return lo;
}

const Rational& euler_upper() {
    static const Rational hi = parse_rational(kEulerHi);
    return hi;
}

int sign_linear_in_euler_power(const Rational& a, const Rational& b, unsigned p) {
    if (b == 0) return a == 0 ? 0 : (a > 0 ? 1 : -1);
    Rational lo = rational_pow(euler_lower(), p);
    Rational hi = rational_pow(euler_upper(), p);
    Rational v1 = a + lo * b;
    Rational v2 = a + hi * b;
    if (v1 > 0 && v2 > 0) return 1;
    if (v1 < 0 && v2 < 0) return -1;
    throw std::runtime_error("euler-power comparison not decided by rational bounds");
}

}  // namespace periods
