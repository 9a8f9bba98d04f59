#pragma once

#include <stdexcept>
#include <string>

namespace periods {

/// Invalid system parameters or configuration.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Critical-energy distinctness failure; message names the colliding pair.
struct HypothesisError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Energy outside the admissible range of an annulus side.
struct RangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Sample refused because the energy is too close to a singular level.
struct NearSeparatrixError : RangeError {
    explicit NearSeparatrixError(const std::string& msg, double h) : RangeError(msg), h(h) {}
    double h;
};

/// Integration failed: budget exhausted, step underflow, or drift bound violated.
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Too many failed samples to trust a period curve.
struct CurveQualityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace periods
