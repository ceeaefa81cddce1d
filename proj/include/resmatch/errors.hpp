#pragma once

#include <stdexcept>
#include <string>

namespace resmatch {

// Raised by normalize() on an all-zero coefficient vector.
struct ZeroPolynomialError : std::runtime_error {
    ZeroPolynomialError() : std::runtime_error("cannot normalize an all-zero polynomial") {}
};

// Raised by sylvester() when both polynomials are constants.
struct DegreeTooLowError : std::runtime_error {
    DegreeTooLowError() : std::runtime_error("sylvester matrix needs polynomials of degree >= 1") {}
};

// Raised by project() for points at or behind the principal plane.
struct BehindCameraError : std::runtime_error {
    BehindCameraError() : std::runtime_error("point projects from behind the camera") {}
};

// Raised by the minimal-problem coefficient builders when the constraint
// system is rank deficient (coincident points or rays).
struct DegenerateConfigurationError : std::runtime_error {
    explicit DegenerateConfigurationError(const std::string& what) : std::runtime_error(what) {}
};

// Raised by the hyper-edge sampler when either point set is smaller than the
// requested edge order.
struct InsufficientPointsError : std::runtime_error {
    InsufficientPointsError() : std::runtime_error("point sets too small for the requested hyper-edge order") {}
};

// Raised by the power-iteration solvers on a tensor without positive entries.
struct EmptyTensorError : std::runtime_error {
    EmptyTensorError() : std::runtime_error("affinity tensor has no positive entry") {}
};

}  // namespace resmatch
