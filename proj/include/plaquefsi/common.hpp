#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace plaquefsi {

/// Spatial dimension of the mesh-based solvers. Pointwise tensor code is
/// templated on the dimension and also instantiated for d = 3.
inline constexpr int kDim = 2;

template <int D>
using Mat = Eigen::Matrix<double, D, D>;
template <int D>
using Vec = Eigen::Matrix<double, D, 1>;

using Mat2 = Mat<2>;
using Vec2 = Vec<2>;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad dimensions, out-of-range index...).
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// A runtime invariant of the simulation failed (loss of invertibility,
/// growth metric below 1/2, ...). The run aborts.
class InvariantViolation : public Error {
public:
    using Error::Error;
};

/// A linear or nonlinear solve failed to reach its tolerance.
class SolverError : public Error {
public:
    using Error::Error;
};

/// Malformed or inconsistent configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace plaquefsi
