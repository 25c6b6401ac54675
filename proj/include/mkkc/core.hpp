#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mkkc {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;
using Index = Eigen::Index;

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range input (non-finite data, bad parameters).
class InputError : public Error {
public:
  using Error::Error;
};

/// Dimensions that do not agree.
class ShapeError : public Error {
public:
  using Error::Error;
};

/// A quantity the algorithm divides by is numerically zero.
class DegenerateError : public Error {
public:
  using Error::Error;
};

/// Failure inside a numerical routine (eigen-solver, etc).
class NumericalError : public Error {
public:
  using Error::Error;
};

/// splitmix64 finalizer; used to derive independent seeds from a base seed.
constexpr std::uint64_t mix_seed(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t value) {
  return mix_seed(seed ^ mix_seed(value + 0x632be59bd9b4e019ULL));
}

}  // namespace mkkc
