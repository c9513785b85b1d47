#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace daz {

using Vec = std::vector<double>;

/// Error with a machine-readable category, thrown by all modules and mapped
/// to status codes at the C boundary.
struct Error : std::runtime_error {
  enum class Code { InvalidArgument, Dimension, Solver, Config, Runtime, Io };
  Code code;
  Error(Code c, const std::string& what) : std::runtime_error(what), code(c) {}
};

[[noreturn]] inline void fail(Error::Code c, const std::string& what) {
  throw Error(c, what);
}

inline void require(bool cond, Error::Code c, const std::string& what) {
  if (!cond) fail(c, what);
}

/// Dense row-major matrix; rows are chain states throughout the sampler code.
struct Matrix {
  int rows = 0;
  int cols = 0;
  Vec data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0) : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double* row(int i) { return data.data() + static_cast<size_t>(i) * cols; }
  const double* row(int i) const { return data.data() + static_cast<size_t>(i) * cols; }
  std::span<double> row_span(int i) { return {row(i), static_cast<size_t>(cols)}; }
  std::span<const double> row_span(int i) const { return {row(i), static_cast<size_t>(cols)}; }
  double& operator()(int i, int j) { return data[static_cast<size_t>(i) * cols + j]; }
  double operator()(int i, int j) const { return data[static_cast<size_t>(i) * cols + j]; }
};

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm2_sq(std::span<const double> a) { return dot(a, a); }
inline double norm2(std::span<const double> a) { return std::sqrt(norm2_sq(a)); }

inline double norm_inf(std::span<const double> a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

inline bool all_finite(std::span<const double> a) {
  for (double v : a)
    if (!std::isfinite(v)) return false;
  return true;
}

inline double sgn(double x) { return (x > 0.0) - (x < 0.0); }

constexpr double kPi = 3.14159265358979323846;

}  // namespace daz
