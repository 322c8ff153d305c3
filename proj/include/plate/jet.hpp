#pragma once

#include <array>
#include <functional>

#include <Eigen/Core>

namespace plate {

/// All partial derivatives of a scalar field up to total order 4 at one point.
/// Order k occupies slots k(k+1)/2 .. k(k+1)/2 + k; within an order the slot
/// offset is the number of y-derivatives: {u, ux, uy, uxx, uxy, uyy, uxxx, ...}.
using Jet = std::array<double, 15>;

constexpr int kMaxDerivativeOrder = 4;

constexpr int jet_index(int nx, int ny) {
  const int k = nx + ny;
  return k * (k + 1) / 2 + ny;
}

/// Number of jet slots used by derivatives up to `order`.
constexpr int jet_size(int order) { return (order + 1) * (order + 2) / 2; }

inline Jet operator-(const Jet& a, const Jet& b) {
  Jet r;
  for (int i = 0; i < 15; ++i)
    r[i] = a[i] - b[i];
  return r;
}

/// Callable returning the jet of a field at a point.
using JetFunction = std::function<Jet(const Eigen::Vector2d&)>;

} // namespace plate
