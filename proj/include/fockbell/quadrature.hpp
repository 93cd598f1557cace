#pragma once

#include <vector>

#include "fockbell/model.hpp"

namespace fockbell {

/// Equispaced periodic trapezoid rule on [-pi, pi) for integrals of the form
/// int d(x)/2pi f(x). Exact up to round-off for trigonometric polynomials of
/// degree below the node count.
///
/// Nodes are x_i = pi (2i - K) / K so that x_{K-i} == -x_i bit for bit.
class QuadratureRule {
 public:
  explicit QuadratureRule(int node_count) : nodes_(static_cast<std::size_t>(node_count)) {
    if (node_count < 1) throw ConfigError("quadrature needs at least one node");
    for (int i = 0; i < node_count; ++i)
      nodes_[i] = kPi * static_cast<double>(2 * i - node_count) / static_cast<double>(node_count);
  }

  /// Node count 2 (n + 2): exact for the degree-n integrands in lambda and the
  /// degree <= 2n integrands in Lambda that appear for n particles.
  static QuadratureRule for_particles(int n) { return QuadratureRule(2 * (n + 2)); }

  int size() const { return static_cast<int>(nodes_.size()); }
  double node(int i) const { return nodes_[i]; }
  const std::vector<double>& nodes() const { return nodes_; }
  /// Weight for the d(x)/2pi convention.
  double weight() const { return 1.0 / static_cast<double>(nodes_.size()); }

  template <typename F>
  double integrate(F&& f) const {
    double sum = 0.0;
    for (double x : nodes_) sum += f(x);
    return sum * weight();
  }

 private:
  std::vector<double> nodes_;
};

}  // namespace fockbell
