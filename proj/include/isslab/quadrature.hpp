#pragma once

#include <cmath>
#include <numbers>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace isslab {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// n-point Gauss-Legendre rule, nodes by Newton iteration on P_n.
inline GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: need at least one node");
  GaussRule rule{std::vector<double>(n), std::vector<double>(n)};
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  return rule;
}

/// Composite Simpson rule on an arbitrary increasing grid (quadratic through
/// each pair of intervals; the final interval of an odd count is closed with
/// the quadratic through its last three nodes).
inline double simpson_nonuniform(std::span<const double> x, std::span<const double> f) {
  if (x.size() != f.size()) throw std::invalid_argument("simpson: size mismatch");
  const std::size_t n = x.size();
  if (n < 2) return 0.0;
  if (n == 2) return 0.5 * (x[1] - x[0]) * (f[0] + f[1]);
  double total = 0.0;
  const std::size_t intervals = n - 1;
  std::size_t i = 0;
  for (; i + 2 <= intervals; i += 2) {
    const double h0 = x[i + 1] - x[i];
    const double h1 = x[i + 2] - x[i + 1];
    const double hs = h0 + h1;
    total += hs / 6.0 * ((2.0 - h1 / h0) * f[i] + hs * hs / (h0 * h1) * f[i + 1] + (2.0 - h0 / h1) * f[i + 2]);
  }
  if (i < intervals) {
    const double h0 = x[n - 2] - x[n - 3];
    const double h1 = x[n - 1] - x[n - 2];
    const double alpha = (2.0 * h1 * h1 + 3.0 * h0 * h1) / (6.0 * (h0 + h1));
    const double beta = (h1 * h1 + 3.0 * h0 * h1) / (6.0 * h0);
    const double eta = (h1 * h1 * h1) / (6.0 * h0 * (h0 + h1));
    total += alpha * f[n - 1] + beta * f[n - 2] - eta * f[n - 3];
  }
  return total;
}

/// Nodes on [a, b] graded geometrically toward a: the first panel has width
/// about `first_width`, then widths double; each panel is split into
/// `per_panel` equal subintervals. Includes both endpoints.
inline std::vector<double> graded_nodes(double a, double b, double first_width, std::size_t per_panel) {
  std::vector<double> out{a};
  if (!(b > a)) return out;
  if (per_panel == 0) per_panel = 2;
  const double length = b - a;
  std::vector<double> edges{a};
  double w = std::min(first_width, length);
  double pos = a;
  while (b - pos > 0.0) {
    double next = pos + w;
    // merge a sliver into the last panel
    if (next >= b || b - next < 0.5 * w) next = b;
    edges.push_back(next);
    pos = next;
    w *= 2.0;
  }
  for (std::size_t e = 1; e < edges.size(); ++e) {
    const double lo = edges[e - 1];
    const double hi = edges[e];
    for (std::size_t j = 1; j <= per_panel; ++j) {
      out.push_back(j == per_panel ? hi : lo + (hi - lo) * static_cast<double>(j) / static_cast<double>(per_panel));
    }
  }
  return out;
}

}  // namespace isslab
