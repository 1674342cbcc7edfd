#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <utility>
#include <vector>

#include "dcl/graph.hpp"
#include "dcl/linalg.hpp"

namespace dcl::testing {

/// Connected undirected graph: a random spanning tree plus extra edges.
inline Graph random_connected_graph(std::mt19937_64& rng, int n, double extra_edge_probability) {
  std::vector<std::pair<int, int>> edges;
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  for (int i = 1; i < n; ++i) {
    std::uniform_int_distribution<int> pick(0, i - 1);
    edges.emplace_back(order[pick(rng)], order[i]);
  }
  std::bernoulli_distribution extra(extra_edge_probability);
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const bool present = std::any_of(edges.begin(), edges.end(), [&](const auto& e) {
        return (e.first == i && e.second == j) || (e.first == j && e.second == i);
      });
      if (!present && extra(rng)) edges.emplace_back(i, j);
    }
  }
  return build_graph(n, edges, false, "random");
}

/// Dense -Delta(s) = -((D - I) s^2 - A s + I), assembled straight from the edge list.
inline Matrix reference_system(const Graph& g, double s) {
  const int n = g.order();
  Matrix a = Matrix::Zero(n, n);
  for (const auto& e : g.edges()) {
    if (g.directed()) {
      a(e.to - 1, e.from - 1) = 1.0;
    } else {
      a(e.from - 1, e.to - 1) = 1.0;
      a(e.to - 1, e.from - 1) = 1.0;
    }
  }
  Matrix m = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const double d = a.row(i).sum();
    m(i, i) = -((d - 1.0) * s * s + 1.0);
  }
  return m + s * a;
}

/// Greedy matching of two multisets of complex numbers; returns the worst distance.
inline double multiset_distance(std::vector<std::complex<double>> a, std::vector<std::complex<double>> b) {
  if (a.size() != b.size()) return INFINITY;
  double worst = 0.0;
  for (const auto& x : a) {
    auto best = std::min_element(b.begin(), b.end(),
                                 [&](const auto& p, const auto& q) { return std::abs(p - x) < std::abs(q - x); });
    worst = std::max(worst, std::abs(*best - x));
    b.erase(best);
  }
  return worst;
}

/// Dense eigenvalues of the reference system. Triangular systems (directed paths) are defective,
/// so their diagonal is used as the exact spectrum.
inline std::vector<std::complex<double>> dense_spectrum(const Graph& g, double s) {
  const Matrix m = reference_system(g, s);
  if (m.isUpperTriangular() || m.isLowerTriangular()) {
    std::vector<std::complex<double>> diag;
    for (Eigen::Index i = 0; i < m.rows(); ++i) diag.emplace_back(m(i, i), 0.0);
    return diag;
  }
  const Eigen::VectorXcd ev = Eigen::EigenSolver<Matrix>(m).eigenvalues();
  return {ev.data(), ev.data() + ev.size()};
}

}  // namespace dcl::testing
