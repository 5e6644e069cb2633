#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "edmsnl/relax.hpp"

namespace edmsnl::test {

inline Matrix randomMatrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = g(rng);
  return M;
}

inline Matrix randomSymmetric(std::mt19937_64& rng, int n) {
  const Matrix M = randomMatrix(rng, n, n);
  return 0.5 * (M + M.transpose());
}

inline Matrix randomHollow(std::mt19937_64& rng, int n) {
  Matrix S = randomSymmetric(rng, n);
  S.diagonal().setZero();
  return S;
}

inline double relErr(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

/// Dense noiseless instance used by several suites.
inline Instance denseInstance(std::uint64_t seed, int n = 10, int m = 4, double noise = 0.0) {
  GeneratorConfig g;
  g.n = n;
  g.m = m;
  g.radioRange = 0.15;
  g.density = 0.9;
  g.noiseSigma = noise;
  g.squareHalfWidth = 0.08;
  g.seed = seed;
  return generate(g);
}

inline Formulation plainFormulation(const Instance& inst, FormulationKind kind) {
  const PartialEdm pe = buildPartialEdm(inst);
  return Formulation(kind, pe, composeFace(inst.n, {}, inst.anchors, TerminalForm::A));
}

inline Vector randomVector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = g(rng);
  return v;
}

/// Upper bound (factor * range)^2 on every measured sensor-sensor edge.
inline void addUpperBounds(Instance& inst, double factor) {
  const double u = factor * factor * inst.radioRange * inst.radioRange;
  for (const auto& e : inst.edges)
    if (e.j < inst.n) inst.upperBounds.push_back({e.i, e.j, u});
}

/// Makes `nodes` a clique: every missing pair gets its true squared distance.
inline void plantClique(Instance& inst, const std::vector<int>& nodes) {
  const Matrix& X = *inst.xTrue;
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      const int i = std::min(nodes[a], nodes[b]), j = std::max(nodes[a], nodes[b]);
      bool present = false;
      for (const auto& e : inst.edges) present = present || (e.i == i && e.j == j) || (e.i == j && e.j == i);
      if (!present) inst.edges.push_back({i, j, (X.row(i) - X.row(j)).squaredNorm()});
    }
  }
  inst.cliques.push_back(nodes);
}

}  // namespace edmsnl::test
