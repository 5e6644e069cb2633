#include "edmsnl/model.hpp"

#include <cmath>
#include <deque>
#include <limits>
#include <random>
#include <string>

namespace edmsnl {

Matrix Instance::configuration() const {
  if (!xTrue) throw InvalidArgument("instance has no ground-truth sensor positions");
  Matrix P(n + m, r);
  P << *xTrue, anchors;
  return P;
}

void Instance::validate() const {
  if (r < 1) throw InvalidArgument("embedding dimension r must be >= 1");
  if (!(n > m && m > r)) {
    throw InvalidArgument("require n > m > r (got n=" + std::to_string(n) +
                          ", m=" + std::to_string(m) + ", r=" + std::to_string(r) + ")");
  }
  if (anchors.rows() != m || anchors.cols() != r) {
    throw InvalidArgument("anchor matrix must be m x r");
  }
  if (xTrue && (xTrue->rows() != n || xTrue->cols() != r)) {
    throw InvalidArgument("sensor matrix must be n x r");
  }
  if (translation.size() != r) throw InvalidArgument("translation must have length r");
  const double scale = std::max(1.0, anchors.cwiseAbs().maxCoeff());
  const double drift = anchors.colwise().sum().cwiseAbs().maxCoeff();
  if (drift > 1e-10 * scale * m) {
    throw InvalidArgument("anchors are not centered (|A'e| = " + std::to_string(drift) + ")");
  }
  Eigen::JacobiSVD<Matrix> svd(anchors);
  const Vector sv = svd.singularValues();
  if (sv(r - 1) <= 1e-10 * sv(0)) throw InvalidArgument("anchor matrix is not full column rank");

  const int N = n + m;
  auto checkEdges = [&](const std::vector<MeasuredEdge>& list, const char* what) {
    for (const auto& e : list) {
      if (e.i < 0 || e.j < 0 || e.i >= N || e.j >= N || e.i == e.j) {
        throw InvalidArgument(std::string(what) + ": node index out of range");
      }
      if (e.i >= n && e.j >= n) {
        throw InvalidArgument(std::string(what) + ": anchor-anchor pairs are implicit");
      }
      if (!(e.value >= 0.0) || !std::isfinite(e.value)) {
        throw InvalidArgument(std::string(what) + ": squared distances must be finite and >= 0");
      }
    }
  };
  checkEdges(edges, "edges");
  checkEdges(upperBounds, "upper_bounds");
  checkEdges(lowerBounds, "lower_bounds");
  for (const auto& c : cliques) {
    for (int v : c) {
      if (v < 0 || v >= n) throw InvalidArgument("cliques: only sensor nodes may be listed");
    }
  }
}

Centered centerAnchors(const Matrix& anchorsRaw, const Matrix& sensorsRaw) {
  if (anchorsRaw.cols() != sensorsRaw.cols() && sensorsRaw.size() != 0) {
    throw InvalidArgument("centerAnchors: dimension mismatch");
  }
  const Eigen::Index r = anchorsRaw.cols();
  Eigen::JacobiSVD<Matrix> svd(anchorsRaw);
  const Vector sv = svd.singularValues();
  if (anchorsRaw.rows() < r || sv.size() < r || sv(r - 1) <= 1e-10 * std::max(sv(0), 1e-300)) {
    throw InvalidArgument("centerAnchors: anchor matrix is rank deficient");
  }
  Centered out;
  out.translation = anchorsRaw.colwise().mean().transpose();
  out.anchors = anchorsRaw.rowwise() - out.translation.transpose();
  out.sensors = sensorsRaw.rowwise() - out.translation.transpose();
  return out;
}

Matrix translateBack(const Matrix& points, const Vector& translation) {
  if (points.cols() != translation.size()) {
    throw InvalidArgument("translateBack: dimension mismatch");
  }
  return points.rowwise() + translation.transpose();
}

namespace {

bool connected(int nodes, const std::vector<std::vector<int>>& adj) {
  std::vector<bool> seen(nodes, false);
  std::deque<int> queue{0};
  seen[0] = true;
  int count = 1;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int w : adj[v]) {
      if (!seen[w]) {
        seen[w] = true;
        ++count;
        queue.push_back(w);
      }
    }
  }
  return count == nodes;
}

struct Attempt {
  Instance inst;
  bool ok = false;
};

Attempt tryGenerate(const GeneratorConfig& cfg, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-cfg.squareHalfWidth, cfg.squareHalfWidth);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const int n = cfg.n, m = cfg.m, r = cfg.r, N = n + m;
  Matrix P(N, r);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < r; ++k) P(i, k) = coord(rng);
  }

  Attempt out;
  Instance& inst = out.inst;
  inst.r = r;
  inst.n = n;
  inst.m = m;
  inst.radioRange = cfg.radioRange;
  inst.density = cfg.density;
  inst.noiseSigma = cfg.noiseSigma;
  inst.squareHalfWidth = cfg.squareHalfWidth;
  inst.seed = seed;

  Centered c;
  try {
    c = centerAnchors(P.bottomRows(m), P.topRows(n));
  } catch (const InvalidArgument&) {
    return out;
  }
  inst.anchors = c.anchors;
  inst.xTrue = c.sensors;
  inst.translation = c.translation;

  std::vector<std::vector<int>> adj(N);
  for (int a = n; a < N; ++a) {
    for (int b = n; b < N; ++b) {
      if (a != b) adj[a].push_back(b);
    }
  }
  const double range2 = cfg.radioRange * cfg.radioRange;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const double d = (P.row(i) - P.row(j)).norm();
      // Draws are made for every pair so the stream does not depend on range.
      const double keep = unit(rng);
      const double z = gauss(rng);
      if (d < cfg.radioRange) {
        if (keep < cfg.density) {
          const double noisy = d * (1.0 + cfg.noiseSigma * z);
          inst.edges.push_back({i, j, noisy * noisy});
          adj[i].push_back(j);
          adj[j].push_back(i);
        }
      } else if (cfg.withBounds) {
        inst.lowerBounds.push_back({i, j, range2});
      }
    }
  }
  out.ok = connected(N, adj);
  return out;
}

}  // namespace

Instance generate(const GeneratorConfig& cfg) {
  if (!(cfg.r >= 1 && cfg.m > cfg.r && cfg.n > cfg.m)) {
    throw InvalidArgument("generate: require n > m > r >= 1");
  }
  if (!(cfg.radioRange > 0.0)) throw InvalidArgument("generate: radio range must be positive");
  if (!(cfg.density > 0.0 && cfg.density <= 1.0)) {
    throw InvalidArgument("generate: density must lie in (0, 1]");
  }
  if (!(cfg.noiseSigma >= 0.0)) throw InvalidArgument("generate: noise sigma must be >= 0");
  if (!(cfg.squareHalfWidth > 0.0)) throw InvalidArgument("generate: half-width must be positive");
  for (int attempt = 0; attempt < cfg.maxAttempts; ++attempt) {
    Attempt a = tryGenerate(cfg, cfg.seed + static_cast<std::uint64_t>(attempt));
    if (a.ok) return a.inst;
  }
  throw NumericalError("connectivity unreachable at these parameters after " +
                       std::to_string(cfg.maxAttempts) + " attempts");
}

PartialEdm buildPartialEdm(const Instance& inst) {
  inst.validate();
  const int n = inst.n, m = inst.m, N = n + m;
  PartialEdm pe;
  pe.n = n;
  pe.m = m;
  pe.E = Matrix::Zero(N, N);
  pe.W = Matrix::Zero(N, N);
  pe.Hu = Matrix::Zero(N, N);
  pe.Hl = Matrix::Zero(N, N);
  pe.Ub = Matrix::Zero(N, N);
  pe.Lb = Matrix::Zero(N, N);

  const Matrix Danchor = kOp(inst.anchors * inst.anchors.transpose());
  pe.E.bottomRightCorner(m, m) = Danchor;
  pe.W.bottomRightCorner(m, m).setOnes();
  pe.W.diagonal().setZero();

  for (const auto& e : inst.edges) {
    const int i = std::min(e.i, e.j), j = std::max(e.i, e.j);
    pe.E(i, j) = pe.E(j, i) = e.value;
    pe.W(i, j) = pe.W(j, i) = 1.0;
    (j < n ? pe.sensorEdges : pe.anchorEdges).emplace_back(i, j);
  }
  for (const auto& e : inst.upperBounds) {
    const int i = std::min(e.i, e.j), j = std::max(e.i, e.j);
    pe.Ub(i, j) = pe.Ub(j, i) = e.value;
    pe.Hu(i, j) = pe.Hu(j, i) = 1.0;
    (j < n ? pe.upperSensor : pe.upperAnchor).emplace_back(i, j);
  }
  for (const auto& e : inst.lowerBounds) {
    const int i = std::min(e.i, e.j), j = std::max(e.i, e.j);
    pe.Lb(i, j) = pe.Lb(j, i) = e.value;
    pe.Hl(i, j) = pe.Hl(j, i) = 1.0;
    (j < n ? pe.lowerSensor : pe.lowerAnchor).emplace_back(i, j);
  }
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      if (pe.Hu(i, j) > 0 && pe.Hl(i, j) > 0 && pe.Lb(i, j) > pe.Ub(i, j)) {
        throw InvalidArgument("contradictory bounds: lower bound exceeds upper bound on (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  return pe;
}

DerivedConstants deriveConstants(const PartialEdm& pe, const Matrix& anchors) {
  const int N = pe.nodeCount();
  Matrix anchorGram = Matrix::Zero(N, N);
  anchorGram.bottomRightCorner(pe.m, pe.m) = anchors * anchors.transpose();
  const Matrix Ka = kOp(anchorGram);
  DerivedConstants dc;
  dc.Ebar = pe.W.cwiseProduct(pe.E - Ka);
  dc.Ubar = pe.Hu.cwiseProduct(pe.Ub - Ka);
  dc.Lbar = pe.Hl.cwiseProduct(pe.Lb - Ka);
  return dc;
}

bool isConnected(const PartialEdm& pe) {
  const int N = pe.nodeCount();
  std::vector<std::vector<int>> adj(N);
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i != j && pe.W(i, j) > 0.0) adj[i].push_back(j);
    }
  }
  return N > 0 && connected(N, adj);
}

}  // namespace edmsnl
