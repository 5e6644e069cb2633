#include "edmsnl/reduce.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <string>

namespace edmsnl {

namespace {

// Deterministic eigenvector sign: first entry with |v_i| > tol is positive.
void fixSigns(Matrix& vectors) {
  for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
    const double tol = 1e-12 * vectors.col(c).cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      if (std::abs(vectors(i, c)) > tol) {
        if (vectors(i, c) < 0) vectors.col(c) *= -1.0;
        break;
      }
    }
  }
}

}  // namespace

AnchorFace anchorFace(const Matrix& anchors) {
  const Eigen::Index r = anchors.cols();
  if (anchors.rows() < r || r == 0) throw InvalidArgument("anchorFace: need m >= r >= 1");
  Eigen::JacobiSVD<Matrix> svd(anchors, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vector& sv = svd.singularValues();
  if (sv(r - 1) < 1e-10 * sv(0) || sv(0) == 0.0) {
    throw NumericalError("anchorFace: anchor matrix is rank deficient (sigma_min = " +
                         std::to_string(sv(r - 1)) + ")");
  }
  AnchorFace f;
  f.U = svd.matrixU();
  f.sigma = sv;
  f.V = svd.matrixV();
  return f;
}

CliqueFace cliqueFace(const Matrix& E2, int r) {
  const Eigen::Index p = E2.rows();
  if (p < 1 || E2.cols() != p) throw InvalidArgument("cliqueFace: E2 must be square");
  if (!isSymmetric(E2, 1e-12 * std::max(1.0, E2.cwiseAbs().maxCoeff()))) {
    throw InvalidArgument("cliqueFace: E2 must be symmetric");
  }
  if (!isHollow(E2) || E2.minCoeff() < 0.0) {
    throw NumericalError("cliqueFace: E2 must be hollow and nonnegative");
  }
  CliqueFace f;
  f.B = kDagger(E2);
  f.Bhat = f.B + Matrix::Constant(p, p, 2.0);

  Eigen::SelfAdjointEigenSolver<Matrix> es(f.Bhat);
  f.eigenvalues = es.eigenvalues().reverse();
  Matrix vectors = es.eigenvectors().rowwise().reverse();
  const double lmax = f.eigenvalues(0);

  const double bmin = Eigen::SelfAdjointEigenSolver<Matrix>(f.B, Eigen::EigenvaluesOnly)
                          .eigenvalues()(0);
  if (bmin < -1e-4 * lmax) {
    throw NumericalError("cliqueFace: clique distances are not an EDM (lambda_min(B) = " +
                         std::to_string(bmin) + ")");
  }

  int keep = 0;
  while (keep < p && f.eigenvalues(keep) > 1e-8 * lmax) ++keep;
  if (keep > r + 1) {
    const double tail = f.eigenvalues(r + 1);
    if (tail > 1e-4 * lmax) {
      std::string msg = "cliqueFace: clique distances not realizable in dimension " +
                        std::to_string(r) + "; eigenvalue tail of B+2ee':";
      for (int k = r + 1; k < keep; ++k) msg += " " + std::to_string(f.eigenvalues(k));
      throw NumericalError(msg);
    }
    keep = r + 1;
  }
  f.rank = keep;
  f.U2 = vectors.leftCols(keep);
  fixSigns(f.U2);
  return f;
}

int FaceBasis::totalRows() const {
  int rows = 0;
  for (const auto& b : blocks) rows += static_cast<int>(b.rows());
  return rows;
}

int FaceBasis::reducedOrder() const {
  int cols = 0;
  for (const auto& b : blocks) cols += static_cast<int>(b.cols());
  return cols;
}

int FaceBasis::sensorOrder() const { return reducedOrder() - r(); }

int FaceBasis::sensorRows() const { return totalRows() - static_cast<int>(terminalBlock().rows()); }

Matrix FaceBasis::assembled() const {
  Matrix F = Matrix::Zero(totalRows(), reducedOrder());
  Eigen::Index row = 0, col = 0;
  for (const auto& b : blocks) {
    F.block(row, col, b.rows(), b.cols()) = b;
    row += b.rows();
    col += b.cols();
  }
  return F;
}

Matrix FaceBasis::sensorBlock() const {
  return assembled().topLeftCorner(sensorRows(), sensorOrder());
}

Matrix FaceBasis::lift(const Matrix& Z) const {
  if (Z.rows() != reducedOrder() || Z.cols() != reducedOrder()) {
    throw InvalidArgument("FaceBasis::lift: Z has the wrong order");
  }
  const Matrix F = assembled();
  return F * Z * F.transpose();
}

Matrix FaceBasis::terminalConstraint() const {
  if (terminal == TerminalForm::A) return Matrix::Identity(r(), r());
  return sigma.array().square().matrix().asDiagonal();
}

FaceBasis composeFace(int freeSensors, const std::vector<Matrix>& cliqueBlocks,
                      const Matrix& anchors, TerminalForm form) {
  if (freeSensors < 0) throw InvalidArgument("composeFace: negative free sensor count");
  const AnchorFace af = anchorFace(anchors);
  FaceBasis face;
  face.terminal = form;
  face.sigma = af.sigma;
  face.V = af.V;
  face.freeSensors = freeSensors;
  if (freeSensors > 0) face.blocks.push_back(Matrix::Identity(freeSensors, freeSensors));
  for (const auto& U : cliqueBlocks) {
    if (U.rows() == 0 || U.cols() == 0 || U.cols() > U.rows()) {
      throw InvalidArgument("composeFace: clique block must be p x r2 with 0 < r2 <= p");
    }
    face.blocks.push_back(U);
  }
  face.blocks.push_back(form == TerminalForm::A ? anchors : af.U);
  return face;
}

Matrix transportToSForm(const Matrix& zA, const FaceBasis& face) {
  const int N = face.sensorOrder(), r = face.r();
  Matrix T = Matrix::Identity(N + r, N + r);
  T.bottomRightCorner(r, r) = face.sigma.asDiagonal() * face.V.transpose();
  return T * zA * T.transpose();
}

Permutation::Permutation(std::vector<int> order) : order_(std::move(order)) {
  inverse_.assign(order_.size(), -1);
  for (std::size_t k = 0; k < order_.size(); ++k) {
    const int o = order_[k];
    if (o < 0 || o >= size() || inverse_[o] != -1) {
      throw InvalidArgument("Permutation: not a permutation");
    }
    inverse_[o] = static_cast<int>(k);
  }
}

Permutation Permutation::identity(int size) {
  std::vector<int> order(size);
  std::iota(order.begin(), order.end(), 0);
  return Permutation(std::move(order));
}

bool Permutation::isIdentity() const {
  for (int k = 0; k < size(); ++k) {
    if (order_[k] != k) return false;
  }
  return true;
}

Matrix Permutation::apply(const Matrix& S) const {
  Matrix out(S.rows(), S.cols());
  for (int a = 0; a < size(); ++a) {
    for (int b = 0; b < size(); ++b) out(a, b) = S(order_[a], order_[b]);
  }
  return out;
}

Matrix Permutation::invert(const Matrix& S) const {
  Matrix out(S.rows(), S.cols());
  for (int a = 0; a < size(); ++a) {
    for (int b = 0; b < size(); ++b) out(order_[a], order_[b]) = S(a, b);
  }
  return out;
}

Matrix Permutation::applyRows(const Matrix& M) const {
  Matrix out(M.rows(), M.cols());
  for (int a = 0; a < size(); ++a) out.row(a) = M.row(order_[a]);
  return out;
}

Matrix Permutation::invertRows(const Matrix& M) const {
  Matrix out(M.rows(), M.cols());
  for (int a = 0; a < size(); ++a) out.row(order_[a]) = M.row(a);
  return out;
}

namespace {

void rebuildEdgeLists(PartialEdm& pe) {
  const int n = pe.n, N = pe.nodeCount();
  pe.sensorEdges.clear();
  pe.anchorEdges.clear();
  pe.upperSensor.clear();
  pe.upperAnchor.clear();
  pe.lowerSensor.clear();
  pe.lowerAnchor.clear();
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < N; ++j) {
      if (pe.W(i, j) > 0) (j < n ? pe.sensorEdges : pe.anchorEdges).emplace_back(i, j);
      if (pe.Hu(i, j) > 0) (j < n ? pe.upperSensor : pe.upperAnchor).emplace_back(i, j);
      if (pe.Hl(i, j) > 0) (j < n ? pe.lowerSensor : pe.lowerAnchor).emplace_back(i, j);
    }
  }
}

}  // namespace

bool isClique(const PartialEdm& pe, const std::vector<int>& nodes) {
  for (std::size_t a = 0; a < nodes.size(); ++a) {
    for (std::size_t b = a + 1; b < nodes.size(); ++b) {
      if (!pe.known(nodes[a], nodes[b])) return false;
    }
  }
  return true;
}

PermutedProblem permuteForCliques(const PartialEdm& pe, const std::vector<CliqueSpec>& cliques) {
  const int n = pe.n, N = pe.nodeCount();
  std::vector<bool> inClique(n, false);
  for (const auto& c : cliques) {
    if (c.kind != CliqueKind::Sensor) throw InvalidArgument("permuteForCliques: sensor cliques only");
    for (int v : c.nodes) {
      if (v < 0 || v >= n) throw InvalidArgument("permuteForCliques: clique node out of range");
      if (inClique[v]) throw InvalidArgument("permuteForCliques: cliques overlap at node " + std::to_string(v));
      inClique[v] = true;
    }
    if (!isClique(pe, c.nodes)) throw InvalidArgument("permuteForCliques: listed nodes are not a clique");
  }
  std::vector<int> order;
  order.reserve(N);
  for (int v = 0; v < n; ++v) {
    if (!inClique[v]) order.push_back(v);
  }
  PermutedProblem out;
  out.freeSensors = static_cast<int>(order.size());
  for (const auto& c : cliques) {
    CliqueSpec mapped{{}, CliqueKind::Sensor};
    for (int v : c.nodes) {
      mapped.nodes.push_back(static_cast<int>(order.size()));
      order.push_back(v);
    }
    out.cliques.push_back(std::move(mapped));
  }
  for (int v = n; v < N; ++v) order.push_back(v);
  out.perm = Permutation(std::move(order));

  out.pe = pe;
  out.pe.E = out.perm.apply(pe.E);
  out.pe.W = out.perm.apply(pe.W);
  out.pe.Hu = out.perm.apply(pe.Hu);
  out.pe.Hl = out.perm.apply(pe.Hl);
  out.pe.Ub = out.perm.apply(pe.Ub);
  out.pe.Lb = out.perm.apply(pe.Lb);
  rebuildEdgeLists(out.pe);
  return out;
}

std::vector<CliqueSpec> findSensorCliques(const PartialEdm& pe, int minSize) {
  const int n = pe.n;
  std::vector<CliqueSpec> found;
  if (minSize < 2) throw InvalidArgument("findSensorCliques: minSize must be >= 2");
  std::vector<std::set<int>> adj(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (i != j && pe.known(i, j)) adj[i].insert(j);
    }
  }
  std::vector<bool> assigned(n, false), tried(n, false);
  auto freeDegree = [&](int v) {
    int d = 0;
    for (int w : adj[v]) d += assigned[w] ? 0 : 1;
    return d;
  };
  for (;;) {
    int seed = -1, best = -1;
    for (int v = 0; v < n; ++v) {
      if (assigned[v] || tried[v]) continue;
      const int d = freeDegree(v);
      if (d > best) {
        best = d;
        seed = v;
      }
    }
    if (seed < 0) break;
    tried[seed] = true;
    if (best + 1 < minSize) continue;

    std::vector<int> clique{seed};
    std::set<int> candidates;
    for (int w : adj[seed]) {
      if (!assigned[w]) candidates.insert(w);
    }
    while (!candidates.empty()) {
      int pick = -1, pickScore = -1;
      for (int c : candidates) {
        int score = 0;
        for (int d : candidates) score += (c != d && adj[c].count(d)) ? 1 : 0;
        if (score > pickScore) {
          pickScore = score;
          pick = c;
        }
      }
      clique.push_back(pick);
      std::set<int> next;
      for (int c : candidates) {
        if (c != pick && adj[pick].count(c)) next.insert(c);
      }
      candidates = std::move(next);
    }
    if (static_cast<int>(clique.size()) >= minSize) {
      std::sort(clique.begin(), clique.end());
      for (int v : clique) assigned[v] = true;
      found.push_back({std::move(clique), CliqueKind::Sensor});
    }
  }
  return found;
}

}  // namespace edmsnl
