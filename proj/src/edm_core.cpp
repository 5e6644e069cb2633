#include "edmsnl/edm_core.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace edmsnl {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;

void requireSquare(const Matrix& S, const char* what) {
  if (S.rows() != S.cols()) {
    throw InvalidArgument(std::string(what) + ": matrix must be square");
  }
}
}  // namespace

int orderFromTriangular(Eigen::Index len) {
  const auto n = static_cast<int>(
      std::lround((std::sqrt(8.0 * static_cast<double>(len) + 1.0) - 1.0) / 2.0));
  if (n < 0 || triangular(n) != len) {
    throw InvalidArgument("svec length " + std::to_string(len) +
                          " is not a triangular number");
  }
  return n;
}

Matrix de(const Matrix& B) {
  requireSquare(B, "de");
  return deVec(B.diagonal());
}

Matrix deVec(const Vector& v) {
  const auto n = v.size();
  return v * Vector::Ones(n).transpose() + Vector::Ones(n) * v.transpose();
}

Matrix deAdj(const Matrix& D) {
  requireSquare(D, "deAdj");
  return (2.0 * D.rowwise().sum()).asDiagonal();
}

Matrix kOp(const Matrix& B) {
  requireSquare(B, "kOp");
  return de(B) - 2.0 * B;
}

Matrix kAdj(const Matrix& D) {
  requireSquare(D, "kAdj");
  Matrix out = -2.0 * D;
  out.diagonal() += 2.0 * D.rowwise().sum();
  return out;
}

Matrix kDagger(const Matrix& D) {
  requireSquare(D, "kDagger");
  // J M J = M - row means - column means + grand mean, without forming J.
  const Matrix M = offDiag(D);
  const Vector rowMean = M.rowwise().mean();
  const Vector colMean = M.colwise().mean().transpose();
  const double mean = M.mean();
  Matrix out = M;
  out.colwise() -= rowMean;
  out.rowwise() -= colMean.transpose();
  out.array() += mean;
  return -0.5 * out;
}

Matrix offDiag(const Matrix& S) {
  Matrix out = S;
  out.diagonal().setZero();
  return out;
}

Matrix jProject(int n) {
  if (n <= 0) throw InvalidArgument("jProject: order must be positive");
  return Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
}

bool isSymmetric(const Matrix& S, double tol) {
  return S.rows() == S.cols() && (S - S.transpose()).cwiseAbs().maxCoeff() <= tol;
}

bool isHollow(const Matrix& S, double tol) {
  return S.rows() == S.cols() && S.diagonal().cwiseAbs().maxCoeff() <= tol;
}

bool isCentered(const Matrix& S, double tol) {
  return S.rowwise().sum().cwiseAbs().maxCoeff() <= tol;
}

Vector svec(const Matrix& S) {
  requireSquare(S, "svec");
  const auto n = static_cast<int>(S.rows());
  Vector v(triangular(n));
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    v(k++) = S(i, i);
    for (int j = i + 1; j < n; ++j) v(k++) = kSqrt2 * S(i, j);
  }
  return v;
}

Matrix sMat(const Vector& v) {
  const int n = orderFromTriangular(v.size());
  Matrix S(n, n);
  Eigen::Index k = 0;
  for (int i = 0; i < n; ++i) {
    S(i, i) = v(k++);
    for (int j = i + 1; j < n; ++j) {
      S(i, j) = S(j, i) = v(k++) / kSqrt2;
    }
  }
  return S;
}

Vector vecM(const Matrix& M) { return M.reshaped(); }

Matrix matV(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 0 || cols < 0 || rows * cols != v.size()) {
    throw InvalidArgument("matV: vector length " + std::to_string(v.size()) +
                          " does not match " + std::to_string(rows) + "x" +
                          std::to_string(cols));
  }
  return v.reshaped(rows, cols);
}

BlockPartition::BlockPartition(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  offsets_.reserve(sizes_.size());
  for (int s : sizes_) {
    if (s < 0) throw InvalidArgument("BlockPartition: negative block size");
    offsets_.push_back(order_);
    order_ += s;
  }
}

int BlockPartition::size(int i) const {
  if (i < 0 || i >= blockCount()) {
    throw InvalidArgument("block index " + std::to_string(i) + " out of range");
  }
  return sizes_[i];
}

int BlockPartition::offset(int i) const {
  size(i);
  return offsets_[i];
}

namespace {
void requireOrder(const BlockPartition& part, const Matrix& S, const char* what) {
  if (S.rows() != part.order() || S.cols() != part.order()) {
    throw InvalidArgument(std::string(what) + ": matrix order does not match partition");
  }
}
}  // namespace

Matrix sblkDiag(const BlockPartition& part, int i, const Matrix& S) {
  requireOrder(part, S, "sblkDiag");
  return S.block(part.offset(i), part.offset(i), part.size(i), part.size(i));
}

Matrix sBlkDiagAdj(const BlockPartition& part, int i, const Matrix& T) {
  if (T.rows() != part.size(i) || T.cols() != part.size(i)) {
    throw InvalidArgument("sBlkDiagAdj: block dimension mismatch");
  }
  Matrix S = Matrix::Zero(part.order(), part.order());
  S.block(part.offset(i), part.offset(i), T.rows(), T.cols()) = T;
  return S;
}

Matrix sblkOff(const BlockPartition& part, int i, int j, const Matrix& G) {
  requireOrder(part, G, "sblkOff");
  if (i == j) throw InvalidArgument("sblkOff: blocks must differ");
  return kSqrt2 * G.block(part.offset(i), part.offset(j), part.size(i), part.size(j));
}

Matrix sBlkOffAdj(const BlockPartition& part, int i, int j, const Matrix& J) {
  if (i == j) throw InvalidArgument("sBlkOffAdj: blocks must differ");
  if (J.rows() != part.size(i) || J.cols() != part.size(j)) {
    throw InvalidArgument("sBlkOffAdj: block dimension mismatch");
  }
  Matrix S = Matrix::Zero(part.order(), part.order());
  S.block(part.offset(i), part.offset(j), J.rows(), J.cols()) = J / kSqrt2;
  S.block(part.offset(j), part.offset(i), J.cols(), J.rows()) = J.transpose() / kSqrt2;
  return S;
}

EdgePattern::EdgePattern(const Matrix& H) : order_(static_cast<int>(H.rows())) {
  requireSquare(H, "EdgePattern");
  for (int i = 0; i < order_; ++i) {
    for (int j = i + 1; j < order_; ++j) {
      if (H(i, j) != 0.0) positions_.emplace_back(i, j);
    }
  }
}

EdgePattern::EdgePattern(int order, std::vector<std::pair<int, int>> positions)
    : order_(order), positions_(std::move(positions)) {
  for (auto& [i, j] : positions_) {
    if (i > j) std::swap(i, j);
    if (i == j || i < 0 || j >= order_) {
      throw InvalidArgument("EdgePattern: invalid position");
    }
  }
}

Vector EdgePattern::svec(const Matrix& S) const {
  if (S.rows() != order_ || S.cols() != order_) {
    throw InvalidArgument("EdgePattern::svec: matrix order mismatch");
  }
  Vector v(size());
  for (int k = 0; k < size(); ++k) {
    v(k) = kSqrt2 * S(positions_[k].first, positions_[k].second);
  }
  return v;
}

Matrix EdgePattern::sMat(const Vector& v) const {
  if (v.size() != size()) {
    throw InvalidArgument("EdgePattern::sMat: vector length " + std::to_string(v.size()) +
                          " does not match pattern size " + std::to_string(size()));
  }
  Matrix S = Matrix::Zero(order_, order_);
  for (int k = 0; k < size(); ++k) {
    const auto [i, j] = positions_[k];
    S(i, j) = S(j, i) = v(k) / kSqrt2;
  }
  return S;
}

Matrix EdgePattern::indicator() const {
  Matrix H = Matrix::Zero(order_, order_);
  for (const auto& [i, j] : positions_) H(i, j) = H(j, i) = 1.0;
  return H;
}

}  // namespace edmsnl
