#pragma once

// Linear maps between Gram matrices, Euclidean distance matrices and their
// vectorizations. All maps are dense and pure.
//
// Conventions:
//   svec  : upper triangle in row-major order, off-diagonal entries scaled by
//           sqrt(2), so that <svec(A), svec(B)> = trace(A B).
//   vecM  : column-major stacking of a rectangular matrix.
//   EdgePattern : strictly-upper positions of a 0/1 symmetric matrix in
//           row-major order, with the same sqrt(2) scaling as svec.

#include <cstddef>
#include <utility>
#include <vector>

#include "edmsnl/types.hpp"

namespace edmsnl {

/// t(n) = n(n+1)/2.
constexpr int triangular(int n) { return n * (n + 1) / 2; }

/// Order n with t(n) == len, or throws InvalidArgument.
int orderFromTriangular(Eigen::Index len);

// --- Gram <-> EDM operators -------------------------------------------------

/// De(B) = diag(B) e' + e diag(B)'.
Matrix de(const Matrix& B);
/// De acting on a vector: v e' + e v'.
Matrix deVec(const Vector& v);
/// De*(D) = 2 Diag(D e).
Matrix deAdj(const Matrix& D);
/// K(B) = De(B) - 2B. Maps Gram matrices to EDMs.
Matrix kOp(const Matrix& B);
/// K*(D) = 2 (Diag(D e) - D).
Matrix kAdj(const Matrix& D);
/// Moore-Penrose inverse of K: -1/2 J offDiag(D) J.
Matrix kDagger(const Matrix& D);

Matrix offDiag(const Matrix& S);
/// J = I - ee'/n.
Matrix jProject(int n);

bool isSymmetric(const Matrix& S, double tol = 0.0);
bool isHollow(const Matrix& S, double tol = 0.0);
bool isCentered(const Matrix& S, double tol = 0.0);

// --- vectorizations ---------------------------------------------------------

Vector svec(const Matrix& S);
Matrix sMat(const Vector& v);
Vector vecM(const Matrix& M);
Matrix matV(const Vector& v, Eigen::Index rows, Eigen::Index cols);

// --- block operators --------------------------------------------------------

/// Partition of an order-n symmetric matrix into consecutive diagonal blocks.
class BlockPartition {
 public:
  explicit BlockPartition(std::vector<int> sizes);

  int blockCount() const { return static_cast<int>(sizes_.size()); }
  int size(int i) const;
  int offset(int i) const;
  int order() const { return order_; }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int order_ = 0;
};

/// i-th diagonal block (blocks are numbered from 0).
Matrix sblkDiag(const BlockPartition& part, int i, const Matrix& S);
/// Adjoint of sblkDiag: zero matrix with block i equal to T.
Matrix sBlkDiagAdj(const BlockPartition& part, int i, const Matrix& T);
/// sqrt(2) times the (i,j) off-diagonal block.
Matrix sblkOff(const BlockPartition& part, int i, int j, const Matrix& G);
/// Adjoint of sblkOff: J/sqrt(2) at (i,j) and J'/sqrt(2) at (j,i).
Matrix sBlkOffAdj(const BlockPartition& part, int i, int j, const Matrix& J);

// --- patterned vectorization ------------------------------------------------

/// Fixed list of strictly-upper positions taken from a 0/1 symmetric matrix.
class EdgePattern {
 public:
  EdgePattern() = default;
  /// Positions with H(i,j) != 0, i < j, row-major order.
  explicit EdgePattern(const Matrix& H);
  EdgePattern(int order, std::vector<std::pair<int, int>> positions);

  int order() const { return order_; }
  int size() const { return static_cast<int>(positions_.size()); }
  bool empty() const { return positions_.empty(); }
  const std::vector<std::pair<int, int>>& positions() const {
    return positions_;
  }

  /// sqrt(2) * S(i,j) over the pattern.
  Vector svec(const Matrix& S) const;
  /// Adjoint of svec: v_k / sqrt(2) at (i,j) and (j,i).
  Matrix sMat(const Vector& v) const;
  /// The defining 0/1 matrix.
  Matrix indicator() const;

 private:
  int order_ = 0;
  std::vector<std::pair<int, int>> positions_;
};

inline Vector svecPattern(const EdgePattern& p, const Matrix& S) {
  return p.svec(S);
}
inline Matrix sMatPattern(const EdgePattern& p, const Vector& v) {
  return p.sMat(v);
}

/// Frobenius inner product trace(A' B).
inline double inner(const Matrix& A, const Matrix& B) {
  return (A.array() * B.array()).sum();
}

}  // namespace edmsnl
