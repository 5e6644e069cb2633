#pragma once

// Sensor positions from an optimal lifted Gram matrix Ybar (order n + m,
// sensors first, anchor block A A').

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "edmsnl/model.hpp"

namespace edmsnl {

struct Method1Result {
  Matrix X;
  double residual = 0.0;  // ||A X' - Ybar_21||
};

/// Least-squares solution of A X' = Ybar_21.
Method1Result method1(const Matrix& ybar, const Matrix& anchors);

struct Method2Result {
  Matrix X;
  Matrix anchorsEst;  // P2 Q
  Matrix Q;           // r x r orthogonal
  Vector eigenvalues; // of Ybar, descending
  bool tie = false;   // lambda_r == lambda_{r+1} within tolerance
  double truncationError = 0.0;  // ||Ybar - Yr||_F
};

/// Best rank-r PSD truncation followed by an orthogonal Procrustes fit of the
/// anchor rows to A.
Method2Result method2(const Matrix& ybar, const Matrix& anchors, int r);

/// Eigen-decomposition in descending order, each eigenvector with its first
/// nonzero component positive.
void sortedEigen(const Matrix& S, Vector& values, Matrix& vectors);

struct Measures {
  double m1 = 0.0;
  std::optional<double> m2;
  double m3 = 0.0;
};

/// ||W o (K(P P') - E)||_F with P = [X; anchors].
double weightedEdmError(const Matrix& X, const Matrix& anchors, const PartialEdm& pe);

Measures measures(const Matrix& X, const Matrix& anchorsEst, const Matrix& anchors,
                  const PartialEdm& pe, const std::optional<Matrix>& xTrue);

struct LocalizationResult {
  int method = 1;
  Matrix X;
  Matrix anchorsEst;
  Measures measures;
};

LocalizationResult locate(int method, const Matrix& ybar, const Matrix& anchors,
                          const PartialEdm& pe, const std::optional<Matrix>& xTrue);

struct ResultRow {
  std::string instance;
  int method = 1;
  Measures measures;
};

const char* resultsCsvHeader();
void writeResultsCsv(std::ostream& os, const std::vector<ResultRow>& rows);

}  // namespace edmsnl
