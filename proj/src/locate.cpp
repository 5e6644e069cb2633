#include "edmsnl/locate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

namespace edmsnl {

Method1Result method1(const Matrix& ybar, const Matrix& anchors) {
  const Eigen::Index m = anchors.rows();
  const Eigen::Index n = ybar.rows() - m;
  if (n < 0 || ybar.cols() != ybar.rows()) throw InvalidArgument("method1: bad Gram order");
  const Matrix Y21 = ybar.bottomLeftCorner(m, n);
  const Matrix AtA = anchors.transpose() * anchors;
  Method1Result res;
  res.X = Y21.transpose() * anchors * AtA.inverse();
  res.residual = (anchors * res.X.transpose() - Y21).norm();
  return res;
}

void sortedEigen(const Matrix& S, Vector& values, Matrix& vectors) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()));
  const Eigen::Index k = S.rows();
  values.resize(k);
  vectors.resize(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    values(i) = es.eigenvalues()(k - 1 - i);
    Vector v = es.eigenvectors().col(k - 1 - i);
    for (Eigen::Index j = 0; j < k; ++j) {
      if (std::abs(v(j)) > 1e-12) {
        if (v(j) < 0.0) v = -v;
        break;
      }
    }
    vectors.col(i) = v;
  }
}

Method2Result method2(const Matrix& ybar, const Matrix& anchors, int r) {
  const Eigen::Index m = anchors.rows();
  const Eigen::Index n = ybar.rows() - m;
  if (n < 0 || r < 1 || r > ybar.rows()) throw InvalidArgument("method2: bad dimensions");
  Method2Result res;
  Matrix U;
  sortedEigen(ybar, res.eigenvalues, U);
  const Vector& ev = res.eigenvalues;
  if (r < ev.size()) {
    const double scale = std::max(1.0, std::abs(ev(0)));
    res.tie = std::abs(ev(r - 1) - ev(r)) <= 1e-10 * scale;
  }
  const Vector kept = ev.head(r).cwiseMax(0.0);
  double discarded = 0.0;
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const double d = i < r ? ev(i) - kept(i) : ev(i);
    discarded += d * d;
  }
  res.truncationError = std::sqrt(discarded);

  const Matrix P = U.leftCols(r) * kept.cwiseSqrt().asDiagonal();
  const Matrix P1 = P.topRows(n);
  const Matrix P2 = P.bottomRows(m);
  Eigen::JacobiSVD<Matrix> svd(anchors.transpose() * P2, Eigen::ComputeFullU | Eigen::ComputeFullV);
  res.Q = svd.matrixV() * svd.matrixU().transpose();
  res.X = P1 * res.Q;
  res.anchorsEst = P2 * res.Q;
  return res;
}

double weightedEdmError(const Matrix& X, const Matrix& anchors, const PartialEdm& pe) {
  Matrix P(X.rows() + anchors.rows(), X.cols());
  P << X, anchors;
  return pe.W.cwiseProduct(kOp(P * P.transpose()) - pe.E).norm();
}

Measures measures(const Matrix& X, const Matrix& anchorsEst, const Matrix& anchors,
                  const PartialEdm& pe, const std::optional<Matrix>& xTrue) {
  Measures out;
  out.m1 = weightedEdmError(X, anchorsEst, pe);
  out.m3 = weightedEdmError(X, anchors, pe);
  if (xTrue) out.m2 = (X - *xTrue).norm();
  return out;
}

LocalizationResult locate(int method, const Matrix& ybar, const Matrix& anchors,
                          const PartialEdm& pe, const std::optional<Matrix>& xTrue) {
  LocalizationResult res;
  res.method = method;
  if (method == 1) {
    res.X = method1(ybar, anchors).X;
    res.anchorsEst = anchors;
  } else if (method == 2) {
    const Method2Result m2 = method2(ybar, anchors, static_cast<int>(anchors.cols()));
    res.X = m2.X;
    res.anchorsEst = m2.anchorsEst;
  } else {
    throw InvalidArgument("locate: method must be 1 or 2");
  }
  res.measures = measures(res.X, res.anchorsEst, anchors, pe, xTrue);
  return res;
}

const char* resultsCsvHeader() { return "instance,method,m1,m2,m3"; }

void writeResultsCsv(std::ostream& os, const std::vector<ResultRow>& rows) {
  const auto old = os.precision(17);
  os << resultsCsvHeader() << '\n';
  for (const auto& row : rows) {
    os << row.instance << ',' << row.method << ',' << row.measures.m1 << ',';
    if (row.measures.m2) {
      os << *row.measures.m2;
    } else {
      os << "NA";
    }
    os << ',' << row.measures.m3 << '\n';
  }
  os.precision(old);
}

}  // namespace edmsnl
