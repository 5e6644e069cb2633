#include "edmsnl/relax.hpp"

#include <cmath>
#include <numbers>

namespace edmsnl {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;

Matrix sym(const Matrix& M) { return 0.5 * (M + M.transpose()); }

void addTo(Vector& v, const Vector& d) {
  if (v.size() == 0 && d.size() != 0) {
    v = d;
  } else {
    v += d;
  }
}
}  // namespace

const char* toString(FormulationKind kind) {
  return kind == FormulationKind::Quadratic ? "quadratic" : "linearized";
}

FormulationKind formulationFromString(const std::string& name) {
  if (name == "quadratic") return FormulationKind::Quadratic;
  if (name == "linearized") return FormulationKind::Linearized;
  throw InvalidArgument("unknown formulation '" + name + "' (expected quadratic|linearized)");
}

PrimalDualPoint& PrimalDualPoint::operator+=(const PrimalDualPoint& o) {
  addTo(x, o.x);
  addTo(y, o.y);
  addTo(lambdaU, o.lambdaU);
  addTo(lambdaL, o.lambdaL);
  addTo(w, o.w);
  addTo(lambdaTop, o.lambdaTop);
  return *this;
}

PrimalDualPoint PrimalDualPoint::operator*(double a) const {
  return {x * a, y * a, lambdaU * a, lambdaL * a, w * a, lambdaTop * a};
}

double PrimalDualPoint::dot(const PrimalDualPoint& o) const {
  return x.dot(o.x) + y.dot(o.y) + lambdaU.dot(o.lambdaU) + lambdaL.dot(o.lambdaL) +
         w.dot(o.w) + lambdaTop.dot(o.lambdaTop);
}

double KktResidual::dot(const KktResidual& o) const {
  return ru.dot(o.ru) + rl.dot(o.rl) + inner(Rc, o.Rc) + rs.dot(o.rs);
}

Formulation::Formulation(FormulationKind kind, const PartialEdm& pe, const FaceBasis& face)
    : kind_(kind),
      pe_(pe),
      n_(pe.n),
      m_(pe.m),
      r_(face.r()),
      N_(face.sensorOrder()),
      A_(face.terminalBlock()),
      V_(face.sensorBlock()) {
  if (face.terminal != TerminalForm::A) {
    throw InvalidArgument("Formulation: the solver works on the A-form face");
  }
  if (face.totalRows() != pe.nodeCount() || face.sensorRows() != n_ || A_.rows() != m_) {
    throw InvalidArgument("Formulation: face basis does not match the partial EDM");
  }
  identityV_ = (N_ == n_) && V_.isIdentity(0.0);
  Wsq_ = pe.W.cwiseProduct(pe.W);
  dc_ = deriveConstants(pe, A_);
  upper_ = EdgePattern(pe.Hu);
  lower_ = EdgePattern(pe.Hl);
}

int Formulation::coneOrder() const {
  return kind_ == FormulationKind::Quadratic ? N_ : N_ + r_;
}

Matrix Formulation::gram(const Vector& x, const Vector& y) const {
  const Matrix X = matV(x, N_, r_) / kSqrt2;
  const Matrix Y = sMat(y);
  Matrix G = Matrix::Zero(n_ + m_, n_ + m_);
  if (identityV_) {
    G.topLeftCorner(n_, n_) = Y;
    G.bottomLeftCorner(m_, n_) = A_ * X.transpose();
  } else {
    G.topLeftCorner(n_, n_) = V_ * Y * V_.transpose();
    G.bottomLeftCorner(m_, n_) = A_ * (V_ * X).transpose();
  }
  G.topRightCorner(n_, m_) = G.bottomLeftCorner(m_, n_).transpose();
  return G;
}

GramAdjoint Formulation::gramAdjoint(const Matrix& S) const {
  GramAdjoint g;
  const Matrix S21 = S.bottomLeftCorner(m_, n_);
  if (identityV_) {
    g.x = kSqrt2 * vecM(S21.transpose() * A_);
    g.y = svec(sym(S.topLeftCorner(n_, n_)));
  } else {
    g.x = kSqrt2 * vecM(V_.transpose() * S21.transpose() * A_);
    g.y = svec(sym(V_.transpose() * S.topLeftCorner(n_, n_) * V_));
  }
  return g;
}

Matrix Formulation::liftedGram(const Vector& x, const Vector& y) const {
  Matrix G = gram(x, y);
  G.bottomRightCorner(m_, m_) += A_ * A_.transpose();
  return G;
}

Matrix Formulation::sensorPositions(const Vector& x) const {
  return V_ * (matV(x, N_, r_) / kSqrt2);
}

double Formulation::objective(const Vector& x, const Vector& y) const {
  const Matrix R = pe_.W.cwiseProduct(kOp(gram(x, y))) - dc_.Ebar;
  return 0.5 * R.squaredNorm();
}

Matrix Formulation::stationarityMatrix(const Vector& x, const Vector& y, const Vector& lambdaU,
                                       const Vector& lambdaL, bool homogeneous) const {
  Matrix M = Wsq_.cwiseProduct(kOp(gram(x, y)));
  if (!homogeneous) M -= pe_.W.cwiseProduct(dc_.Ebar);
  if (!upper_.empty()) M += upper_.sMat(lambdaU);
  if (!lower_.empty()) M -= lower_.sMat(lambdaL);
  return M;
}

Slacks Formulation::slacks(const PrimalDualPoint& p) const {
  Slacks s;
  const Matrix K = kOp(gram(p.x, p.y));
  s.su = upper_.svec(dc_.Ubar - K);
  s.sl = lower_.svec(K - dc_.Lbar);
  if (kind_ == FormulationKind::Quadratic) {
    const Matrix Mx = matV(p.x, N_, r_);
    s.Z = sMat(p.y) - 0.5 * Mx * Mx.transpose();
  } else {
    s.Z = linearizedCone(p.x, p.y, p.w);
  }
  return s;
}

Matrix Formulation::lambdaFromPoint(const Vector& x, const Vector& y, const Vector& lambdaU,
                                    const Vector& lambdaL) const {
  const GramAdjoint g = gramAdjoint(kAdj(stationarityMatrix(x, y, lambdaU, lambdaL, false)));
  return sMat(g.y);
}

Vector Formulation::dualResidualLs(const Vector& x, const Vector& y, const Vector& lambdaU,
                                   const Vector& lambdaL) const {
  const GramAdjoint g = gramAdjoint(kAdj(stationarityMatrix(x, y, lambdaU, lambdaL, false)));
  const Matrix Lambda = sMat(g.y);
  return g.x + vecM(Lambda * matV(x, N_, r_));
}

Matrix Formulation::dualMatrix(const PrimalDualPoint& p) const {
  const GramAdjoint g =
      gramAdjoint(kAdj(stationarityMatrix(p.x, p.y, p.lambdaU, p.lambdaL, false)));
  if (kind_ == FormulationKind::Quadratic) return sMat(g.y);
  return linearizedDual(g, p.lambdaTop);
}

Slacks Formulation::slackDirection(const PrimalDualPoint& p, const PrimalDualPoint& ds) const {
  Slacks d;
  const Matrix K = kOp(gram(ds.x, ds.y));
  d.su = -upper_.svec(K);
  d.sl = lower_.svec(K);
  if (kind_ == FormulationKind::Quadratic) {
    d.Z = sMat(ds.y) - sym(matV(p.x, N_, r_) * matV(ds.x, N_, r_).transpose());
  } else {
    d.Z = linearizedCone(ds.x, ds.y, ds.w);
  }
  return d;
}

Matrix Formulation::dualDirection(const PrimalDualPoint& ds) const {
  const GramAdjoint g =
      gramAdjoint(kAdj(stationarityMatrix(ds.x, ds.y, ds.lambdaU, ds.lambdaL, true)));
  if (kind_ == FormulationKind::Quadratic) return sMat(g.y);
  return linearizedDual(g, ds.lambdaTop);
}

KktResidual Formulation::kktResidual(const PrimalDualPoint& p, const BarrierParams& mu) const {
  if (kind_ == FormulationKind::Linearized) return linearizedResidual(p, mu);
  const Slacks s = slacks(p);
  const GramAdjoint g =
      gramAdjoint(kAdj(stationarityMatrix(p.x, p.y, p.lambdaU, p.lambdaL, false)));
  const Matrix Lambda = sMat(g.y);
  KktResidual res;
  res.ru = p.lambdaU.cwiseProduct(s.su).array() - mu.upper;
  res.rl = p.lambdaL.cwiseProduct(s.sl).array() - mu.lower;
  res.Rc = Lambda * s.Z;
  res.Rc.diagonal().array() -= mu.cone;
  res.rs = g.x + vecM(Lambda * matV(p.x, N_, r_));
  return res;
}

Linearization Formulation::linearize(const PrimalDualPoint& p) const {
  return {p, slacks(p), dualMatrix(p)};
}

KktResidual Formulation::applyJacobian(const PrimalDualPoint& p, const PrimalDualPoint& ds) const {
  return applyJacobian(linearize(p), ds);
}

KktResidual Formulation::applyJacobian(const Linearization& lin, const PrimalDualPoint& ds) const {
  return kind_ == FormulationKind::Quadratic ? quadraticJacobian(lin, ds)
                                             : linearizedJacobian(lin, ds);
}

PrimalDualPoint Formulation::applyJacobianAdjoint(const PrimalDualPoint& p,
                                                  const KktResidual& w) const {
  return applyJacobianAdjoint(linearize(p), w);
}

PrimalDualPoint Formulation::applyJacobianAdjoint(const Linearization& lin,
                                                  const KktResidual& w) const {
  return kind_ == FormulationKind::Quadratic ? quadraticAdjoint(lin, w) : linearizedAdjoint(lin, w);
}

KktResidual Formulation::quadraticJacobian(const Linearization& lin,
                                           const PrimalDualPoint& ds) const {
  const PrimalDualPoint& p = lin.p;
  const Slacks& s = lin.s;
  const Matrix& Lambda = lin.dual;
  const Matrix K = kOp(gram(ds.x, ds.y));
  const Matrix dM = stationarityMatrix(ds.x, ds.y, ds.lambdaU, ds.lambdaL, true);
  const GramAdjoint dg = gramAdjoint(kAdj(dM));
  const Matrix dLambda = sMat(dg.y);
  const Matrix Mx = matV(p.x, N_, r_);
  const Matrix dMx = matV(ds.x, N_, r_);
  const Matrix dZ = sMat(ds.y) - sym(Mx * dMx.transpose());

  KktResidual out;
  out.ru = -p.lambdaU.cwiseProduct(upper_.svec(K)) + s.su.cwiseProduct(ds.lambdaU);
  out.rl = p.lambdaL.cwiseProduct(lower_.svec(K)) + s.sl.cwiseProduct(ds.lambdaL);
  out.Rc = Lambda * dZ + dLambda * s.Z;
  out.rs = dg.x + vecM(dLambda * Mx + Lambda * dMx);
  return out;
}

void Formulation::addStationarityAdjoint(const GramAdjoint& a, PrimalDualPoint& out) const {
  const Matrix T = kOp(gram(a.x, a.y));
  const GramAdjoint back = gramAdjoint(kAdj(Wsq_.cwiseProduct(T)));
  out.x += back.x;
  out.y += back.y;
  out.lambdaU += upper_.svec(T);
  out.lambdaL -= lower_.svec(T);
}

PrimalDualPoint Formulation::quadraticAdjoint(const Linearization& lin,
                                              const KktResidual& w) const {
  const PrimalDualPoint& p = lin.p;
  const Slacks& s = lin.s;
  const Matrix& Lambda = lin.dual;
  const Matrix Mx = matV(p.x, N_, r_);
  PrimalDualPoint out = zeroPoint();

  // complementarity on the bound patterns
  if (!upper_.empty()) {
    const GramAdjoint gu = gramAdjoint(kAdj(upper_.sMat(p.lambdaU.cwiseProduct(w.ru))));
    out.x -= gu.x;
    out.y -= gu.y;
    out.lambdaU += s.su.cwiseProduct(w.ru);
  }
  if (!lower_.empty()) {
    const GramAdjoint gl = gramAdjoint(kAdj(lower_.sMat(p.lambdaL.cwiseProduct(w.rl))));
    out.x += gl.x;
    out.y += gl.y;
    out.lambdaL += s.sl.cwiseProduct(w.rl);
  }

  // Lambda dZ + dLambda Z
  const Matrix S1 = sym(Lambda * w.Rc);
  out.y += svec(S1);
  out.x -= vecM(S1 * Mx);
  GramAdjoint adj{Vector::Zero(out.x.size()), svec(sym(w.Rc * s.Z))};

  // stationarity: dg.x + vec(dLambda Mx + Lambda dMx)
  const Matrix W4 = matV(w.rs, N_, r_);
  adj.x += w.rs;
  adj.y += svec(sym(W4 * Mx.transpose()));
  out.x += vecM(Lambda * W4);

  addStationarityAdjoint(adj, out);
  return out;
}

double Formulation::complementarity(const PrimalDualPoint& p) const {
  const Slacks s = slacks(p);
  return p.lambdaU.dot(s.su) + p.lambdaL.dot(s.sl) + inner(dualMatrix(p), s.Z);
}

int Formulation::complementarityDof() const {
  return upperCount() + lowerCount() + coneOrder();
}

PrimalDualPoint Formulation::zeroPoint() const {
  PrimalDualPoint p;
  p.x = Vector::Zero(N_ * r_);
  p.y = Vector::Zero(triangular(N_));
  p.lambdaU = Vector::Zero(upperCount());
  p.lambdaL = Vector::Zero(lowerCount());
  if (kind_ == FormulationKind::Linearized) {
    p.w = Vector::Zero(triangular(r_));
    p.lambdaTop = Vector::Zero(triangular(r_));
  }
  return p;
}

KktResidual Formulation::zeroResidual() const {
  KktResidual r;
  r.ru = Vector::Zero(upperCount());
  r.rl = Vector::Zero(lowerCount());
  r.Rc = Matrix::Zero(coneOrder(), coneOrder());
  r.rs = Vector::Zero(kind_ == FormulationKind::Quadratic ? N_ * r_ : triangular(r_));
  return r;
}

int Formulation::unknownCount() const {
  int count = N_ * r_ + triangular(N_) + upperCount() + lowerCount();
  if (kind_ == FormulationKind::Linearized) count += 2 * triangular(r_);
  return count;
}

int Formulation::residualCount() const {
  const KktResidual z = zeroResidual();
  return static_cast<int>(z.ru.size() + z.rl.size() + z.Rc.size() + z.rs.size());
}

Vector Formulation::pack(const PrimalDualPoint& p) const {
  Vector v(unknownCount());
  Eigen::Index k = 0;
  auto put = [&](const Vector& part) {
    v.segment(k, part.size()) = part;
    k += part.size();
  };
  put(p.x);
  put(p.y);
  put(p.lambdaU);
  put(p.lambdaL);
  if (kind_ == FormulationKind::Linearized) {
    put(p.w);
    put(p.lambdaTop);
  }
  if (k != v.size()) throw InvalidArgument("pack: point has inconsistent block sizes");
  return v;
}

PrimalDualPoint Formulation::unpack(const Vector& v) const {
  if (v.size() != unknownCount()) throw InvalidArgument("unpack: wrong vector length");
  PrimalDualPoint p = zeroPoint();
  Eigen::Index k = 0;
  auto take = [&](Vector& part) {
    part = v.segment(k, part.size());
    k += part.size();
  };
  take(p.x);
  take(p.y);
  take(p.lambdaU);
  take(p.lambdaL);
  if (kind_ == FormulationKind::Linearized) {
    take(p.w);
    take(p.lambdaTop);
  }
  return p;
}

Vector Formulation::pack(const KktResidual& r) const {
  Vector v(residualCount());
  Eigen::Index k = 0;
  auto put = [&](const Vector& part) {
    v.segment(k, part.size()) = part;
    k += part.size();
  };
  put(r.ru);
  put(r.rl);
  put(vecM(r.Rc));
  put(r.rs);
  if (k != v.size()) throw InvalidArgument("pack: residual has inconsistent block sizes");
  return v;
}

KktResidual Formulation::unpackResidual(const Vector& v) const {
  if (v.size() != residualCount()) throw InvalidArgument("unpackResidual: wrong vector length");
  KktResidual r = zeroResidual();
  Eigen::Index k = 0;
  r.ru = v.segment(k, r.ru.size());
  k += r.ru.size();
  r.rl = v.segment(k, r.rl.size());
  k += r.rl.size();
  r.Rc = matV(v.segment(k, r.Rc.size()), r.Rc.rows(), r.Rc.cols());
  k += r.Rc.size();
  r.rs = v.segment(k, r.rs.size());
  return r;
}

Matrix recoverXFromGram(const Matrix& ybar, const Matrix& anchors, double tol) {
  const Eigen::Index m = anchors.rows();
  const Eigen::Index n = ybar.rows() - m;
  if (n < 0 || ybar.cols() != ybar.rows()) throw InvalidArgument("recoverXFromGram: bad Gram order");
  const Matrix Y21 = ybar.bottomLeftCorner(m, n);
  const Matrix X = anchors.colPivHouseholderQr().solve(Y21).transpose();
  const double resid = (anchors * X.transpose() - Y21).norm();
  if (resid > tol * std::max(Y21.norm(), 1e-300) && resid > 1e-14) {
    throw NumericalError("recoverXFromGram: A X' = Ybar_21 is inconsistent (residual " +
                         std::to_string(resid) + ")");
  }
  return X;
}

}  // namespace edmsnl
