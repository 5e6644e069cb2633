#include "edmsnl/relax.hpp"

#include <numbers>

namespace edmsnl {

namespace {
constexpr double kSqrt2 = std::numbers::sqrt2;

Matrix sym(const Matrix& M) { return 0.5 * (M + M.transpose()); }

Matrix blockCone(const Matrix& top, const Matrix& off, const Matrix& bottom) {
  const Eigen::Index r = top.rows();
  const Eigen::Index N = bottom.rows();
  Matrix Z(r + N, r + N);
  Z.topLeftCorner(r, r) = top;
  Z.bottomLeftCorner(N, r) = off;
  Z.topRightCorner(r, N) = off.transpose();
  Z.bottomRightCorner(N, N) = bottom;
  return Z;
}
}  // namespace

Matrix Formulation::linearizedCone(const Vector& x, const Vector& y, const Vector& w) const {
  return blockCone(sMat(w), matV(x, N_, r_) / kSqrt2, sMat(y));
}

Matrix Formulation::linearizedDual(const GramAdjoint& g, const Vector& lambdaTop) const {
  return blockCone(sMat(lambdaTop), matV(g.x, N_, r_) / kSqrt2, sMat(g.y));
}

KktResidual Formulation::linearizedResidual(const PrimalDualPoint& p,
                                            const BarrierParams& mu) const {
  const Slacks s = slacks(p);
  KktResidual res;
  res.ru = p.lambdaU.cwiseProduct(s.su).array() - mu.upper;
  res.rl = p.lambdaL.cwiseProduct(s.sl).array() - mu.lower;
  res.Rc = dualMatrix(p) * s.Z;
  res.Rc.diagonal().array() -= mu.cone;
  res.rs = p.w - svec(Matrix::Identity(r_, r_));
  return res;
}

KktResidual Formulation::linearizedJacobian(const Linearization& lin,
                                            const PrimalDualPoint& ds) const {
  const PrimalDualPoint& p = lin.p;
  const Slacks& s = lin.s;
  const Matrix& LambdaS = lin.dual;
  const Matrix K = kOp(gram(ds.x, ds.y));
  const GramAdjoint dg =
      gramAdjoint(kAdj(stationarityMatrix(ds.x, ds.y, ds.lambdaU, ds.lambdaL, true)));
  const Matrix dLambdaS = linearizedDual(dg, ds.lambdaTop);
  const Matrix dZ = linearizedCone(ds.x, ds.y, ds.w);

  KktResidual out;
  out.ru = -p.lambdaU.cwiseProduct(upper_.svec(K)) + s.su.cwiseProduct(ds.lambdaU);
  out.rl = p.lambdaL.cwiseProduct(lower_.svec(K)) + s.sl.cwiseProduct(ds.lambdaL);
  out.Rc = LambdaS * dZ + dLambdaS * s.Z;
  out.rs = ds.w;
  return out;
}

PrimalDualPoint Formulation::linearizedAdjoint(const Linearization& lin,
                                               const KktResidual& w) const {
  const PrimalDualPoint& p = lin.p;
  const Slacks& s = lin.s;
  const Matrix& LambdaS = lin.dual;
  PrimalDualPoint out = zeroPoint();

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

  const Matrix S1 = sym(LambdaS * w.Rc);
  out.w += svec(S1.topLeftCorner(r_, r_));
  out.y += svec(S1.bottomRightCorner(N_, N_));
  out.x += kSqrt2 * vecM(S1.bottomLeftCorner(N_, r_));

  const Matrix S2 = sym(w.Rc * s.Z);
  out.lambdaTop += svec(S2.topLeftCorner(r_, r_));
  GramAdjoint adj{kSqrt2 * vecM(S2.bottomLeftCorner(N_, r_)),
                  svec(S2.bottomRightCorner(N_, N_))};

  out.w += w.rs;

  addStationarityAdjoint(adj, out);
  return out;
}

}  // namespace edmsnl
