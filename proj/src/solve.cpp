#include "edmsnl/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

namespace edmsnl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double minEig(const Matrix& S) {
  if (S.rows() == 0) return kInf;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

double minEntry(const Vector& v) { return v.size() == 0 ? kInf : v.minCoeff(); }

bool isPositiveDefinite(const Matrix& S) {
  Eigen::LLT<Matrix> llt(0.5 * (S + S.transpose()));
  return llt.info() == Eigen::Success;
}

bool allFinite(const Vector& v) { return v.allFinite(); }

// Cone slack at p + alpha ds, evaluated exactly.
Matrix coneSlackAt(const Formulation& f, const PrimalDualPoint& p, const PrimalDualPoint& ds,
                   double alpha) {
  PrimalDualPoint q = p;
  q += ds * alpha;
  return f.slacks(q).Z;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(gapTol > 0.0)) throw InvalidArgument("gapTol must be positive");
  if (maxIter < 1) throw InvalidArgument("maxIter must be at least 1");
  if (!(sigma > 0.0 && sigma < 1.0)) throw InvalidArgument("sigma must lie in (0,1)");
  if (!(ftb > 0.0 && ftb < 1.0)) throw InvalidArgument("ftb must lie in (0,1)");
  if (!(crossoverGap >= 0.0)) throw InvalidArgument("crossoverGap must be nonnegative");
  if (!(lsTol > 0.0)) throw InvalidArgument("lsTol must be positive");
}

const char* toString(StepMode mode) { return mode == StepMode::Centering ? "centering" : "affine"; }

const char* toString(SolveStatus status) {
  switch (status) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIter: return "maxIter";
    case SolveStatus::NumericalFailure: return "numericalFailure";
  }
  return "unknown";
}

const char* IterationTrace::csvHeader() {
  return "iter,objective,relgap,normFu,normFl,normFc,normFs,alpha,mu,mode";
}

void IterationTrace::writeCsv(std::ostream& os) const {
  const auto old = os.precision(17);
  os << csvHeader() << '\n';
  for (const auto& r : records) {
    os << r.iter << ',' << r.objective << ',' << r.relgap << ',' << r.normFu << ',' << r.normFl
       << ',' << r.normFc << ',' << r.normFs << ',' << r.alpha << ',' << r.mu << ','
       << toString(r.mode) << '\n';
  }
  os.precision(old);
}

bool KktCertificate::holds(double resTol, double signTol) const {
  return residualNorm <= resTol * (1.0 + dataNorm) && minSu >= -signTol && minSl >= -signTol &&
         minLambdaU >= -signTol && minLambdaL >= -signTol && minEigZ >= -signTol &&
         minEigDual >= -signTol;
}

PrimalDualPoint initFeasible(const Formulation& f) {
  PrimalDualPoint p = f.zeroPoint();
  const int N = f.reducedSensors();
  const Vector yI = svec(Matrix::Identity(N, N));
  p.lambdaU.setOnes();
  p.lambdaL.setOnes();

  // With x = 0 the bound slacks are affine in beta: sU = cU - beta kU, sL = beta kL - cL.
  const DerivedConstants& dc = f.constants();
  const Matrix K1 = kOp(f.gram(Vector::Zero(p.x.size()), yI));
  const Vector kU = f.upperPattern().svec(K1), cU = f.upperPattern().svec(dc.Ubar);
  const Vector kL = f.lowerPattern().svec(K1), cL = f.lowerPattern().svec(dc.Lbar);
  double lo = 0.0, hi = kInf;
  for (Eigen::Index i = 0; i < kU.size(); ++i) {
    if (kU(i) > 0.0) {
      hi = std::min(hi, cU(i) / kU(i));
    } else if (cU(i) <= 0.0) {
      throw NumericalError("initFeasible: contradictory bounds (upper bound not attainable)");
    }
  }
  for (Eigen::Index i = 0; i < kL.size(); ++i) {
    if (kL(i) > 0.0) {
      lo = std::max(lo, cL(i) / kL(i));
    } else if (cL(i) >= 0.0) {
      throw NumericalError("initFeasible: contradictory bounds (lower bound not attainable)");
    }
  }
  if (!(lo < hi) || hi <= 0.0) {
    throw NumericalError("initFeasible: contradictory bounds, no strictly feasible Y = beta I");
  }

  const double maxE = f.data().E.size() ? f.data().E.maxCoeff() : 0.0;
  double beta = 2.0 * (1.0 + maxE);
  auto clip = [&](double b) {
    if (b > lo && b < hi) return b;
    if (std::isfinite(hi)) return lo > 0.0 ? 0.5 * (lo + hi) : 0.5 * hi;
    return 2.0 * lo + 1.0;
  };
  beta = clip(beta);

  auto dualReady = [&] { return isPositiveDefinite(f.lambdaFromPoint(p.x, p.y, p.lambdaU, p.lambdaL)); };
  bool ready = false;
  double chosen = beta;
  for (int k = 0; k < 40 && !ready; ++k) {
    const double b = beta * std::pow(2.0, k);
    if (!(b > lo && b < hi)) break;
    p.y = b * yI;
    chosen = b;
    ready = dualReady();
  }
  p.y = chosen * yI;
  // When the bounds cap beta, upper multipliers add a Laplacian-like PSD term
  // to Lambda and lower multipliers subtract one.
  for (int k = 1; k <= 40 && !ready && (p.lambdaU.size() || p.lambdaL.size()); ++k) {
    p.lambdaU.setConstant(std::pow(2.0, k));
    p.lambdaL.setConstant(std::pow(2.0, -k));
    ready = dualReady();
  }
  if (!ready) {
    p.lambdaU.setOnes();
    p.lambdaL.setOnes();
  }

  if (f.kind() == FormulationKind::Linearized) {
    const int r = f.dim();
    p.w = svec(Matrix::Identity(r, r));
    const Matrix Lambda = f.lambdaFromPoint(p.x, p.y, p.lambdaU, p.lambdaL);
    double gamma = std::max(1.0, Lambda.trace() / std::max(N, 1));
    // Make the top block dominate the Schur complement when Lambda > 0.
    PrimalDualPoint probe = p;
    probe.lambdaTop = Vector::Zero(triangular(r));
    const Matrix LS = f.dualMatrix(probe);
    const Matrix Gx = LS.bottomLeftCorner(N, r);
    Eigen::LLT<Matrix> llt(Lambda);
    if (llt.info() == Eigen::Success && N > 0) {
      const Matrix schur = Gx.transpose() * llt.solve(Gx);
      Eigen::SelfAdjointEigenSolver<Matrix> es(schur, Eigen::EigenvaluesOnly);
      gamma = std::max(gamma, 2.0 * es.eigenvalues().maxCoeff());
    }
    p.lambdaTop = svec(gamma * Matrix::Identity(r, r));
  }
  return p;
}

double ratioTest(const Vector& v, const Vector& dv, double ftb) {
  double alpha = 1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (dv(i) < 0.0) alpha = std::min(alpha, -ftb * v(i) / dv(i));
  }
  return std::max(alpha, 0.0);
}

double ratioTestPsd(const Matrix& S, const Matrix& dS, double ftb) {
  if (S.rows() == 0) return 1.0;
  const double lmin = minEig(S);
  if (!(lmin > 0.0)) return 0.0;
  Matrix shifted = 0.5 * (S + S.transpose());
  shifted.diagonal().array() -= (1.0 - ftb) * lmin;
  Eigen::LLT<Matrix> llt(shifted);
  if (llt.info() != Eigen::Success) return 0.0;
  const Matrix Linv = llt.matrixL().solve(Matrix::Identity(S.rows(), S.cols()));
  const Matrix M = Linv * (0.5 * (dS + dS.transpose())) * Linv.transpose();
  const double e = minEig(M);
  if (e >= 0.0) return 1.0;
  return std::min(1.0, -1.0 / e);
}

double stepLength(const Formulation& f, const PrimalDualPoint& p, const PrimalDualPoint& ds,
                  double ftb, bool guardDual) {
  const Slacks s = f.slacks(p);
  const Slacks d = f.slackDirection(p, ds);
  double alpha = 1.0;
  alpha = std::min(alpha, ratioTest(s.su, d.su, ftb));
  alpha = std::min(alpha, ratioTest(s.sl, d.sl, ftb));
  alpha = std::min(alpha, ratioTest(p.lambdaU, ds.lambdaU, ftb));
  alpha = std::min(alpha, ratioTest(p.lambdaL, ds.lambdaL, ftb));
  alpha = std::min(alpha, ratioTestPsd(s.Z, d.Z, ftb));
  if (guardDual) {
    const Matrix dual = f.dualMatrix(p);
    if (isPositiveDefinite(dual)) {
      alpha = std::min(alpha, ratioTestPsd(dual, f.dualDirection(ds), ftb));
    }
  }
  return alpha;
}

double relativeGap(const Formulation& f, const PrimalDualPoint& p) {
  return f.complementarity(p) / (1.0 + std::abs(f.objective(p.x, p.y)));
}

StepInfo gaussNewtonStep(const Formulation& f, const PrimalDualPoint& p, const BarrierParams& mu,
                         const SolverConfig& cfg) {
  const Linearization lin = f.linearize(p);
  const Vector F = f.pack(f.kktResidual(p, mu));
  const int nu = f.unknownCount();
  auto applyJ = [&](const Vector& v) { return f.pack(f.applyJacobian(lin, f.unpack(v))); };
  auto applyJt = [&](const Vector& w) {
    return f.pack(f.applyJacobianAdjoint(lin, f.unpackResidual(w)));
  };

  StepInfo info;
  Vector dsv;
  if (f.sensors() + f.anchorCount() <= cfg.denseNodeLimit) {
    Matrix J(F.size(), nu);
    Vector e = Vector::Zero(nu);
    for (int j = 0; j < nu; ++j) {
      e(j) = 1.0;
      J.col(j) = applyJ(e);
      e(j) = 0.0;
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(J);
    dsv = cod.solve(-F);
    info.rank = static_cast<int>(cod.rank());
    info.smallestPivot =
        info.rank > 0 ? std::abs(cod.matrixQTZ()(info.rank - 1, info.rank - 1)) : 0.0;
  } else {
    // CGLS on min ||J ds + F||, operator actions only.
    dsv = Vector::Zero(nu);
    Vector r = -F;
    Vector s = applyJt(r);
    Vector d = s;
    double gamma = s.squaredNorm();
    const double gamma0 = gamma;
    for (int k = 0; k < cfg.cglsMaxIter && gamma > cfg.lsTol * cfg.lsTol * gamma0 && gamma > 0.0;
         ++k) {
      const Vector q = applyJ(d);
      const double qq = q.squaredNorm();
      if (qq <= 0.0) break;
      const double a = gamma / qq;
      dsv += a * d;
      r -= a * q;
      s = applyJt(r);
      const double gammaNew = s.squaredNorm();
      d = s + (gammaNew / gamma) * d;
      gamma = gammaNew;
    }
    info.rank = nu;
  }
  const double base = applyJt(F).norm();
  const double normal = applyJt(applyJ(dsv) + F).norm();
  info.normalResidual = base > 0.0 ? normal / base : normal;
  info.ds = f.unpack(dsv);
  return info;
}

KktCertificate kktCertificate(const Formulation& f, const PrimalDualPoint& p) {
  KktCertificate c;
  const PartialEdm& pe = f.data();
  c.residualNorm = f.kktResidual(p, BarrierParams{}).norm();
  c.dataNorm = pe.W.cwiseProduct(pe.E).norm() + pe.Hu.cwiseProduct(pe.Ub).norm() +
               pe.Hl.cwiseProduct(pe.Lb).norm();
  const Slacks s = f.slacks(p);
  c.minSu = s.su.size() ? minEntry(s.su) : 0.0;
  c.minSl = s.sl.size() ? minEntry(s.sl) : 0.0;
  c.minLambdaU = p.lambdaU.size() ? minEntry(p.lambdaU) : 0.0;
  c.minLambdaL = p.lambdaL.size() ? minEntry(p.lambdaL) : 0.0;
  c.minEigZ = s.Z.rows() ? minEig(s.Z) : 0.0;
  const Matrix dual = f.dualMatrix(p);
  c.minEigDual = dual.rows() ? minEig(dual) : 0.0;
  return c;
}

SolveResult solve(const Formulation& f, const SolverConfig& cfg) {
  cfg.validate();
  SolveResult res;
  PrimalDualPoint p = initFeasible(f);
  StepMode mode = StepMode::Centering;
  const int dof = std::max(1, f.complementarityDof());
  int stalled = 0;

  for (int k = 0;; ++k) {
    IterationRecord rec;
    rec.iter = k;
    rec.objective = f.objective(p.x, p.y);
    rec.relgap = relativeGap(f, p);
    if (mode == StepMode::Centering && std::abs(rec.relgap) < cfg.crossoverGap) {
      mode = StepMode::Affine;
    }
    rec.mode = mode;
    rec.mu = mode == StepMode::Affine ? 0.0 : cfg.sigma * std::abs(f.complementarity(p)) / dof;
    const BarrierParams mu = BarrierParams::uniform(rec.mu);
    const KktResidual F = f.kktResidual(p, mu);
    rec.normFu = F.ru.norm();
    rec.normFl = F.rl.norm();
    rec.normFc = F.Rc.norm();
    rec.normFs = F.rs.norm();

    if (!std::isfinite(rec.relgap) || !std::isfinite(F.norm())) {
      res.trace.records.push_back(rec);
      res.status = SolveStatus::NumericalFailure;
      res.message = "non-finite residual";
      break;
    }
    if (std::abs(rec.relgap) <= cfg.gapTol) {
      res.trace.records.push_back(rec);
      res.status = SolveStatus::Converged;
      break;
    }
    if (k >= cfg.maxIter) {
      res.trace.records.push_back(rec);
      res.status = SolveStatus::MaxIter;
      break;
    }

    const StepInfo step = gaussNewtonStep(f, p, mu, cfg);
    if (!allFinite(f.pack(step.ds))) {
      res.trace.records.push_back(rec);
      res.status = SolveStatus::NumericalFailure;
      res.message = "non-finite search direction";
      break;
    }
    double alpha = stepLength(f, p, step.ds, cfg.ftb);
    // The quadratic cone slack is concave along ds, so lambda_min(Z(alpha))
    // is concave too and the admissible steps form an interval [0, a*].
    if (f.kind() == FormulationKind::Quadratic && f.reducedSensors() > 0) {
      const double floor = (1.0 - cfg.ftb) * minEig(f.slacks(p).Z);
      auto admissible = [&](double a) { return minEig(coneSlackAt(f, p, step.ds, a)) >= floor; };
      if (!admissible(alpha)) {
        double lo = 0.0, hi = alpha;
        for (int b = 0; b < 50; ++b) {
          const double mid = 0.5 * (lo + hi);
          (admissible(mid) ? lo : hi) = mid;
        }
        alpha = lo;
      }
    }
    rec.alpha = alpha;
    res.trace.records.push_back(rec);
    p += step.ds * alpha;

    stalled = alpha < 1e-12 ? stalled + 1 : 0;
    if (stalled >= 5) {
      res.status = SolveStatus::NumericalFailure;
      res.message = "step length collapsed";
      IterationRecord last = rec;
      last.iter = k + 1;
      last.objective = f.objective(p.x, p.y);
      last.relgap = relativeGap(f, p);
      last.alpha = 0.0;
      res.trace.records.push_back(last);
      break;
    }
  }

  res.point = p;
  res.iterations = static_cast<int>(res.trace.records.size()) - 1;
  res.objective = f.objective(p.x, p.y);
  res.relgap = relativeGap(f, p);
  res.certificate = kktCertificate(f, p);
  return res;
}

}  // namespace edmsnl
