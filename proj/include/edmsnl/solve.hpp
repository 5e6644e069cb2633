#pragma once

// Gauss-Newton primal-dual path following on the reduced relaxation.
//
// Each iteration solves min ||F'(p) ds + F_mu(p)|| and takes a
// fraction-to-boundary step. Slacks (sU, sL, Z) stay strictly interior; the
// eliminated dual matrix may start outside the cone and is only guarded once
// it has entered. Below `crossoverGap` the iteration switches to affine steps
// (mu = 0) for the rest of the run.

#include <iosfwd>
#include <string>
#include <vector>

#include "edmsnl/relax.hpp"

namespace edmsnl {

struct SolverConfig {
  double gapTol = 1e-10;
  int maxIter = 200;
  double sigma = 0.25;
  double ftb = 0.95;
  double crossoverGap = 1e-8;
  double lsTol = 1e-8;
  /// Node count (n + m) above which the step uses CGLS instead of a dense factorization.
  int denseNodeLimit = 60;
  int cglsMaxIter = 2000;

  void validate() const;
};

enum class StepMode { Centering, Affine };
enum class SolveStatus { Converged, MaxIter, NumericalFailure };

const char* toString(StepMode mode);
const char* toString(SolveStatus status);

struct IterationRecord {
  int iter = 0;
  double objective = 0.0;
  double relgap = 0.0;
  double normFu = 0.0;
  double normFl = 0.0;
  double normFc = 0.0;
  double normFs = 0.0;
  double alpha = 0.0;
  double mu = 0.0;
  StepMode mode = StepMode::Centering;
};

struct IterationTrace {
  std::vector<IterationRecord> records;

  static const char* csvHeader();
  void writeCsv(std::ostream& os) const;
};

/// Optimality report at the final point (mu = 0).
struct KktCertificate {
  double residualNorm = 0.0;  // ||F_0||
  double dataNorm = 0.0;      // ||W o E|| + ||Hu o Ub|| + ||Hl o Lb||
  double minSu = 0.0;
  double minSl = 0.0;
  double minLambdaU = 0.0;
  double minLambdaL = 0.0;
  double minEigZ = 0.0;
  double minEigDual = 0.0;

  /// ||F_0|| <= resTol (1 + ||data||) and every sign/PSD quantity >= -signTol.
  bool holds(double resTol = 1e-7, double signTol = 1e-8) const;
};

struct SolveResult {
  PrimalDualPoint point;
  IterationTrace trace;
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  double objective = 0.0;
  double relgap = 0.0;
  KktCertificate certificate;
  std::string message;
};

/// x = 0, Y = beta I, unit bound multipliers. Throws NumericalError when the
/// bounds leave no admissible beta.
PrimalDualPoint initFeasible(const Formulation& f);

struct StepInfo {
  PrimalDualPoint ds;
  int rank = 0;
  double smallestPivot = 0.0;
  /// ||J*(J ds + F)|| / ||J* F||.
  double normalResidual = 0.0;
};

StepInfo gaussNewtonStep(const Formulation& f, const PrimalDualPoint& p, const BarrierParams& mu,
                         const SolverConfig& cfg = {});

/// Largest alpha <= 1 with v + alpha dv >= (1 - ftb) v.
double ratioTest(const Vector& v, const Vector& dv, double ftb);
/// Largest alpha <= 1 with lambda_min(S + alpha dS) >= (1 - ftb) lambda_min(S); S > 0.
double ratioTestPsd(const Matrix& S, const Matrix& dS, double ftb);

/// Fraction-to-boundary step on sU, sL, lambdaU, lambdaL, the cone slack and,
/// when it is positive definite and `guardDual` is set, the dual matrix.
double stepLength(const Formulation& f, const PrimalDualPoint& p, const PrimalDualPoint& ds,
                  double ftb, bool guardDual = true);

double relativeGap(const Formulation& f, const PrimalDualPoint& p);

KktCertificate kktCertificate(const Formulation& f, const PrimalDualPoint& p);

SolveResult solve(const Formulation& f, const SolverConfig& cfg = {});

}  // namespace edmsnl
