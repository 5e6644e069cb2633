#pragma once

// SDP relaxations on the reduced face.
//
// Unknowns (N = reduced sensor order, V = n x N sensor face block):
//   x = sqrt(2) vec(X), X in R^{N x r};   y = svec(Y), Y in S^N;
//   lambdaU, lambdaL : multipliers on the bound patterns.
// The lifted Gram matrix is
//   Ybar = sBlk2(AA') + Gram(x, y),
//   Gram(x, y) = [ V Y V'   V X A' ]
//                [ A X' V'     0   ].
//
// Quadratic form:  1/2 Mat(x) Mat(x)' - sMat(y) <= 0, dual Lambda (N x N).
// Linearized form: Zs = [[W, X'], [X, Y]] >= 0 with the explicit equation
//   W = I_r; dual LambdaS (order r + N). Extra unknowns w = svec(W) and
//   lambdaTop = svec(LambdaS_11).
// In both forms the duals of the conic constraint are eliminated through the
// stationarity conditions; they are functions of (x, y, lambdaU, lambdaL[,
// lambdaTop]).

#include "edmsnl/model.hpp"
#include "edmsnl/reduce.hpp"

namespace edmsnl {

enum class FormulationKind { Quadratic, Linearized };

const char* toString(FormulationKind kind);
FormulationKind formulationFromString(const std::string& name);

/// Point in the primal-dual space; also used for search directions.
struct PrimalDualPoint {
  Vector x;
  Vector y;
  Vector lambdaU;
  Vector lambdaL;
  Vector w;          // linearized only
  Vector lambdaTop;  // linearized only

  PrimalDualPoint& operator+=(const PrimalDualPoint& o);
  PrimalDualPoint operator*(double a) const;
  double dot(const PrimalDualPoint& o) const;
  double norm() const { return std::sqrt(dot(*this)); }
};

/// Perturbed optimality residual F_mu, or an element of its range space.
struct KktResidual {
  Vector ru;  // lambdaU o sU - mu_u e
  Vector rl;  // lambdaL o sL - mu_l e
  Matrix Rc;  // Lambda Z - mu_c I   (not symmetric)
  Vector rs;  // stationarity (quadratic) or W - I (linearized)

  double dot(const KktResidual& o) const;
  double norm() const { return std::sqrt(dot(*this)); }
};

struct BarrierParams {
  double upper = 0.0;
  double lower = 0.0;
  double cone = 0.0;

  static BarrierParams uniform(double mu) { return {mu, mu, mu}; }
};

struct Slacks {
  Vector su;
  Vector sl;
  Matrix Z;  // Y - XX' (quadratic) or Zs (linearized)
};

/// Quantities at p reused by every Jacobian action.
struct Linearization {
  PrimalDualPoint p;
  Slacks s;
  Matrix dual;  // Lambda or LambdaS
};

struct GramAdjoint {
  Vector x;
  Vector y;
};

class Formulation {
 public:
  /// `face` must use the A-form terminal block and match the (permuted) pe.
  Formulation(FormulationKind kind, const PartialEdm& pe, const FaceBasis& face);

  FormulationKind kind() const { return kind_; }
  int sensors() const { return n_; }
  int anchorCount() const { return m_; }
  int dim() const { return r_; }
  /// Reduced sensor order N.
  int reducedSensors() const { return N_; }
  int upperCount() const { return upper_.size(); }
  int lowerCount() const { return lower_.size(); }
  /// Order of the conic block: N (quadratic) or N + r (linearized).
  int coneOrder() const;

  const Matrix& anchors() const { return A_; }
  const Matrix& sensorBasis() const { return V_; }
  const DerivedConstants& constants() const { return dc_; }
  const PartialEdm& data() const { return pe_; }
  const EdgePattern& upperPattern() const { return upper_; }
  const EdgePattern& lowerPattern() const { return lower_; }

  // --- linear maps -----------------------------------------------------------
  Matrix gram(const Vector& x, const Vector& y) const;
  GramAdjoint gramAdjoint(const Matrix& S) const;
  /// sBlk2(AA') + Gram(x, y).
  Matrix liftedGram(const Vector& x, const Vector& y) const;
  /// Sensor positions V Mat(x)/sqrt(2), n x r.
  Matrix sensorPositions(const Vector& x) const;

  // --- objective, slacks, duals ---------------------------------------------
  double objective(const Vector& x, const Vector& y) const;
  Slacks slacks(const PrimalDualPoint& p) const;
  /// Eliminated Lambda (quadratic form).
  Matrix lambdaFromPoint(const Vector& x, const Vector& y, const Vector& lambdaU,
                         const Vector& lambdaL) const;
  /// x-stationarity with Lambda eliminated (quadratic form).
  Vector dualResidualLs(const Vector& x, const Vector& y, const Vector& lambdaU,
                        const Vector& lambdaL) const;
  /// Lambda (quadratic) or LambdaS (linearized).
  Matrix dualMatrix(const PrimalDualPoint& p) const;
  /// First-order change of the slacks along ds (exact for sU, sL and for Zs).
  Slacks slackDirection(const PrimalDualPoint& p, const PrimalDualPoint& ds) const;
  /// Change of the dual matrix along ds (it is affine in the point).
  Matrix dualDirection(const PrimalDualPoint& ds) const;

  // --- Gauss-Newton system --------------------------------------------------
  KktResidual kktResidual(const PrimalDualPoint& p, const BarrierParams& mu) const;
  Linearization linearize(const PrimalDualPoint& p) const;
  KktResidual applyJacobian(const PrimalDualPoint& p, const PrimalDualPoint& ds) const;
  KktResidual applyJacobian(const Linearization& lin, const PrimalDualPoint& ds) const;
  PrimalDualPoint applyJacobianAdjoint(const PrimalDualPoint& p, const KktResidual& w) const;
  PrimalDualPoint applyJacobianAdjoint(const Linearization& lin, const KktResidual& w) const;

  /// <lambdaU,sU> + <lambdaL,sL> + <Lambda,Z>.
  double complementarity(const PrimalDualPoint& p) const;
  /// nzU + nzL + cone order.
  int complementarityDof() const;

  // --- layout ---------------------------------------------------------------
  PrimalDualPoint zeroPoint() const;
  KktResidual zeroResidual() const;
  int unknownCount() const;
  int residualCount() const;
  Vector pack(const PrimalDualPoint& p) const;
  PrimalDualPoint unpack(const Vector& v) const;
  Vector pack(const KktResidual& r) const;
  KktResidual unpackResidual(const Vector& v) const;

 private:
  // W o (W o K(Gram) - Ebar) + sMat_u(lu) - sMat_l(ll); Ebar dropped when homogeneous.
  Matrix stationarityMatrix(const Vector& x, const Vector& y, const Vector& lambdaU,
                            const Vector& lambdaL, bool homogeneous) const;
  Matrix linearizedDual(const GramAdjoint& g, const Vector& lambdaTop) const;
  Matrix linearizedCone(const Vector& x, const Vector& y, const Vector& w) const;

  KktResidual quadraticJacobian(const Linearization& lin, const PrimalDualPoint& ds) const;
  PrimalDualPoint quadraticAdjoint(const Linearization& lin, const KktResidual& w) const;
  KktResidual linearizedResidual(const PrimalDualPoint& p, const BarrierParams& mu) const;
  KktResidual linearizedJacobian(const Linearization& lin, const PrimalDualPoint& ds) const;
  PrimalDualPoint linearizedAdjoint(const Linearization& lin, const KktResidual& w) const;
  /// Adds the adjoint of (dx,dy,dlu,dll) -> Gram-adjoint of K*(dM) to `out`.
  void addStationarityAdjoint(const GramAdjoint& a, PrimalDualPoint& out) const;

  FormulationKind kind_;
  PartialEdm pe_;
  int n_, m_, r_, N_;
  Matrix A_;
  Matrix V_;
  bool identityV_;
  Matrix Wsq_;  // W o W
  DerivedConstants dc_;
  EdgePattern upper_;
  EdgePattern lower_;
};

/// X with A X' = Ybar_21 in the least-squares sense. Throws NumericalError
/// when the residual exceeds tol * ||Ybar_21||.
Matrix recoverXFromGram(const Matrix& ybar, const Matrix& anchors, double tol = 1e-8);

}  // namespace edmsnl
