// Acceptance checks. Usage: edmsnl_acceptance [k ...]; without arguments every
// criterion runs. Prints one PASS/FAIL line per criterion and exits nonzero if
// any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "edmsnl/experiment.hpp"

using namespace edmsnl;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Matrix gaussMatrix(std::mt19937_64& rng, int rows, int cols) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = g(rng);
  return M;
}

Matrix gaussSymmetric(std::mt19937_64& rng, int n) {
  const Matrix M = gaussMatrix(rng, n, n);
  return 0.5 * (M + M.transpose());
}

double lambdaMin(const Matrix& S) {
  return Eigen::SelfAdjointEigenSolver<Matrix>(0.5 * (S + S.transpose()), Eigen::EigenvaluesOnly)
      .eigenvalues()(0);
}

double rmsd(const Matrix& X, const Matrix& Y) { return (X - Y).norm() / std::sqrt(double(X.rows())); }

// Inner-product identities are scored against the Cauchy-Schwarz scale.
double identityError(double lhs, double rhs, double scale) {
  return std::abs(lhs - rhs) / std::max(scale, 1e-300);
}

GeneratorConfig paperFamily(std::uint64_t seed, double noise) {
  GeneratorConfig g;
  g.r = 2;
  g.n = 16;
  g.m = 5;
  g.radioRange = 0.15;
  g.density = 0.75;
  g.noiseSigma = noise;
  g.squareHalfWidth = 0.1;
  g.seed = seed;
  return g;
}

Instance denseNoiseless(std::uint64_t seed, int n, int m) {
  GeneratorConfig g;
  g.n = n;
  g.m = m;
  g.density = 0.9;
  g.squareHalfWidth = 0.08;
  g.seed = seed;
  return generate(g);
}

void plantClique(Instance& inst, const std::vector<int>& nodes) {
  const Matrix& X = *inst.xTrue;
  std::vector<MeasuredEdge> kept;
  for (const auto& e : inst.edges) {
    const bool inside = std::count(nodes.begin(), nodes.end(), e.i) && std::count(nodes.begin(), nodes.end(), e.j);
    if (!inside) kept.push_back(e);
  }
  for (std::size_t a = 0; a < nodes.size(); ++a)
    for (std::size_t b = a + 1; b < nodes.size(); ++b)
      kept.push_back({nodes[a], nodes[b], (X.row(nodes[a]) - X.row(nodes[b])).squaredNorm()});
  inst.edges = std::move(kept);
}

// ---------------------------------------------------------------------------

Outcome operatorIdentities() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> order(2, 20);
  double worstAdj = 0.0, worstInv = 0.0;
  for (int t = 0; t < 200; ++t) {
    const int n = order(rng);
    const Matrix B = gaussSymmetric(rng, n), D = gaussSymmetric(rng, n);
    auto check = [&](const Matrix& lhsImg, const Matrix& rhsArg, const Matrix& lhsArg, const Matrix& rhsImg) {
      worstAdj = std::max(worstAdj, identityError(inner(lhsImg, rhsArg), inner(lhsArg, rhsImg),
                                                  lhsImg.norm() * rhsArg.norm() + lhsArg.norm() * rhsImg.norm()));
    };
    check(kOp(B), D, B, kAdj(D));
    check(de(B), D, B, deAdj(D));

    // random block partition with at least two blocks
    std::vector<int> sizes;
    for (int left = n; left > 0;) {
      const int s = std::uniform_int_distribution<int>(1, std::max(1, left - 1))(rng);
      sizes.push_back(std::min(s, left));
      left -= sizes.back();
    }
    if (sizes.size() < 2) sizes = {1, n - 1};
    const BlockPartition part(sizes);
    const int i = 0, j = part.blockCount() - 1;
    const Matrix T = gaussSymmetric(rng, part.size(i));
    check(sblkDiag(part, i, B), T, B, sBlkDiagAdj(part, i, T));
    const Matrix G = gaussMatrix(rng, part.size(i), part.size(j));
    check(sblkOff(part, i, j, B), G, B, sBlkOffAdj(part, i, j, G));

    Matrix H = Matrix::Zero(n, n);
    std::bernoulli_distribution coin(0.4);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (coin(rng)) H(a, b) = H(b, a) = 1.0;
    const EdgePattern pat(H);
    if (!pat.empty()) {
      std::normal_distribution<double> g(0.0, 1.0);
      Vector v(pat.size());
      for (auto& x : v) x = g(rng);
      const Vector sv = pat.svec(B);
      const Matrix sm = pat.sMat(v);
      worstAdj = std::max(worstAdj, identityError(sv.dot(v), inner(B, sm), sv.norm() * v.norm() + B.norm() * sm.norm()));
    }

    Matrix hollow = D;
    hollow.diagonal().setZero();
    worstInv = std::max(worstInv, (kOp(kDagger(hollow)) - hollow).norm() / hollow.norm());
    const Matrix J = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / n);
    worstInv = std::max(worstInv, (kDagger(kOp(B)) - J * B * J).norm() / B.norm());
  }
  return {worstAdj <= 1e-11 && worstInv <= 1e-11,
          fmt("max adjoint err %.2e, max inverse err %.2e", worstAdj, worstInv)};
}

Outcome feasibleSetEquivalence() {
  std::mt19937_64 rng(202);
  double worstYbar = 0.0;
  int schurAgree = 0, samples = 0;
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + t % 8, m = 3 + t % 3, r = 2;
    Matrix A = gaussMatrix(rng, m, r);
    A = A.rowwise() - A.colwise().mean();
    const Matrix X = gaussMatrix(rng, n, r);
    const Matrix R = gaussMatrix(rng, n, t % (n + 1));
    const Matrix Y = X * X.transpose() + R * R.transpose();

    Matrix direct(n + m, n + m);
    direct << Y, X * A.transpose(), A * X.transpose(), A * A.transpose();

    const FaceBasis faceA = composeFace(n, {}, A, TerminalForm::A);
    Matrix zA(n + r, n + r);
    zA << Y, X, X.transpose(), Matrix::Identity(r, r);

    Eigen::JacobiSVD<Matrix> svd(A, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Matrix Sig = svd.singularValues().asDiagonal();
    const Matrix V = svd.matrixV();
    Matrix zS(n + r, n + r);
    zS << Y, X * V * Sig, Sig * V.transpose() * X.transpose(), Sig * Sig;
    const FaceBasis faceS = composeFace(n, {}, A, TerminalForm::S);

    const double scale = 1.0 + direct.norm();
    worstYbar = std::max(worstYbar, (faceA.lift(zA) - direct).norm() / scale);
    worstYbar = std::max(worstYbar, (faceS.lift(zS) - direct).norm() / scale);
    worstYbar = std::max(worstYbar, (faceS.lift(transportToSForm(zA, faceA)) - direct).norm() / scale);
    worstYbar = std::max(worstYbar, (transportToSForm(zA, faceA).bottomRightCorner(r, r) -
                                     faceS.terminalConstraint()).norm() / scale);

    // Schur equivalence on the two cone slacks, sampled away from the boundary.
    Matrix S = gaussSymmetric(rng, n);
    Eigen::SelfAdjointEigenSolver<Matrix> es(S);
    const double target = (t % 2 ? 1.0 : -1.0) * std::pow(10.0, -1.0 - (t % 5));
    S += (target - es.eigenvalues()(0)) * Matrix::Identity(n, n);
    const Matrix Yq = X * X.transpose() + S;
    const Matrix quad = Yq - X * X.transpose();
    Matrix lin(r + n, r + n);
    lin << Matrix::Identity(r, r), X.transpose(), X, Yq;
    const bool psdQ = lambdaMin(quad) >= -1e-12, psdL = lambdaMin(lin) >= -1e-12;
    schurAgree += psdQ == psdL ? 1 : 0;
    ++samples;
  }

  // The same equivalence through the formulations' own slacks.
  Instance inst = denseNoiseless(3, 10, 4);
  const PartialEdm pe = buildPartialEdm(inst);
  const FaceBasis face = composeFace(inst.n, {}, inst.anchors);
  const Formulation q(FormulationKind::Quadratic, pe, face), l(FormulationKind::Linearized, pe, face);
  int formAgree = 0;
  for (int t = 0; t < 20; ++t) {
    const Matrix X = gaussMatrix(rng, inst.n, 2);
    Matrix S = gaussSymmetric(rng, inst.n);
    S += ((t % 2 ? 1e-3 : -1e-3) - lambdaMin(S)) * Matrix::Identity(inst.n, inst.n);
    PrimalDualPoint p = l.zeroPoint();
    p.x = std::sqrt(2.0) * vecM(X);
    p.y = svec(X * X.transpose() + S);
    p.w = svec(Matrix::Identity(2, 2));
    PrimalDualPoint pq = q.zeroPoint();
    pq.x = p.x;
    pq.y = p.y;
    const bool a = lambdaMin(q.slacks(pq).Z) >= -1e-12, b = lambdaMin(l.slacks(p).Z) >= -1e-12;
    formAgree += a == b ? 1 : 0;
  }
  return {worstYbar <= 1e-10 && schurAgree == samples && formAgree == 20,
          fmt("max Ybar disagreement %.2e, Schur agreement %d/%d, formulation slacks %d/20", worstYbar,
              schurAgree, samples, formAgree)};
}

Outcome slaterDiagnosis() {
  double worstUnreduced = -1e300, worstReduced = 1e300, worstLifted = -1e300;
  const double beta = 2.0;
  for (std::uint64_t s = 1; s <= 20; ++s) {
    const Instance inst = generate(paperFamily(s, 0.0));
    const Matrix P = inst.configuration();
    worstUnreduced = std::max(worstUnreduced, lambdaMin(P * P.transpose()));
    const Matrix& X = *inst.xTrue;
    const int n = inst.n;
    Matrix Z(n + 2, n + 2);
    Z << X * X.transpose() + beta * Matrix::Identity(n, n), X, X.transpose(), Matrix::Identity(2, 2);
    worstReduced = std::min(worstReduced, lambdaMin(Z));
    const FaceBasis face = composeFace(n, {}, inst.anchors);
    worstLifted = std::max(worstLifted, lambdaMin(face.lift(Z)));
  }
  return {worstUnreduced <= 1e-8 && worstReduced > 0.0 && worstLifted <= 1e-8,
          fmt("max lambda_min(Ybar*) %.2e, min lambda_min(Z shifted) %.3e, lifted shifted Z max lambda_min %.2e",
              worstUnreduced, worstReduced, worstLifted)};
}

std::vector<SolveResult>* gCollected = nullptr;  // converged solves gathered for the certificate check

void collect(const SolveResult& r) {
  if (gCollected) gCollected->push_back(r);
}

Outcome cliqueReduction() {
  bool ok = true;
  std::ostringstream os;
  double worstObj = 0.0, worstPos = 0.0;
  int cases = 0;
  for (int p : {5, 6, 7}) {
    for (std::uint64_t s = 1; s <= 3; ++s) {
      Instance inst = denseNoiseless(100 * p + s, 12, 4);
      std::vector<int> nodes(inst.n);
      std::iota(nodes.begin(), nodes.end(), 0);
      std::shuffle(nodes.begin(), nodes.end(), std::mt19937_64(s));
      nodes.resize(p);
      std::sort(nodes.begin(), nodes.end());
      plantClique(inst, nodes);

      PipelineConfig plain, reduced;
      reduced.cliques = CliqueMode::File;
      reduced.cliqueList = {nodes};
      const PipelineResult a = runPipeline(inst, plain), b = runPipeline(inst, reduced);
      collect(a.solve);
      collect(b.solve);

      const PartialEdm pe = buildPartialEdm(inst);
      Matrix E2(p, p);
      for (int i = 0; i < p; ++i)
        for (int j = 0; j < p; ++j) E2(i, j) = pe.E(nodes[i], nodes[j]);
      const int r2 = cliqueFace(E2, inst.r).rank;
      const bool orderOk = r2 <= 3 && a.reducedOrder - b.reducedOrder == p - r2;
      const bool solved = a.solve.status == SolveStatus::Converged && b.solve.status == SolveStatus::Converged;
      const double dObj = std::abs(a.solve.objective - b.solve.objective);
      const Matrix xa = locate(2, a.ybar, inst.anchors, pe, inst.xTrue).X;
      const Matrix xb = locate(2, b.ybar, inst.anchors, pe, inst.xTrue).X;
      const double dPos = rmsd(xa, xb);
      worstObj = std::max(worstObj, dObj);
      worstPos = std::max(worstPos, dPos);
      ++cases;
      if (!(orderOk && solved && dObj <= 1e-6 && dPos <= 1e-4)) {
        ok = false;
        os << fmt(" [p=%d seed=%d r2=%d order %d->%d %s/%s]", p, int(s), r2, a.reducedOrder, b.reducedOrder,
                  toString(a.solve.status), toString(b.solve.status));
      }
    }
  }
  return {ok, fmt("%d cases, max |dobj| %.2e, max Method-2 RMSD %.2e", cases, worstObj, worstPos) + os.str()};
}

Outcome exactRecovery() {
  bool ok = true;
  double worstGap = 0.0, worstRmsd = 0.0;
  int worstIters = 0;
  for (std::uint64_t s = 1; s <= 5; ++s) {
    const Instance inst = denseNoiseless(s, 10, 4);
    const PipelineResult res = runPipeline(inst, PipelineConfig{});
    collect(res.solve);
    const double e = rmsd(method1(res.ybar, inst.anchors).X, *inst.xTrue);
    worstGap = std::max(worstGap, std::abs(res.solve.relgap));
    worstRmsd = std::max(worstRmsd, e);
    worstIters = std::max(worstIters, res.solve.iterations);
    ok = ok && res.solve.status == SolveStatus::Converged && std::abs(res.solve.relgap) <= 1e-10 &&
         res.solve.iterations <= 100 && e <= 1e-3;
  }
  return {ok, fmt("5 instances, max relgap %.2e, max iterations %d, max Method-1 RMSD %.2e", worstGap, worstIters,
                  worstRmsd)};
}

Outcome methodComparison() {
  ExperimentConfig cfg;
  cfg.suite = Suite::EstimateMethods;
  cfg.gen = paperFamily(1, 0.05);
  for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
  const ExperimentReport rep = runExperiment(cfg);
  std::vector<double> a1, a2, a3, b1, b2, b3;
  for (const auto& row : rep.methods) {
    if (!row.ok) return {false, "seed " + std::to_string(row.seed) + " failed: " + row.error};
    a1.push_back(row.method1.m1);
    a2.push_back(*row.method1.m2);
    a3.push_back(row.method1.m3);
    b1.push_back(row.method2.m1);
    b2.push_back(*row.method2.m2);
    b3.push_back(row.method2.m3);
  }
  const double m2a = summarize(a2).mean, m2b = summarize(b2).mean;
  const double m1a = summarize(a1).mean, m1b = summarize(b1).mean;
  const double m3a = summarize(a3).mean, m3b = summarize(b3).mean;
  const bool pass = m2b < 0.5 * m2a && m1b < m1a && m3b < m3a;
  return {pass, fmt("10 seeds; Measure 2 means %.4f vs %.4f (ratio %.3f, need < 0.5); Measure 1 %.4f vs %.4f; "
                    "Measure 3 %.4f vs %.4f",
                    m2a, m2b, m2b / m2a, m1a, m1b, m3a, m3b)};
}

Outcome barrierComparison() {
  ExperimentConfig cfg;
  cfg.suite = Suite::CompareBarriers;
  cfg.gen = paperFamily(1, 0.05);
  // Achievable gap: iterate until the step length collapses or the budget ends.
  cfg.pipeline.solver.gapTol = 1e-300;
  cfg.pipeline.solver.maxIter = 100;
  for (std::uint64_t s = 1; s <= 10; ++s) cfg.seeds.push_back(s);
  const ExperimentReport rep = runExperiment(cfg);
  int faster = 0, smaller = 0, total = 0;
  for (const auto& row : rep.barriers) {
    if (!row.ok) return {false, "seed " + std::to_string(row.seed) + " failed: " + row.error};
    ++total;
    const int q = row.quadratic.itersToTarget, l = row.linearized.itersToTarget;
    if (q >= 0 && (l < 0 || q <= l)) ++faster;
    if (row.quadratic.bestRelgap <= row.linearized.bestRelgap) ++smaller;
  }
  const bool pass = faster * 10 >= 7 * total && smaller * 10 >= 7 * total;
  double ratio = 0.0;
  for (const auto& row : rep.barriers) ratio += std::log10(row.linearized.bestRelgap / row.quadratic.bestRelgap);
  return {pass, fmt("quadratic reaches 1e-8 no later on %d/%d; achievable gap at least as small on %d/%d "
                    "(mean advantage %.2f decades)",
                    faster, total, smaller, total, ratio / std::max(total, 1))};
}

Outcome barrierDerivatives() {
  std::mt19937_64 rng(909);
  int fdPass = 0, fdTotal = 0, adjPass = 0, adjTotal = 0;
  double worstAdj = 0.0, lo = 1e300, hi = 0.0;
  for (auto kind : {FormulationKind::Quadratic, FormulationKind::Linearized}) {
    GeneratorConfig g = paperFamily(7, 0.05);
    g.withBounds = true;
    Instance inst = generate(g);
    plantClique(inst, {0, 1, 2, 3, 4});
    const double u = 4.0 * inst.radioRange * inst.radioRange;
    for (const auto& e : inst.edges)
      if (e.j < inst.n) inst.upperBounds.push_back({e.i, e.j, u});
    const PartialEdm pe0 = buildPartialEdm(inst);
    const PermutedProblem pp = permuteForCliques(pe0, {{{0, 1, 2, 3, 4}, CliqueKind::Sensor}});
    const Matrix E2 = pp.pe.E.block(pp.freeSensors, pp.freeSensors, 5, 5);
    const FaceBasis face = composeFace(pp.freeSensors, {cliqueFace(E2, 2).U2}, inst.anchors);
    const Formulation f(kind, pp.pe, face);
    const PrimalDualPoint p0 = initFeasible(f);
    const BarrierParams mu = BarrierParams::uniform(0.1);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto randomVec = [&](Eigen::Index n) {
      Vector v(n);
      for (auto& x : v) x = gauss(rng);
      return v;
    };

    for (int t = 0; t < 50; ++t) {
      // random interior point: a damped random move away from the start
      const PrimalDualPoint move = f.unpack(randomVec(f.unknownCount()));
      PrimalDualPoint p = p0;
      p += move * (0.5 * stepLength(f, p0, move, 0.5));
      Vector d = randomVec(f.unknownCount());
      d /= d.norm();
      const PrimalDualPoint ds = f.unpack(d);
      const Linearization lin = f.linearize(p);
      const Vector F0 = f.pack(f.kktResidual(p, mu));
      const Vector Jd = f.pack(f.applyJacobian(lin, ds));
      auto err = [&](double h) {
        PrimalDualPoint q = p;
        q += ds * h;
        return ((f.pack(f.kktResidual(q, mu)) - F0) / h - Jd).norm();
      };
      const double ratio = err(1e-3) / err(1e-4);
      lo = std::min(lo, ratio);
      hi = std::max(hi, ratio);
      fdPass += ratio >= 5.0 && ratio <= 20.0 ? 1 : 0;
      ++fdTotal;
    }
    for (int t = 0; t < 100; ++t) {
      const PrimalDualPoint move = f.unpack(randomVec(f.unknownCount()));
      PrimalDualPoint p = p0;
      p += move * (0.5 * stepLength(f, p0, move, 0.5));
      const Linearization lin = f.linearize(p);
      const PrimalDualPoint ds = f.unpack(randomVec(f.unknownCount()));
      const KktResidual w = f.unpackResidual(randomVec(f.residualCount()));
      const KktResidual Jds = f.applyJacobian(lin, ds);
      const PrimalDualPoint Jtw = f.applyJacobianAdjoint(lin, w);
      const double lhs = Jds.dot(w), rhs = ds.dot(Jtw);
      const double e = std::abs(lhs - rhs) / std::max(std::abs(lhs), 1e-300);
      worstAdj = std::max(worstAdj, e);
      adjPass += e <= 1e-11 ? 1 : 0;
      ++adjTotal;
    }
  }
  return {fdPass == fdTotal && adjPass == adjTotal,
          fmt("finite differences %d/%d (error ratios in [%.2f, %.2f]); adjoint %d/%d (max rel err %.2e)", fdPass,
              fdTotal, lo, hi, adjPass, adjTotal, worstAdj)};
}

Outcome kktCertificates() {
  std::vector<SolveResult> all;
  gCollected = &all;
  exactRecovery();
  cliqueReduction();
  for (std::uint64_t s = 1; s <= 10; ++s) {
    for (auto kind : {FormulationKind::Quadratic, FormulationKind::Linearized}) {
      PipelineConfig cfg;
      cfg.form = kind;
      all.push_back(runPipeline(generate(paperFamily(s, 0.05)), cfg).solve);
    }
  }
  gCollected = nullptr;
  int converged = 0, holding = 0;
  double worstRes = 0.0, worstSign = 0.0;
  for (const auto& r : all) {
    if (r.status != SolveStatus::Converged) continue;
    ++converged;
    const KktCertificate& c = r.certificate;
    holding += c.holds() ? 1 : 0;
    worstRes = std::max(worstRes, c.residualNorm / (1.0 + c.dataNorm));
    worstSign = std::min({worstSign, c.minSu, c.minSl, c.minLambdaU, c.minLambdaL, c.minEigZ, c.minEigDual});
  }
  return {converged > 0 && holding == converged,
          fmt("%d/%d converged solves certified (of %zu); max ||F0||/(1+||data||) %.2e, most negative sign "
              "quantity %.2e",
              holding, converged, all.size(), worstRes, worstSign)};
}

struct Criterion {
  int id;
  const char* name;
  std::function<Outcome()> run;
  double budgetSeconds;  // 0 means no runtime limit
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "operator identities", operatorIdentities, 5.0},
      {2, "feasible-set equivalence", feasibleSetEquivalence, 10.0},
      {3, "Slater diagnosis", slaterDiagnosis, 0.0},
      {4, "clique reduction consistency", cliqueReduction, 0.0},
      {5, "noiseless exact recovery", exactRecovery, 60.0},
      {6, "Method 1 vs Method 2", methodComparison, 600.0},
      {7, "quadratic vs linearized barrier", barrierComparison, 0.0},
      {8, "Jacobian and adjoint correctness", barrierDerivatives, 0.0},
      {9, "KKT certificate", kktCertificates, 0.0},
  };
  std::vector<int> wanted;
  for (int a = 1; a < argc; ++a) wanted.push_back(std::atoi(argv[a]));
  int failures = 0;
  for (const auto& c : criteria) {
    if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (c.budgetSeconds > 0.0 && secs > c.budgetSeconds) {
      o.pass = false;
      o.detail += fmt("; over the %.0f s budget", c.budgetSeconds);
    }
    std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name, o.detail.c_str(), secs);
    std::fflush(stdout);
    failures += o.pass ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
