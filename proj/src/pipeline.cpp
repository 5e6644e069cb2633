#include "edmsnl/pipeline.hpp"

namespace edmsnl {

namespace {

Matrix principal(const Matrix& S, const std::vector<int>& nodes) {
  const auto k = static_cast<Eigen::Index>(nodes.size());
  Matrix out(k, k);
  for (Eigen::Index a = 0; a < k; ++a) {
    for (Eigen::Index b = 0; b < k; ++b) out(a, b) = S(nodes[a], nodes[b]);
  }
  return out;
}

}  // namespace

const char* toString(CliqueMode mode) {
  switch (mode) {
    case CliqueMode::None: return "none";
    case CliqueMode::Auto: return "auto";
    case CliqueMode::File: return "file";
  }
  return "none";
}

CliqueMode cliqueModeFromString(const std::string& name) {
  if (name == "none") return CliqueMode::None;
  if (name == "auto") return CliqueMode::Auto;
  if (name == "file") return CliqueMode::File;
  throw InvalidArgument("unknown clique mode '" + name + "' (expected none|auto|file)");
}

PipelineResult runPipeline(const Instance& inst, const PipelineConfig& cfg) {
  inst.validate();
  PipelineResult out;
  out.pe = buildPartialEdm(inst);
  out.fullOrder = out.pe.nodeCount();

  std::vector<CliqueSpec> candidates;
  if (cfg.cliques == CliqueMode::Auto) {
    const int minSize = cfg.minCliqueSize > 0 ? cfg.minCliqueSize : inst.r + 2;
    candidates = findSensorCliques(out.pe, minSize);
  } else if (cfg.cliques == CliqueMode::File) {
    const auto& list = cfg.cliqueList.empty() ? inst.cliques : cfg.cliqueList;
    for (const auto& c : list) candidates.push_back({c, CliqueKind::Sensor});
  }

  std::vector<CliqueSpec> used;
  for (const auto& c : candidates) {
    try {
      const CliqueFace face = cliqueFace(principal(out.pe.E, c.nodes), inst.r);
      if (face.rank >= static_cast<int>(c.nodes.size())) {
        throw NumericalError("clique face has full rank, nothing to reduce");
      }
      used.push_back(c);
    } catch (const NumericalError& e) {
      if (cfg.cliques == CliqueMode::File) throw;
      out.cliquesSkipped.push_back({c.nodes, e.what()});
    }
  }

  const PermutedProblem pp = permuteForCliques(out.pe, used);
  std::vector<Matrix> blocks;
  for (const auto& c : pp.cliques) {
    blocks.push_back(cliqueFace(principal(pp.pe.E, c.nodes), inst.r).U2);
  }
  for (const auto& c : used) out.cliquesUsed.push_back(c.nodes);

  const FaceBasis face = composeFace(pp.freeSensors, blocks, inst.anchors, TerminalForm::A);
  out.reducedOrder = face.reducedOrder();

  const Formulation f(cfg.form, pp.pe, face);
  out.solve = solve(f, cfg.solver);
  const PrimalDualPoint& p = out.solve.point;
  out.ybar = pp.perm.invert(f.liftedGram(p.x, p.y));
  Matrix Xp(out.pe.nodeCount(), inst.r);
  Xp.topRows(inst.n) = f.sensorPositions(p.x);
  Xp.bottomRows(inst.m) = inst.anchors;
  out.X = pp.perm.invertRows(Xp).topRows(inst.n);
  return out;
}

}  // namespace edmsnl
