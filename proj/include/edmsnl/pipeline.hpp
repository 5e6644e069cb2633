#pragma once

// Instance -> partial EDM -> facial reduction -> relaxation solve -> Gram
// matrix in the original node order.

#include <optional>
#include <string>
#include <vector>

#include "edmsnl/locate.hpp"
#include "edmsnl/reduce.hpp"
#include "edmsnl/relax.hpp"
#include "edmsnl/solve.hpp"

namespace edmsnl {

enum class CliqueMode { None, Auto, File };

const char* toString(CliqueMode mode);
CliqueMode cliqueModeFromString(const std::string& name);

struct PipelineConfig {
  FormulationKind form = FormulationKind::Quadratic;
  CliqueMode cliques = CliqueMode::None;
  /// Used with CliqueMode::File; falls back to the instance's own list when empty.
  std::vector<std::vector<int>> cliqueList;
  /// Smallest clique worth reducing in auto mode (0 means r + 2).
  int minCliqueSize = 0;
  SolverConfig solver;
};

struct SkippedClique {
  std::vector<int> nodes;
  std::string reason;
};

struct PipelineResult {
  SolveResult solve;
  /// Lifted Gram matrix, original node order (sensors then anchors).
  Matrix ybar;
  /// Sensor positions read off x, original order.
  Matrix X;
  int fullOrder = 0;     // n + m
  int reducedOrder = 0;  // columns of the face basis
  std::vector<std::vector<int>> cliquesUsed;  // original sensor indices
  std::vector<SkippedClique> cliquesSkipped;
  PartialEdm pe;  // original order
};

PipelineResult runPipeline(const Instance& inst, const PipelineConfig& cfg);

}  // namespace edmsnl
