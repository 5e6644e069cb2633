#pragma once

// Seeded experiment suites: Method 1 vs Method 2 tables, quadratic vs
// linearized convergence series, and single runs.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "edmsnl/pipeline.hpp"

namespace edmsnl {

enum class Suite { EstimateMethods, CompareBarriers, Single };

const char* toString(Suite suite);
Suite suiteFromString(const std::string& name);

struct ExperimentConfig {
  Suite suite = Suite::EstimateMethods;
  GeneratorConfig gen;  // gen.seed is replaced by each entry of `seeds`
  std::vector<std::uint64_t> seeds;
  PipelineConfig pipeline;
  std::filesystem::path outDir;  // empty: nothing written
  /// Worker cap; 0 reads EDM_SNL_THREADS, then falls back to the hardware count.
  int threads = 0;

  void validate() const;
};

struct MethodsRow {
  std::uint64_t seed = 0;           // requested
  std::uint64_t effectiveSeed = 0;  // after connectivity retries
  bool ok = false;
  std::string error;
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  Measures method1;
  Measures method2;
  double difference = 0.0;  // ||X_1 - X_2||_F
};

struct BarrierRun {
  SolveStatus status = SolveStatus::MaxIter;
  int iterations = 0;
  int itersToTarget = -1;  // first iteration with relgap <= target, -1 if never
  double finalRelgap = 0.0;
  double finalObjective = 0.0;
  double bestRelgap = 0.0;  // smallest |relgap| along the trace
  IterationTrace trace;
};

struct BarrierRow {
  std::uint64_t seed = 0;
  std::uint64_t effectiveSeed = 0;
  bool ok = false;
  std::string error;
  BarrierRun quadratic;
  BarrierRun linearized;
};

struct ExperimentReport {
  std::vector<MethodsRow> methods;   // estimate-methods and single
  std::vector<BarrierRow> barriers;  // compare-barriers
};

/// Gap level used for the iteration counts of compare-barriers.
inline constexpr double kBarrierGapTarget = 1e-8;

/// Worker count for `requested` jobs: cfg value, else EDM_SNL_THREADS, else hardware.
int workerCount(int configured, std::size_t jobs);

ExperimentReport runExperiment(const ExperimentConfig& cfg);

struct SummaryStats {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation (n - 1)
};

SummaryStats summarize(const std::vector<double>& values);

/// Writes the report files for cfg.suite into cfg.outDir.
void writeReport(const ExperimentConfig& cfg, const ExperimentReport& report);

}  // namespace edmsnl
