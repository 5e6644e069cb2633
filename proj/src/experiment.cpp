#include "edmsnl/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

namespace edmsnl {

namespace {

void writeFileAtomic(const std::filesystem::path& path, const std::string& text) {
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw IoError("cannot write " + tmp.string());
    os << text;
    if (!os) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename " + tmp.string() + ": " + ec.message());
}

std::string traceCsv(const IterationTrace& trace) {
  std::ostringstream os;
  trace.writeCsv(os);
  return os.str();
}

double negLog10(double v) { return -std::log10(std::max(std::abs(v), 1e-300)); }

BarrierRun summarizeRun(const SolveResult& res) {
  BarrierRun run;
  run.status = res.status;
  run.iterations = res.iterations;
  run.finalRelgap = res.relgap;
  run.finalObjective = res.objective;
  run.bestRelgap = std::abs(res.relgap);
  for (const auto& rec : res.trace.records) {
    run.bestRelgap = std::min(run.bestRelgap, std::abs(rec.relgap));
    if (run.itersToTarget < 0 && std::abs(rec.relgap) <= kBarrierGapTarget) {
      run.itersToTarget = rec.iter;
    }
  }
  run.trace = res.trace;
  return run;
}

template <typename Job>
void parallelFor(std::size_t count, int workers, Job job) {
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < count; i = next++) job(i);
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(body);
  body();
  for (auto& t : pool) t.join();
}

std::string seedTag(std::uint64_t seed) { return "seed" + std::to_string(seed); }

MethodsRow runMethods(const ExperimentConfig& cfg, std::uint64_t seed) {
  MethodsRow row;
  row.seed = seed;
  try {
    GeneratorConfig gen = cfg.gen;
    gen.seed = seed;
    const Instance inst = generate(gen);
    row.effectiveSeed = inst.seed;
    const PipelineResult res = runPipeline(inst, cfg.pipeline);
    row.status = res.solve.status;
    row.iterations = res.solve.iterations;
    const LocalizationResult l1 = locate(1, res.ybar, inst.anchors, res.pe, inst.xTrue);
    const LocalizationResult l2 = locate(2, res.ybar, inst.anchors, res.pe, inst.xTrue);
    row.method1 = l1.measures;
    row.method2 = l2.measures;
    row.difference = (l1.X - l2.X).norm();
    row.ok = true;
    if (!cfg.outDir.empty()) {
      writeFileAtomic(cfg.outDir / "traces" / (seedTag(seed) + "_" + toString(cfg.pipeline.form) + ".csv"),
                      traceCsv(res.solve.trace));
    }
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

BarrierRow runBarriers(const ExperimentConfig& cfg, std::uint64_t seed) {
  BarrierRow row;
  row.seed = seed;
  try {
    GeneratorConfig gen = cfg.gen;
    gen.seed = seed;
    const Instance inst = generate(gen);
    row.effectiveSeed = inst.seed;
    for (FormulationKind kind : {FormulationKind::Quadratic, FormulationKind::Linearized}) {
      PipelineConfig pc = cfg.pipeline;
      pc.form = kind;
      const PipelineResult res = runPipeline(inst, pc);
      BarrierRun run = summarizeRun(res.solve);
      if (!cfg.outDir.empty()) {
        writeFileAtomic(cfg.outDir / "traces" / (seedTag(seed) + "_" + toString(kind) + ".csv"),
                        traceCsv(res.solve.trace));
      }
      (kind == FormulationKind::Quadratic ? row.quadratic : row.linearized) = std::move(run);
    }
    row.ok = true;
  } catch (const std::exception& e) {
    row.error = e.what();
  }
  return row;
}

std::string measureTable(const std::vector<MethodsRow>& rows, int measure) {
  std::ostringstream os;
  os.precision(6);
  os << std::fixed;
  os << "method";
  for (std::size_t k = 0; k < rows.size(); ++k) os << ",test " << k + 1;
  os << ",mean,std\n";
  for (int method = 1; method <= 2; ++method) {
    os << "Method " << method;
    std::vector<double> values;
    for (const auto& row : rows) {
      if (!row.ok) {
        os << ",NA";
        continue;
      }
      const Measures& m = method == 1 ? row.method1 : row.method2;
      std::optional<double> v = measure == 1 ? std::optional<double>(m.m1)
                                : measure == 2 ? m.m2
                                               : std::optional<double>(m.m3);
      if (v) {
        values.push_back(*v);
        os << ',' << *v;
      } else {
        os << ",NA";
      }
    }
    const SummaryStats s = summarize(values);
    os << ',' << s.mean << ',' << s.std << '\n';
  }
  return os.str();
}

}  // namespace

const char* toString(Suite suite) {
  switch (suite) {
    case Suite::EstimateMethods: return "estimate-methods";
    case Suite::CompareBarriers: return "compare-barriers";
    case Suite::Single: return "single";
  }
  return "single";
}

Suite suiteFromString(const std::string& name) {
  if (name == "estimate-methods") return Suite::EstimateMethods;
  if (name == "compare-barriers") return Suite::CompareBarriers;
  if (name == "single") return Suite::Single;
  throw InvalidArgument("unknown suite '" + name +
                        "' (expected estimate-methods|compare-barriers|single)");
}

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw InvalidArgument("experiment: at least one seed is required");
  if (gen.r < 1 || gen.n < 1 || gen.m <= gen.r || gen.n <= gen.m) {
    throw InvalidArgument("experiment: need n > m > r >= 1");
  }
  if (!(gen.radioRange > 0.0)) throw InvalidArgument("experiment: radio range must be positive");
  if (!(gen.density > 0.0 && gen.density <= 1.0)) {
    throw InvalidArgument("experiment: density must lie in (0,1]");
  }
  if (gen.noiseSigma < 0.0) throw InvalidArgument("experiment: noise sigma must be nonnegative");
  pipeline.solver.validate();
}

int workerCount(int configured, std::size_t jobs) {
  int n = configured;
  if (n <= 0) {
    if (const char* env = std::getenv("EDM_SNL_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  return static_cast<int>(std::max<std::size_t>(1, std::min<std::size_t>(n, jobs)));
}

SummaryStats summarize(const std::vector<double>& values) {
  SummaryStats s;
  if (values.empty()) return {std::nan(""), std::nan("")};
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return s;
}

ExperimentReport runExperiment(const ExperimentConfig& cfg) {
  cfg.validate();
  if (!cfg.outDir.empty()) {
    std::error_code ec;
    std::filesystem::create_directories(cfg.outDir / "traces", ec);
    if (ec) throw IoError("cannot create " + cfg.outDir.string() + ": " + ec.message());
  }
  ExperimentReport report;
  const int workers = workerCount(cfg.threads, cfg.seeds.size());
  if (cfg.suite == Suite::CompareBarriers) {
    report.barriers.resize(cfg.seeds.size());
    parallelFor(cfg.seeds.size(), workers,
                [&](std::size_t i) { report.barriers[i] = runBarriers(cfg, cfg.seeds[i]); });
  } else {
    report.methods.resize(cfg.seeds.size());
    parallelFor(cfg.seeds.size(), workers,
                [&](std::size_t i) { report.methods[i] = runMethods(cfg, cfg.seeds[i]); });
  }
  if (!cfg.outDir.empty()) writeReport(cfg, report);
  return report;
}

void writeReport(const ExperimentConfig& cfg, const ExperimentReport& report) {
  const auto& dir = cfg.outDir;
  if (cfg.suite == Suite::CompareBarriers) {
    std::ostringstream series, summary;
    series.precision(10);
    summary.precision(10);
    series << "seed,form,iter,neglog_objective,neglog_relgap\n";
    summary << "seed,effective_seed,form,status,iterations,iters_to_gap,final_relgap,final_objective,"
               "error\n";
    for (const auto& row : report.barriers) {
      if (!row.ok) {
        summary << row.seed << ",,,failed,,,,," << '"' << row.error << '"' << '\n';
        continue;
      }
      for (const BarrierRun* run : {&row.quadratic, &row.linearized}) {
        const char* form = run == &row.quadratic ? "quadratic" : "linearized";
        for (const auto& rec : run->trace.records) {
          series << row.seed << ',' << form << ',' << rec.iter << ',' << negLog10(rec.objective)
                 << ',' << negLog10(rec.relgap) << '\n';
        }
        summary << row.seed << ',' << row.effectiveSeed << ',' << form << ','
                << toString(run->status) << ',' << run->iterations << ',' << run->itersToTarget
                << ',' << run->finalRelgap << ',' << run->finalObjective << ",\n";
      }
    }
    writeFileAtomic(dir / "barrier_series.csv", series.str());
    writeFileAtomic(dir / "barrier_summary.csv", summary.str());
    return;
  }

  std::vector<ResultRow> rows;
  std::ostringstream status;
  status.precision(10);
  status << "seed,effective_seed,status,iterations,difference,error\n";
  for (const auto& row : report.methods) {
    if (row.ok) {
      rows.push_back({seedTag(row.seed), 1, row.method1});
      rows.push_back({seedTag(row.seed), 2, row.method2});
      status << row.seed << ',' << row.effectiveSeed << ',' << toString(row.status) << ','
             << row.iterations << ',' << row.difference << ",\n";
    } else {
      status << row.seed << ",,failed,,," << '"' << row.error << '"' << '\n';
    }
  }
  std::ostringstream results;
  writeResultsCsv(results, rows);
  writeFileAtomic(dir / "results.csv", results.str());
  writeFileAtomic(dir / "runs.csv", status.str());
  for (int measure = 1; measure <= 3; ++measure) {
    writeFileAtomic(dir / ("measure" + std::to_string(measure) + ".csv"),
                    measureTable(report.methods, measure));
  }
}

}  // namespace edmsnl
