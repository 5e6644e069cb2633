// edm_snl: generate instances, solve the reduced relaxation, locate sensors
// and run the seeded experiment suites.
//
// Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 I/O error.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "edmsnl/experiment.hpp"
#include "edmsnl/locate.hpp"
#include "edmsnl/model.hpp"
#include "edmsnl/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace edmsnl;

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kIo = 3 };

json matrixToJson(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrixFromJson(const json& rows) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto c = n ? static_cast<Eigen::Index>(rows[0].size()) : 0;
  Matrix M(n, c);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != c) throw InvalidArgument("ragged matrix");
    for (Eigen::Index j = 0; j < c; ++j) M(i, j) = rows[i][j].get<double>();
  }
  return M;
}

void writeText(const fs::path& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os << text;
  if (!os) throw IoError("write failed for " + path.string());
}

std::string readText(const fs::path& path) {
  std::ifstream is(path);
  if (!is) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void ensureDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

// "1,2,5-7" -> {1,2,5,6,7}
std::vector<std::uint64_t> parseSeeds(const std::string& text) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    if (part.empty()) continue;
    try {
      const auto dash = part.find('-');
      if (dash == std::string::npos) {
        seeds.push_back(std::stoull(part));
      } else {
        const auto lo = std::stoull(part.substr(0, dash));
        const auto hi = std::stoull(part.substr(dash + 1));
        if (hi < lo) throw InvalidArgument("empty seed range " + part);
        for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
      }
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad seed list entry '" + part + "'");
    }
  }
  if (seeds.empty()) throw InvalidArgument("empty seed list");
  return seeds;
}

std::vector<std::vector<int>> loadCliqueFile(const fs::path& path) {
  json j;
  try {
    j = json::parse(readText(path));
  } catch (const json::exception& e) {
    throw InvalidArgument("clique file " + path.string() + ": " + e.what());
  }
  if (j.is_object() && j.contains("cliques")) j = j["cliques"];
  try {
    return j.get<std::vector<std::vector<int>>>();
  } catch (const json::exception& e) {
    throw InvalidArgument("clique file must hold a list of index lists: " + std::string(e.what()));
  }
}

struct SolverFlags {
  double gapTol = SolverConfig{}.gapTol;
  int maxIter = SolverConfig{}.maxIter;
  double sigma = SolverConfig{}.sigma;
  double ftb = SolverConfig{}.ftb;
  double crossoverGap = SolverConfig{}.crossoverGap;

  void attach(CLI::App* app) {
    app->add_option("--gap-tol", gapTol, "Relative gap tolerance")->capture_default_str();
    app->add_option("--max-iter", maxIter, "Iteration limit")->capture_default_str();
    app->add_option("--sigma", sigma, "Centering factor in (0,1)")->capture_default_str();
    app->add_option("--ftb", ftb, "Fraction to boundary in (0,1)")->capture_default_str();
    app->add_option("--crossover-gap", crossoverGap, "Relative gap that starts affine steps")
        ->capture_default_str();
  }
  SolverConfig config() const {
    SolverConfig c;
    c.gapTol = gapTol;
    c.maxIter = maxIter;
    c.sigma = sigma;
    c.ftb = ftb;
    c.crossoverGap = crossoverGap;
    c.validate();
    return c;
  }
};

struct GeneratorFlags {
  GeneratorConfig cfg;

  void attach(CLI::App* app, bool requireN) {
    app->add_option("--r", cfg.r, "Embedding dimension")->capture_default_str();
    auto* n = app->add_option("--n", cfg.n, "Number of sensors");
    if (requireN) {
      n->required();
    } else {
      n->capture_default_str();
    }
    app->add_option("--m", cfg.m, "Number of anchors")->capture_default_str();
    app->add_option("--range", cfg.radioRange, "Radio range")->capture_default_str();
    app->add_option("--density", cfg.density, "Probability of keeping an in-range edge")
        ->capture_default_str();
    app->add_option("--noise", cfg.noiseSigma, "Multiplicative noise sigma on distances")
        ->capture_default_str();
    app->add_option("--half-width", cfg.squareHalfWidth, "Points lie in [-h,h]^r")
        ->capture_default_str();
    app->add_flag("--bounds", cfg.withBounds, "Add radio-range lower bounds on out-of-range pairs");
  }
};

void printSummary(const Instance& inst) {
  int sensorEdges = 0, anchorEdges = 0;
  for (const auto& e : inst.edges) (std::max(e.i, e.j) < inst.n ? sensorEdges : anchorEdges)++;
  const PartialEdm pe = buildPartialEdm(inst);
  std::cout << "instance: r=" << inst.r << " n=" << inst.n << " m=" << inst.m
            << " seed=" << inst.seed << '\n'
            << "  sensor-sensor edges: " << sensorEdges << '\n'
            << "  sensor-anchor edges: " << anchorEdges << '\n'
            << "  upper bounds: " << inst.upperBounds.size()
            << ", lower bounds: " << inst.lowerBounds.size() << '\n'
            << "  connected: " << (isConnected(pe) ? "yes" : "no") << '\n';
}

int statusExit(SolveStatus s) { return s == SolveStatus::Converged ? kOk : kNumerical; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sensor network localization by facial reduction and SDP relaxation"};
  app.require_subcommand(1);

  // generate
  auto* gen = app.add_subcommand("generate", "Write a random instance as JSON");
  GeneratorFlags genFlags;
  genFlags.attach(gen, true);
  std::uint64_t genSeed = 1;
  fs::path genOut = "instance.json";
  gen->add_option("--seed", genSeed, "Random seed")->capture_default_str();
  gen->add_option("--out", genOut, "Output file")->capture_default_str();

  // solve
  auto* sol = app.add_subcommand("solve", "Solve the reduced relaxation of an instance");
  fs::path solInstance, solOut = ".", solCliqueFile;
  std::string solForm = "quadratic", solCliques = "none";
  SolverFlags solFlags;
  sol->add_option("instance", solInstance, "Instance JSON")->required();
  sol->add_option("--form", solForm, "quadratic|linearized")->capture_default_str();
  sol->add_option("--cliques", solCliques, "none|auto|file")->capture_default_str();
  sol->add_option("--clique-file", solCliqueFile, "JSON list of sensor cliques (with --cliques file)");
  sol->add_option("--out", solOut, "Output directory")->capture_default_str();
  solFlags.attach(sol);

  // locate
  auto* loc = app.add_subcommand("locate", "Sensor positions from a solution");
  fs::path locInstance, locSolution, locOut = ".";
  std::string locMethod = "both";
  loc->add_option("instance", locInstance, "Instance JSON")->required();
  loc->add_option("--solution", locSolution, "solution.json written by solve")->required();
  loc->add_option("--method", locMethod, "1|2|both")->capture_default_str();
  loc->add_option("--out", locOut, "Output directory")->capture_default_str();

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a seeded experiment suite");
  GeneratorFlags expGen;
  expGen.attach(exp, false);
  std::string expSuite = "estimate-methods", expSeeds = "1-7", expForm = "quadratic",
              expCliques = "none";
  fs::path expOut = "results";
  int expThreads = 0;
  SolverFlags expFlags;
  exp->add_option("--suite", expSuite, "estimate-methods|compare-barriers|single")
      ->capture_default_str();
  exp->add_option("--seeds", expSeeds, "Seed list, e.g. 1-7 or 1,4,9")->capture_default_str();
  exp->add_option("--form", expForm, "quadratic|linearized")->capture_default_str();
  exp->add_option("--cliques", expCliques, "none|auto")->capture_default_str();
  exp->add_option("--threads", expThreads, "Worker cap (default EDM_SNL_THREADS)");
  exp->add_option("--out", expOut, "Output directory")->capture_default_str();
  expFlags.attach(exp);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen) {
      GeneratorConfig cfg = genFlags.cfg;
      cfg.seed = genSeed;
      const Instance inst = generate(cfg);
      saveInstance(inst, genOut);
      printSummary(inst);
      std::cout << "wrote " << genOut.string() << '\n';
      return kOk;
    }

    if (*sol) {
      const Instance inst = loadInstance(solInstance);
      PipelineConfig pc;
      pc.form = formulationFromString(solForm);
      pc.cliques = cliqueModeFromString(solCliques);
      if (!solCliqueFile.empty()) pc.cliqueList = loadCliqueFile(solCliqueFile);
      pc.solver = solFlags.config();
      const PipelineResult res = runPipeline(inst, pc);
      ensureDir(solOut);
      std::ostringstream trace;
      res.solve.trace.writeCsv(trace);
      writeText(solOut / "trace.csv", trace.str());
      const KktCertificate& c = res.solve.certificate;
      json out = {
          {"status", toString(res.solve.status)},
          {"message", res.solve.message},
          {"form", toString(pc.form)},
          {"iterations", res.solve.iterations},
          {"objective", res.solve.objective},
          {"relgap", res.solve.relgap},
          {"full_order", res.fullOrder},
          {"reduced_order", res.reducedOrder},
          {"cliques_used", res.cliquesUsed},
          {"certificate",
           {{"residual_norm", c.residualNorm},
            {"data_norm", c.dataNorm},
            {"min_su", c.minSu},
            {"min_sl", c.minSl},
            {"min_lambda_u", c.minLambdaU},
            {"min_lambda_l", c.minLambdaL},
            {"min_eig_z", c.minEigZ},
            {"min_eig_dual", c.minEigDual},
            {"holds", c.holds()}}},
          {"ybar", matrixToJson(res.ybar)},
          {"x", matrixToJson(res.X)},
      };
      json skipped = json::array();
      for (const auto& s : res.cliquesSkipped) skipped.push_back({{"nodes", s.nodes}, {"reason", s.reason}});
      out["cliques_skipped"] = skipped;
      writeText(solOut / "solution.json", out.dump(2) + "\n");
      std::cout << "status: " << toString(res.solve.status) << '\n'
                << "iterations: " << res.solve.iterations << '\n'
                << "objective: " << res.solve.objective << '\n'
                << "relative gap: " << res.solve.relgap << '\n'
                << "order: " << res.fullOrder << " -> reduced " << res.reducedOrder << '\n'
                << "cliques used: " << res.cliquesUsed.size()
                << ", skipped: " << res.cliquesSkipped.size() << '\n'
                << "||F_0||: " << c.residualNorm << '\n';
      if (!res.solve.message.empty()) std::cerr << "solver: " << res.solve.message << '\n';
      return statusExit(res.solve.status);
    }

    if (*loc) {
      const Instance inst = loadInstance(locInstance);
      json sj;
      try {
        sj = json::parse(readText(locSolution));
      } catch (const json::exception& e) {
        throw InvalidArgument("solution file: " + std::string(e.what()));
      }
      if (!sj.contains("ybar")) throw InvalidArgument("solution file has no ybar");
      const Matrix ybar = matrixFromJson(sj["ybar"]);
      if (ybar.rows() != inst.nodeCount()) throw InvalidArgument("solution does not match instance");
      const PartialEdm pe = buildPartialEdm(inst);
      std::vector<int> methods;
      if (locMethod == "1" || locMethod == "both") methods.push_back(1);
      if (locMethod == "2" || locMethod == "both") methods.push_back(2);
      if (methods.empty()) throw InvalidArgument("--method must be 1, 2 or both");
      ensureDir(locOut);
      std::vector<ResultRow> rows;
      for (int method : methods) {
        const LocalizationResult r = locate(method, ybar, inst.anchors, pe, inst.xTrue);
        rows.push_back({locInstance.stem().string(), method, r.measures});
        const Matrix world = translateBack(r.X, inst.translation);
        std::ostringstream pos;
        pos.precision(17);
        pos << "sensor";
        for (int k = 0; k < inst.r; ++k) pos << ",x" << k + 1;
        pos << '\n';
        for (Eigen::Index i = 0; i < world.rows(); ++i) {
          pos << i;
          for (Eigen::Index k = 0; k < world.cols(); ++k) pos << ',' << world(i, k);
          pos << '\n';
        }
        writeText(locOut / ("positions_method" + std::to_string(method) + ".csv"), pos.str());
      }
      std::ostringstream csv;
      writeResultsCsv(csv, rows);
      writeText(locOut / "results.csv", csv.str());
      std::cout << csv.str();
      return kOk;
    }

    if (*exp) {
      ExperimentConfig cfg;
      cfg.suite = suiteFromString(expSuite);
      cfg.gen = expGen.cfg;
      cfg.seeds = parseSeeds(expSeeds);
      cfg.pipeline.form = formulationFromString(expForm);
      cfg.pipeline.cliques = cliqueModeFromString(expCliques);
      if (cfg.pipeline.cliques == CliqueMode::File) {
        throw InvalidArgument("experiment supports --cliques none|auto");
      }
      cfg.pipeline.solver = expFlags.config();
      cfg.outDir = expOut;
      cfg.threads = expThreads;
      const ExperimentReport report = runExperiment(cfg);
      int failed = 0;
      for (const auto& r : report.methods) failed += r.ok ? 0 : 1;
      for (const auto& r : report.barriers) failed += r.ok ? 0 : 1;
      if (cfg.suite == Suite::CompareBarriers) {
        std::cout << readText(expOut / "barrier_summary.csv");
      } else {
        for (int k = 1; k <= 3; ++k) {
          std::cout << "Measure " << k << '\n'
                    << readText(expOut / ("measure" + std::to_string(k) + ".csv"));
        }
      }
      std::cout << "seeds: " << cfg.seeds.size() << ", failed: " << failed << '\n'
                << "wrote " << expOut.string() << '\n';
      return failed ? kNumerical : kOk;
    }
  } catch (const InvalidArgument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kIo;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumerical;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNumerical;
  }
  return kUsage;
}
