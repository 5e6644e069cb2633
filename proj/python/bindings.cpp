#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "edmsnl/experiment.hpp"

namespace py = pybind11;
using namespace edmsnl;

namespace {

py::dict certificateDict(const KktCertificate& c) {
  py::dict d;
  d["residual_norm"] = c.residualNorm;
  d["data_norm"] = c.dataNorm;
  d["min_su"] = c.minSu;
  d["min_sl"] = c.minSl;
  d["min_lambda_u"] = c.minLambdaU;
  d["min_lambda_l"] = c.minLambdaL;
  d["min_eig_z"] = c.minEigZ;
  d["min_eig_dual"] = c.minEigDual;
  d["holds"] = c.holds();
  return d;
}

py::list traceList(const IterationTrace& t) {
  py::list out;
  for (const auto& r : t.records) {
    py::dict d;
    d["iter"] = r.iter;
    d["objective"] = r.objective;
    d["relgap"] = r.relgap;
    d["norm_fu"] = r.normFu;
    d["norm_fl"] = r.normFl;
    d["norm_fc"] = r.normFc;
    d["norm_fs"] = r.normFs;
    d["alpha"] = r.alpha;
    d["mu"] = r.mu;
    d["mode"] = toString(r.mode);
    out.append(d);
  }
  return out;
}

py::dict measuresDict(const Measures& m) {
  py::dict d;
  d["m1"] = m.m1;
  d["m2"] = m.m2 ? py::cast(*m.m2) : py::none();
  d["m3"] = m.m3;
  return d;
}

SolverConfig solverConfig(double gapTol, int maxIter, double sigma, double ftb, double crossoverGap) {
  SolverConfig c;
  c.gapTol = gapTol;
  c.maxIter = maxIter;
  c.sigma = sigma;
  c.ftb = ftb;
  c.crossoverGap = crossoverGap;
  return c;
}

}  // namespace

PYBIND11_MODULE(_edmsnl, m) {
  m.doc() = "Sensor network localization by facial reduction and SDP relaxation";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(m, "IoError", PyExc_OSError);

  m.def("k_op", &kOp, "K(B) = diag(B)e' + e diag(B)' - 2B");
  m.def("k_adj", &kAdj);
  m.def("k_dagger", &kDagger);
  m.def("svec", &svec);
  m.def("smat", &sMat);

  py::class_<Instance>(m, "Instance")
      .def_readonly("r", &Instance::r)
      .def_readonly("n", &Instance::n)
      .def_readonly("m", &Instance::m)
      .def_readonly("seed", &Instance::seed)
      .def_readonly("anchors", &Instance::anchors)
      .def_readonly("translation", &Instance::translation)
      .def_readonly("radio_range", &Instance::radioRange)
      .def_property_readonly("x_true", [](const Instance& i) -> py::object {
        return i.xTrue ? py::cast(*i.xTrue) : py::none();
      })
      .def_property_readonly("edges", [](const Instance& i) {
        std::vector<std::tuple<int, int, double>> out;
        for (const auto& e : i.edges) out.emplace_back(e.i, e.j, e.value);
        return out;
      })
      .def_property("cliques", [](const Instance& i) { return i.cliques; },
                    [](Instance& i, std::vector<std::vector<int>> c) { i.cliques = std::move(c); })
      .def("to_json", &instanceToJson)
      .def_static("from_json", &instanceFromJson)
      .def("save", [](const Instance& i, const std::filesystem::path& p) { saveInstance(i, p); })
      .def_static("load", &loadInstance)
      .def("__repr__", [](const Instance& i) {
        return "<Instance r=" + std::to_string(i.r) + " n=" + std::to_string(i.n) + " m=" + std::to_string(i.m) +
               " edges=" + std::to_string(i.edges.size()) + ">";
      });

  m.def(
      "generate",
      [](int n, int m, int r, double radioRange, double density, double noise, double halfWidth, std::uint64_t seed,
         bool bounds) {
        GeneratorConfig g;
        g.n = n;
        g.m = m;
        g.r = r;
        g.radioRange = radioRange;
        g.density = density;
        g.noiseSigma = noise;
        g.squareHalfWidth = halfWidth;
        g.seed = seed;
        g.withBounds = bounds;
        return generate(g);
      },
      py::arg("n"), py::arg("m") = 5, py::arg("r") = 2, py::arg("radio_range") = 0.15, py::arg("density") = 0.75,
      py::arg("noise") = 0.0, py::arg("half_width") = 1.0, py::arg("seed") = 1, py::arg("bounds") = false);

  m.def(
      "clique_face",
      [](const Matrix& E2, int r) {
        const CliqueFace f = cliqueFace(E2, r);
        py::dict d;
        d["U2"] = f.U2;
        d["rank"] = f.rank;
        d["eigenvalues"] = f.eigenvalues;
        return d;
      },
      py::arg("E2"), py::arg("r"));

  m.def(
      "solve",
      [](const Instance& inst, const std::string& form, const std::string& cliques, double gapTol, int maxIter,
         double sigma, double ftb, double crossoverGap) {
        PipelineConfig cfg;
        cfg.form = formulationFromString(form);
        cfg.cliques = cliqueModeFromString(cliques);
        cfg.solver = solverConfig(gapTol, maxIter, sigma, ftb, crossoverGap);
        PipelineResult res;
        {
          py::gil_scoped_release release;
          res = runPipeline(inst, cfg);
        }
        py::dict d;
        d["status"] = toString(res.solve.status);
        d["message"] = res.solve.message;
        d["iterations"] = res.solve.iterations;
        d["objective"] = res.solve.objective;
        d["relgap"] = res.solve.relgap;
        d["ybar"] = res.ybar;
        d["X"] = res.X;
        d["full_order"] = res.fullOrder;
        d["reduced_order"] = res.reducedOrder;
        d["cliques_used"] = res.cliquesUsed;
        d["certificate"] = certificateDict(res.solve.certificate);
        d["trace"] = traceList(res.solve.trace);
        return d;
      },
      py::arg("instance"), py::arg("form") = "quadratic", py::arg("cliques") = "none",
      py::arg("gap_tol") = SolverConfig{}.gapTol, py::arg("max_iter") = SolverConfig{}.maxIter,
      py::arg("sigma") = SolverConfig{}.sigma, py::arg("ftb") = SolverConfig{}.ftb,
      py::arg("crossover_gap") = SolverConfig{}.crossoverGap);

  m.def(
      "locate",
      [](const Instance& inst, const Matrix& ybar, int method) {
        const PartialEdm pe = buildPartialEdm(inst);
        const LocalizationResult res = locate(method, ybar, inst.anchors, pe, inst.xTrue);
        py::dict d;
        d["X"] = res.X;
        d["anchors"] = res.anchorsEst;
        d["measures"] = measuresDict(res.measures);
        return d;
      },
      py::arg("instance"), py::arg("ybar"), py::arg("method") = 2);

  m.def(
      "compare_methods",
      [](const std::vector<std::uint64_t>& seeds, int n, int m, double noise, double halfWidth, int threads) {
        ExperimentConfig cfg;
        cfg.suite = Suite::EstimateMethods;
        cfg.gen.n = n;
        cfg.gen.m = m;
        cfg.gen.noiseSigma = noise;
        cfg.gen.squareHalfWidth = halfWidth;
        cfg.seeds = seeds;
        cfg.threads = threads;
        ExperimentReport rep;
        {
          py::gil_scoped_release release;
          rep = runExperiment(cfg);
        }
        py::list rows;
        for (const auto& r : rep.methods) {
          py::dict d;
          d["seed"] = r.seed;
          d["ok"] = r.ok;
          d["error"] = r.error;
          d["method1"] = measuresDict(r.method1);
          d["method2"] = measuresDict(r.method2);
          d["difference"] = r.difference;
          rows.append(d);
        }
        return rows;
      },
      py::arg("seeds"), py::arg("n") = 16, py::arg("m") = 5, py::arg("noise") = 0.05, py::arg("half_width") = 0.1,
      py::arg("threads") = 0);
}
