#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "edmsnl/model.hpp"
#include "json.hpp"

namespace edmsnl {

using nlohmann::json;

namespace {

json matrixToJson(const Matrix& M) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrixFromJson(const json& j, Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows) {
    throw InvalidArgument(std::string(what) + ": expected " + std::to_string(rows) + " rows");
  }
  Matrix M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) {
      throw InvalidArgument(std::string(what) + ": row " + std::to_string(i) + " must have " +
                            std::to_string(cols) + " entries");
    }
    for (Eigen::Index k = 0; k < cols; ++k) M(i, k) = row[k].get<double>();
  }
  return M;
}

json edgesToJson(const std::vector<MeasuredEdge>& edges) {
  json out = json::array();
  for (const auto& e : edges) out.push_back(json::array({e.i, e.j, e.value}));
  return out;
}

std::vector<MeasuredEdge> edgesFromJson(const json& j, const char* what) {
  std::vector<MeasuredEdge> out;
  if (j.is_null()) return out;
  if (!j.is_array()) throw InvalidArgument(std::string(what) + ": expected an array");
  for (const auto& e : j) {
    if (!e.is_array() || e.size() != 3) {
      throw InvalidArgument(std::string(what) + ": entries must be [i, j, squared_distance]");
    }
    out.push_back({e[0].get<int>(), e[1].get<int>(), e[2].get<double>()});
  }
  return out;
}

const json& require(const json& doc, const char* key) {
  auto it = doc.find(key);
  if (it == doc.end()) throw InvalidArgument(std::string("missing field '") + key + "'");
  return *it;
}

double finiteOrInf(const json& j) {
  return j.is_null() ? std::numeric_limits<double>::infinity() : j.get<double>();
}

}  // namespace

std::string instanceToJson(const Instance& inst) {
  json doc;
  doc["format_version"] = kInstanceFormatVersion;
  doc["r"] = inst.r;
  doc["n"] = inst.n;
  doc["m"] = inst.m;
  doc["anchors"] = matrixToJson(inst.anchors);
  doc["sensors"] = inst.xTrue ? matrixToJson(*inst.xTrue) : json(nullptr);
  doc["translation"] = std::vector<double>(inst.translation.begin(), inst.translation.end());
  // JSON has no infinity; an unlimited range is written as null.
  doc["radio_range"] = std::isfinite(inst.radioRange) ? json(inst.radioRange) : json(nullptr);
  doc["density"] = inst.density;
  doc["noise_sigma"] = inst.noiseSigma;
  doc["square_half_width"] = inst.squareHalfWidth;
  doc["seed"] = inst.seed;
  doc["edges"] = edgesToJson(inst.edges);
  doc["upper_bounds"] = edgesToJson(inst.upperBounds);
  doc["lower_bounds"] = edgesToJson(inst.lowerBounds);
  doc["cliques"] = inst.cliques;
  return doc.dump(1);
}

Instance instanceFromJson(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InvalidArgument(std::string("malformed instance JSON: ") + e.what());
  }
  if (!doc.is_object()) throw InvalidArgument("instance JSON must be an object");
  try {
    const int version = require(doc, "format_version").get<int>();
    if (version != kInstanceFormatVersion) {
      throw InvalidArgument("unsupported format_version " + std::to_string(version) +
                            " (expected " + std::to_string(kInstanceFormatVersion) + ")");
    }
    Instance inst;
    inst.r = require(doc, "r").get<int>();
    inst.n = require(doc, "n").get<int>();
    inst.m = require(doc, "m").get<int>();
    if (inst.r < 1 || inst.n < 1 || inst.m < 1) throw InvalidArgument("r, n, m must be positive");
    inst.anchors = matrixFromJson(require(doc, "anchors"), inst.m, inst.r, "anchors");
    if (const auto it = doc.find("sensors"); it != doc.end() && !it->is_null()) {
      inst.xTrue = matrixFromJson(*it, inst.n, inst.r, "sensors");
    }
    const auto t = require(doc, "translation").get<std::vector<double>>();
    inst.translation = Eigen::Map<const Vector>(t.data(), static_cast<Eigen::Index>(t.size()));
    inst.radioRange = finiteOrInf(doc.value("radio_range", json(nullptr)));
    inst.density = doc.value("density", 1.0);
    inst.noiseSigma = doc.value("noise_sigma", 0.0);
    inst.squareHalfWidth = doc.value("square_half_width", 0.0);
    inst.seed = doc.value("seed", std::uint64_t{0});
    inst.edges = edgesFromJson(require(doc, "edges"), "edges");
    inst.upperBounds = edgesFromJson(doc.value("upper_bounds", json(nullptr)), "upper_bounds");
    inst.lowerBounds = edgesFromJson(doc.value("lower_bounds", json(nullptr)), "lower_bounds");
    if (const auto it = doc.find("cliques"); it != doc.end() && !it->is_null()) {
      inst.cliques = it->get<std::vector<std::vector<int>>>();
    }
    inst.validate();
    return inst;
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("instance JSON has a field of the wrong type: ") + e.what());
  }
}

void saveInstance(const Instance& inst, const std::filesystem::path& path) {
  inst.validate();
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << instanceToJson(inst) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

Instance loadInstance(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return instanceFromJson(buf.str());
}

void exportEdmCsv(const PartialEdm& pe, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.precision(17);
  for (Eigen::Index i = 0; i < pe.E.rows(); ++i) {
    for (Eigen::Index j = 0; j < pe.E.cols(); ++j) {
      if (j) out << ',';
      out << pe.E(i, j);
    }
    out << '\n';
  }
}

}  // namespace edmsnl
