#pragma once

// Problem data: instances with (optional) ground truth, the partial EDM built
// from them, and the random instance generator.
//
// Node numbering: sensors are 0..n-1, anchors are n..n+m-1.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "edmsnl/edm_core.hpp"

namespace edmsnl {

inline constexpr int kInstanceFormatVersion = 1;

struct MeasuredEdge {
  int i = 0;
  int j = 0;
  double value = 0.0;  // squared distance (or squared bound)

  bool operator==(const MeasuredEdge&) const = default;
};

struct Instance {
  int r = 0;
  int n = 0;
  int m = 0;
  std::optional<Matrix> xTrue;  // n x r, centered frame
  Matrix anchors;               // m x r, centered (A'e = 0)
  Vector translation;           // shift removed by centering
  double radioRange = 0.0;
  double density = 1.0;
  double noiseSigma = 0.0;
  double squareHalfWidth = 0.0;
  std::uint64_t seed = 0;
  std::vector<MeasuredEdge> edges;  // sensor-sensor and sensor-anchor
  std::vector<MeasuredEdge> upperBounds;
  std::vector<MeasuredEdge> lowerBounds;
  std::vector<std::vector<int>> cliques;  // optional user-declared sensor cliques

  int nodeCount() const { return n + m; }
  /// Stacked configuration P = [X; A] (requires ground truth).
  Matrix configuration() const;
  /// Throws InvalidArgument when an invariant is violated.
  void validate() const;
};

struct GeneratorConfig {
  int r = 2;
  int n = 16;
  int m = 5;
  double radioRange = 0.15;
  double density = 0.75;
  double noiseSigma = 0.0;
  double squareHalfWidth = 1.0;
  std::uint64_t seed = 1;
  /// Adds lower bounds range^2 on out-of-range pairs. Upper bounds range^2 on
  /// measured edges are not generated: with them no start Y = beta I is
  /// strictly feasible.
  bool withBounds = false;
  int maxAttempts = 1000;
};

/// Random instance: uniform points in [-h,h]^r, the last m become anchors,
/// in-range pairs are kept with probability `density`, resampled with seed+1
/// until the graph (anchor clique included) is connected. The returned seed is
/// the one that produced the instance.
Instance generate(const GeneratorConfig& cfg);

struct Centered {
  Matrix anchors;
  Matrix sensors;
  Vector translation;
};

/// Shifts anchors and sensors by the anchor centroid.
Centered centerAnchors(const Matrix& anchorsRaw, const Matrix& sensorsRaw);

/// Adds the recorded translation row-wise.
Matrix translateBack(const Matrix& points, const Vector& translation);

struct PartialEdm {
  int n = 0;
  int m = 0;
  Matrix E;   // squared distances, 0 where unknown
  Matrix W;   // weights, positive on known entries
  Matrix Hu;  // 0/1 upper-bound pattern
  Matrix Hl;  // 0/1 lower-bound pattern
  Matrix Ub;
  Matrix Lb;
  std::vector<std::pair<int, int>> sensorEdges;   // N_e
  std::vector<std::pair<int, int>> anchorEdges;   // M_e (sensor, anchor node)
  std::vector<std::pair<int, int>> upperSensor;   // N_u
  std::vector<std::pair<int, int>> upperAnchor;   // M_u
  std::vector<std::pair<int, int>> lowerSensor;   // N_l
  std::vector<std::pair<int, int>> lowerAnchor;   // M_l

  int nodeCount() const { return n + m; }
  /// True when (i,j) carries a measured or anchor-anchor distance.
  bool known(int i, int j) const { return W(i, j) > 0.0; }
};

PartialEdm buildPartialEdm(const Instance& inst);

struct DerivedConstants {
  Matrix Ebar;  // W o (E - K(sBlk2(AA')))
  Matrix Ubar;  // Hu o (Ub - K(sBlk2(AA')))
  Matrix Lbar;  // Hl o (Lb - K(sBlk2(AA')))
};

DerivedConstants deriveConstants(const PartialEdm& pe, const Matrix& anchors);

/// Breadth-first connectivity of the known-distance graph (anchor clique included).
bool isConnected(const PartialEdm& pe);

// --- I/O ------------------------------------------------------------------

std::string instanceToJson(const Instance& inst);
Instance instanceFromJson(const std::string& text);
void saveInstance(const Instance& inst, const std::filesystem::path& path);
Instance loadInstance(const std::filesystem::path& path);
/// Full E matrix as CSV (n+m rows).
void exportEdmCsv(const PartialEdm& pe, const std::filesystem::path& path);

}  // namespace edmsnl
