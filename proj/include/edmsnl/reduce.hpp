#pragma once

// Facial reduction: congruence matrices that restrict the Gram matrix to the
// minimal face fixed by the anchor clique and by declared sensor cliques.

#include <vector>

#include "edmsnl/model.hpp"

namespace edmsnl {

enum class CliqueKind { Anchor, Sensor };

struct CliqueSpec {
  std::vector<int> nodes;
  CliqueKind kind = CliqueKind::Sensor;

  bool operator==(const CliqueSpec&) const = default;
};

enum class TerminalForm {
  S,  // terminal block U from A = U Sigma V', constraint Z_kk = Sigma^2
  A,  // terminal block A, constraint Z_kk = I
};

struct AnchorFace {
  Matrix U;      // m x r, orthonormal columns
  Vector sigma;  // r singular values, descending
  Matrix V;      // r x r
};

/// Compact SVD of the (centered, full column rank) anchor matrix.
AnchorFace anchorFace(const Matrix& anchors);

struct CliqueFace {
  Matrix U2;  // p x r2, orthonormal columns spanning range(B + 2ee')
  int rank = 0;
  Matrix B;           // K^dagger(E2)
  Matrix Bhat;        // B + 2ee'
  Vector eigenvalues; // of Bhat, descending
};

/// Face of a clique with complete squared-distance block E2. Throws
/// NumericalError when E2 is not an EDM or is not realizable in dimension r.
CliqueFace cliqueFace(const Matrix& E2, int r);

/// Block-diagonal congruence I_free (+) U_2 (+) ... (+) U_k (+) terminal.
struct FaceBasis {
  std::vector<Matrix> blocks;
  TerminalForm terminal = TerminalForm::A;
  Vector sigma;  // singular values of A
  Matrix V;      // right singular vectors of A
  int freeSensors = 0;

  int totalRows() const;
  int reducedOrder() const;
  /// Columns belonging to sensors (reduced order minus r).
  int sensorOrder() const;
  int r() const { return static_cast<int>(sigma.size()); }
  int sensorRows() const;

  Matrix assembled() const;
  /// The n x N sensor part (all blocks but the terminal one).
  Matrix sensorBlock() const;
  const Matrix& terminalBlock() const { return blocks.back(); }
  /// F Z F'.
  Matrix lift(const Matrix& Z) const;
  /// Required value of the terminal diagonal block of Z.
  Matrix terminalConstraint() const;
};

FaceBasis composeFace(int freeSensors, const std::vector<Matrix>& cliqueBlocks,
                      const Matrix& anchors, TerminalForm form = TerminalForm::A);

/// Carries an A-form reduced matrix to the equivalent S-form one.
Matrix transportToSForm(const Matrix& zA, const FaceBasis& face);

/// Symmetric relabeling of nodes: position k of the new order holds old node
/// order[k].
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<int> order);
  static Permutation identity(int size);

  int size() const { return static_cast<int>(order_.size()); }
  const std::vector<int>& order() const { return order_; }
  int oldIndex(int newIndex) const { return order_[newIndex]; }
  int newIndex(int oldIndex) const { return inverse_[oldIndex]; }
  bool isIdentity() const;

  /// S_new(a,b) = S_old(order[a], order[b]).
  Matrix apply(const Matrix& S) const;
  Matrix invert(const Matrix& S) const;
  Matrix applyRows(const Matrix& M) const;
  Matrix invertRows(const Matrix& M) const;

 private:
  std::vector<int> order_;
  std::vector<int> inverse_;
};

struct PermutedProblem {
  PartialEdm pe;
  Permutation perm;
  std::vector<CliqueSpec> cliques;  // node indices in the new order
  int freeSensors = 0;
};

/// Free sensors first, then each clique contiguously, anchors last.
PermutedProblem permuteForCliques(const PartialEdm& pe, const std::vector<CliqueSpec>& cliques);

/// Greedy disjoint cliques of the known sensor-sensor graph, each of size
/// >= minSize. Deterministic for a fixed input.
std::vector<CliqueSpec> findSensorCliques(const PartialEdm& pe, int minSize);

/// True when every pair of `nodes` has a known distance.
bool isClique(const PartialEdm& pe, const std::vector<int>& nodes);

}  // namespace edmsnl
