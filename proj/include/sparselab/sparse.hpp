#pragma once

// Sparse families of dyadic cubes, sparse operators and square functions, and
// the band, layer and exceptional-set decompositions built on them.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparselab/dyadic.hpp"

namespace sparselab {

inline constexpr double kSparsity = 0.125;

/// A set of dyadic cubes, kept sorted by heap position (ancestors first),
/// together with its containment forest.
class SparseFamily {
 public:
  SparseFamily(DyadicGrid grid, std::vector<Cube> cubes, double eta = kSparsity);

  [[nodiscard]] const DyadicGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] double eta() const noexcept { return eta_; }
  [[nodiscard]] const std::vector<Cube>& cubes() const noexcept { return cubes_; }
  [[nodiscard]] std::size_t size() const noexcept { return cubes_.size(); }
  [[nodiscard]] bool empty() const noexcept { return cubes_.empty(); }
  [[nodiscard]] const Cube& operator[](std::size_t i) const noexcept { return cubes_[i]; }
  /// Position of q in cubes(), if present.
  [[nodiscard]] std::optional<std::size_t> find(const Cube& q) const;
  [[nodiscard]] bool contains(const Cube& q) const { return find(q).has_value(); }
  /// Index of the smallest member strictly containing cube i, or -1.
  [[nodiscard]] long parent(std::size_t i) const noexcept { return parent_[i]; }
  [[nodiscard]] const std::vector<std::size_t>& children(std::size_t i) const noexcept { return children_[i]; }

  [[nodiscard]] SparseFamily with(const Cube& q) const;
  [[nodiscard]] SparseFamily without(const Cube& q) const;

  bool operator==(const SparseFamily& other) const { return grid_ == other.grid_ && cubes_ == other.cubes_; }

 private:
  DyadicGrid grid_;
  double eta_;
  std::vector<Cube> cubes_;
  std::vector<long> parent_;
  std::vector<std::vector<std::size_t>> children_;
};

struct SparsityCertificate {
  bool pass = true;
  double eta = kSparsity;
  /// |union of strict descendants| / |Q| for each cube, in family order.
  std::vector<double> fractions;
  double worstFraction = 0.0;
  std::optional<Cube> worstCube;
};

/// Exact check of |union{Q' in S : Q' strictly inside Q}| <= eta |Q|.
[[nodiscard]] SparsityCertificate validateSparsity(const SparseFamily& family);
[[nodiscard]] SparsityCertificate validateSparsity(const SparseFamily& family, double eta);

// ---- generation ----

/// Keeps each candidate, deepest first, unless the kept cubes strictly inside
/// it already cover more than eta of it.
[[nodiscard]] SparseFamily pruneToSparse(const DyadicGrid& grid, std::vector<Cube> candidates, double eta = kSparsity);
/// Calderon-Zygmund stopping cubes from [0,1): the maximal subcubes whose
/// average exceeds ratio times the average of the current stopping cube, then pruned.
[[nodiscard]] SparseFamily stoppingCubes(const StepFunction& f, double ratio, double eta = kSparsity);
/// [0,1) plus every other cube independently with probability `density`, then pruned.
[[nodiscard]] SparseFamily randomPruned(const DyadicGrid& grid, double density, std::uint64_t seed,
                                        double eta = kSparsity);
/// Cubes containing the point x at levels top, top + step, ..., <= bottom.
[[nodiscard]] SparseFamily chainFamily(const DyadicGrid& grid, double x, int step, int top, int bottom);

/// "stopping:ratio=r", "random:density=d", "chain:x=..,step=..,top=..,bottom=..",
/// "single" ({[0,1)}) or "empty". `f` feeds the stopping strategy.
[[nodiscard]] SparseFamily generateSparse(const DyadicGrid& grid, std::string_view spec, const StepFunction& f,
                                          std::uint64_t seed);

// ---- operators ----

/// Tf = sum_Q <f>_Q 1_Q.
[[nodiscard]] StepFunction applySparse(const SparseFamily& family, const StepFunction& f);
/// Sf = (sum_Q <f>_Q^2 1_Q)^{1/2}.
[[nodiscard]] StepFunction applySparseSquare(const SparseFamily& family, const StepFunction& f);
/// sum over the listed members of <f>_Q^2 1_Q (no square root).
[[nodiscard]] StepFunction sparseSquareSum(const SparseFamily& family, const std::vector<std::size_t>& members,
                                           const CubeSums& sums);
/// sum over the listed members of <f>_Q 1_Q.
[[nodiscard]] StepFunction sparseSum(const SparseFamily& family, const std::vector<std::size_t>& members,
                                     const CubeSums& sums);

// ---- decompositions ----

/// Band index i with base^{-i-1} < a <= base^{-i}, computed exactly from the
/// binary exponent of a > 0. base must be 2 or 4.
[[nodiscard]] int averageBand(double a, int base);

struct AverageBand {
  int index = 0;
  std::vector<std::size_t> members;  ///< positions in the family
};

struct AverageSplit {
  int base = 2;
  std::vector<AverageBand> bands;  ///< ascending index
  std::vector<std::size_t> zeroAverage;
};

[[nodiscard]] AverageSplit splitByAverage(const SparseFamily& family, const StepFunction& f, int base);
[[nodiscard]] AverageSplit splitByAverage(const SparseFamily& family, const CubeSums& sums, int base);

/// A subfamily peeled into layers of maximal cubes, with the exceptional sets
/// E_Q = Q minus the next-layer cubes inside Q.
struct LayeredFamily {
  SparseFamily family;
  std::vector<std::size_t> source;  ///< member positions in the parent family
  std::vector<int> layer;           ///< number of strict ancestors within the subfamily
  std::vector<std::vector<std::size_t>> layers;
  std::vector<CellSet> exceptional;

  [[nodiscard]] int layerCount() const noexcept { return static_cast<int>(layers.size()); }
};

[[nodiscard]] LayeredFamily layerDecompose(const SparseFamily& parent, const std::vector<std::size_t>& members);

/// Q_u: union of the layer-(v+u) cubes inside member i (which has layer v); u >= 1.
[[nodiscard]] CellSet deepDescendantSet(const LayeredFamily& layered, std::size_t i, int u);
/// Position of the member inside i that is exactly u layers below and contains `cell`, if any.
[[nodiscard]] std::optional<std::size_t> descendantAt(const LayeredFamily& layered, std::size_t i, int u,
                                                      std::size_t cell);

struct PowerBand {
  int m = 0;
  LayeredFamily layered;
  /// b_m = sum_{Q in S_m} 1_Q, integer valued.
  StepFunction count;
  /// B_m = union of the maximal cubes of S_m.
  CellSet support;
};

struct PowerFamily {
  std::vector<PowerBand> bands;  ///< ascending m
  std::vector<std::size_t> zeroAverage;
};

[[nodiscard]] PowerFamily powerDecompose(const SparseFamily& family, const StepFunction& f);

// ---- serialization ----

/// {"depth":N,"eta":e,"cubes":[{"level":j,"index":i},...]}.
[[nodiscard]] std::string sparseFamilyToJson(const SparseFamily& family);
[[nodiscard]] SparseFamily sparseFamilyFromJson(std::string_view text);
/// Base-4 bands as a tree: {"bands":[{"k":..,"layers":[{"v":..,"cubes":[{"level","index","E"}]}]}]},
/// with E the exceptional set as a cell hex mask.
[[nodiscard]] std::string decompositionToJson(const SparseFamily& family, const StepFunction& f);

}  // namespace sparselab
