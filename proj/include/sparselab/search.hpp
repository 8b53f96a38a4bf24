#pragma once

// Hill climbing over (sparse family, f, w) for large weak-type ratios.

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "sparselab/dyadic.hpp"
#include "sparselab/orlicz.hpp"
#include "sparselab/parallel.hpp"
#include "sparselab/sparse.hpp"
#include "sparselab/weights.hpp"

namespace sparselab {

struct SearchInstance {
  SparseFamily family;
  StepFunction f;
  Weight w;

  /// Family {[0,1)}, f = 1, w = 1.
  [[nodiscard]] static SearchInstance trivial(const DyadicGrid& grid);
  /// Cubes [0,2^-3k) for 3k <= depth, f = point mass on cell 0, w = 1.
  [[nodiscard]] static SearchInstance chain(const DyadicGrid& grid);
};

enum class ObjectiveKind { RatioOrlicz, RatioPlain, Square };

class Objective {
 public:
  /// weakTypeRatio with majorant M_{phi(L)} w (no c_phi factor).
  [[nodiscard]] static Objective ratioOrlicz(YoungFunction phi);
  /// weakTypeRatio with majorant Mw.
  [[nodiscard]] static Objective ratioPlain();
  /// weakNorm(Sf, w, p) / (C_p(w) ||f||_{L^p(w)}).
  [[nodiscard]] static Objective square(double p);
  /// "ratio-orlicz", "ratio-plain" or "square"; phi and p fill in the parameters.
  [[nodiscard]] static Objective parse(std::string_view kind, const YoungFunction& phi, double p);

  [[nodiscard]] ObjectiveKind kind() const noexcept { return kind_; }
  [[nodiscard]] std::string spec() const;
  [[nodiscard]] double operator()(const SearchInstance& instance) const;

 private:
  Objective(ObjectiveKind kind, std::optional<YoungFunction> phi, double p)
      : kind_(kind), phi_(std::move(phi)), p_(p) {}

  ObjectiveKind kind_;
  std::optional<YoungFunction> phi_;
  double p_ = 2.0;
};

struct SearchConfig {
  /// Standard deviation of log(factor) for block scaling.
  double sigma = 0.7;
  /// Probability that a move toggles a cube instead of scaling a block.
  double toggleProbability = 0.3;
  /// Independent chains; the best one is returned.
  int restarts = 1;
  /// Unconditional random moves applied to the seed instance before chains r >= 1 climb.
  int scramble = 24;
};

struct SearchState {
  SearchInstance current;
  double value = 0.0;
  SearchInstance best;
  double bestValue = 0.0;
  std::size_t iterations = 0;
  std::size_t accepted = 0;
  std::uint64_t seed = 0;
  std::string rngState;
  /// Best-so-far after each iteration (index 0 is the seed instance).
  std::vector<double> trace;
};

/// Throws DomainError when the instance is not sparse or the objective is undefined on it.
void validateInstance(const SearchInstance& instance, const Objective& objective);

/// One chain: propose a move, accept iff the objective strictly improves.
/// `onAccept` (if set) sees the seed instance, then every accepted instance.
[[nodiscard]] SearchState hillClimb(const Objective& objective, const SearchInstance& seedInstance, std::size_t iters,
                                    std::uint64_t seed, const SearchConfig& config = {},
                                    const std::function<void(const SearchInstance&, double)>& onAccept = {});

/// Random walk of `moves` valid proposals, taken regardless of the objective.
[[nodiscard]] SearchInstance scrambled(const SearchInstance& instance, int moves, std::uint64_t seed,
                                       const SearchConfig& config = {});

/// config.restarts chains with seeds deriveSeed(seed, r). Chain 0 climbs from
/// the seed instance, chain r >= 1 from scrambled(seed instance). The highest
/// best value wins, ties going to the lower r. `onAccept` is called from the
/// executor's threads.
[[nodiscard]] SearchState searchWithRestarts(const Objective& objective, const SearchInstance& seedInstance,
                                             std::size_t iters, std::uint64_t seed, const SearchConfig& config = {},
                                             const Executor& executor = serialExecutor(),
                                             const std::function<void(const SearchInstance&, double)>& onAccept = {});

/// {"family":..,"f":..,"w":..,"objective":..,"value":..,"seed":..,"config_hash":..}
[[nodiscard]] std::string witnessJson(const SearchInstance& instance, const Objective& objective, double value,
                                      std::uint64_t seed, const std::string& configHash);

struct WitnessRecord {
  SearchInstance instance;
  std::string objective;
  double value = 0.0;
  std::uint64_t seed = 0;
  std::string configHash;
};

[[nodiscard]] WitnessRecord witnessFromJson(std::string_view text);

struct ProbeRow {
  int depth = 0;
  double plainBest = 0.0;
  /// Max over the accepted instances of the plain chain of ratioOrlicz(LLogEps(1/2)).
  double orliczBest = 0.0;
  /// The accepted instance attaining orliczBest.
  std::optional<SearchInstance> orliczArgmax;
};

/// For each depth, searchWithRestarts on ratioPlain from the trivial instance,
/// evaluating the Orlicz ratio on the same accepted instances. Depths run
/// concurrently; the chains of one depth run in order.
[[nodiscard]] std::vector<ProbeRow> mwProbe(const std::vector<int>& depths, std::size_t itersPerDepth,
                                            std::uint64_t seed, const SearchConfig& config = {},
                                            const Executor& executor = serialExecutor());

}  // namespace sparselab
