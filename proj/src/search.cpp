#include "sparselab/search.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/io.hpp"
#include "sparselab/random.hpp"
#include "sparselab/spec_parse.hpp"
#include "sparselab/verify.hpp"

namespace sparselab {

SearchInstance SearchInstance::trivial(const DyadicGrid& grid) {
  return {SparseFamily(grid, {Cube::root()}), StepFunction::constant(grid, 1.0),
          Weight(StepFunction::constant(grid, 1.0))};
}

SearchInstance SearchInstance::chain(const DyadicGrid& grid) {
  std::vector<Cube> cubes;
  for (int level = 0; level <= grid.depth(); level += 3) cubes.push_back({level, 0});
  std::vector<double> f(grid.cellCount(), 0.0);
  f[0] = 1.0;
  return {SparseFamily(grid, std::move(cubes)), StepFunction(grid, std::move(f)),
          Weight(StepFunction::constant(grid, 1.0))};
}

Objective Objective::ratioOrlicz(YoungFunction phi) { return Objective(ObjectiveKind::RatioOrlicz, std::move(phi), 2.0); }

Objective Objective::ratioPlain() { return Objective(ObjectiveKind::RatioPlain, std::nullopt, 2.0); }

Objective Objective::square(double p) {
  if (!(p >= 1.0)) throw DomainError("square objective needs p >= 1");
  return Objective(ObjectiveKind::Square, std::nullopt, p);
}

Objective Objective::parse(std::string_view kind, const YoungFunction& phi, double p) {
  if (kind == "ratio-orlicz") return ratioOrlicz(phi);
  if (kind == "ratio-plain") return ratioPlain();
  if (kind == "square") return square(p);
  throw ParseError("unknown objective '" + std::string(kind) + "' (ratio-orlicz, ratio-plain, square)");
}

std::string Objective::spec() const {
  switch (kind_) {
    case ObjectiveKind::RatioOrlicz:
      return "ratio-orlicz/" + phi_->spec();
    case ObjectiveKind::RatioPlain:
      return "ratio-plain";
    case ObjectiveKind::Square:
      return "square/p=" + formatShortest(p_);
  }
  return {};
}

double Objective::operator()(const SearchInstance& in) const {
  switch (kind_) {
    case ObjectiveKind::RatioOrlicz:
      return weakTypeRatio(in.family, in.f, in.w, orliczMaximal(in.w, *phi_));
    case ObjectiveKind::RatioPlain:
      return weakTypeRatio(in.family, in.f, in.w, dyadicMaximal(in.w));
    case ObjectiveKind::Square: {
      const double a1 = p_ == 1.0 ? a1Constant(in.w) : 0.0;
      const double ap = p_ > 1.0 ? apConstant(in.w, p_) : 0.0;
      const double cp = squareConstant(p_, a1, ap, p_ >= 2.0 ? aInfConstant(in.w) : 0.0);
      return ratioOf(weakNorm(applySparseSquare(in.family, in.f), in.w, p_), cp * lpNorm(in.f, in.w, p_),
                     "square objective");
    }
  }
  return 0.0;
}

void validateInstance(const SearchInstance& instance, const Objective& objective) {
  requireSameGrid(instance.family.grid(), instance.f.grid(), "search instance");
  requireSameGrid(instance.f.grid(), instance.w.grid(), "search instance");
  if (!validateSparsity(instance.family).pass) throw DomainError("search instance family is not sparse");
  if (instance.f.isZero()) throw DomainError("search instance needs f != 0");
  const double v = objective(instance);
  if (!std::isfinite(v)) throw DomainError("objective is not finite on the search instance");
}

namespace {

Cube randomCube(Rng& rng, const DyadicGrid& grid) {
  const int level = static_cast<int>(rng.below(static_cast<std::uint64_t>(grid.depth()) + 1));
  return {level, rng.below(std::uint64_t{1} << level)};
}

/// Applies one random move; nullopt when the proposal is rejected outright.
std::optional<SearchInstance> propose(const SearchInstance& in, Rng& rng, const SearchConfig& config) {
  const DyadicGrid& grid = in.f.grid();
  if (rng.bernoulli(config.toggleProbability)) {
    // Half of the candidates sit at least three levels inside a current member.
    Cube q = randomCube(rng, grid);
    if (!in.family.empty() && rng.bernoulli(0.5)) {
      const Cube& top = in.family[rng.below(in.family.size())];
      const int room = grid.depth() - top.level;
      if (room >= 3) {
        const int down = 3 + static_cast<int>(rng.below(static_cast<std::uint64_t>(room - 2)));
        q = {top.level + down, (top.index << down) + rng.below(std::uint64_t{1} << down)};
      }
    }
    SparseFamily family = in.family.contains(q) ? in.family.without(q) : in.family.with(q);
    if (!validateSparsity(family).pass) return std::nullopt;
    return SearchInstance{std::move(family), in.f, in.w};
  }
  const bool scaleWeight = rng.bernoulli(0.5);
  const Cube q = randomCube(rng, grid);
  const double factor = std::exp(config.sigma * rng.normal());
  const std::size_t first = q.firstCell(grid);
  const std::size_t span = q.cellSpan(grid);
  if (scaleWeight) {
    std::vector<double> v(in.w.function().values().begin(), in.w.function().values().end());
    for (std::size_t c = first; c < first + span; ++c) v[c] *= factor;
    Weight w(StepFunction(grid, std::move(v)));
    if (w.dynamicRange() > kMaxDynamicRange) return std::nullopt;
    return SearchInstance{in.family, in.f, std::move(w)};
  }
  std::vector<double> v(in.f.values().begin(), in.f.values().end());
  const bool blank = std::all_of(v.begin() + static_cast<std::ptrdiff_t>(first),
                                 v.begin() + static_cast<std::ptrdiff_t>(first + span), [](double x) { return x == 0.0; });
  // A zero block cannot be scaled, so it is filled at factor times the mean of f.
  const double fill = factor * in.f.integral();
  for (std::size_t c = first; c < first + span; ++c) v[c] = blank ? fill : v[c] * factor;
  return SearchInstance{in.family, StepFunction(grid, std::move(v)), in.w};
}

}  // namespace

SearchState hillClimb(const Objective& objective, const SearchInstance& seedInstance, std::size_t iters,
                      std::uint64_t seed, const SearchConfig& config,
                      const std::function<void(const SearchInstance&, double)>& onAccept) {
  if (!(config.sigma > 0.0) || !(config.toggleProbability >= 0.0 && config.toggleProbability <= 1.0)) {
    throw DomainError("search config needs sigma > 0 and toggle probability in [0, 1]");
  }
  validateInstance(seedInstance, objective);
  Rng rng(seed);
  SearchState state{seedInstance, objective(seedInstance), seedInstance, 0.0, 0, 0, seed, {}, {}};
  state.bestValue = state.value;
  state.trace.reserve(iters + 1);
  state.trace.push_back(state.bestValue);
  if (onAccept) onAccept(state.current, state.value);
  for (std::size_t it = 0; it < iters; ++it) {
    ++state.iterations;
    std::optional<SearchInstance> candidate = propose(state.current, rng, config);
    if (candidate) {
      const double v = objective(*candidate);
      if (v > state.value) {
        if (!validateSparsity(candidate->family).pass) throw Error("search accepted a non-sparse family");
        state.current = std::move(*candidate);
        state.value = v;
        ++state.accepted;
        if (onAccept) onAccept(state.current, v);
        if (v > state.bestValue) {
          state.bestValue = v;
          state.best = state.current;
        }
      }
    }
    state.trace.push_back(state.bestValue);
  }
  state.rngState = rng.state();
  return state;
}

SearchInstance scrambled(const SearchInstance& instance, int moves, std::uint64_t seed, const SearchConfig& config) {
  Rng rng(seed);
  SearchInstance current = instance;
  for (int i = 0; i < moves; ++i) {
    if (auto next = propose(current, rng, config)) current = std::move(*next);
  }
  return current;
}

SearchState searchWithRestarts(const Objective& objective, const SearchInstance& seedInstance, std::size_t iters,
                               std::uint64_t seed, const SearchConfig& config, const Executor& executor,
                               const std::function<void(const SearchInstance&, double)>& onAccept) {
  if (config.restarts < 1) throw DomainError("search needs at least one restart");
  validateInstance(seedInstance, objective);
  std::vector<std::optional<SearchState>> chains(static_cast<std::size_t>(config.restarts));
  executor.forEach(chains.size(), [&](std::size_t r) {
    const std::uint64_t chainSeed = deriveSeed(seed, r);
    const SearchInstance start =
        r == 0 ? seedInstance : scrambled(seedInstance, config.scramble, deriveSeed(chainSeed, 1), config);
    chains[r] = hillClimb(objective, start, iters, chainSeed, config, onAccept);
  });
  std::size_t best = 0;
  for (std::size_t r = 1; r < chains.size(); ++r) {
    if (chains[r]->bestValue > chains[best]->bestValue) best = r;
  }
  return std::move(*chains[best]);
}

std::string witnessJson(const SearchInstance& instance, const Objective& objective, double value, std::uint64_t seed,
                        const std::string& configHash) {
  return "{\"family\":" + sparseFamilyToJson(instance.family) + ",\"f\":" + stepFunctionToJson(instance.f) +
         ",\"w\":" + stepFunctionToJson(instance.w) + ",\"objective\":" + jsonString(objective.spec()) +
         ",\"value\":" + jsonNumber(value) + ",\"seed\":" + std::to_string(seed) +
         ",\"config_hash\":" + jsonString(configHash) + "}";
}

WitnessRecord witnessFromJson(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    SearchInstance instance{sparseFamilyFromJson(j.at("family").dump()), stepFunctionFromJson(j.at("f").dump()),
                            Weight(stepFunctionFromJson(j.at("w").dump()))};
    return {std::move(instance), j.at("objective").get<std::string>(),
            j.at("value").is_null() ? std::nan("") : j.at("value").get<double>(), j.at("seed").get<std::uint64_t>(),
            j.at("config_hash").get<std::string>()};
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("witness JSON: ") + e.what());
  }
}

std::vector<ProbeRow> mwProbe(const std::vector<int>& depths, std::size_t itersPerDepth, std::uint64_t seed,
                              const SearchConfig& config, const Executor& executor) {
  if (depths.empty()) throw DomainError("mwProbe needs at least one depth");
  for (std::size_t i = 1; i < depths.size(); ++i) {
    if (depths[i] <= depths[i - 1]) throw DomainError("mwProbe depths must be increasing");
  }
  const Objective plain = Objective::ratioPlain();
  const Objective orlicz = Objective::ratioOrlicz(YoungFunction::llogEps(0.5));
  std::vector<ProbeRow> rows(depths.size());
  executor.forEach(rows.size(), [&](std::size_t i) {
    const DyadicGrid grid(depths[i]);
    double orliczBest = 0.0;
    std::optional<SearchInstance> argmax;
    const SearchState state = searchWithRestarts(
        plain, SearchInstance::trivial(grid), itersPerDepth, deriveSeed(seed, static_cast<std::uint64_t>(depths[i])),
        config, serialExecutor(), [&](const SearchInstance& in, double) {
          const double v = orlicz(in);
          if (v > orliczBest) {
            orliczBest = v;
            argmax = in;
          }
        });
    rows[i] = {depths[i], state.bestValue, orliczBest, std::move(argmax)};
  });
  return rows;
}

}  // namespace sparselab
