#pragma once

// Seeded cross product of generator specs: the instances every verifier runs on.

#include <cstdint>
#include <string>
#include <vector>

#include "sparselab/dyadic.hpp"
#include "sparselab/sparse.hpp"
#include "sparselab/weights.hpp"

namespace sparselab {

struct CorpusSpec {
  std::vector<int> depths;
  std::vector<std::string> weights;
  std::vector<std::string> functions;
  std::vector<std::string> sparse;
  std::vector<std::uint64_t> seeds;

  /// Depths 6, 8, 10, 12; five weights, five functions, four sparse strategies, four seeds.
  [[nodiscard]] static CorpusSpec standard();
  /// One line per field; the input of the config hash.
  [[nodiscard]] std::string canonical() const;
  [[nodiscard]] std::size_t instanceCount() const noexcept {
    return depths.size() * weights.size() * functions.size() * sparse.size() * seeds.size();
  }
};

struct CorpusWeight {
  int depth = 0;
  std::string spec;
  std::uint64_t seed = 0;
  Weight w;
};

struct Instance {
  std::size_t id = 0;
  int depth = 0;
  std::size_t weightIndex = 0;
  std::string functionSpec;
  std::string sparseSpec;
  std::uint64_t seed = 0;
  StepFunction f;
  SparseFamily family;
};

/// Weights are shared by every instance with the same (depth, weight spec, seed).
struct Corpus {
  CorpusSpec spec;
  std::vector<CorpusWeight> weights;
  std::vector<Instance> instances;

  [[nodiscard]] const Weight& weightOf(const Instance& inst) const { return weights[inst.weightIndex].w; }
  [[nodiscard]] std::vector<int> depths() const { return spec.depths; }
};

/// Stream ids for deriveSeed, so each component draws from its own stream.
inline constexpr std::uint64_t kWeightStream = 1;
inline constexpr std::uint64_t kFunctionStream = 1000;
inline constexpr std::uint64_t kSparseStream = 2000;

[[nodiscard]] Corpus buildCorpus(const CorpusSpec& spec);

}  // namespace sparselab
