#include "sparselab/corpus.hpp"

#include "sparselab/errors.hpp"
#include "sparselab/random.hpp"

namespace sparselab {

CorpusSpec CorpusSpec::standard() {
  CorpusSpec spec;
  spec.depths = {6, 8, 10, 12};
  spec.weights = {"const:1", "power:a=0.5,x0=0.3", "power:a=-0.5,x0=0.7", "cascade:theta=0.5", "spike:j=6"};
  spec.functions = {"cells:count=3", "noise:sigma=1", "cube:level=5,index=3", "power:a=-0.6,x0=0.1", "const:1"};
  spec.sparse = {"stopping:ratio=8", "random:density=0.3", "random:density=0.05", "chain:x=0.1,step=3"};
  spec.seeds = {1, 2, 3, 4};
  return spec;
}

namespace {

template <class T, class Fmt>
std::string joined(const std::vector<T>& xs, const char* sep, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i != 0) out += sep;
    out += fmt(xs[i]);
  }
  return out;
}

}  // namespace

std::string CorpusSpec::canonical() const {
  const auto str = [](const std::string& s) { return s; };
  const auto num = [](auto v) { return std::to_string(v); };
  return "depths=" + joined(depths, ",", num) + "\nweights=" + joined(weights, ";", str) +
         "\nfunctions=" + joined(functions, ";", str) + "\nsparse=" + joined(sparse, ";", str) +
         "\nseeds=" + joined(seeds, ",", num) + "\n";
}

Corpus buildCorpus(const CorpusSpec& spec) {
  if (spec.instanceCount() == 0) throw DomainError("corpus spec produces no instances");
  Corpus corpus;
  corpus.spec = spec;
  // weightIndex = ((depth * W) + weight) * S + seed
  for (int depth : spec.depths) {
    const DyadicGrid grid(depth);
    for (std::size_t wi = 0; wi < spec.weights.size(); ++wi) {
      for (std::uint64_t seed : spec.seeds) {
        corpus.weights.push_back(
            {depth, spec.weights[wi], seed, generateWeight(grid, spec.weights[wi], deriveSeed(seed, kWeightStream + wi))});
      }
    }
  }
  std::size_t id = 0;
  for (std::size_t di = 0; di < spec.depths.size(); ++di) {
    const DyadicGrid grid(spec.depths[di]);
    for (std::size_t wi = 0; wi < spec.weights.size(); ++wi) {
      for (std::size_t fi = 0; fi < spec.functions.size(); ++fi) {
        for (std::size_t si = 0; si < spec.sparse.size(); ++si) {
          for (std::size_t ki = 0; ki < spec.seeds.size(); ++ki) {
            const std::uint64_t seed = spec.seeds[ki];
            StepFunction f = generateFunction(grid, spec.functions[fi], deriveSeed(seed, kFunctionStream + fi));
            SparseFamily family = generateSparse(grid, spec.sparse[si], f, deriveSeed(seed, kSparseStream + si));
            const std::size_t weightIndex = (di * spec.weights.size() + wi) * spec.seeds.size() + ki;
            corpus.instances.push_back({id++, spec.depths[di], weightIndex, spec.functions[fi], spec.sparse[si], seed,
                                        std::move(f), std::move(family)});
          }
        }
      }
    }
  }
  return corpus;
}

}  // namespace sparselab
