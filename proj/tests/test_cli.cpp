#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "sparselab/cli.hpp"
#include "sparselab/report.hpp"
#include "sparselab/search.hpp"

using namespace sparselab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("sparselab-cli-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = runSubcommand(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> v;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) v.push_back(l);
  return v;
}

}  // namespace

TEST_CASE("usage errors exit with 2, help with 0") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"no-such-command"}).code == kExitUsage);
  CHECK(run({"cphi", "--no-such-flag"}).code == kExitUsage);
  CHECK(run({"cphi", "--family", "power:r=0.5"}).code == kExitUsage);
  CHECK(run({"orlicz-norm"}).code == kExitUsage);
  CHECK(run({"search", "--objective", "ratio"}).code == kExitUsage);
  const Run help = run({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("verify-weak") != std::string::npos);
  CHECK(run({"--version"}).code == kExitOk);
}

TEST_CASE("cphi prints the constant and writes a report") {
  TempDir tmp;
  const Run r = run({"cphi", "--family", "power:r=2", "--out", tmp.path.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(r.out.rfind("c_phi=0.4082", 0) == 0);
  const auto csv = lines(slurp(tmp.path / "cphi.csv"));
  REQUIRE(csv.size() >= 4);
  CHECK(csv[0].rfind("# config_hash=", 0) == 0);
  CHECK(csv[3] == "id,depth,max_ratio,fitted_constant");
  CHECK(lines(slurp(tmp.path / "cphi.jsonl")).size() == 1);
}

TEST_CASE("orlicz-norm of a constant weight is the constant") {
  TempDir tmp;
  const Run r = run({"orlicz-norm", "--weight", "const:3", "--family", "llog:eps=0.5", "--out", tmp.path.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(std::stod(r.out) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(run({"orlicz-norm", "--weight", "const:3", "--cube", "7,0", "--depth", "6", "--out", tmp.path.string()}).code ==
        kExitUsage);
}

TEST_CASE("reruns are byte-identical") {
  TempDir a, b;
  const std::vector<std::string> common{"verify-weak", "--depths", "6", "--seeds", "1..2", "--weights", "const:1;spike:j=3",
                                        "--functions", "cells:count=2", "--sparse", "stopping:ratio=8"};
  auto argsA = common;
  argsA.insert(argsA.end(), {"--out", a.path.string()});
  auto argsB = common;
  argsB.insert(argsB.end(), {"--out", b.path.string(), "--jobs", "2"});
  REQUIRE(run(argsA).code == kExitOk);
  REQUIRE(run(argsB).code == kExitOk);
  for (const auto* name : {"verify-weak.jsonl", "verify-weak.csv", "verify-weak-constants.csv"}) {
    CAPTURE(name);
    CHECK(slurp(a.path / name) == slurp(b.path / name));
    CHECK(!slurp(a.path / name).empty());
  }
}

TEST_CASE("search exceeding an explicit bound writes a witness and exits 1") {
  TempDir tmp;
  const Run r = run({"search", "--objective", "ratio-plain", "--depth", "5", "--iters", "20", "--bound", "0.5", "--out",
                     tmp.path.string()});
  CHECK(r.code == kExitAssertion);
  bool found = false;
  for (const auto& e : fs::directory_iterator(tmp.path)) {
    if (e.path().filename().string().rfind("witness-search-", 0) == 0) {
      found = true;
      const WitnessRecord w = witnessFromJson(slurp(e.path()));
      CHECK(w.value > 0.5);
    }
  }
  CHECK(found);
  const Run ok = run({"search", "--objective", "ratio-plain", "--depth", "5", "--iters", "20", "--bound", "none",
                      "--out", tmp.path.string()});
  CHECK(ok.code == kExitOk);
  const auto trace = lines(slurp(tmp.path / "search-trace.csv"));
  CHECK(trace.size() == 3 + 1 + 21);
}

TEST_CASE("config file values apply and command-line flags win") {
  TempDir tmp;
  const fs::path cfgOut = tmp.path / "from-config";
  const fs::path flagOut = tmp.path / "from-flag";
  const fs::path cfg = tmp.path / "run.toml";
  {
    std::ofstream f(cfg);
    f << "[cphi]\nout = \"" << cfgOut.string() << "\"\nfamily = \"power:r=3\"\n";
  }
  const Run a = run({"--config", cfg.string(), "cphi"});
  REQUIRE(a.code == kExitOk);
  CHECK(fs::exists(cfgOut / "cphi.csv"));
  CHECK(slurp(cfgOut / "cphi.jsonl").find("power") != std::string::npos);
  const Run b = run({"--config", cfg.string(), "cphi", "--out", flagOut.string(), "--family", "power:r=2"});
  REQUIRE(b.code == kExitOk);
  CHECK(fs::exists(flagOut / "cphi.csv"));
  CHECK(b.out.rfind("c_phi=0.4082", 0) == 0);
  CHECK(a.out != b.out);
}

TEST_CASE("output directory from the environment") {
  TempDir tmp;
  const fs::path envOut = tmp.path / "env";
  ::setenv("SPARSELAB_OUT", envOut.string().c_str(), 1);
  const Run r = run({"cphi"});
  ::unsetenv("SPARSELAB_OUT");
  REQUIRE(r.code == kExitOk);
  CHECK(fs::exists(envOut / "cphi.csv"));
}

TEST_CASE("report files: header-only and single-row cases") {
  TempDir tmp;
  ReportContext ctx;
  ctx.configHash = configHash("x");
  ctx.seeds = {1, 2};
  const ReportPaths paths = ReportPaths::in(tmp.path / "nested", "empty");
  emitReport({}, paths, ctx);
  CHECK(slurp(paths.jsonl).empty());
  const auto csv = lines(slurp(paths.csv));
  REQUIRE(csv.size() == 4);
  CHECK(csv[0] == "# config_hash=" + configHash("x"));
  CHECK(csv[1] == "# seeds=1,2");
  CHECK(csv[2].rfind("# version=", 0) == 0);
  CHECK(csv[3] == "id,depth,max_ratio,fitted_constant");

  VerificationReport r;
  r.id = "demo";
  r.depth = 6;
  r.lhs = 1.0;
  r.rhs = 3.0;
  r.ratio = 1.0 / 3.0;
  r.fittedConstant = 0.1;
  const ReportPaths one = ReportPaths::in(tmp.path, "one");
  emitReport({r}, one, ctx);
  const auto jl = lines(slurp(one.jsonl));
  REQUIRE(jl.size() == 1);
  CHECK(jl[0].find("\"ratio\":0.33333333333333331") != std::string::npos);
  CHECK(jl[0].find("runtime_seconds") == std::string::npos);
  const auto rows = lines(slurp(one.csv));
  REQUIRE(rows.size() == 5);
  CHECK(rows[4] == "demo,6,0.33333333333333331,0.10000000000000001");
}

TEST_CASE("timing adds runtime fields only when requested") {
  ReportContext ctx;
  ctx.configHash = configHash("x");
  VerificationReport r;
  r.id = "t";
  r.runtimeSeconds = 0.5;
  CHECK(reportJsonLine(r, ctx).find("runtime_seconds") == std::string::npos);
  ctx.timing = true;
  ctx.elapsedSeconds = 2.0;
  CHECK(reportJsonLine(r, ctx).find("runtime_seconds") != std::string::npos);
  CHECK(csvPreamble(ctx).find("# elapsed_seconds=") != std::string::npos);
  CHECK(configHash("") == "cbf29ce484222325");
}

TEST_CASE("summaries group by id in order of appearance") {
  std::vector<VerificationReport> reps(4);
  reps[0].id = "b"; reps[0].depth = 6; reps[0].ratio = 0.5; reps[0].fittedConstant = 0.5;
  reps[1].id = "a"; reps[1].depth = 6; reps[1].ratio = 0.7; reps[1].fittedConstant = 0.7;
  reps[2].id = "b"; reps[2].depth = 6; reps[2].ratio = 0.9; reps[2].fittedConstant = 0.9;
  reps[3].id = "b"; reps[3].depth = 8; reps[3].ratio = 0.1; reps[3].fittedConstant = 0.1;
  const auto s = summarize(reps);
  REQUIRE(s.size() == 3);
  CHECK(s[0].id == "b");
  CHECK(s[0].depth == 6);
  CHECK(s[0].maxRatio == 0.9);
  CHECK(s[1].id == "b");
  CHECK(s[1].depth == 8);
  CHECK(s[2].id == "a");
}
