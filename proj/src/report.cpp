#include "sparselab/report.hpp"

#include <algorithm>
#include <fstream>

#include "sparselab/errors.hpp"
#include "sparselab/io.hpp"
#include "sparselab/spec_parse.hpp"

namespace sparselab {

std::string configHash(std::string_view canonical) { return hex64(fnv1a64(canonical)); }

namespace {

std::string seedList(const std::vector<std::uint64_t>& seeds) {
  std::string out;
  for (std::size_t i = 0; i < seeds.size(); ++i) {
    if (i != 0) out += ',';
    out += std::to_string(seeds[i]);
  }
  return out;
}

std::string csvField(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

std::string csvPreamble(const ReportContext& ctx) {
  std::string out =
      "# config_hash=" + ctx.configHash + "\n# seeds=" + seedList(ctx.seeds) + "\n# version=" + ctx.version + "\n";
  if (ctx.timing && ctx.elapsedSeconds) out += "# elapsed_seconds=" + format17(*ctx.elapsedSeconds) + "\n";
  return out;
}

std::string reportJsonLine(const VerificationReport& r, const ReportContext& ctx) {
  std::string out = "{\"config_hash\":" + jsonString(ctx.configHash) + ",\"seeds\":[" + seedList(ctx.seeds) +
                    "],\"version\":" + jsonString(ctx.version) + ",\"id\":" + jsonString(r.id) + ",\"parameters\":{";
  for (std::size_t i = 0; i < r.parameters.size(); ++i) {
    if (i != 0) out += ',';
    out += jsonString(r.parameters[i].first) + ":" + jsonString(r.parameters[i].second);
  }
  out += "},\"depth\":" + std::to_string(r.depth) + ",\"lhs\":" + jsonNumber(r.lhs) + ",\"rhs\":" + jsonNumber(r.rhs) +
         ",\"ratio\":" + jsonNumber(r.ratio) + ",\"fitted_constant\":" + jsonNumber(r.fittedConstant) +
         ",\"seed\":" + std::to_string(r.seed) + ",\"extras\":{";
  for (std::size_t i = 0; i < r.extras.size(); ++i) {
    if (i != 0) out += ',';
    out += jsonString(r.extras[i].first) + ":" + jsonNumber(r.extras[i].second);
  }
  out += "},\"flags\":[";
  for (std::size_t i = 0; i < r.flags.size(); ++i) {
    if (i != 0) out += ',';
    out += jsonString(r.flags[i]);
  }
  out += "]";
  if (ctx.timing && r.runtimeSeconds) out += ",\"runtime_seconds\":" + jsonNumber(*r.runtimeSeconds);
  return out + "}";
}

std::string summaryCsv(const std::vector<SummaryRow>& rows, const ReportContext& ctx) {
  std::string out = csvPreamble(ctx) + "id,depth,max_ratio,fitted_constant\n";
  for (const auto& row : rows) {
    out += csvField(row.id) + "," + std::to_string(row.depth) + "," + format17(row.maxRatio) + "," +
           format17(row.fittedConstant) + "\n";
  }
  return out;
}

std::string probeCsv(const std::vector<ProbeRow>& rows, const ReportContext& ctx) {
  std::string out = csvPreamble(ctx) + "depth,plainM_best,orlicz_best\n";
  for (const auto& row : rows) {
    out += std::to_string(row.depth) + "," + format17(row.plainBest) + "," + format17(row.orliczBest) + "\n";
  }
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<VerificationReport>& reports) {
  std::vector<std::string> ids;
  for (const auto& r : reports) {
    if (std::find(ids.begin(), ids.end(), r.id) == ids.end()) ids.push_back(r.id);
  }
  std::vector<SummaryRow> out;
  for (const auto& id : ids) {
    std::vector<VerificationReport> subset;
    for (const auto& r : reports) {
      if (r.id == id) subset.push_back(r);
    }
    for (auto& row : summarizeByDepth(id, subset)) out.push_back(std::move(row));
  }
  return out;
}

ReportPaths ReportPaths::in(const std::filesystem::path& dir, const std::string& stem) {
  return {dir / (stem + ".jsonl"), dir / (stem + ".csv")};
}

void writeTextFile(const std::filesystem::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open '" + path.string() + "' for writing");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  out.close();
  if (!out) throw Error("write to '" + path.string() + "' failed");
}

void emitReport(const std::vector<VerificationReport>& reports, const std::vector<SummaryRow>& summary,
                const ReportPaths& paths, const ReportContext& ctx) {
  std::string lines;
  for (const auto& r : reports) lines += reportJsonLine(r, ctx) + "\n";
  writeTextFile(paths.jsonl, lines);
  writeTextFile(paths.csv, summaryCsv(summary, ctx));
}

void emitReport(const std::vector<VerificationReport>& reports, const ReportPaths& paths, const ReportContext& ctx) {
  emitReport(reports, summarize(reports), paths, ctx);
}

std::string constantsCsv(const std::vector<std::pair<std::string, double>>& constants, const ReportContext& ctx) {
  std::string csv = csvPreamble(ctx) + "name,value\n";
  for (const auto& [name, value] : constants) csv += name + "," + format17(value) + "\n";
  return csv;
}

std::vector<std::pair<std::string, double>> parseConstantsCsv(std::string_view text) {
  std::vector<std::pair<std::string, double>> out;
  bool header = false;
  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    if (line.empty() || line.front() == '#') continue;
    if (!header) {
      if (line != "name,value") throw ParseError("constants CSV: expected header name,value");
      header = true;
      continue;
    }
    const std::size_t comma = line.rfind(',');
    if (comma == std::string_view::npos) throw ParseError("constants CSV: malformed row '" + std::string(line) + "'");
    out.emplace_back(std::string(line.substr(0, comma)), parseDouble(line.substr(comma + 1)));
  }
  return out;
}

}  // namespace sparselab
