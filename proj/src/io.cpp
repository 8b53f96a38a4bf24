#include "sparselab/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>

#include "json.hpp"

#include "sparselab/errors.hpp"

namespace sparselab {

std::string formatShortest(double x) {
  std::array<char, 32> buf{};
  const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) return format17(x);
  return std::string(buf.data(), end);
}

std::string format17(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::array<char, 40> buf{};
  const int n = std::snprintf(buf.data(), buf.size(), "%.17g", x);
  return std::string(buf.data(), static_cast<std::size_t>(n));
}

std::string jsonNumber(double x) { return std::isfinite(x) ? format17(x) : "null"; }

std::string jsonString(std::string_view s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"':
        out += "\\\"";
        break;
      case '\\':
        out += "\\\\";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\t':
        out += "\\t";
        break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          std::array<char, 8> buf{};
          std::snprintf(buf.data(), buf.size(), "\\u%04x", static_cast<unsigned>(c));
          out += buf.data();
        } else {
          out += c;
        }
    }
  }
  out += '"';
  return out;
}

std::string stepFunctionToJson(const StepFunction& f) {
  std::string out = "{\"depth\":" + std::to_string(f.grid().depth()) + ",\"values\":[";
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i != 0) out += ',';
    out += format17(f[i]);
  }
  out += "]}";
  return out;
}

StepFunction stepFunctionFromJson(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    const DyadicGrid grid(j.at("depth").get<int>());
    return StepFunction(grid, j.at("values").get<std::vector<double>>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("step function JSON: ") + e.what());
  }
}

namespace {

constexpr std::array<char, 4> kMagic = {'S', 'L', 'S', 'F'};

template <class T>
void putLittle(std::ostream& out, T value) {
  auto bits = std::bit_cast<std::array<unsigned char, sizeof(T)>>(value);
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  out.write(reinterpret_cast<const char*>(bits.data()), bits.size());
}

template <class T>
T getLittle(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bits{};
  in.read(reinterpret_cast<char*>(bits.data()), bits.size());
  if (!in) throw ParseError("truncated binary step function");
  if constexpr (std::endian::native == std::endian::big) std::reverse(bits.begin(), bits.end());
  return std::bit_cast<T>(bits);
}

}  // namespace

void writeStepFunctionBinary(std::ostream& out, const StepFunction& f) {
  out.write(kMagic.data(), kMagic.size());
  putLittle(out, static_cast<std::uint32_t>(f.grid().depth()));
  for (double v : f.values()) putLittle(out, v);
  if (!out) throw Error("failed to write binary step function");
}

StepFunction readStepFunctionBinary(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw ParseError("not a binary step function");
  const auto depth = getLittle<std::uint32_t>(in);
  if (depth < 1 || depth > static_cast<std::uint32_t>(kMaxDepth)) throw ParseError("binary step function depth out of range");
  const DyadicGrid grid(static_cast<int>(depth));
  std::vector<double> values(grid.cellCount());
  for (double& v : values) v = getLittle<double>(in);
  return StepFunction(grid, std::move(values));
}

std::string cellSetToJson(const CellSet& s) {
  return "{\"depth\":" + std::to_string(s.grid().depth()) + ",\"cells\":\"" + s.toHex() + "\"}";
}

CellSet cellSetFromJson(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    return CellSet::fromHex(DyadicGrid(j.at("depth").get<int>()), j.at("cells").get<std::string>());
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("cell set JSON: ") + e.what());
  }
}

std::uint64_t fnv1a64(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t x) {
  std::array<char, 17> buf{};
  std::snprintf(buf.data(), buf.size(), "%016llx", static_cast<unsigned long long>(x));
  return std::string(buf.data(), 16);
}

}  // namespace sparselab
