#include "sparselab/spec_parse.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "sparselab/errors.hpp"

namespace sparselab {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

}  // namespace

SpecString SpecString::parse(std::string_view text) {
  SpecString spec;
  spec.text_ = std::string(trim(text));
  const std::string_view body = spec.text_;
  const std::size_t colon = body.find(':');
  spec.kind_ = std::string(trim(body.substr(0, colon)));
  if (spec.kind_.empty()) throw ParseError("empty spec kind in '" + spec.text_ + "'");
  if (colon == std::string_view::npos) return spec;
  const std::string_view rest = body.substr(colon + 1);
  if (trim(rest).empty()) throw ParseError("empty parameter list in '" + spec.text_ + "'");
  for (std::string_view item : split(rest, ',')) {
    if (item.empty()) throw ParseError("empty parameter in '" + spec.text_ + "'");
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      if (spec.positional_ || !spec.params_.empty()) {
        throw ParseError("only a single positional value is allowed in '" + spec.text_ + "'");
      }
      spec.positional_ = std::string(item);
      continue;
    }
    const std::string key(trim(item.substr(0, eq)));
    const std::string value(trim(item.substr(eq + 1)));
    if (key.empty() || value.empty()) throw ParseError("malformed parameter '" + std::string(item) + "'");
    if (spec.has(key)) throw ParseError("duplicate parameter '" + key + "' in '" + spec.text_ + "'");
    spec.params_.emplace_back(key, value);
  }
  if (spec.positional_ && !spec.params_.empty()) {
    throw ParseError("cannot mix positional and named parameters in '" + spec.text_ + "'");
  }
  return spec;
}

bool SpecString::has(std::string_view key) const {
  return std::any_of(params_.begin(), params_.end(), [&](const auto& kv) { return kv.first == key; });
}

std::optional<std::string> SpecString::raw(std::string_view key, bool primaryKey) const {
  for (const auto& [k, v] : params_) {
    if (k == key) return v;
  }
  if (primaryKey && positional_) return positional_;
  return std::nullopt;
}

double SpecString::number(std::string_view key, std::optional<double> fallback, bool primaryKey) const {
  const auto v = raw(key, primaryKey);
  if (!v) {
    if (fallback) return *fallback;
    throw ParseError("missing parameter '" + std::string(key) + "' in '" + text_ + "'");
  }
  return parseDouble(*v);
}

std::int64_t SpecString::integer(std::string_view key, std::optional<std::int64_t> fallback, bool primaryKey) const {
  const auto v = raw(key, primaryKey);
  if (!v) {
    if (fallback) return *fallback;
    throw ParseError("missing parameter '" + std::string(key) + "' in '" + text_ + "'");
  }
  return parseInteger(*v);
}

void SpecString::requireKeys(std::initializer_list<std::string_view> allowed, bool allowPositional) const {
  if (positional_ && !allowPositional) throw ParseError("unexpected positional value in '" + text_ + "'");
  for (const auto& [k, v] : params_) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) {
      throw ParseError("unknown parameter '" + k + "' in '" + text_ + "'");
    }
  }
}

double parseDouble(std::string_view text) {
  text = trim(text);
  double value = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw ParseError("not a number: '" + std::string(text) + "'");
  }
  return value;
}

std::int64_t parseInteger(std::string_view text) {
  text = trim(text);
  std::int64_t value = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || end != text.data() + text.size() || text.empty()) {
    throw ParseError("not an integer: '" + std::string(text) + "'");
  }
  return value;
}

YoungFunction parseYoungFunction(std::string_view text) {
  const SpecString spec = SpecString::parse(text);
  try {
    if (spec.kind() == "power") {
      spec.requireKeys({"r"}, true);
      return YoungFunction::power(spec.number("r", std::nullopt, true));
    }
    if (spec.kind() == "llog") {
      spec.requireKeys({"eps"}, true);
      return YoungFunction::llogEps(spec.number("eps", std::nullopt, true));
    }
    if (spec.kind() == "llog2") {
      spec.requireKeys({"alpha"}, true);
      return YoungFunction::llog2Alpha(spec.number("alpha", std::nullopt, true));
    }
    if (spec.kind() == "llog2log3") {
      spec.requireKeys({"alpha"}, true);
      return YoungFunction::llog2Log3Alpha(spec.number("alpha", std::nullopt, true));
    }
  } catch (const DomainError& e) {
    throw ParseError("invalid family '" + spec.text() + "': " + e.what());
  }
  throw ParseError("unknown Young function family '" + spec.kind() + "'");
}

namespace {

template <class T, class ParseOne>
std::vector<T> parseRangeList(std::string_view text, ParseOne parseOne) {
  std::vector<T> out;
  if (trim(text).empty()) throw ParseError("empty list");
  for (std::string_view item : split(text, ',')) {
    const std::size_t dots = item.find("..");
    if (dots == std::string_view::npos) {
      out.push_back(parseOne(item));
      continue;
    }
    const T lo = parseOne(item.substr(0, dots));
    const T hi = parseOne(item.substr(dots + 2));
    if (hi < lo) throw ParseError("descending range '" + std::string(item) + "'");
    if (hi - lo > 1000000) throw ParseError("range too long '" + std::string(item) + "'");
    for (T v = lo;; ++v) {
      out.push_back(v);
      if (v == hi) break;
    }
  }
  return out;
}

}  // namespace

std::vector<std::uint64_t> parseSeedList(std::string_view text) {
  return parseRangeList<std::uint64_t>(text, [](std::string_view s) {
    const auto v = parseInteger(s);
    if (v < 0) throw ParseError("seeds must be nonnegative");
    return static_cast<std::uint64_t>(v);
  });
}

std::vector<int> parseIntList(std::string_view text) {
  return parseRangeList<int>(text, [](std::string_view s) {
    const auto v = parseInteger(s);
    if (v < -1000000000 || v > 1000000000) throw ParseError("integer out of range");
    return static_cast<int>(v);
  });
}

std::vector<double> parseDoubleList(std::string_view text) {
  std::vector<double> out;
  if (trim(text).empty()) throw ParseError("empty list");
  for (std::string_view item : split(text, ',')) out.push_back(parseDouble(item));
  return out;
}

std::vector<std::string> splitSpecList(std::string_view text) {
  std::vector<std::string> out;
  for (std::string_view item : split(text, ';')) {
    if (item.empty()) throw ParseError("empty entry in spec list");
    out.emplace_back(item);
  }
  return out;
}

}  // namespace sparselab
