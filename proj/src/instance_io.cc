// Copyright 2026 The SFM Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "sfm/instance_io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <vector>

namespace sfm {
namespace {

class LineReader {
 public:
  LineReader(std::istream& in, const std::string& name)
      : in_(in), name_(name) {}

  // Next non-blank, non-comment line split into tokens; false at EOF.
  bool Next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_;
      std::istringstream split(line);
      tokens.clear();
      for (std::string token; split >> token;) tokens.push_back(token);
      if (tokens.empty() || tokens[0][0] == '#') continue;
      return true;
    }
    return false;
  }

  [[noreturn]] void Fail(const std::string& reason) const {
    throw ParseError(name_ + ":" + std::to_string(line_) + ": " + reason);
  }

  template <typename T>
  T Number(const std::string& token, const char* what) const {
    T value{};
    auto [end, ec] =
        std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc() || end != token.data() + token.size()) {
      Fail(std::string("expected ") + what + ", got '" + token + "'");
    }
    return value;
  }

 private:
  std::istream& in_;
  const std::string& name_;
  int line_ = 0;
};

LoadedInstance ParseCut(LineReader& reader,
                        const std::vector<std::string>& header) {
  if (header.size() != 4) reader.Fail("expected 'cut n_vertices s t'");
  int nv = reader.Number<int>(header[1], "vertex count");
  int s = reader.Number<int>(header[2], "source id");
  int t = reader.Number<int>(header[3], "sink id");
  if (nv < 2) reader.Fail("a cut instance needs at least 2 vertices");
  if (s < 0 || s >= nv || t < 0 || t >= nv || s == t) {
    reader.Fail("source and sink must be distinct ids in [0, n_vertices)");
  }
  std::vector<WeightedEdge> edges;
  std::vector<std::string> tokens;
  while (reader.Next(tokens)) {
    if (tokens.size() != 3) reader.Fail("expected 'u v w'");
    int u = reader.Number<int>(tokens[0], "vertex id");
    int v = reader.Number<int>(tokens[1], "vertex id");
    double w = reader.Number<double>(tokens[2], "edge weight");
    if (u < 0 || u >= nv || v < 0 || v >= nv) {
      reader.Fail("vertex id out of range");
    }
    if (!(w >= 0.0) || !std::isfinite(w)) {
      reader.Fail("edge weight must be finite and >= 0");
    }
    edges.push_back({u, v, w});
  }
  auto cut = std::make_shared<const CutInstance>(nv, s, t, std::move(edges));
  return {cut, cut, nullptr};
}

LoadedInstance ParseTable(LineReader& reader,
                          const std::vector<std::string>& header) {
  if (header.size() != 2) reader.Fail("expected 'table n'");
  int n = reader.Number<int>(header[1], "ground set size");
  if (n < 1 || n > TableInstance::kMaxSize) {
    reader.Fail("table size must lie in [1, 20]");
  }
  const std::uint32_t count = 1u << n;
  std::vector<double> values(count, 0.0);
  std::vector<char> seen(count, 0);
  std::vector<std::string> tokens;
  std::uint32_t filled = 0;
  while (reader.Next(tokens)) {
    if (tokens.size() != 2) reader.Fail("expected 'bitmask value'");
    auto mask = reader.Number<std::uint32_t>(tokens[0], "bitmask");
    double value = reader.Number<double>(tokens[1], "value");
    if (mask >= count) reader.Fail("bitmask out of range");
    if (seen[mask]) reader.Fail("bitmask listed twice");
    if (!std::isfinite(value)) reader.Fail("value must be finite");
    seen[mask] = 1;
    values[mask] = value;
    ++filled;
  }
  if (filled != count) {
    reader.Fail("table lists " + std::to_string(filled) + " of " +
                std::to_string(count) + " subsets");
  }
  auto table = std::make_shared<const TableInstance>(n, std::move(values));
  return {table, nullptr, nullptr};
}

LoadedInstance ParseLowerBound(LineReader& reader,
                               const std::vector<std::string>& header) {
  if (header.size() < 2) reader.Fail("expected 'lb n'");
  int n = reader.Number<int>(header[1], "ground set size");
  if (n < 1) reader.Fail("ground set size must be >= 1");
  std::set<Element> hidden;
  auto take = [&](const std::vector<std::string>& tokens, std::size_t from) {
    for (std::size_t k = from; k < tokens.size(); ++k) {
      int e = reader.Number<int>(tokens[k], "element");
      if (e < 1 || e > n) reader.Fail("element of R outside [1, n]");
      if (!hidden.insert(e - 1).second) reader.Fail("element listed twice");
    }
  };
  take(header, 2);
  std::vector<std::string> tokens;
  while (reader.Next(tokens)) take(tokens, 0);
  auto lb = std::make_shared<const LowerBoundInstance>(
      MakeLowerBoundInstance({hidden.begin(), hidden.end()}, n));
  return {lb, nullptr, lb};
}

template <typename T>
T SpecNumber(const GeneratorSpec& spec, std::string_view key,
             std::optional<T> fallback) {
  auto it = spec.params.find(key);
  if (it == spec.params.end()) {
    if (fallback) return *fallback;
    throw ParseError("generator '" + spec.family + "' needs " +
                     std::string(key) + "=");
  }
  const std::string& text = it->second;
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(),
                                   value);
  if (ec != std::errc() || end != text.data() + text.size()) {
    throw ParseError("generator key " + std::string(key) +
                     " has a bad value '" + text + "'");
  }
  return value;
}

void RequireKeys(const GeneratorSpec& spec,
                 std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, value] : spec.params) {
    bool known = false;
    for (std::string_view a : allowed) known = known || key == a;
    if (!known) {
      throw ParseError("generator '" + spec.family + "' has unknown key '" +
                       key + "'");
    }
  }
}

}  // namespace

LoadedInstance ParseInstance(std::istream& in, const std::string& name) {
  LineReader reader(in, name);
  std::vector<std::string> header;
  if (!reader.Next(header)) reader.Fail("empty instance file");
  if (header[0] == "cut") return ParseCut(reader, header);
  if (header[0] == "table") return ParseTable(reader, header);
  if (header[0] == "lb") return ParseLowerBound(reader, header);
  reader.Fail("unknown instance kind '" + header[0] + "'");
}

LoadedInstance LoadInstanceFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path + ": cannot open instance file");
  return ParseInstance(in, path);
}

GeneratorSpec ParseGeneratorSpec(std::string_view text) {
  GeneratorSpec spec;
  std::size_t colon = text.find(':');
  spec.family = std::string(text.substr(0, colon));
  if (spec.family.empty()) throw ParseError("generator spec has no family");
  if (colon == std::string_view::npos) return spec;
  std::string_view rest = text.substr(colon + 1);
  while (!rest.empty()) {
    std::size_t comma = rest.find(',');
    std::string_view item = rest.substr(0, comma);
    std::size_t eq = item.find('=');
    if (eq == std::string_view::npos || eq == 0) {
      throw ParseError("generator item '" + std::string(item) +
                       "' is not key=value");
    }
    std::string key(item.substr(0, eq));
    if (!spec.params.emplace(key, std::string(item.substr(eq + 1))).second) {
      throw ParseError("generator key '" + key + "' given twice");
    }
    if (comma == std::string_view::npos) break;
    rest = rest.substr(comma + 1);
  }
  return spec;
}

LoadedInstance GenerateInstance(std::string_view text, std::uint64_t seed) {
  GeneratorSpec spec = ParseGeneratorSpec(text);
  if (spec.family == "cut") {
    RequireKeys(spec, {"n", "density", "wmax", "budget"});
    int n = SpecNumber<int>(spec, "n", std::nullopt);
    double density = SpecNumber<double>(spec, "density", 0.5);
    int wmax = SpecNumber<int>(spec, "wmax", 1);
    if (n < 1) throw ParseError("cut generator: n must be >= 1");
    if (!(density > 0.0 && density <= 1.0)) {
      throw ParseError("cut generator: density must lie in (0, 1]");
    }
    if (wmax < 1) throw ParseError("cut generator: wmax must be >= 1");
    std::shared_ptr<const CutInstance> cut;
    if (spec.params.count("budget")) {
      int budget = SpecNumber<int>(spec, "budget", std::nullopt);
      if (budget < 0) throw ParseError("cut generator: budget must be >= 0");
      cut = std::make_shared<const CutInstance>(
          RandomBudgetCutInstance(n, budget, wmax, seed));
    } else {
      cut = std::make_shared<const CutInstance>(
          RandomCutInstance(n, density, wmax, seed));
    }
    return {cut, cut, nullptr};
  }
  if (spec.family == "lb") {
    RequireKeys(spec, {"n"});
    int n = SpecNumber<int>(spec, "n", std::nullopt);
    if (n < 1) throw ParseError("lb generator: n must be >= 1");
    Rng rng = TrialRng(seed, 0);
    std::vector<Element> hidden;
    for (Element e = 0; e < n; ++e) {
      if (rng() >> 63) hidden.push_back(e);
    }
    auto lb = std::make_shared<const LowerBoundInstance>(
        MakeLowerBoundInstance(std::move(hidden), n));
    return {lb, nullptr, lb};
  }
  throw ParseError("unknown generator family '" + spec.family + "'");
}

}  // namespace sfm
