#include "dks/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dks/errors.hpp"

namespace dks {

using nlohmann::json;

std::string format_real(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

std::string instance_to_text(const PlantedInstance& instance) {
  const ModelParams& mp = instance.params;
  std::ostringstream out;
  out << "{\n";
  out << "  \"format_version\": 1,\n";
  out << "  \"params\": {\n";
  out << "    \"kind\": \"" << to_string(mp.kind) << "\",\n";
  out << "    \"n\": " << mp.n << ",\n";
  out << "    \"k\": " << mp.k << ",\n";
  out << "    \"d\": " << format_real(mp.d) << ",\n";
  out << "    \"delta\": " << format_real(mp.delta) << ",\n";
  out << "    \"d_prime\": " << format_real(mp.d_prime) << ",\n";
  out << "    \"lambda\": " << format_real(mp.lambda) << ",\n";
  out << "    \"gamma\": " << format_real(mp.gamma) << ",\n";
  out << "    \"xi\": " << format_real(mp.xi) << ",\n";
  out << "    \"kappa\": " << format_real(mp.kappa) << "\n";
  out << "  },\n";
  out << "  \"seed\": " << instance.seed << ",\n";
  out << "  \"edges\": [";
  bool first = true;
  for (const auto& [u, v, w] : instance.graph.sorted_edges()) {
    out << (first ? "\n" : ",\n") << "    [" << u << ", " << v << ", " << format_real(w) << "]";
    first = false;
  }
  out << (first ? "],\n" : "\n  ],\n");
  out << "  \"planted_set\": [";
  first = true;
  for (int v : instance.planted.members()) {
    out << (first ? "" : ", ") << v;
    first = false;
  }
  out << "],\n";
  out << "  \"adversary_log\": [";
  first = true;
  for (const auto& [u, v] : instance.adversary_log) {
    out << (first ? "\n" : ",\n") << "    [" << u << ", " << v << "]";
    first = false;
  }
  out << (first ? "]\n" : "\n  ]\n");
  out << "}\n";
  return out.str();
}

void save_instance(const PlantedInstance& instance, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path);
  out << instance_to_text(instance);
  if (!out) throw Error("write failed: " + path);
}

namespace {

int line_of_byte(const std::string& text, std::size_t byte) {
  int line = 1;
  std::size_t limit = std::min(byte, text.size());
  for (std::size_t i = 0; i < limit; ++i)
    if (text[i] == '\n') ++line;
  return line;
}

const json& need(const json& obj, const char* key, const std::string& ctx) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ParseError("missing field", ctx.empty() ? key : ctx + "." + key);
  return *it;
}

long long need_int(const json& obj, const char* key, const std::string& ctx) {
  const json& v = need(obj, key, ctx);
  if (!v.is_number_integer())
    throw ParseError("expected an integer", ctx.empty() ? key : ctx + "." + key);
  return v.get<long long>();
}

double need_real(const json& obj, const char* key, const std::string& ctx) {
  const json& v = need(obj, key, ctx);
  if (!v.is_number()) throw ParseError("expected a number", ctx.empty() ? key : ctx + "." + key);
  double x = v.get<double>();
  if (!std::isfinite(x))
    throw ParseError("expected a finite number", ctx.empty() ? key : ctx + "." + key);
  return x;
}

}  // namespace

PlantedInstance instance_from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what(), "",
                     line_of_byte(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!doc.is_object()) throw ParseError("top-level value must be an object");

  long long version = need_int(doc, "format_version", "");
  if (version != 1)
    throw VersionError("unsupported format_version " + std::to_string(version) +
                       " (supported: 1)");

  const json& jp = need(doc, "params", "");
  if (!jp.is_object()) throw ParseError("expected an object", "params");
  ModelParams mp;
  const json& jkind = need(jp, "kind", "params");
  if (!jkind.is_string()) throw ParseError("expected a string", "params.kind");
  try {
    mp.kind = model_kind_from_string(jkind.get<std::string>());
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), "params.kind");
  }
  mp.n = static_cast<int>(need_int(jp, "n", "params"));
  mp.k = static_cast<int>(need_int(jp, "k", "params"));
  mp.d = need_real(jp, "d", "params");
  mp.delta = need_real(jp, "delta", "params");
  mp.d_prime = need_real(jp, "d_prime", "params");
  mp.lambda = need_real(jp, "lambda", "params");
  mp.gamma = need_real(jp, "gamma", "params");
  mp.xi = need_real(jp, "xi", "params");
  mp.kappa = need_real(jp, "kappa", "params");
  try {
    mp.validate();
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), "params");
  }

  const json& jseed = need(doc, "seed", "");
  if (!jseed.is_number_unsigned() && !jseed.is_number_integer())
    throw ParseError("expected an unsigned integer", "seed");
  if (jseed.is_number_integer() && !jseed.is_number_unsigned() && jseed.get<long long>() < 0)
    throw ParseError("seed must be non-negative", "seed");

  PlantedInstance instance;
  instance.params = mp;
  instance.seed = jseed.get<std::uint64_t>();

  const json& jedges = need(doc, "edges", "");
  if (!jedges.is_array()) throw ParseError("expected an array", "edges");
  WeightedGraph graph(mp.n);
  for (std::size_t idx = 0; idx < jedges.size(); ++idx) {
    std::string ctx = "edges[" + std::to_string(idx) + "]";
    const json& je = jedges[idx];
    if (!je.is_array() || je.size() != 3 || !je[0].is_number_integer() ||
        !je[1].is_number_integer() || !je[2].is_number())
      throw ParseError("expected [u, v, w]", ctx);
    int u = je[0].get<int>();
    int v = je[1].get<int>();
    double w = je[2].get<double>();
    if (u >= v) throw ParseError("endpoints must satisfy u < v", ctx);
    if (u < 0 || v >= mp.n) throw ParseError("endpoint out of range", ctx);
    if (!(w > 0) || !std::isfinite(w)) throw ParseError("weight must be a positive real", ctx);
    if (graph.has_edge(u, v)) throw ParseError("duplicate edge", ctx);
    graph.set_weight(u, v, w);
  }

  const json& jplanted = need(doc, "planted_set", "");
  if (!jplanted.is_array()) throw ParseError("expected an array", "planted_set");
  std::vector<int> planted;
  for (std::size_t idx = 0; idx < jplanted.size(); ++idx) {
    std::string ctx = "planted_set[" + std::to_string(idx) + "]";
    if (!jplanted[idx].is_number_integer()) throw ParseError("expected an integer", ctx);
    int v = jplanted[idx].get<int>();
    if (v < 0 || v >= mp.n) throw ParseError("vertex out of range", ctx);
    if (!planted.empty() && v <= planted.back())
      throw ParseError("planted_set must be strictly increasing", ctx);
    planted.push_back(v);
  }
  if (static_cast<int>(planted.size()) != mp.k)
    throw ParseError("planted_set size must equal k", "planted_set");
  instance.planted = VertexSubset(planted);

  std::vector<char> in_s(mp.n, 0);
  for (int v : planted) in_s[v] = 1;

  const json& jlog = need(doc, "adversary_log", "");
  if (!jlog.is_array()) throw ParseError("expected an array", "adversary_log");
  for (std::size_t idx = 0; idx < jlog.size(); ++idx) {
    std::string ctx = "adversary_log[" + std::to_string(idx) + "]";
    const json& je = jlog[idx];
    if (!je.is_array() || je.size() != 2 || !je[0].is_number_integer() ||
        !je[1].is_number_integer())
      throw ParseError("expected [u, v]", ctx);
    int u = je[0].get<int>();
    int v = je[1].get<int>();
    if (u >= v) throw ParseError("endpoints must satisfy u < v", ctx);
    if (u < 0 || v >= mp.n) throw ParseError("endpoint out of range", ctx);
    if (in_s[u] && in_s[v]) throw ParseError("deleted edge lies inside the planted set", ctx);
    if (graph.has_edge(u, v)) throw ParseError("deleted edge is still present", ctx);
    instance.adversary_log.emplace_back(u, v);
  }
  std::sort(instance.adversary_log.begin(), instance.adversary_log.end());
  if (std::adjacent_find(instance.adversary_log.begin(), instance.adversary_log.end()) !=
      instance.adversary_log.end())
    throw ParseError("duplicate entry", "adversary_log");

  instance.graph = graph;

  // Step-1/step-3 logs are the surviving edges of each zone plus the
  // adversary's deletions in that zone.
  for (const auto& [u, v, w] : graph.sorted_edges()) {
    bool us = in_s[u] != 0, vs = in_s[v] != 0;
    if (us != vs)
      instance.cross_edge_log.emplace_back(u, v);
    else if (!us)
      instance.outer_edge_log.emplace_back(u, v);
  }
  for (const auto& [u, v] : instance.adversary_log) {
    bool us = in_s[u] != 0, vs = in_s[v] != 0;
    if (us != vs)
      instance.cross_edge_log.emplace_back(u, v);
    else
      instance.outer_edge_log.emplace_back(u, v);
  }
  std::sort(instance.cross_edge_log.begin(), instance.cross_edge_log.end());
  std::sort(instance.outer_edge_log.begin(), instance.outer_edge_log.end());

  // Core-degree integrity: the planted block must average d (exactly d
  // per vertex for the Reg kinds, up to float summation).
  double core_mass = 2.0 * rho(graph, instance.planted);
  if (std::abs(core_mass / mp.k - mp.d) > 1e-9)
    throw ParseError("planted block average degree does not match d", "edges");
  if (is_reg_kind(mp.kind)) {
    for (int v : planted) {
      double deg = 0;
      for (const auto& [u, w] : graph.neighbors(v))
        if (in_s[u]) deg += w;
      if (std::abs(deg - mp.d) > 1e-9)
        throw ParseError("planted block is not exactly d-regular", "edges");
    }
  }
  return instance;
}

PlantedInstance load_instance(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return instance_from_text(buf.str());
}

}  // namespace dks
