#include "dks/harness.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dks/errors.hpp"
#include "dks/io.hpp"

namespace dks {

using ordered_json = nlohmann::ordered_json;
using nlohmann::json;

// ---------------------------------------------------------------------------
// configuration

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ParameterError("seed list must be non-empty");
  auto axis = [](const auto& v, const char* name) {
    if (v.empty()) throw ParameterError(std::string("grid axis '") + name + "' is empty");
  };
  axis(n, "n");
  axis(k, "k");
  axis(d, "d");
  axis(delta, "delta");
  axis(d_prime, "d_prime");
  axis(lambda, "lambda");
  axis(gamma, "gamma");
  if (!(tol > 0)) throw ParameterError("tol must be positive");
  if (max_iter < 1) throw ParameterError("max_iter must be positive");
  adversary.validate();
}

std::vector<ModelParams> ExperimentConfig::grid() const {
  validate();
  std::vector<ModelParams> points;
  for (int nv : n)
    for (int kv : k)
      for (double dv : d)
        for (double deltav : delta)
          for (double dpv : d_prime)
            for (double lv : lambda)
              for (double gv : gamma) {
                ModelParams mp;
                mp.kind = kind;
                mp.n = nv;
                mp.k = kv;
                mp.d = dv;
                mp.delta = deltav;
                mp.d_prime = dpv;
                mp.lambda = lv;
                mp.gamma = gv;
                mp.xi = xi.fixed;
                mp.kappa = kappa;
                points.push_back(mp);
              }
  return points;
}

namespace {

template <typename T>
std::vector<T> scalar_or_array(const json& obj, const char* key, const std::vector<T>& fallback) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  std::vector<T> values;
  if (it->is_array()) {
    for (const auto& v : *it) {
      if (!v.is_number()) throw ParseError("expected numbers", std::string("model.") + key);
      values.push_back(v.get<T>());
    }
    if (values.empty()) throw ParseError("empty grid axis", std::string("model.") + key);
  } else if (it->is_number()) {
    values.push_back(it->get<T>());
  } else {
    throw ParseError("expected a number or array of numbers", std::string("model.") + key);
  }
  return values;
}

}  // namespace

ExperimentConfig config_from_text(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ParseError("config must be an object");
  ExperimentConfig cfg;

  auto model_it = doc.find("model");
  if (model_it == doc.end() || !model_it->is_object())
    throw ParseError("missing object field", "model");
  const json& model = *model_it;
  auto kind_it = model.find("kind");
  if (kind_it == model.end() || !kind_it->is_string())
    throw ParseError("missing string field", "model.kind");
  try {
    cfg.kind = model_kind_from_string(kind_it->get<std::string>());
  } catch (const ParameterError& e) {
    throw ParseError(e.what(), "model.kind");
  }
  cfg.n = scalar_or_array<int>(model, "n", cfg.n);
  cfg.k = scalar_or_array<int>(model, "k", cfg.k);
  cfg.d = scalar_or_array<double>(model, "d", cfg.d);
  cfg.delta = scalar_or_array<double>(model, "delta", cfg.delta);
  cfg.d_prime = scalar_or_array<double>(model, "d_prime", cfg.d_prime);
  cfg.lambda = scalar_or_array<double>(model, "lambda", cfg.lambda);
  cfg.gamma = scalar_or_array<double>(model, "gamma", cfg.gamma);
  if (model.contains("kappa")) cfg.kappa = model["kappa"].get<double>();

  if (auto it = doc.find("adversary"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("expected an object", "adversary");
    const json& adv = *it;
    if (auto s = adv.find("strategy"); s != adv.end()) {
      try {
        cfg.adversary.strategy = adversary_strategy_from_string(s->get<std::string>());
      } catch (const ParameterError& e) {
        throw ParseError(e.what(), "adversary.strategy");
      }
    }
    if (adv.contains("q_cross")) cfg.adversary.q_cross = adv["q_cross"].get<double>();
    if (adv.contains("q_outer")) cfg.adversary.q_outer = adv["q_outer"].get<double>();
    if (adv.contains("count")) cfg.adversary.count = adv["count"].get<int>();
    if (adv.contains("seed")) cfg.adversary.seed = adv["seed"].get<std::uint64_t>();
  }

  if (auto it = doc.find("seeds"); it != doc.end()) {
    if (!it->is_array()) throw ParseError("expected an array", "seeds");
    cfg.seeds.clear();
    for (const auto& v : *it) {
      if (!v.is_number_integer() && !v.is_number_unsigned())
        throw ParseError("expected integers", "seeds");
      cfg.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  if (doc.contains("tol")) cfg.tol = doc["tol"].get<double>();
  if (doc.contains("max_iter")) cfg.max_iter = doc["max_iter"].get<long>();
  if (doc.contains("out_dir")) cfg.out_dir = doc["out_dir"].get<std::string>();

  if (auto it = doc.find("xi"); it != doc.end()) {
    if (it->is_string()) {
      if (it->get<std::string>() != "auto")
        throw ParseError("xi must be a number or \"auto\"", "xi");
      cfg.xi.automatic = true;
    } else if (it->is_number()) {
      cfg.xi.fixed = it->get<double>();
    } else {
      throw ParseError("xi must be a number or \"auto\"", "xi");
    }
  }
  if (auto it = doc.find("calibration"); it != doc.end()) {
    if (!it->is_object()) throw ParseError("expected an object", "calibration");
    const json& cal = *it;
    if (cal.contains("n")) cfg.xi.calibration.n = cal["n"].get<int>();
    if (cal.contains("k")) cfg.xi.calibration.k = cal["k"].get<int>();
    if (cal.contains("p")) cfg.xi.calibration.p = cal["p"].get<double>();
    if (cal.contains("trials")) cfg.xi.calibration.trials = cal["trials"].get<int>();
    if (cal.contains("seed")) cfg.xi.calibration.seed = cal["seed"].get<std::uint64_t>();
  }

  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open for reading: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return config_from_text(buf.str());
}

// ---------------------------------------------------------------------------
// row serialization

namespace {

ordered_json params_json(const ModelParams& mp) {
  ordered_json j;
  j["kind"] = to_string(mp.kind);
  j["n"] = mp.n;
  j["k"] = mp.k;
  j["d"] = mp.d;
  j["delta"] = mp.delta;
  j["d_prime"] = mp.d_prime;
  j["lambda"] = mp.lambda;
  j["gamma"] = mp.gamma;
  j["xi"] = mp.xi;
  j["kappa"] = mp.kappa;
  return j;
}

ordered_json adversary_json(const AdversarySpec& adv) {
  ordered_json j;
  j["strategy"] = to_string(adv.strategy);
  j["q_cross"] = adv.q_cross;
  j["q_outer"] = adv.q_outer;
  j["count"] = adv.count;
  j["seed"] = adv.seed;
  return j;
}

}  // namespace

std::string RunRow::to_json_line(bool include_wall_time) const {
  ordered_json j;
  j["type"] = "run";
  j["params"] = params_json(params);
  j["adversary"] = adversary_json(adversary);
  j["seed"] = seed;
  if (!error.empty()) {
    j["error"] = error;
    return j.dump();
  }
  ordered_json solver;
  solver["converged"] = converged;
  solver["objective"] = objective;
  solver["dual_bound"] = dual_bound;
  solver["iterations"] = iterations;
  solver["residual_worst"] = residual_worst;
  solver["tol"] = tol;
  j["solver"] = solver;

  if (has_recovery) {
    const GuaranteeParams& g = recovery.guarantee;
    ordered_json r;
    r["eta"] = g.eta;
    r["alpha"] = g.alpha;
    r["bound"] = g.bound;
    r["valid"] = g.valid;
    r["eta_theorem"] = g.eta_theorem;
    r["bound_theorem"] = g.bound_theorem;
    r["size_T"] = recovery.size_T;
    r["rho_Q"] = recovery.rho_Q;
    r["rho_T_cap_S"] = recovery.rho_T_cap_S;
    r["size_Q_cap_S"] = recovery.size_Q_cap_S;
    ordered_json flags;
    flags["density"] = to_string(recovery.density_ok);
    flags["t_size"] = to_string(recovery.t_size_ok);
    flags["t_cap_s_density"] = to_string(recovery.t_cap_s_density_ok);
    flags["q_cap_s"] = to_string(recovery.q_cap_s_ok);
    r["flags"] = flags;
    j["recovery"] = r;
  } else {
    j["recovery"] = nullptr;
  }

  if (has_audit) {
    ordered_json a;
    a["mass_ss"] = audit.mass_ss;
    a["mass_cross"] = audit.mass_cross;
    a["mass_outer"] = audit.mass_outer;
    a["mean_edge_inner"] = audit.mean_edge_inner;
    a["mean_vertex_norm"] = audit.mean_vertex_norm;
    a["bound_cross"] = audit.bound_cross;
    a["bound_outer"] = audit.bound_outer;
    a["eta"] = audit.eta;
    ordered_json flags;
    flags["mass_identity"] = audit.mass_identity_ok;
    flags["cross"] = audit.cross_ok;
    flags["outer"] = audit.outer_ok;
    flags["ss"] = audit.ss_ok;
    flags["inner"] = audit.inner_ok;
    a["flags"] = flags;
    j["audit"] = a;
  } else {
    j["audit"] = nullptr;
  }

  if (has_brute) {
    ordered_json b;
    b["brute_value"] = brute_value;
    b["dominance_ok"] = brute_ok;
    j["brute"] = b;
  } else {
    j["brute"] = nullptr;
  }
  if (include_wall_time) j["wall_time_s"] = wall_time_s;
  return j.dump();
}

std::string Aggregates::to_json_line() const {
  ordered_json j;
  j["type"] = "aggregate";
  j["rows"] = rows;
  j["errors"] = errors;
  j["converged"] = converged;
  auto rate = [](int pass, int applicable) -> ordered_json {
    ordered_json r;
    r["pass"] = pass;
    r["applicable"] = applicable;
    r["rate"] = applicable > 0 ? static_cast<double>(pass) / applicable : 0.0;
    return r;
  };
  j["density"] = rate(density_pass, density_applicable);
  j["t_size"] = rate(t_size_pass, t_size_applicable);
  j["t_cap_s_density"] = rate(t_cap_s_pass, t_cap_s_applicable);
  j["q_cap_s"] = rate(q_cap_s_pass, q_cap_s_applicable);
  j["audit_all_pass"] = rate(audit_all_pass, audit_rows);
  j["mean_objective"] = mean_objective;
  return j.dump();
}

Aggregates aggregate_rows(const std::vector<RunRow>& rows) {
  Aggregates agg;
  agg.rows = static_cast<int>(rows.size());
  double obj_sum = 0;
  for (const RunRow& row : rows) {
    if (!row.error.empty()) {
      ++agg.errors;
      continue;
    }
    if (row.converged) {
      ++agg.converged;
      obj_sum += row.objective;
    }
    if (row.has_recovery) {
      auto tally = [](ClauseFlag f, int& applicable, int& pass) {
        if (f == ClauseFlag::NotApplicable) return;
        ++applicable;
        if (f == ClauseFlag::Pass) ++pass;
      };
      tally(row.recovery.density_ok, agg.density_applicable, agg.density_pass);
      tally(row.recovery.t_size_ok, agg.t_size_applicable, agg.t_size_pass);
      tally(row.recovery.t_cap_s_density_ok, agg.t_cap_s_applicable, agg.t_cap_s_pass);
      tally(row.recovery.q_cap_s_ok, agg.q_cap_s_applicable, agg.q_cap_s_pass);
    }
    if (row.has_audit) {
      ++agg.audit_rows;
      if (row.audit.all_pass()) ++agg.audit_all_pass;
    }
  }
  agg.mean_objective = agg.converged > 0 ? obj_sum / agg.converged : 0.0;
  return agg;
}

// ---------------------------------------------------------------------------
// xi resolution with a keyed cache file

double resolve_xi(const XiSource& xi, const std::string& out_dir) {
  if (!xi.automatic) return xi.fixed;
  const CalibrationSpec& c = xi.calibration;
  std::ostringstream key;
  key << c.n << ":" << c.k << ":" << format_real(c.p) << ":" << c.trials << ":" << c.seed;

  std::filesystem::create_directories(out_dir);
  std::string cache_path = out_dir + "/xi_cache.json";
  ordered_json cache = ordered_json::object();
  {
    std::ifstream in(cache_path, std::ios::binary);
    if (in) {
      try {
        cache = ordered_json::parse(in);
        if (!cache.is_object()) cache = ordered_json::object();
      } catch (const json::parse_error&) {
        cache = ordered_json::object();
      }
    }
  }
  if (cache.contains(key.str()) && cache[key.str()].is_number())
    return cache[key.str()].get<double>();

  double value = calibrate_xi(c.n, c.k, c.p, c.trials, c.seed).xi;
  cache[key.str()] = value;
  std::ofstream out(cache_path, std::ios::binary | std::ios::trunc);
  if (out) out << cache.dump(2) << "\n";
  return value;
}

// ---------------------------------------------------------------------------
// pipeline

RunRow run_pipeline(const ExperimentConfig& config, const ModelParams& params,
                    std::uint64_t seed, std::ostream* sink) {
  RunRow row;
  row.params = params;
  row.adversary = config.adversary;
  row.seed = seed;
  row.tol = config.tol;

  auto start = std::chrono::steady_clock::now();
  try {
    PlantedInstance instance = generate(params, config.adversary, seed);
    SdpProblem problem = build_problem(instance.graph, params.k);
    SolveOptions opts;
    opts.tol = config.tol;
    opts.max_iter = config.max_iter;

    SdpSolution solution;
    bool solved = true;
    try {
      solution = solve(problem, opts);
    } catch (const NonConvergedError& e) {
      solution = e.best();
      solved = false;
    }
    row.converged = solved;
    row.objective = solution.objective;
    row.dual_bound = solution.dual_bound;
    row.iterations = solution.iterations;
    row.residual_worst = solution.residuals.worst(params.k);

    if (solved) {
      row.recovery = recover(instance, solution);
      row.has_recovery = true;
      row.audit = audit_mass_split(instance, solution);
      row.has_audit = true;
      if (params.n <= 24) {
        BruteForceResult brute = brute_force_dks(instance.graph, params.k, 24);
        row.brute_value = brute.value;
        row.brute_ok =
            brute.value <= solution.objective + config.tol * (1 + std::abs(solution.objective));
        row.has_brute = true;
      }
    }
  } catch (const Error& e) {
    row.error = e.what();
  }
  row.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  if (sink != nullptr) {
    *sink << row.to_json_line() << "\n";
    sink->flush();
  }
  return row;
}

RunRow run_pipeline(const ExperimentConfig& config, std::uint64_t seed, std::ostream* sink) {
  std::vector<ModelParams> points = config.grid();
  if (points.size() != 1)
    throw ParameterError("run_pipeline requires a single grid point; use sweep for grids");
  ModelParams params = points.front();
  params.xi = resolve_xi(config.xi, config.out_dir);
  return run_pipeline(config, params, seed, sink);
}

ResultRecord sweep(const ExperimentConfig& config) {
  std::vector<ModelParams> points = config.grid();
  double xi_value = resolve_xi(config.xi, config.out_dir);

  std::filesystem::create_directories(config.out_dir);
  std::ofstream out(config.out_dir + "/results.jsonl", std::ios::binary | std::ios::app);
  if (!out) throw Error("cannot open for appending: " + config.out_dir + "/results.jsonl");

  ResultRecord record;
  for (ModelParams params : points) {
    params.xi = xi_value;
    for (std::uint64_t seed : config.seeds)
      record.rows.push_back(run_pipeline(config, params, seed, &out));
  }
  record.aggregates = aggregate_rows(record.rows);
  out << record.aggregates.to_json_line() << "\n";
  return record;
}

}  // namespace dks
