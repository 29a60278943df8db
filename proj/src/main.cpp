#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "dks/errors.hpp"
#include "dks/harness.hpp"
#include "dks/io.hpp"
#include "dks/oracles.hpp"
#include "dks/rounding.hpp"
#include "dks/sdp.hpp"

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json recovery_json(const dks::RecoveryResult& r) {
  const dks::GuaranteeParams& g = r.guarantee;
  ordered_json j;
  j["eta"] = g.eta;
  j["alpha"] = g.alpha;
  j["bound"] = g.bound;
  j["valid"] = g.valid;
  j["eta_theorem"] = g.eta_theorem;
  j["bound_theorem"] = g.bound_theorem;
  j["size_T"] = r.size_T;
  j["rho_Q"] = r.rho_Q;
  j["rho_T_cap_S"] = r.rho_T_cap_S;
  j["size_Q_cap_S"] = r.size_Q_cap_S;
  ordered_json flags;
  flags["density"] = dks::to_string(r.density_ok);
  flags["t_size"] = dks::to_string(r.t_size_ok);
  flags["t_cap_s_density"] = dks::to_string(r.t_cap_s_density_ok);
  flags["q_cap_s"] = dks::to_string(r.q_cap_s_ok);
  j["flags"] = flags;
  j["Q"] = r.Q.members();
  return j;
}

ordered_json audit_json(const dks::AuditReport& a) {
  ordered_json j;
  j["mass_ss"] = a.mass_ss;
  j["mass_cross"] = a.mass_cross;
  j["mass_outer"] = a.mass_outer;
  j["mean_edge_inner"] = a.mean_edge_inner;
  j["mean_vertex_norm"] = a.mean_vertex_norm;
  j["bound_cross"] = a.bound_cross;
  j["bound_outer"] = a.bound_outer;
  j["eta"] = a.eta;
  ordered_json flags;
  flags["mass_identity"] = a.mass_identity_ok;
  flags["cross"] = a.cross_ok;
  flags["outer"] = a.outer_ok;
  flags["ss"] = a.ss_ok;
  flags["inner"] = a.inner_ok;
  j["flags"] = flags;
  j["all_pass"] = a.all_pass();
  return j;
}

ordered_json solver_json(const dks::SdpSolution& s) {
  ordered_json j;
  j["converged"] = s.converged;
  j["objective"] = s.objective;
  j["dual_bound"] = s.dual_bound;
  j["iterations"] = s.iterations;
  j["residual_worst"] = s.residuals.worst(s.k);
  j["tol"] = s.tol;
  return j;
}

void apply_xi_flag(dks::ExperimentConfig& cfg, const std::string& xi_flag) {
  if (xi_flag.empty()) return;
  if (xi_flag == "auto") {
    cfg.xi.automatic = true;
    return;
  }
  try {
    std::size_t used = 0;
    double v = std::stod(xi_flag, &used);
    if (used != xi_flag.size()) throw std::invalid_argument(xi_flag);
    cfg.xi.automatic = false;
    cfg.xi.fixed = v;
  } catch (const std::exception&) {
    throw dks::ParameterError("--xi expects a real number or 'auto'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"planted densest-k-subgraph toolkit: generation, SDP solving, "
               "threshold-and-prune recovery, and analytical audits"};
  app.require_subcommand(1);

  std::string config_path, out_dir, xi_flag, instance_path, solution_path;
  std::uint64_t seed = 1;
  double tol = 1e-5;
  long max_iter = 50000;
  std::optional<double> eta_override;

  CLI::App* cmd_generate = app.add_subcommand("generate", "build an instance file");
  cmd_generate->add_option("--config", config_path, "experiment config file")->required();
  cmd_generate->add_option("--seed", seed, "generation seed");
  cmd_generate->add_option("--out", out_dir, "output directory (overrides config)");
  cmd_generate->add_option("--xi", xi_flag, "spectral constant: real value or 'auto'");

  CLI::App* cmd_solve = app.add_subcommand("solve", "solve the relaxation for an instance");
  cmd_solve->add_option("instance", instance_path, "instance file")->required();
  cmd_solve->add_option("--tol", tol, "solver tolerance");
  cmd_solve->add_option("--max-iter", max_iter, "iteration budget");
  cmd_solve->add_option("--out", out_dir, "output directory");

  CLI::App* cmd_recover = app.add_subcommand("recover", "threshold-and-prune recovery");
  cmd_recover->add_option("instance", instance_path, "instance file")->required();
  cmd_recover->add_option("solution", solution_path, "solution file")->required();
  double eta_value = 0;
  CLI::Option* eta_opt =
      cmd_recover->add_option("--eta", eta_value, "manual threshold slack in (0,1)");

  CLI::App* cmd_audit = app.add_subcommand("audit", "mass-split inequality audit");
  cmd_audit->add_option("instance", instance_path, "instance file")->required();
  cmd_audit->add_option("solution", solution_path, "solution file")->required();

  CLI::App* cmd_calibrate = app.add_subcommand("calibrate", "Monte-Carlo xi estimation");
  cmd_calibrate->add_option("--config", config_path, "config with a calibration section");
  cmd_calibrate->add_option("--seed", seed, "calibration seed");
  cmd_calibrate->add_option("--out", out_dir, "cache directory");

  CLI::App* cmd_brute = app.add_subcommand("brute-check", "small-instance oracle comparison");
  cmd_brute->add_option("instance", instance_path, "instance file (n <= 24)")->required();
  cmd_brute->add_option("--tol", tol, "solver tolerance");

  CLI::App* cmd_sweep = app.add_subcommand("sweep", "run a config's grid x seeds");
  cmd_sweep->add_option("--config", config_path, "experiment config file")->required();
  cmd_sweep->add_option("--out", out_dir, "output directory (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (cmd_generate->parsed()) {
      dks::ExperimentConfig cfg = dks::load_config(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      apply_xi_flag(cfg, xi_flag);
      auto points = cfg.grid();
      if (points.size() != 1)
        throw dks::ParameterError("generate requires a single-point grid");
      dks::ModelParams params = points.front();
      params.xi = dks::resolve_xi(cfg.xi, cfg.out_dir);
      dks::PlantedInstance instance = dks::generate(params, cfg.adversary, seed);
      std::filesystem::create_directories(cfg.out_dir);
      std::string path = cfg.out_dir + "/instance-" + dks::to_string(params.kind) + "-seed" +
                         std::to_string(seed) + ".json";
      dks::save_instance(instance, path);
      ordered_json j;
      j["instance_path"] = path;
      j["n"] = params.n;
      j["k"] = params.k;
      j["edges"] = instance.graph.edge_count();
      j["total_weight"] = instance.graph.total_weight();
      j["low_p_advisory"] = params.low_p_advisory();
      std::cout << j.dump() << "\n";
      return 0;
    }

    if (cmd_solve->parsed()) {
      dks::PlantedInstance instance = dks::load_instance(instance_path);
      dks::SdpProblem problem = dks::build_problem(instance.graph, instance.params.k);
      dks::SolveOptions opts;
      opts.tol = tol;
      opts.max_iter = max_iter;
      dks::SdpSolution solution;
      bool converged = true;
      try {
        solution = dks::solve(problem, opts);
      } catch (const dks::NonConvergedError& e) {
        solution = e.best();
        converged = false;
      }
      if (out_dir.empty()) out_dir = "results";
      std::filesystem::create_directories(out_dir);
      std::string stem = std::filesystem::path(instance_path).stem().string();
      std::string path = out_dir + "/" + stem + ".solution.txt";
      dks::save_solution(solution, path);
      ordered_json j = solver_json(solution);
      j["solution_path"] = path;
      std::cout << j.dump() << "\n";
      return converged ? 0 : 3;
    }

    if (cmd_recover->parsed()) {
      dks::PlantedInstance instance = dks::load_instance(instance_path);
      dks::SdpSolution solution = dks::load_solution(solution_path);
      if (eta_opt->count() > 0) eta_override = eta_value;
      dks::RecoveryResult result = dks::recover(instance, solution, eta_override);
      std::cout << recovery_json(result).dump() << "\n";
      return 0;
    }

    if (cmd_audit->parsed()) {
      dks::PlantedInstance instance = dks::load_instance(instance_path);
      dks::SdpSolution solution = dks::load_solution(solution_path);
      dks::AuditReport report = dks::audit_mass_split(instance, solution);
      std::cout << audit_json(report).dump() << "\n";
      return 0;
    }

    if (cmd_calibrate->parsed()) {
      dks::CalibrationSpec spec;
      if (!config_path.empty()) {
        dks::ExperimentConfig cfg = dks::load_config(config_path);
        spec = cfg.xi.calibration;
      }
      if (cmd_calibrate->get_option("--seed")->count() > 0) spec.seed = seed;
      dks::CalibrationResult result =
          dks::calibrate_xi(spec.n, spec.k, spec.p, spec.trials, spec.seed);
      ordered_json j;
      j["xi"] = result.xi;
      j["n"] = spec.n;
      j["k"] = spec.k;
      j["p"] = spec.p;
      j["trials"] = spec.trials;
      j["seed"] = spec.seed;
      j["ratios"] = result.ratios;
      std::cout << j.dump() << "\n";
      if (!out_dir.empty()) {
        dks::XiSource source;
        source.automatic = true;
        source.calibration = spec;
        dks::resolve_xi(source, out_dir);  // persists into the keyed cache
      }
      return 0;
    }

    if (cmd_brute->parsed()) {
      dks::PlantedInstance instance = dks::load_instance(instance_path);
      dks::BruteForceResult brute =
          dks::brute_force_dks(instance.graph, instance.params.k, 24);
      dks::SdpProblem problem = dks::build_problem(instance.graph, instance.params.k);
      dks::SdpSolution solution = dks::solve(problem, tol);
      bool ok = brute.value <= solution.objective + tol * (1 + std::abs(solution.objective));
      ordered_json j;
      j["brute_value"] = brute.value;
      j["brute_set"] = brute.set.members();
      j["sdp_objective"] = solution.objective;
      j["dominance_ok"] = ok;
      std::cout << j.dump() << "\n";
      return ok ? 0 : 1;
    }

    if (cmd_sweep->parsed()) {
      dks::ExperimentConfig cfg = dks::load_config(config_path);
      if (!out_dir.empty()) cfg.out_dir = out_dir;
      dks::ResultRecord record = dks::sweep(cfg);
      std::cout << record.aggregates.to_json_line() << "\n";
      return 0;
    }
  } catch (const dks::NonConvergedError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const dks::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "unexpected error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
