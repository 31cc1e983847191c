// qmaps command-line interface: one subcommand per analysis, CSV output,
// deterministic under --seed.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "qmaps/channels.hpp"
#include "qmaps/classify.hpp"
#include "qmaps/discord.hpp"
#include "qmaps/io.hpp"
#include "qmaps/states.hpp"
#include "qmaps/tomography.hpp"

namespace {

using namespace qmaps;

struct GridSize {
  int theta = 64;
  int phi = 128;
};

GridSize parse_grid(const std::string &s) {
  const auto x = s.find('x');
  if (x == std::string::npos)
    throw CLI::ValidationError("--grid", "expected format TxP, e.g. 64x128");
  GridSize g;
  g.theta = std::stoi(s.substr(0, x));
  g.phi = std::stoi(s.substr(x + 1));
  if (g.theta < 2 || g.phi < 2)
    throw CLI::ValidationError("--grid", "grid sizes must be at least 2");
  return g;
}

std::pair<Eigen::Index, Eigen::Index> parse_dims(const std::string &s) {
  const auto x = s.find('x');
  if (x == std::string::npos)
    throw std::invalid_argument("--dims expects format NxM, e.g. 2x3");
  return {std::stoll(s.substr(0, x)), std::stoll(s.substr(x + 1))};
}

Matrix resolve_unitary(const std::string &unitary_path, double omega_t,
                       Eigen::Index dim_s, Eigen::Index dim_e) {
  if (!unitary_path.empty())
    return load_unitary(unitary_path, dim_s, dim_e);
  if (dim_s != 2 || dim_e != 2)
    throw std::invalid_argument("the built-in example unitary is two-qubit; "
                                "pass --unitary for other dimensions");
  return example_unitary(omega_t);
}

void emit_trial_csv(const std::vector<TrialRecord> &records,
                    const std::string &out) {
  CsvWriter csv({"seed", "trial", "dim_s", "dim_e", "class", "min_choi_eig",
                 "discord", "completeness_err"});
  for (const auto &r : records)
    csv.row()
        .add(r.seed)
        .add(r.trial)
        .add(r.dim_s)
        .add(r.dim_e)
        .add(std::string(to_string(r.state_class)))
        .add(r.min_choi_eigenvalue)
        .add(r.discord)
        .add(r.completeness_error);
  csv.save(out);
}

void emit_reconstruction_csv(const std::vector<ReconstructionResult> &results,
                             const std::string &out) {
  CsvWriter csv({"min_eigenvalue", "negativity", "cp_distance",
                 "condition_number", "mode", "seed"});
  for (const auto &r : results)
    csv.row()
        .add(r.min_eigenvalue)
        .add(r.negativity)
        .add(r.cp_distance)
        .add(r.condition_number)
        .add(r.mode)
        .add(r.seed);
  csv.save(out);
}

int run(int argc, char **argv) {
  CLI::App app{"Reduced dynamical maps of open quantum systems: complete "
               "positivity, discord and process tomography"};
  app.require_subcommand(1);

  double tolerance = 1e-8;
  std::uint64_t seed = 0;
  int restarts = 20;
  std::string grid_spec = "64x128";
  app.add_option("--tol", tolerance, "numerical tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--seed", seed, "master RNG seed")->capture_default_str();
  app.add_option("--restarts", restarts, "optimizer restarts")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--grid", grid_spec, "discord search grid, format TxP")
      ->capture_default_str();

  // --- sweep-example ---
  auto *sweep = app.add_subcommand(
      "sweep-example", "eigenvalue sweep of the two-qubit example map");
  double sweep_c23 = 0.5;
  int sweep_points = 101;
  std::string sweep_out;
  sweep->add_option("--c23", sweep_c23, "correlation coefficient")
      ->capture_default_str();
  sweep->add_option("--points", sweep_points, "grid points over [0, pi/2]")
      ->check(CLI::Range(2, 1000000))
      ->capture_default_str();
  sweep->add_option("--out", sweep_out, "output CSV path")->required();

  // --- discord ---
  auto *disc = app.add_subcommand("discord",
                                  "mutual information and quantum discord");
  std::string disc_state, disc_out;
  disc->add_option("--state", disc_state, ".qm state file")->required();
  disc->add_option("--out", disc_out, "optional output CSV path");

  // --- classify ---
  auto *cls = app.add_subcommand("classify", "correlation taxonomy of a "
                                             "bipartite state");
  std::string cls_state, cls_out;
  cls->add_option("--state", cls_state, ".qm state file")->required();
  cls->add_option("--out", cls_out, "optional output CSV path");

  // --- cp-check ---
  auto *cpc = app.add_subcommand(
      "cp-check", "complete-positivity check of the induced dynamical map");
  std::string cpc_state, cpc_unitary, cpc_out;
  double cpc_omega_t = 0.05;
  cpc->add_option("--state", cpc_state, ".qm state file")->required();
  cpc->add_option("--unitary", cpc_unitary, ".qm joint unitary file");
  cpc->add_option("--omega-t", cpc_omega_t,
                  "example-Hamiltonian evolution angle (ignored with "
                  "--unitary)")
      ->capture_default_str();
  cpc->add_option("--out", cpc_out, "optional output CSV path");

  // --- theorem-check ---
  auto *thm = app.add_subcommand(
      "theorem-check",
      "randomized check that classical correlations give CP dynamics");
  std::uint64_t thm_trials = 500;
  std::vector<std::string> thm_dims;
  std::string thm_out;
  thm->add_option("--trials", thm_trials, "number of random trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  thm->add_option("--dims", thm_dims,
                  "system x environment dimensions, repeatable (default "
                  "2x2 2x3 3x2 3x3)");
  thm->add_option("--out", thm_out, "output CSV path")->required();

  // --- ncp-search ---
  auto *ncp = app.add_subcommand(
      "ncp-search", "randomized search for NCP maps from correlated states");
  std::uint64_t ncp_trials = 500;
  std::string ncp_sampler = "random-correlated";
  std::string ncp_out;
  ncp->add_option("--trials", ncp_trials, "number of random trials")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  ncp->add_option("--sampler", ncp_sampler, "state family")
      ->check(CLI::IsMember({"example-family", "random-correlated"}))
      ->capture_default_str();
  ncp->add_option("--out", ncp_out, "output CSV path")->required();

  // --- tomo-sim ---
  auto *tomo = app.add_subcommand(
      "tomo-sim", "simulated process tomography (single run, or the "
                  "population-0.7 scenario with --p0)");
  std::string tomo_state, tomo_mode = "rotation-only", tomo_unitary, tomo_out;
  double tomo_omega_t = 0.05;
  double tomo_p0 = -1.0;
  double tomo_strength = 1.0;
  tomo->add_option("--state", tomo_state, ".qm state file (single run)");
  tomo->add_option("--mode", tomo_mode, "preparation mode")
      ->check(CLI::IsMember({"projective", "rotation-only"}))
      ->capture_default_str();
  tomo->add_option("--unitary", tomo_unitary, ".qm joint unitary file");
  tomo->add_option("--omega-t", tomo_omega_t,
                   "example-Hamiltonian evolution angle")
      ->capture_default_str();
  tomo->add_option("--p0", tomo_p0, "fiducial population for the scenario "
                                    "comparison");
  tomo->add_option("--c23", tomo_strength,
                   "correlation strength of the discordant branch")
      ->check(CLI::Range(0.0, 1.0))
      ->capture_default_str();
  tomo->add_option("--out", tomo_out, "output CSV path")->required();

  CLI11_PARSE(app, argc, argv);

  const GridSize grid = parse_grid(grid_spec);
  OptimizerConfig opt;
  opt.grid_theta = grid.theta;
  opt.grid_phi = grid.phi;
  opt.restarts = restarts;
  opt.seed = seed;

  if (sweep->parsed()) {
    check_writable(sweep_out);
    CsvWriter csv({"omega_t", "lambda1_analytic", "lambda2_analytic",
                   "lambda3_analytic", "lambda4_analytic", "lambda1_numeric",
                   "lambda2_numeric", "lambda3_numeric", "lambda4_numeric",
                   "min_lambda"});
    const BipartiteState rho = example_state({{0.0, 0.0, 0.0}}, sweep_c23);
    for (int i = 0; i < sweep_points; ++i) {
      const double wt = 0.5 * M_PI * i / (sweep_points - 1);
      const AnalyticExample a = analytic_example(wt, sweep_c23);
      const DynamicalMap map = map_from_joint(rho, example_unitary(wt));
      const MapEigensystem es = choi_eig(map);
      csv.row()
          .add(wt)
          .add(a.lambdas[0])
          .add(a.lambdas[1])
          .add(a.lambdas[2])
          .add(a.lambdas[3])
          .add(es.lambdas(0))
          .add(es.lambdas(1))
          .add(es.lambdas(2))
          .add(es.lambdas(3))
          .add(es.lambdas(3));
    }
    csv.save(sweep_out);
    log_info("sweep written to " + sweep_out);
    return 0;
  }

  if (disc->parsed()) {
    if (!disc_out.empty())
      check_writable(disc_out);
    const BipartiteState rho = load_state(disc_state);
    const DiscordResult r = discord(rho, opt);
    std::printf("I = %s\n", format_double(r.mutual_info).c_str());
    std::printf("J = %s\n", format_double(r.j_max).c_str());
    std::printf("discord = %s\n", format_double(r.discord).c_str());
    std::printf("restarts_used = %d\n", r.restarts_used);
    std::printf("converged = %s\n", r.converged ? "true" : "false");
    if (!disc_out.empty()) {
      CsvWriter csv(
          {"mutual_info", "j_max", "discord", "restarts_used", "converged"});
      csv.row()
          .add(r.mutual_info)
          .add(r.j_max)
          .add(r.discord)
          .add(static_cast<std::uint64_t>(r.restarts_used))
          .add(std::string(r.converged ? "true" : "false"));
      csv.save(disc_out);
    }
    return 0;
  }

  if (cls->parsed()) {
    if (!cls_out.empty())
      check_writable(cls_out);
    const BipartiteState rho = load_state(cls_state);
    const StateClass c = classify_state(rho, tolerance, opt);
    std::printf("class = %s\n", to_string(c.label));
    std::printf("product_distance = %s\n",
                format_double(c.product_distance).c_str());
    std::printf("discord = %s\n", format_double(c.discord).c_str());
    std::printf("min_pt_eigenvalue = %s\n",
                format_double(c.min_pt_eigenvalue).c_str());
    if (!cls_out.empty()) {
      CsvWriter csv(
          {"class", "product_distance", "discord", "min_pt_eigenvalue"});
      csv.row()
          .add(std::string(to_string(c.label)))
          .add(c.product_distance)
          .add(c.discord)
          .add(c.min_pt_eigenvalue);
      csv.save(cls_out);
    }
    return 0;
  }

  if (cpc->parsed()) {
    if (!cpc_out.empty())
      check_writable(cpc_out);
    const BipartiteState rho = load_state(cpc_state);
    const Matrix u =
        resolve_unitary(cpc_unitary, cpc_omega_t, rho.dim_s, rho.dim_e);
    const DynamicalMap map = map_from_joint(rho, u);
    const CpVerdict v = is_cp(map, tolerance);
    std::printf("completely_positive = %s\n",
                v.completely_positive ? "true" : "false");
    std::printf("min_choi_eigenvalue = %s\n",
                format_double(v.min_eigenvalue).c_str());
    if (!cpc_out.empty()) {
      CsvWriter csv({"completely_positive", "min_choi_eigenvalue", "tol"});
      csv.row()
          .add(std::string(v.completely_positive ? "true" : "false"))
          .add(v.min_eigenvalue)
          .add(tolerance);
      csv.save(cpc_out);
    }
    return 0;
  }

  if (thm->parsed()) {
    check_writable(thm_out);
    std::vector<std::pair<Eigen::Index, Eigen::Index>> dims;
    for (const auto &s : thm_dims)
      dims.push_back(parse_dims(s));
    if (dims.empty())
      dims = {{2, 2}, {2, 3}, {3, 2}, {3, 3}};
    HarnessConfig hc;
    hc.optimizer = opt;
    const auto records = theorem_harness(thm_trials, dims, seed, hc);
    emit_trial_csv(records, thm_out);
    double worst = 0.0;
    for (const auto &r : records)
      worst = std::min(worst, r.min_choi_eigenvalue);
    std::printf("trials = %zu\n", records.size());
    std::printf("min_choi_eigenvalue = %s\n", format_double(worst).c_str());
    std::printf("violations = 0\n");
    return 0;
  }

  if (ncp->parsed()) {
    check_writable(ncp_out);
    HarnessConfig hc;
    hc.optimizer = opt;
    const NcpSampler sampler = ncp_sampler == "example-family"
                                   ? NcpSampler::ExampleFamily
                                   : NcpSampler::RandomCorrelated;
    const auto records = ncp_search(ncp_trials, sampler, seed, hc);
    emit_trial_csv(records, ncp_out);
    std::size_t ncp_count = 0;
    for (const auto &r : records)
      if (r.min_choi_eigenvalue < -1e-6)
        ++ncp_count;
    std::printf("trials = %zu\n", records.size());
    std::printf("ncp_fraction = %s\n",
                format_double(static_cast<double>(ncp_count) /
                              static_cast<double>(records.size()))
                    .c_str());
    std::printf("contrapositive_violations = 0\n");
    return 0;
  }

  if (tomo->parsed()) {
    check_writable(tomo_out);
    std::vector<ReconstructionResult> results;
    if (tomo_p0 > 0.0) {
      const Matrix u = tomo_unitary.empty()
                           ? example_unitary(tomo_omega_t)
                           : load_unitary(tomo_unitary, 2, 2);
      HowardScenarioResult hw =
          howard_scenario(tomo_p0, tomo_strength, u, seed);
      std::printf("classical: min_eigenvalue = %s, negativity = %s\n",
                  format_double(hw.classical.min_eigenvalue).c_str(),
                  format_double(hw.classical.negativity).c_str());
      std::printf("discordant: min_eigenvalue = %s, negativity = %s\n",
                  format_double(hw.discordant.min_eigenvalue).c_str(),
                  format_double(hw.discordant.negativity).c_str());
      results.push_back(std::move(hw.classical));
      results.push_back(std::move(hw.discordant));
    } else {
      if (tomo_state.empty())
        throw std::invalid_argument("tomo-sim needs --state, or --p0 for "
                                    "the scenario comparison");
      const BipartiteState rho = load_state(tomo_state);
      const Matrix u =
          resolve_unitary(tomo_unitary, tomo_omega_t, rho.dim_s, rho.dim_e);
      PreparationModel model;
      model.mode = tomo_mode == "projective"
                       ? PreparationMode::ProjectiveFiducial
                       : PreparationMode::RotationOnly;
      const TomographyRecord rec = run_process(prepare_inputs(model, rho), u);
      ReconstructionResult r = reconstruct(rec, tomo_mode, seed);
      std::printf("mode = %s\n", r.mode.c_str());
      std::printf("min_eigenvalue = %s\n",
                  format_double(r.min_eigenvalue).c_str());
      std::printf("negativity = %s\n", format_double(r.negativity).c_str());
      std::printf("cp_distance = %s\n", format_double(r.cp_distance).c_str());
      results.push_back(std::move(r));
    }
    emit_reconstruction_csv(results, tomo_out);
    return 0;
  }

  return 1;
}

} // namespace

int main(int argc, char **argv) {
  try {
    return run(argc, argv);
  } catch (const qmaps::TheoremViolation &e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const std::invalid_argument &e) {
    std::fprintf(stderr, "input error: %s\n", e.what());
    return 1;
  } catch (const std::exception &e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  }
}
