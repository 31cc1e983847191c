// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure.  argv[1] must be the path to the qmaps CLI binary (used by the
// determinism criterion).

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "qmaps/channels.hpp"
#include "qmaps/classify.hpp"
#include "qmaps/discord.hpp"
#include "qmaps/io.hpp"
#include "qmaps/states.hpp"
#include "qmaps/tomography.hpp"

namespace fs = std::filesystem;
using namespace qmaps;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(int criterion, const std::string &name, bool pass,
            const std::string &details) {
  std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL",
              criterion, name.c_str(), details.c_str());
  std::fflush(stdout);
  if (!pass)
    ++g_failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) { return format_double(v); }

// --------------------------------------------------------------------
// 1. Eigenvalue-formula reproduction across the sweep grid
// --------------------------------------------------------------------
void criterion1() {
  const auto t0 = Clock::now();
  double max_err = 0.0, max_sum_err = 0.0;
  for (double c23 : {0.0, 0.25, 0.5, 1.0}) {
    const BipartiteState rho = example_state({{0, 0, 0}}, c23);
    for (int i = 0; i < 101; ++i) {
      const double wt = 0.5 * M_PI * i / 100.0;
      const AnalyticExample a = analytic_example(wt, c23);
      const MapEigensystem es =
          choi_eig(map_from_joint(rho, example_unitary(wt)));
      for (int k = 0; k < 4; ++k)
        max_err = std::max(max_err, std::abs(es.lambdas(k) - a.lambdas[k]));
      max_sum_err = std::max(max_sum_err, std::abs(es.lambdas.sum() - 2.0));
    }
  }
  const double elapsed = seconds_since(t0);
  const bool pass = max_err < 1e-9 && max_sum_err < 1e-10 && elapsed < 5.0;
  report(1, "eigenvalue-formula reproduction", pass,
         "max |numeric-analytic| = " + fmt(max_err) +
             ", max |sum-2| = " + fmt(max_sum_err) + ", " + fmt(elapsed) +
             " s");
}

// --------------------------------------------------------------------
// 2. CP boundary at c23 = 1
// --------------------------------------------------------------------
void criterion2() {
  const BipartiteState rho = example_state({{0, 0, 0}}, 1.0);
  const auto min_at = [&](double wt) {
    return min_eigenvalue(map_from_joint(rho, example_unitary(wt)).b_matrix);
  };
  const double at_boundary = min_at(M_PI / 8.0);
  const double below = min_at(M_PI / 16.0);
  const double above = min_at(3.0 * M_PI / 16.0);
  const bool pass =
      std::abs(at_boundary) < 1e-9 && below < -1e-3 && above > 1e-3;
  report(2, "CP boundary at omega t = pi/8", pass,
         "min(pi/8) = " + fmt(at_boundary) + ", min(pi/16) = " + fmt(below) +
             ", min(3pi/16) = " + fmt(above));
}

// --------------------------------------------------------------------
// 3. Theorem suite: 500 classically correlated trials
// --------------------------------------------------------------------
void criterion3() {
  const auto t0 = Clock::now();
  HarnessConfig hc;
  hc.compute_discord = false; // the criterion asserts the map quantities only
  bool pass = true;
  std::string detail;
  double worst_choi = 0.0, worst_comp = 0.0, worst_match = 0.0,
         worst_extra = 0.0;
  try {
    const auto records =
        theorem_harness(500, {{2, 2}, {2, 3}, {3, 2}, {3, 3}}, 2024, hc);
    for (const auto &r : records) {
      worst_choi = std::min(worst_choi, r.min_choi_eigenvalue);
      worst_comp = std::max(worst_comp, r.completeness_error);
      worst_match = std::max(worst_match, r.match_error);
      worst_extra = std::max(worst_extra, r.extra_match_error);
    }
    pass = worst_choi > -1e-10 && worst_comp < 1e-10 && worst_match < 1e-10 &&
           worst_extra < 1e-10;
    detail = "500 trials, min Choi = " + fmt(worst_choi) +
             ", max completeness err = " + fmt(worst_comp) +
             ", max match err = " + fmt(worst_match) +
             ", max extra-marginal err = " + fmt(worst_extra);
  } catch (const TheoremViolation &e) {
    pass = false;
    detail = std::string("violation: ") + e.what();
  }
  const double elapsed = seconds_since(t0);
  pass = pass && elapsed < 60.0;
  report(3, "classical correlations give CP dynamics", pass,
         detail + ", " + fmt(elapsed) + " s");
}

// --------------------------------------------------------------------
// 4. Contrapositive suite: NCP implies discord
// --------------------------------------------------------------------
void criterion4() {
  HarnessConfig hc;
  hc.optimizer.restarts = 20;
  bool pass = true;
  std::string detail;
  try {
    const auto records =
        ncp_search(500, NcpSampler::RandomCorrelated, 2024, hc);
    std::size_t ncp = 0;
    double min_ncp_discord = std::numeric_limits<double>::infinity();
    for (const auto &r : records)
      if (r.min_choi_eigenvalue < -1e-6) {
        ++ncp;
        min_ncp_discord = std::min(min_ncp_discord, r.discord);
        if (r.discord <= 1e-6)
          pass = false;
      }
    detail = "500 trials, " + std::to_string(ncp) +
             " NCP records, min discord among them = " +
             fmt(min_ncp_discord);
  } catch (const TheoremViolation &e) {
    pass = false;
    detail = std::string("violation: ") + e.what();
  }
  report(4, "NCP maps only from discordant states", pass, detail);
}

// --------------------------------------------------------------------
// 5. Discord values against the brute-force grid oracle
// --------------------------------------------------------------------

// Independent conditional-entropy evaluation: explicit projectors, full
// (Pi x 1) rho (Pi x 1) conditioning, eigenvalue entropy.
double oracle_conditional_entropy(const Matrix &rho, double theta,
                                  double phi) {
  Vector psi(2);
  psi << std::cos(theta / 2.0),
      std::exp(Complex(0, phi)) * std::sin(theta / 2.0);
  double total = 0.0;
  for (int sign = 0; sign < 2; ++sign) {
    const Matrix proj =
        sign == 0 ? Matrix(psi * psi.adjoint())
                  : Matrix(identity(2) - psi * psi.adjoint());
    const Matrix pj = kron(proj, identity(2));
    const Matrix cond = pj * rho * pj;
    const double p = cond.trace().real();
    if (p < 1e-14)
      continue;
    const Matrix red = partial_trace(cond, 2, 2, Subsystem::Environment) / p;
    Eigen::SelfAdjointEigenSolver<Matrix> es(red);
    double h = 0.0;
    for (Eigen::Index i = 0; i < 2; ++i) {
      const double v = es.eigenvalues()(i);
      if (v > 1e-300)
        h -= v * std::log2(v);
    }
    total += p * h;
  }
  return total;
}

double oracle_discord_256x512(const BipartiteState &rho) {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < 256; ++i) {
    const double th = M_PI * i / 255.0;
    for (int j = 0; j < 512; ++j) {
      const double ph = 2.0 * M_PI * j / 512.0;
      best = std::min(best, oracle_conditional_entropy(rho.mat(), th, ph));
    }
  }
  const double he =
      vn_entropy(partial_trace(rho.mat(), 2, 2, Subsystem::Environment));
  return mutual_information(rho) - (he - best);
}

void criterion5() {
  OptimizerConfig cfg; // defaults: 64x128 grid, simplex refinement

  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const BipartiteState bell(DensityMatrix(v * v.adjoint()), 2, 2);
  const double bell_discord = discord(bell, cfg).discord;

  Matrix cc = Matrix::Zero(4, 4);
  cc(0, 0) = cc(3, 3) = 0.5;
  const double cc_discord =
      discord(BipartiteState(DensityMatrix(cc), 2, 2), cfg).discord;

  Rng rng(55);
  const BipartiteState prod(
      DensityMatrix(kron(random_density(2, rng).mat(),
                         random_density(2, rng).mat())),
      2, 2);
  const double prod_mi = mutual_information(prod);

  double max_oracle_gap = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const BipartiteState rho(random_density(4, rng), 2, 2);
    const double opt = discord(rho, cfg).discord;
    const double oracle = oracle_discord_256x512(rho);
    max_oracle_gap = std::max(max_oracle_gap, std::abs(opt - oracle));
  }

  const bool pass = std::abs(bell_discord - 1.0) < 1e-4 &&
                    cc_discord < 1e-6 && std::abs(prod_mi) < 1e-10 &&
                    max_oracle_gap < 1e-4;
  report(5, "discord reference values and grid oracle", pass,
         "bell = " + fmt(bell_discord) + ", classical = " + fmt(cc_discord) +
             ", product MI = " + fmt(prod_mi) +
             ", max |opt-oracle| over 20 states = " + fmt(max_oracle_gap));
}

// --------------------------------------------------------------------
// 6. PPT facts
// --------------------------------------------------------------------
void criterion6() {
  Rng rng(66);
  double max_pt_dist = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const double z = rng.uniform(-1, 1), ph = rng.uniform(0, 2 * M_PI);
    const double r = rng.uniform(0, 0.9), s = std::sqrt(1 - z * z);
    const BlochVector a{{r * s * std::cos(ph), r * z, r * s * std::sin(ph)}};
    const double cmax = example_state_max_c23(a);
    const double c23 = rng.uniform(0.0, 0.99) * cmax;
    const Matrix rho = example_state(a, c23).mat();
    max_pt_dist =
        std::max(max_pt_dist,
                 (partial_transpose(rho, 2, 2, Subsystem::Environment) - rho)
                     .norm());
  }
  // include the maximal-correlation corner
  const Matrix corner = example_state({{0, 0, 0}}, 1.0).mat();
  max_pt_dist = std::max(
      max_pt_dist,
      (partial_transpose(corner, 2, 2, Subsystem::Environment) - corner)
          .norm());

  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  const double bell_pt =
      ppt_min_eigenvalue(BipartiteState(DensityMatrix(v * v.adjoint()), 2, 2));

  const bool pass = max_pt_dist < 1e-12 && std::abs(bell_pt + 0.5) < 1e-12;
  report(6, "PPT facts", pass,
         "max ||rho^PT - rho|| = " + fmt(max_pt_dist) +
             ", Bell PT min eigenvalue = " + fmt(bell_pt));
}

// --------------------------------------------------------------------
// 7. Tomography
// --------------------------------------------------------------------
void criterion7() {
  Rng rng(77);
  bool pass = true;
  std::string detail;

  // projective preparation: CP for 100 randomized pairs, discordant
  // true states included
  double worst = 0.0;
  PreparationModel projective{PreparationMode::ProjectiveFiducial,
                              std::nullopt,
                              {}};
  for (int rep = 0; rep < 100; ++rep) {
    BipartiteState rho = [&]() -> BipartiteState {
      switch (rep % 3) {
      case 0:
        return BipartiteState(random_density(4, rng), 2, 2);
      case 1: {
        double wt = 0;
        Matrix u;
        return qmaps::detail::sample_example_family(rng, wt, u);
      }
      default:
        return random_classically_correlated(2, 2, rng);
      }
    }();
    const Matrix u = random_unitary(4, rng);
    const DynamicalMap map =
        linear_inversion(run_process(prepare_inputs(projective, rho), u));
    worst = std::min(worst, min_eigenvalue(map.b_matrix));
  }
  pass = pass && worst >= -1e-9;
  detail += "projective min over 100 pairs = " + fmt(worst);

  // rotation-only on the maximally correlated family member reconstructs
  // the NCP map
  const BipartiteState rho_ncp = example_state({{0, 0, 0}}, 1.0);
  const Matrix u_ncp = example_unitary(0.05);
  PreparationModel rotation{PreparationMode::RotationOnly, std::nullopt, {}};
  const DynamicalMap rebuilt =
      linear_inversion(run_process(prepare_inputs(rotation, rho_ncp), u_ncp));
  const DynamicalMap direct = map_from_joint(rho_ncp, u_ncp);
  const double gap = std::abs(min_eigenvalue(rebuilt.b_matrix) -
                              min_eigenvalue(direct.b_matrix));
  pass = pass && gap < 1e-9 && min_eigenvalue(rebuilt.b_matrix) < -1e-3;
  detail += ", NCP reconstruction gap = " + fmt(gap);

  // closest CP projection: PSD, trace d, idempotent
  const ClosestCpResult cp = closest_cp(rebuilt);
  const ClosestCpResult cp2 = closest_cp(cp.map);
  const double psd = min_eigenvalue(cp.map.b_matrix);
  const double trace_err = std::abs(cp.map.b_matrix.trace().real() - 2.0);
  const double idem = (cp2.map.b_matrix - cp.map.b_matrix).norm();
  pass = pass && psd >= -1e-12 && trace_err < 1e-10 && idem < 1e-10;
  detail += ", closest-CP min = " + fmt(psd) +
            ", trace err = " + fmt(trace_err) + ", idempotence = " + fmt(idem);

  report(7, "process tomography", pass, detail);
}

// --------------------------------------------------------------------
// 8. Howard scenario at p0 = 0.7
// --------------------------------------------------------------------
void criterion8() {
  const Matrix u = example_unitary(0.05); // 2 omega t = 0.1
  double worst_classical = 0.0, min_negativity =
                                    std::numeric_limits<double>::infinity();
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const HowardScenarioResult r = howard_scenario(0.7, 1.0, u, seed);
    worst_classical = std::min(worst_classical, r.classical.min_eigenvalue);
    min_negativity = std::min(min_negativity, r.discordant.negativity);
  }
  const bool pass = worst_classical >= -1e-9 && min_negativity > 1e-3;
  report(8, "Howard scenario at p0 = 0.7", pass,
         "classical min eigenvalue over 50 seeds = " + fmt(worst_classical) +
             ", discordant negativity = " + fmt(min_negativity));
}

// --------------------------------------------------------------------
// 9. CLI determinism
// --------------------------------------------------------------------

struct CliRun {
  std::string name;
  std::string args;
  std::vector<std::string> outputs; // files the command writes
};

std::string slurp(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion9(const std::string &cli) {
  if (cli.empty()) {
    report(9, "CLI determinism", false, "no CLI path given");
    return;
  }
  const fs::path base =
      fs::temp_directory_path() / "qmaps_acceptance_cli";
  fs::remove_all(base);
  fs::create_directories(base);

  // shared input states
  Vector v = Vector::Zero(4);
  v(0) = v(3) = 1.0 / std::sqrt(2.0);
  save_state((base / "bell.qm").string(),
             BipartiteState(DensityMatrix(v * v.adjoint()), 2, 2));
  save_state((base / "eq3.qm").string(), example_state({{0.4, 0, 0.2}}, 0.5));
  save_state((base / "eq3max.qm").string(), example_state({{0, 0, 0}}, 1.0));

  const std::vector<CliRun> runs = {
      {"sweep-example",
       "sweep-example --c23 0.5 --points 21 --out {dir}/s.csv",
       {"s.csv"}},
      {"discord",
       "--seed 3 --restarts 5 --grid 24x48 discord --state {bell} "
       "--out {dir}/d.csv",
       {"d.csv"}},
      {"classify", "--seed 1 classify --state {eq3} --out {dir}/c.csv",
       {"c.csv"}},
      {"cp-check",
       "cp-check --state {eq3max} --omega-t 0.05 --out {dir}/cp.csv",
       {"cp.csv"}},
      {"theorem-check",
       "--seed 7 theorem-check --trials 6 --dims 2x2 --dims 3x2 "
       "--out {dir}/t.csv",
       {"t.csv"}},
      {"ncp-search",
       "--seed 3 ncp-search --trials 6 --sampler example-family "
       "--out {dir}/n.csv",
       {"n.csv"}},
      {"tomo-sim-howard",
       "--seed 5 tomo-sim --p0 0.7 --c23 1 --omega-t 0.05 --out {dir}/h.csv",
       {"h.csv"}},
      {"tomo-sim-single",
       "--seed 2 tomo-sim --state {eq3} --mode projective --omega-t 0.3 "
       "--out {dir}/ts.csv",
       {"ts.csv"}},
  };

  bool pass = true;
  std::string detail;
  for (const auto &run : runs) {
    std::vector<std::string> contents[2];
    for (int attempt = 0; attempt < 2 && pass; ++attempt) {
      const fs::path dir =
          base / (run.name + "_" + std::to_string(attempt));
      fs::create_directories(dir);
      std::string args = run.args;
      const auto substitute = [&args](const std::string &key,
                                      const std::string &value) {
        for (std::size_t pos = args.find(key); pos != std::string::npos;
             pos = args.find(key))
          args.replace(pos, key.size(), value);
      };
      substitute("{dir}", dir.string());
      substitute("{bell}", (base / "bell.qm").string());
      substitute("{eq3}", (base / "eq3.qm").string());
      substitute("{eq3max}", (base / "eq3max.qm").string());

      const std::string stdout_file = (dir / "stdout.txt").string();
      const std::string cmd = "QMAPS_LOG=quiet \"" + cli + "\" " + args +
                              " > \"" + stdout_file + "\" 2>/dev/null";
      const int rc = std::system(cmd.c_str());
      if (rc != 0) {
        pass = false;
        detail += run.name + " exited " + std::to_string(rc) + "; ";
        break;
      }
      contents[attempt].push_back(slurp(stdout_file));
      for (const auto &f : run.outputs)
        contents[attempt].push_back(slurp(dir / f));
    }
    if (pass && contents[0] != contents[1]) {
      pass = false;
      detail += run.name + " not byte-identical; ";
    }
  }
  if (pass)
    detail = "8 subcommand invocations, each byte-identical across two runs";
  report(9, "CLI determinism", pass, detail);
  fs::remove_all(base);
}

} // namespace

int main(int argc, char **argv) {
  const std::string cli = argc > 1 ? argv[1] : "";
  const auto t0 = Clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();
  criterion5();
  criterion6();
  criterion7();
  criterion8();
  criterion9(cli);
  std::printf("%d/9 criteria passed in %s s\n", 9 - g_failures,
              fmt(seconds_since(t0)).c_str());
  return g_failures == 0 ? 0 : 1;
}
