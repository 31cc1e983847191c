#ifndef QMAPS_DISCORD_HPP
#define QMAPS_DISCORD_HPP

#include <functional>
#include <optional>
#include <vector>

#include "qmaps/channels.hpp"
#include "qmaps/core.hpp"
#include "qmaps/rng.hpp"
#include "qmaps/states.hpp"

namespace qmaps {

//=========================================================================
// Entropic correlation measures (all in bits)
//=========================================================================

inline double mutual_information(const BipartiteState &rho) {
  const double hs = vn_entropy(
      partial_trace(rho.mat(), rho.dim_s, rho.dim_e, Subsystem::System));
  const double he = vn_entropy(
      partial_trace(rho.mat(), rho.dim_s, rho.dim_e, Subsystem::Environment));
  return hs + he - vn_entropy(rho.mat());
}

namespace detail {

// Entropy of an unnormalized PSD operator with trace p, as p * H(m/p).
// Small negative eigenvalues from conditioning noise are clamped.
inline double weighted_entropy(const Matrix &m, double p) {
  if (p < 1e-14)
    return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
  double h = 0.0;
  for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
    const double v = solver.eigenvalues()(i) / p;
    if (v > 1e-300)
      h -= v * std::log2(v);
  }
  return p * h;
}

// Conditional entropy for a qubit measurement direction (theta, phi) on S.
// With |psi> = (cos(t/2), e^{i phi} sin(t/2)), the unnormalized
// conditional operator on E is M(a,b) = <psi| rho |psi> contracted over S,
// and the complement is tau - M.
inline double cond_entropy_bloch(const Matrix &rho, Eigen::Index de,
                                 double theta, double phi) {
  const Complex psi0(std::cos(theta / 2.0), 0.0);
  const Complex psi1 = std::exp(Complex(0, phi)) * std::sin(theta / 2.0);
  Matrix m = std::conj(psi0) * psi0 * rho.block(0, 0, de, de) +
             std::conj(psi0) * psi1 * rho.block(0, de, de, de) +
             std::conj(psi1) * psi0 * rho.block(de, 0, de, de) +
             std::conj(psi1) * psi1 * rho.block(de, de, de, de);
  Matrix tau = rho.block(0, 0, de, de) + rho.block(de, de, de, de);
  const double p = m.trace().real();
  return weighted_entropy(m, p) + weighted_entropy(tau - m, 1.0 - p);
}

} // namespace detail

/// sum_j p_j H(rho_{E|Pi_j}) for rank-1 projective measurement of S.
/// Outcomes with p_j < 1e-14 contribute zero.
inline double conditional_entropy(const BipartiteState &rho,
                                  const ProjectorBasis &basis) {
  if (basis.dim() != rho.dim_s)
    throw std::invalid_argument("conditional_entropy: basis must act on the "
                                "system");
  double total = 0.0;
  for (const auto &proj : basis.projectors()) {
    const Matrix pj = kron(proj, identity(rho.dim_e));
    const Matrix conditioned = pj * rho.mat() * pj;
    const double p = conditioned.trace().real();
    const Matrix reduced =
        partial_trace(conditioned, rho.dim_s, rho.dim_e, Subsystem::Environment);
    total += detail::weighted_entropy(reduced, p);
  }
  return total;
}

//=========================================================================
// Nelder-Mead simplex minimizer (gradient-free local descent)
//=========================================================================

struct SimplexResult {
  Eigen::VectorXd x;
  double value;
  bool converged;
};

inline SimplexResult
nelder_mead(const std::function<double(const Eigen::VectorXd &)> &f,
            const Eigen::VectorXd &start, double scale, double step_tol,
            int max_iter) {
  const int n = static_cast<int>(start.size());
  std::vector<Eigen::VectorXd> xs(n + 1, start);
  std::vector<double> fs(n + 1);
  for (int i = 1; i <= n; ++i)
    xs[i](i - 1) += scale;
  for (int i = 0; i <= n; ++i)
    fs[i] = f(xs[i]);

  auto order = [&] {
    for (int i = 1; i <= n; ++i)
      for (int j = i; j > 0 && fs[j] < fs[j - 1]; --j) {
        std::swap(fs[j], fs[j - 1]);
        std::swap(xs[j], xs[j - 1]);
      }
  };
  order();

  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    double diam = 0.0;
    for (int i = 1; i <= n; ++i)
      diam = std::max(diam, (xs[i] - xs[0]).norm());
    if (diam < step_tol) {
      converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i)
      centroid += xs[i];
    centroid /= n;

    const Eigen::VectorXd xr = centroid + (centroid - xs[n]);
    const double fr = f(xr);
    if (fr < fs[0]) {
      const Eigen::VectorXd xe = centroid + 2.0 * (centroid - xs[n]);
      const double fe = f(xe);
      if (fe < fr) {
        xs[n] = xe;
        fs[n] = fe;
      } else {
        xs[n] = xr;
        fs[n] = fr;
      }
    } else if (fr < fs[n - 1]) {
      xs[n] = xr;
      fs[n] = fr;
    } else {
      const Eigen::VectorXd xc = centroid + 0.5 * (xs[n] - centroid);
      const double fc = f(xc);
      if (fc < fs[n]) {
        xs[n] = xc;
        fs[n] = fc;
      } else {
        for (int i = 1; i <= n; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = f(xs[i]);
        }
      }
    }
    order();
  }
  return {xs[0], fs[0], converged};
}

//=========================================================================
// Discord via optimization over projective measurements on S
//=========================================================================

struct OptimizerConfig {
  int grid_theta = 64;
  int grid_phi = 128;
  int restarts = 20;
  double step_tol = 1e-8;
  int max_iter = 500;
  std::uint64_t seed = 0;
};

struct DiscordResult {
  double mutual_info;
  double j_max;
  double discord;
  ProjectorBasis best_basis;
  int restarts_used;
  bool converged;
  bool clamped; // raw discord was in [-1e-6, 0) and reported as 0
};

namespace detail {

inline ProjectorBasis basis_from_bloch_angles(double theta, double phi) {
  Matrix v(2, 2);
  const Complex e = std::exp(Complex(0, phi));
  v(0, 0) = std::cos(theta / 2.0);
  v(1, 0) = e * std::sin(theta / 2.0);
  v(0, 1) = std::sin(theta / 2.0);
  v(1, 1) = -e * std::cos(theta / 2.0);
  return ProjectorBasis::from_unitary(v);
}

// Unitary from a product of two-level rotations with phases; params hold
// (theta, phi) for each index pair in lexicographic order.
inline Matrix givens_product(Eigen::Index d, const Eigen::VectorXd &params) {
  Matrix v = Matrix::Identity(d, d);
  Eigen::Index k = 0;
  for (Eigen::Index p = 0; p < d; ++p)
    for (Eigen::Index q = p + 1; q < d; ++q) {
      const double th = params(2 * k), ph = params(2 * k + 1);
      Matrix g = Matrix::Identity(d, d);
      g(p, p) = std::cos(th);
      g(q, q) = std::cos(th);
      g(p, q) = -std::sin(th) * std::exp(Complex(0, -ph));
      g(q, p) = std::sin(th) * std::exp(Complex(0, ph));
      v = g * v;
      ++k;
    }
  return v;
}

struct JOptimum {
  double min_cond_entropy;
  ProjectorBasis basis;
  int restarts_used;
  bool converged;
};

inline JOptimum minimize_conditional_entropy(const BipartiteState &rho,
                                             const OptimizerConfig &cfg) {
  if (rho.dim_s == 2) {
    // Coarse Bloch-sphere grid, then simplex refinement.
    const Matrix &m = rho.mat();
    const Eigen::Index de = rho.dim_e;
    double best = std::numeric_limits<double>::infinity();
    double best_th = 0.0, best_ph = 0.0;
    for (int i = 0; i < cfg.grid_theta; ++i) {
      const double th = M_PI * i / (cfg.grid_theta - 1);
      for (int j = 0; j < cfg.grid_phi; ++j) {
        const double ph = 2.0 * M_PI * j / cfg.grid_phi;
        const double v = cond_entropy_bloch(m, de, th, ph);
        if (v < best) {
          best = v;
          best_th = th;
          best_ph = ph;
        }
      }
    }
    Eigen::VectorXd start(2);
    start << best_th, best_ph;
    const double scale =
        std::max(M_PI / cfg.grid_theta, 2.0 * M_PI / cfg.grid_phi);
    auto objective = [&](const Eigen::VectorXd &x) {
      return cond_entropy_bloch(m, de, x(0), x(1));
    };
    const SimplexResult r =
        nelder_mead(objective, start, scale, cfg.step_tol, cfg.max_iter);
    return {std::min(r.value, best), basis_from_bloch_angles(r.x(0), r.x(1)),
            1, r.converged};
  }

  // dim_s >= 3: bases parametrized by products of two-level rotations,
  // local descent from random restarts.
  const Eigen::Index d = rho.dim_s;
  const Eigen::Index nparams = d * (d - 1);
  auto objective = [&](const Eigen::VectorXd &x) {
    return conditional_entropy(rho,
                               ProjectorBasis::from_unitary(givens_product(d, x)));
  };
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_x = Eigen::VectorXd::Zero(nparams);
  bool converged = false;
  for (int r = 0; r < cfg.restarts; ++r) {
    Eigen::VectorXd start(nparams);
    if (r == 0) {
      start.setZero(); // canonical basis
    } else {
      Rng rng = Rng::substream(cfg.seed, static_cast<std::uint64_t>(r));
      for (Eigen::Index i = 0; i < nparams; ++i)
        start(i) = (i % 2 == 0) ? rng.uniform(0.0, M_PI)
                                : rng.uniform(0.0, 2.0 * M_PI);
    }
    const SimplexResult res =
        nelder_mead(objective, start, 0.3, cfg.step_tol, cfg.max_iter);
    if (res.value < best) {
      best = res.value;
      best_x = res.x;
      converged = res.converged;
    }
  }
  return {best, ProjectorBasis::from_unitary(givens_product(d, best_x)),
          cfg.restarts, converged};
}

} // namespace detail

/// Quantum discord D = I - max_Pi J with projective measurements on S.
inline DiscordResult discord(const BipartiteState &rho,
                             const OptimizerConfig &cfg = {}) {
  const double he = vn_entropy(
      partial_trace(rho.mat(), rho.dim_s, rho.dim_e, Subsystem::Environment));
  const double mi = mutual_information(rho);
  detail::JOptimum opt = detail::minimize_conditional_entropy(rho, cfg);
  const double j_max = he - opt.min_cond_entropy;
  const double raw = mi - j_max;

  DiscordResult out{mi,
                    j_max,
                    raw,
                    std::move(opt.basis),
                    opt.restarts_used,
                    opt.converged,
                    false};
  if (raw < 0.0) {
    out.discord = 0.0;
    out.clamped = true;
    if (raw < -1e-6)
      out.converged = false; // optimizer overshot the mathematical bound
  }
  return out;
}

//=========================================================================
// Structural zero-discord test
//=========================================================================

struct ZeroDiscordResult {
  bool zero_discord;
  std::optional<ProjectorBasis> witness; // set when zero_discord is true
  double dephasing_distance;             // ||sum Pi rho Pi - rho||_F
  bool used_variational;
};

namespace detail {

inline double dephasing_distance(const BipartiteState &rho,
                                 const ProjectorBasis &basis) {
  Matrix dephased = Matrix::Zero(rho.mat().rows(), rho.mat().cols());
  for (const auto &proj : basis.projectors()) {
    const Matrix pj = kron(proj, identity(rho.dim_e));
    dephased += pj * rho.mat() * pj;
  }
  return (dephased - rho.mat()).norm();
}

// Hermitian operator basis of the environment, Frobenius-normalized.
inline std::vector<Matrix> hermitian_basis(Eigen::Index d) {
  std::vector<Matrix> out;
  for (Eigen::Index p = 0; p < d; ++p) {
    Matrix m = Matrix::Zero(d, d);
    m(p, p) = 1.0;
    out.push_back(m);
  }
  const double s = 1.0 / std::sqrt(2.0);
  for (Eigen::Index p = 0; p < d; ++p)
    for (Eigen::Index q = p + 1; q < d; ++q) {
      Matrix x = Matrix::Zero(d, d);
      x(p, q) = s;
      x(q, p) = s;
      out.push_back(x);
      Matrix y = Matrix::Zero(d, d);
      y(p, q) = Complex(0, -s);
      y(q, p) = Complex(0, s);
      out.push_back(y);
    }
  return out;
}

} // namespace detail

/// True iff some projector basis on S dephases rho onto itself within tol.
///
/// Structural route: the conditional operators A_k = Tr_E[(1 x B_k) rho]
/// of a classically correlated state all commute; when they do (and their
/// joint eigenbasis is non-degenerate) the common eigenbasis is the unique
/// candidate.  A commutator above 4*tol rules the state out, since a
/// dephasing distance eps perturbs each normalized A_k by at most eps.
/// Degenerate or borderline cases fall back to thresholding the
/// variational discord at tol.
inline ZeroDiscordResult zero_discord_test(const BipartiteState &rho,
                                           double tolerance = 1e-8,
                                           const OptimizerConfig &cfg = {}) {
  const auto bs = detail::hermitian_basis(rho.dim_e);
  std::vector<Matrix> conditionals;
  conditionals.reserve(bs.size());
  for (const auto &b : bs)
    conditionals.push_back(partial_trace(kron(identity(rho.dim_s), b) *
                                             rho.mat(),
                                         rho.dim_s, rho.dim_e,
                                         Subsystem::System));
  double max_comm = 0.0;
  for (std::size_t k = 0; k < conditionals.size(); ++k)
    for (std::size_t l = k + 1; l < conditionals.size(); ++l)
      max_comm = std::max(max_comm, (conditionals[k] * conditionals[l] -
                                     conditionals[l] * conditionals[k])
                                        .norm());

  // A dephasing distance eps perturbs each contracted conditional by at
  // most sqrt(dim_e)*eps, so commutators above this bound are conclusive.
  const double reject_bound =
      4.0 * std::sqrt(static_cast<double>(rho.dim_e)) * tolerance;
  if (max_comm >= reject_bound)
    return {false, std::nullopt, std::numeric_limits<double>::infinity(),
            false};

  if (max_comm < tolerance) {
    // Common eigenbasis of a fixed-weight combination; the weights are
    // deterministic and generic enough to split non-degenerate spectra.
    Matrix combo = Matrix::Zero(rho.dim_s, rho.dim_s);
    for (std::size_t k = 0; k < conditionals.size(); ++k) {
      const double w =
          0.25 + 0.5 * (splitmix64(k + 17) % 4096) / 4096.0;
      combo += w * conditionals[k];
    }
    const EigenDecomposition dec = herm_eig(combo);
    double min_gap = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i + 1 < dec.eigenvalues.size(); ++i)
      min_gap = std::min(min_gap,
                         dec.eigenvalues(i) - dec.eigenvalues(i + 1));
    if (min_gap > 1e-10) {
      const ProjectorBasis candidate =
          ProjectorBasis::from_unitary(dec.eigenvectors);
      const double dist = detail::dephasing_distance(rho, candidate);
      if (dist < tolerance)
        return {true, candidate, dist, false};
    }
  }

  // Fallback: variational route.
  const DiscordResult d = discord(rho, cfg);
  if (d.discord < tolerance) {
    const double dist = detail::dephasing_distance(rho, d.best_basis);
    return {true, d.best_basis, dist, true};
  }
  return {false, std::nullopt, std::numeric_limits<double>::infinity(), true};
}

} // namespace qmaps

#endif // QMAPS_DISCORD_HPP
