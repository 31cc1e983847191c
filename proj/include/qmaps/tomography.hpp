#ifndef QMAPS_TOMOGRAPHY_HPP
#define QMAPS_TOMOGRAPHY_HPP

#include <optional>
#include <string>
#include <vector>

#include "qmaps/channels.hpp"
#include "qmaps/core.hpp"
#include "qmaps/rng.hpp"
#include "qmaps/states.hpp"

namespace qmaps {

//=========================================================================
// Preparation models
//=========================================================================
//
// Process tomography needs a spanning set of input states.  How those
// inputs are physically produced decides what the reconstruction sees:
//
//  * ProjectiveFiducial: a rank-1 measurement creates the fiducial state;
//    the conditioned joint state factorizes exactly, so every prepared
//    input shares one environment state and the reconstruction is a
//    completely positive product-state map, whatever the original
//    correlations were.
//
//  * RotationOnly: preparation steers the system through the fiducial's
//    rotation orbit while the system-environment correlation operator
//    chi = rho - eta x tau persists.  The conditioned joint operators
//    eta_i x tau + chi are Hermitian and unit-trace but need not be
//    positive outside the compatibility domain, and the reconstruction
//    then recovers the correlation-aware extended map of map_from_joint,
//    negative eigenvalues included.

enum class PreparationMode { ProjectiveFiducial, RotationOnly };

inline const char *to_string(PreparationMode m) {
  return m == PreparationMode::ProjectiveFiducial ? "projective"
                                                  : "rotation-only";
}

struct PreparationModel {
  PreparationMode mode;
  std::optional<Matrix> fiducial; // rank-1 projector on S; defaulted if unset
  std::vector<Matrix> rotations;  // unitaries on S; defaulted if empty
};

namespace detail {

inline Matrix unitary_with_first_column(const Vector &target) {
  const Eigen::Index d = target.size();
  Matrix u = Matrix::Zero(d, d);
  u.col(0) = target.normalized();
  Eigen::Index next = 1;
  for (Eigen::Index k = 0; k < d && next < d; ++k) {
    Vector v = Vector::Zero(d);
    v(k) = 1.0;
    for (Eigen::Index j = 0; j < next; ++j)
      v -= u.col(j) * (u.col(j).adjoint() * v);
    if (v.norm() > 1e-8)
      u.col(next++) = v.normalized();
  }
  return u;
}

} // namespace detail

/// Rotations taking |0> to the standard informationally complete input
/// set: the basis states |p>, then (|p>+|q>)/sqrt2 and (|p>+i|q>)/sqrt2
/// for each pair.  For qubits this is the +z, -z, +x, +y quartet.
inline std::vector<Matrix> standard_rotations(Eigen::Index d) {
  std::vector<Matrix> rs;
  rs.reserve(d * d);
  for (Eigen::Index p = 0; p < d; ++p) {
    Vector t = Vector::Zero(d);
    t(p) = 1.0;
    rs.push_back(detail::unitary_with_first_column(t));
  }
  for (Eigen::Index p = 0; p < d; ++p)
    for (Eigen::Index q = p + 1; q < d; ++q) {
      Vector t = Vector::Zero(d);
      t(p) = 1.0 / std::sqrt(2.0);
      t(q) = 1.0 / std::sqrt(2.0);
      rs.push_back(detail::unitary_with_first_column(t));
      t(q) = Complex(0, 1.0 / std::sqrt(2.0));
      rs.push_back(detail::unitary_with_first_column(t));
    }
  return rs;
}

//=========================================================================
// Preparation and process simulation
//=========================================================================

struct PreparedInputs {
  std::vector<DensityMatrix> inputs;
  std::vector<Matrix> conditioned; // joint operators, Hermitian, trace 1
  double fiducial_probability;     // projective mode only; 1 otherwise
};

struct TomographyRecord {
  std::vector<DensityMatrix> inputs;
  std::vector<Matrix> outputs; // Hermitian unit-trace; PSD not guaranteed
                               // when the true process is NCP-extended
};

inline double gram_condition_number(const std::vector<DensityMatrix> &inputs) {
  const Eigen::Index d = inputs.front().dim();
  Matrix x(d * d, static_cast<Eigen::Index>(inputs.size()));
  for (std::size_t i = 0; i < inputs.size(); ++i)
    x.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Vector>(inputs[i].mat().data(), d * d);
  Eigen::JacobiSVD<Matrix> svd(x);
  const auto &sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 0)
    return std::numeric_limits<double>::infinity();
  return sv(0) / (sv(sv.size() - 1));
}

inline PreparedInputs prepare_inputs(const PreparationModel &model,
                                     const BipartiteState &rho_true) {
  const Eigen::Index ds = rho_true.dim_s, de = rho_true.dim_e;
  const std::vector<Matrix> rotations =
      model.rotations.empty() ? standard_rotations(ds) : model.rotations;
  for (const auto &r : rotations)
    if (!is_unitary(r) || r.rows() != ds)
      throw std::invalid_argument("prepare_inputs: rotations must be "
                                  "unitaries on the system");

  PreparedInputs out;
  out.fiducial_probability = 1.0;

  if (model.mode == PreparationMode::ProjectiveFiducial) {
    Matrix fid;
    if (model.fiducial) {
      fid = *model.fiducial;
    } else {
      fid = Matrix::Zero(ds, ds);
      fid(0, 0) = 1.0;
    }
    const Matrix pj = kron(fid, identity(de));
    Matrix conditioned = pj * rho_true.mat() * pj;
    const double p0 = conditioned.trace().real();
    if (p0 < 1e-12)
      throw std::invalid_argument("prepare_inputs: fiducial probability " +
                                  std::to_string(p0) + " below 1e-12");
    conditioned /= p0;
    out.fiducial_probability = p0;
    for (const auto &r : rotations) {
      const Matrix rj = kron(r, identity(de));
      out.conditioned.push_back(rj * conditioned * rj.adjoint());
      out.inputs.emplace_back(partial_trace(out.conditioned.back(), ds, de,
                                            Subsystem::System));
    }
  } else {
    // Correlation-template probing: chi is carried along unchanged while
    // the system is steered through the rotated fiducial orbit.
    const Matrix eta =
        partial_trace(rho_true.mat(), ds, de, Subsystem::System);
    const Matrix tau =
        partial_trace(rho_true.mat(), ds, de, Subsystem::Environment);
    const Matrix chi = rho_true.mat() - kron(eta, tau);
    Matrix fid;
    if (model.fiducial) {
      fid = *model.fiducial;
    } else {
      const EigenDecomposition dec = herm_eig(eta);
      fid = dec.eigenvectors.col(0) * dec.eigenvectors.col(0).adjoint();
    }
    for (const auto &r : rotations) {
      const Matrix eta_i = r * fid * r.adjoint();
      out.inputs.emplace_back(eta_i);
      out.conditioned.push_back(kron(eta_i, tau) + chi);
    }
  }

  const double cond = gram_condition_number(out.inputs);
  if (!(cond < 1e6))
    throw std::invalid_argument(
        "prepare_inputs: prepared inputs do not span the operator space "
        "(Gram condition number " +
        std::to_string(cond) + ")");
  return out;
}

/// Evolve the conditioned joint states and read the reduced outputs.
inline TomographyRecord run_process(const PreparedInputs &prepared,
                                    const Matrix &u) {
  if (prepared.conditioned.empty())
    throw std::invalid_argument("run_process: no prepared states");
  const Eigen::Index n = prepared.conditioned.front().rows();
  const Eigen::Index ds = prepared.inputs.front().dim();
  const Eigen::Index de = n / ds;
  check_bipartite_dims(u, ds, de, "run_process");
  if (!is_unitary(u))
    throw std::invalid_argument("run_process: u is not unitary");

  TomographyRecord rec;
  rec.inputs = prepared.inputs;
  for (const auto &joint : prepared.conditioned) {
    Matrix outp =
        partial_trace(u * joint * u.adjoint(), ds, de, Subsystem::System);
    outp = (outp + Matrix(outp.adjoint())) / 2.0;
    if (std::abs(outp.trace().real() - 1.0) > tol::kTrace)
      throw std::runtime_error("run_process: output trace " +
                               std::to_string(outp.trace().real()));
    rec.outputs.push_back(std::move(outp));
  }
  return rec;
}

//=========================================================================
// Linear inversion
//=========================================================================

/// Unique linear map with map(input_i) = output_i, assembled through the
/// pseudo-inverse of the input Gram system.
inline DynamicalMap linear_inversion(const TomographyRecord &record) {
  if (record.inputs.size() != record.outputs.size() || record.inputs.empty())
    throw std::invalid_argument("linear_inversion: need matching nonempty "
                                "input/output lists");
  const Eigen::Index d = record.inputs.front().dim();
  const Eigen::Index m = static_cast<Eigen::Index>(record.inputs.size());
  if (m < d * d)
    throw std::invalid_argument("linear_inversion: " + std::to_string(m) +
                                " inputs cannot span a " +
                                std::to_string(d * d) + "-dimensional space");

  Matrix x(d * d, m), y(d * d, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    x.col(i) = Eigen::Map<const Vector>(record.inputs[i].mat().data(), d * d);
    y.col(i) = Eigen::Map<const Matrix>(record.outputs[i].data(), d * d, 1);
  }

  Eigen::JacobiSVD<Matrix> svd(x, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto &sv = svd.singularValues();
  const double cond =
      sv(sv.size() - 1) > 0 ? sv(0) / sv(sv.size() - 1)
                            : std::numeric_limits<double>::infinity();
  if (!(cond < 1e6))
    throw std::invalid_argument("linear_inversion: rank-deficient inputs "
                                "(condition number " +
                                std::to_string(cond) + ")");

  // Superoperator S with vec(out) = S vec(in), least squares / min norm.
  Matrix sinv = Matrix::Zero(sv.size(), sv.size());
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    sinv(i, i) = 1.0 / sv(i);
  const Matrix superop =
      y * svd.matrixV() * sinv * svd.matrixU().adjoint();

  Matrix b = assemble_b_matrix(d, [&](const Matrix &e) -> Matrix {
    const Vector v = superop * Eigen::Map<const Vector>(e.data(), d * d);
    return Eigen::Map<const Matrix>(v.data(), d, d);
  });
  b = (b + Matrix(b.adjoint())) / 2.0;
  return DynamicalMap(std::move(b), d);
}

//=========================================================================
// Closest completely positive counterpart
//=========================================================================

struct ClosestCpResult {
  DynamicalMap map;
  double cp_distance;   // Frobenius distance to the input map
  double tp_violation;  // residual trace-preservation defect, reported
};

/// Zero out negative Choi eigenvalues, rebuild, rescale the Choi trace
/// back to d.  Trace preservation is not repaired, only reported.
inline ClosestCpResult closest_cp(const DynamicalMap &map) {
  const EigenDecomposition dec = herm_eig(map.b_matrix);
  Matrix rebuilt = Matrix::Zero(map.b_matrix.rows(), map.b_matrix.cols());
  double positive_trace = 0.0;
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i) {
    if (dec.eigenvalues(i) <= 0)
      continue;
    rebuilt += dec.eigenvalues(i) * dec.eigenvectors.col(i) *
               dec.eigenvectors.col(i).adjoint();
    positive_trace += dec.eigenvalues(i);
  }
  if (positive_trace <= 0)
    throw std::invalid_argument("closest_cp: map has no positive part");
  rebuilt *= static_cast<double>(map.d) / positive_trace;
  rebuilt = (rebuilt + Matrix(rebuilt.adjoint())) / 2.0;

  DynamicalMap cp(std::move(rebuilt), map.d);
  const double dist = (cp.b_matrix - map.b_matrix).norm();

  Matrix tp(map.d, map.d);
  for (Eigen::Index i = 0; i < map.d; ++i)
    for (Eigen::Index j = 0; j < map.d; ++j)
      tp(i, j) = cp.b_matrix.block(i * map.d, j * map.d, map.d, map.d).trace();
  const double tp_violation = (tp - identity(map.d)).norm();
  return {std::move(cp), dist, tp_violation};
}

//=========================================================================
// Full reconstruction reports and the Howard scenario
//=========================================================================

struct ReconstructionResult {
  DynamicalMap map;
  double min_eigenvalue;
  double negativity;
  DynamicalMap closest_cp_map;
  double cp_distance;
  double tp_violation;
  double condition_number;
  std::string mode;
  std::uint64_t seed;
};

inline ReconstructionResult reconstruct(const TomographyRecord &record,
                                        const std::string &mode,
                                        std::uint64_t seed) {
  DynamicalMap map = linear_inversion(record);
  const double cond = gram_condition_number(record.inputs);
  const double mn = min_eigenvalue(map.b_matrix);
  const double neg = negativity(map);
  ClosestCpResult cp = closest_cp(map);
  return {std::move(map),  mn,  neg,  std::move(cp.map), cp.cp_distance,
          cp.tp_violation, cond, mode, seed};
}

struct HowardScenarioResult {
  ReconstructionResult classical;
  ReconstructionResult discordant;
};

/// The population-0.7 counterfactual: at the same measured population p0,
/// compare the map reconstructed when the initial state is classically
/// correlated in the fiducial basis against the map induced when the
/// residual correlation is discordant.
///
/// Classical branch: rho = p0 |phi><phi| x tau' + (1-p0) |phi_|><phi_|| x
/// tau'' with tau', tau'' drawn under the scenario seed.  The tomography
/// rotations act on this state physically, and the recorded inputs are the
/// nominal rotated fiducials the procedure is believed to prepare.
///
/// Discordant branch: the sigma_2 x sigma_3 correlated family at matching
/// population, with c23 = strength * (largest value keeping the state
/// positive), probed in RotationOnly mode so the reconstruction recovers
/// the correlation-aware extended map.
inline HowardScenarioResult howard_scenario(double p0,
                                            double correlation_strength,
                                            const Matrix &u,
                                            std::uint64_t seed = 0) {
  if (!(p0 > 0.0) || p0 > 1.0)
    throw std::invalid_argument("howard_scenario: p0 must be in (0, 1]");
  if (correlation_strength < 0.0 || correlation_strength > 1.0)
    throw std::invalid_argument("howard_scenario: correlation strength must "
                                "be in [0, 1]");
  check_bipartite_dims(u, 2, 2, "howard_scenario");
  if (!is_unitary(u))
    throw std::invalid_argument("howard_scenario: u is not unitary");

  Rng rng_a = Rng::substream(seed, 0);
  Rng rng_b = Rng::substream(seed, 1);
  const DensityMatrix tau1 = random_density(2, rng_a);
  const DensityMatrix tau2 = random_density(2, rng_b);

  Matrix phi = Matrix::Zero(2, 2), phi_perp = Matrix::Zero(2, 2);
  phi(0, 0) = 1.0;
  phi_perp(1, 1) = 1.0;

  // --- classical branch ---
  Matrix rho_cl = p0 * kron(phi, tau1.mat());
  if (p0 < 1.0)
    rho_cl += (1.0 - p0) * kron(phi_perp, tau2.mat());
  const std::vector<Matrix> rotations = standard_rotations(2);

  TomographyRecord rec_cl;
  for (const auto &r : rotations) {
    const Matrix rj = kron(r, identity(2));
    const Matrix joint = rj * rho_cl * rj.adjoint();
    rec_cl.inputs.emplace_back(r * phi * r.adjoint());
    Matrix outp = partial_trace(u * joint * u.adjoint(), 2, 2,
                                Subsystem::System);
    rec_cl.outputs.push_back((outp + Matrix(outp.adjoint())) / 2.0);
  }
  ReconstructionResult classical =
      reconstruct(rec_cl, "howard-classical", seed);

  // --- discordant branch ---
  const BlochVector a{{0.0, 0.0, 2.0 * p0 - 1.0}};
  const double c23 = correlation_strength * example_state_max_c23(a);
  const BipartiteState rho_d = example_state(a, c23);
  PreparationModel model{PreparationMode::RotationOnly, phi, rotations};
  const TomographyRecord rec_d = run_process(prepare_inputs(model, rho_d), u);
  ReconstructionResult discordant =
      reconstruct(rec_d, "howard-discordant", seed);

  return {std::move(classical), std::move(discordant)};
}

} // namespace qmaps

#endif // QMAPS_TOMOGRAPHY_HPP
