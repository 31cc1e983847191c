#ifndef QMAPS_CHANNELS_HPP
#define QMAPS_CHANNELS_HPP

#include <array>
#include <vector>

#include "qmaps/core.hpp"
#include "qmaps/states.hpp"

namespace qmaps {

//=========================================================================
// Dynamical maps as B/Choi matrices
//=========================================================================
//
// Convention: b_matrix = sum_ij E_ij (x) L(E_ij) for a map L on d x d
// operators, with composite row index (i, r) = i*d + r.  Under this
// normalization a trace-preserving map has Tr b = d and the identity map
// has spectrum {d, 0, ..., 0}.

struct DynamicalMap {
  Matrix b_matrix; // d^2 x d^2, Hermitian for Hermiticity-preserving maps
  Eigen::Index d;

  DynamicalMap(Matrix b, Eigen::Index dim) : b_matrix(std::move(b)), d(dim) {
    if (b_matrix.rows() != d * d || b_matrix.cols() != d * d)
      throw std::invalid_argument("DynamicalMap: B matrix must be d^2 x d^2");
    if (!is_hermitian(b_matrix))
      throw std::invalid_argument("DynamicalMap: B matrix not Hermitian");
  }
};

struct MapEigensystem {
  RealVector lambdas;              // descending
  std::vector<Matrix> eigenmatrices; // orthonormal under Tr[z^dag z]
};

struct KrausSet {
  std::vector<Matrix> operators;
  double completeness_error; // ||sum C^dag C - 1||_F
};

/// Qubit map in affine Bloch form: b -> linear*b + shift.
struct AffineBlochMap {
  Eigen::Matrix3d linear;
  Eigen::Vector3d shift;

  std::array<double, 3> apply(const std::array<double, 3> &b) const {
    Eigen::Vector3d v(b[0], b[1], b[2]);
    v = linear * v + shift;
    return {v(0), v(1), v(2)};
  }
};

//=========================================================================
// Construction
//=========================================================================

namespace detail {
inline Matrix matrix_unit(Eigen::Index d, Eigen::Index i, Eigen::Index j) {
  Matrix e = Matrix::Zero(d, d);
  e(i, j) = 1.0;
  return e;
}
} // namespace detail

/// Assemble the B matrix of a map given its action on matrix units.
template <typename Action>
Matrix assemble_b_matrix(Eigen::Index d, Action &&action) {
  Matrix b(d * d, d * d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      b.block(i * d, j * d, d, d) = action(detail::matrix_unit(d, i, j));
  return b;
}

/// Apply a map to an operator: L(X) = sum_ij X_ij B.block(i, j).
inline Matrix apply_map(const DynamicalMap &map, const Matrix &x) {
  if (x.rows() != map.d || x.cols() != map.d)
    throw std::invalid_argument("apply_map: operator dimension mismatch");
  Matrix out = Matrix::Zero(map.d, map.d);
  for (Eigen::Index i = 0; i < map.d; ++i)
    for (Eigen::Index j = 0; j < map.d; ++j)
      out += x(i, j) * map.b_matrix.block(i * map.d, j * map.d, map.d, map.d);
  return out;
}

inline Matrix apply_map(const DynamicalMap &map, const DensityMatrix &eta) {
  return apply_map(map, eta.mat());
}

/// Reduced dynamical map of a joint unitary evolution, extended linearly
/// off the marginal through the correlation operator chi = rho - eta x tau:
///
///   L(X) = Tr_E[U (X x tau) U^dag] + Tr(X) Tr_E[U chi U^dag]
///
/// By construction L(eta) = Tr_E[U rho U^dag] exactly.  For correlated rho
/// the result may be not completely positive; it is returned as-is.
inline DynamicalMap map_from_joint(const BipartiteState &rho, const Matrix &u) {
  check_bipartite_dims(u, rho.dim_s, rho.dim_e, "map_from_joint");
  if (!is_unitary(u))
    throw std::invalid_argument("map_from_joint: u is not unitary within "
                                "tolerance");
  const Matrix tau =
      partial_trace(rho.mat(), rho.dim_s, rho.dim_e, Subsystem::Environment);
  const Matrix eta =
      partial_trace(rho.mat(), rho.dim_s, rho.dim_e, Subsystem::System);
  const Matrix chi = rho.mat() - kron(eta, tau);
  const Matrix shift = partial_trace(u * chi * u.adjoint(), rho.dim_s,
                                     rho.dim_e, Subsystem::System);
  const Eigen::Index ds = rho.dim_s, de = rho.dim_e;
  Matrix b = assemble_b_matrix(ds, [&](const Matrix &e) -> Matrix {
    return partial_trace(u * kron(e, tau) * u.adjoint(), ds, de,
                         Subsystem::System) +
           e.trace() * shift;
  });
  // symmetrize away eigensolver-level noise
  b = (b + Matrix(b.adjoint())) / 2.0;
  return DynamicalMap(std::move(b), ds);
}

/// Kraus operators of the reduced dynamics of a classically correlated
/// initial state sum_j p_j Pi_j x tau_j:
///
///   [D^{kl}_j]_{r r'} = [U]_{r l; r' a'} [sqrt(tau_j)]_{a' k},
///   C^{(kl)} = sum_j D^{kl}_j Pi_j,
///
/// with sum C^dag C = 1 exactly and sum C eta C^dag = Tr_E[U rho U^dag]
/// for every marginal eta = sum_j q_j Pi_j of the family.
inline KrausSet map_from_classical(const RealVector &p,
                                   const ProjectorBasis &basis,
                                   const std::vector<DensityMatrix> &taus,
                                   const Matrix &u) {
  const BipartiteState rho = classically_correlated(p, basis, taus);
  check_bipartite_dims(u, rho.dim_s, rho.dim_e, "map_from_classical");
  if (!is_unitary(u))
    throw std::invalid_argument("map_from_classical: u is not unitary");
  const Eigen::Index ds = rho.dim_s, de = rho.dim_e;

  // W_j = U (1 x sqrt(tau_j)); then D^{kl}_j(r, r') = W_j(r*de + l, r'*de + k)
  std::vector<Matrix> w;
  w.reserve(taus.size());
  for (const auto &t : taus)
    w.push_back(u * kron(identity(ds), psd_sqrt(t.mat())));

  KrausSet out;
  out.operators.reserve(de * de);
  for (Eigen::Index k = 0; k < de; ++k)
    for (Eigen::Index l = 0; l < de; ++l) {
      Matrix c = Matrix::Zero(ds, ds);
      for (std::size_t j = 0; j < basis.size(); ++j) {
        Matrix d(ds, ds);
        for (Eigen::Index r = 0; r < ds; ++r)
          for (Eigen::Index rp = 0; rp < ds; ++rp)
            d(r, rp) = w[j](r * de + l, rp * de + k);
        c += d * basis.projectors()[j];
      }
      out.operators.push_back(std::move(c));
    }

  Matrix comp = Matrix::Zero(ds, ds);
  for (const auto &c : out.operators)
    comp += c.adjoint() * c;
  out.completeness_error = (comp - identity(ds)).norm();
  return out;
}

/// B matrix of sum_a C X C^dag.  With column-major vectorization the Choi
/// matrix is sum_a vec(C_a) vec(C_a)^dag.
inline DynamicalMap kraus_to_map(const KrausSet &k) {
  if (k.operators.empty())
    throw std::invalid_argument("kraus_to_map: empty Kraus set");
  if (k.completeness_error > 1e-8)
    throw std::invalid_argument("kraus_to_map: completeness error " +
                                std::to_string(k.completeness_error) +
                                " above 1e-8");
  const Eigen::Index d = k.operators.front().rows();
  Matrix b = Matrix::Zero(d * d, d * d);
  for (const auto &c : k.operators) {
    if (c.rows() != d || c.cols() != d)
      throw std::invalid_argument("kraus_to_map: ragged operator dimensions");
    const Eigen::Map<const Vector> v(c.data(), d * d);
    b += v * v.adjoint();
  }
  return DynamicalMap(std::move(b), d);
}

//=========================================================================
// Spectral analysis
//=========================================================================

/// Eigenmatrices z^(a) and eigenvalues of the B matrix, so that the map
/// acts as L(X) = sum_a lambda_a z^(a) X z^(a)^dag.  The d^2-component
/// eigenvector with composite index (i, r) = i*d + r reshapes into
/// z(r, i), which is the column-major reshape used here.
inline MapEigensystem choi_eig(const DynamicalMap &map) {
  const EigenDecomposition dec = herm_eig(map.b_matrix);
  MapEigensystem out;
  out.lambdas = dec.eigenvalues;
  out.eigenmatrices.reserve(map.d * map.d);
  for (Eigen::Index a = 0; a < dec.eigenvectors.cols(); ++a) {
    const Vector v = dec.eigenvectors.col(a);
    out.eigenmatrices.push_back(
        Eigen::Map<const Matrix>(v.data(), map.d, map.d));
  }
  return out;
}

struct CpVerdict {
  bool completely_positive;
  double min_eigenvalue;
};

inline CpVerdict is_cp(const DynamicalMap &map, double tolerance = 1e-10) {
  if (tolerance <= 0)
    throw std::invalid_argument("is_cp: tolerance must be positive");
  const double mn = min_eigenvalue(map.b_matrix);
  return {mn >= -tolerance, mn};
}

/// Summed magnitude of negative Choi eigenvalues.
inline double negativity(const DynamicalMap &map) {
  const EigenDecomposition dec = herm_eig(map.b_matrix);
  double neg = 0.0;
  for (Eigen::Index i = 0; i < dec.eigenvalues.size(); ++i)
    if (dec.eigenvalues(i) < 0)
      neg -= dec.eigenvalues(i);
  return neg;
}

/// Rebuild a Kraus set from the nonnegative part of a map's eigensystem.
/// Phases fixed by the eigenvector normalization in herm_eig.
inline KrausSet kraus_from_map(const DynamicalMap &map,
                               double threshold = 1e-12) {
  const MapEigensystem es = choi_eig(map);
  KrausSet out;
  for (Eigen::Index a = 0; a < es.lambdas.size(); ++a)
    if (es.lambdas(a) > threshold)
      out.operators.push_back(std::sqrt(es.lambdas(a)) * es.eigenmatrices[a]);
  Matrix comp = Matrix::Zero(map.d, map.d);
  for (const auto &c : out.operators)
    comp += c.adjoint() * c;
  out.completeness_error = (comp - identity(map.d)).norm();
  return out;
}

//=========================================================================
// The two-qubit worked example
//=========================================================================

/// H = omega sum_j sigma_j x sigma_j evolved for time t with
/// omega*t = omega_t.
inline Matrix example_unitary(double omega_t) {
  Matrix h = Matrix::Zero(4, 4);
  for (int j = 1; j <= 3; ++j)
    h += kron(pauli(j), pauli(j));
  return unitary_from_hamiltonian(h, omega_t);
}

struct AnalyticExample {
  std::array<double, 4> lambdas; // descending
  AffineBlochMap bloch;
};

/// Closed-form spectrum and affine form of the example map:
///   lambda_{1,2} = (1 - cos^2(2wt) -+ c23 cos(2wt) sin(2wt)) / 2
///   lambda_{3,4} = (1 + cos^2(2wt)
///                   +- cos(2wt) sqrt(4cos^2(2wt) + c23^2 sin^2(2wt))) / 2
/// The Bloch sphere contracts isotropically by cos^2(2wt) and the center
/// shifts by -c23 cos(2wt) sin(2wt) along sigma_1 (the sign follows from
/// U = exp(-iHt) with the standard Pauli convention).
inline AnalyticExample analytic_example(double omega_t, double c23) {
  const double c = std::cos(2.0 * omega_t);
  const double s = std::sin(2.0 * omega_t);
  std::array<double, 4> l{
      0.5 * (1.0 - c * c + c23 * c * s),
      0.5 * (1.0 - c * c - c23 * c * s),
      0.5 * (1.0 + c * c + c * std::sqrt(4.0 * c * c + c23 * c23 * s * s)),
      0.5 * (1.0 + c * c - c * std::sqrt(4.0 * c * c + c23 * c23 * s * s))};
  std::sort(l.begin(), l.end(), std::greater<double>());

  AffineBlochMap bloch;
  bloch.linear = (c * c) * Eigen::Matrix3d::Identity();
  bloch.shift = Eigen::Vector3d(-c23 * c * s, 0.0, 0.0);
  return {l, bloch};
}

/// Affine Bloch form of an arbitrary qubit map.
inline AffineBlochMap bloch_affine_of_map(const DynamicalMap &map) {
  if (map.d != 2)
    throw std::invalid_argument("bloch_affine_of_map: qubit maps only");
  AffineBlochMap out;
  const Matrix li = apply_map(map, identity(2));
  for (int j = 1; j <= 3; ++j) {
    out.shift(j - 1) = 0.5 * (pauli(j) * li).trace().real();
    for (int k = 1; k <= 3; ++k)
      out.linear(j - 1, k - 1) =
          0.5 * (pauli(j) * apply_map(map, pauli(k))).trace().real();
  }
  return out;
}

//=========================================================================
// Compatibility domain
//=========================================================================

/// True iff eta x tau + chi is positive semidefinite, where tau and chi
/// come from the reference state's decomposition as in map_from_joint.
inline bool is_compatible(const DensityMatrix &eta,
                          const BipartiteState &rho_ref) {
  if (eta.dim() != rho_ref.dim_s)
    throw std::invalid_argument("is_compatible: system dimension mismatch");
  const Matrix tau = partial_trace(rho_ref.mat(), rho_ref.dim_s, rho_ref.dim_e,
                                   Subsystem::Environment);
  const Matrix eta_ref = partial_trace(rho_ref.mat(), rho_ref.dim_s,
                                       rho_ref.dim_e, Subsystem::System);
  const Matrix chi = rho_ref.mat() - kron(eta_ref, tau);
  return min_eigenvalue(kron(eta.mat(), tau) + chi) >= -tol::kEigClamp;
}

} // namespace qmaps

#endif // QMAPS_CHANNELS_HPP
