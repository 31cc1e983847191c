#ifndef QMAPS_STATES_HPP
#define QMAPS_STATES_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "qmaps/core.hpp"
#include "qmaps/rng.hpp"

namespace qmaps {

//=========================================================================
// Density matrices and bipartite states
//=========================================================================

/// Validated quantum state: Hermitian, unit trace, positive semidefinite
/// within the standard tolerances.
class DensityMatrix {
public:
  explicit DensityMatrix(Matrix m) : mat_(std::move(m)) {
    detail::check_density_matrix(mat_, "DensityMatrix");
    const double mineig = min_eigenvalue(mat_);
    if (mineig < -tol::kEigClamp)
      throw std::invalid_argument("DensityMatrix: minimum eigenvalue " +
                                  std::to_string(mineig) +
                                  " violates positivity");
  }

  const Matrix &mat() const { return mat_; }
  Eigen::Index dim() const { return mat_.rows(); }

private:
  Matrix mat_;
};

struct BipartiteState {
  DensityMatrix state;
  Eigen::Index dim_s;
  Eigen::Index dim_e;

  BipartiteState(DensityMatrix st, Eigen::Index ds, Eigen::Index de)
      : state(std::move(st)), dim_s(ds), dim_e(de) {
    if (dim_s * dim_e != state.dim())
      throw std::invalid_argument(
          "BipartiteState: dim_s * dim_e = " + std::to_string(dim_s * dim_e) +
          " does not match state dimension " + std::to_string(state.dim()));
  }

  const Matrix &mat() const { return state.mat(); }
};

/// Complete set of rank-1 mutually orthogonal projectors on one subsystem.
class ProjectorBasis {
public:
  ProjectorBasis(std::vector<Matrix> projectors, Eigen::Index dim)
      : projectors_(std::move(projectors)), dim_(dim) {
    validate();
  }

  /// Basis {V e_j e_j^dag V^dag} from the columns of a unitary.
  static ProjectorBasis from_unitary(const Matrix &v) {
    if (!is_unitary(v))
      throw std::invalid_argument("ProjectorBasis: matrix is not unitary");
    std::vector<Matrix> ps;
    ps.reserve(v.cols());
    for (Eigen::Index j = 0; j < v.cols(); ++j)
      ps.push_back(v.col(j) * v.col(j).adjoint());
    return ProjectorBasis(std::move(ps), v.rows());
  }

  static ProjectorBasis computational(Eigen::Index dim) {
    return from_unitary(Matrix::Identity(dim, dim));
  }

  const std::vector<Matrix> &projectors() const { return projectors_; }
  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return projectors_.size(); }

private:
  void validate() const {
    if (static_cast<Eigen::Index>(projectors_.size()) != dim_)
      throw std::invalid_argument("ProjectorBasis: expected " +
                                  std::to_string(dim_) + " projectors, got " +
                                  std::to_string(projectors_.size()));
    Matrix sum = Matrix::Zero(dim_, dim_);
    for (std::size_t j = 0; j < projectors_.size(); ++j) {
      const Matrix &p = projectors_[j];
      if (p.rows() != dim_ || p.cols() != dim_)
        throw std::invalid_argument("ProjectorBasis: projector dimension "
                                    "mismatch");
      if (!is_hermitian(p))
        throw std::invalid_argument("ProjectorBasis: projector not Hermitian");
      if ((p * p - p).norm() > tol::kHermitian)
        throw std::invalid_argument("ProjectorBasis: projector not "
                                    "idempotent");
      if (std::abs(p.trace().real() - 1.0) > tol::kHermitian)
        throw std::invalid_argument("ProjectorBasis: projector not rank 1");
      for (std::size_t m = 0; m < j; ++m)
        if ((projectors_[m] * p).norm() > tol::kHermitian)
          throw std::invalid_argument("ProjectorBasis: projectors not "
                                      "mutually orthogonal");
      sum += p;
    }
    if ((sum - Matrix::Identity(dim_, dim_)).norm() > tol::kHermitian)
      throw std::invalid_argument("ProjectorBasis: completeness violated");
  }

  std::vector<Matrix> projectors_;
  Eigen::Index dim_;
};

struct BlochVector {
  std::array<double, 3> a;

  double norm() const {
    return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
  }
};

//=========================================================================
// Constructors
//=========================================================================

/// (1 + a.sigma)/2; rejects |a| > 1.
inline DensityMatrix from_bloch(const BlochVector &a) {
  if (a.norm() > 1.0 + 1e-12)
    throw std::invalid_argument("from_bloch: |a| = " + std::to_string(a.norm()) +
                                " exceeds 1");
  Matrix m = identity(2) / 2.0;
  for (int j = 1; j <= 3; ++j)
    m += (a.a[j - 1] / 2.0) * pauli(j);
  return DensityMatrix(m);
}

/// a_j = Tr[sigma_j eta]
inline BlochVector bloch_readback(const DensityMatrix &eta) {
  if (eta.dim() != 2)
    throw std::invalid_argument("bloch_readback: qubit states only");
  BlochVector b{};
  for (int j = 1; j <= 3; ++j)
    b.a[j - 1] = (pauli(j) * eta.mat()).trace().real();
  return b;
}

/// Largest c23 for which the two-qubit correlated family below stays
/// positive semidefinite at Bloch vector a.
inline double example_state_max_c23(const BlochVector &a) {
  const double a2 = std::abs(a.a[1]);
  const double n2 = a.a[0] * a.a[0] + a.a[1] * a.a[1] + a.a[2] * a.a[2];
  const double disc = a2 * a2 + 1.0 - n2;
  if (disc <= 0.0)
    return 0.0;
  return -a2 + std::sqrt(disc);
}

/// Two-qubit state (1x1 + a_j sigma_j x 1 + c23 sigma_2 x sigma_3)/4.
/// Spectrum is (1 +- sqrt(|a|^2 + c23^2 +- 2 a_2 c23))/4, so positivity
/// requires sqrt(|a|^2 + c23^2 + 2|a_2 c23|) <= 1.
inline BipartiteState example_state(const BlochVector &a, double c23) {
  const double n2 =
      a.a[0] * a.a[0] + a.a[1] * a.a[1] + a.a[2] * a.a[2];
  const double worst =
      std::sqrt(n2 + c23 * c23 + 2.0 * std::abs(a.a[1] * c23));
  if (worst > 1.0 + 1e-12) {
    const double offending = 0.25 * (1.0 - worst);
    throw std::invalid_argument(
        "example_state: not positive semidefinite, minimum eigenvalue " +
        std::to_string(offending));
  }
  Matrix m = kron(identity(2), identity(2)) / 4.0;
  for (int j = 1; j <= 3; ++j)
    m += (a.a[j - 1] / 4.0) * kron(pauli(j), identity(2));
  m += (c23 / 4.0) * kron(pauli(2), pauli(3));
  return BipartiteState(DensityMatrix(m), 2, 2);
}

/// sum_j p_j Pi_j x tau_j over a complete projector basis.
inline BipartiteState
classically_correlated(const RealVector &p, const ProjectorBasis &basis,
                       const std::vector<DensityMatrix> &taus) {
  if (static_cast<std::size_t>(p.size()) != basis.size() ||
      taus.size() != basis.size())
    throw std::invalid_argument("classically_correlated: p, basis and taus "
                                "must have matching sizes");
  double sum = 0.0;
  for (Eigen::Index j = 0; j < p.size(); ++j) {
    if (p(j) < -1e-15)
      throw std::invalid_argument("classically_correlated: negative "
                                  "probability p[" + std::to_string(j) + "]");
    sum += p(j);
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("classically_correlated: probabilities sum "
                                "to " + std::to_string(sum));
  const Eigen::Index de = taus.front().dim();
  for (const auto &t : taus)
    if (t.dim() != de)
      throw std::invalid_argument("classically_correlated: environment "
                                  "dimension mismatch");
  Matrix m = Matrix::Zero(basis.dim() * de, basis.dim() * de);
  for (std::size_t j = 0; j < basis.size(); ++j)
    m += p(static_cast<Eigen::Index>(j)) *
         kron(basis.projectors()[j], taus[j].mat());
  return BipartiteState(DensityMatrix(m), basis.dim(), de);
}

inline DensityMatrix marginal(const BipartiteState &rho, Subsystem side) {
  return DensityMatrix(
      partial_trace(rho.mat(), rho.dim_s, rho.dim_e, side));
}

/// Minimum eigenvalue of the partial transpose over E.
/// >= -kEigClamp means the state passes the PPT test.
inline double ppt_min_eigenvalue(const BipartiteState &rho) {
  return min_eigenvalue(partial_transpose(rho.mat(), rho.dim_s, rho.dim_e,
                                          Subsystem::Environment));
}

//=========================================================================
// Random ensembles (used by the randomized harnesses)
//=========================================================================

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the
/// R-diagonal phase fix.
inline Matrix random_unitary(Eigen::Index d, Rng &rng) {
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    const Complex rjj = r(j, j);
    q.col(j) *= (std::abs(rjj) > 0) ? rjj / std::abs(rjj) : Complex(1.0);
  }
  return q;
}

/// Hilbert-Schmidt-distributed density matrix G G^dag / Tr.
inline DensityMatrix random_density(Eigen::Index d, Rng &rng) {
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  Matrix m = g * g.adjoint();
  m /= m.trace().real();
  return DensityMatrix(m);
}

/// Flat simplex point from normalized exponentials.
inline RealVector random_simplex(Eigen::Index n, Rng &rng) {
  RealVector p(n);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    p(i) = rng.exponential();
    sum += p(i);
  }
  return p / sum;
}

inline ProjectorBasis random_basis(Eigen::Index d, Rng &rng) {
  return ProjectorBasis::from_unitary(random_unitary(d, rng));
}

inline BipartiteState random_classically_correlated(Eigen::Index dim_s,
                                                    Eigen::Index dim_e,
                                                    Rng &rng) {
  const ProjectorBasis basis = random_basis(dim_s, rng);
  const RealVector p = random_simplex(dim_s, rng);
  std::vector<DensityMatrix> taus;
  taus.reserve(dim_s);
  for (Eigen::Index j = 0; j < dim_s; ++j)
    taus.push_back(random_density(dim_e, rng));
  return classically_correlated(p, basis, taus);
}

} // namespace qmaps

#endif // QMAPS_STATES_HPP
