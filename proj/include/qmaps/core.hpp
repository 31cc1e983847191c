#ifndef QMAPS_CORE_HPP
#define QMAPS_CORE_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qmaps {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

//=========================================================================
// Tolerances
//=========================================================================

namespace tol {
// Double-precision eigensolver noise floor; eigenvalues in [-kEigClamp, 0]
// are clamped to zero.
inline constexpr double kHermitian = 1e-10;
inline constexpr double kEigClamp = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kUnitary = 1e-10;
inline constexpr double kOrtho = 1e-12;
} // namespace tol

//=========================================================================
// Pauli matrices and common constructors
//=========================================================================

inline const Matrix &pauli(int j) {
  static const Matrix sx = (Matrix(2, 2) << 0, 1, 1, 0).finished();
  static const Matrix sy =
      (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
  static const Matrix sz = (Matrix(2, 2) << 1, 0, 0, -1).finished();
  switch (j) {
  case 1:
    return sx;
  case 2:
    return sy;
  case 3:
    return sz;
  default:
    throw std::invalid_argument("pauli index must be 1, 2 or 3");
  }
}

inline Matrix identity(Eigen::Index d) { return Matrix::Identity(d, d); }

inline double frobenius_norm(const Matrix &m) { return m.norm(); }

inline bool is_hermitian(const Matrix &m, double tolerance = tol::kHermitian) {
  if (m.rows() != m.cols())
    return false;
  const double scale = std::max(1.0, m.norm());
  return (m - m.adjoint()).norm() < tolerance * scale;
}

inline bool is_unitary(const Matrix &u, double tolerance = tol::kUnitary) {
  if (u.rows() != u.cols())
    return false;
  return (u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())).norm() <
         tolerance * std::max<double>(1.0, u.rows());
}

inline void require_finite(const Matrix &m, const char *what) {
  if (!m.allFinite())
    throw std::invalid_argument(std::string(what) +
                                ": matrix has NaN/Inf entries");
}

//=========================================================================
// Kronecker product and subsystem operations
//=========================================================================

enum class Subsystem { System, Environment };

inline Matrix kron(const Matrix &a, const Matrix &b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

inline void check_bipartite_dims(const Matrix &m, Eigen::Index dim_s,
                                 Eigen::Index dim_e, const char *what) {
  if (dim_s < 1 || dim_e < 1 || m.rows() != m.cols() ||
      m.rows() != dim_s * dim_e)
    throw std::invalid_argument(
        std::string(what) + ": matrix is " + std::to_string(m.rows()) + "x" +
        std::to_string(m.cols()) + ", expected square of size " +
        std::to_string(dim_s * dim_e));
}

/// Trace out one factor of a (dim_s*dim_e)-dimensional bipartite operator.
/// Index convention: row (r, a) = r*dim_e + a with r on S and a on E.
inline Matrix partial_trace(const Matrix &m, Eigen::Index dim_s,
                            Eigen::Index dim_e, Subsystem keep) {
  check_bipartite_dims(m, dim_s, dim_e, "partial_trace");
  if (keep == Subsystem::System) {
    Matrix out = Matrix::Zero(dim_s, dim_s);
    for (Eigen::Index r = 0; r < dim_s; ++r)
      for (Eigen::Index s = 0; s < dim_s; ++s)
        for (Eigen::Index a = 0; a < dim_e; ++a)
          out(r, s) += m(r * dim_e + a, s * dim_e + a);
    return out;
  }
  Matrix out = Matrix::Zero(dim_e, dim_e);
  for (Eigen::Index a = 0; a < dim_e; ++a)
    for (Eigen::Index b = 0; b < dim_e; ++b)
      for (Eigen::Index r = 0; r < dim_s; ++r)
        out(a, b) += m(r * dim_e + a, r * dim_e + b);
  return out;
}

/// Transpose the selected factor's indices, leaving the other intact.
inline Matrix partial_transpose(const Matrix &m, Eigen::Index dim_s,
                                Eigen::Index dim_e, Subsystem side) {
  check_bipartite_dims(m, dim_s, dim_e, "partial_transpose");
  Matrix out(m.rows(), m.cols());
  for (Eigen::Index r = 0; r < dim_s; ++r)
    for (Eigen::Index s = 0; s < dim_s; ++s)
      for (Eigen::Index a = 0; a < dim_e; ++a)
        for (Eigen::Index b = 0; b < dim_e; ++b) {
          if (side == Subsystem::Environment)
            out(r * dim_e + b, s * dim_e + a) = m(r * dim_e + a, s * dim_e + b);
          else
            out(s * dim_e + a, r * dim_e + b) = m(r * dim_e + a, s * dim_e + b);
        }
  return out;
}

//=========================================================================
// Hermitian eigendecomposition with deterministic ordering
//=========================================================================

struct EigenDecomposition {
  RealVector eigenvalues; // sorted descending
  Matrix eigenvectors;    // columns, unitary, phase-normalized
};

namespace detail {

// Phase-normalize a vector so its first entry of magnitude > 1e-12 is
// real and positive. Keeps eigenvector output deterministic.
inline void phase_normalize(Eigen::Ref<Vector> v) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v(i));
    if (a > 1e-12) {
      v *= std::conj(v(i)) / a;
      return;
    }
  }
}

inline bool lex_less(const Vector &a, const Vector &b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i).real() != b(i).real())
      return a(i).real() < b(i).real();
    if (a(i).imag() != b(i).imag())
      return a(i).imag() < b(i).imag();
  }
  return false;
}

} // namespace detail

/// Eigendecomposition of a Hermitian matrix, eigenvalues descending.
/// Degenerate eigenvalues are ordered by the phase-normalized
/// eigenvectors' lexicographic order.
inline EigenDecomposition herm_eig(const Matrix &m) {
  require_finite(m, "herm_eig");
  if (!is_hermitian(m))
    throw std::invalid_argument("herm_eig: input is not Hermitian within "
                                "tolerance");
  const Matrix h = (m + m.adjoint()) / 2.0;
  Eigen::SelfAdjointEigenSolver<Matrix> solver(h);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("herm_eig: eigensolver failed to converge");

  const Eigen::Index n = m.rows();
  std::vector<Eigen::Index> order(n);
  for (Eigen::Index i = 0; i < n; ++i)
    order[i] = i;

  Matrix vecs = solver.eigenvectors();
  for (Eigen::Index i = 0; i < n; ++i)
    detail::phase_normalize(vecs.col(i));

  const RealVector &vals = solver.eigenvalues();
  const double tie = 1e-12 * std::max(1.0, std::abs(vals(n - 1)) +
                                               std::abs(vals(0)));
  std::sort(order.begin(), order.end(), [&](Eigen::Index i, Eigen::Index j) {
    if (std::abs(vals(i) - vals(j)) > tie)
      return vals(i) > vals(j);
    return detail::lex_less(vecs.col(i), vecs.col(j));
  });

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = vals(order[i]);
    out.eigenvectors.col(i) = vecs.col(order[i]);
  }
  return out;
}

inline double min_eigenvalue(const Matrix &m) {
  const EigenDecomposition d = herm_eig(m);
  return d.eigenvalues(d.eigenvalues.size() - 1);
}

//=========================================================================
// Matrix functions built on the eigendecomposition
//=========================================================================

/// exp(-i h t) for Hermitian h, via eigendecomposition.
inline Matrix unitary_from_hamiltonian(const Matrix &h, double t) {
  const EigenDecomposition d = herm_eig(h);
  Vector phases(d.eigenvalues.size());
  for (Eigen::Index i = 0; i < phases.size(); ++i)
    phases(i) = std::exp(Complex(0, -d.eigenvalues(i) * t));
  return d.eigenvectors * phases.asDiagonal() * d.eigenvectors.adjoint();
}

/// Hermitian PSD square root. Eigenvalues in [-kEigClamp, 0] are clamped;
/// anything below that is rejected.
inline Matrix psd_sqrt(const Matrix &m) {
  const EigenDecomposition d = herm_eig(m);
  RealVector roots(d.eigenvalues.size());
  for (Eigen::Index i = 0; i < roots.size(); ++i) {
    double v = d.eigenvalues(i);
    if (v < -tol::kEigClamp)
      throw std::invalid_argument(
          "psd_sqrt: eigenvalue " + std::to_string(v) + " below -" +
          std::to_string(tol::kEigClamp));
    roots(i) = std::sqrt(std::max(v, 0.0));
  }
  return d.eigenvectors * roots.cast<Complex>().asDiagonal() *
         d.eigenvectors.adjoint();
}

namespace detail {
inline void check_density_matrix(const Matrix &m, const char *what) {
  require_finite(m, what);
  if (!is_hermitian(m))
    throw std::invalid_argument(std::string(what) + ": not Hermitian");
  if (std::abs(m.trace() - Complex(1.0)) > tol::kTrace)
    throw std::invalid_argument(std::string(what) + ": trace is " +
                                std::to_string(m.trace().real()) +
                                ", expected 1");
}
} // namespace detail

/// von Neumann entropy in bits: -sum lambda log2 lambda, with 0 log 0 := 0.
inline double vn_entropy(const Matrix &m) {
  detail::check_density_matrix(m, "vn_entropy");
  const EigenDecomposition d = herm_eig(m);
  double h = 0.0;
  for (Eigen::Index i = 0; i < d.eigenvalues.size(); ++i) {
    double v = d.eigenvalues(i);
    if (v < -tol::kEigClamp)
      throw std::invalid_argument("vn_entropy: eigenvalue " +
                                  std::to_string(v) + " below PSD tolerance");
    if (v > 1e-300)
      h -= v * std::log2(v);
  }
  return h;
}

/// Shannon entropy of eigenvalue lists and probability vectors, in bits.
inline double shannon_entropy(const RealVector &p) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i)
    if (p(i) > 1e-300)
      h -= p(i) * std::log2(p(i));
  return h;
}

} // namespace qmaps

#endif // QMAPS_CORE_HPP
