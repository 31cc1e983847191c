#ifndef QMAPS_TEST_HELPERS_HPP
#define QMAPS_TEST_HELPERS_HPP

#include "qmaps/channels.hpp"
#include "qmaps/rng.hpp"
#include "qmaps/states.hpp"

namespace qmaps::test {

inline Matrix random_hermitian(Eigen::Index d, Rng &rng) {
  Matrix g(d, d);
  for (Eigen::Index i = 0; i < d; ++i)
    for (Eigen::Index j = 0; j < d; ++j)
      g(i, j) = Complex(rng.gaussian(), rng.gaussian());
  return (g + g.adjoint()) / 2.0;
}

inline BipartiteState bell_state() {
  Vector v = Vector::Zero(4);
  v(0) = 1.0 / std::sqrt(2.0);
  v(3) = 1.0 / std::sqrt(2.0);
  return BipartiteState(DensityMatrix(v * v.adjoint()), 2, 2);
}

/// 1/2 (|00><00| + |11><11|), the classical joint distribution.
inline BipartiteState classical_mixture() {
  Matrix m = Matrix::Zero(4, 4);
  m(0, 0) = 0.5;
  m(3, 3) = 0.5;
  return BipartiteState(DensityMatrix(m), 2, 2);
}

inline BipartiteState product_state(const DensityMatrix &eta,
                                    const DensityMatrix &tau) {
  return BipartiteState(DensityMatrix(kron(eta.mat(), tau.mat())), eta.dim(),
                        tau.dim());
}

/// Closed-form spectrum of the sigma_2 x sigma_3 correlated family,
/// (1 +- sqrt(|a|^2 + c^2 +- 2 a_2 c))/4 -- the independent oracle for
/// the constructor's positivity domain.
inline std::array<double, 4> example_family_spectrum(const BlochVector &a,
                                                     double c23) {
  const double n2 = a.a[0] * a.a[0] + a.a[1] * a.a[1] + a.a[2] * a.a[2];
  const double plus = std::sqrt(n2 + c23 * c23 + 2.0 * a.a[1] * c23);
  const double minus = std::sqrt(n2 + c23 * c23 - 2.0 * a.a[1] * c23);
  return {0.25 * (1 + plus), 0.25 * (1 + minus), 0.25 * (1 - minus),
          0.25 * (1 - plus)};
}

} // namespace qmaps::test

#endif
