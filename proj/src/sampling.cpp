#include "incompat/sampling.hpp"

#include <Eigen/QR>
#include <cmath>

namespace incompat {

cmatrix_t ginibre(Eigen::Index rows, Eigen::Index cols, SeededRng& rng) {
  cmatrix_t g(rows, cols);
  const double scale = 1.0 / std::sqrt(2.0);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) {
      g(i, j) = complex_t(rng.normal() * scale, rng.normal() * scale);
    }
  }
  return g;
}

cmatrix_t haar_unitary(Eigen::Index d, SeededRng& rng) {
  if (d < 1) throw ParameterOutOfRange("haar_unitary requires d >= 1");
  const cmatrix_t g = ginibre(d, d, rng);
  Eigen::HouseholderQR<cmatrix_t> qr(g);
  cmatrix_t q = qr.householderQ();
  const cmatrix_t r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < d; ++j) {
    const complex_t rjj = r(j, j);
    const double a = std::abs(rjj);
    const complex_t phase = (a > 0) ? rjj / a : complex_t(1, 0);
    q.col(j) *= phase;
  }
  return q;
}

HermitianOperator random_projection(Eigen::Index d, Eigen::Index r,
                                    SeededRng& rng) {
  const Subspace s = random_subspace(d, r, rng);
  return HermitianOperator(s.projector(), 1e-10);
}

Subspace random_subspace(Eigen::Index d, Eigen::Index r, SeededRng& rng) {
  if (r < 0 || r > d) {
    throw RankOutOfRange("subspace rank must satisfy 0 <= r <= d");
  }
  Subspace s;
  s.dim = d;
  s.rank = r;
  if (r == 0) {
    s.basis = cmatrix_t::Zero(d, 0);
    return s;
  }
  s.basis = haar_unitary(d, rng).leftCols(r);
  return s;
}

Povm random_basis_measurement(Eigen::Index d, SeededRng& rng) {
  return basis_measurement(haar_unitary(d, rng));
}

Povm random_induced_povm(Eigen::Index d, Eigen::Index k, Eigen::Index n,
                         SeededRng& rng) {
  if (d < 1 || k < 1 || n < 1) {
    throw ParameterOutOfRange("induced POVM requires positive d, k, n");
  }
  if (k * n < d) {
    throw AncillaTooSmall("induced POVM needs k*n >= d for the isometry");
  }
  const cmatrix_t v = haar_unitary(k * n, rng).leftCols(d);
  std::vector<cmatrix_t> effects;
  effects.reserve(k);
  for (Eigen::Index i = 0; i < k; ++i) {
    // Rows of V in the i-th outcome sector of C^k (x) C^n.
    const cmatrix_t vi = v.middleRows(i * n, n);
    effects.push_back(vi.adjoint() * vi);
  }
  return validate_povm(effects);
}

DichotomicObservable random_projective_observable(Eigen::Index d,
                                                  Eigen::Index r,
                                                  SeededRng& rng) {
  const HermitianOperator p = random_projection(d, r, rng);
  return make_observable(2.0 * p.mat() - cmatrix_t::Identity(d, d));
}

}  // namespace incompat
