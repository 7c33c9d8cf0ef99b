#ifndef INCOMPAT_SAMPLING_HPP
#define INCOMPAT_SAMPLING_HPP

#include "incompat/core.hpp"
#include "incompat/rng.hpp"

namespace incompat {

/// d x r matrix with orthonormal columns spanning an r-dimensional subspace.
struct Subspace {
  Eigen::Index dim = 0;
  Eigen::Index rank = 0;
  cmatrix_t basis;

  cmatrix_t projector() const { return basis * basis.adjoint(); }
};

/// Matrix with iid standard complex Gaussian entries (variance 1 per entry).
cmatrix_t ginibre(Eigen::Index rows, Eigen::Index cols, SeededRng& rng);

/// Haar-distributed unitary via Ginibre + QR with the R-diagonal phase
/// normalization; plain QR output is not Haar.
cmatrix_t haar_unitary(Eigen::Index d, SeededRng& rng);

/// Uniformly distributed rank-r orthogonal projection U P_0 U*.
HermitianOperator random_projection(Eigen::Index d, Eigen::Index r,
                                    SeededRng& rng);

/// Uniformly distributed subspace; basis * basis^H is the matching projector.
Subspace random_subspace(Eigen::Index d, Eigen::Index r, SeededRng& rng);

/// Measurement in a Haar-random orthonormal basis (d rank-1 effects).
Povm random_basis_measurement(Eigen::Index d, SeededRng& rng);

/// k-outcome POVM M_i = V^*(|i><i| (x) I_n)V for a Haar isometry
/// V: C^d -> C^k (x) C^n (first d columns of a Haar unitary on C^{kn}).
/// Requires k n >= d.
Povm random_induced_povm(Eigen::Index d, Eigen::Index k, Eigen::Index n,
                         SeededRng& rng);

/// Balanced dichotomic observable 2P - I for a Haar projection of rank r
/// (defaults to floor(d/2)).
DichotomicObservable random_projective_observable(Eigen::Index d,
                                                  Eigen::Index r,
                                                  SeededRng& rng);

}  // namespace incompat

#endif
