#ifndef INCOMPAT_CORE_HPP
#define INCOMPAT_CORE_HPP

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "incompat/errors.hpp"

namespace incompat {

using complex_t = std::complex<double>;
using cmatrix_t = Eigen::MatrixXcd;
using cvector_t = Eigen::VectorXcd;
using rvector_t = Eigen::VectorXd;

// Tolerances shared across the library: entrywise Hermitian symmetry and the
// eigenvalue floor below which an operator counts as indefinite.
inline constexpr double kHermTol = 1e-12;
inline constexpr double kPsdFloor = 1e-9;

/// Dense complex square matrix known to be Hermitian.
class HermitianOperator {
 public:
  HermitianOperator() = default;

  /// Validates conjugate symmetry up to `tol` (throws NonHermitian), then
  /// stores the exactly symmetrized matrix (M + M^H)/2.
  explicit HermitianOperator(cmatrix_t m, double tol = kHermTol);

  Eigen::Index dim() const { return mat_.rows(); }
  const cmatrix_t& mat() const { return mat_; }

  /// Real eigenvalues, ascending.
  rvector_t eigenvalues() const;
  double lambda_min() const;
  double lambda_max() const;
  double trace() const { return mat_.trace().real(); }

 private:
  cmatrix_t mat_;
};

template <typename Derived>
bool is_hermitian(const Eigen::MatrixBase<Derived>& m, double tol = kHermTol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

/// Real ascending eigenvalues of a Hermitian matrix.
rvector_t hermitian_eigenvalues(const cmatrix_t& m);
double lambda_min(const cmatrix_t& m);
double lambda_max(const cmatrix_t& m);
double operator_norm(const cmatrix_t& m);  // largest singular value

/// Ordered list of effects on a common dimension.
struct Povm {
  Eigen::Index dim = 0;
  std::vector<HermitianOperator> effects;

  Eigen::Index outcomes() const {
    return static_cast<Eigen::Index>(effects.size());
  }
};

/// Hermitian A with spectrum in [-1, 1]; encodes the POVM ((I+A)/2, (I-A)/2).
struct DichotomicObservable {
  Eigen::Index dim = 0;
  HermitianOperator a;
};

/// g POVMs sharing one dimension; the object whose compatibility is analyzed.
struct MeasurementSet {
  Eigen::Index dim = 0;
  std::vector<Povm> povms;

  Eigen::Index size() const { return static_cast<Eigen::Index>(povms.size()); }
  std::vector<Eigen::Index> outcome_counts() const;
};

/// Checks effect positivity (eigenvalue floor -1e-9) and normalization
/// (sum = identity entrywise within 1e-9). Throws NonHermitian,
/// NegativeEffect or NotNormalized. Input is copied, never mutated.
Povm validate_povm(const std::vector<cmatrix_t>& effects);
Povm validate_povm(const std::vector<HermitianOperator>& effects);

MeasurementSet make_measurement_set(std::vector<Povm> povms);

/// t E_i + (1-t) I/k for every effect.
Povm apply_white_noise(const Povm& povm, double t);
MeasurementSet apply_white_noise(const MeasurementSet& set, double t);

/// A = 2 E_0 - I for a two-outcome POVM.
DichotomicObservable observable_of(const Povm& povm);

DichotomicObservable make_observable(const cmatrix_t& a, double tol = kPsdFloor);

/// ((I+A)/2, (I-A)/2).
Povm povm_of(const DichotomicObservable& obs);

/// True iff ||E_i^2 - E_i||_inf <= tol for every effect.
bool is_projective(const Povm& povm, double tol);

/// g pairwise-anticommuting Hermitian unitaries on dimension 2^ceil((g-1)/2),
/// built as tensor chains: Z...Z, then X and Y in slot j prefixed by Z's.
std::vector<DichotomicObservable> pauli_basis(int g);

// Fixed qubit matrices.
cmatrix_t pauli_x();
cmatrix_t pauli_y();
cmatrix_t pauli_z();

/// d x d unitary DFT matrix, entries exp(2 pi i jk / d) / sqrt(d). Mutually
/// unbiased with the standard basis for every d.
cmatrix_t fourier_matrix(Eigen::Index d);

/// Rank-1 projective measurement onto the columns of a unitary.
Povm basis_measurement(const cmatrix_t& unitary);

}  // namespace incompat

#endif
