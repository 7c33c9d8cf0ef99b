#ifndef INCOMPAT_ANGLES_HPP
#define INCOMPAT_ANGLES_HPP

#include <Eigen/Dense>
#include <vector>

#include "incompat/core.hpp"
#include "incompat/criteria.hpp"
#include "incompat/sampling.hpp"

namespace incompat {

/// Nontrivial principal angles between two subspaces, ascending in [0, pi/2].
/// Structurally fixed angles (intersection directions at 0, forced right
/// angles) are reported as counts, not entries.
struct AngleSpectrum {
  std::vector<double> angles;
  Eigen::Index dim = 0;
  Eigen::Index rank_e = 0;
  Eigen::Index rank_f = 0;
  Eigen::Index zero_count = 0;         // structural cos = 1 directions
  Eigen::Index right_angle_count = 0;  // structural cos = 0 directions
};

/// arccos of the singular values of basis_E^H basis_F (clipped into [0, 1]).
AngleSpectrum principal_angles(const Subspace& e, const Subspace& f);

/// Spectral edge pair of the two-subspace overlap law,
/// alpha + beta - 2 alpha beta -+ 2 sqrt(alpha(1-alpha)beta(1-beta)).
std::pair<double, double> lambda_pm(double alpha, double beta);

struct CompressionResult {
  cmatrix_t isometry;     // d x 2, V^H V = I_2
  double achieved_angle;  // principal angle the compression used
};

/// Rank-two compression aligned with the principal-angle pair closest to
/// `target_angle`: V^H (2P-I) V = Z exactly and
/// V^H (2Q-I) V = (2cos^2 t - 1) Z + 2 cos t sin t X at the achieved angle t.
CompressionResult compression_isometry(const HermitianOperator& p,
                                       const HermitianOperator& q,
                                       double target_angle);

/// Unit ball vector of an unbiased qubit observable m_X X + m_Y Y + m_Z Z.
struct BlochVector {
  Eigen::Vector3d m;
};

BlochVector make_bloch(const Eigen::Vector3d& m);

/// Exact qubit pair value 2 / (||m+n|| + ||m-n||).
double pauli_tau(const BlochVector& m, const BlochVector& n);

/// Upper bound on tau(A, B) from compressing to a qubit pair: with
/// epsilon = ||V^H A V - Z|| + ||V^H B V - target||, the bound is
/// 1 / (1/tau(target pair) - epsilon), vacuous (= 1) when that is not
/// positive or exceeds one.
BoundValue compression_upper_bound(const DichotomicObservable& a,
                                   const DichotomicObservable& b,
                                   double target_angle);

enum class JordanCurveMode { Balanced, Unbalanced };

/// Asymptotic minimum of the noisy anticommutator spectrum:
/// 1/4 - t^2/2 in the balanced disc regime, and
/// (lambda_alpha - 1/2) t^2 - sqrt(lambda_alpha) t + 1/2 for equal unbalanced
/// ranks (lambda_alpha = 4 alpha (1 - alpha)).
double jordan_min_curve(double t, JordanCurveMode mode, double alpha = 0.5,
                        double beta = 0.5);

}  // namespace incompat

#endif
