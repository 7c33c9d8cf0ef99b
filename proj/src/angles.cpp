#include "incompat/angles.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <numbers>

namespace incompat {

namespace {

struct AlignedAngles {
  AngleSpectrum spectrum;
  // Aligned direction pairs for the nontrivial block, one column per angle:
  // <e_i|f_j> = delta_ij cos(theta_i).
  cmatrix_t e_dirs;
  cmatrix_t f_dirs;
};

AlignedAngles aligned_principal_angles(const cmatrix_t& basis_e,
                                       const cmatrix_t& basis_f,
                                       Eigen::Index dim) {
  const Eigen::Index re = basis_e.cols();
  const Eigen::Index rf = basis_f.cols();
  const Eigen::Index m = std::min(re, rf);
  const Eigen::Index len =
      std::min({re, rf, dim - re, dim - rf});
  const Eigen::Index zero_count = std::max<Eigen::Index>(0, re + rf - dim);

  AlignedAngles out;
  out.spectrum.dim = dim;
  out.spectrum.rank_e = re;
  out.spectrum.rank_f = rf;
  out.spectrum.zero_count = std::min(zero_count, m);
  out.spectrum.right_angle_count = m - out.spectrum.zero_count - len;

  if (m == 0 || len == 0) {
    out.e_dirs = cmatrix_t::Zero(dim, 0);
    out.f_dirs = cmatrix_t::Zero(dim, 0);
    return out;
  }

  Eigen::BDCSVD<cmatrix_t> svd(basis_e.adjoint() * basis_f,
                               Eigen::ComputeThinU | Eigen::ComputeThinV);
  const rvector_t sv = svd.singularValues();  // descending

  // Drop the structural cos = 1 block in front and the forced cos = 0 block
  // at the back; the middle `len` values are the nontrivial angles.
  out.spectrum.angles.reserve(static_cast<std::size_t>(len));
  for (Eigen::Index i = out.spectrum.zero_count;
       i < out.spectrum.zero_count + len; ++i) {
    const double c = std::clamp(sv(i), 0.0, 1.0);
    out.spectrum.angles.push_back(std::acos(c));
  }

  out.e_dirs = basis_e * svd.matrixU().middleCols(out.spectrum.zero_count, len);
  out.f_dirs = basis_f * svd.matrixV().middleCols(out.spectrum.zero_count, len);
  return out;
}

// Orthonormal basis of the range of a projector. The 1/0 spectral gap makes
// pivoted QR rank-revealing here, and it is several times cheaper than an
// eigendecomposition.
cmatrix_t range_basis(const HermitianOperator& p) {
  const Eigen::Index rank =
      static_cast<Eigen::Index>(std::llround(p.trace()));
  if (rank <= 0) return cmatrix_t::Zero(p.dim(), 0);
  Eigen::ColPivHouseholderQR<cmatrix_t> qr(p.mat());
  const cmatrix_t q = qr.householderQ();
  return q.leftCols(rank);
}

}  // namespace

AngleSpectrum principal_angles(const Subspace& e, const Subspace& f) {
  if (e.dim != f.dim) throw DimensionMismatch("subspaces must share ambient dimension");
  return aligned_principal_angles(e.basis, f.basis, e.dim).spectrum;
}

std::pair<double, double> lambda_pm(double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < 1.0 && beta > 0.0 && beta < 1.0)) {
    throw ParameterOutOfRange("lambda_pm needs alpha, beta in (0, 1)");
  }
  const double base = alpha + beta - 2.0 * alpha * beta;
  const double root =
      2.0 * std::sqrt(alpha * (1.0 - alpha) * beta * (1.0 - beta));
  return {base - root, base + root};
}

CompressionResult compression_isometry(const HermitianOperator& p,
                                       const HermitianOperator& q,
                                       double target_angle) {
  if (p.dim() != q.dim()) throw DimensionMismatch("projectors must share dimension");
  const Eigen::Index d = p.dim();
  const cmatrix_t be = range_basis(p);
  const cmatrix_t bf = range_basis(q);
  const AlignedAngles aligned = aligned_principal_angles(be, bf, d);
  if (aligned.spectrum.angles.empty()) {
    throw NoNontrivialAngle("the subspace pair has no nontrivial angle block");
  }

  int pick = -1;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < aligned.spectrum.angles.size(); ++i) {
    const double theta = aligned.spectrum.angles[i];
    if (std::sin(theta) <= 1e-8) continue;  // no complement direction
    const double dist = std::abs(theta - target_angle);
    if (dist < best) {
      best = dist;
      pick = static_cast<int>(i);
    }
  }
  if (pick < 0) {
    throw SinZero("all candidate angles vanish; compression direction undefined");
  }

  const double theta = aligned.spectrum.angles[static_cast<std::size_t>(pick)];
  const cvector_t v = aligned.e_dirs.col(pick);
  const cvector_t f = aligned.f_dirs.col(pick);
  const cvector_t vp = (f - std::cos(theta) * v) / std::sin(theta);

  CompressionResult result;
  result.isometry = cmatrix_t(d, 2);
  result.isometry.col(0) = v;
  result.isometry.col(1) = vp;
  result.achieved_angle = theta;
  return result;
}

BlochVector make_bloch(const Eigen::Vector3d& m) {
  if (m.norm() > 1.0 + 1e-12) {
    throw ParameterOutOfRange("Bloch vector norm must be at most 1");
  }
  return BlochVector{m};
}

double pauli_tau(const BlochVector& m, const BlochVector& n) {
  const double plus = (m.m + n.m).norm();
  const double minus = (m.m - n.m).norm();
  if (plus + minus == 0.0) return 1.0;  // both trivial observables
  return std::min(1.0, 2.0 / (plus + minus));
}

BoundValue compression_upper_bound(const DichotomicObservable& a,
                                   const DichotomicObservable& b,
                                   double target_angle) {
  const Eigen::Index d = a.dim;
  if (b.dim != d) throw DimensionMismatch("observables must share dimension");
  const cmatrix_t id = cmatrix_t::Identity(d, d);
  const HermitianOperator p(0.5 * (id + a.a.mat()));
  const HermitianOperator q(0.5 * (id + b.a.mat()));

  BoundValue bound;
  bound.kind = BoundValue::Kind::UpperOnTau;
  bound.source = "compression-to-qubit";
  bound.applicability = "two projective dichotomic measurements";

  const CompressionResult comp = compression_isometry(p, q, target_angle);
  const cmatrix_t& v = comp.isometry;

  const double ct = std::cos(target_angle);
  const double st = std::sin(target_angle);
  cmatrix_t target(2, 2);
  target << 2.0 * ct * ct - 1.0, 2.0 * ct * st, 2.0 * ct * st,
      1.0 - 2.0 * ct * ct;

  const cmatrix_t ca = v.adjoint() * a.a.mat() * v;
  const cmatrix_t cb = v.adjoint() * b.a.mat() * v;
  const double eps =
      operator_norm(ca - pauli_z()) + operator_norm(cb - target);

  const BlochVector mz = make_bloch(Eigen::Vector3d(0, 0, 1));
  const BlochVector mt =
      make_bloch(Eigen::Vector3d(2.0 * ct * st, 0, 2.0 * ct * ct - 1.0));
  const double inv_tau = 1.0 / pauli_tau(mz, mt);

  if (inv_tau - eps <= 1.0) {
    bound.value = 1.0;  // vacuous
    return bound;
  }
  bound.value = std::min(1.0, 1.0 / (inv_tau - eps));
  return bound;
}

double jordan_min_curve(double t, JordanCurveMode mode, double alpha,
                        double beta) {
  if (mode == JordanCurveMode::Balanced) {
    const auto [lm, lp] = lambda_pm(alpha, beta);
    const double lo = 0.5 / std::sqrt(lp);
    const double hi = lm > 0.0 ? 0.5 / std::sqrt(lm)
                               : std::numeric_limits<double>::infinity();
    if (!(t >= lo && t <= hi)) {
      throw ParameterOutOfRange("t outside the balanced curve's validity range");
    }
    return 0.25 - 0.5 * t * t;
  }
  const double la = 4.0 * alpha * (1.0 - alpha);
  const double half = 0.5;
  const double edge = half * (1.0 + 1.0 / std::numbers::sqrt2);
  if (!(alpha > edge || alpha < 1.0 - edge)) {
    throw ParameterOutOfRange("alpha must lie outside the disc regime");
  }
  const double tmax = 1.0 / (std::sqrt(la) + std::sqrt(1.0 - la));
  if (!(t >= 0.0 && t <= tmax + 1e-12)) {
    throw ParameterOutOfRange("t outside the unbalanced curve's validity range");
  }
  return (la - 0.5) * t * t - std::sqrt(la) * t + 0.5;
}

}  // namespace incompat
