#ifndef INCOMPAT_COMPAT_HPP
#define INCOMPAT_COMPAT_HPP

#include <string>
#include <utility>
#include <vector>

#include "incompat/core.hpp"
#include "incompat/sdp.hpp"

namespace incompat {

using SolveStatus = sdp::Status;

struct SolveReport {
  SolveStatus status = SolveStatus::SolverFailure;
  double value = 0.0;  // optimal value of the solved program
  double gap = 0.0;    // relative duality gap at exit
  std::vector<std::pair<std::string, cmatrix_t>> solution;

  const cmatrix_t& solution_block(const std::string& name) const;
};

/// Two-sided bracket on a compatibility degree with per-bound provenance.
struct TauBracket {
  double lower = 0.0;
  double upper = 1.0;
  std::string lower_source;
  std::string upper_source;
};

/// Witness tuple (one operator per effect slot, measurement-major), the
/// certifying state, and the achieved pairing <W, E> on the tested set.
/// pairing > 1 certifies incompatibility.
struct WitnessCertificate {
  std::vector<HermitianOperator> witness;
  HermitianOperator state;
  double pairing = 0.0;

  bool certifies() const { return pairing > 1.0 + 1e-7; }
};

/// Value lambda(A) of the dichotomic compatibility program
///   max sum_x Tr(A_x Y_x)  s.t.  sum_x eps_x Y_x <= rho for all eps in
///   {+-1}^g, rho >= 0, Tr rho = 1,
/// solved in standard conic form after eliminating the free variables.
/// The report's solution carries the optimizers Y_1..Y_g and rho.
SolveReport compatibility_lambda_dichotomic(
    const std::vector<DichotomicObservable>& a);

/// tau~ = 1/lambda(A); a tight bracket [tau~, tau~] when tau~ <= 1, else the
/// clipped [1, 1].
TauBracket tau_dichotomic(const std::vector<DichotomicObservable>& a);

/// Does a joint POVM with the t-noised marginals exist? Decided through
///   max s  s.t.  J_f >= s I, marginals(J) = noisy effects,
/// feasible iff the optimum clears the -1e-7 eigenvalue floor.
std::pair<bool, SolveReport> joint_feasible(const MeasurementSet& set,
                                            double t);

/// Bisection on t with joint_feasible; bracket width <= tol (default 1e-4,
/// at most 40 iterations).
TauBracket tau_general(const MeasurementSet& set, double tol = 1e-4);

/// Dichotomic sets use the sign-pattern program above (pairing = lambda);
/// general sets take the Lagrangian dual of joint_feasible, normalized so
/// that pairing = 1 - s*.
WitnessCertificate witness_search(const MeasurementSet& set);

/// True iff rho - sum_x eps_x W_x >= -1e-8 for all 2^g sign patterns.
bool verify_witness_dichotomic(const std::vector<HermitianOperator>& w,
                               const HermitianOperator& rho);

/// Measurement set of the POVMs ((I+A_x)/2, (I-A_x)/2).
MeasurementSet measurement_set_of(const std::vector<DichotomicObservable>& a);

}  // namespace incompat

#endif
