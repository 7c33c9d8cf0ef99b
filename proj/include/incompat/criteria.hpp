#ifndef INCOMPAT_CRITERIA_HPP
#define INCOMPAT_CRITERIA_HPP

#include <string>
#include <vector>

#include "incompat/core.hpp"
#include "incompat/rng.hpp"

namespace incompat {

/// One closed-form bound on a compatibility degree.
struct BoundValue {
  enum class Kind { LowerOnTau, UpperOnTau };
  double value = 0.0;
  Kind kind = Kind::LowerOnTau;
  std::string source;         // criterion name
  std::string applicability;  // parameter predicate the bound needs
  bool tight = false;         // known to be an equality in this regime
};

/// Every applicable known bound for g measurements on dimension d with the
/// given outcome counts. Dichotomic sets get the 1/sqrt(g) and c(d) lower
/// bounds (the former tight for d >= 2^ceil((g-1)/2)); basis-sized sets get
/// the cloning lower bound and the MUB upper bound.
std::vector<BoundValue> bound_library(Eigen::Index d, int g,
                                      const std::vector<Eigen::Index>& k_list);

/// c(d) = 4^{-d'} binom(2d', d') with d' = floor(d/2).
double central_binomial_bound(Eigen::Index d);

/// One-sided test: all effect anticommutators M_i N_j + N_j M_i PSD implies
/// the pair is compatible.
bool jordan_compatible(const Povm& m, const Povm& n);

/// Largest t (bisection, bracket width <= tol) at which the anticommutator
/// test certifies the t-noised projector pair compatible; a LowerOnTau bound.
BoundValue jordan_tau_lower(const HermitianOperator& p,
                            const HermitianOperator& q, double tol);

/// One-sided test: sum_{x,i} lambda_min(M_{i|x}) >= g - 1 implies compatible.
bool noise_content_compatible(const MeasurementSet& set);

/// Exhaustive check of the witness sufficiency condition
/// max_f lambda_max(sum_x W_{f(x)|x}) <= 1/d (uniform outcome count).
bool witness_sufficient(const std::vector<std::vector<HermitianOperator>>& w);

struct ColinearWitnessResult {
  bool is_witness = false;
  double certified_t_threshold = 0.0;  // noisy set incompatible for t above
};

/// Witness W_x = s A_x / d with state I/d for projective observables;
/// valid iff lambda_max(sum_x eps_x A_x) <= 1/s for all sign patterns, and
/// then certifies incompatibility of the t-noised set for t > 1/(s g).
ColinearWitnessResult colinear_projection_witness(
    const std::vector<DichotomicObservable>& a, double s);

/// max over outcome selections f of lambda_max(sum_x U_x |f(x)><f(x)| U_x^*),
/// by exhaustive enumeration (guard d^g <= 1e6).
double eta(const std::vector<cmatrix_t>& unitaries);

/// Two-basis closed form eta(I, U) = 1 + max_{ij} |U_ij|.
double eta_g2(const cmatrix_t& u);

/// Threshold (d eta - g) / (g (d-1)); noisy basis measurements are certified
/// incompatible for any t strictly above it.
double eta_incompatibility_threshold(double eta_value, Eigen::Index d, int g);

/// Sampled lower bound max_phi sum_x ||U_x phi||_inf^2 over random unit
/// vectors plus the d*g basis pull-back candidates U_x^{-1}|i>.
double eta_lower_sampled(const std::vector<cmatrix_t>& unitaries, int trials,
                         SeededRng& rng);

}  // namespace incompat

#endif
