#ifndef INCOMPAT_SPECTRA_HPP
#define INCOMPAT_SPECTRA_HPP

#include <functional>
#include <vector>

#include "incompat/core.hpp"

namespace incompat {

/// Reference spectral law: point masses plus an absolutely continuous
/// density on a finite support interval; total mass 1.
struct SpectralLaw {
  std::vector<std::pair<double, double>> atoms;  // (location, mass)
  std::function<double(double)> density;         // zero outside [lo, hi]
  double lo = 0.0;
  double hi = 0.0;

  double cdf(double x) const;       // right-continuous
  double cdf_left(double x) const;  // left limit
  double total_mass() const;
  double mean() const;
  double moment(int p) const;
};

struct EmpiricalSpectrum {
  std::vector<double> eigenvalues;  // sorted ascending
  Eigen::Index dim = 0;
};

/// Free convolution of g symmetric Bernoulli laws: density
/// g sqrt(4(g-1) - x^2) / (2 pi (g^2 - x^2)) on [-2 sqrt(g-1), 2 sqrt(g-1)].
SpectralLaw kesten_mckay(int g);

/// Exact moment of X = <phi| U^H Delta U |phi> for Haar U and the balanced
/// signature Delta: zero for odd p, binom(d/2+q-1, q) / binom(d+2q-1, 2q)
/// for p = 2q.
double haar_projection_moment(Eigen::Index d, int p);

/// s + t - 2st -+ 2 sqrt(st(1-s)(1-t)).
std::pair<double, double> phi_pm(double s, double t);

/// Limiting effect spectrum of a k-outcome induced POVM at ratio c = d/(kn):
/// atoms max(0, 1-1/(ck)) at 0 and max(0, 1-1/c+1/(ck)) at 1 plus the
/// density sqrt((x-phi-)(phi+-x)) / (2 pi c x (1-x)) on [phi-, phi+] with
/// phi_pm(c, 1/k).
SpectralLaw nu_kc(int k, double c);

/// Normalized law of cos^2(theta) over the nontrivial principal angles
/// between independent uniform subspaces of trace ratios alpha, beta:
/// density sqrt((x-l-)(l+-x)) / (2 pi x (1-x)) on [l-, l+], divided by the
/// block mass min(alpha, beta, 1-alpha, 1-beta).
SpectralLaw subspace_overlap_law(double alpha, double beta);

struct InducedThresholds {
  double witness_c = 0.0;      // above: asymptotically incompatible
  double jordan_c_g2 = 0.0;    // below (g = 2): asymptotically compatible
  double noise_c_g2 = 0.0;     // below (g = 2): asymptotically compatible
  double noise_c_g = 0.0;      // below: asymptotically compatible
};

/// The four closed-form threshold curves in c for g induced k-outcome POVMs.
InducedThresholds induced_thresholds(int k, int g);

EmpiricalSpectrum empirical_spectrum(const HermitianOperator& h);

/// CDF of a law cached on a 10^4-cell grid in the edge-absorbing variable;
/// build once when many KS distances are taken against the same law.
class LawCdfCache {
 public:
  explicit LawCdfCache(const SpectralLaw& law);
  double cdf(double x) const;
  double cdf_left(double x) const;

 private:
  std::vector<std::pair<double, double>> atoms_;
  double lo_ = 0.0;
  double hi_ = 0.0;
  std::vector<double> cum_;

  double ac_cdf(double x) const;
};

/// sup over the eigenvalue grid of |empirical CDF - law CDF|, comparing both
/// sides of every jump.
double ks_distance(const EmpiricalSpectrum& emp, const SpectralLaw& law);
double ks_distance(const EmpiricalSpectrum& emp, const LawCdfCache& cache);

/// Adaptive Gauss-Kronrod quadrature with a trigonometric substitution that
/// absorbs square-root edge behavior; used for all law masses and CDFs.
double integrate_density(const std::function<double(double)>& f, double lo,
                         double hi, double abs_tol = 1e-8);

}  // namespace incompat

#endif
