#include "incompat/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace incompat {

namespace {

// Gauss-Kronrod 7-15 nodes and weights on [-1, 1].
constexpr int kKronrodPoints = 15;
constexpr double kNodes[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769,
    0.741531185599394, 0.586087235467691, 0.405845151377397,
    0.207784955007898, 0.0};
constexpr double kWeightsK[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250,
    0.140653259715525, 0.169004726639267, 0.190350578064785,
    0.204432940075298, 0.209482141084728};
constexpr double kWeightsG[4] = {0.129484966168870, 0.279705391489277,
                                 0.381830050505119, 0.417959183673469};

struct GkResult {
  double value = 0.0;
  double error = 0.0;
};

GkResult gk15(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  double resk = 0.0;
  double resg = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double dx = half * kNodes[i];
    double fv = 0.0;
    if (i == 7) {
      fv = f(mid);
      if (!std::isfinite(fv)) fv = 0.0;
      resk += kWeightsK[i] * fv;
      resg += kWeightsG[3] * fv;
      continue;
    }
    double fl = f(mid - dx);
    double fr = f(mid + dx);
    if (!std::isfinite(fl)) fl = 0.0;
    if (!std::isfinite(fr)) fr = 0.0;
    resk += kWeightsK[i] * (fl + fr);
    if (i % 2 == 1) resg += kWeightsG[i / 2] * (fl + fr);
  }
  GkResult r;
  r.value = resk * half;
  r.error = std::abs(resk - resg) * half;
  return r;
}

double adaptive_gk(const std::function<double(double)>& f, double a, double b,
                   double abs_tol) {
  struct Segment {
    double a, b, value, error;
  };
  std::vector<Segment> segs;
  GkResult first = gk15(f, a, b);
  segs.push_back({a, b, first.value, first.error});
  double total_err = first.error;
  int splits = 0;
  while (total_err > abs_tol) {
    if (++splits > 2000) {
      throw QuadratureFailure("adaptive quadrature did not converge");
    }
    std::size_t worst = 0;
    for (std::size_t i = 1; i < segs.size(); ++i) {
      if (segs[i].error > segs[worst].error) worst = i;
    }
    const Segment seg = segs[worst];
    const double mid = 0.5 * (seg.a + seg.b);
    const GkResult left = gk15(f, seg.a, mid);
    const GkResult right = gk15(f, mid, seg.b);
    total_err += left.error + right.error - seg.error;
    segs[worst] = {seg.a, mid, left.value, left.error};
    segs.push_back({mid, seg.b, right.value, right.error});
  }
  double total = 0.0;
  for (const auto& s : segs) total += s.value;
  return total;
}

}  // namespace

double integrate_density(const std::function<double(double)>& f, double lo,
                         double hi, double abs_tol) {
  if (!(hi > lo)) return 0.0;
  const double width = hi - lo;
  // x = lo + width sin^2(u) absorbs sqrt-vanishing and inverse-sqrt edges.
  auto g = [&](double u) {
    const double s = std::sin(u);
    const double x = lo + width * s * s;
    return f(x) * width * std::sin(2.0 * u);
  };
  return adaptive_gk(g, 0.0, 0.5 * std::numbers::pi, abs_tol);
}

double SpectralLaw::cdf(double x) const {
  double mass = 0.0;
  for (const auto& [loc, w] : atoms) {
    if (loc <= x) mass += w;
  }
  if (density && x > lo) {
    mass += integrate_density(density, lo, std::min(x, hi));
  }
  return mass;
}

double SpectralLaw::cdf_left(double x) const {
  double mass = 0.0;
  for (const auto& [loc, w] : atoms) {
    if (loc < x) mass += w;
  }
  if (density && x > lo) {
    mass += integrate_density(density, lo, std::min(x, hi));
  }
  return mass;
}

double SpectralLaw::total_mass() const {
  double mass = 0.0;
  for (const auto& [loc, w] : atoms) mass += w;
  if (density) mass += integrate_density(density, lo, hi);
  return mass;
}

double SpectralLaw::moment(int p) const {
  double m = 0.0;
  for (const auto& [loc, w] : atoms) m += w * std::pow(loc, p);
  if (density) {
    auto f = [this, p](double x) { return std::pow(x, p) * density(x); };
    m += integrate_density(f, lo, hi);
  }
  return m;
}

double SpectralLaw::mean() const { return moment(1); }

SpectralLaw kesten_mckay(int g) {
  if (g < 2) throw ParameterOutOfRange("Kesten-McKay law needs g >= 2");
  const double gd = static_cast<double>(g);
  const double edge = 2.0 * std::sqrt(gd - 1.0);
  SpectralLaw law;
  law.lo = -edge;
  law.hi = edge;
  law.density = [gd, edge](double x) {
    if (std::abs(x) >= edge) return 0.0;
    const double num = std::sqrt(4.0 * (gd - 1.0) - x * x);
    return gd * num / (2.0 * std::numbers::pi * (gd * gd - x * x));
  };
  return law;
}

double haar_projection_moment(Eigen::Index d, int p) {
  if (d < 2 || d % 2 != 0) {
    throw ParameterOutOfRange("moment formula needs even d >= 2");
  }
  if (p < 0) throw ParameterOutOfRange("moment order must be nonnegative");
  if (p % 2 == 1) return 0.0;
  const int q = p / 2;
  // binom(d/2 + q - 1, q) / binom(d + 2q - 1, 2q) via log-gamma.
  auto log_binom = [](double n, double k) {
    return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) -
           std::lgamma(n - k + 1.0);
  };
  const double dd = static_cast<double>(d);
  return std::exp(log_binom(dd / 2.0 + q - 1.0, q) -
                  log_binom(dd + 2.0 * q - 1.0, 2.0 * q));
}

std::pair<double, double> phi_pm(double s, double t) {
  if (!(s > 0.0 && s < 1.0 && t > 0.0 && t < 1.0)) {
    throw ParameterOutOfRange("phi_pm needs s, t in (0, 1)");
  }
  // (sqrt(s(1-t)) -+ sqrt(t(1-s)))^2: exact nonnegativity at phi-.
  const double a = std::sqrt(s * (1.0 - t));
  const double b = std::sqrt(t * (1.0 - s));
  return {(a - b) * (a - b), std::min(1.0, (a + b) * (a + b))};
}

SpectralLaw nu_kc(int k, double c) {
  if (k < 2) throw ParameterOutOfRange("nu_kc needs k >= 2");
  if (!(c > 0.0 && c <= 1.0)) throw ParameterOutOfRange("nu_kc needs c in (0, 1]");
  const double kd = static_cast<double>(k);
  SpectralLaw law;
  const double atom0 = std::max(0.0, 1.0 - 1.0 / (c * kd));
  const double atom1 = std::max(0.0, 1.0 - 1.0 / c + 1.0 / (c * kd));
  if (atom0 > 0.0) law.atoms.push_back({0.0, atom0});
  if (atom1 > 0.0) law.atoms.push_back({1.0, atom1});
  if (c == 1.0) {
    // Projective limit: the continuous part degenerates to a point of zero
    // mass at 1 - 1/k.
    law.lo = law.hi = 1.0 - 1.0 / kd;
    return law;
  }
  const auto [pm, pp] = phi_pm(c, 1.0 / kd);
  law.lo = pm;
  law.hi = pp;
  law.density = [pm, pp, c](double x) {
    if (x <= pm || x >= pp || x <= 0.0 || x >= 1.0) return 0.0;
    return std::sqrt((x - pm) * (pp - x)) /
           (2.0 * std::numbers::pi * c * x * (1.0 - x));
  };
  return law;
}

SpectralLaw subspace_overlap_law(double alpha, double beta) {
  const auto [lm, lp] = phi_pm(alpha, beta);
  const double gamma =
      std::min(std::min(alpha, beta), std::min(1.0 - alpha, 1.0 - beta));
  SpectralLaw law;
  law.lo = lm;
  law.hi = lp;
  law.density = [lm, lp, gamma](double x) {
    if (x <= lm || x >= lp || x <= 0.0 || x >= 1.0) return 0.0;
    return std::sqrt((x - lm) * (lp - x)) /
           (2.0 * std::numbers::pi * x * (1.0 - x) * gamma);
  };
  return law;
}

InducedThresholds induced_thresholds(int k, int g) {
  if (k < 2 || g < 2) throw ParameterOutOfRange("induced thresholds need k, g >= 2");
  const double kd = static_cast<double>(k);
  const double gd = static_cast<double>(g);
  InducedThresholds th;
  th.witness_c = 4.0 * (kd - 1.0) * gd /
                 ((kd - 1.0) * (kd - 1.0) * gd * gd -
                  2.0 * (kd - 2.0) * (kd - 1.0) * gd + kd * kd);
  const double r2 = std::numbers::sqrt2;
  th.jordan_c_g2 =
      ((3.0 - 2.0 * r2) * kd + 2.0 * (r2 - 1.0)) / (kd * kd + 4.0 * kd - 4.0);
  th.noise_c_g2 =
      1.0 / (6.0 * kd + 4.0 * std::sqrt((kd - 1.0) * (2.0 * kd - 1.0)) - 4.0);
  th.noise_c_g =
      1.0 / gd /
      (2.0 * gd * (kd - 1.0) +
       2.0 * std::sqrt((gd - 1.0) * (kd - 1.0) * (gd * (kd - 1.0) + 1.0)) -
       kd + 2.0);
  return th;
}

EmpiricalSpectrum empirical_spectrum(const HermitianOperator& h) {
  EmpiricalSpectrum s;
  s.dim = h.dim();
  const rvector_t ev = h.eigenvalues();
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  return s;
}

namespace {
constexpr int kCdfGrid = 10000;
}

LawCdfCache::LawCdfCache(const SpectralLaw& law)
    : atoms_(law.atoms), lo_(law.lo), hi_(law.hi) {
  // The a.c. CDF is cached on a uniform grid in the edge-absorbing variable
  // u (x = lo + (hi-lo) sin^2 u), where it is smooth.
  cum_.assign(kCdfGrid + 1, 0.0);
  if (!law.density || !(hi_ > lo_)) {
    hi_ = lo_;
    return;
  }
  const double width = hi_ - lo_;
  const double du = 0.5 * std::numbers::pi / kCdfGrid;
  const auto density = law.density;
  const double lo = lo_;
  auto g = [density, lo, width](double u) {
    const double s = std::sin(u);
    const double v = density(lo + width * s * s) * width * std::sin(2.0 * u);
    return std::isfinite(v) ? v : 0.0;
  };
  for (int i = 0; i < kCdfGrid; ++i) {
    cum_[i + 1] = cum_[i] + gk15(g, i * du, (i + 1) * du).value;
  }
}

double LawCdfCache::ac_cdf(double x) const {
  if (hi_ <= lo_ || x <= lo_) return 0.0;
  if (x >= hi_) return cum_[kCdfGrid];
  const double ratio = std::clamp((x - lo_) / (hi_ - lo_), 0.0, 1.0);
  const double u = std::asin(std::sqrt(ratio));
  const double pos = u / (0.5 * std::numbers::pi) * kCdfGrid;
  const int cell = std::clamp(static_cast<int>(pos), 0, kCdfGrid - 1);
  const double frac = pos - cell;
  return cum_[static_cast<std::size_t>(cell)] +
         frac * (cum_[static_cast<std::size_t>(cell) + 1] -
                 cum_[static_cast<std::size_t>(cell)]);
}

double LawCdfCache::cdf(double x) const {
  double mass = ac_cdf(x);
  for (const auto& [loc, w] : atoms_) {
    if (loc <= x) mass += w;
  }
  return mass;
}

double LawCdfCache::cdf_left(double x) const {
  double mass = ac_cdf(x);
  for (const auto& [loc, w] : atoms_) {
    if (loc < x) mass += w;
  }
  return mass;
}

double ks_distance(const EmpiricalSpectrum& emp, const SpectralLaw& law) {
  return ks_distance(emp, LawCdfCache(law));
}

double ks_distance(const EmpiricalSpectrum& emp, const LawCdfCache& cache) {
  if (emp.eigenvalues.empty()) {
    throw ParameterOutOfRange("empirical spectrum is empty");
  }
  if (!std::is_sorted(emp.eigenvalues.begin(), emp.eigenvalues.end())) {
    throw ParameterOutOfRange("empirical spectrum must be sorted");
  }
  const double n = static_cast<double>(emp.eigenvalues.size());
  double dist = 0.0;
  for (std::size_t i = 0; i < emp.eigenvalues.size(); ++i) {
    const double x = emp.eigenvalues[i];
    const double above = (static_cast<double>(i) + 1.0) / n;
    const double below = static_cast<double>(i) / n;
    dist = std::max(dist, std::abs(above - cache.cdf(x)));
    dist = std::max(dist, std::abs(below - cache.cdf_left(x)));
  }
  return dist;
}

}  // namespace incompat
