#include "incompat/criteria.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>

namespace incompat {

namespace {

double sign_bit(unsigned mask, int x) {
  return (mask >> x) & 1u ? -1.0 : 1.0;
}

}  // namespace

double central_binomial_bound(Eigen::Index d) {
  const Eigen::Index dp = d / 2;
  // 4^{-d'} binom(2d', d') computed as a stable running product.
  double v = 1.0;
  for (Eigen::Index j = 1; j <= dp; ++j) {
    v *= (2.0 * static_cast<double>(j) - 1.0) / (2.0 * static_cast<double>(j));
  }
  return v;
}

std::vector<BoundValue> bound_library(Eigen::Index d, int g,
                                      const std::vector<Eigen::Index>& k_list) {
  if (d < 1 || g < 1 || static_cast<int>(k_list.size()) != g) {
    throw ParameterOutOfRange("bound_library needs d >= 1 and one outcome count per measurement");
  }
  std::vector<BoundValue> bounds;
  const double gd = static_cast<double>(g);
  const double dd = static_cast<double>(d);

  const bool dichotomic =
      std::all_of(k_list.begin(), k_list.end(),
                  [](Eigen::Index k) { return k == 2; });
  const bool basis_sized =
      std::all_of(k_list.begin(), k_list.end(),
                  [d](Eigen::Index k) { return k == d; });
  const Eigen::Index k_max = *std::max_element(k_list.begin(), k_list.end());

  if (dichotomic) {
    const int exponent = (g - 1 + 1) / 2;  // ceil((g-1)/2)
    const bool tight = d >= (Eigen::Index{1} << exponent);
    bounds.push_back({1.0 / std::sqrt(gd), BoundValue::Kind::LowerOnTau,
                      "dichotomic-sqrt-g", "all k_x = 2", tight});
    if (tight) {
      bounds.push_back({1.0 / std::sqrt(gd), BoundValue::Kind::UpperOnTau,
                        "dichotomic-sqrt-g",
                        "all k_x = 2 and d >= 2^ceil((g-1)/2)", true});
    }
    bounds.push_back({central_binomial_bound(d), BoundValue::Kind::LowerOnTau,
                      "central-binomial", "all k_x = 2", false});
  }

  bounds.push_back({1.0 / gd, BoundValue::Kind::LowerOnTau, "uniform-1-over-g",
                    "any set", false});

  const double km = static_cast<double>(k_max);
  bounds.push_back({(gd + km * dd) / (gd * (1.0 + km * dd)),
                    BoundValue::Kind::LowerOnTau, "cloning-k-max", "any set",
                    false});

  if (basis_sized) {
    bounds.push_back({(gd + dd) / (gd * (dd + 1.0)),
                      BoundValue::Kind::LowerOnTau, "cloning-bases",
                      "basis measurements (k = d)", false});
    const double rd = std::sqrt(dd);
    bounds.push_back({(gd + rd) / (gd * (rd + 1.0)),
                      BoundValue::Kind::UpperOnTau, "mub-upper",
                      "mutually unbiased bases", g == 2});
  }
  return bounds;
}

bool jordan_compatible(const Povm& m, const Povm& n) {
  if (m.dim != n.dim) throw DimensionMismatch("POVMs must share dimension");
  for (const auto& mi : m.effects) {
    for (const auto& nj : n.effects) {
      const cmatrix_t anti = mi.mat() * nj.mat() + nj.mat() * mi.mat();
      if (lambda_min(0.5 * (anti + anti.adjoint().eval())) < -kPsdFloor) {
        return false;
      }
    }
  }
  return true;
}

BoundValue jordan_tau_lower(const HermitianOperator& p,
                            const HermitianOperator& q, double tol) {
  if (p.dim() != q.dim()) throw DimensionMismatch("projectors must share dimension");
  const Eigen::Index d = p.dim();
  const cmatrix_t id = cmatrix_t::Identity(d, d);
  const cmatrix_t pc = id - p.mat();
  const cmatrix_t qc = id - q.mat();
  const cmatrix_t* ps[2] = {&p.mat(), &pc};
  const cmatrix_t* qs[2] = {&q.mat(), &qc};

  // lambda_min >= -floor tested as a Cholesky factorization of M + floor I;
  // much cheaper than an eigensolve inside the bisection.
  auto holds = [&](double t) {
    for (const cmatrix_t* pp : ps) {
      for (const cmatrix_t* qq : qs) {
        cmatrix_t m = t * t * ((*pp) * (*qq) + (*qq) * (*pp)) +
                      t * (1.0 - t) * (*pp + *qq) +
                      (0.5 * (1.0 - t) * (1.0 - t) + kPsdFloor) * id;
        m = 0.5 * (m + m.adjoint().eval());
        if (Eigen::LLT<cmatrix_t>(m).info() != Eigen::Success) {
          return false;
        }
      }
    }
    return true;
  };

  BoundValue bound;
  bound.kind = BoundValue::Kind::LowerOnTau;
  bound.source = "jordan-product";
  bound.applicability = "two projective dichotomic measurements";
  if (holds(1.0)) {
    bound.value = 1.0;
    return bound;
  }
  double lo = 0.0;
  double hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (holds(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  bound.value = lo;
  return bound;
}

bool noise_content_compatible(const MeasurementSet& set) {
  double sum = 0.0;
  for (const auto& povm : set.povms) {
    for (const auto& effect : povm.effects) {
      sum += effect.lambda_min();
    }
  }
  return sum >= static_cast<double>(set.size()) - 1.0;
}

bool witness_sufficient(const std::vector<std::vector<HermitianOperator>>& w) {
  if (w.empty() || w.front().empty()) {
    throw ParameterOutOfRange("witness tuple must be nonempty");
  }
  const int g = static_cast<int>(w.size());
  const std::size_t k = w.front().size();
  const Eigen::Index d = w.front().front().dim();
  for (const auto& wx : w) {
    if (wx.size() != k) {
      throw ParameterOutOfRange("witness_sufficient needs a uniform outcome count");
    }
    for (const auto& op : wx) {
      if (op.dim() != d) throw DimensionMismatch("witness blocks must share dimension");
    }
  }
  double total = 1.0;
  for (int x = 0; x < g; ++x) {
    total *= static_cast<double>(k);
    if (total > 1e6) throw ProblemTooLarge("witness_sufficient capped at k^g = 1e6");
  }

  std::vector<std::size_t> f(static_cast<std::size_t>(g), 0);
  while (true) {
    cmatrix_t sum = cmatrix_t::Zero(d, d);
    for (int x = 0; x < g; ++x) {
      sum += w[static_cast<std::size_t>(x)][f[static_cast<std::size_t>(x)]].mat();
    }
    if (lambda_max(sum) > 1.0 / static_cast<double>(d) + 1e-10) return false;
    int x = 0;
    for (; x < g; ++x) {
      if (++f[static_cast<std::size_t>(x)] < k) break;
      f[static_cast<std::size_t>(x)] = 0;
    }
    if (x == g) break;
  }
  return true;
}

ColinearWitnessResult colinear_projection_witness(
    const std::vector<DichotomicObservable>& a, double s) {
  const int g = static_cast<int>(a.size());
  if (g < 1) throw ParameterOutOfRange("need at least one observable");
  if (g > 24) throw GTooLarge("sign enumeration capped at g = 24");
  if (!(s > 0.0)) throw ParameterOutOfRange("scale s must be positive");
  const Eigen::Index d = a.front().dim;
  const cmatrix_t id = cmatrix_t::Identity(d, d);
  for (const auto& obs : a) {
    if (obs.dim != d) throw DimensionMismatch("observables must share dimension");
    if ((obs.a.mat() * obs.a.mat() - id).cwiseAbs().maxCoeff() > 1e-8) {
      throw ParameterOutOfRange("colinear witness requires projective observables");
    }
  }

  ColinearWitnessResult result;
  result.certified_t_threshold = 1.0 / (s * static_cast<double>(g));
  result.is_witness = true;
  // lambda_max(S_eps) = -lambda_min(S_-eps), so half the patterns suffice
  // when both spectrum ends are checked.
  const unsigned half = 1u << (g - 1);
  for (unsigned e = 0; e < half; ++e) {
    cmatrix_t sum = cmatrix_t::Zero(d, d);
    for (int x = 0; x < g; ++x) {
      sum += sign_bit(e, x) * a[static_cast<std::size_t>(x)].a.mat();
    }
    const rvector_t ev = hermitian_eigenvalues(sum);
    const double extreme = std::max(ev(ev.size() - 1), -ev(0));
    if (extreme > 1.0 / s - 1e-9) {
      result.is_witness = false;
      break;
    }
  }
  return result;
}

double eta(const std::vector<cmatrix_t>& unitaries) {
  const int g = static_cast<int>(unitaries.size());
  if (g < 1) throw ParameterOutOfRange("eta needs at least one unitary");
  const Eigen::Index d = unitaries.front().rows();
  double total = 1.0;
  for (int x = 0; x < g; ++x) {
    if (unitaries[static_cast<std::size_t>(x)].rows() != d) {
      throw DimensionMismatch("unitaries must share dimension");
    }
    total *= static_cast<double>(d);
    if (total > 1e6) throw ProblemTooLarge("eta enumeration capped at d^g = 1e6");
  }

  std::vector<Eigen::Index> f(static_cast<std::size_t>(g), 0);
  double best = 0.0;
  while (true) {
    cmatrix_t sum = cmatrix_t::Zero(d, d);
    for (int x = 0; x < g; ++x) {
      const auto& u = unitaries[static_cast<std::size_t>(x)];
      const auto col = u.col(f[static_cast<std::size_t>(x)]);
      sum += col * col.adjoint();
    }
    best = std::max(best, lambda_max(sum));
    int x = 0;
    for (; x < g; ++x) {
      if (++f[static_cast<std::size_t>(x)] < d) break;
      f[static_cast<std::size_t>(x)] = 0;
    }
    if (x == g) break;
  }
  return best;
}

double eta_g2(const cmatrix_t& u) {
  return 1.0 + u.cwiseAbs().maxCoeff();
}

double eta_incompatibility_threshold(double eta_value, Eigen::Index d, int g) {
  if (d < 2) throw ParameterOutOfRange("threshold needs d >= 2");
  if (!(eta_value >= 1.0 && eta_value <= static_cast<double>(g) + 1e-9)) {
    throw ParameterOutOfRange("eta must lie in [1, g]");
  }
  const double dd = static_cast<double>(d);
  const double gd = static_cast<double>(g);
  return (dd * eta_value - gd) / (gd * (dd - 1.0));
}

double eta_lower_sampled(const std::vector<cmatrix_t>& unitaries, int trials,
                         SeededRng& rng) {
  const int g = static_cast<int>(unitaries.size());
  if (g < 1) throw ParameterOutOfRange("eta needs at least one unitary");
  if (trials < 1) throw ParameterOutOfRange("trials must be >= 1");
  const Eigen::Index d = unitaries.front().rows();

  auto value_at = [&](const cvector_t& phi) {
    double v = 0.0;
    for (const auto& u : unitaries) {
      v += (u * phi).cwiseAbs2().maxCoeff();  // ||U phi||_inf^2
    }
    return v;
  };

  double best = 0.0;
  // Basis pull-back candidates U_x^{-1}|i> = U_x^H e_i.
  for (const auto& u : unitaries) {
    for (Eigen::Index i = 0; i < d; ++i) {
      const cvector_t phi = u.row(i).adjoint();
      best = std::max(best, value_at(phi));
    }
  }
  for (int trial = 0; trial < trials; ++trial) {
    cvector_t phi(d);
    for (Eigen::Index i = 0; i < d; ++i) {
      phi(i) = complex_t(rng.normal(), rng.normal());
    }
    phi.normalize();
    best = std::max(best, value_at(phi));
  }
  return best;
}

}  // namespace incompat
