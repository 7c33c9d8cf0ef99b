#include "incompat/compat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace incompat {

namespace {

double sign_bit(unsigned mask, int x) {
  return (mask >> x) & 1u ? -1.0 : 1.0;
}

std::vector<Eigen::Index> strides_of(const std::vector<Eigen::Index>& counts) {
  std::vector<Eigen::Index> strides(counts.size());
  Eigen::Index acc = 1;
  for (int x = static_cast<int>(counts.size()) - 1; x >= 0; --x) {
    strides[static_cast<std::size_t>(x)] = acc;
    acc *= counts[static_cast<std::size_t>(x)];
  }
  return strides;
}

}  // namespace

const cmatrix_t& SolveReport::solution_block(const std::string& name) const {
  for (const auto& [n, m] : solution) {
    if (n == name) return m;
  }
  throw Error("no solution block named " + name);
}

SolveReport compatibility_lambda_dichotomic(
    const std::vector<DichotomicObservable>& a) {
  const int g = static_cast<int>(a.size());
  if (g < 1) throw ParameterOutOfRange("need at least one observable");
  if (g > 16) throw GTooLarge("dichotomic compatibility program capped at g = 16");
  const Eigen::Index d = a.front().dim;
  for (const auto& obs : a) {
    if (obs.dim != d) throw DimensionMismatch("observables must share dimension");
  }

  const unsigned npat = 1u << g;
  const double inv = 1.0 / static_cast<double>(npat);

  // Variable blocks S_eps = rho - sum_x eps_x Y_x >= 0; rho and Y are the
  // first sign-harmonics of S, so the program becomes standard-form with the
  // higher harmonics pinned to zero.
  sdp::Problem prob;
  for (unsigned e = 0; e < npat; ++e) {
    cmatrix_t sig = cmatrix_t::Zero(d, d);
    for (int x = 0; x < g; ++x) sig += sign_bit(e, x) * a[x].a.mat();
    prob.add_block(static_cast<int>(d), inv * sig);
  }

  for (unsigned t = 0; t < npat; ++t) {
    if (std::popcount(t) < 2) continue;
    std::vector<sdp::MatrixTerm> terms;
    terms.reserve(npat);
    for (unsigned e = 0; e < npat; ++e) {
      double s = 1.0;
      for (int x = 0; x < g; ++x) {
        if ((t >> x) & 1u) s *= sign_bit(e, x);
      }
      terms.push_back({static_cast<int>(e), s});
    }
    sdp::append_matrix_equality(prob, terms, {}, cmatrix_t::Zero(d, d));
  }
  {
    std::vector<std::pair<int, double>> tr;
    for (unsigned e = 0; e < npat; ++e) tr.push_back({static_cast<int>(e), 1.0});
    sdp::append_trace_equality(prob, tr, static_cast<double>(npat));
  }

  const sdp::Solution sol = sdp::solve(prob);

  SolveReport report;
  report.status = sol.status;
  report.gap = sol.rel_gap;
  report.value = -sol.primal_value;  // min form of the maximization
  if (!sol.x.empty()) {
    cmatrix_t rho = cmatrix_t::Zero(d, d);
    for (unsigned e = 0; e < npat; ++e) rho += inv * sol.x[e];
    std::vector<cmatrix_t> y(static_cast<std::size_t>(g),
                             cmatrix_t::Zero(d, d));
    for (int x = 0; x < g; ++x) {
      for (unsigned e = 0; e < npat; ++e) {
        y[static_cast<std::size_t>(x)] -= inv * sign_bit(e, x) * sol.x[e];
      }
    }
    for (int x = 0; x < g; ++x) {
      report.solution.push_back({"Y" + std::to_string(x + 1),
                                 std::move(y[static_cast<std::size_t>(x)])});
    }
    report.solution.push_back({"rho", std::move(rho)});
  }
  return report;
}

TauBracket tau_dichotomic(const std::vector<DichotomicObservable>& a) {
  const SolveReport report = compatibility_lambda_dichotomic(a);
  if (report.status == SolveStatus::SolverFailure) {
    throw SolverFailure("dichotomic compatibility program did not converge");
  }
  const double lambda = report.value;
  TauBracket bracket;
  if (lambda <= 1.0 + 1e-12) {
    bracket.lower = bracket.upper = 1.0;
    bracket.lower_source = bracket.upper_source = "sdp-lambda (clipped at 1)";
    return bracket;
  }
  const double tau = 1.0 / lambda;
  bracket.lower = bracket.upper = tau;
  bracket.lower_source = bracket.upper_source =
      report.status == SolveStatus::Optimal ? "sdp-lambda"
                                            : "sdp-lambda (inaccurate)";
  return bracket;
}

namespace {

struct JointEncoding {
  sdp::Problem prob;
  std::vector<Eigen::Index> counts;
  std::vector<Eigen::Index> strides;
  int scalar_block = 0;     // x_u with s = x_u - 1
  Eigen::Index njoint = 0;  // number of joint-outcome blocks
  // Row ranges of the retained marginal groups, for dual extraction:
  // group_rows[x][i] = first row index of the (x, i) matrix equality.
  std::vector<std::vector<int>> group_rows;
};

JointEncoding encode_joint(const MeasurementSet& set, double t) {
  JointEncoding enc;
  enc.counts = set.outcome_counts();
  enc.strides = strides_of(enc.counts);
  const Eigen::Index d = set.dim;
  const int g = static_cast<int>(set.size());

  Eigen::Index njoint = 1;
  for (auto k : enc.counts) njoint *= k;
  if (njoint > 4096) {
    throw ProblemTooLarge(
        "joint measurement program capped at 4096 outcome combinations");
  }
  enc.njoint = njoint;

  const MeasurementSet noisy = apply_white_noise(set, t);

  for (Eigen::Index f = 0; f < njoint; ++f) {
    enc.prob.add_block(static_cast<int>(d));
  }
  {
    cmatrix_t cu(1, 1);
    cu(0, 0) = -1.0;  // maximize u
    enc.scalar_block = enc.prob.add_block(1, cu);
  }

  enc.group_rows.assign(static_cast<std::size_t>(g), {});
  for (int x = 0; x < g; ++x) {
    const Eigen::Index kx = enc.counts[static_cast<std::size_t>(x)];
    const Eigen::Index retained = (x == 0) ? kx : kx - 1;
    const double cx = static_cast<double>(njoint / kx);
    for (Eigen::Index i = 0; i < retained; ++i) {
      enc.group_rows[static_cast<std::size_t>(x)].push_back(
          static_cast<int>(enc.prob.constraints.size()));
      std::vector<sdp::MatrixTerm> terms;
      for (Eigen::Index f = 0; f < njoint; ++f) {
        const Eigen::Index fx =
            (f / enc.strides[static_cast<std::size_t>(x)]) % kx;
        if (fx == i) terms.push_back({static_cast<int>(f), 1.0});
      }
      const cmatrix_t rhs =
          noisy.povms[static_cast<std::size_t>(x)]
              .effects[static_cast<std::size_t>(i)]
              .mat() +
          cx * cmatrix_t::Identity(d, d);
      sdp::append_matrix_equality(enc.prob, terms, {{enc.scalar_block, cx}},
                                  rhs);
    }
  }
  return enc;
}

// Reads the Hermitian multiplier of a matrix-equality group back out of the
// rows that append_matrix_equality laid down.
cmatrix_t dual_matrix_of_group(const Eigen::VectorXd& y, int first_row,
                               Eigen::Index d) {
  cmatrix_t w = cmatrix_t::Zero(d, d);
  int row = first_row;
  for (Eigen::Index r = 0; r < d; ++r) w(r, r) = y(row++);
  for (Eigen::Index r = 0; r < d; ++r) {
    for (Eigen::Index c = r + 1; c < d; ++c) {
      const double re = y(row++);
      const double im = y(row++);
      w(r, c) = complex_t(re, im);
      w(c, r) = complex_t(re, -im);
    }
  }
  return w;
}

}  // namespace

std::pair<bool, SolveReport> joint_feasible(const MeasurementSet& set,
                                            double t) {
  JointEncoding enc = encode_joint(set, t);
  const sdp::Solution sol = sdp::solve(enc.prob);
  if (sol.status == SolveStatus::SolverFailure) {
    throw SolverFailure("joint measurement program did not converge");
  }
  const double s_star = sol.x[static_cast<std::size_t>(enc.scalar_block)](0, 0)
                            .real() -
                        1.0;
  const bool feasible = s_star >= -1e-7;

  SolveReport report;
  report.value = s_star;
  report.gap = sol.rel_gap;
  report.status = feasible ? SolveStatus::Optimal : SolveStatus::Infeasible;
  if (sol.status == SolveStatus::Inaccurate) {
    report.status = SolveStatus::Inaccurate;
  }
  const Eigen::Index d = set.dim;
  for (Eigen::Index f = 0; f < enc.njoint; ++f) {
    std::ostringstream name;
    name << "J";
    Eigen::Index rem = f;
    for (std::size_t x = 0; x < enc.counts.size(); ++x) {
      name << "_" << rem / enc.strides[x];
      rem %= enc.strides[x];
    }
    report.solution.push_back(
        {name.str(),
         sol.x[static_cast<std::size_t>(f)] +
             s_star * cmatrix_t::Identity(d, d)});
  }
  return {feasible, report};
}

TauBracket tau_general(const MeasurementSet& set, double tol) {
  TauBracket bracket;
  bracket.lower_source = "joint-sdp bisection (feasible end)";
  bracket.upper_source = "joint-sdp bisection (infeasible end)";
  if (joint_feasible(set, 1.0).first) {
    bracket.lower = bracket.upper = 1.0;
    bracket.upper_source = bracket.lower_source = "joint-sdp (feasible at t=1)";
    return bracket;
  }
  double lo = 0.0;
  double hi = 1.0;
  for (int iter = 0; iter < 40 && hi - lo > tol; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (joint_feasible(set, mid).first) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  bracket.lower = lo;
  bracket.upper = hi;
  return bracket;
}

WitnessCertificate witness_search(const MeasurementSet& set) {
  const auto counts = set.outcome_counts();
  const Eigen::Index d = set.dim;
  const int g = static_cast<int>(set.size());
  const bool dichotomic =
      std::all_of(counts.begin(), counts.end(),
                  [](Eigen::Index k) { return k == 2; });

  WitnessCertificate cert;
  if (dichotomic) {
    std::vector<DichotomicObservable> a;
    a.reserve(static_cast<std::size_t>(g));
    for (const auto& p : set.povms) a.push_back(observable_of(p));
    const SolveReport report = compatibility_lambda_dichotomic(a);
    if (report.status == SolveStatus::SolverFailure) {
      throw SolverFailure("witness program did not converge");
    }
    for (int x = 0; x < g; ++x) {
      const cmatrix_t& yx = report.solution_block("Y" + std::to_string(x + 1));
      cert.witness.emplace_back(yx);
      cert.witness.emplace_back((-yx).eval());
    }
    cert.state = HermitianOperator(report.solution_block("rho"), 1e-8);
    cert.pairing = report.value;
    return cert;
  }

  // General sets: Lagrangian dual of joint_feasible at t = 1. The negated
  // equality multipliers W* satisfy sum_x W*_{f(x)|x} >= 0 for every f and
  // sum_f Tr(W*_f) = 1; the witness is W~ = I/(gd) - W*.
  JointEncoding enc = encode_joint(set, 1.0);
  const sdp::Solution sol = sdp::solve(enc.prob);
  if (sol.status == SolveStatus::SolverFailure) {
    throw SolverFailure("witness program did not converge");
  }
  const double s_star =
      sol.x[static_cast<std::size_t>(enc.scalar_block)](0, 0).real() - 1.0;

  std::vector<std::vector<cmatrix_t>> wstar(static_cast<std::size_t>(g));
  for (int x = 0; x < g; ++x) {
    const Eigen::Index kx = counts[static_cast<std::size_t>(x)];
    auto& wx = wstar[static_cast<std::size_t>(x)];
    wx.assign(static_cast<std::size_t>(kx), cmatrix_t::Zero(d, d));
    const auto& rows = enc.group_rows[static_cast<std::size_t>(x)];
    for (std::size_t i = 0; i < rows.size(); ++i) {
      wx[i] = -dual_matrix_of_group(sol.y, rows[i], d);
    }
  }

  // Dual feasibility of the extracted certificate: every selection sum PSD.
  double worst = 0.0;
  std::vector<Eigen::Index> f(static_cast<std::size_t>(g), 0);
  for (Eigen::Index idx = 0; idx < enc.njoint; ++idx) {
    Eigen::Index rem = idx;
    cmatrix_t sum = cmatrix_t::Zero(d, d);
    for (std::size_t x = 0; x < static_cast<std::size_t>(g); ++x) {
      f[x] = rem / enc.strides[x] % counts[x];
      sum += wstar[x][static_cast<std::size_t>(f[x])];
      rem %= enc.strides[x];
    }
    worst = std::min(worst, lambda_min(0.5 * (sum + sum.adjoint().eval())));
  }
  if (worst < -1e-6) {
    throw SolverFailure("witness dual certificate failed the PSD check");
  }

  const double scale = 1.0 / (static_cast<double>(g) * static_cast<double>(d));
  double pairing = 0.0;
  for (int x = 0; x < g; ++x) {
    for (Eigen::Index i = 0; i < counts[static_cast<std::size_t>(x)]; ++i) {
      const cmatrix_t w =
          scale * cmatrix_t::Identity(d, d) -
          wstar[static_cast<std::size_t>(x)][static_cast<std::size_t>(i)];
      pairing += (w * set.povms[static_cast<std::size_t>(x)]
                          .effects[static_cast<std::size_t>(i)]
                          .mat())
                     .trace()
                     .real();
      cert.witness.emplace_back(w, 1e-8);
    }
  }
  cert.state = HermitianOperator(
      cmatrix_t::Identity(d, d) / static_cast<double>(d));
  cert.pairing = pairing;
  (void)s_star;
  return cert;
}

bool verify_witness_dichotomic(const std::vector<HermitianOperator>& w,
                               const HermitianOperator& rho) {
  const int g = static_cast<int>(w.size());
  if (g > 24) throw GTooLarge("witness verification capped at g = 24");
  const Eigen::Index d = rho.dim();
  for (const auto& wx : w) {
    if (wx.dim() != d) throw DimensionMismatch("witness blocks must match the state");
  }
  const unsigned npat = 1u << g;
  for (unsigned e = 0; e < npat; ++e) {
    cmatrix_t m = rho.mat();
    for (int x = 0; x < g; ++x) {
      m -= sign_bit(e, x) * w[static_cast<std::size_t>(x)].mat();
    }
    if (lambda_min(m) < -1e-8) return false;
  }
  return true;
}

MeasurementSet measurement_set_of(const std::vector<DichotomicObservable>& a) {
  std::vector<Povm> povms;
  povms.reserve(a.size());
  for (const auto& obs : a) povms.push_back(povm_of(obs));
  return make_measurement_set(std::move(povms));
}

}  // namespace incompat
