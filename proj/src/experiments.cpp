#include "incompat/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <sstream>
#include <thread>

#include "incompat/angles.hpp"
#include "incompat/compat.hpp"
#include "incompat/criteria.hpp"
#include "incompat/rng.hpp"
#include "incompat/sampling.hpp"
#include "incompat/spectra.hpp"

namespace incompat {

namespace {

using nlohmann::json;

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

int resolve_workers(int configured) {
  if (configured > 0) return configured;
  if (const char* env = std::getenv("INCOMPAT_WORKERS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(std::min(hw, 8u));
}

// Jobs fill preallocated slots, so the assembled report does not depend on
// scheduling order or worker count.
void run_jobs(int njobs, int workers,
              const std::function<void(int)>& job) {
  workers = std::min(workers, njobs);
  if (workers <= 1) {
    for (int i = 0; i < njobs; ++i) job(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&]() {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= njobs) return;
        job(i);
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::uint64_t stream_for(int group, int trial) {
  return static_cast<std::uint64_t>(group) * 1000003ULL +
         static_cast<std::uint64_t>(trial) + 1ULL;
}

struct Slot {
  std::vector<std::vector<double>> rows;
  std::string error;
};

int column_index(const ExperimentReport& r, const std::string& name) {
  for (std::size_t i = 0; i < r.columns.size(); ++i) {
    if (r.columns[i] == name) return static_cast<int>(i);
  }
  throw Error("no column named " + name);
}

// Mean of a column over rows passing the filter; count returned alongside.
std::pair<double, int> column_mean(
    const ExperimentReport& r, int col,
    const std::function<bool(const std::vector<double>&)>& filter) {
  double sum = 0.0;
  int count = 0;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (!r.row_errors[i].empty()) continue;
    if (!filter(r.rows[i])) continue;
    sum += r.rows[i][static_cast<std::size_t>(col)];
    ++count;
  }
  return {count ? sum / count : kNan, count};
}

json aggregate_by_group(const ExperimentReport& r, const std::string& group_col) {
  const int gcol = column_index(r, group_col);
  json out = json::object();
  std::map<double, std::vector<const std::vector<double>*>> groups;
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (!r.row_errors[i].empty()) continue;
    groups[r.rows[i][static_cast<std::size_t>(gcol)]].push_back(&r.rows[i]);
  }
  for (const auto& [key, rows] : groups) {
    json stats = json::object();
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
      double sum = 0.0, sq = 0.0;
      double lo = std::numeric_limits<double>::infinity();
      double hi = -lo;
      int n = 0;
      for (const auto* row : rows) {
        const double v = (*row)[c];
        if (std::isnan(v)) continue;
        sum += v;
        sq += v * v;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
        ++n;
      }
      if (n == 0) continue;
      const double mean = sum / n;
      const double var = std::max(0.0, sq / n - mean * mean);
      stats[r.columns[c]] = {{"mean", mean},
                             {"std", std::sqrt(var)},
                             {"min", lo},
                             {"max", hi},
                             {"count", n}};
    }
    std::ostringstream key_str;
    key_str << key;
    out[key_str.str()] = std::move(stats);
  }
  return out;
}

void collect_slots(ExperimentReport& report, std::vector<Slot>& slots) {
  for (auto& slot : slots) {
    for (auto& row : slot.rows) {
      report.rows.push_back(std::move(row));
      report.row_errors.push_back(slot.error);
    }
    if (!slot.error.empty()) ++report.excluded_trials;
  }
}

void require(bool ok, ExperimentReport& report, const std::string& what) {
  if (!ok) report.failures.push_back(what);
}

double target_number(const json& targets, const std::string& key,
                     double fallback) {
  if (targets.contains(key)) return targets.at(key).get<double>();
  return fallback;
}

// ---------------------------------------------------------------------------
// two_proj_disc / two_proj_unbalanced

void run_two_proj(const ExperimentConfig& cfg, ExperimentReport& report,
                  bool disc_mode) {
  const double alpha = cfg.alphas.empty() ? 0.5 : cfg.alphas[0];
  const double beta = cfg.alphas.size() > 1 ? cfg.alphas[1] : alpha;
  const double target_angle =
      disc_mode ? std::numbers::pi / 4.0
                : std::acos(std::sqrt(4.0 * alpha * (1.0 - alpha)));
  const auto& targets = cfg.targets;
  std::vector<Eigen::Index> bracket_dims;
  if (targets.contains("bracket_dims")) {
    bracket_dims = targets.at("bracket_dims").get<std::vector<Eigen::Index>>();
  }

  report.columns = {"trial", "d", "rank_e", "rank_f", "jordan_lower",
                    "compression_upper", "sdp_tau", "solver_error"};
  const int ndims = static_cast<int>(cfg.dims.size());
  std::vector<Slot> slots(static_cast<std::size_t>(ndims * cfg.trials));

  run_jobs(ndims * cfg.trials, resolve_workers(cfg.workers), [&](int jobI) {
    const int gi = jobI / cfg.trials;
    const int trial = jobI % cfg.trials;
    const Eigen::Index d = cfg.dims[static_cast<std::size_t>(gi)];
    Slot& slot = slots[static_cast<std::size_t>(jobI)];
    try {
      SeededRng rng(cfg.seed, stream_for(gi, trial));
      const Eigen::Index re = static_cast<Eigen::Index>(alpha * d);
      const Eigen::Index rf = static_cast<Eigen::Index>(beta * d);
      const HermitianOperator p = random_projection(d, re, rng);
      const HermitianOperator q = random_projection(d, rf, rng);
      const double jordan = jordan_tau_lower(p, q, 1e-5).value;
      const cmatrix_t id = cmatrix_t::Identity(d, d);
      const DichotomicObservable a = make_observable(2.0 * p.mat() - id);
      const DichotomicObservable b = make_observable(2.0 * q.mat() - id);
      const double upper = compression_upper_bound(a, b, target_angle).value;
      double sdp_tau = kNan;
      if (std::find(bracket_dims.begin(), bracket_dims.end(), d) !=
          bracket_dims.end()) {
        sdp_tau = tau_dichotomic({a, b}).lower;
      }
      slot.rows.push_back({static_cast<double>(trial), static_cast<double>(d),
                           static_cast<double>(re), static_cast<double>(rf),
                           jordan, upper, sdp_tau, 0.0});
    } catch (const std::exception& e) {
      slot.error = e.what();
      slot.rows.push_back({static_cast<double>(trial), static_cast<double>(d),
                           kNan, kNan, kNan, kNan, kNan, 1.0});
    }
  });
  collect_slots(report, slots);

  const int cj = column_index(report, "jordan_lower");
  const int cu = column_index(report, "compression_upper");
  const int cs = column_index(report, "sdp_tau");
  const int cd = column_index(report, "d");
  const double slack = target_number(targets, "bracket_slack", 1e-6);

  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (!report.row_errors[i].empty()) continue;
    const auto& row = report.rows[i];
    require(row[static_cast<std::size_t>(cj)] <=
                row[static_cast<std::size_t>(cu)] + 1e-9,
            report, "jordan lower exceeded compression upper");
    if (!std::isnan(row[static_cast<std::size_t>(cs)])) {
      const double tau = row[static_cast<std::size_t>(cs)];
      require(tau >= row[static_cast<std::size_t>(cj)] - slack &&
                  tau <= row[static_cast<std::size_t>(cu)] + slack,
              report, "sdp tau escaped the [jordan, compression] bracket");
    }
  }

  if (disc_mode) {
    if (targets.contains("width_checks")) {
      for (const auto& check : targets.at("width_checks")) {
        const double d = check.at("d").get<double>();
        const double center = check.at("center").get<double>();
        const double width = check.at("width").get<double>();
        for (std::size_t i = 0; i < report.rows.size(); ++i) {
          if (!report.row_errors[i].empty()) continue;
          const auto& row = report.rows[i];
          if (row[static_cast<std::size_t>(cd)] != d) continue;
          require(std::abs(row[static_cast<std::size_t>(cj)] - center) <= width,
                  report, "jordan lower left the target window");
          require(std::abs(row[static_cast<std::size_t>(cu)] - center) <= width,
                  report, "compression upper left the target window");
        }
      }
    }
  } else {
    const double center = targets.at("center").get<double>();
    const double width = targets.at("width").get<double>();
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      if (!report.row_errors[i].empty()) continue;
      const auto& row = report.rows[i];
      require(std::abs(row[static_cast<std::size_t>(cj)] - center) <= width,
              report, "jordan lower left the target window");
      require(std::abs(row[static_cast<std::size_t>(cu)] - center) <= width,
              report, "compression upper left the target window");
    }
  }
  report.aggregates = aggregate_by_group(report, "d");
}

// ---------------------------------------------------------------------------
// many_proj_witness

void run_many_proj_witness(const ExperimentConfig& cfg,
                           ExperimentReport& report) {
  const Eigen::Index d = cfg.dims.at(0);
  const int g = cfg.g;
  const double gd = static_cast<double>(g);
  const auto& targets = cfg.targets;
  const double t_full =
      target_number(targets, "t_full_scale", 31.0) / std::sqrt(gd);
  const double t_opt = target_number(targets, "t_opt_factor", 1.1) * 2.0 *
                       std::sqrt(gd - 1.0) / gd;
  const double s_pad = target_number(targets, "s_pad", 1e-6);

  report.columns = {"trial",   "d",           "lmax",
                    "support_ratio", "below_thm_bound", "threshold",
                    "witness", "cert_t_full", "cert_t_opt",
                    "solver_error"};
  std::vector<Slot> slots(static_cast<std::size_t>(cfg.trials));
  run_jobs(cfg.trials, resolve_workers(cfg.workers), [&](int trial) {
    Slot& slot = slots[static_cast<std::size_t>(trial)];
    try {
      SeededRng rng(cfg.seed, stream_for(0, trial));
      std::vector<DichotomicObservable> a;
      a.reserve(static_cast<std::size_t>(g));
      for (int x = 0; x < g; ++x) {
        a.push_back(random_projective_observable(d, d / 2, rng));
      }
      double lmax = 0.0;
      for (unsigned e = 0; e < (1u << (g - 1)); ++e) {
        cmatrix_t sum = cmatrix_t::Zero(d, d);
        for (int x = 0; x < g; ++x) {
          sum += (((e >> x) & 1u) ? -1.0 : 1.0) *
                 a[static_cast<std::size_t>(x)].a.mat();
        }
        const rvector_t ev = hermitian_eigenvalues(sum);
        lmax = std::max({lmax, ev(ev.size() - 1), -ev(0)});
      }
      // Empirical analogue of the optimal scale 1/(2 sqrt(g-1)): half the
      // inverse of the observed bound on the signed-sum spectrum.
      const double s = 1.0 / (lmax + s_pad);
      const auto res = colinear_projection_witness(a, s);
      const double witness = res.is_witness ? 1.0 : 0.0;
      const double cert_full =
          (res.is_witness && res.certified_t_threshold < t_full) ? 1.0 : 0.0;
      const double cert_opt =
          (res.is_witness && res.certified_t_threshold < t_opt) ? 1.0 : 0.0;
      const double thm_bound =
          target_number(targets, "t_full_scale", 31.0) * std::sqrt(gd);
      slot.rows.push_back({static_cast<double>(trial), static_cast<double>(d),
                           lmax, lmax / (2.0 * std::sqrt(gd - 1.0)),
                           lmax <= thm_bound ? 1.0 : 0.0,
                           res.certified_t_threshold, witness, cert_full,
                           cert_opt, 0.0});
    } catch (const std::exception& e) {
      slot.error = e.what();
      slot.rows.push_back({static_cast<double>(trial), static_cast<double>(d),
                           kNan, kNan, kNan, kNan, kNan, kNan, kNan, 1.0});
    }
  });
  collect_slots(report, slots);

  auto all = [](const std::vector<double>&) { return true; };
  const auto [full_rate, n1] =
      column_mean(report, column_index(report, "cert_t_full"), all);
  const auto [opt_rate, n2] =
      column_mean(report, column_index(report, "cert_t_opt"), all);
  (void)n2;
  require(n1 > 0 && full_rate >= target_number(targets, "rate_full", 1.0),
          report, "certification rate at t = scale/sqrt(g) below target");
  require(opt_rate >= target_number(targets, "rate_opt", 0.9), report,
          "certification rate near the optimal threshold below target");
  report.aggregates = aggregate_by_group(report, "d");

  // Certified-threshold histogram (10 bins over the observed range).
  const int ct = column_index(report, "threshold");
  std::vector<double> thresholds;
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (report.row_errors[i].empty()) {
      thresholds.push_back(report.rows[i][static_cast<std::size_t>(ct)]);
    }
  }
  if (!thresholds.empty()) {
    const auto [lo_it, hi_it] =
        std::minmax_element(thresholds.begin(), thresholds.end());
    const double lo = *lo_it;
    const double span = std::max(*hi_it - lo, 1e-12);
    std::vector<int> bins(10, 0);
    for (double t : thresholds) {
      const int b = std::min(9, static_cast<int>((t - lo) / span * 10.0));
      ++bins[static_cast<std::size_t>(b)];
    }
    report.aggregates["threshold_histogram"] = {
        {"lo", lo}, {"hi", *hi_it}, {"counts", bins}};
  }
}

// ---------------------------------------------------------------------------
// two_bases

void run_two_bases(const ExperimentConfig& cfg, ExperimentReport& report) {
  const auto& targets = cfg.targets;
  const double log_factor = target_number(targets, "log_factor", 3.0);
  const double k_lo = target_number(targets, "k_lo", 1.2);
  const double k_hi = target_number(targets, "k_hi", 2.1);

  report.columns = {"trial", "d",      "max_entry", "eta",  "threshold",
                    "bound", "k_stat", "thr_ok",    "k_ok", "solver_error"};
  const int ndims = static_cast<int>(cfg.dims.size());
  std::vector<Slot> slots(static_cast<std::size_t>(ndims * cfg.trials));
  run_jobs(ndims * cfg.trials, resolve_workers(cfg.workers), [&](int jobI) {
    const int gi = jobI / cfg.trials;
    const int trial = jobI % cfg.trials;
    const Eigen::Index d = cfg.dims[static_cast<std::size_t>(gi)];
    Slot& slot = slots[static_cast<std::size_t>(jobI)];
    try {
      SeededRng rng(cfg.seed, stream_for(gi, trial));
      const cmatrix_t u = haar_unitary(d, rng);
      const double max_entry = u.cwiseAbs().maxCoeff();
      const double eta_value = 1.0 + max_entry;
      const double threshold = eta_incompatibility_threshold(eta_value, d, 2);
      const double dd = static_cast<double>(d);
      const double bound =
          0.5 * (1.0 + std::sqrt(log_factor * std::log(dd) / dd));
      const double k_stat = std::sqrt(dd / std::log(dd)) * max_entry;
      slot.rows.push_back({static_cast<double>(trial), dd, max_entry,
                           eta_value, threshold, bound,
                           k_stat, threshold <= bound ? 1.0 : 0.0,
                           (k_stat >= k_lo && k_stat <= k_hi) ? 1.0 : 0.0,
                           0.0});
    } catch (const std::exception& e) {
      slot.error = e.what();
      slot.rows.push_back({static_cast<double>(trial), static_cast<double>(d),
                           kNan, kNan, kNan, kNan, kNan, kNan, kNan, 1.0});
    }
  });
  collect_slots(report, slots);

  const int cd = column_index(report, "d");
  for (Eigen::Index d : cfg.dims) {
    auto in_dim = [&, d](const std::vector<double>& row) {
      return row[static_cast<std::size_t>(cd)] == static_cast<double>(d);
    };
    const auto [thr_rate, n] =
        column_mean(report, column_index(report, "thr_ok"), in_dim);
    const auto [k_rate, n2] =
        column_mean(report, column_index(report, "k_ok"), in_dim);
    (void)n2;
    require(n > 0 && thr_rate >= target_number(targets, "threshold_rate", 0.95),
            report, "certified threshold beat the log-law bound too rarely");
    require(k_rate >= target_number(targets, "k_rate", 0.95), report,
            "scaled max enry left the expected bracket too often");
  }
  report.aggregates = aggregate_by_group(report, "d");
}

// ---------------------------------------------------------------------------
// many_bases

void run_many_bases(const ExperimentConfig& cfg, ExperimentReport& report) {
  const auto& targets = cfg.targets;
  const int g = cfg.g;
  const double bound_s = target_number(targets, "bound_s", 8.0);
  const double t_log_factor = target_number(targets, "t_log_factor", 135.0);

  report.columns = {"trial",     "d",        "g",
                    "eta_value", "exact",    "within_bound",
                    "threshold", "t_marker", "cert_at_marker",
                    "solver_error"};
  const int ndims = static_cast<int>(cfg.dims.size());
  std::vector<Slot> slots(static_cast<std::size_t>(ndims * cfg.trials));
  run_jobs(ndims * cfg.trials, resolve_workers(cfg.workers), [&](int jobI) {
    const int gi = jobI / cfg.trials;
    const int trial = jobI % cfg.trials;
    const Eigen::Index d = cfg.dims[static_cast<std::size_t>(gi)];
    Slot& slot = slots[static_cast<std::size_t>(jobI)];
    try {
      SeededRng rng(cfg.seed, stream_for(gi, trial));
      std::vector<cmatrix_t> us;
      us.reserve(static_cast<std::size_t>(g));
      for (int x = 0; x < g; ++x) us.push_back(haar_unitary(d, rng));
      const double dd = static_cast<double>(d);
      bool exact = std::pow(dd, g) <= 1e6;
      const double eta_value =
          exact ? eta(us)
                : eta_lower_sampled(us, std::max(1, cfg.samples), rng);
      const double bound =
          static_cast<double>(g) / dd * (7.0 + 16.0 * bound_s * std::log(dd));
      const double threshold = eta_incompatibility_threshold(
          std::min(eta_value, static_cast<double>(g)), d, g);
      const double t_marker = t_log_factor * std::log(dd) / dd;
      slot.rows.push_back(
          {static_cast<double>(trial), dd, static_cast<double>(g), eta_value,
           exact ? 1.0 : 0.0, eta_value <= bound ? 1.0 : 0.0, threshold,
           t_marker, threshold < t_marker ? 1.0 : 0.0, 0.0});
    } catch (const std::exception& e) {
      slot.error = e.what();
      slot.rows.push_back({static_cast<double>(trial), static_cast<double>(d),
                           static_cast<double>(g), kNan, kNan, kNan, kNan,
                           kNan, kNan, 1.0});
    }
  });
  collect_slots(report, slots);

  auto all = [](const std::vector<double>&) { return true; };
  const auto [rate, n] =
      column_mean(report, column_index(report, "within_bound"), all);
  require(n > 0 && rate >= target_number(targets, "eta_bound_rate", 1.0),
          report, "eta exceeded the deviation bound");
  report.aggregates = aggregate_by_group(report, "d");
}

// ---------------------------------------------------------------------------
// induced_povm

void run_induced(const ExperimentConfig& cfg, ExperimentReport& report) {
  const Eigen::Index d = cfg.dims.at(0);
  const int k = cfg.k;
  const auto& targets = cfg.targets;
  if (cfg.c_grid.empty()) throw ConfigInvalid("induced_povm needs a c_grid");

  struct CPoint {
    double c_eff;
    Eigen::Index n;
    InducedThresholds th;
    LawCdfCache cache;
  };
  std::vector<CPoint> points;
  for (double c : cfg.c_grid) {
    const Eigen::Index n = std::max<Eigen::Index>(
        (d + static_cast<Eigen::Index>(k) - 1) / k,
        static_cast<Eigen::Index>(std::llround(static_cast<double>(d) /
                                               (k * c))));
    const double c_eff = static_cast<double>(d) / (k * static_cast<double>(n));
    points.push_back({c_eff, n, induced_thresholds(k, std::max(2, cfg.g)),
                      LawCdfCache(nu_kc(k, c_eff))});
  }

  report.columns = {"trial",    "c",         "n",         "eig_min",
                    "eig_max",  "mean_eig",  "mean_eig_first", "ks",
                    "jordan_ok", "noise_ok", "witness_pred", "jordan_pred",
                    "noise_pred", "solver_error"};
  const int npoints = static_cast<int>(points.size());
  std::vector<Slot> slots(static_cast<std::size_t>(npoints * cfg.trials));
  run_jobs(npoints * cfg.trials, resolve_workers(cfg.workers), [&](int jobI) {
    const int ci = jobI / cfg.trials;
    const int trial = jobI % cfg.trials;
    const CPoint& pt = points[static_cast<std::size_t>(ci)];
    Slot& slot = slots[static_cast<std::size_t>(jobI)];
    try {
      SeededRng rng(cfg.seed, stream_for(ci, trial));
      const Povm m = random_induced_povm(d, k, pt.n, rng);
      const Povm n2 = random_induced_povm(d, k, pt.n, rng);

      std::vector<double> eigs;
      double first_mean = 0.0;
      for (Eigen::Index i = 0; i < m.outcomes(); ++i) {
        const rvector_t ev = m.effects[static_cast<std::size_t>(i)].eigenvalues();
        if (i == 0) first_mean = ev.mean();
        eigs.insert(eigs.end(), ev.data(), ev.data() + ev.size());
      }
      std::sort(eigs.begin(), eigs.end());
      EmpiricalSpectrum emp;
      emp.dim = static_cast<Eigen::Index>(eigs.size());
      emp.eigenvalues = eigs;
      const double ks = ks_distance(emp, pt.cache);

      const bool jordan_ok = jordan_compatible(m, n2);
      const bool noise_ok =
          noise_content_compatible(make_measurement_set({m, n2}));
      slot.rows.push_back(
          {static_cast<double>(trial), pt.c_eff, static_cast<double>(pt.n),
           eigs.front(), eigs.back(),
           std::accumulate(eigs.begin(), eigs.end(), 0.0) / eigs.size(),
           first_mean, ks, jordan_ok ? 1.0 : 0.0, noise_ok ? 1.0 : 0.0,
           pt.c_eff > pt.th.witness_c ? 1.0 : 0.0,
           pt.c_eff < pt.th.jordan_c_g2 ? 1.0 : 0.0,
           pt.c_eff < pt.th.noise_c_g2 ? 1.0 : 0.0, 0.0});
    } catch (const std::exception& e) {
      slot.error = e.what();
      slot.rows.push_back({static_cast<double>(trial), pt.c_eff,
                           static_cast<double>(pt.n), kNan, kNan, kNan, kNan,
                           kNan, kNan, kNan, kNan, kNan, kNan, 1.0});
    }
  });
  collect_slots(report, slots);

  if (targets.contains("check_c")) {
    const double check_c = targets.at("check_c").get<double>();
    const double margin = target_number(targets, "eig_margin", 0.05);
    const double mean_tol = target_number(targets, "mean_tol", 0.01);
    // Locate the grid point realizing check_c.
    int best = 0;
    for (int i = 1; i < npoints; ++i) {
      if (std::abs(points[static_cast<std::size_t>(i)].c_eff - check_c) <
          std::abs(points[static_cast<std::size_t>(best)].c_eff - check_c)) {
        best = i;
      }
    }
    const CPoint& pt = points[static_cast<std::size_t>(best)];
    const auto [lo, hi] = phi_pm(pt.c_eff, 1.0 / k);
    const int cc = column_index(report, "c");
    const int cmin = column_index(report, "eig_min");
    const int cmax = column_index(report, "eig_max");
    const int cmean = column_index(report, "mean_eig");
    double mean_sum = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
      if (!report.row_errors[i].empty()) continue;
      const auto& row = report.rows[i];
      if (row[static_cast<std::size_t>(cc)] != pt.c_eff) continue;
      require(row[static_cast<std::size_t>(cmin)] >= lo - margin, report,
              "effect eigenvalue fell below phi- - margin");
      require(row[static_cast<std::size_t>(cmax)] <= hi + margin, report,
              "effect eigenvalue rose above phi+ + margin");
      mean_sum += row[static_cast<std::size_t>(cmean)];
      ++count;
    }
    require(count > 0 && std::abs(mean_sum / count - 1.0 / k) <= mean_tol,
            report, "pooled mean eigenvalue drifted from 1/k");
  }
  report.aggregates = aggregate_by_group(report, "c");
}

// ---------------------------------------------------------------------------
// moments

void run_moments(const ExperimentConfig& cfg, ExperimentReport& report) {
  const auto& targets = cfg.targets;
  const double nsigma = target_number(targets, "nsigma", 3.0);
  const int samples = cfg.samples > 0 ? cfg.samples : 100000;
  std::vector<int> p_grid = cfg.p_grid;
  if (p_grid.empty()) p_grid = {1, 2, 3, 4, 5, 6};

  report.columns = {"trial", "d",      "p",  "estimate", "exact",
                    "stderr", "within", "solver_error"};
  const int ndims = static_cast<int>(cfg.dims.size());
  std::vector<Slot> slots(static_cast<std::size_t>(ndims));
  run_jobs(ndims, resolve_workers(cfg.workers), [&](int gi) {
    const Eigen::Index d = cfg.dims[static_cast<std::size_t>(gi)];
    Slot& slot = slots[static_cast<std::size_t>(gi)];
    try {
      SeededRng rng(cfg.seed, stream_for(gi, 0));
      std::vector<double> sum_p(p_grid.size(), 0.0);
      std::vector<double> sum_2p(p_grid.size(), 0.0);
      for (int i = 0; i < samples; ++i) {
        cvector_t psi(d);
        for (Eigen::Index j = 0; j < d; ++j) {
          psi(j) = complex_t(rng.normal(), rng.normal());
        }
        psi.normalize();
        double x = 0.0;
        for (Eigen::Index j = 0; j < d; ++j) {
          x += (j < d / 2 ? 1.0 : -1.0) * std::norm(psi(j));
        }
        for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
          const double xp = std::pow(x, p_grid[pi]);
          sum_p[pi] += xp;
          sum_2p[pi] += xp * xp;
        }
      }
      for (std::size_t pi = 0; pi < p_grid.size(); ++pi) {
        const double est = sum_p[pi] / samples;
        const double second = sum_2p[pi] / samples;
        const double se = std::sqrt(std::max(0.0, second - est * est) / samples);
        const double exact = haar_projection_moment(d, p_grid[pi]);
        const double ok = std::abs(est - exact) <= nsigma * se ? 1.0 : 0.0;
        slot.rows.push_back({0.0, static_cast<double>(d),
                             static_cast<double>(p_grid[pi]), est, exact, se,
                             ok, 0.0});
      }
    } catch (const std::exception& e) {
      slot.error = e.what();
      slot.rows.push_back({0.0, static_cast<double>(d), kNan, kNan, kNan,
                           kNan, kNan, 1.0});
    }
  });
  collect_slots(report, slots);

  auto all = [](const std::vector<double>&) { return true; };
  const auto [rate, n] =
      column_mean(report, column_index(report, "within"), all);
  require(n > 0 && rate >= 1.0, report,
          "a Monte-Carlo moment left its standard-error window");
  report.aggregates = aggregate_by_group(report, "d");
}

// ---------------------------------------------------------------------------
// kesten_mckay

void run_kesten_mckay(const ExperimentConfig& cfg, ExperimentReport& report) {
  const auto& targets = cfg.targets;
  const int g = cfg.g;
  const double ks_max = target_number(targets, "ks_max", 0.05);
  const double center =
      target_number(targets, "lmax_center", 2.0 * std::sqrt(g - 1.0));
  const double width = target_number(targets, "lmax_width", 0.2);

  const LawCdfCache cache{kesten_mckay(g)};
  report.columns = {"trial", "d", "g", "pattern", "ks", "lmax", "solver_error"};
  const int ndims = static_cast<int>(cfg.dims.size());
  std::vector<Slot> slots(static_cast<std::size_t>(ndims * cfg.trials));
  run_jobs(ndims * cfg.trials, resolve_workers(cfg.workers), [&](int jobI) {
    const int gi = jobI / cfg.trials;
    const int trial = jobI % cfg.trials;
    const Eigen::Index d = cfg.dims[static_cast<std::size_t>(gi)];
    Slot& slot = slots[static_cast<std::size_t>(jobI)];
    try {
      SeededRng rng(cfg.seed, stream_for(gi, trial));
      unsigned pattern = 0;
      cmatrix_t sum = cmatrix_t::Zero(d, d);
      for (int x = 0; x < g; ++x) {
        const bool flip = rng.bits() & 1u;
        if (flip) pattern |= 1u << x;
        const HermitianOperator p = random_projection(d, d / 2, rng);
        sum += (flip ? -1.0 : 1.0) *
               (2.0 * p.mat() - cmatrix_t::Identity(d, d));
      }
      const EmpiricalSpectrum emp = empirical_spectrum(HermitianOperator(sum));
      const double ks = ks_distance(emp, cache);
      slot.rows.push_back({static_cast<double>(trial), static_cast<double>(d),
                           static_cast<double>(g),
                           static_cast<double>(pattern), ks,
                           emp.eigenvalues.back(), 0.0});
    } catch (const std::exception& e) {
      slot.error = e.what();
      slot.rows.push_back({static_cast<double>(trial), static_cast<double>(d),
                           static_cast<double>(g), kNan, kNan, kNan, 1.0});
    }
  });
  collect_slots(report, slots);

  const int cks = column_index(report, "ks");
  const int clm = column_index(report, "lmax");
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    if (!report.row_errors[i].empty()) continue;
    require(report.rows[i][static_cast<std::size_t>(cks)] <= ks_max, report,
            "KS distance to the limit law exceeded the target");
    require(std::abs(report.rows[i][static_cast<std::size_t>(clm)] - center) <=
                width,
            report, "top eigenvalue left the support window");
  }
  report.aggregates = aggregate_by_group(report, "d");
}

using ExperimentFn =
    std::function<void(const ExperimentConfig&, ExperimentReport&)>;

const std::map<std::string, ExperimentFn>& registry() {
  static const std::map<std::string, ExperimentFn> map = {
      {"two_proj_disc",
       [](const ExperimentConfig& c, ExperimentReport& r) {
         run_two_proj(c, r, true);
       }},
      {"two_proj_unbalanced",
       [](const ExperimentConfig& c, ExperimentReport& r) {
         run_two_proj(c, r, false);
       }},
      {"many_proj_witness", run_many_proj_witness},
      {"two_bases", run_two_bases},
      {"many_bases", run_many_bases},
      {"induced_povm", run_induced},
      {"moments", run_moments},
      {"kesten_mckay", run_kesten_mckay},
  };
  return map;
}

json config_to_json(const ExperimentConfig& c) {
  return json{{"experiment", c.experiment},
              {"dims", c.dims},
              {"g", c.g},
              {"k", c.k},
              {"alphas", c.alphas},
              {"t_grid", c.t_grid},
              {"c_grid", c.c_grid},
              {"p_grid", c.p_grid},
              {"trials", c.trials},
              {"samples", c.samples},
              {"seed", c.seed},
              {"output_path", c.output_path},
              {"workers", c.workers},
              {"targets", c.targets}};
}

}  // namespace

ExperimentConfig experiment_config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.experiment = j.at("experiment").get<std::string>();
    if (j.contains("dims")) c.dims = j.at("dims").get<std::vector<Eigen::Index>>();
    if (j.contains("g")) c.g = j.at("g").get<int>();
    if (j.contains("k")) c.k = j.at("k").get<int>();
    if (j.contains("alphas")) c.alphas = j.at("alphas").get<std::vector<double>>();
    if (j.contains("t_grid")) c.t_grid = j.at("t_grid").get<std::vector<double>>();
    if (j.contains("c_grid")) c.c_grid = j.at("c_grid").get<std::vector<double>>();
    if (j.contains("p_grid")) c.p_grid = j.at("p_grid").get<std::vector<int>>();
    if (j.contains("trials")) c.trials = j.at("trials").get<int>();
    if (j.contains("samples")) c.samples = j.at("samples").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("output_path")) {
      c.output_path = j.at("output_path").get<std::string>();
    }
    if (j.contains("workers")) c.workers = j.at("workers").get<int>();
    if (j.contains("targets")) c.targets = j.at("targets");
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("bad experiment config: ") + e.what());
  }
  if (registry().find(c.experiment) == registry().end()) {
    throw ConfigInvalid("unknown experiment: " + c.experiment);
  }
  if (c.trials < 1) throw ConfigInvalid("trials must be >= 1");
  if (c.dims.empty()) throw ConfigInvalid("dims must be nonempty");
  for (Eigen::Index d : c.dims) {
    if (d < 1) throw ConfigInvalid("dims must be positive");
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigInvalid(std::string("config is not valid JSON: ") + e.what());
  }
  return experiment_config_from_json(j);
}

std::string ExperimentReport::csv() const {
  std::ostringstream out;
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (c) out << ',';
    out << columns[c];
  }
  out << '\n';
  char buf[64];
  for (const auto& row : rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      std::snprintf(buf, sizeof(buf), "%.17g", row[c]);
      out << buf;
    }
    out << '\n';
  }
  return out.str();
}

json ExperimentReport::to_json() const {
  return json{{"experiment", experiment},
              {"config", config_echo},
              {"columns", columns},
              {"rows", rows},
              {"row_errors", row_errors},
              {"aggregates", aggregates},
              {"passed", passed},
              {"failures", failures},
              {"excluded_trials", excluded_trials},
              {"wall_clock_s", wall_clock_s}};
}

std::vector<std::string> registered_experiments() {
  std::vector<std::string> names;
  for (const auto& [name, fn] : registry()) names.push_back(name);
  return names;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
  const auto it = registry().find(config.experiment);
  if (it == registry().end()) {
    throw ConfigInvalid("unknown experiment: " + config.experiment);
  }
  ExperimentReport report;
  report.experiment = config.experiment;
  report.config_echo = config_to_json(config);

  const auto start = std::chrono::steady_clock::now();
  it->second(config, report);
  report.passed = report.failures.empty();
  report.wall_clock_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  if (!config.output_path.empty()) {
    std::ofstream csv_out(config.output_path + ".csv");
    csv_out << report.csv();
    std::ofstream json_out(config.output_path + ".json");
    json_out << report.to_json().dump(2) << '\n';
  }
  return report;
}

}  // namespace incompat
