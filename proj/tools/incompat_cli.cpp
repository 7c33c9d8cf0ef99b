// Command-line front end: sampling, compatibility degrees, witnesses,
// criteria tables, spectral laws, and the Monte-Carlo experiment runner.
#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <numbers>
#include <optional>

#include "incompat/angles.hpp"
#include "incompat/compat.hpp"
#include "incompat/criteria.hpp"
#include "incompat/experiments.hpp"
#include "incompat/json_io.hpp"
#include "incompat/sampling.hpp"
#include "incompat/spectra.hpp"

using namespace incompat;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitSolver = 2;
constexpr int kExitTargetFailed = 3;

struct GlobalArgs {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::string output;
  std::string format = "json";
};

void emit(const GlobalArgs& args, const json& payload,
          const std::string& csv_payload = "") {
  const bool csv = args.format == "csv" && !csv_payload.empty();
  const std::string text = csv ? csv_payload : payload.dump(2) + "\n";
  if (args.output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(args.output);
    out << text;
  }
}

MeasurementSet load_set(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigInvalid("cannot open input file: " + path);
  json j;
  in >> j;
  return measurement_set_from_json(j);
}

json bracket_json(const TauBracket& b) {
  return json{{"lower", b.lower},
              {"upper", b.upper},
              {"lower_source", b.lower_source},
              {"upper_source", b.upper_source}};
}

json certificate_json(const WitnessCertificate& cert) {
  json witness = json::array();
  for (const auto& w : cert.witness) witness.push_back(matrix_to_json(w.mat()));
  return json{{"pairing", cert.pairing},
              {"certifies_incompatibility", cert.certifies()},
              {"witness", std::move(witness)},
              {"state", matrix_to_json(cert.state.mat())}};
}

int cmd_sample(const GlobalArgs& g, const std::string& model, Eigen::Index d,
               Eigen::Index k, Eigen::Index n, Eigen::Index r, int count) {
  SeededRng rng(g.seed, g.stream);
  json out = json::array();
  for (int i = 0; i < count; ++i) {
    if (model == "basis") {
      out.push_back(povm_to_json(random_basis_measurement(d, rng)));
    } else if (model == "induced") {
      out.push_back(povm_to_json(random_induced_povm(d, k, n, rng)));
    } else if (model == "projection") {
      const HermitianOperator p = random_projection(d, r, rng);
      out.push_back(povm_to_json(povm_of(make_observable(
          2.0 * p.mat() - cmatrix_t::Identity(d, d)))));
    } else if (model == "subspace") {
      out.push_back(matrix_to_json(random_subspace(d, r, rng).basis));
    } else {
      std::cerr << "unknown model: " << model << "\n";
      return kExitUsage;
    }
  }
  emit(g, count == 1 ? out.at(0) : out);
  return kExitOk;
}

int cmd_tau(const GlobalArgs& g, const std::string& input, int pauli_g,
            double tol) {
  TauBracket bracket;
  if (pauli_g > 0) {
    bracket = tau_dichotomic(pauli_basis(pauli_g));
  } else {
    const MeasurementSet set = load_set(input);
    const auto counts = set.outcome_counts();
    const bool dichotomic = std::all_of(
        counts.begin(), counts.end(), [](Eigen::Index k) { return k == 2; });
    if (dichotomic) {
      std::vector<DichotomicObservable> obs;
      for (const auto& p : set.povms) obs.push_back(observable_of(p));
      bracket = tau_dichotomic(obs);
    } else {
      bracket = tau_general(set, tol);
    }
  }
  if (bracket.upper - bracket.lower <= 1e-9) {
    std::printf("%.5f\n", bracket.lower);
  } else {
    std::printf("%.5f %.5f\n", bracket.lower, bracket.upper);
  }
  if (!g.output.empty()) {
    std::ofstream out(g.output);
    out << json{{"bracket", bracket_json(bracket)}}.dump(2) << "\n";
  }
  return kExitOk;
}

int cmd_witness(const GlobalArgs& g, const std::string& input) {
  const WitnessCertificate cert = witness_search(load_set(input));
  emit(g, json{{"certificate", certificate_json(cert)}});
  return kExitOk;
}

int cmd_criteria(const GlobalArgs& g, const std::string& input) {
  const MeasurementSet set = load_set(input);
  const auto counts = set.outcome_counts();
  auto bounds = bound_library(set.dim, static_cast<int>(set.size()), counts);

  json rows = json::array();
  std::ostringstream csv;
  csv << "kind,value,source,applicability,tight\n";
  std::printf("%-6s %-10s %-22s %-42s %s\n", "kind", "value", "source",
              "applicability", "tight");
  for (const auto& b : bounds) {
    const char* kind =
        b.kind == BoundValue::Kind::LowerOnTau ? "lower" : "upper";
    std::printf("%-6s %-10.6f %-22s %-42s %s\n", kind, b.value,
                b.source.c_str(), b.applicability.c_str(),
                b.tight ? "yes" : "no");
    rows.push_back(json{{"kind", kind},
                        {"value", b.value},
                        {"source", b.source},
                        {"applicability", b.applicability},
                        {"tight", b.tight}});
    csv << kind << ',' << b.value << ',' << b.source << ",\""
        << b.applicability << "\"," << (b.tight ? 1 : 0) << '\n';
  }

  // One-sided tests that need the concrete effects.
  if (set.size() == 2) {
    const bool jordan = jordan_compatible(set.povms[0], set.povms[1]);
    std::printf("jordan product criterion: %s\n",
                jordan ? "compatible" : "inconclusive");
    rows.push_back(json{{"kind", "test"},
                        {"source", "jordan-product"},
                        {"verdict", jordan ? "compatible" : "inconclusive"}});
  }
  const bool noise = noise_content_compatible(set);
  std::printf("noise content criterion: %s\n",
              noise ? "compatible" : "inconclusive");
  rows.push_back(json{{"kind", "test"},
                      {"source", "noise-content"},
                      {"verdict", noise ? "compatible" : "inconclusive"}});

  if (!g.output.empty()) {
    std::ofstream out(g.output);
    out << (g.format == "csv" ? csv.str()
                              : json{{"bounds", rows}}.dump(2) + "\n");
  }
  return kExitOk;
}

int cmd_angles(const GlobalArgs& g, Eigen::Index d, double alpha, double beta,
               int bins, int trials) {
  SeededRng rng(g.seed, g.stream);
  std::vector<int> histogram(static_cast<std::size_t>(bins), 0);
  const double bin_width = (std::numbers::pi / 2.0) / bins;
  for (int trial = 0; trial < trials; ++trial) {
    const Subspace e =
        random_subspace(d, static_cast<Eigen::Index>(alpha * d), rng);
    const Subspace f =
        random_subspace(d, static_cast<Eigen::Index>(beta * d), rng);
    for (double theta : principal_angles(e, f).angles) {
      int b = std::min(bins - 1, static_cast<int>(theta / bin_width));
      ++histogram[static_cast<std::size_t>(b)];
    }
  }
  std::ostringstream csv;
  csv << "bin_lo,bin_hi,count\n";
  for (int b = 0; b < bins; ++b) {
    csv << b * bin_width << ',' << (b + 1) * bin_width << ','
        << histogram[static_cast<std::size_t>(b)] << '\n';
  }
  if (g.output.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(g.output);
    out << csv.str();
  }
  return kExitOk;
}

int cmd_spectra(const GlobalArgs& g, const std::string& law_name, int law_g,
                int k, double c, int grid) {
  std::ostringstream csv;
  if (law_name == "kesten-mckay" || law_name == "nu") {
    const SpectralLaw law =
        law_name == "nu" ? nu_kc(k, c) : kesten_mckay(law_g);
    const LawCdfCache cache(law);
    csv << "x,density,cdf\n";
    for (int i = 0; i < grid; ++i) {
      const double x =
          law.lo + (law.hi - law.lo) * (grid == 1 ? 0.5 : i / (grid - 1.0));
      csv << x << ',' << (law.density ? law.density(x) : 0.0) << ','
          << cache.cdf(x) << '\n';
    }
  } else if (law_name == "thresholds") {
    const InducedThresholds th = induced_thresholds(k, law_g);
    csv << "k,g,witness_c,jordan_c_g2,noise_c_g2,noise_c_g\n";
    csv << k << ',' << law_g << ',' << th.witness_c << ',' << th.jordan_c_g2
        << ',' << th.noise_c_g2 << ',' << th.noise_c_g << '\n';
  } else {
    std::cerr << "unknown law: " << law_name
              << " (expected kesten-mckay, nu, thresholds)\n";
    return kExitUsage;
  }
  if (g.output.empty()) {
    std::cout << csv.str();
  } else {
    std::ofstream out(g.output);
    out << csv.str();
  }
  return kExitOk;
}

int cmd_experiment(const GlobalArgs& g, const std::string& config_path,
                   bool seed_override, int workers) {
  ExperimentConfig config = load_experiment_config(config_path);
  if (seed_override) config.seed = g.seed;
  if (workers > 0) config.workers = workers;
  if (!g.output.empty()) config.output_path = g.output;
  const ExperimentReport report = run_experiment(config);
  std::printf("experiment %s: %s (%d rows, %d excluded, %.2fs)\n",
              report.experiment.c_str(), report.passed ? "pass" : "FAIL",
              static_cast<int>(report.rows.size()), report.excluded_trials,
              report.wall_clock_s);
  for (const auto& f : report.failures) std::printf("  target failed: %s\n", f.c_str());
  return report.passed ? kExitOk : kExitTargetFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"quantum measurement incompatibility toolkit"};
  app.require_subcommand(1);
  app.fallthrough();
  GlobalArgs g;
  bool seed_given = false;
  app.add_option("--seed", g.seed, "RNG seed")->each([&](const std::string&) {
    seed_given = true;
  });
  app.add_option("--stream", g.stream, "RNG stream id");
  app.add_option("--output", g.output, "output file (default stdout)");
  app.add_option("--format", g.format, "output format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  auto* sample = app.add_subcommand("sample", "sample random measurements");
  std::string model = "basis";
  Eigen::Index d = 2, k = 2, n = 1, r = 1;
  int count = 1;
  sample->add_option("--model", model, "basis | projection | induced | subspace");
  sample->add_option("--d", d, "dimension");
  sample->add_option("--k", k, "outcomes (induced model)");
  sample->add_option("--n", n, "ancilla dimension (induced model)");
  sample->add_option("--r", r, "rank (projection/subspace models)");
  sample->add_option("--count", count, "number of samples");

  auto* tau = app.add_subcommand("tau", "compatibility degree of a set");
  std::string tau_input;
  int pauli_g = 0;
  double tau_tol = 1e-4;
  tau->add_option("--input", tau_input, "MeasurementSet JSON file");
  tau->add_option("--pauli", pauli_g, "use the generalized Pauli tuple of size g");
  tau->add_option("--tol", tau_tol, "bisection bracket width");

  auto* witness = app.add_subcommand("witness", "search for an incompatibility witness");
  std::string witness_input;
  witness->add_option("--input", witness_input, "MeasurementSet JSON file")
      ->required();

  auto* criteria = app.add_subcommand("criteria", "closed-form bounds and tests");
  std::string criteria_input;
  criteria->add_option("--input", criteria_input, "MeasurementSet JSON file")
      ->required();

  auto* angles = app.add_subcommand("angles", "principal-angle histograms");
  Eigen::Index angles_d = 100;
  double alpha = 0.5, beta = 0.5;
  int bins = 32, angle_trials = 1;
  angles->add_option("--d", angles_d, "dimension");
  angles->add_option("--alpha", alpha, "first trace ratio");
  angles->add_option("--beta", beta, "second trace ratio");
  angles->add_option("--bins", bins, "histogram bins");
  angles->add_option("--trials", angle_trials, "subspace pairs to sample");

  auto* spectra = app.add_subcommand("spectra", "reference spectral laws");
  std::string law_name;
  int law_g = 2;
  int law_k = 2;
  double law_c = 0.5;
  int grid = 101;
  spectra->add_option("law", law_name, "kesten-mckay | nu | thresholds")
      ->required();
  spectra->add_option("--g", law_g, "number of measurements");
  spectra->add_option("--k", law_k, "number of outcomes");
  spectra->add_option("--c", law_c, "induced ratio c = d/(kn)");
  spectra->add_option("--grid", grid, "sample grid size");

  auto* experiment = app.add_subcommand("experiment", "run a registered experiment");
  std::string config_path;
  int workers = 0;
  experiment->add_option("--config", config_path, "experiment config JSON")
      ->required();
  experiment->add_option("--workers", workers, "worker thread count");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (sample->parsed()) return cmd_sample(g, model, d, k, n, r, count);
    if (tau->parsed()) {
      if (tau_input.empty() && pauli_g <= 0) {
        std::cerr << "tau needs --input or --pauli\n";
        return kExitUsage;
      }
      return cmd_tau(g, tau_input, pauli_g, tau_tol);
    }
    if (witness->parsed()) return cmd_witness(g, witness_input);
    if (criteria->parsed()) return cmd_criteria(g, criteria_input);
    if (angles->parsed()) {
      return cmd_angles(g, angles_d, alpha, beta, bins, angle_trials);
    }
    if (spectra->parsed()) {
      return cmd_spectra(g, law_name, law_g, law_k, law_c, grid);
    }
    if (experiment->parsed()) {
      return cmd_experiment(g, config_path, seed_given, workers);
    }
  } catch (const SolverFailure& e) {
    std::cerr << "solver failure: " << e.what() << "\n";
    return kExitSolver;
  } catch (const ConfigInvalid& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  return kExitUsage;
}
