#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>

#include "incompat/experiments.hpp"

using namespace incompat;
using nlohmann::json;

#ifndef INCOMPAT_CONFIG_DIR
#define INCOMPAT_CONFIG_DIR "configs"
#endif

namespace {

ExperimentConfig small_two_bases() {
  ExperimentConfig cfg;
  cfg.experiment = "two_bases";
  cfg.dims = {16, 32};
  cfg.trials = 4;
  cfg.seed = 99;
  cfg.targets = {{"threshold_rate", 0.0}, {"k_rate", 0.0}};
  return cfg;
}

}  // namespace

TEST_CASE("all eight experiments are registered") {
  const auto names = registered_experiments();
  CHECK(names.size() == 8);
  for (const char* expected :
       {"two_proj_disc", "two_proj_unbalanced", "many_proj_witness",
        "two_bases", "many_bases", "induced_povm", "moments",
        "kesten_mckay"}) {
    CHECK(std::find(names.begin(), names.end(), expected) != names.end());
  }
}

TEST_CASE("config validation") {
  json j = {{"experiment", "no_such_thing"}, {"dims", {2}}};
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigInvalid);

  j = {{"experiment", "moments"}, {"dims", json::array()}};
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigInvalid);

  j = {{"experiment", "moments"}, {"dims", {2}}, {"trials", 0}};
  CHECK_THROWS_AS(experiment_config_from_json(j), ConfigInvalid);

  CHECK_THROWS_AS(load_experiment_config("/nonexistent/path.json"),
                  ConfigInvalid);
}

TEST_CASE("reports are reproducible and worker-count independent") {
  ExperimentConfig cfg = small_two_bases();
  cfg.workers = 1;
  const ExperimentReport a = run_experiment(cfg);
  cfg.workers = 3;
  const ExperimentReport b = run_experiment(cfg);
  cfg.workers = 1;
  const ExperimentReport c = run_experiment(cfg);

  CHECK(a.csv() == c.csv());
  // Identical rows regardless of worker count; config echo differs in the
  // workers field only.
  CHECK(a.csv().substr(a.csv().find('\n')) ==
        b.csv().substr(b.csv().find('\n')));
  json ja = a.to_json();
  json jc = c.to_json();
  ja["wall_clock_s"] = 0.0;
  jc["wall_clock_s"] = 0.0;
  CHECK(ja == jc);
}

TEST_CASE("pass/fail verdicts come from the config, not the code") {
  ExperimentConfig cfg = small_two_bases();
  const ExperimentReport lenient = run_experiment(cfg);
  CHECK(lenient.passed);

  cfg.targets = {{"threshold_rate", 2.0}, {"k_rate", 0.0}};  // unattainable
  const ExperimentReport strict = run_experiment(cfg);
  CHECK_FALSE(strict.passed);
  CHECK_FALSE(strict.failures.empty());
}

TEST_CASE("failing trials are recorded, not fatal") {
  // d = 1 leaves no nontrivial angle block, so every trial aborts with an
  // error; the run itself must complete and report the exclusions.
  ExperimentConfig cfg;
  cfg.experiment = "two_proj_disc";
  cfg.dims = {1};
  cfg.trials = 3;
  cfg.seed = 5;
  cfg.targets = json::object();
  const ExperimentReport report = run_experiment(cfg);
  CHECK(report.excluded_trials == 3);
  CHECK(report.rows.size() == 3);
  for (const auto& err : report.row_errors) CHECK_FALSE(err.empty());
}

TEST_CASE("CSV shape matches the column header") {
  const ExperimentReport report = run_experiment(small_two_bases());
  CHECK(report.rows.size() == 8);  // 2 dims x 4 trials
  for (const auto& row : report.rows) {
    CHECK(row.size() == report.columns.size());
  }
  const std::string csv = report.csv();
  CHECK(csv.find("trial,d,max_entry") == 0);
}

TEST_CASE("report files are written when an output path is set") {
  ExperimentConfig cfg = small_two_bases();
  cfg.output_path = "test_experiments_scratch";
  run_experiment(cfg);
  std::ifstream csv("test_experiments_scratch.csv");
  std::ifstream js("test_experiments_scratch.json");
  CHECK(csv.good());
  CHECK(js.good());
  json j;
  js >> j;
  CHECK(j.at("experiment") == "two_bases");
  CHECK(j.at("passed").is_boolean());
  std::remove("test_experiments_scratch.csv");
  std::remove("test_experiments_scratch.json");
}

TEST_CASE("the shipped configs parse and target the acceptance values") {
  const std::string dir = INCOMPAT_CONFIG_DIR;
  for (const char* name :
       {"two_proj_disc", "two_proj_unbalanced", "many_proj_witness",
        "two_bases", "many_bases", "induced_povm", "moments",
        "kesten_mckay"}) {
    const ExperimentConfig cfg =
        load_experiment_config(dir + "/" + name + ".json");
    CHECK(cfg.experiment == name);
    CHECK_FALSE(cfg.targets.empty());
  }
  const ExperimentConfig disc =
      load_experiment_config(dir + "/two_proj_disc.json");
  CHECK(disc.trials == 20);
  CHECK(disc.targets.at("width_checks").at(0).at("width").get<double>() ==
        doctest::Approx(0.08));
}
