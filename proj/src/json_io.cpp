#include "incompat/json_io.hpp"

namespace incompat {

using nlohmann::json;

json matrix_to_json(const cmatrix_t& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      row.push_back({m(i, j).real(), m(i, j).imag()});
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

cmatrix_t matrix_from_json(const json& j) {
  if (!j.is_array() || j.empty()) {
    throw ConfigInvalid("matrix JSON must be a nonempty array of rows");
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
  const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
  cmatrix_t m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(i);
    if (static_cast<Eigen::Index>(row.size()) != cols) {
      throw ConfigInvalid("matrix JSON rows have mixed lengths");
    }
    for (Eigen::Index c = 0; c < cols; ++c) {
      const auto& entry = row.at(c);
      if (!entry.is_array() || entry.size() != 2) {
        throw ConfigInvalid("matrix entries must be [re, im] pairs");
      }
      m(i, c) = complex_t(entry.at(0).get<double>(), entry.at(1).get<double>());
    }
  }
  return m;
}

json povm_to_json(const Povm& p) {
  json effects = json::array();
  for (const auto& e : p.effects) effects.push_back(matrix_to_json(e.mat()));
  return json{{"dim", p.dim}, {"effects", std::move(effects)}};
}

Povm povm_from_json(const json& j) {
  std::vector<cmatrix_t> effects;
  for (const auto& e : j.at("effects")) effects.push_back(matrix_from_json(e));
  Povm p = validate_povm(effects);
  if (j.contains("dim") && j.at("dim").get<Eigen::Index>() != p.dim) {
    throw ConfigInvalid("POVM dim field disagrees with effect matrices");
  }
  return p;
}

json measurement_set_to_json(const MeasurementSet& s) {
  json povms = json::array();
  for (const auto& p : s.povms) povms.push_back(povm_to_json(p));
  json counts = json::array();
  for (auto k : s.outcome_counts()) counts.push_back(k);
  return json{
      {"dim", s.dim}, {"outcome_counts", std::move(counts)}, {"povms", std::move(povms)}};
}

MeasurementSet measurement_set_from_json(const json& j) {
  std::vector<Povm> povms;
  for (const auto& p : j.at("povms")) povms.push_back(povm_from_json(p));
  MeasurementSet s = make_measurement_set(std::move(povms));
  if (j.contains("outcome_counts")) {
    const auto counts = j.at("outcome_counts").get<std::vector<Eigen::Index>>();
    if (counts != s.outcome_counts()) {
      throw ConfigInvalid("outcome_counts disagree with POVM effect lists");
    }
  }
  return s;
}

}  // namespace incompat
