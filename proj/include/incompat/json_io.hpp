#ifndef INCOMPAT_JSON_IO_HPP
#define INCOMPAT_JSON_IO_HPP

#include <json.hpp>

#include "incompat/core.hpp"

namespace incompat {

// Complex entries are serialized as [re, im] pairs, matrices row-major.
nlohmann::json matrix_to_json(const cmatrix_t& m);
cmatrix_t matrix_from_json(const nlohmann::json& j);

nlohmann::json povm_to_json(const Povm& p);
Povm povm_from_json(const nlohmann::json& j);

nlohmann::json measurement_set_to_json(const MeasurementSet& s);
MeasurementSet measurement_set_from_json(const nlohmann::json& j);

}  // namespace incompat

#endif
