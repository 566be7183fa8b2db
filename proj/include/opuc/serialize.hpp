#pragma once

#include <json.hpp>

#include "measure.hpp"
#include "verblunsky.hpp"

namespace opuc {

nlohmann::json to_json(const VerblunskySeq& a);
VerblunskySeq coeffs_from_json(const nlohmann::json& j);

// Discrete measures serialize their atoms; ac and mixed measures their
// family tag and parameters.
nlohmann::json to_json(const CircleMeasure& mu);
CircleMeasure discrete_from_json(const nlohmann::json& j);

}  // namespace opuc
