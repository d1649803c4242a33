#pragma once

#include "baryfold/model.hpp"

#include "json.hpp"

namespace baryfold {

/// Parse a model descriptor:
///   {"kind":"hyperbolic","n":3}
///   {"kind":"product","n1":2,"n2":2}
///   {"kind":"horospherical","alphas":[1.0,1.0,0.0]}
ModelSpace model_from_json(const nlohmann::json& j);

nlohmann::json model_to_json(const ModelSpace& m);

/// Short human-readable tag, e.g. "hyperbolic(4)" or "product(2,2)".
std::string model_label(const ModelSpace& m);

}  // namespace baryfold
