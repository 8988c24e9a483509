#pragma once

#include <json.hpp>
#include <string>

#include "mfgs/model.hpp"

namespace mfgs {

// JSON model description (comments allowed):
//   {"d": 2, "labels": ["-1", "+1"],
//    "kernel": {"spin_s": {"s": 0.5, "lambda": 0.5, "convention": "pauli"}}
//              or {"matrix": [[0, 0.5], [0.5, 0]]},
//    "interaction": {"p_body": {"p": 2, "coeff": 0.5}}
//                   or {"terms": [{"exps": [2, 0], "coeff": 0.5}, ...]},
//    "label_values": [-1, 1]}   // optional, used by p_body
ModelSpec model_from_json(const nlohmann::json& j);
nlohmann::json load_model_json(const std::string& path);
ModelSpec load_model(const std::string& path);

// Same description with the transverse field set to lam (spin_s lambda, or matrix rescaled).
nlohmann::json with_field(const nlohmann::json& j, double lam);

}  // namespace mfgs
