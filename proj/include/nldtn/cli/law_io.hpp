#pragma once

#include "json.hpp"
#include "nldtn/material.hpp"

namespace nldtn::cli {

// Law document:
//   {"gamma": <profile>,
//    "quad": [{"i": 1, "k": 1, "l": 2, "value": 0.5}, {"i": 2, "k": 1, "l": 1, "field": <profile>}],
//    "residual": {"kind": "none" | "cubic_cutoff", "C2": 1.0, "h_cut": 1.0}}
// Indices are 1-based. A profile is a number, an array of nodal values, or
// {"constant": c, "gradient": [g1, ...]} meaning c + g . x.
// Malformed documents raise ConfigInvalid naming the offending path.
MaterialLaw law_from_json(const nlohmann::json& doc, const GridSpec& grid);

// Constant slots are written as values, nodal slots as arrays.
nlohmann::json law_to_json(const MaterialLaw& law);

// Shared with the experiment runner for data profiles.
ScalarField profile_from_json(const nlohmann::json& doc, const GridSpec& grid, const std::string& path);

// Rejects keys of `obj` outside `allowed`.
void require_keys(const nlohmann::json& obj, std::initializer_list<const char*> allowed, const std::string& path);

}  // namespace nldtn::cli
