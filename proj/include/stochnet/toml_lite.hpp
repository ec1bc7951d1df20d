#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

namespace stochnet::toml {

/// Reads the TOML subset used by experiment configs into a JSON object:
/// [table] and [dotted.table] headers, bare or quoted keys, basic and literal
/// strings, integers, floats, booleans and (possibly multi-line) arrays.
/// Inline tables, arrays of tables and date-times are rejected.
nlohmann::json parse(std::string_view text);

/// Writes a JSON object of scalars, arrays and nested objects back as TOML.
/// Floats are written in shortest round-trip form.
std::string dump(const nlohmann::json& doc);

}  // namespace stochnet::toml
