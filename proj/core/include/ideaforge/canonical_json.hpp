#pragma once

#include <string>

#include <nlohmann/json.hpp>

namespace ideaforge {

// Deterministic JSON text: sorted keys, two-space indent, floating-point
// numbers in shortest general form at 12 significant digits. Non-finite
// numbers are rejected with InternalError.
std::string canonical_dump(const nlohmann::json& value);

// Formats one double the way canonical_dump does.
std::string format_number(double value);

}  // namespace ideaforge
