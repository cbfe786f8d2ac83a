#pragma once

#include <string>

#include <json.hpp>

#include "teis/cuspform.hpp"

namespace teis {

/// 17 significant digits, round-trip exact for doubles.
std::string format_decimal(double x);
/// Parses a decimal string; throws InvalidArgument naming `field` on malformed input.
double parse_decimal(const std::string& s, const std::string& field = "value");

/// {"level", "weight", "coefficients": [[re, im], ...], "error_bound", "error_bounds"}.
nlohmann::json series_to_json(const FourierSeries& f);
/// Accepts coefficient entries as [re, im] pairs or single real values, each a decimal
/// string or JSON number. Optional "error_bounds" gives per-coefficient bounds; otherwise
/// "error_bound" applies to every coefficient.
FourierSeries series_from_json(const nlohmann::json& j);

nlohmann::json read_json_file(const std::string& path);
FourierSeries read_series_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace teis
