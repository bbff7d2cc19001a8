#pragma once

#include <iosfwd>
#include <nlohmann/json.hpp>
#include <string>

#include "otranks/gof_tests.hpp"
#include "otranks/solver.hpp"
#include "otranks/types.hpp"

namespace otranks {

inline constexpr int kModelVersion = 1;
inline constexpr int kReportVersion = 1;

/// Comma-separated numeric rows; blank lines are skipped. All rows must have
/// the same number of fields. Throws InputError with the offending line number.
PointSet read_csv(std::istream& in, bool header = false);
PointSet read_csv_file(const std::string& path, bool header = false);

/// One row per point, 17 significant digits.
void write_csv(std::ostream& out, const PointSet& points);
std::string format_double(double value);

nlohmann::json model_to_json(const FittedTransport& fitted);
FittedTransport model_from_json(const nlohmann::json& doc);

void save_model(const std::string& path, const FittedTransport& fitted);
FittedTransport load_model(const std::string& path);

nlohmann::json report_to_json(const TwoSampleReport& report);
nlohmann::json report_to_json(const IndependenceReport& report);

/// Cell polygons (d = 2) or intervals (d = 1) with site, area and site coordinates.
nlohmann::json cells_to_json(const FittedTransport& fitted);

/// Pretty-printed JSON followed by a newline.
void write_json_file(const std::string& path, const nlohmann::json& doc);

}  // namespace otranks
