#pragma once

// Report serialization. Machine-readable output prints every float with 17
// significant digits, so parsing a report and emitting it again reproduces
// the same bytes. Non-finite values are written as the strings "inf",
// "-inf" and "nan".

#include "peakload/numsolve.hpp"

#include <json.hpp>

#include <string>

namespace peakload {

using ReportJson = nlohmann::ordered_json;

ReportJson to_json(double v);
ReportJson to_json(const VectorXd& v);
ReportJson to_json(const MatrixXd& m);  // array of rows
ReportJson to_json(const Certificate& c);

std::string emit_json(const ReportJson& j);
// Indented key: value listing for people.
std::string emit_text(const ReportJson& j);
ReportJson parse_report(const std::string& text);

}  // namespace peakload
