#include "peakload/report.hpp"

#include <cmath>
#include <cstdio>

namespace peakload {
namespace {

std::string format_double(double v, int digits) {
  if (std::isnan(v)) return "\"nan\"";
  if (std::isinf(v)) return v > 0 ? "\"inf\"" : "\"-inf\"";
  if (v == 0.0) v = 0.0;  // drop the sign of negative zero
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

bool is_flat(const ReportJson& j) {
  for (const auto& e : j) {
    if (e.is_structured()) return false;
  }
  return true;
}

void write(const ReportJson& j, std::string& out, int depth) {
  const std::string pad(static_cast<size_t>(2 * (depth + 1)), ' ');
  const std::string close(static_cast<size_t>(2 * depth), ' ');
  switch (j.type()) {
    case ReportJson::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& item : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + ReportJson(item.key()).dump() + ": ";
        write(item.value(), out, depth + 1);
      }
      out += "\n" + close + "}";
      return;
    }
    case ReportJson::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // Numeric vectors stay on one line; nested structures get one element per line.
      if (is_flat(j)) {
        out += "[";
        for (size_t i = 0; i < j.size(); ++i) {
          if (i) out += ", ";
          write(j[i], out, depth + 1);
        }
        out += "]";
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        write(j[i], out, depth + 1);
      }
      out += "\n" + close + "]";
      return;
    }
    case ReportJson::value_t::number_float:
      out += format_double(j.get<double>(), 17);
      return;
    default:
      out += j.dump();
  }
}

std::string scalar_text(const ReportJson& j) {
  if (j.is_number_float()) {
    const std::string s = format_double(j.get<double>(), 10);
    return s.front() == '"' ? s.substr(1, s.size() - 2) : s;
  }
  if (j.is_string()) return j.get<std::string>();
  if (j.is_array()) {
    std::string s = "[";
    for (size_t i = 0; i < j.size(); ++i) s += (i ? ", " : "") + scalar_text(j[i]);
    return s + "]";
  }
  return j.dump();
}

void write_text(const ReportJson& j, const std::string& indent, std::string& out) {
  for (const auto& item : j.items()) {
    const ReportJson& v = item.value();
    const bool nested_objects = v.is_array() && !v.empty() && v.front().is_object();
    if (v.is_object() && !v.empty()) {
      out += indent + item.key() + ":\n";
      write_text(v, indent + "  ", out);
    } else if (nested_objects) {
      out += indent + item.key() + ":\n";
      for (size_t i = 0; i < v.size(); ++i) {
        out += indent + "  [" + std::to_string(i) + "]\n";
        write_text(v[i], indent + "    ", out);
      }
    } else {
      out += indent + item.key() + ": " + scalar_text(v) + "\n";
    }
  }
}

}  // namespace

ReportJson to_json(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

ReportJson to_json(const VectorXd& v) {
  ReportJson a = ReportJson::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
  return a;
}

ReportJson to_json(const MatrixXd& m) {
  ReportJson a = ReportJson::array();
  for (Index i = 0; i < m.rows(); ++i) a.push_back(to_json(VectorXd(m.row(i).transpose())));
  return a;
}

ReportJson to_json(const Certificate& c) {
  ReportJson j;
  j["ok"] = c.ok;
  j["primal_residual"] = to_json(c.primal_residual);
  j["dual_residual"] = to_json(c.dual_residual);
  j["complementarity"] = to_json(c.complementarity);
  j["duality_gap"] = to_json(c.duality_gap);
  return j;
}

std::string emit_json(const ReportJson& j) {
  std::string out;
  write(j, out, 0);
  out += "\n";
  return out;
}

std::string emit_text(const ReportJson& j) {
  std::string out;
  write_text(j, "", out);
  return out;
}

ReportJson parse_report(const std::string& text) { return ReportJson::parse(text); }

}  // namespace peakload
