#include "atst/report.hpp"
#include "atst/parallel.hpp"

#include <thread>

#include "atst/types.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace atst {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::Parse: return "parse";
    case ErrorKind::DimensionMismatch: return "dimension_mismatch";
    case ErrorKind::DegenerateSegment: return "degenerate_segment";
    case ErrorKind::OutOfRange: return "out_of_range";
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::ClosedCurve: return "closed_curve";
    case ErrorKind::EmptyIntersection: return "empty_intersection";
    case ErrorKind::CoveringViolation: return "covering_violation";
    case ErrorKind::MissingEntry: return "missing_entry";
    case ErrorKind::Internal: return "internal";
  }
  return "unknown";
}

std::string fmt_num(double x) {
  if (!std::isfinite(x)) return "null";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string json_escape(const std::string& s) {
  std::string out = "\"";
  for (char ch : s) {
    switch (ch) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default:
        if (static_cast<unsigned char>(ch) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", ch);
          out += buf;
        } else {
          out += ch;
        }
    }
  }
  return out + "\"";
}

std::string json_array(const std::vector<std::string>& items) {
  std::string out = "[";
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ",";
    out += items[i];
  }
  return out + "]";
}

void JsonObject::key(const std::string& k) {
  if (!first_) body_ += ",";
  first_ = false;
  body_ += json_escape(k) + ":";
}

JsonObject& JsonObject::num(const std::string& k, double v) {
  key(k);
  body_ += fmt_num(v);
  return *this;
}

JsonObject& JsonObject::integer(const std::string& k, std::int64_t v) {
  key(k);
  body_ += std::to_string(v);
  return *this;
}

JsonObject& JsonObject::str(const std::string& k, const std::string& v) {
  key(k);
  body_ += json_escape(v);
  return *this;
}

JsonObject& JsonObject::boolean(const std::string& k, bool v) {
  key(k);
  body_ += v ? "true" : "false";
  return *this;
}

JsonObject& JsonObject::raw(const std::string& k, const std::string& json) {
  key(k);
  body_ += json;
  return *this;
}

JsonObject& JsonObject::nums(const std::string& k, const std::vector<double>& v) {
  std::vector<std::string> items;
  items.reserve(v.size());
  for (double x : v) items.push_back(fmt_num(x));
  return raw(k, json_array(items));
}

CsvWriter::CsvWriter(std::vector<std::string> header) : width_(header.size()) {
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& cells) {
  for (std::size_t i = 0; i < width_; ++i) {
    if (i) text_ += ",";
    if (i >= cells.size()) continue;
    const std::string& c = cells[i];
    if (c.find_first_of(",\"\n") == std::string::npos) {
      text_ += c;
      continue;
    }
    text_ += '"';
    for (char ch : c) {
      if (ch == '"') text_ += '"';
      text_ += ch;
    }
    text_ += '"';
  }
  text_ += "\n";
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
}

int default_threads() {
  unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : static_cast<int>(n);
}

}  // namespace atst
