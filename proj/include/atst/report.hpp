#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace atst {

// 17 significant digits; non-finite values become null.
std::string fmt_num(double x);

// Minimal streaming JSON object writer with a fixed key order.
class JsonObject {
 public:
  JsonObject& num(const std::string& key, double v);
  JsonObject& integer(const std::string& key, std::int64_t v);
  JsonObject& str(const std::string& key, const std::string& v);
  JsonObject& boolean(const std::string& key, bool v);
  JsonObject& raw(const std::string& key, const std::string& json);
  JsonObject& nums(const std::string& key, const std::vector<double>& v);
  std::string done() const { return body_ + "}"; }

 private:
  void key(const std::string& k);
  std::string body_ = "{";
  bool first_ = true;
};

std::string json_escape(const std::string& s);
std::string json_array(const std::vector<std::string>& items);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  void row(const std::vector<std::string>& cells);
  const std::string& text() const { return text_; }

 private:
  std::size_t width_;
  std::string text_;
};

void write_text_file(const std::string& path, const std::string& text);

}  // namespace atst
