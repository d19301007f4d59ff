#pragma once

#include <charconv>
#include <string>
#include <string_view>
#include <vector>

namespace robustq::cli {

// Builds CSV text with '.' decimals and shortest round-trip doubles, whatever the locale.
class CsvWriter {
 public:
  explicit CsvWriter(const std::vector<std::string>& header) : columns_(header.size()) {
    for (const auto& h : header) field(h);
    end_row();
  }

  CsvWriter& field(std::string_view s) {
    sep();
    out_.append(s);
    return *this;
  }
  CsvWriter& field(double v) {
    sep();
    char buf[32];
    const auto r = std::to_chars(buf, buf + sizeof buf, v == 0.0 ? 0.0 : v);  // no "-0"
    out_.append(buf, r.ptr);
    return *this;
  }
  CsvWriter& field(long v) {
    sep();
    out_.append(std::to_string(v));
    return *this;
  }
  void end_row() {
    out_.push_back('\n');
    fields_ = 0;
  }

  const std::string& str() const { return out_; }

 private:
  void sep() {
    if (fields_++ > 0) out_.push_back(',');
  }
  std::size_t columns_;
  std::size_t fields_ = 0;
  std::string out_;
};

}  // namespace robustq::cli
