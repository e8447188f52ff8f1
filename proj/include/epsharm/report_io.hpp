#pragma once

// Report emission with reproducibility guarantees: JSON keys serialize in
// insertion order, all reals print with 17 significant digits, files end in
// LF. Identical inputs therefore produce byte-identical artifacts, which the
// CLI contract requires (and the test suite asserts).

#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace epsharm {

// %.17g — round-trips any double.
std::string format_double(double v);

class Json {
 public:
  static Json object();
  static Json array();
  static Json number(double v);
  static Json integer(long long v);
  static Json boolean(bool v);
  static Json str(std::string v);
  static Json null();

  // Object members keep insertion order; returns *this for chaining.
  Json& set(const std::string& key, Json v);
  Json& push(Json v);

  std::string dump(int indent = 2) const;

 private:
  enum class Kind { Object, Array, Number, Integer, Boolean, String, Null };
  Kind kind_ = Kind::Null;
  double num_ = 0.0;
  long long int_ = 0;
  bool bool_ = false;
  std::string str_;
  std::vector<std::pair<std::string, Json>> members_;
  std::vector<Json> items_;

  void write(std::string& out, int indent, int depth) const;
};

// Writes content atomically enough for our purposes (single write, binary
// stream, LF endings preserved). Throws ConfigError when the path cannot be
// opened.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace epsharm
