#pragma once

#include <Eigen/Dense>
#include <map>
#include <memory>
#include <string>
#include <vector>

namespace prolong {

/// Insertion-ordered JSON value for reports. Numbers are printed with %.17g
/// so identical runs produce byte-identical files; keys keep insertion
/// order. (Config parsing uses a full JSON library; this type only writes.)
class Json {
public:
  Json() = default;

  static Json object();
  static Json array();
  static Json boolean(bool b);
  static Json number(double v);
  static Json integer(long long v);
  /// Emits the string verbatim as a JSON number (arbitrary precision).
  static Json raw_number(const std::string& digits);
  static Json text(const std::string& s);

  Json& set(const std::string& key, Json v); // object member, returns *this
  Json& push(Json v);                        // array element, returns *this

  static Json vector(const Eigen::VectorXd& v);
  static Json matrix(const Eigen::MatrixXd& m); // array of row arrays
  static Json strings(const std::vector<std::string>& v);

  std::string dump(int indent = 2) const;
  bool is_object() const { return kind_ == Kind::Object; }

private:
  enum class Kind { Null, Bool, Number, Integer, RawNumber, Text, Array, Object };
  Kind kind_ = Kind::Null;
  bool bool_ = false;
  double num_ = 0.0;
  long long int_ = 0;
  std::string str_;
  std::vector<Json> items_;
  std::vector<std::pair<std::string, Json>> members_;

  void write(std::string& out, int indent, int depth) const;
};

/// Formats a double exactly as the report writer does.
std::string format_double(double v);

/// Writes a CSV table; every numeric cell uses the same %.17g formatting.
void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

void write_text_file(const std::string& path, const std::string& content);

} // namespace prolong
