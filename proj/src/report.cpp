#include "prolong/report.hpp"

#include "prolong/exceptions.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

namespace prolong {

std::string format_double(double v) {
  if (!std::isfinite(v))
    throw NumericError("report: refusing to serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

Json Json::object() {
  Json j;
  j.kind_ = Kind::Object;
  return j;
}

Json Json::array() {
  Json j;
  j.kind_ = Kind::Array;
  return j;
}

Json Json::boolean(bool b) {
  Json j;
  j.kind_ = Kind::Bool;
  j.bool_ = b;
  return j;
}

Json Json::number(double v) {
  Json j;
  j.kind_ = Kind::Number;
  j.num_ = v;
  return j;
}

Json Json::integer(long long v) {
  Json j;
  j.kind_ = Kind::Integer;
  j.int_ = v;
  return j;
}

Json Json::raw_number(const std::string& digits) {
  Json j;
  j.kind_ = Kind::RawNumber;
  j.str_ = digits;
  return j;
}

Json Json::text(const std::string& s) {
  Json j;
  j.kind_ = Kind::Text;
  j.str_ = s;
  return j;
}

Json& Json::set(const std::string& key, Json v) {
  if (kind_ != Kind::Object) throw InvariantError("Json::set on a non-object");
  members_.emplace_back(key, std::move(v));
  return *this;
}

Json& Json::push(Json v) {
  if (kind_ != Kind::Array) throw InvariantError("Json::push on a non-array");
  items_.push_back(std::move(v));
  return *this;
}

Json Json::vector(const Eigen::VectorXd& v) {
  Json a = array();
  for (int i = 0; i < v.size(); ++i) a.push(number(v[i]));
  return a;
}

Json Json::matrix(const Eigen::MatrixXd& m) {
  Json a = array();
  for (int i = 0; i < m.rows(); ++i) {
    Json row = array();
    for (int j = 0; j < m.cols(); ++j) row.push(number(m(i, j)));
    a.push(std::move(row));
  }
  return a;
}

Json Json::strings(const std::vector<std::string>& v) {
  Json a = array();
  for (const auto& s : v) a.push(text(s));
  return a;
}

namespace {

void write_escaped(std::string& out, const std::string& s) {
  out += '"';
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  out += '"';
}

} // namespace

void Json::write(std::string& out, int indent, int depth) const {
  const std::string pad(static_cast<size_t>(indent) * depth, ' ');
  const std::string pad_in(static_cast<size_t>(indent) * (depth + 1), ' ');
  switch (kind_) {
    case Kind::Null: out += "null"; return;
    case Kind::Bool: out += bool_ ? "true" : "false"; return;
    case Kind::Number: out += format_double(num_); return;
    case Kind::Integer: out += std::to_string(int_); return;
    case Kind::RawNumber: out += str_; return;
    case Kind::Text: write_escaped(out, str_); return;
    case Kind::Array: {
      if (items_.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (size_t i = 0; i < items_.size(); ++i) {
        out += pad_in;
        items_[i].write(out, indent, depth + 1);
        if (i + 1 < items_.size()) out += ',';
        out += '\n';
      }
      out += pad + "]";
      return;
    }
    case Kind::Object: {
      if (members_.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      for (size_t i = 0; i < members_.size(); ++i) {
        out += pad_in;
        write_escaped(out, members_[i].first);
        out += ": ";
        members_[i].second.write(out, indent, depth + 1);
        if (i + 1 < members_.size()) out += ',';
        out += '\n';
      }
      out += pad + "}";
      return;
    }
  }
}

std::string Json::dump(int indent) const {
  std::string out;
  write(out, indent, 0);
  out += '\n';
  return out;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::string out;
  for (size_t i = 0; i < header.size(); ++i) {
    out += header[i];
    out += (i + 1 < header.size()) ? ',' : '\n';
  }
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) {
      out += format_double(row[i]);
      out += (i + 1 < row.size()) ? ',' : '\n';
    }
  }
  write_text_file(path, out);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot open output file: " + path);
  f << content;
}

} // namespace prolong
