#include "stochnet/toml_lite.hpp"

#include <cerrno>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <set>
#include <string>
#include <vector>

#include "stochnet/error.hpp"
#include "stochnet/io.hpp"

namespace stochnet::toml {

namespace {

using nlohmann::json;

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  json run() {
    json root = json::object();
    json* table = &root;
    while (true) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        table = &open_table(root);
      } else {
        parse_key_value(*table);
      }
      end_of_statement();
    }
    return root;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::set<std::string> defined_tables_;

  bool eof() const { return pos_ >= s_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < s_.size() ? s_[pos_ + ahead] : '\0'; }
  char get() {
    const char c = s_[pos_++];
    if (c == '\n') ++line_;
    return c;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line_) + ": " + msg);
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) get();
  }

  void skip_comment() {
    if (peek() == '#') {
      while (!eof() && peek() != '\n') get();
    }
  }

  void skip_blank_lines() {
    while (!eof()) {
      skip_ws();
      skip_comment();
      if (peek() == '\r') get();
      if (peek() == '\n') {
        get();
        continue;
      }
      break;
    }
  }

  void end_of_statement() {
    skip_ws();
    skip_comment();
    if (peek() == '\r') get();
    if (eof()) return;
    if (peek() != '\n') fail(std::string("unexpected '") + peek() + "' after value");
    get();
  }

  static bool bare_key_char(char c) {
    return (c >= 'A' && c <= 'Z') || (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_' || c == '-';
  }

  std::vector<std::string> parse_key_path() {
    std::vector<std::string> parts;
    while (true) {
      skip_ws();
      if (peek() == '"') {
        parts.push_back(parse_basic_string());
      } else if (peek() == '\'') {
        parts.push_back(parse_literal_string());
      } else {
        std::string key;
        while (!eof() && bare_key_char(peek())) key.push_back(get());
        if (key.empty()) fail("expected a key");
        parts.push_back(key);
      }
      skip_ws();
      if (peek() != '.') break;
      get();
    }
    return parts;
  }

  static std::string joined(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : ".") + p;
    return out;
  }

  json& descend(json& root, const std::vector<std::string>& parts, std::size_t count) {
    json* node = &root;
    for (std::size_t i = 0; i < count; ++i) {
      auto& child = (*node)[parts[i]];
      if (child.is_null()) child = json::object();
      if (!child.is_object()) fail("'" + parts[i] + "' is already a value, not a table");
      node = &child;
    }
    return *node;
  }

  json& open_table(json& root) {
    get();  // '['
    if (peek() == '[') fail("arrays of tables are not supported");
    const auto parts = parse_key_path();
    skip_ws();
    if (peek() != ']') fail("expected ']' to close table header");
    get();
    const auto name = joined(parts);
    if (!defined_tables_.insert(name).second) fail("table [" + name + "] defined twice");
    return descend(root, parts, parts.size());
  }

  void parse_key_value(json& table) {
    const auto parts = parse_key_path();
    skip_ws();
    if (peek() != '=') fail("expected '=' after key '" + joined(parts) + "'");
    get();
    skip_ws();
    json value = parse_value();
    json& parent = descend(table, parts, parts.size() - 1);
    if (parent.contains(parts.back())) fail("duplicate key '" + joined(parts) + "'");
    parent[parts.back()] = std::move(value);
  }

  json parse_value() {
    const char c = peek();
    if (c == '"') return parse_basic_string();
    if (c == '\'') return parse_literal_string();
    if (c == '[') return parse_array();
    if (c == '{') fail("inline tables are not supported");
    if (s_.substr(pos_, 4) == "true" && !bare_key_char(peek(4))) {
      pos_ += 4;
      return true;
    }
    if (s_.substr(pos_, 5) == "false" && !bare_key_char(peek(5))) {
      pos_ += 5;
      return false;
    }
    return parse_number();
  }

  json parse_array() {
    get();  // '['
    json arr = json::array();
    while (true) {
      skip_blank_lines();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        get();
        return arr;
      }
      arr.push_back(parse_value());
      skip_blank_lines();
      if (peek() == ',') {
        get();
      } else if (peek() == ']') {
        get();
        return arr;
      } else {
        fail("expected ',' or ']' in array");
      }
    }
  }

  json parse_number() {
    std::string tok;
    while (!eof()) {
      const char c = peek();
      if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ',' || c == ']' || c == '#') break;
      tok.push_back(get());
    }
    if (tok.empty()) fail("expected a value");
    std::string clean;
    for (std::size_t i = 0; i < tok.size(); ++i) {
      if (tok[i] == '_') {
        if (i == 0 || i + 1 == tok.size()) fail("misplaced '_' in number '" + tok + "'");
        continue;
      }
      clean.push_back(tok[i]);
    }
    std::string_view body = clean;
    if (!body.empty() && (body.front() == '+' || body.front() == '-')) body.remove_prefix(1);
    if (body == "inf") return clean.front() == '-' ? -HUGE_VAL : HUGE_VAL;
    if (body == "nan") return std::nan("");
    if (body.empty() || !std::isdigit(static_cast<unsigned char>(body.front())) ||
        (body.size() > 1 && body[0] == '0' && std::isdigit(static_cast<unsigned char>(body[1]))) ||
        body.find_first_of("xXpP") != std::string_view::npos) {
      fail("invalid value '" + tok + "'");
    }

    const bool is_float = clean.find_first_of(".eE") != std::string::npos;
    errno = 0;
    char* end = nullptr;
    if (is_float) {
      const double v = std::strtod(clean.c_str(), &end);
      if (end != clean.c_str() + clean.size() || errno != 0) fail("invalid number '" + tok + "'");
      return v;
    }
    if (clean.front() != '-') {
      const unsigned long long u = std::strtoull(clean.c_str(), &end, 10);
      if (end != clean.c_str() + clean.size() || errno != 0) fail("invalid value '" + tok + "'");
      if (u <= static_cast<unsigned long long>(INT64_MAX)) return static_cast<std::int64_t>(u);
      return static_cast<std::uint64_t>(u);
    }
    const long long v = std::strtoll(clean.c_str(), &end, 10);
    if (end != clean.c_str() + clean.size() || errno != 0) fail("invalid value '" + tok + "'");
    return static_cast<std::int64_t>(v);
  }

  static void append_utf8(std::string& out, unsigned long cp) {
    if (cp < 0x80) {
      out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
      out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
      out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
      out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
      out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
  }

  std::string parse_basic_string() {
    get();  // '"'
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '"') return out;
      if (c != '\\') {
        out.push_back(c);
        continue;
      }
      if (eof()) fail("unterminated escape");
      const char e = get();
      switch (e) {
        case '"': out.push_back('"'); break;
        case '\\': out.push_back('\\'); break;
        case 'n': out.push_back('\n'); break;
        case 't': out.push_back('\t'); break;
        case 'r': out.push_back('\r'); break;
        case 'b': out.push_back('\b'); break;
        case 'f': out.push_back('\f'); break;
        case 'u':
        case 'U': {
          const std::size_t len = e == 'u' ? 4 : 8;
          if (pos_ + len > s_.size()) fail("truncated unicode escape");
          const std::string hex(s_.substr(pos_, len));
          pos_ += len;
          char* end = nullptr;
          const unsigned long cp = std::strtoul(hex.c_str(), &end, 16);
          if (end != hex.c_str() + hex.size()) fail("bad unicode escape");
          append_utf8(out, cp);
          break;
        }
        default: fail(std::string("unknown escape '\\") + e + "'");
      }
    }
  }

  std::string parse_literal_string() {
    get();  // '\''
    std::string out;
    while (true) {
      if (eof() || peek() == '\n') fail("unterminated string");
      const char c = get();
      if (c == '\'') return out;
      out.push_back(c);
    }
  }
};

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  return out + "\"";
}

std::string key_text(const std::string& k) {
  const bool bare = !k.empty() && k.find_first_not_of(
                                      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789_-") ==
                                      std::string::npos;
  return bare ? k : quote(k);
}

std::string scalar_text(const json& v) {
  if (v.is_string()) return quote(v.get<std::string>());
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    auto t = io::format_double(d);
    if (t.find_first_of(".eE") == std::string::npos) t += ".0";
    return t;
  }
  if (v.is_array()) {
    std::string out = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (v[i].is_object()) throw Error(ErrorCode::InvalidParameter, "arrays of tables cannot be written");
      out += (i ? ", " : "") + scalar_text(v[i]);
    }
    return out + "]";
  }
  throw Error(ErrorCode::InvalidParameter, "value cannot be written as TOML");
}

void dump_table(const json& table, const std::string& prefix, std::string& out) {
  for (const auto& [k, v] : table.items()) {
    if (v.is_null()) continue;
    if (!v.is_object()) out += key_text(k) + " = " + scalar_text(v) + "\n";
  }
  for (const auto& [k, v] : table.items()) {
    if (!v.is_object()) continue;
    const auto name = prefix.empty() ? key_text(k) : prefix + "." + key_text(k);
    if (!out.empty()) out += "\n";
    out += "[" + name + "]\n";
    dump_table(v, name, out);
  }
}

}  // namespace

nlohmann::json parse(std::string_view text) { return Parser(text).run(); }

std::string dump(const nlohmann::json& doc) {
  if (!doc.is_object()) throw Error(ErrorCode::InvalidParameter, "TOML document must be a table");
  std::string out;
  dump_table(doc, "", out);
  return out;
}

}  // namespace stochnet::toml
