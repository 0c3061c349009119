#include "wrelay/cli/toml.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace wrelay::toml {

namespace {

bool is_bare_key_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
}

class Parser {
 public:
  Parser(const std::string& text, int line) : s_(text), line_(line) {}

  void skip_ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t')) ++i_;
  }
  bool at_end_of_line() {
    skip_ws();
    return i_ >= s_.size() || s_[i_] == '#';
  }
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(line_, what); }

  std::vector<std::string> key_path() {
    std::vector<std::string> path;
    for (;;) {
      skip_ws();
      std::string k;
      if (i_ < s_.size() && s_[i_] == '"') {
        k = string_literal();
      } else {
        while (i_ < s_.size() && is_bare_key_char(s_[i_])) k += s_[i_++];
        if (k.empty()) fail("expected a key");
      }
      path.push_back(k);
      skip_ws();
      if (i_ < s_.size() && s_[i_] == '.') {
        ++i_;
        continue;
      }
      return path;
    }
  }

  void expect(char c) {
    skip_ws();
    if (i_ >= s_.size() || s_[i_] != c) fail(std::string("expected '") + c + "'");
    ++i_;
  }

  Value value() {
    skip_ws();
    if (i_ >= s_.size()) fail("missing value");
    const char c = s_[i_];
    if (c == '"') return Value{string_literal()};
    if (c == '[') return Value{array()};
    if (s_.compare(i_, 4, "true") == 0 && !continues(i_ + 4)) {
      i_ += 4;
      return Value{true};
    }
    if (s_.compare(i_, 5, "false") == 0 && !continues(i_ + 5)) {
      i_ += 5;
      return Value{false};
    }
    return number();
  }

 private:
  bool continues(std::size_t j) const { return j < s_.size() && is_bare_key_char(s_[j]); }

  std::string string_literal() {
    ++i_;  // opening quote
    std::string out;
    while (i_ < s_.size() && s_[i_] != '"') {
      char c = s_[i_++];
      if (c == '\\') {
        if (i_ >= s_.size()) fail("unterminated escape");
        const char e = s_[i_++];
        switch (e) {
          case '"': c = '"'; break;
          case '\\': c = '\\'; break;
          case 'n': c = '\n'; break;
          case 't': c = '\t'; break;
          default: fail(std::string("unsupported escape \\") + e);
        }
      }
      out += c;
    }
    if (i_ >= s_.size()) fail("unterminated string");
    ++i_;
    return out;
  }

  Array array() {
    ++i_;  // '['
    Array out;
    for (;;) {
      skip_ws();
      if (i_ >= s_.size()) fail("unterminated array");
      if (s_[i_] == ']') {
        ++i_;
        return out;
      }
      out.push_back(value());
      skip_ws();
      if (i_ < s_.size() && s_[i_] == ',') {
        ++i_;
      } else if (i_ < s_.size() && s_[i_] == ']') {
        ++i_;
        return out;
      } else {
        fail("expected ',' or ']' in array");
      }
    }
  }

  Value number() {
    std::size_t j = i_;
    while (j < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '+' ||
                             s_[j] == '-' || s_[j] == '.' || s_[j] == '_'))
      ++j;
    std::string tok;
    for (std::size_t k = i_; k < j; ++k)
      if (s_[k] != '_') tok += s_[k];
    if (tok.empty()) fail("expected a value");
    const char* b = tok.data();
    const char* e = tok.data() + tok.size();
    if (*b == '+') ++b;
    const bool looks_float = tok.find_first_of(".eE") != std::string::npos || tok == "inf" ||
                             tok == "-inf" || tok == "nan";
    if (!looks_float) {
      std::int64_t v = 0;
      const auto r = std::from_chars(b, e, v);
      if (r.ec == std::errc() && r.ptr == e) {
        i_ = j;
        return Value{v};
      }
    }
    double d = 0.0;
    const auto r = std::from_chars(b, e, d);
    if (r.ec != std::errc() || r.ptr != e) fail("invalid value '" + tok + "' (strings need quotes)");
    i_ = j;
    return Value{d};
  }

  const std::string& s_;
  std::size_t i_ = 0;
  int line_;
};

Table& descend(Table& root, const std::vector<std::string>& path, int line) {
  Table* t = &root;
  for (const auto& k : path) {
    if (t->values.count(k)) throw ParseError(line, "key '" + k + "' is already a value");
    auto it = t->arrays.find(k);
    if (it != t->arrays.end()) {
      t = &it->second.back();
    } else {
      t = &t->tables[k];
    }
  }
  return *t;
}

std::string fmt_double(double d) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  std::string s = buf;
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string key_text(const std::string& k) {
  if (k.empty()) return quote(k);
  for (char c : k)
    if (!is_bare_key_char(c)) return quote(k);
  return k;
}

std::string value_text(const Value& v) {
  if (v.is_string()) return quote(v.as_string());
  if (v.is_integer()) return std::to_string(v.as_integer());
  if (v.is_float()) return fmt_double(std::get<double>(v.v));
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  std::string out = "[";
  const auto& a = v.as_array();
  for (std::size_t i = 0; i < a.size(); ++i) out += (i ? ", " : "") + value_text(a[i]);
  return out + "]";
}

// Values of t and of its sub-tables, written as dotted keys.
void dump_inline(const Table& t, const std::string& prefix, std::ostringstream& os) {
  for (const auto& [k, v] : t.values) os << prefix << key_text(k) << " = " << value_text(v) << "\n";
  for (const auto& [k, sub] : t.tables) dump_inline(sub, prefix + key_text(k) + ".", os);
}

void dump_arrays(const Table& t, const std::string& path, std::ostringstream& os);

void dump_table(const Table& t, const std::string& path, std::ostringstream& os) {
  for (const auto& [k, sub] : t.tables) {
    const std::string p = path.empty() ? key_text(k) : path + "." + key_text(k);
    if (!sub.values.empty() || sub.empty()) {
      os << "\n[" << p << "]\n";
      for (const auto& [vk, v] : sub.values) os << key_text(vk) << " = " << value_text(v) << "\n";
    }
    dump_table(sub, p, os);
  }
  dump_arrays(t, path, os);
}

void dump_arrays(const Table& t, const std::string& path, std::ostringstream& os) {
  for (const auto& [k, list] : t.arrays) {
    const std::string p = path.empty() ? key_text(k) : path + "." + key_text(k);
    for (const auto& elem : list) {
      os << "\n[[" << p << "]]\n";
      dump_inline(elem, "", os);  // nested arrays inside an element are outside the subset
    }
  }
}

}  // namespace

Table parse(const std::string& text) {
  Table root;
  Table* current = &root;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    Parser p(line, lineno);
    if (p.at_end_of_line()) continue;
    std::size_t first = line.find_first_not_of(" \t");
    if (line[first] == '[') {
      const bool is_array = line.compare(first, 2, "[[") == 0;
      std::string inner = line.substr(first + (is_array ? 2 : 1));
      const std::string close = is_array ? "]]" : "]";
      const auto end = inner.find(close);
      if (end == std::string::npos) throw ParseError(lineno, "unterminated table header");
      std::string rest = inner.substr(end + close.size());
      Parser tail(rest, lineno);
      if (!tail.at_end_of_line()) throw ParseError(lineno, "unexpected text after table header");
      std::string name = inner.substr(0, end);
      Parser kp(name, lineno);
      auto path = kp.key_path();
      if (!kp.at_end_of_line()) throw ParseError(lineno, "invalid table name");
      const std::string last = path.back();
      path.pop_back();
      Table& parent = descend(root, path, lineno);
      if (parent.values.count(last)) throw ParseError(lineno, "key '" + last + "' is already a value");
      if (is_array) {
        if (parent.tables.count(last)) throw ParseError(lineno, "'" + last + "' is already a table");
        parent.arrays[last].emplace_back();
        current = &parent.arrays[last].back();
      } else {
        if (parent.arrays.count(last)) throw ParseError(lineno, "'" + last + "' is an array of tables");
        current = &parent.tables[last];
      }
      continue;
    }
    auto path = p.key_path();
    p.expect('=');
    Value v = p.value();
    if (!p.at_end_of_line()) throw ParseError(lineno, "unexpected text after value");
    const std::string last = path.back();
    path.pop_back();
    Table& target = descend(*current, path, lineno);
    if (target.values.count(last) || target.tables.count(last) || target.arrays.count(last))
      throw ParseError(lineno, "duplicate key '" + last + "'");
    target.values[last] = std::move(v);
  }
  return root;
}

std::string dump(const Table& t) {
  std::ostringstream os;
  for (const auto& [k, v] : t.values) os << key_text(k) << " = " << value_text(v) << "\n";
  dump_table(t, "", os);
  return os.str();
}

Table merge(const Table& base, const Table& overlay) {
  Table out = base;
  for (const auto& [k, v] : overlay.values) {
    out.tables.erase(k);
    out.values[k] = v;
  }
  for (const auto& [k, sub] : overlay.tables) {
    out.values.erase(k);
    out.tables[k] = merge(out.tables[k], sub);
  }
  for (const auto& [k, list] : overlay.arrays) out.arrays[k] = list;
  return out;
}

}  // namespace wrelay::toml
