#ifndef WRELAY_CLI_TOML_HPP
#define WRELAY_CLI_TOML_HPP

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace wrelay::toml {

// Syntax error with a 1-based line number.
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct Value;
using Array = std::vector<Value>;

// Scalars and arrays. Integers and floats stay distinct so that "3" and
// "3.0" round-trip as written.
struct Value {
  std::variant<std::string, std::int64_t, double, bool, Array> v;

  bool is_string() const { return std::holds_alternative<std::string>(v); }
  bool is_integer() const { return std::holds_alternative<std::int64_t>(v); }
  bool is_float() const { return std::holds_alternative<double>(v); }
  bool is_number() const { return is_integer() || is_float(); }
  bool is_bool() const { return std::holds_alternative<bool>(v); }
  bool is_array() const { return std::holds_alternative<Array>(v); }

  const std::string& as_string() const { return std::get<std::string>(v); }
  std::int64_t as_integer() const { return std::get<std::int64_t>(v); }
  double as_number() const { return is_integer() ? static_cast<double>(as_integer()) : std::get<double>(v); }
  bool as_bool() const { return std::get<bool>(v); }
  const Array& as_array() const { return std::get<Array>(v); }

  bool operator==(const Value&) const = default;
};

struct Table {
  std::map<std::string, Value> values;
  std::map<std::string, Table> tables;
  std::map<std::string, std::vector<Table>> arrays;  // [[name]]

  bool empty() const { return values.empty() && tables.empty() && arrays.empty(); }
  bool operator==(const Table&) const = default;
};

// Parses the subset used by scenario files: comments, [table],
// [[array.of.tables]], bare or dotted keys, basic "strings", integers,
// floats, booleans and single-line arrays of those.
Table parse(const std::string& text);

// Writes a table back in the same subset; parse(dump(t)) == t.
std::string dump(const Table& t);

// Deep merge: scalars in overlay replace those in base; sub-tables merge.
Table merge(const Table& base, const Table& overlay);

}  // namespace wrelay::toml

#endif  // WRELAY_CLI_TOML_HPP
