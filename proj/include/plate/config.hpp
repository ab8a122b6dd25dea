#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plate/fields.hpp"

namespace plate {

class Grid;

/// Flat key = value configuration file ('#' starts a comment).  Typed
/// accessors throw ConfigError with the offending key in the message.
class Config {
 public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text);

  bool has(const std::string& key) const;
  std::string get(const std::string& key) const;
  std::string get(const std::string& key, const std::string& fallback) const;
  double number(const std::string& key) const;
  double number(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  std::vector<double> number_list(const std::string& key) const;

  const std::map<std::string, std::string>& entries() const { return kv_; }

 private:
  std::map<std::string, std::string> kv_;
};

/// Evaluate a small arithmetic expression in the variables x1, x2:
/// numbers, + - * / ^, parentheses, unary minus, and the functions
/// sin cos exp sqrt abs.  Throws ConfigError on malformed input.
double eval_expression(const std::string& expr, double x1, double x2);

/// Evaluate an expression at every grid node.
ScalarField eval_on_grid(const std::string& expr, const Grid& grid);

}  // namespace plate
