#include "plate/config.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "plate/grid.hpp"

namespace plate {

namespace {
std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}
}  // namespace

Config Config::parse_string(const std::string& text) {
  Config c;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"')
      value = value.substr(1, value.size() - 2);
    if (key.empty()) throw ConfigError("config line " +
                                       std::to_string(lineno) + ": empty key");
    c.kv_[key] = value;
  }
  return c;
}

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_string(ss.str());
}

bool Config::has(const std::string& key) const { return kv_.count(key) > 0; }

std::string Config::get(const std::string& key) const {
  auto it = kv_.find(key);
  if (it == kv_.end()) throw ConfigError("missing config key: " + key);
  return it->second;
}

std::string Config::get(const std::string& key,
                        const std::string& fallback) const {
  auto it = kv_.find(key);
  return it == kv_.end() ? fallback : it->second;
}

double Config::number(const std::string& key) const {
  const std::string v = get(key);
  try {
    size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("config key " + key + ": not a number: " + v);
  }
}

double Config::number(const std::string& key, double fallback) const {
  return has(key) ? number(key) : fallback;
}

int Config::integer(const std::string& key, int fallback) const {
  if (!has(key)) return fallback;
  const double d = number(key);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw ConfigError("config key " + key + ": not an integer");
  return i;
}

std::vector<double> Config::number_list(const std::string& key) const {
  const std::string v = get(key);
  std::vector<double> out;
  std::istringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    try {
      size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("config key " + key + ": bad list element: " + item);
    }
  }
  if (out.empty()) throw ConfigError("config key " + key + ": empty list");
  return out;
}

// ---------------------------------------------------------------------------
// recursive-descent expression evaluator
namespace {

struct ExprParser {
  const std::string& s;
  size_t pos = 0;
  double x1, x2;

  void skip() {
    while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
      ++pos;
  }
  bool eat(char c) {
    skip();
    if (pos < s.size() && s[pos] == c) {
      ++pos;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& what) {
    throw ConfigError("expression error at position " + std::to_string(pos) +
                      " in '" + s + "': " + what);
  }

  double parse() {
    const double v = sum();
    skip();
    if (pos != s.size()) fail("trailing input");
    return v;
  }
  double sum() {
    double v = product();
    for (;;) {
      if (eat('+')) v += product();
      else if (eat('-')) v -= product();
      else return v;
    }
  }
  double product() {
    double v = unary();
    for (;;) {
      if (eat('*')) v *= unary();
      else if (eat('/')) v /= unary();
      else return v;
    }
  }
  // exponent binds tighter than unary minus: -x^2 is -(x^2); the exponent
  // itself recurses through unary, making ^ right associative
  double unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return power();
  }
  double power() {
    const double base = atom();
    if (eat('^')) return std::pow(base, unary());
    return base;
  }
  double atom() {
    skip();
    if (pos >= s.size()) fail("unexpected end");
    const char c = s[pos];
    if (c == '(') {
      ++pos;
      const double v = sum();
      if (!eat(')')) fail("expected )");
      return v;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      size_t used = 0;
      double v;
      try {
        v = std::stod(s.substr(pos), &used);
      } catch (const std::exception&) {
        fail("bad number");
      }
      pos += used;
      return v;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      size_t end = pos;
      while (end < s.size() &&
             (std::isalnum(static_cast<unsigned char>(s[end])) ||
              s[end] == '_'))
        ++end;
      const std::string name = s.substr(pos, end - pos);
      pos = end;
      if (name == "x1") return x1;
      if (name == "x2") return x2;
      if (name == "pi") return M_PI;
      if (!eat('(')) fail("unknown variable: " + name);
      const double arg = sum();
      if (!eat(')')) fail("expected ) after " + name);
      if (name == "sin") return std::sin(arg);
      if (name == "cos") return std::cos(arg);
      if (name == "exp") return std::exp(arg);
      if (name == "sqrt") return std::sqrt(arg);
      if (name == "abs") return std::abs(arg);
      fail("unknown function: " + name);
    }
    fail(std::string("unexpected character '") + c + "'");
  }
};

}  // namespace

double eval_expression(const std::string& expr, double x1, double x2) {
  ExprParser p{expr, 0, x1, x2};
  return p.parse();
}

ScalarField eval_on_grid(const std::string& expr, const Grid& grid) {
  ScalarField f(grid.nodes());
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      f.v[grid.node(i, j)] = eval_expression(expr, grid.x(i), grid.y(j));
  return f;
}

}  // namespace plate
