#include "handsoff_app/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace handsoff::app {
namespace {

using nlohmann::json;

class FieldReader {
 public:
  FieldReader(const std::string& text, std::string origin)
      : text_(text), origin_(std::move(origin)) {}

  [[noreturn]] void fail(const std::string& path, const std::string& what) const {
    std::string where = origin_;
    const std::string key = path.substr(path.find_last_of('.') + 1);
    if (auto line = line_of_key(key)) where += ":" + std::to_string(*line);
    throw ConfigError(where + ": field '" + path + "': " + what);
  }

  double number(const json& v, const std::string& path) const {
    if (!v.is_number()) fail(path, "expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(path, "expected a finite number");
    return d;
  }

  std::vector<double> numbers(const json& v, const std::string& path) const {
    if (!v.is_array()) fail(path, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      out.push_back(number(v[i], path + "[" + std::to_string(i) + "]"));
    }
    return out;
  }

  Matrix matrix(const json& v, const std::string& path) const {
    if (!v.is_array() || v.empty()) fail(path, "expected a non-empty list of rows");
    std::vector<double> entries;
    std::size_t cols = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::vector<double> row = numbers(v[i], path + "[" + std::to_string(i) + "]");
      if (i == 0) cols = row.size();
      if (row.empty() || row.size() != cols) {
        fail(path, "row " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                       " entries, expected " + std::to_string(cols));
      }
      entries.insert(entries.end(), row.begin(), row.end());
    }
    return Matrix(v.size(), cols, std::move(entries));
  }

  const json& member(const json& obj, const std::string& key, const std::string& path) const {
    if (!obj.contains(key)) fail(path + "." + key, "missing");
    return obj.at(key);
  }

  void only_keys(const json& obj, const std::set<std::string>& allowed,
                 const std::string& path) const {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!allowed.contains(it.key())) {
        fail(path.empty() ? it.key() : path + "." + it.key(), "unknown key");
      }
    }
  }

 private:
  std::optional<std::size_t> line_of_key(const std::string& key) const {
    const std::size_t bracket = key.find('[');
    const std::string quoted = "\"" + key.substr(0, bracket) + "\"";
    const std::size_t pos = text_.find(quoted);
    if (pos == std::string::npos) return std::nullopt;
    return 1 + static_cast<std::size_t>(std::count(text_.begin(), text_.begin() + pos, '\n'));
  }

  const std::string& text_;
  std::string origin_;
};

}  // namespace

BoundaryProblem RunConfig::problem(double horizon) const {
  BoundaryProblem bp{LtiSystem(a, b), x0, xf, horizon, steps_per_unit_time};
  return bp;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const std::size_t byte = std::min<std::size_t>(e.byte, text.size());
    const std::size_t cut = byte == 0 ? 0 : byte - 1;
    const auto line = 1 + std::count(text.begin(), text.begin() + cut, '\n');
    const std::size_t nl = text.rfind('\n', cut == 0 ? 0 : cut - 1);
    const std::size_t col = nl == std::string::npos ? cut + 1 : cut - nl;
    throw ConfigError(origin + ":" + std::to_string(line) + ":" + std::to_string(col) +
                      ": syntax error: " + e.what());
  }

  const FieldReader r(text, origin);
  if (!root.is_object()) throw ConfigError(origin + ": top level must be an object");
  r.only_keys(root,
              {"system", "endpoints", "horizons", "steps_per_unit_time", "epsilons",
               "support_threshold", "output_dir"},
              "");

  RunConfig cfg;
  const json& sys = r.member(root, "system", "");
  if (!sys.is_object()) r.fail("system", "expected an object");
  r.only_keys(sys, {"a", "b"}, "system");
  cfg.a = r.matrix(r.member(sys, "a", "system"), "system.a");
  cfg.b = r.matrix(r.member(sys, "b", "system"), "system.b");
  if (!cfg.a.is_square()) r.fail("system.a", "must be square");
  if (cfg.b.rows() != cfg.a.rows()) {
    r.fail("system.b", "has " + std::to_string(cfg.b.rows()) + " rows, A has " +
                           std::to_string(cfg.a.rows()));
  }

  const json& ends = r.member(root, "endpoints", "");
  if (!ends.is_object()) r.fail("endpoints", "expected an object");
  r.only_keys(ends, {"x0", "xf"}, "endpoints");
  for (const char* key : {"x0", "xf"}) {
    const std::string path = std::string("endpoints.") + key;
    std::vector<double> v = r.numbers(r.member(ends, key, "endpoints"), path);
    if (v.size() != cfg.a.rows()) {
      r.fail(path, "has length " + std::to_string(v.size()) + ", expected " +
                       std::to_string(cfg.a.rows()));
    }
    (key[1] == '0' ? cfg.x0 : cfg.xf) = Vector(std::move(v));
  }

  cfg.horizons = r.numbers(r.member(root, "horizons", ""), "horizons");
  if (cfg.horizons.empty()) r.fail("horizons", "needs at least one value");
  for (std::size_t i = 0; i < cfg.horizons.size(); ++i) {
    if (cfg.horizons[i] <= 0.0) r.fail("horizons", "values must be positive");
    if (i > 0 && cfg.horizons[i] <= cfg.horizons[i - 1]) {
      r.fail("horizons", "values must be strictly ascending");
    }
  }

  if (root.contains("steps_per_unit_time")) {
    const json& v = root.at("steps_per_unit_time");
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 1'000'000) {
      r.fail("steps_per_unit_time", "expected an integer in [1, 1000000]");
    }
    cfg.steps_per_unit_time = v.get<int>();
  }
  if (root.contains("epsilons")) {
    cfg.epsilons = r.numbers(root.at("epsilons"), "epsilons");
    if (cfg.epsilons.empty()) r.fail("epsilons", "needs at least one value");
    for (double e : cfg.epsilons) {
      if (e <= 0.0) r.fail("epsilons", "values must be positive");
    }
  }
  if (root.contains("support_threshold")) {
    cfg.support_threshold = r.number(root.at("support_threshold"), "support_threshold");
    if (cfg.support_threshold < 0.0) r.fail("support_threshold", "must be nonnegative");
  }
  if (root.contains("output_dir")) {
    const json& v = root.at("output_dir");
    if (!v.is_string() || v.get<std::string>().empty()) {
      r.fail("output_dir", "expected a non-empty string");
    }
    cfg.output_dir = v.get<std::string>();
  }
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path.string());
}

RunConfig reference_config() {
  RunConfig cfg;
  cfg.a = Matrix{{1.0, 1.0}, {0.0, -1.0}};
  cfg.b = Matrix{{1.0}, {1.0}};
  cfg.x0 = Vector{1.0, -2.0};
  cfg.xf = Vector{1.0, 0.0};
  cfg.horizons = {2.0, 4.0, 8.0, 16.0, 32.0};
  cfg.output_dir = "handsoff_reproduce";
  return cfg;
}

std::string to_json(const RunConfig& cfg) {
  auto rows = [](const Matrix& m) {
    json out = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
      json row = json::array();
      for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      out.push_back(row);
    }
    return out;
  };
  auto list = [](const Vector& v) { return json(std::vector<double>(v.begin(), v.end())); };
  json root;
  root["system"] = {{"a", rows(cfg.a)}, {"b", rows(cfg.b)}};
  root["endpoints"] = {{"x0", list(cfg.x0)}, {"xf", list(cfg.xf)}};
  root["horizons"] = cfg.horizons;
  root["steps_per_unit_time"] = cfg.steps_per_unit_time;
  root["epsilons"] = cfg.epsilons;
  root["support_threshold"] = cfg.support_threshold;
  root["output_dir"] = cfg.output_dir.string();
  return root.dump(2) + "\n";
}

}  // namespace handsoff::app
