#include "resispike/config.hpp"

#include "resispike/error.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <set>

namespace resispike {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::string strip_comment(const std::string& s) {
  const auto p = s.find_first_of("#;");
  return p == std::string::npos ? s : s.substr(0, p);
}

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::ConfigError, where + ": " + what);
}

}  // namespace

bool ConfigFile::empty() const {
  if (!globals.entries.empty()) return false;
  return std::all_of(sections.begin(), sections.end(), [](const ConfigSection& s) { return s.entries.empty(); });
}

ConfigFile parse_config(std::istream& in, const std::string& source) {
  ConfigFile file;
  file.source = source;
  ConfigSection* current = &file.globals;
  std::set<std::string> names;
  std::string raw;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    if (!raw.empty() && raw.back() == '\r') raw.pop_back();
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::string at = source + ":" + std::to_string(lineno);
    if (line.front() == '[') {
      if (line.back() != ']') config_error(at, "unterminated section header");
      const std::string name = trim(line.substr(1, line.size() - 2));
      if (name.empty()) config_error(at, "empty section name");
      if (!names.insert(name).second) config_error(at, "duplicate section '" + name + "'");
      file.sections.push_back(ConfigSection{name, lineno, {}});
      current = &file.sections.back();
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) config_error(at, "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) config_error(at, "missing key");
    const std::string path = (current->name.empty() ? "" : current->name + ".") + key;
    if (current->entries.count(key)) config_error(at, "duplicate key '" + path + "'");
    current->entries[key] = ConfigEntry{value, lineno};
  }
  return file;
}

ConfigFile parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::InvalidArgument, "cannot open '" + path + "'");
  return parse_config(in, path);
}

const std::vector<std::string>& scenario_keys() {
  static const std::vector<std::string> keys = {
      "description", "family", "m",       "n_x",  "n_y",        "n",
      "rho",         "arma_ar", "arma_ma", "theta", "theta_x",   "theta_y",
      "u_x",         "u_y",     "replicates", "null_replicates", "seed", "alpha",
      "center",      "workers"};
  return keys;
}

namespace {

struct Field {
  std::string path;
  std::string value;
};

double to_double(const Field& f) {
  double v = 0.0;
  const char* b = f.value.data();
  const char* e = b + f.value.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) config_error(f.path, "expected a number, got '" + f.value + "'");
  return v;
}

std::uint64_t to_uint(const Field& f) {
  std::uint64_t v = 0;
  const char* b = f.value.data();
  const char* e = b + f.value.size();
  const auto [p, ec] = std::from_chars(b, e, v);
  if (ec != std::errc() || p != e) config_error(f.path, "expected a nonnegative integer, got '" + f.value + "'");
  return v;
}

bool to_bool(const Field& f) {
  if (f.value == "true" || f.value == "1" || f.value == "yes") return true;
  if (f.value == "false" || f.value == "0" || f.value == "no") return false;
  config_error(f.path, "expected true or false, got '" + f.value + "'");
}

std::array<double, 2> to_pair(const Field& f) {
  const auto comma = f.value.find(',');
  if (comma == std::string::npos) config_error(f.path, "expected two comma-separated numbers");
  return {to_double({f.path, trim(f.value.substr(0, comma))}), to_double({f.path, trim(f.value.substr(comma + 1))})};
}

void apply(ScenarioConfig& c, const std::string& key, const Field& f) {
  if (key == "description") return;
  if (key == "family") {
    try {
      c.family = family_from_string(f.value);
    } catch (const Error& e) {
      config_error(f.path, e.what());
    }
  } else if (key == "m") {
    c.m = to_uint(f);
  } else if (key == "n") {
    c.n_x = c.n_y = to_uint(f);
  } else if (key == "n_x") {
    c.n_x = to_uint(f);
  } else if (key == "n_y") {
    c.n_y = to_uint(f);
  } else if (key == "rho") {
    c.rho = to_double(f);
  } else if (key == "arma_ar") {
    c.arma_ar = to_pair(f);
  } else if (key == "arma_ma") {
    c.arma_ma = to_pair(f);
  } else if (key == "theta") {
    c.theta_x = c.theta_y = to_double(f);
  } else if (key == "theta_x") {
    c.theta_x = to_double(f);
  } else if (key == "theta_y") {
    c.theta_y = to_double(f);
  } else if (key == "u_x" || key == "u_y") {
    const auto v = to_uint(f);
    if (v == 0) config_error(f.path, "spike index is 1-based");
    (key == "u_x" ? c.u_x : c.u_y) = std::size_t(v - 1);
  } else if (key == "replicates") {
    c.replicates = to_uint(f);
  } else if (key == "null_replicates") {
    c.null_replicates = to_uint(f);
  } else if (key == "seed") {
    c.seed = to_uint(f);
  } else if (key == "alpha") {
    c.alpha = to_double(f);
  } else if (key == "center") {
    c.center = to_bool(f);
  } else if (key == "workers") {
    c.workers = unsigned(to_uint(f));
  } else {
    config_error(f.path, "unknown key");
  }
}

// "theta" and "n" set two fields; apply them before the specific keys so
// that theta_x/n_x can refine them regardless of file order.
int key_rank(const std::string& k) { return (k == "theta" || k == "n") ? 0 : 1; }

void apply_section(ScenarioConfig& c, const ConfigSection& s) {
  std::vector<std::pair<std::string, const ConfigEntry*>> items;
  for (const auto& [k, v] : s.entries) items.emplace_back(k, &v);
  std::stable_sort(items.begin(), items.end(),
                   [](const auto& a, const auto& b) { return key_rank(a.first) < key_rank(b.first); });
  for (const auto& [k, e] : items) {
    const std::string path = (s.name.empty() ? "" : s.name + ".") + k;
    apply(c, k, Field{path, e->value});
  }
}

}  // namespace

std::vector<ScenarioConfig> scenarios_from_config(const ConfigFile& file) {
  if (file.empty()) throw Error(ErrorCode::ConfigError, file.source + ": configuration is empty");
  ScenarioConfig base;
  base.name = "default";
  apply_section(base, file.globals);
  std::vector<ScenarioConfig> out;
  if (file.sections.empty()) {
    out.push_back(base);
  } else {
    for (const ConfigSection& s : file.sections) {
      ScenarioConfig c = base;
      c.name = s.name;
      apply_section(c, s);
      out.push_back(c);
    }
  }
  for (const ScenarioConfig& c : out) {
    try {
      validate(c);
    } catch (const Error& e) {
      throw Error(ErrorCode::ConfigError, (c.name == "default" ? std::string("globals") : c.name) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace resispike
