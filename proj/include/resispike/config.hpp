#pragma once

#include "resispike/simlab.hpp"

#include <cstddef>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace resispike {

// INI-style file: "key = value" lines, "[name]" section headers, '#' or ';'
// comments. Keys before the first header are global defaults.
struct ConfigEntry {
  std::string value;
  std::size_t line = 0;
};

struct ConfigSection {
  std::string name;  // empty for the global block
  std::size_t line = 0;
  std::map<std::string, ConfigEntry> entries;
};

struct ConfigFile {
  std::string source;
  ConfigSection globals;
  std::vector<ConfigSection> sections;

  bool empty() const;
};

ConfigFile parse_config(std::istream& in, const std::string& source = "<config>");
ConfigFile parse_config_file(const std::string& path);

// One scenario per section, each inheriting the globals; a file without
// sections yields a single scenario from the globals. u_x/u_y are 1-based in
// the file. Errors name the offending "section.key".
std::vector<ScenarioConfig> scenarios_from_config(const ConfigFile& file);

// Keys understood by scenarios_from_config.
const std::vector<std::string>& scenario_keys();

}  // namespace resispike
