#include "cli/config_file.hpp"

#include <chorin/errors.hpp>
#include <chorin/report_io.hpp>

#include <boost/algorithm/string/trim.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <fstream>
#include <map>
#include <sstream>

namespace chorin::cli {

KeyValueConfig read_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path + "'");
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) {
    std::stringstream buf;
    buf << in.rdbuf();
    return config_from_json(buf.str());
  }

  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(in, tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw InvalidArgument("config file '" + path + "': " + e.what());
  }
  KeyValueConfig config;
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw InvalidArgument("config file '" + path + "': key '" + section + "' outside a section");
    for (const auto& [key, value] : body) config[section + "." + key] = value.get_value<std::string>();
  }
  return config;
}

KeyValueConfig parse_overrides(const std::vector<std::string>& items) {
  KeyValueConfig config;
  for (const auto& item : items) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || boost::algorithm::trim_copy(item.substr(0, eq)).empty()) throw InvalidArgument("override '" + item + "' is not key=value");
    config[boost::algorithm::trim_copy(item.substr(0, eq))] = boost::algorithm::trim_copy(item.substr(eq + 1));
  }
  return config;
}

std::string to_ini(const KeyValueConfig& config) {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [key, value] : config) {
    const auto dot = key.find('.');
    sections[key.substr(0, dot)].emplace_back(key.substr(dot + 1), value);
  }
  std::ostringstream out;
  for (const auto& [section, entries] : sections) {
    out << '[' << section << "]\n";
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
    out << '\n';
  }
  return out.str();
}

}  // namespace chorin::cli
