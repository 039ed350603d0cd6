#include "ranemu/scenario.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "ranemu/errors.hpp"

namespace ranemu::scenario {

std::string interface_name(Interface i) {
  switch (i) {
    case Interface::kUu: return "Uu";
    case Interface::kF1U: return "F1-U";
    case Interface::kF1C: return "F1-C";
    case Interface::kE1: return "E1";
    case Interface::kN3: return "N3";
  }
  return "?";
}

std::string interface_key(Interface i) {
  switch (i) {
    case Interface::kUu: return "uu";
    case Interface::kF1U: return "f1u";
    case Interface::kF1C: return "f1c";
    case Interface::kE1: return "e1";
    case Interface::kN3: return "n3";
  }
  return "?";
}

Interface interface_from_key(const std::string& key) {
  for (Interface i : kAllInterfaces)
    if (interface_key(i) == key || interface_name(i) == key) return i;
  throw ConfigError("unknown interface '" + key + "'");
}

std::string to_string(Mode mode) {
  return mode == Mode::kMonolithic ? "monolithic" : "disaggregated";
}

std::string to_string(Experiment experiment) {
  switch (experiment) {
    case Experiment::kUpEcho: return "up-echo";
    case Experiment::kCpProcedures: return "cp-procedures";
    case Experiment::kBench: return "bench";
  }
  return "?";
}

bool suite_valid_for_interface(Interface i, SuiteId suite) {
  const auto& s = suite_by_id(suite);
  switch (i) {
    case Interface::kUu:
      return suite == SuiteId::kUuNia2Nea2;
    case Interface::kF1U:
    case Interface::kN3:
      return s.is_esp();  // IPsec only
    case Interface::kF1C:
    case Interface::kE1:
      return s.is_esp() || suite == SuiteId::kDtlsGcm128;
  }
  return false;
}

const LinkConfig& ScenarioConfig::link(Interface i) const {
  static const LinkConfig unset;
  auto it = links.find(i);
  return it == links.end() ? unset : it->second;
}

bool ScenarioConfig::link_secured(Interface i) const {
  return link(i).suite.has_value();
}

uint32_t ScenarioConfig::resolved_repetitions() const {
  if (repetitions) return *repetitions;
  return experiment == Experiment::kCpProcedures ? 1000 : 20000;
}

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

const std::vector<std::string>& scalar_keys() {
  static const std::vector<std::string> keys = {
      "schema_version", "id",           "experiment",
      "mode",           "transport",    "seed",
      "repetitions",    "payload_size", "warmup",
      "threaded",       "bench.sizes",  "bench.repetitions_per_size",
      "bench.suites",
  };
  return keys;
}

const std::vector<std::string>& link_subkeys() {
  static const std::vector<std::string> keys = {
      "suite", "key", "added_delay_us", "udp_port_a", "udp_port_b"};
  return keys;
}

uint64_t parse_uint(const std::string& key, const std::string& value,
                    uint64_t max) {
  try {
    size_t pos = 0;
    unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument("trailing chars");
    if (v > max) throw std::out_of_range("too large");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("field '" + key + "': invalid unsigned value '" + value +
                      "'");
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("field '" + key + "': invalid boolean '" + value + "'");
}

std::vector<std::string> split_csv(const std::string& value) {
  std::vector<std::string> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

void apply_one(ScenarioConfig& cfg, const std::string& key,
               const std::string& value, bool& saw_schema) {
  if (key == "schema_version") {
    if (parse_uint(key, value, 1000) != 1)
      throw ConfigError("unsupported schema_version '" + value + "'");
    saw_schema = true;
    return;
  }
  if (key == "id") {
    cfg.id = value;
    return;
  }
  if (key == "experiment") {
    if (value == "up-echo") cfg.experiment = Experiment::kUpEcho;
    else if (value == "cp-procedures") cfg.experiment = Experiment::kCpProcedures;
    else if (value == "bench") cfg.experiment = Experiment::kBench;
    else throw ConfigError("field 'experiment': unknown value '" + value + "'");
    return;
  }
  if (key == "mode") {
    if (value == "monolithic") cfg.mode = Mode::kMonolithic;
    else if (value == "disaggregated") cfg.mode = Mode::kDisaggregated;
    else throw ConfigError("field 'mode': unknown value '" + value + "'");
    return;
  }
  if (key == "transport") {
    cfg.transport = transport::transport_kind_from_string(value);
    return;
  }
  if (key == "seed") {
    cfg.seed = parse_uint(key, value, UINT64_MAX);
    return;
  }
  if (key == "repetitions") {
    cfg.repetitions = static_cast<uint32_t>(parse_uint(key, value, 100000000));
    return;
  }
  if (key == "payload_size") {
    cfg.payload_size = static_cast<uint32_t>(parse_uint(key, value, 65535));
    return;
  }
  if (key == "warmup") {
    cfg.warmup = static_cast<uint32_t>(parse_uint(key, value, 10000000));
    return;
  }
  if (key == "threaded") {
    cfg.threaded = parse_bool(key, value);
    return;
  }
  if (key == "bench.sizes") {
    cfg.bench.sizes.clear();
    for (const auto& item : split_csv(value))
      cfg.bench.sizes.push_back(parse_uint(key, item, 1ull << 40));
    return;
  }
  if (key == "bench.repetitions_per_size") {
    cfg.bench.repetitions_per_size =
        static_cast<uint32_t>(parse_uint(key, value, 1000000));
    return;
  }
  if (key == "bench.suites") {
    cfg.bench.suites = split_csv(value);
    for (const auto& name : cfg.bench.suites) suite_by_name(name);
    return;
  }

  if (key.rfind("link.", 0) == 0) {
    std::string rest = key.substr(5);
    size_t dot = rest.find('.');
    if (dot == std::string::npos)
      throw ConfigError("unknown field '" + key + "'");
    Interface iface = interface_from_key(rest.substr(0, dot));
    std::string sub = rest.substr(dot + 1);
    LinkConfig& link = cfg.links[iface];
    if (sub == "suite") {
      if (value == "none" || value.empty()) {
        link.suite.reset();
      } else {
        link.suite = suite_by_name(value).id;
      }
      return;
    }
    if (sub == "key") {
      link.key_material = from_hex(value);
      return;
    }
    if (sub == "added_delay_us") {
      link.added_delay =
          std::chrono::microseconds(parse_uint(key, value, 10000000));
      return;
    }
    if (sub == "udp_port_a") {
      link.udp_port_a = static_cast<uint16_t>(parse_uint(key, value, 65535));
      return;
    }
    if (sub == "udp_port_b") {
      link.udp_port_b = static_cast<uint16_t>(parse_uint(key, value, 65535));
      return;
    }
    throw ConfigError("unknown field '" + key + "'");
  }
  throw ConfigError("unknown field '" + key + "'");
}

}  // namespace

KeyValues parse_scenario_text(const std::string& text) {
  KeyValues out;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("scenario line " + std::to_string(lineno) +
                        ": expected 'key = value'");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError("scenario line " + std::to_string(lineno) +
                        ": empty key");
    out.emplace_back(key, value);
  }
  return out;
}

KeyValues parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_scenario_text(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

const std::vector<std::string>& known_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> all = scalar_keys();
    for (Interface i : kAllInterfaces)
      for (const auto& sub : link_subkeys())
        all.push_back("link." + interface_key(i) + "." + sub);
    return all;
  }();
  return keys;
}

std::string env_var_for_key(const std::string& key) {
  std::string var = "RANEMU_";
  for (char c : key)
    var.push_back(c == '.' ? '_' : static_cast<char>(std::toupper(c)));
  return var;
}

KeyValues environment_overrides() {
  KeyValues out;
  for (const auto& key : known_keys()) {
    if (key == "schema_version") continue;
    if (const char* v = std::getenv(env_var_for_key(key).c_str()))
      out.emplace_back(key, v);
  }
  return out;
}

ScenarioConfig build_config(const KeyValues& file, const KeyValues& env,
                            const KeyValues& flags) {
  ScenarioConfig cfg;
  bool saw_schema = file.empty();  // schema field required only in files
  for (const auto* layer : {&file, &env, &flags})
    for (const auto& [key, value] : *layer)
      apply_one(cfg, key, value, saw_schema);
  if (!saw_schema)
    throw ConfigError("scenario file is missing 'schema_version = 1'");

  for (const auto& [iface, link] : cfg.links) {
    if (link.suite && !suite_valid_for_interface(iface, *link.suite))
      throw ConfigError("suite '" + suite_by_id(*link.suite).name +
                        "' is not valid on interface " +
                        interface_name(iface));
  }
  if (cfg.experiment == Experiment::kCpProcedures &&
      cfg.mode != Mode::kDisaggregated)
    throw ConfigError(
        "cp-procedures requires a disaggregated scenario (F1-C/E1 exist only "
        "there)");
  if (cfg.mode == Mode::kMonolithic) {
    for (Interface i : {Interface::kF1U, Interface::kF1C, Interface::kE1}) {
      if (cfg.link_secured(i))
        throw ConfigError("interface " + interface_name(i) +
                          " does not exist in a monolithic topology");
    }
  }
  return cfg;
}

std::string to_text(const ScenarioConfig& config) {
  std::ostringstream os;
  os << "schema_version = 1\n";
  os << "id = " << config.id << "\n";
  os << "experiment = " << to_string(config.experiment) << "\n";
  os << "mode = " << to_string(config.mode) << "\n";
  os << "transport = " << transport::to_string(config.transport) << "\n";
  os << "seed = " << config.seed << "\n";
  if (config.repetitions) os << "repetitions = " << *config.repetitions << "\n";
  os << "payload_size = " << config.payload_size << "\n";
  os << "warmup = " << config.warmup << "\n";
  os << "threaded = " << (config.threaded ? "true" : "false") << "\n";
  for (const auto& [iface, link] : config.links) {
    std::string prefix = "link." + interface_key(iface) + ".";
    os << prefix << "suite = "
       << (link.suite ? suite_by_id(*link.suite).name : std::string("none"))
       << "\n";
    if (link.added_delay.count() > 0)
      os << prefix << "added_delay_us = " << link.added_delay.count() << "\n";
    if (link.key_material)
      os << prefix << "key = " << to_hex(*link.key_material) << "\n";
  }
  return os.str();
}

}  // namespace ranemu::scenario
