#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ranemu/bytes.hpp"
#include "ranemu/suites.hpp"
#include "ranemu/transport.hpp"

namespace ranemu::scenario {

enum class Interface { kUu, kF1U, kF1C, kE1, kN3 };

inline constexpr Interface kAllInterfaces[] = {
    Interface::kUu, Interface::kF1U, Interface::kF1C, Interface::kE1,
    Interface::kN3};

std::string interface_name(Interface i);  // "Uu", "F1-U", "F1-C", "E1", "N3"
std::string interface_key(Interface i);   // "uu", "f1u", "f1c", "e1", "n3"
Interface interface_from_key(const std::string& key);

enum class Mode { kMonolithic, kDisaggregated };
enum class Experiment { kUpEcho, kCpProcedures, kBench };

std::string to_string(Mode mode);
std::string to_string(Experiment experiment);

// Table-1 style validity: which suites a given interface admits.
bool suite_valid_for_interface(Interface i, SuiteId suite);

struct LinkConfig {
  std::optional<SuiteId> suite;       // nullopt = unprotected
  std::chrono::microseconds added_delay{0};
  std::optional<Bytes> key_material;  // overrides seed-derived keys
  uint16_t udp_port_a = 0;
  uint16_t udp_port_b = 0;
};

struct BenchConfig {
  std::vector<size_t> sizes;                // empty = module default sweep
  uint32_t repetitions_per_size = 9;
  std::vector<std::string> suites;          // empty = all ESP suites + Uu
};

struct ScenarioConfig {
  std::string id = "scenario";
  Experiment experiment = Experiment::kUpEcho;
  Mode mode = Mode::kDisaggregated;
  transport::TransportKind transport = transport::TransportKind::kInProcess;
  uint64_t seed = 1;
  std::optional<uint32_t> repetitions;  // unset = experiment default
  uint32_t payload_size = 1024;
  uint32_t warmup = 100;
  bool threaded = false;  // deterministic single-threaded driver by default
  std::map<Interface, LinkConfig> links;
  BenchConfig bench;

  const LinkConfig& link(Interface i) const;
  bool link_secured(Interface i) const;
  uint32_t resolved_repetitions() const;  // 20000 UP / 1000 CP defaults
};

// Ordered key=value pairs from one configuration layer.
using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Parses the scenario text format: `key = value` lines, `#` comments,
// mandatory `schema_version = 1`. Unknown keys are rejected (fail-closed)
// at build time with the offending key named.
KeyValues parse_scenario_text(const std::string& text);
KeyValues parse_scenario_file(const std::string& path);

// Collects RANEMU_* environment overrides for every known key
// (e.g. link.f1u.suite -> RANEMU_LINK_F1U_SUITE).
KeyValues environment_overrides();
std::string env_var_for_key(const std::string& key);

// Applies layers in precedence order: file, then environment, then flags;
// later layers win. Validates types, ranges, and Table-1 suite/interface
// compatibility.
ScenarioConfig build_config(const KeyValues& file, const KeyValues& env,
                            const KeyValues& flags);

// All keys the format accepts, for help output and env scanning.
const std::vector<std::string>& known_keys();

// Serializes a config back to the text format (used for provenance dumps).
std::string to_text(const ScenarioConfig& config);

}  // namespace ranemu::scenario
