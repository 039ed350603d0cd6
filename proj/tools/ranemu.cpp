// ranemu: build emulated monolithic/disaggregated 5G user planes with
// optional per-interface protection, run latency campaigns, and benchmark
// the cipher configurations.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "ranemu/bench.hpp"
#include "ranemu/crypto.hpp"
#include "ranemu/errors.hpp"
#include "ranemu/measure.hpp"
#include "ranemu/scenario.hpp"
#include "ranemu/stats.hpp"
#include "ranemu/topology.hpp"
#include "ranemu/wire.hpp"

using namespace ranemu;

namespace {

struct RunFlags {
  std::string scenario_path;
  std::string experiment;
  std::string mode;
  std::string transport;
  std::string secure;
  std::string id;
  int64_t repetitions = -1;
  int64_t payload_size = -1;
  int64_t warmup = -1;
  int64_t seed = -1;
  bool threaded = false;
  std::vector<std::string> sets;
  std::string out_path;
  std::string samples_path;
};

scenario::KeyValues flag_layer(const RunFlags& flags) {
  scenario::KeyValues kv;
  if (!flags.id.empty()) kv.emplace_back("id", flags.id);
  if (!flags.experiment.empty()) kv.emplace_back("experiment", flags.experiment);
  if (!flags.mode.empty()) kv.emplace_back("mode", flags.mode);
  if (!flags.transport.empty()) kv.emplace_back("transport", flags.transport);
  if (flags.repetitions >= 0)
    kv.emplace_back("repetitions", std::to_string(flags.repetitions));
  if (flags.payload_size >= 0)
    kv.emplace_back("payload_size", std::to_string(flags.payload_size));
  if (flags.warmup >= 0) kv.emplace_back("warmup", std::to_string(flags.warmup));
  if (flags.seed >= 0) kv.emplace_back("seed", std::to_string(flags.seed));
  if (flags.threaded) kv.emplace_back("threaded", "true");
  if (!flags.secure.empty()) {
    bool disagg = flags.mode != "monolithic";
    if (flags.secure == "none") {
      for (scenario::Interface i : scenario::kAllInterfaces)
        kv.emplace_back("link." + scenario::interface_key(i) + ".suite",
                        "none");
    } else if (flags.secure == "all") {
      // the user-plane-wide configuration: NIA2/NEA2 on Uu, AES-GCM-128 on
      // the IPsec interfaces
      kv.emplace_back("link.uu.suite", "NIA2-NEA2");
      if (disagg) kv.emplace_back("link.f1u.suite", "AES-GCM-128");
      kv.emplace_back("link.n3.suite", "AES-GCM-128");
    } else {
      throw ConfigError("--secure accepts 'all' or 'none'");
    }
  }
  for (const auto& set : flags.sets) {
    auto eq = set.find('=');
    if (eq == std::string::npos)
      throw ConfigError("--set expects key=value, got '" + set + "'");
    kv.emplace_back(set.substr(0, eq), set.substr(eq + 1));
  }
  return kv;
}

scenario::ScenarioConfig load_config(const RunFlags& flags) {
  scenario::KeyValues file;
  if (!flags.scenario_path.empty())
    file = scenario::parse_scenario_file(flags.scenario_path);
  return scenario::build_config(file, scenario::environment_overrides(),
                                flag_layer(flags));
}

class CsvSink {
 public:
  CsvSink(const std::string& path, const std::vector<std::string>& columns)
      : writer_(columns), path_(path) {
    if (path_.empty()) {
      std::cout << writer_.header();
      return;
    }
    if (std::filesystem::exists(path_)) {
      std::ifstream in(path_);
      std::stringstream buf;
      buf << in.rdbuf();
      auto existing = stats::parse_csv(buf.str());
      if (existing.columns == columns) {
        for (const auto& row : existing.rows)
          seen_ids_.insert(row.at(0));
        append_ = true;
      }
    }
    std::ofstream out(path_, append_ ? std::ios::app : std::ios::trunc);
    if (!append_) out << writer_.header();
  }

  bool already_done(const std::string& id) const {
    return seen_ids_.count(id) > 0;
  }

  void write(const std::vector<std::string>& row) {
    if (path_.empty()) {
      std::cout << writer_.row(row);
      return;
    }
    std::ofstream out(path_, std::ios::app);
    out << writer_.row(row);
    out.flush();
  }

 private:
  stats::CsvWriter writer_;
  std::string path_;
  std::set<std::string> seen_ids_;
  bool append_ = false;
};

void write_samples(const std::string& path, const std::vector<double>& us) {
  if (path.empty()) return;
  std::ofstream out(path);
  out << measure::raw_samples_text(us);
}

std::string secured_label(const scenario::ScenarioConfig& cfg) {
  std::string label;
  for (scenario::Interface i : scenario::kAllInterfaces) {
    if (!cfg.link_secured(i)) continue;
    if (!label.empty()) label += "+";
    label += scenario::interface_key(i) + ":" +
             suite_by_id(*cfg.link(i).suite).name;
  }
  return label.empty() ? "baseline" : label;
}

int cmd_run(const RunFlags& flags) {
  auto cfg = load_config(flags);
  if (cfg.experiment == scenario::Experiment::kUpEcho) {
    auto result = measure::run_up_experiment(cfg);
    CsvSink sink(flags.out_path, measure::summary_columns());
    sink.write(measure::summary_row(result, secured_label(cfg)));
    write_samples(flags.samples_path, result.raw_samples_us);
  } else if (cfg.experiment == scenario::Experiment::kCpProcedures) {
    auto result = measure::run_cp_experiment(cfg);
    CsvSink sink(flags.out_path, measure::summary_columns());
    auto ue = result.ue_context_setup;
    auto bearer = result.bearer_context_setup;
    ue.scenario_id += "/ue-context-setup";
    bearer.scenario_id += "/bearer-context-setup";
    sink.write(measure::summary_row(ue, secured_label(cfg)));
    sink.write(measure::summary_row(bearer, secured_label(cfg)));
    if (!flags.samples_path.empty()) {
      write_samples(flags.samples_path + ".ue", ue.raw_samples_us);
      write_samples(flags.samples_path + ".bearer", bearer.raw_samples_us);
    }
  } else {
    CsvSink sink(flags.out_path, bench::bench_columns());
    std::vector<std::string> names = cfg.bench.suites;
    if (names.empty()) {
      for (const auto& s : suite_catalog())
        if (s.is_esp() || s.id == SuiteId::kUuNia2Nea2)
          names.push_back(s.name);
    }
    std::vector<size_t> sizes =
        cfg.bench.sizes.empty() ? bench::default_sizes() : cfg.bench.sizes;
    for (const auto& name : names) {
      auto curve = bench::bench_suite(suite_by_name(name), sizes,
                                      cfg.bench.repetitions_per_size);
      for (const auto& row : bench::bench_rows(curve)) sink.write(row);
    }
  }
  return 0;
}

measure::ExperimentResult result_from_row(const stats::CsvTable& t,
                                          size_t row) {
  measure::ExperimentResult r;
  r.scenario_id = t.at(row, "scenario_id");
  std::string exp = t.at(row, "experiment");
  r.experiment = exp == "up-echo" ? scenario::Experiment::kUpEcho
                                  : scenario::Experiment::kCpProcedures;
  r.payload_size = static_cast<uint32_t>(std::stoul(t.at(row, "payload_bytes")));
  r.summary.n = std::stoul(t.at(row, "n"));
  r.summary.mean_us = std::stod(t.at(row, "mean_us"));
  r.summary.std_us = std::stod(t.at(row, "std_us"));
  r.summary.ci99_low_us = std::stod(t.at(row, "ci_low_us"));
  r.summary.ci99_high_us = std::stod(t.at(row, "ci_high_us"));
  r.ops_per_round_trip.esp_protect =
      std::stoull(t.at(row, "esp_ops")) / 2;
  r.ops_per_round_trip.esp_unprotect =
      std::stoull(t.at(row, "esp_ops")) - r.ops_per_round_trip.esp_protect;
  uint64_t total = std::stoull(t.at(row, "crypto_ops"));
  uint64_t esp = std::stoull(t.at(row, "esp_ops"));
  r.ops_per_round_trip.pdcp_mac = (total - esp) / 2;
  r.ops_per_round_trip.pdcp_cipher = total - esp -
                                     r.ops_per_round_trip.pdcp_mac;
  return r;
}

stats::CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open CSV '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return stats::parse_csv(buf.str());
}

int cmd_compare(const std::string& baseline_path,
                const std::string& secured_path) {
  auto baseline = read_csv_file(baseline_path);
  auto secured = read_csv_file(secured_path);
  if (baseline.rows.size() != secured.rows.size())
    throw ConfigError("CSV row counts differ; compare like campaigns");
  std::cout << std::left << std::setw(34) << "scenario" << std::right
            << std::setw(12) << "base_us" << std::setw(12) << "sec_us"
            << std::setw(12) << "delta_us" << std::setw(10) << "d_ops"
            << std::setw(10) << "d_esp" << std::setw(18) << "verdict"
            << "\n";
  for (size_t i = 0; i < baseline.rows.size(); ++i) {
    auto b = result_from_row(baseline, i);
    auto s = result_from_row(secured, i);
    auto report = measure::compare_scenarios(b, s);
    std::ostringstream name;
    name << b.scenario_id;
    if (s.scenario_id != b.scenario_id) name << "->" << s.scenario_id;
    std::cout << std::left << std::setw(34) << name.str() << std::right
              << std::fixed << std::setprecision(2) << std::setw(12)
              << b.summary.mean_us << std::setw(12) << s.summary.mean_us
              << std::setw(12) << report.delta_mean_us << std::setw(10)
              << report.delta_total_ops_per_rtt << std::setw(10)
              << report.delta_esp_ops_per_rtt << std::setw(18)
              << measure::to_string(report.verdict) << "\n";
  }
  return 0;
}

int cmd_matrix(const std::string& out_path, int64_t repetitions,
               uint64_t seed) {
  CsvSink sink(out_path, measure::summary_columns());
  auto run_row = [&](const std::string& id, const std::string& links,
                     bool cp, bool bearer_row) {
    if (sink.already_done(id)) {
      std::cerr << "skip " << id << " (already in output)\n";
      return;
    }
    std::ostringstream body;
    body << "id = " << id << "\nmode = disaggregated\nseed = " << seed << "\n"
         << (cp ? "experiment = cp-procedures\n" : "experiment = up-echo\n")
         << links;
    if (repetitions > 0) body << "repetitions = " << repetitions << "\n";
    auto cfg = scenario::build_config(
        scenario::parse_scenario_text("schema_version = 1\n" + body.str()),
        scenario::environment_overrides(), {});
    if (cp) {
      auto result = measure::run_cp_experiment(cfg);
      auto& row = bearer_row ? result.bearer_context_setup
                             : result.ue_context_setup;
      row.scenario_id = id;
      sink.write(measure::summary_row(row, secured_label(cfg)));
    } else {
      auto result = measure::run_up_experiment(cfg);
      result.scenario_id = id;
      sink.write(measure::summary_row(result, secured_label(cfg)));
    }
    std::cerr << "done " << id << "\n";
  };

  std::vector<std::string> esp_names;
  for (const auto& s : suite_catalog())
    if (s.is_esp()) esp_names.push_back(s.name);

  // F1-U: 6 ESP suites + baseline (user-plane echoes)
  run_row("f1u-baseline", "", false, false);
  for (const auto& name : esp_names)
    run_row("f1u-" + name, "link.f1u.suite = " + name + "\n", false, false);
  // F1-C: 6 ESP + DTLS + baseline (UE Context Setup timing)
  run_row("f1c-baseline", "", true, false);
  for (const auto& name : esp_names)
    run_row("f1c-" + name, "link.f1c.suite = " + name + "\n", true, false);
  run_row("f1c-DTLS-1.2-AES-GCM-128",
          "link.f1c.suite = DTLS-1.2-AES-GCM-128\n", true, false);
  // E1: 6 ESP + DTLS + baseline (Bearer Context Setup timing)
  run_row("e1-baseline", "", true, true);
  for (const auto& name : esp_names)
    run_row("e1-" + name, "link.e1.suite = " + name + "\n", true, true);
  run_row("e1-DTLS-1.2-AES-GCM-128", "link.e1.suite = DTLS-1.2-AES-GCM-128\n",
          true, true);
  return 0;
}

int cmd_bench(const std::vector<std::string>& suites,
              const std::vector<size_t>& sizes, uint32_t reps,
              const std::string& out_path, bool with_1gib) {
  std::vector<std::string> names = suites;
  if (names.empty()) {
    for (const auto& s : suite_catalog())
      if (s.is_esp() || s.id == SuiteId::kUuNia2Nea2) names.push_back(s.name);
  }
  CsvSink sink(out_path, bench::bench_columns());
  for (const auto& name : names) {
    const auto& suite = suite_by_name(name);
    auto curve = bench::bench_suite(
        suite, sizes.empty() ? bench::default_sizes() : sizes, reps);
    for (const auto& row : bench::bench_rows(curve)) sink.write(row);
    if (with_1gib) {
      double secs = bench::bench_runtime_1gib(suite);
      std::cerr << name << ": 1 GiB in " << std::fixed << std::setprecision(3)
                << secs << " s\n";
    }
  }
  return 0;
}

int cmd_plot_data(const std::string& csv_path) {
  auto table = read_csv_file(csv_path);
  std::vector<bench::BenchCurve> curves;
  for (size_t i = 0; i < table.rows.size(); ++i) {
    std::string suite = table.at(i, "suite");
    auto it = std::find_if(curves.begin(), curves.end(),
                           [&](const auto& c) { return c.suite == suite; });
    if (it == curves.end()) {
      curves.push_back({suite, {}, table.at(i, "accel") == "true", false});
      it = curves.end() - 1;
    }
    bench::BenchPoint p{};
    p.size_bytes = std::stoull(table.at(i, "size_bytes"));
    p.runtime_s = std::stod(table.at(i, "runtime_s"));
    p.throughput_bps = std::stod(table.at(i, "throughput_Bps"));
    it->points.push_back(p);
  }
  std::cout << bench::gnuplot_columns(curves);
  return 0;
}

int cmd_dump(const std::string& format, const std::string& hex,
             const std::string& suite_name, bool integrity) {
  Bytes wire = from_hex(hex);
  if (format == "gtpu") {
    std::cout << wire::dump_gtpu(wire);
  } else if (format == "esp") {
    std::cout << wire::dump_esp(wire, suite_by_name(suite_name));
  } else if (format == "dtls") {
    std::cout << wire::dump_dtls(wire);
  } else if (format == "pdcp") {
    std::cout << wire::dump_pdcp(wire, integrity);
  } else {
    throw ConfigError("unknown format '" + format +
                      "' (gtpu|esp|dtls|pdcp)");
  }
  return 0;
}

int cmd_suites() {
  std::cout << std::left << std::setw(30) << "name" << std::setw(12)
            << "key_bits" << std::setw(10) << "iv_len" << std::setw(10)
            << "tag_len" << "interfaces\n";
  for (const auto& s : suite_catalog()) {
    std::string ifaces;
    for (scenario::Interface i : scenario::kAllInterfaces) {
      if (scenario::suite_valid_for_interface(i, s.id)) {
        if (!ifaces.empty()) ifaces += ",";
        ifaces += scenario::interface_name(i);
      }
    }
    std::cout << std::left << std::setw(30) << s.name << std::setw(12)
              << s.key_bits << std::setw(10) << s.iv_len << std::setw(10)
              << s.tag_len << ifaces << "\n";
  }
  std::cout << "\nAES acceleration: "
            << (crypto::aes_acceleration_active() ? "active" : "inactive")
            << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "ranemu: desk-scale disaggregated-RAN security latency emulator"};
  app.require_subcommand(1);

  RunFlags flags;
  auto* run = app.add_subcommand(
      "run", "Run one experiment campaign from a scenario (overridable by "
             "RANEMU_* environment variables and flags)");
  run->add_option("-s,--scenario", flags.scenario_path, "Scenario file");
  run->add_option("--experiment", flags.experiment,
                  "up-echo | cp-procedures | bench");
  run->add_option("--mode", flags.mode, "monolithic | disaggregated");
  run->add_option("--transport", flags.transport,
                  "in-process | udp-loopback");
  run->add_option("--secure", flags.secure,
                  "all = user-plane-wide preset, none = baseline");
  run->add_option("--id", flags.id, "Scenario id for reporting");
  run->add_option("-n,--repetitions", flags.repetitions, "Sample count");
  run->add_option("--payload-size", flags.payload_size, "Echo payload bytes");
  run->add_option("--warmup", flags.warmup, "Discarded warmup echoes");
  run->add_option("--seed", flags.seed, "Deterministic key/payload seed");
  run->add_flag("--threaded", flags.threaded,
                "Run pipeline nodes as worker threads");
  run->add_option("--set", flags.sets,
                  "Override any scenario field, key=value (repeatable)");
  run->add_option("-o,--out", flags.out_path, "Summary CSV path (stdout if "
                                              "omitted)");
  run->add_option("--samples", flags.samples_path,
                  "Raw sample file, one duration (ns) per line");

  std::string baseline_csv, secured_csv;
  auto* compare = app.add_subcommand(
      "compare", "Overhead table from a baseline and a secured summary CSV");
  compare->add_option("baseline", baseline_csv)->required();
  compare->add_option("secured", secured_csv)->required();

  std::string matrix_out;
  int64_t matrix_reps = -1;
  int64_t matrix_seed = 1;
  auto* matrix = app.add_subcommand(
      "matrix", "Full per-interface suite campaign (resumes completed rows)");
  matrix->add_option("-o,--out", matrix_out, "Output CSV (required for "
                                             "resume)");
  matrix->add_option("-n,--repetitions", matrix_reps,
                     "Samples per row (default: experiment defaults)");
  matrix->add_option("--seed", matrix_seed, "Scenario seed");

  std::vector<std::string> bench_suites;
  std::vector<size_t> bench_sizes;
  uint32_t bench_reps = 9;
  std::string bench_out;
  bool bench_1gib = false;
  auto* bench_cmd = app.add_subcommand(
      "bench", "Protect-path throughput sweep per suite");
  bench_cmd->add_option("--suites", bench_suites, "Suite names (default: 6 "
                                                  "ESP + Uu)");
  bench_cmd->add_option("--sizes", bench_sizes, "Buffer sizes in bytes");
  bench_cmd->add_option("-r,--reps", bench_reps, "Repetitions per size");
  bench_cmd->add_option("-o,--out", bench_out, "Output CSV");
  bench_cmd->add_flag("--with-1gib", bench_1gib, "Also time 1 GiB per suite");

  std::string plot_csv;
  auto* plot = app.add_subcommand("plot-data",
                                  "Gnuplot columns from a bench CSV");
  plot->add_option("csv", plot_csv)->required();

  std::string dump_format, dump_hex, dump_suite = "AES-GCM-128";
  bool dump_integrity = true;
  auto* dump = app.add_subcommand("dump", "Annotated hex dump of an encoded "
                                          "PDU");
  dump->add_option("format", dump_format, "gtpu | esp | dtls | pdcp")
      ->required();
  dump->add_option("hex", dump_hex, "PDU bytes in hex")->required();
  dump->add_option("--suite", dump_suite, "ESP suite for IV/ICV split");
  dump->add_option("--integrity", dump_integrity,
                   "PDCP: MAC-I trailer present");

  auto* suites = app.add_subcommand("suites", "Print the suite catalog");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(flags);
    if (compare->parsed()) return cmd_compare(baseline_csv, secured_csv);
    if (matrix->parsed())
      return cmd_matrix(matrix_out, matrix_reps,
                        static_cast<uint64_t>(matrix_seed));
    if (bench_cmd->parsed())
      return cmd_bench(bench_suites, bench_sizes, bench_reps, bench_out,
                       bench_1gib);
    if (plot->parsed()) return cmd_plot_data(plot_csv);
    if (dump->parsed())
      return cmd_dump(dump_format, dump_hex, dump_suite, dump_integrity);
    if (suites->parsed()) return cmd_suites();
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
