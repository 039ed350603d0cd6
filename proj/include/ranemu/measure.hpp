#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ranemu/links.hpp"
#include "ranemu/scenario.hpp"
#include "ranemu/stats.hpp"
#include "ranemu/topology.hpp"

namespace ranemu::measure {

// The reporting statistic: mean latency with 99% confidence interval, in
// microseconds, plus distribution columns.
struct StatsSummary {
  size_t n = 0;
  double mean_us = 0;
  double std_us = 0;
  double ci99_low_us = 0;
  double ci99_high_us = 0;
  double min_us = 0;
  double max_us = 0;
  double p50_us = 0;
  double p99_us = 0;
};

StatsSummary summarize_us(const std::vector<double>& samples_us);

// One measured campaign over a scenario.
struct ExperimentResult {
  std::string scenario_id;
  scenario::Experiment experiment;
  scenario::Mode mode;
  uint32_t payload_size = 0;  // 0 for CP campaigns
  StatsSummary summary;
  std::vector<double> raw_samples_us;         // in measurement order
  links::CryptoOpCounts ops_per_round_trip;   // exact, from counters
  bool aes_accel = false;
};

struct UpExperimentOptions {
  std::optional<uint32_t> repetitions;   // default 20000
  std::optional<uint32_t> payload_size;  // default 1024
  std::optional<uint32_t> warmup;        // default 100
};

// Paper-method UP campaign: warmup echoes discarded, then `repetitions`
// timed 1024-byte echoes back to back through the secured pipeline.
ExperimentResult run_up_experiment(const scenario::ScenarioConfig& cfg,
                                   const UpExperimentOptions& opt = {});

struct CpExperimentResult {
  ExperimentResult ue_context_setup;
  ExperimentResult bearer_context_setup;
};

// CP campaign: `repetitions` UE-registration sequences (default 1000), one
// duration sample per sub-procedure per run.
CpExperimentResult run_cp_experiment(const scenario::ScenarioConfig& cfg,
                                     std::optional<uint32_t> repetitions = {});

enum class Verdict { kDistinguishable, kOverlapping };
std::string to_string(Verdict verdict);

struct OverheadReport {
  double delta_mean_us = 0;     // secured - baseline
  double delta_ci_low_us = 0;   // conservative combined interval
  double delta_ci_high_us = 0;
  Verdict verdict = Verdict::kOverlapping;  // per CI overlap of the inputs
  int64_t delta_esp_ops_per_rtt = 0;
  int64_t delta_total_ops_per_rtt = 0;
};

// Secured-vs-baseline delta with conservatively combined CI; verdict follows
// the CI-overlap criterion. Throws on experiment-shape mismatch.
OverheadReport compare_scenarios(const ExperimentResult& baseline,
                                 const ExperimentResult& secured);

// CSV schema shared by the CLI and the python bindings.
const std::vector<std::string>& summary_columns();
std::vector<std::string> summary_row(const ExperimentResult& result,
                                     const std::string& label);
// Raw-sample file payload: one duration per line, nanoseconds.
std::string raw_samples_text(const std::vector<double>& samples_us);

}  // namespace ranemu::measure
