#include "ranemu/measure.hpp"

#include <algorithm>
#include <random>
#include <sstream>

#include "ranemu/crypto.hpp"
#include "ranemu/errors.hpp"
#include "ranemu/procedures.hpp"

namespace ranemu::measure {

StatsSummary summarize_us(const std::vector<double>& samples_us) {
  if (samples_us.empty())
    throw InvalidArgument("cannot summarize an empty campaign");
  StatsSummary s;
  s.n = samples_us.size();
  auto ci = stats::confidence_interval(samples_us, 0.99);
  s.mean_us = ci.mean;
  s.ci99_low_us = ci.low;
  s.ci99_high_us = ci.high;
  s.std_us = stats::std_dev(samples_us);
  s.min_us = *std::min_element(samples_us.begin(), samples_us.end());
  s.max_us = *std::max_element(samples_us.begin(), samples_us.end());
  s.p50_us = stats::percentile(samples_us, 50.0);
  s.p99_us = stats::percentile(samples_us, 99.0);
  return s;
}

namespace {

Bytes random_payload(std::mt19937_64& rng, size_t size) {
  Bytes payload(size);
  for (auto& b : payload) b = static_cast<uint8_t>(rng());
  return payload;
}

links::CryptoOpCounts total_ops(const topology::Pipeline& pipeline) {
  links::CryptoOpCounts total;
  for (const auto& [name, ops] : pipeline.node_ops()) total += ops;
  return total;
}

links::CryptoOpCounts ops_delta(const links::CryptoOpCounts& after,
                                const links::CryptoOpCounts& before) {
  links::CryptoOpCounts d;
  d.pdcp_mac = after.pdcp_mac - before.pdcp_mac;
  d.pdcp_cipher = after.pdcp_cipher - before.pdcp_cipher;
  d.esp_protect = after.esp_protect - before.esp_protect;
  d.esp_unprotect = after.esp_unprotect - before.esp_unprotect;
  d.dtls_protect = after.dtls_protect - before.dtls_protect;
  d.dtls_unprotect = after.dtls_unprotect - before.dtls_unprotect;
  return d;
}

}  // namespace

ExperimentResult run_up_experiment(const scenario::ScenarioConfig& cfg,
                                   const UpExperimentOptions& opt) {
  uint32_t repetitions = opt.repetitions.value_or(
      cfg.repetitions.value_or(20000));
  uint32_t payload_size = opt.payload_size.value_or(cfg.payload_size);
  uint32_t warmup = opt.warmup.value_or(cfg.warmup);
  if (repetitions == 0)
    throw InvalidArgument("repetitions must be positive");

  auto pipeline = topology::build_topology(cfg);
  std::mt19937_64 rng(cfg.seed);

  ExperimentResult result;
  result.scenario_id = cfg.id;
  result.experiment = scenario::Experiment::kUpEcho;
  result.mode = cfg.mode;
  result.payload_size = payload_size;
  result.aes_accel = crypto::aes_acceleration_active();
  result.raw_samples_us.reserve(repetitions);

  for (uint32_t i = 0; i < warmup; ++i)
    pipeline->send_echo(random_payload(rng, payload_size));

  auto ops_before = total_ops(*pipeline);
  for (uint32_t i = 0; i < repetitions; ++i) {
    Bytes payload = random_payload(rng, payload_size);
    topology::EchoResult echo;
    try {
      echo = pipeline->send_echo(payload);
    } catch (const Error& e) {
      throw PipelineError("echo " + std::to_string(i) + " of " +
                          std::to_string(repetitions) +
                          " failed (partial results discarded): " + e.what());
    }
    result.raw_samples_us.push_back(
        std::chrono::duration<double, std::micro>(echo.rtt).count());
  }
  auto delta = ops_delta(total_ops(*pipeline), ops_before);
  // Exact per-round-trip counts; campaigns are homogeneous by construction.
  result.ops_per_round_trip.pdcp_mac = delta.pdcp_mac / repetitions;
  result.ops_per_round_trip.pdcp_cipher = delta.pdcp_cipher / repetitions;
  result.ops_per_round_trip.esp_protect = delta.esp_protect / repetitions;
  result.ops_per_round_trip.esp_unprotect = delta.esp_unprotect / repetitions;
  result.ops_per_round_trip.dtls_protect = delta.dtls_protect / repetitions;
  result.ops_per_round_trip.dtls_unprotect =
      delta.dtls_unprotect / repetitions;
  result.summary = summarize_us(result.raw_samples_us);
  return result;
}

CpExperimentResult run_cp_experiment(const scenario::ScenarioConfig& cfg,
                                     std::optional<uint32_t> repetitions_opt) {
  if (cfg.mode != scenario::Mode::kDisaggregated)
    throw ConfigError("cp experiment requires a disaggregated scenario");
  uint32_t repetitions =
      repetitions_opt.value_or(cfg.repetitions.value_or(1000));
  if (repetitions == 0) throw InvalidArgument("repetitions must be positive");

  auto pipeline = topology::build_topology(cfg);
  procedures::ControlPlaneAgent agent(*pipeline, cfg.seed);

  CpExperimentResult result;
  auto init = [&](ExperimentResult& r) {
    r.scenario_id = cfg.id;
    r.experiment = scenario::Experiment::kCpProcedures;
    r.mode = cfg.mode;
    r.payload_size = 0;
    r.aes_accel = crypto::aes_acceleration_active();
    r.raw_samples_us.reserve(repetitions);
  };
  init(result.ue_context_setup);
  init(result.bearer_context_setup);

  auto ops_before = total_ops(*pipeline);
  for (uint32_t i = 0; i < repetitions; ++i) {
    auto reg = agent.run_registration_sequence();
    result.ue_context_setup.raw_samples_us.push_back(
        std::chrono::duration<double, std::micro>(reg.ue_context_setup.duration)
            .count());
    result.bearer_context_setup.raw_samples_us.push_back(
        std::chrono::duration<double, std::micro>(
            reg.bearer_context_setup.duration)
            .count());
  }
  auto delta = ops_delta(total_ops(*pipeline), ops_before);
  // Per registration sequence (both procedures share the counters).
  links::CryptoOpCounts per_run;
  per_run.esp_protect = delta.esp_protect / repetitions;
  per_run.esp_unprotect = delta.esp_unprotect / repetitions;
  per_run.dtls_protect = delta.dtls_protect / repetitions;
  per_run.dtls_unprotect = delta.dtls_unprotect / repetitions;
  result.ue_context_setup.ops_per_round_trip = per_run;
  result.bearer_context_setup.ops_per_round_trip = per_run;

  result.ue_context_setup.summary =
      summarize_us(result.ue_context_setup.raw_samples_us);
  result.bearer_context_setup.summary =
      summarize_us(result.bearer_context_setup.raw_samples_us);
  return result;
}

std::string to_string(Verdict verdict) {
  return verdict == Verdict::kDistinguishable ? "distinguishable"
                                              : "overlapping";
}

OverheadReport compare_scenarios(const ExperimentResult& baseline,
                                 const ExperimentResult& secured) {
  if (baseline.experiment != secured.experiment)
    throw InvalidArgument("experiment kinds differ");
  if (baseline.payload_size != secured.payload_size)
    throw InvalidArgument("payload sizes differ");
  if (baseline.summary.n != secured.summary.n)
    throw InvalidArgument("repetition counts differ");

  OverheadReport report;
  report.delta_mean_us = secured.summary.mean_us - baseline.summary.mean_us;
  double hw_b =
      (baseline.summary.ci99_high_us - baseline.summary.ci99_low_us) / 2.0;
  double hw_s =
      (secured.summary.ci99_high_us - secured.summary.ci99_low_us) / 2.0;
  double combined = std::sqrt(hw_b * hw_b + hw_s * hw_s);
  report.delta_ci_low_us = report.delta_mean_us - combined;
  report.delta_ci_high_us = report.delta_mean_us + combined;

  stats::Interval a{baseline.summary.mean_us, baseline.summary.ci99_low_us,
                    baseline.summary.ci99_high_us};
  stats::Interval b{secured.summary.mean_us, secured.summary.ci99_low_us,
                    secured.summary.ci99_high_us};
  report.verdict =
      a.overlaps(b) ? Verdict::kOverlapping : Verdict::kDistinguishable;

  report.delta_esp_ops_per_rtt =
      static_cast<int64_t>(secured.ops_per_round_trip.esp_total()) -
      static_cast<int64_t>(baseline.ops_per_round_trip.esp_total());
  report.delta_total_ops_per_rtt =
      static_cast<int64_t>(secured.ops_per_round_trip.total()) -
      static_cast<int64_t>(baseline.ops_per_round_trip.total());
  return report;
}

const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "scenario_id", "experiment", "mode",   "label",      "n",
      "payload_bytes", "mean_us",  "std_us", "ci_low_us",  "ci_high_us",
      "min_us",      "max_us",     "p50_us", "p99_us",     "crypto_ops",
      "esp_ops",     "accel"};
  return cols;
}

namespace {
std::string fmt(double v) {
  std::ostringstream os;
  os.precision(9);
  os << v;
  return os.str();
}
}  // namespace

std::vector<std::string> summary_row(const ExperimentResult& result,
                                     const std::string& label) {
  const auto& s = result.summary;
  return {result.scenario_id,
          scenario::to_string(result.experiment),
          scenario::to_string(result.mode),
          label,
          std::to_string(s.n),
          std::to_string(result.payload_size),
          fmt(s.mean_us),
          fmt(s.std_us),
          fmt(s.ci99_low_us),
          fmt(s.ci99_high_us),
          fmt(s.min_us),
          fmt(s.max_us),
          fmt(s.p50_us),
          fmt(s.p99_us),
          std::to_string(result.ops_per_round_trip.total()),
          std::to_string(result.ops_per_round_trip.esp_total()),
          result.aes_accel ? "true" : "false"};
}

std::string raw_samples_text(const std::vector<double>& samples_us) {
  std::ostringstream os;
  for (double us : samples_us)
    os << static_cast<long long>(us * 1000.0 + 0.5) << "\n";
  return os.str();
}

}  // namespace ranemu::measure
