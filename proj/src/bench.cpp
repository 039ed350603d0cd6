#include "ranemu/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cstring>
#include <random>
#include <sstream>

#include "ranemu/crypto.hpp"
#include "ranemu/errors.hpp"
#include "ranemu/links.hpp"

namespace ranemu::bench {

using Clock = std::chrono::steady_clock;

namespace {

constexpr uint64_t kBenchSeed = 0xB5EC;

Bytes random_buffer(size_t size, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Bytes buf(size);
  size_t i = 0;
  for (; i + 8 <= size; i += 8) {
    uint64_t v = rng();
    std::memcpy(buf.data() + i, &v, 8);
  }
  for (; i < size; ++i) buf[i] = static_cast<uint8_t>(rng());
  return buf;
}

double median(std::vector<double>& xs) {
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  return n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2.0;
}

// The benchmarked protect paths: the same secure-links objects the pipeline
// uses, with fixed derived keys.
struct SuiteBench {
  std::optional<links::SecurityAssociation> sa;
  std::optional<links::PdcpEntity> pdcp;

  explicit SuiteBench(const SecuritySuite& suite) {
    if (suite.is_esp()) {
      links::SaKeys keys;
      keys.enc_key = derive_bytes(kBenchSeed, "bench/enc", suite.enc_key_len());
      keys.auth_key =
          derive_bytes(kBenchSeed, "bench/auth", suite.auth_key_len());
      keys.salt = derive_bytes(kBenchSeed, "bench/salt", suite.salt_len());
      sa.emplace(0x0B000001, suite, keys, links::SaDirection::kProtect);
    } else if (suite.id == SuiteId::kUuNia2Nea2) {
      links::PdcpConfig cfg;
      cfg.bearer = 1;
      cfg.integrity_key = derive_bytes(kBenchSeed, "bench/nia2", 16);
      cfg.ciphering_key = derive_bytes(kBenchSeed, "bench/nea2", 16);
      pdcp.emplace(cfg, 0);
    } else {
      // DTLS record protection: drive the endpoint directly.
      links::DtlsKeys tx{derive_bytes(kBenchSeed, "bench/dtls-key", 16),
                         derive_bytes(kBenchSeed, "bench/dtls-salt", 4)};
      dtls.emplace(tx, tx);
    }
  }

  std::optional<links::DtlsEndpoint> dtls;

  void protect(BytesView buf) {
    if (sa) {
      volatile size_t sink = sa->protect(buf).size();
      (void)sink;
    } else if (pdcp) {
      volatile size_t sink = pdcp->protect(buf).size();
      (void)sink;
    } else {
      volatile size_t sink = dtls->protect(buf).size();
      (void)sink;
    }
  }
};

double time_protect(SuiteBench& bench, BytesView buf, uint32_t repetitions) {
  std::vector<double> runs;
  runs.reserve(repetitions);
  bench.protect(buf);  // warm
  for (uint32_t r = 0; r < repetitions; ++r) {
    auto t0 = Clock::now();
    bench.protect(buf);
    auto t1 = Clock::now();
    runs.push_back(std::chrono::duration<double>(t1 - t0).count());
  }
  return median(runs);
}

}  // namespace

std::vector<size_t> default_sizes() {
  return {1ull << 10, 4ull << 10, 16ull << 10, 64ull << 10, 256ull << 10,
          1ull << 20, 4ull << 20, 16ull << 20, 64ull << 20, 256ull << 20};
}

BenchCurve bench_suite(const SecuritySuite& suite,
                       const std::vector<size_t>& sizes,
                       uint32_t repetitions_per_size) {
  if (sizes.empty()) throw InvalidArgument("size list is empty");
  if (repetitions_per_size == 0)
    throw InvalidArgument("repetitions must be positive");
  std::vector<size_t> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());

  BenchCurve curve;
  curve.suite = suite.name;
  curve.aes_acceleration_active = crypto::aes_acceleration_active();
  SuiteBench bench(suite);
  for (size_t size : sorted) {
    Bytes buf;
    try {
      buf = random_buffer(size, kBenchSeed ^ size);
    } catch (const std::bad_alloc&) {
      curve.truncated = true;
      break;
    }
    // DTLS records cap at 64 KiB; larger inputs go through in record-sized
    // slices so the sweep stays comparable.
    double runtime;
    if (suite.id == SuiteId::kDtlsGcm128 && size > 16384) {
      std::vector<double> runs;
      runs.reserve(repetitions_per_size);
      constexpr size_t kSlice = 16384;
      for (uint32_t r = 0; r <= repetitions_per_size; ++r) {
        auto t0 = Clock::now();
        for (size_t off = 0; off < buf.size(); off += kSlice) {
          size_t n = std::min(kSlice, buf.size() - off);
          bench.protect(BytesView(buf.data() + off, n));
        }
        auto t1 = Clock::now();
        if (r > 0)  // first pass is warm-up
          runs.push_back(std::chrono::duration<double>(t1 - t0).count());
      }
      runtime = median(runs);
    } else {
      runtime = time_protect(bench, buf, repetitions_per_size);
    }
    if (runtime <= 0) runtime = 1e-9;
    curve.points.push_back(
        {size, runtime, static_cast<double>(size) / runtime});
  }
  return curve;
}

BenchCurve bench_uu_primitive(UuPrimitive primitive,
                              const std::vector<size_t>& sizes,
                              uint32_t repetitions_per_size) {
  if (sizes.empty()) throw InvalidArgument("size list is empty");
  std::vector<size_t> sorted = sizes;
  std::sort(sorted.begin(), sorted.end());

  BenchCurve curve;
  curve.suite = primitive == UuPrimitive::kNia2Mac ? "NIA2" : "NEA2";
  curve.aes_acceleration_active = crypto::aes_acceleration_active();
  crypto::UuSecurityInputs inputs{0x12345678, 1, 0,
                                  derive_bytes(kBenchSeed, "bench/prim", 16)};
  for (size_t size : sorted) {
    Bytes buf;
    try {
      buf = random_buffer(size, kBenchSeed ^ size);
    } catch (const std::bad_alloc&) {
      curve.truncated = true;
      break;
    }
    std::vector<double> runs;
    runs.reserve(repetitions_per_size);
    for (uint32_t r = 0; r <= repetitions_per_size; ++r) {
      auto t0 = Clock::now();
      if (primitive == UuPrimitive::kNia2Mac) {
        volatile uint32_t sink = crypto::nia2_mac(inputs, buf);
        (void)sink;
      } else {
        volatile size_t sink = crypto::nea2_crypt(inputs, buf).size();
        (void)sink;
      }
      auto t1 = Clock::now();
      if (r > 0)
        runs.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    double runtime = std::max(median(runs), 1e-9);
    curve.points.push_back(
        {size, runtime, static_cast<double>(size) / runtime});
  }
  return curve;
}

double bench_runtime_1gib(const SecuritySuite& suite, bool chunked) {
  constexpr size_t kTotal = 1ull << 30;
  SuiteBench bench(suite);
  if (chunked) {
    constexpr size_t kChunk = 64ull << 20;
    Bytes buf = random_buffer(kChunk, kBenchSeed);
    bench.protect(BytesView(buf.data(), 4096));  // warm
    auto t0 = Clock::now();
    for (size_t done = 0; done < kTotal; done += kChunk) bench.protect(buf);
    auto t1 = Clock::now();
    return std::chrono::duration<double>(t1 - t0).count();
  }
  Bytes buf = random_buffer(kTotal, kBenchSeed);
  bench.protect(BytesView(buf.data(), 4096));  // warm
  auto t0 = Clock::now();
  bench.protect(buf);
  auto t1 = Clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

CompositeVsAead bench_uu_composite_vs_aead(size_t size_bytes,
                                           uint32_t repetitions) {
  if (repetitions == 0) throw InvalidArgument("repetitions must be positive");
  Bytes buf = random_buffer(size_bytes, kBenchSeed ^ size_bytes);

  crypto::UuSecurityInputs mac_in{1, 1, 0,
                                  derive_bytes(kBenchSeed, "cmp/nia2", 16)};
  crypto::UuSecurityInputs enc_in{1, 1, 0,
                                  derive_bytes(kBenchSeed, "cmp/nea2", 16)};
  const auto& gcm = suite_by_id(SuiteId::kEspGcm128);
  Bytes gcm_key = derive_bytes(kBenchSeed, "cmp/gcm", 16);
  Bytes nonce = derive_bytes(kBenchSeed, "cmp/nonce", 12);

  auto run_composite = [&] {
    uint32_t mac = crypto::nia2_mac(mac_in, buf);
    Bytes body(buf.begin(), buf.end());
    put_u32(body, mac);
    volatile size_t sink = crypto::nea2_crypt(enc_in, body).size();
    (void)sink;
  };
  auto run_aead = [&] {
    volatile size_t sink =
        crypto::aead_seal(gcm, gcm_key, nonce, {}, buf).ciphertext.size();
    (void)sink;
  };

  run_composite();
  run_aead();
  double total_composite = 0, total_aead = 0;
  for (uint32_t r = 0; r < repetitions; ++r) {
    auto t0 = Clock::now();
    run_composite();
    auto t1 = Clock::now();
    run_aead();
    auto t2 = Clock::now();
    total_composite += std::chrono::duration<double>(t1 - t0).count();
    total_aead += std::chrono::duration<double>(t2 - t1).count();
  }
  return {total_composite / repetitions, total_aead / repetitions};
}

const DominanceVerdict& OrderingReport::pair(const std::string& first,
                                             const std::string& second) const {
  for (const auto& p : pairs)
    if (p.first == first && p.second == second) return p;
  throw InvalidArgument("no dominance verdict for " + first + " vs " + second);
}

std::string OrderingReport::to_text() const {
  std::ostringstream os;
  for (const auto& p : pairs) {
    os << p.first << " vs " << p.second << ": ";
    if (p.summary > 0) os << p.first << " dominates at large sizes";
    else if (p.summary < 0) os << p.second << " dominates at large sizes";
    else os << "no dominance";
    os << " [";
    for (size_t i = 0; i < p.per_size.size(); ++i) {
      if (i) os << " ";
      os << p.per_size[i].first << ":"
         << (p.per_size[i].second > 0 ? "+" : p.per_size[i].second < 0 ? "-"
                                                                       : "=");
    }
    os << "]\n";
  }
  return os.str();
}

OrderingReport analyze_ordering(const std::vector<BenchCurve>& curves) {
  if (curves.size() < 2)
    throw InvalidArgument("ordering analysis needs >= 2 curves");
  OrderingReport report;
  for (size_t i = 0; i < curves.size(); ++i) {
    for (size_t j = i + 1; j < curves.size(); ++j) {
      const auto& a = curves[i];
      const auto& b = curves[j];
      DominanceVerdict verdict;
      verdict.first = a.suite;
      verdict.second = b.suite;
      bool a_all_large = true, b_all_large = true, any_large = false;
      for (const auto& pa : a.points) {
        for (const auto& pb : b.points) {
          if (pa.size_bytes != pb.size_bytes) continue;
          int sign = pa.throughput_bps > pb.throughput_bps   ? 1
                     : pa.throughput_bps < pb.throughput_bps ? -1
                                                             : 0;
          verdict.per_size.emplace_back(pa.size_bytes, sign);
          if (pa.size_bytes >= kLargeSizeThreshold) {
            any_large = true;
            if (sign <= 0) a_all_large = false;
            if (sign >= 0) b_all_large = false;
          }
        }
      }
      if (verdict.per_size.empty())
        throw InvalidArgument("curves share no common sizes: " + a.suite +
                              " vs " + b.suite);
      if (any_large)
        verdict.summary = a_all_large ? 1 : b_all_large ? -1 : 0;
      report.pairs.push_back(std::move(verdict));
    }
  }
  return report;
}

const std::vector<std::string>& bench_columns() {
  static const std::vector<std::string> cols = {
      "suite", "size_bytes", "runtime_s", "throughput_Bps", "accel"};
  return cols;
}

std::vector<std::vector<std::string>> bench_rows(const BenchCurve& curve) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& p : curve.points) {
    std::ostringstream rt, tp;
    rt.precision(9);
    tp.precision(9);
    rt << p.runtime_s;
    tp << p.throughput_bps;
    rows.push_back({curve.suite, std::to_string(p.size_bytes), rt.str(),
                    tp.str(),
                    curve.aes_acceleration_active ? "true" : "false"});
  }
  return rows;
}

std::string gnuplot_columns(const std::vector<BenchCurve>& curves) {
  std::ostringstream os;
  os << "# size_bytes";
  for (const auto& c : curves) os << " \"" << c.suite << "_Bps\"";
  os << "\n";
  // union of sizes, ascending
  std::vector<size_t> sizes;
  for (const auto& c : curves)
    for (const auto& p : c.points) sizes.push_back(p.size_bytes);
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  for (size_t size : sizes) {
    os << size;
    for (const auto& c : curves) {
      double v = 0;
      for (const auto& p : c.points)
        if (p.size_bytes == size) v = p.throughput_bps;
      os << " " << v;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace ranemu::bench
