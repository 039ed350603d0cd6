#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ranemu/suites.hpp"

namespace ranemu::bench {

struct BenchPoint {
  size_t size_bytes;
  double runtime_s;        // median over repetitions
  double throughput_bps;   // size / runtime
};

struct BenchCurve {
  std::string suite;  // catalog name, or NIA2 / NEA2 for bare primitives
  std::vector<BenchPoint> points;  // sizes strictly increasing
  bool aes_acceleration_active = false;
  bool truncated = false;  // allocation failure cut the sweep short
};

// 1 KiB .. 256 MiB geometric sweep (the default size grid).
std::vector<size_t> default_sizes();

// Median-of-repetitions protect-path timing on pre-generated random
// buffers with fixed keys; allocation excluded from the timed region.
// The measured path is the real secure-links code (SA / PDCP entity).
BenchCurve bench_suite(const SecuritySuite& suite,
                       const std::vector<size_t>& sizes,
                       uint32_t repetitions_per_size);

// Bare Uu primitives, to set the composite apart.
enum class UuPrimitive { kNia2Mac, kNea2Crypt };
BenchCurve bench_uu_primitive(UuPrimitive primitive,
                              const std::vector<size_t>& sizes,
                              uint32_t repetitions_per_size);

// Wall time to protect 1 GiB through the suite's data path. Chunked mode
// (64 MiB chunks) is the default; single-buffer mode needs the headroom.
double bench_runtime_1gib(const SecuritySuite& suite, bool chunked = true);

// Campaign-level mean protect times over `repetitions` buffers of
// `size_bytes`: the Uu MAC-then-encrypt composite vs one AEAD pass
// (AES-GCM-128) over the same bytes.
struct CompositeVsAead {
  double composite_mean_s;
  double aead_mean_s;
};
CompositeVsAead bench_uu_composite_vs_aead(size_t size_bytes,
                                           uint32_t repetitions);

// Pairwise dominance: sign per size (+1 first curve faster), and a summary
// over sizes >= 64 KiB (+1 / -1 only when one side wins at every large
// size; 0 = mixed or tied).
struct DominanceVerdict {
  std::string first;
  std::string second;
  std::vector<std::pair<size_t, int>> per_size;
  int summary = 0;
};

struct OrderingReport {
  std::vector<DominanceVerdict> pairs;

  const DominanceVerdict& pair(const std::string& first,
                               const std::string& second) const;
  std::string to_text() const;
};

inline constexpr size_t kLargeSizeThreshold = 64 * 1024;

// Requires >= 2 curves sharing at least one size; throws on disjoint grids.
OrderingReport analyze_ordering(const std::vector<BenchCurve>& curves);

// CSV/plot emission shared by CLI and bindings.
const std::vector<std::string>& bench_columns();
std::vector<std::vector<std::string>> bench_rows(const BenchCurve& curve);
std::string gnuplot_columns(const std::vector<BenchCurve>& curves);

}  // namespace ranemu::bench
