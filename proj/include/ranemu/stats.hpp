#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ranemu::stats {

double mean(std::span<const double> samples);
// Sample standard deviation (n-1 divisor); 0 for n < 2.
double std_dev(std::span<const double> samples);

struct Interval {
  double mean;
  double low;
  double high;

  double half_width() const { return (high - low) / 2.0; }
  bool overlaps(const Interval& other) const {
    return low <= other.high && other.low <= high;
  }
};

// Normal-approximation confidence interval, mean +/- z*s/sqrt(n). Supported
// levels and their z values are pinned (0.99 -> 2.5758). n = 1 degenerates
// to (mean, mean, mean); empty input is an error.
Interval confidence_interval(std::span<const double> samples,
                             double level = 0.99);
double z_value(double level);

// Nearest-rank percentile over a copy of `samples`: the value at rank
// max(1, ceil(q/100 * n)) of the ascending order, so q=0 is the minimum and
// q=100 the maximum. No interpolation.
double percentile(std::span<const double> samples, double q);

struct LinearFit {
  double slope;
  double intercept;
  double r_squared;
};

// Least-squares fit; requires >= 3 points and nonconstant x.
LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys);

// ---------------------------------------------------------------- CSV

// RFC-4180-style writer: fields containing comma, quote, or newline are
// quoted, embedded quotes doubled. Fixed column order per table.
class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> columns);

  const std::vector<std::string>& columns() const { return columns_; }
  std::string header() const;
  std::string row(const std::vector<std::string>& fields) const;

  static std::string escape(const std::string& field);

 private:
  std::vector<std::string> columns_;
};

// Minimal CSV reader for the compare/matrix subcommands.
struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  size_t column_index(const std::string& name) const;  // throws if missing
  const std::string& at(size_t row, const std::string& column) const;
};

CsvTable parse_csv(const std::string& text);

}  // namespace ranemu::stats
