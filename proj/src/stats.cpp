#include "ranemu/stats.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ranemu/errors.hpp"

namespace ranemu::stats {

double mean(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("mean of empty sample set");
  double acc = 0.0;
  for (double x : samples) acc += x;
  return acc / static_cast<double>(samples.size());
}

double std_dev(std::span<const double> samples) {
  if (samples.empty()) throw InvalidArgument("std_dev of empty sample set");
  if (samples.size() < 2) return 0.0;
  double m = mean(samples);
  double acc = 0.0;
  for (double x : samples) acc += (x - m) * (x - m);
  return std::sqrt(acc / static_cast<double>(samples.size() - 1));
}

double z_value(double level) {
  // Pinned two-sided normal quantiles for the levels the harness reports.
  if (level == 0.99) return 2.5758;
  if (level == 0.95) return 1.9600;
  if (level == 0.90) return 1.6449;
  if (level == 0.80) return 1.2816;
  throw InvalidArgument("unsupported confidence level");
}

Interval confidence_interval(std::span<const double> samples, double level) {
  if (samples.empty())
    throw InvalidArgument("confidence interval of empty sample set");
  double m = mean(samples);
  if (samples.size() == 1) return {m, m, m};
  double hw = z_value(level) * std_dev(samples) /
              std::sqrt(static_cast<double>(samples.size()));
  return {m, m - hw, m + hw};
}

double percentile(std::span<const double> samples, double q) {
  if (samples.empty()) throw InvalidArgument("percentile of empty sample set");
  if (q < 0.0 || q > 100.0)
    throw InvalidArgument("percentile q must be in [0, 100]");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  size_t n = sorted.size();
  size_t rank = static_cast<size_t>(
      std::ceil(q / 100.0 * static_cast<double>(n)));
  if (rank < 1) rank = 1;
  if (rank > n) rank = n;
  return sorted[rank - 1];
}

LinearFit linear_fit(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InvalidArgument("x/y size mismatch");
  if (xs.size() < 3) throw InvalidArgument("linear fit needs >= 3 points");
  const double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  double denom = n * sxx - sx * sx;
  if (denom == 0.0 ||
      std::all_of(xs.begin(), xs.end(), [&](double x) { return x == xs[0]; }))
    throw InvalidArgument("degenerate x values in linear fit");
  LinearFit fit{};
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double mean_y = sy / n;
  double ss_res = 0, ss_tot = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    double pred = fit.slope * xs[i] + fit.intercept;
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
  if (fit.r_squared < 0.0) fit.r_squared = 0.0;
  return fit;
}

CsvWriter::CsvWriter(std::vector<std::string> columns)
    : columns_(std::move(columns)) {}

std::string CsvWriter::escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out.push_back('"');
  return out;
}

std::string CsvWriter::header() const {
  std::string out;
  for (size_t i = 0; i < columns_.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(columns_[i]);
  }
  out.push_back('\n');
  return out;
}

std::string CsvWriter::row(const std::vector<std::string>& fields) const {
  if (fields.size() != columns_.size())
    throw InvalidArgument("CSV row width does not match column count");
  std::string out;
  for (size_t i = 0; i < fields.size(); ++i) {
    if (i) out.push_back(',');
    out += escape(fields[i]);
  }
  out.push_back('\n');
  return out;
}

namespace {
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  out.push_back(std::move(field));
  return out;
}
}  // namespace

size_t CsvTable::column_index(const std::string& name) const {
  for (size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw InvalidArgument("CSV schema is missing column '" + name + "'");
}

const std::string& CsvTable::at(size_t row, const std::string& column) const {
  return rows.at(row).at(column_index(column));
}

CsvTable parse_csv(const std::string& text) {
  CsvTable table;
  std::stringstream ss(text);
  std::string line;
  bool first = true;
  while (std::getline(ss, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (first) {
      table.columns = std::move(fields);
      first = false;
    } else {
      table.rows.push_back(std::move(fields));
    }
  }
  return table;
}

}  // namespace ranemu::stats
