#include "ophist/distance.hpp"

#include <cmath>
#include <cstdio>
#include <set>
#include <unordered_set>

#include <json.hpp>

namespace ophist {

void MetricSpec::validate() const {
  if (!(r >= 1.0))
    throw Error(ErrorCode::invalid_metric, "Minkowski exponent must be >= 1");
  for (const auto& [mnem, w] : weights)
    if (!(w > 0.0))
      throw Error(ErrorCode::invalid_metric,
                  "weight for '" + mnem + "' must be positive");
}

double histogram_distance(const OpcodeHistogram& x, const OpcodeHistogram& y,
                          const MetricSpec& metric) {
  metric.validate();
  if (x.kind != HistogramKind::normalized ||
      y.kind != HistogramKind::normalized)
    throw Error(ErrorCode::kind_mismatch,
                "histogram_distance expects normalized histograms");

  auto weight_of = [&](const std::string& mnem) {
    auto it = metric.weights.find(mnem);
    return it == metric.weights.end() ? 1.0 : it->second;
  };

  // Merge walk over the two sorted bin maps = union vocabulary in sorted
  // mnemonic order, which fixes the accumulation order.
  double sum = 0.0;
  auto xi = x.bins.begin();
  auto yi = y.bins.begin();
  while (xi != x.bins.end() || yi != y.bins.end()) {
    double xv = 0.0, yv = 0.0;
    const std::string* mnem = nullptr;
    if (yi == y.bins.end() || (xi != x.bins.end() && xi->first < yi->first)) {
      mnem = &xi->first;
      xv = xi->second;
      ++xi;
    } else if (xi == x.bins.end() || yi->first < xi->first) {
      mnem = &yi->first;
      yv = yi->second;
      ++yi;
    } else {
      mnem = &xi->first;
      xv = xi->second;
      yv = yi->second;
      ++xi;
      ++yi;
    }
    sum += weight_of(*mnem) * std::pow(std::abs(xv - yv), metric.r);
  }
  if (metric.root && sum > 0.0) sum = std::pow(sum, 1.0 / metric.r);
  return sum;
}

MatchReport min_match(const HistogramSet& query, const HistogramSet& target,
                      const MetricSpec& metric) {
  if (query.histograms.empty() || target.histograms.empty())
    throw Error(ErrorCode::empty_set, "min_match over an empty histogram set");

  MatchReport report;
  double total = 0.0;
  for (const OpcodeHistogram& h : query.histograms) {
    MatchEntry best{0, histogram_distance(h, target.histograms[0], metric)};
    for (std::size_t j = 1; j < target.histograms.size(); ++j) {
      double d = histogram_distance(h, target.histograms[j], metric);
      if (d < best.distance) best = {j, d};
    }
    total += best.distance;
    report.entries.push_back(best);
  }
  report.directed_average = total / static_cast<double>(report.entries.size());
  return report;
}

double directed_distance(const HistogramSet& p1, const HistogramSet& p2,
                         const MetricSpec& metric) {
  return min_match(p1, p2, metric).directed_average;
}

double symmetric_distance(const HistogramSet& p1, const HistogramSet& p2,
                          const MetricSpec& metric) {
  return (directed_distance(p1, p2, metric) +
          directed_distance(p2, p1, metric)) /
         2.0;
}

DistanceMatrix distance_matrix(const std::vector<HistogramSet>& programs,
                               const MetricSpec& metric) {
  std::unordered_set<std::string> ids;
  for (const HistogramSet& p : programs)
    if (!ids.insert(p.program_id).second)
      throw Error(ErrorCode::duplicate_id,
                  "duplicate program id '" + p.program_id + "'");

  DistanceMatrix m;
  const std::size_t n = programs.size();
  m.values.assign(n, std::vector<double>(n, 0.0));
  for (const HistogramSet& p : programs) m.labels.push_back(p.program_id);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double d = symmetric_distance(programs[i], programs[j], metric);
      m.values[i][j] = d;
      m.values[j][i] = d;
    }
  }
  return m;
}

std::string matrix_to_csv(const DistanceMatrix& m) {
  std::string out = "id";
  for (const auto& label : m.labels) out += "," + label;
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    out += m.labels[i];
    for (std::size_t j = 0; j < m.labels.size(); ++j) {
      std::snprintf(buf, sizeof buf, "%.3f", m.values[i][j]);
      out += ",";
      out += buf;
    }
    out += "\n";
  }
  return out;
}

std::string matrix_to_json(const DistanceMatrix& m) {
  nlohmann::json doc;
  doc["labels"] = m.labels;
  doc["values"] = m.values;
  return doc.dump(2) + "\n";
}

DistanceMatrix matrix_from_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error,
                std::string("malformed matrix document: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("labels") || !doc.contains("values"))
    throw Error(ErrorCode::invalid_matrix,
                "matrix document misses labels/values");
  DistanceMatrix m;
  try {
    m.labels = doc["labels"].get<std::vector<std::string>>();
    m.values = doc["values"].get<std::vector<std::vector<double>>>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::invalid_matrix,
                std::string("matrix document has wrong shapes: ") + e.what());
  }
  if (m.values.size() != m.labels.size())
    throw Error(ErrorCode::invalid_matrix, "matrix row count != label count");
  for (const auto& row : m.values)
    if (row.size() != m.labels.size())
      throw Error(ErrorCode::invalid_matrix, "matrix is not square");
  return m;
}

}  // namespace ophist
