#ifndef OPHIST_DISTANCE_HPP
#define OPHIST_DISTANCE_HPP

#include <map>
#include <string>
#include <vector>

#include "ophist/histogram.hpp"

namespace ophist {

// Minkowski-form metric parameters. The default (r = 2, no weights, no
// root) is the plain sum of squared bin differences; `root` switches on
// the r-th root for callers who want the textbook metric.
struct MetricSpec {
  double r = 2.0;                        // exponent, >= 1
  std::map<std::string, double> weights; // per-mnemonic, > 0; empty = all 1
  bool root = false;

  // Throws invalid_metric on r < 1 or a non-positive weight.
  void validate() const;
};

// Per-query-subroutine best match into the target set.
struct MatchEntry {
  std::size_t matched_index = 0;  // index into the target set
  double distance = 0.0;          // minimum over all target histograms
};

struct MatchReport {
  std::vector<MatchEntry> entries;  // one per query histogram, in order
  double directed_average = 0.0;    // mean of the minima
};

// Symmetric pairwise program distances with zero diagonal.
struct DistanceMatrix {
  std::vector<std::string> labels;
  std::vector<std::vector<double>> values;
};

// Weighted Minkowski-form distance over the union of the two bin sets;
// absent bins count as zero. Throws kind_mismatch on raw inputs.
double histogram_distance(const OpcodeHistogram& x, const OpcodeHistogram& y,
                          const MetricSpec& metric = {});

// Compares every query histogram with every target histogram and keeps the
// minimum per query entry; ties break toward the smallest target index.
// Throws empty_set when either set has no histograms.
MatchReport min_match(const HistogramSet& query, const HistogramSet& target,
                      const MetricSpec& metric = {});

// min_match's directed average. Not symmetric in its arguments.
double directed_distance(const HistogramSet& p1, const HistogramSet& p2,
                         const MetricSpec& metric = {});

// Mean of the two directed distances.
double symmetric_distance(const HistogramSet& p1, const HistogramSet& p2,
                          const MetricSpec& metric = {});

// All unordered pairs once, mirrored; zero diagonal. Throws duplicate_id.
DistanceMatrix distance_matrix(const std::vector<HistogramSet>& programs,
                               const MetricSpec& metric = {});

// CSV with id header row/column and 3-decimal values (presentation form).
std::string matrix_to_csv(const DistanceMatrix& m);

// Lossless JSON form carrying full-precision values.
std::string matrix_to_json(const DistanceMatrix& m);

// Throws invalid_matrix / io_error on malformed documents.
DistanceMatrix matrix_from_json(std::string_view json_text);

}  // namespace ophist

#endif  // OPHIST_DISTANCE_HPP
