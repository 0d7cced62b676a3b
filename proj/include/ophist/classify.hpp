#ifndef OPHIST_CLASSIFY_HPP
#define OPHIST_CLASSIFY_HPP

#include <map>
#include <string>
#include <vector>

#include "ophist/distance.hpp"

namespace ophist {

struct ClassifierConfig {
  double threshold = 0.057;  // inclusive: d <= threshold pairs up
};

struct ClassifiedPair {
  std::string first;
  std::string second;
  double distance = 0.0;
  bool operator==(const ClassifiedPair&) const = default;
};

// Below-threshold pairs plus the single-linkage partition they induce
// (connected components of the pair graph; singletons included).
struct Classification {
  double threshold = 0.0;
  std::vector<ClassifiedPair> pairs;               // i < j in label order
  std::vector<std::vector<std::string>> clusters;  // partition of all ids
};

// Throws invalid_matrix when the matrix is asymmetric or has a nonzero
// diagonal beyond 1e-12.
Classification classify(const DistanceMatrix& m, const ClassifierConfig& cfg);

std::string classification_to_json(const Classification& c);

// Text rendering of the matrix with below-threshold cells flagged '*'.
std::string render_threshold_table(const DistanceMatrix& m, double threshold);

// Largest threshold with zero cross-family pairs, when one exists.
struct CalibrationResult {
  bool valid = false;      // max_intra < min_inter
  double threshold = 0.0;  // = max_intra when valid
  double max_intra = 0.0;
  double min_inter = 0.0;
};

// Requires every id labeled and at least two families; family overlap is a
// reported outcome (valid = false), not an error.
CalibrationResult calibrate_threshold(
    const DistanceMatrix& m, const std::map<std::string, std::string>& labels);

std::string calibration_to_json(const CalibrationResult& r);

}  // namespace ophist

#endif  // OPHIST_CLASSIFY_HPP
