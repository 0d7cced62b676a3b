#include "ophist/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <set>

#include <json.hpp>

namespace ophist {

namespace {

void validate_matrix(const DistanceMatrix& m) {
  const std::size_t n = m.labels.size();
  if (m.values.size() != n)
    throw Error(ErrorCode::invalid_matrix, "matrix row count != label count");
  for (std::size_t i = 0; i < n; ++i) {
    if (m.values[i].size() != n)
      throw Error(ErrorCode::invalid_matrix, "matrix is not square");
    if (std::abs(m.values[i][i]) > 1e-12)
      throw Error(ErrorCode::invalid_matrix,
                  "nonzero diagonal at '" + m.labels[i] + "'");
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(m.values[i][j] - m.values[j][i]) > 1e-12)
        throw Error(ErrorCode::invalid_matrix,
                    "asymmetric at (" + m.labels[i] + ", " + m.labels[j] + ")");
  }
}

// Union-find over label indices.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

Classification classify(const DistanceMatrix& m, const ClassifierConfig& cfg) {
  validate_matrix(m);
  const std::size_t n = m.labels.size();

  Classification result;
  result.threshold = cfg.threshold;
  DisjointSets sets(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (m.values[i][j] <= cfg.threshold) {
        result.pairs.push_back({m.labels[i], m.labels[j], m.values[i][j]});
        sets.unite(i, j);
      }
    }
  }

  // Components in first-member label order, members in label order.
  std::map<std::size_t, std::vector<std::string>> components;
  for (std::size_t i = 0; i < n; ++i)
    components[sets.find(i)].push_back(m.labels[i]);
  for (auto& [root, members] : components)
    result.clusters.push_back(std::move(members));
  return result;
}

std::string classification_to_json(const Classification& c) {
  nlohmann::json doc;
  doc["threshold"] = c.threshold;
  doc["pairs"] = nlohmann::json::array();
  for (const ClassifiedPair& p : c.pairs)
    doc["pairs"].push_back(
        {{"first", p.first}, {"second", p.second}, {"distance", p.distance}});
  doc["clusters"] = c.clusters;
  return doc.dump(2) + "\n";
}

std::string render_threshold_table(const DistanceMatrix& m, double threshold) {
  const std::size_t n = m.labels.size();
  std::size_t width = 8;
  for (const auto& label : m.labels) width = std::max(width, label.size() + 1);

  auto pad = [&](const std::string& s) {
    std::string out = s;
    out.resize(width, ' ');
    return out;
  };

  std::string out = pad("");
  for (const auto& label : m.labels) out += pad(label);
  out += "\n";
  char buf[32];
  for (std::size_t i = 0; i < n; ++i) {
    out += pad(m.labels[i]);
    for (std::size_t j = 0; j < n; ++j) {
      bool hit = i != j && m.values[i][j] <= threshold;
      std::snprintf(buf, sizeof buf, "%.3f%s", m.values[i][j], hit ? "*" : "");
      out += pad(buf);
    }
    out += "\n";
  }
  return out;
}

CalibrationResult calibrate_threshold(
    const DistanceMatrix& m,
    const std::map<std::string, std::string>& labels) {
  validate_matrix(m);
  std::vector<const std::string*> family(m.labels.size());
  std::set<std::string> families;
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    auto it = labels.find(m.labels[i]);
    if (it == labels.end())
      throw Error(ErrorCode::invalid_matrix,
                  "no family label for '" + m.labels[i] + "'");
    family[i] = &it->second;
    families.insert(it->second);
  }
  if (families.size() < 2)
    throw Error(ErrorCode::invalid_matrix,
                "calibration needs at least two families");

  CalibrationResult r;
  r.max_intra = 0.0;
  r.min_inter = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m.labels.size(); ++i) {
    for (std::size_t j = i + 1; j < m.labels.size(); ++j) {
      if (*family[i] == *family[j])
        r.max_intra = std::max(r.max_intra, m.values[i][j]);
      else
        r.min_inter = std::min(r.min_inter, m.values[i][j]);
    }
  }
  r.valid = r.max_intra < r.min_inter;
  r.threshold = r.valid ? r.max_intra : 0.0;
  return r;
}

std::string calibration_to_json(const CalibrationResult& r) {
  nlohmann::json doc;
  doc["valid"] = r.valid;
  doc["max_intra"] = r.max_intra;
  doc["min_inter"] = r.min_inter;
  if (r.valid) doc["threshold"] = r.threshold;
  return doc.dump(2) + "\n";
}

}  // namespace ophist
