#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "ophist/classify.hpp"

using namespace ophist;

namespace {

DistanceMatrix matrix_of(std::vector<std::string> labels,
                         std::vector<std::vector<double>> values) {
  DistanceMatrix m;
  m.labels = std::move(labels);
  m.values = std::move(values);
  return m;
}

}  // namespace

TEST_CASE("classify: all-zero matrix forms one cluster") {
  DistanceMatrix m = matrix_of({"a", "b", "c"},
                               {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}});
  Classification c = classify(m, {0.0});
  REQUIRE(c.clusters.size() == 1);
  CHECK(c.clusters[0] == std::vector<std::string>{"a", "b", "c"});
  CHECK(c.pairs.size() == 3);
}

TEST_CASE("classify: working threshold splits near from far") {
  DistanceMatrix m = matrix_of(
      {"a", "b", "c"},
      {{0.0, 0.01, 0.5}, {0.01, 0.0, 0.5}, {0.5, 0.5, 0.0}});
  Classification c = classify(m, {0.057});
  REQUIRE(c.clusters.size() == 2);
  CHECK(c.clusters[0] == std::vector<std::string>{"a", "b"});
  CHECK(c.clusters[1] == std::vector<std::string>{"c"});
  REQUIRE(c.pairs.size() == 1);
  CHECK(c.pairs[0] == ClassifiedPair{"a", "b", 0.01});
}

TEST_CASE("classify: threshold boundary is inclusive") {
  DistanceMatrix m = matrix_of(
      {"a", "b", "c"},
      {{0.0, 0.0, 0.3}, {0.0, 0.0, 0.3}, {0.3, 0.3, 0.0}});
  Classification c = classify(m, {0.0});
  REQUIRE(c.clusters.size() == 2);
  CHECK(c.clusters[0] == std::vector<std::string>{"a", "b"});

  // a pair exactly at the threshold counts
  DistanceMatrix exact = matrix_of({"x", "y"}, {{0.0, 0.057}, {0.057, 0.0}});
  CHECK(classify(exact, {0.057}).pairs.size() == 1);
  CHECK(classify(exact, {0.056}).pairs.empty());
}

TEST_CASE("classify: transitive chaining (single linkage)") {
  // a-b and b-c linked, a-c not: all three still share a cluster
  DistanceMatrix m = matrix_of(
      {"a", "b", "c"},
      {{0.0, 0.04, 0.10}, {0.04, 0.0, 0.04}, {0.10, 0.04, 0.0}});
  Classification c = classify(m, {0.057});
  REQUIRE(c.clusters.size() == 1);
  CHECK(c.pairs.size() == 2);
}

TEST_CASE("classify: matrix validation") {
  auto code_of = [](const DistanceMatrix& m) {
    try {
      classify(m, {0.1});
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::io_error;
  };
  CHECK(code_of(matrix_of({"a", "b"}, {{0.0, 0.2}, {0.3, 0.0}})) ==
        ErrorCode::invalid_matrix);
  CHECK(code_of(matrix_of({"a", "b"}, {{0.1, 0.2}, {0.2, 0.0}})) ==
        ErrorCode::invalid_matrix);
  CHECK(code_of(matrix_of({"a", "b"}, {{0.0, 0.2}})) ==
        ErrorCode::invalid_matrix);
  // tolerance: asymmetry within 1e-12 passes
  DistanceMatrix ok = matrix_of({"a", "b"}, {{0.0, 0.2}, {0.2 + 5e-13, 0.0}});
  CHECK_NOTHROW(classify(ok, {0.1}));
}

TEST_CASE("classify: monotonicity in the threshold (property)") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 2 + rng() % 6;
    DistanceMatrix m;
    for (std::size_t i = 0; i < n; ++i) m.labels.push_back("p" + std::to_string(i));
    m.values.assign(n, std::vector<double>(n, 0.0));
    double max_value = 0.0;
    double min_positive = 1e9;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        double v = static_cast<double>(rng() % 1000) / 1000.0;
        m.values[i][j] = m.values[j][i] = v;
        max_value = std::max(max_value, v);
        if (v > 0) min_positive = std::min(min_positive, v);
      }
    }
    double t1 = static_cast<double>(rng() % 1000) / 1000.0;
    double t2 = t1 + static_cast<double>(rng() % 1000) / 1000.0;
    Classification c1 = classify(m, {t1});
    Classification c2 = classify(m, {t2});
    CHECK(c1.pairs.size() <= c2.pairs.size());
    CHECK(c1.clusters.size() >= c2.clusters.size());

    // at the max off-diagonal value, everything is one cluster
    CHECK(classify(m, {max_value}).clusters.size() == 1);
    // strictly below the min positive value, only zero-distance merges
    Classification zero = classify(m, {min_positive / 2.0});
    for (const ClassifiedPair& pair : zero.pairs) CHECK(pair.distance == 0.0);
  }
}

TEST_CASE("calibrate_threshold: separable, tight and overlapping corpora") {
  std::map<std::string, std::string> labels = {
      {"a1", "A"}, {"a2", "A"}, {"b1", "B"}, {"b2", "B"}};

  DistanceMatrix wide = matrix_of({"a1", "a2", "b1", "b2"},
                                  {{0.0, 0.0, 0.2, 0.25},
                                   {0.0, 0.0, 0.22, 0.2},
                                   {0.2, 0.22, 0.0, 0.0},
                                   {0.25, 0.2, 0.0, 0.0}});
  CalibrationResult r = calibrate_threshold(wide, labels);
  CHECK(r.valid);
  CHECK(r.threshold == 0.0);
  CHECK(r.max_intra == 0.0);
  CHECK(r.min_inter == 0.2);
  Classification c = classify(wide, {r.threshold});
  REQUIRE(c.clusters.size() == 2);
  CHECK(c.clusters[0] == std::vector<std::string>{"a1", "a2"});
  CHECK(c.clusters[1] == std::vector<std::string>{"b1", "b2"});

  // intra max 0.056 just under inter min 0.058
  DistanceMatrix tight = matrix_of({"a1", "a2", "b1", "b2"},
                                   {{0.0, 0.056, 0.058, 0.06},
                                    {0.056, 0.0, 0.06, 0.058},
                                    {0.058, 0.06, 0.0, 0.056},
                                    {0.06, 0.058, 0.056, 0.0}});
  CalibrationResult rt = calibrate_threshold(tight, labels);
  CHECK(rt.valid);
  CHECK(rt.threshold == 0.056);
  Classification ct = classify(tight, {rt.threshold});
  CHECK(ct.clusters.size() == 2);

  // overlap: intra max above inter min is reported, not thrown
  DistanceMatrix overlap = matrix_of({"a1", "a2", "b1", "b2"},
                                     {{0.0, 0.3, 0.1, 0.4},
                                      {0.3, 0.0, 0.4, 0.1},
                                      {0.1, 0.4, 0.0, 0.3},
                                      {0.4, 0.1, 0.3, 0.0}});
  CalibrationResult ro = calibrate_threshold(overlap, labels);
  CHECK(!ro.valid);
  CHECK(ro.max_intra == 0.3);
  CHECK(ro.min_inter == 0.1);
}

TEST_CASE("calibrate_threshold: label requirements") {
  DistanceMatrix m = matrix_of({"a", "b"}, {{0.0, 0.1}, {0.1, 0.0}});
  try {
    calibrate_threshold(m, {{"a", "A"}});
    FAIL("expected error for unlabeled id");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_matrix);
  }
  try {
    calibrate_threshold(m, {{"a", "A"}, {"b", "A"}});
    FAIL("expected error for single family");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::invalid_matrix);
  }
}

TEST_CASE("classification json and table rendering") {
  DistanceMatrix m = matrix_of({"a", "b"}, {{0.0, 0.01}, {0.01, 0.0}});
  Classification c = classify(m, {0.057});
  std::string json = classification_to_json(c);
  CHECK(json.find("\"threshold\": 0.057") != std::string::npos);
  CHECK(json.find("\"clusters\"") != std::string::npos);

  std::string table = render_threshold_table(m, 0.057);
  CHECK(table.find("0.010*") != std::string::npos);  // flagged cell
  CHECK(table.find("0.000*") == std::string::npos);  // diagonal unflagged
}
