#include "ophist/histogram.hpp"

#include <json.hpp>

namespace ophist {

double OpcodeHistogram::total() const {
  double sum = 0.0;
  for (const auto& [mnem, value] : bins) sum += value;
  return sum;
}

OpcodeHistogram build_histogram(const Subroutine& sub,
                                std::string_view program_id) {
  if (sub.body.empty())
    throw Error(ErrorCode::empty_subroutine,
                "subroutine '" + sub.name + "' has an empty body");
  OpcodeHistogram h;
  h.kind = HistogramKind::raw;
  h.program_id = std::string(program_id);
  h.subroutine = sub.name;
  for (const Instruction& instr : sub.body)
    h.bins[instr.mnemonic.str()] += 1.0;
  return h;
}

OpcodeHistogram normalize(const OpcodeHistogram& h) {
  if (h.kind != HistogramKind::raw)
    throw Error(ErrorCode::kind_mismatch, "normalize expects a raw histogram");
  double mass = h.total();
  if (mass <= 0.0)
    throw Error(ErrorCode::zero_mass, "cannot normalize a zero-mass histogram");
  OpcodeHistogram out = h;
  out.kind = HistogramKind::normalized;
  for (auto& [mnem, value] : out.bins) value /= mass;
  return out;
}

HistogramSet extract_features(const Program& program,
                              std::vector<std::string>* skipped) {
  HistogramSet set;
  set.program_id = program.id;
  for (const Subroutine& sub : program.subroutines) {
    if (sub.empty()) {
      if (skipped) skipped->push_back(sub.name);
      continue;
    }
    set.histograms.push_back(normalize(build_histogram(sub, program.id)));
  }
  if (set.histograms.empty())
    throw Error(ErrorCode::no_features,
                "program '" + program.id + "' has no non-empty subroutines");
  return set;
}

std::string cache_to_json(const HistogramSet& set,
                          std::string_view source_digest) {
  nlohmann::json doc;
  doc["id"] = set.program_id;
  doc["digest"] = std::string(source_digest);
  doc["kind"] = "normalized";
  doc["histograms"] = nlohmann::json::array();
  for (const OpcodeHistogram& h : set.histograms) {
    nlohmann::json entry;
    entry["subroutine"] = h.subroutine;
    entry["bins"] = nlohmann::json::object();
    for (const auto& [mnem, value] : h.bins) entry["bins"][mnem] = value;
    doc["histograms"].push_back(std::move(entry));
  }
  return doc.dump(2) + "\n";
}

CachedFeatures cache_from_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error,
                std::string("malformed histogram cache: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("id") || !doc.contains("digest") ||
      !doc.contains("histograms") || !doc["histograms"].is_array())
    throw Error(ErrorCode::io_error, "histogram cache misses required fields");

  CachedFeatures cached;
  try {
    cached.source_digest = doc["digest"].get<std::string>();
    cached.set.program_id = doc["id"].get<std::string>();
    for (const auto& entry : doc["histograms"]) {
      if (!entry.contains("subroutine") || !entry.contains("bins") ||
          !entry["bins"].is_object())
        throw Error(ErrorCode::io_error, "histogram cache entry is malformed");
      OpcodeHistogram h;
      h.kind = HistogramKind::normalized;
      h.program_id = cached.set.program_id;
      h.subroutine = entry["subroutine"].get<std::string>();
      for (const auto& [mnem, value] : entry["bins"].items()) {
        if (!value.is_number())
          throw Error(ErrorCode::io_error, "non-numeric bin in histogram cache");
        h.bins[mnem] = value.get<double>();
      }
      cached.set.histograms.push_back(std::move(h));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::io_error,
                std::string("malformed histogram cache: ") + e.what());
  }
  return cached;
}

}  // namespace ophist
