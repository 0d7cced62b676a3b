#ifndef OPHIST_HISTOGRAM_HPP
#define OPHIST_HISTOGRAM_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "ophist/asmcore.hpp"

namespace ophist {

enum class HistogramKind { raw, normalized };

// Per-subroutine opcode frequency histogram. Bins are keyed by mnemonic and
// never store zero values (absence means zero). Raw bins hold integral
// counts; normalized bins hold frequencies in (0,1] summing to 1.
struct OpcodeHistogram {
  HistogramKind kind = HistogramKind::raw;
  std::map<std::string, double> bins;  // sorted keys: deterministic iteration
  std::string program_id;
  std::string subroutine;

  double total() const;
  bool operator==(const OpcodeHistogram&) const = default;
};

// Ordered histograms of one program, one per non-empty subroutine.
struct HistogramSet {
  std::string program_id;
  std::vector<OpcodeHistogram> histograms;
  bool operator==(const HistogramSet&) const = default;
};

// Raw occurrence counts of sub.body. Throws empty_subroutine.
OpcodeHistogram build_histogram(const Subroutine& sub,
                                std::string_view program_id = "");

// Divides every bin by the total mass. Throws kind_mismatch on a
// non-raw input and zero_mass when the total is zero.
OpcodeHistogram normalize(const OpcodeHistogram& h);

// One normalized histogram per non-empty subroutine, in source order.
// Empty subroutines are skipped; their names go to *skipped when given.
// Throws no_features when every subroutine is empty.
HistogramSet extract_features(const Program& program,
                              std::vector<std::string>* skipped = nullptr);

// --------------------------------------------------------------------------
// Histogram cache (.hist.json): id, source digest, ordered normalized
// histograms with bins sorted by mnemonic.
// --------------------------------------------------------------------------

std::string cache_to_json(const HistogramSet& set,
                          std::string_view source_digest);

struct CachedFeatures {
  HistogramSet set;
  std::string source_digest;
};

// Throws io_error on malformed documents.
CachedFeatures cache_from_json(std::string_view json_text);

}  // namespace ophist

#endif  // OPHIST_HISTOGRAM_HPP
