#ifndef OPHIST_DIGEST_HPP
#define OPHIST_DIGEST_HPP

#include <cstdint>
#include <string>
#include <string_view>

namespace ophist {

// FNV-1a 64-bit content digest, rendered as "fnv1a64:<16 hex digits>".
// Integrity check for caches and manifests, not a cryptographic hash.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

inline std::string content_digest(std::string_view data) {
  static const char* hex = "0123456789abcdef";
  std::uint64_t h = fnv1a64(data);
  std::string out = "fnv1a64:";
  for (int shift = 60; shift >= 0; shift -= 4)
    out += hex[(h >> shift) & 0xf];
  return out;
}

}  // namespace ophist

#endif  // OPHIST_DIGEST_HPP
