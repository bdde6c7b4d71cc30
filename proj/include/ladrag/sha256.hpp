#pragma once

#include <string>
#include <string_view>

namespace ladrag {

// FIPS 180-4 SHA-256, lowercase hex digest. Self-contained so replay
// fingerprints do not depend on a crypto library being linked.
std::string sha256_hex(std::string_view data);

// FNV-1a 64-bit. Stable across platforms, used by the hashing embedder.
std::uint64_t fnv1a64(std::string_view data);

}  // namespace ladrag
