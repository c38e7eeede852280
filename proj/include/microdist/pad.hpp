#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "microdist/rng.hpp"

namespace microdist {

/// One-time pad shared between sensor and defender: bit i fixes the sign of
/// the distortion at slot i. Pads are consumed monotonically and never
/// cycled; see inject() and the evaluation harness.
struct SecretPad {
  std::vector<std::uint8_t> bits;  // each element is 0 or 1

  std::size_t size() const { return bits.size(); }
};

namespace detail {

inline void fill_pad(std::vector<std::uint8_t>& bits, std::size_t n,
                     std::uint64_t seed) {
  bits.resize(n);
  Rng rng(seed);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned shift = static_cast<unsigned>(i % 64);
    if (shift == 0) word = rng.next_u64();
    bits[i] = static_cast<std::uint8_t>((word >> shift) & 1ull);
  }
}

}  // namespace detail

/// n fair independent bits, deterministic per seed. Determinism is for
/// reproducible experiments only; a deployment must draw pad bits from a
/// cryptographically secure source.
inline SecretPad generate_pad(std::size_t n, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("pad length must be >= 1");
  SecretPad pad;
  detail::fill_pad(pad.bits, n, seed);
  return pad;
}

/// Parse '0'/'1' text; whitespace is ignored. Positions in errors are
/// 1-based character offsets into the text.
inline SecretPad parse_pad(std::string_view text) {
  SecretPad pad;
  pad.bits.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '0' || c == '1') {
      pad.bits.push_back(static_cast<std::uint8_t>(c - '0'));
    } else if (c == ' ' || c == '\t' || c == '\n' || c == '\r') {
      continue;
    } else {
      throw std::runtime_error("invalid pad character at position " +
                               std::to_string(i + 1));
    }
  }
  if (pad.bits.empty()) throw std::runtime_error("pad file holds no bits");
  return pad;
}

inline SecretPad load_pad(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open pad file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_pad(buf.str());
}

/// Plain text, newline every 64 bits.
inline void save_pad(const SecretPad& pad, const std::filesystem::path& path) {
  if (pad.bits.empty()) throw std::invalid_argument("refusing to save empty pad");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write pad file: " + path.string());
  for (std::size_t i = 0; i < pad.bits.size(); ++i) {
    out.put(pad.bits[i] ? '1' : '0');
    if ((i + 1) % 64 == 0) out.put('\n');
  }
  if (pad.bits.size() % 64 != 0) out.put('\n');
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace microdist
