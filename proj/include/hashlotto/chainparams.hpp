#pragma once

// Proof-of-work target representation: compact bits, difficulty, exact
// 256-bit targets and the per-hash success probability they imply.

#include <boost/multiprecision/cpp_int.hpp>

#include <compare>
#include <cstdint>
#include <string>
#include <string_view>

namespace hashlotto {

using uint256 = boost::multiprecision::uint256_t;

/// Exact proof-of-work target. A hash wins iff its value is below the target.
/// Always in (0, 2^256).
class Target256 {
 public:
  explicit Target256(const uint256& value);

  const uint256& value() const noexcept { return value_; }

  /// Nearest double (relative error <= 2^-52).
  double to_double() const;

  /// 64 lowercase hex digits, no prefix.
  std::string hex() const;

  friend bool operator==(const Target256&, const Target256&) = default;
  friend std::strong_ordering operator<=>(const Target256& a, const Target256& b) {
    if (a.value_ < b.value_) return std::strong_ordering::less;
    if (a.value_ > b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

 private:
  uint256 value_;
};

/// Compact ("nBits") target encoding: exponent byte followed by a 3-byte
/// mantissa, value = mantissa * 256^(exponent - 3).
struct CompactBits {
  std::uint32_t bits = 0;

  constexpr std::uint32_t exponent() const noexcept { return bits >> 24; }
  constexpr std::uint32_t mantissa() const noexcept { return bits & 0x00ffffffu; }

  friend constexpr bool operator==(CompactBits, CompactBits) = default;
};

struct Difficulty {
  double value = 0.0;
};

struct HashProbability {
  double p = 0.0;
};

/// Mainnet difficulty-1 target, 0xffff * 256^26 (compact 0x1d00ffff).
const Target256& mainnet_difficulty_one();

Target256 decode_compact(CompactBits bits);

/// Standard compact re-encoding (mantissa truncated to 3 bytes).
CompactBits encode_compact(const Target256& target);

/// floor(T1 / d), computed exactly from the binary expansion of d.
Target256 target_from_difficulty(Difficulty d, const Target256& t1 = mainnet_difficulty_one());

Difficulty difficulty_from_target(const Target256& target,
                                  const Target256& t1 = mainnet_difficulty_one());

/// p = target / 2^256.
HashProbability success_probability(const Target256& target);

/// Accepts exactly 8 hex digits with an optional 0x/0X prefix.
CompactBits parse_compact(std::string_view text);

/// Decimal or scientific notation; must be finite and positive.
Difficulty parse_difficulty(std::string_view text);

std::string format_compact(CompactBits bits);

}  // namespace hashlotto
