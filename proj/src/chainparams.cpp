#include "hashlotto/chainparams.hpp"

#include "hashlotto/error.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <limits>

namespace hashlotto {

namespace mp = boost::multiprecision;

namespace {

// Correctly rounded conversion: the top 64 bits plus a sticky bit for
// anything shifted out, then a single uint64 -> double rounding.
double to_double_rounded(const uint256& v) {
  if (v == 0) return 0.0;
  const unsigned msb = mp::msb(v);
  if (msb < 64) return static_cast<double>(static_cast<std::uint64_t>(v));
  const unsigned shift = msb - 63;
  std::uint64_t top = static_cast<std::uint64_t>(v >> shift);
  const uint256 dropped = v & ((uint256(1) << shift) - 1);
  if (dropped != 0) top |= 1u;
  return std::ldexp(static_cast<double>(top), static_cast<int>(shift));
}

}  // namespace

Target256::Target256(const uint256& value) : value_(value) {
  if (value_ == 0) throw Error(Errc::InvalidTarget, "target must be positive");
}

double Target256::to_double() const { return to_double_rounded(value_); }

std::string Target256::hex() const {
  std::string out(64, '0');
  uint256 v = value_;
  for (int i = 63; i >= 0 && v != 0; --i) {
    out[static_cast<std::size_t>(i)] = "0123456789abcdef"[static_cast<unsigned>(v & 0xf)];
    v >>= 4;
  }
  return out;
}

const Target256& mainnet_difficulty_one() {
  static const Target256 t1 = decode_compact(CompactBits{0x1d00ffffu});
  return t1;
}

Target256 decode_compact(CompactBits bits) {
  const std::uint32_t exponent = bits.exponent();
  const std::uint32_t mantissa = bits.mantissa();
  if (mantissa & 0x00800000u) {
    throw Error(Errc::NegativeTarget, "mantissa sign bit set in " + format_compact(bits));
  }
  if (mantissa == 0) throw Error(Errc::ZeroMantissa, format_compact(bits));
  if (exponent < 3 || exponent > 32) {
    throw Error(Errc::ExponentOutOfRange,
                "exponent " + std::to_string(exponent) + " not in [3, 32]");
  }
  // mantissa < 2^23, so 256^(exponent-3) * mantissa overflows iff the
  // mantissa's top byte lands beyond bit 255.
  const unsigned shift = 8 * (exponent - 3);
  const unsigned mantissa_bits = 32 - static_cast<unsigned>(__builtin_clz(mantissa));
  if (shift + mantissa_bits > 256) {
    throw Error(Errc::Overflow, format_compact(bits) + " exceeds 2^256");
  }
  return Target256(uint256(mantissa) << shift);
}

CompactBits encode_compact(const Target256& target) {
  const uint256& v = target.value();
  std::uint32_t size = (mp::msb(v) / 8) + 1;
  std::uint32_t compact = 0;
  if (size <= 3) {
    compact = static_cast<std::uint32_t>(v) << (8 * (3 - size));
  } else {
    compact = static_cast<std::uint32_t>(v >> (8 * (size - 3)));
  }
  if (compact & 0x00800000u) {
    compact >>= 8;
    ++size;
  }
  return CompactBits{compact | (size << 24)};
}

Target256 target_from_difficulty(Difficulty d, const Target256& t1) {
  if (!(d.value > 0.0) || !std::isfinite(d.value)) {
    throw Error(Errc::NonPositiveDifficulty, "difficulty must be finite and > 0");
  }
  // d = mantissa * 2^exp2 exactly, with a 53-bit integer mantissa.
  int exp2 = 0;
  const double frac = std::frexp(d.value, &exp2);
  const auto mantissa = static_cast<std::uint64_t>(std::ldexp(frac, 53));
  exp2 -= 53;

  mp::cpp_int num = t1.value();
  mp::cpp_int den = mantissa;
  if (exp2 < 0) {
    num <<= -exp2;
  } else {
    den <<= exp2;
  }
  const mp::cpp_int q = num / den;
  if (q == 0) throw Error(Errc::DifficultyTooLarge, "target truncates to zero");
  if (mp::msb(q) >= 256) throw Error(Errc::Overflow, "target exceeds 2^256");
  return Target256(static_cast<uint256>(q));
}

Difficulty difficulty_from_target(const Target256& target, const Target256& t1) {
  return Difficulty{t1.to_double() / target.to_double()};
}

HashProbability success_probability(const Target256& target) {
  return HashProbability{std::ldexp(target.to_double(), -256)};
}

CompactBits parse_compact(std::string_view text) {
  std::string_view digits = text;
  if (digits.starts_with("0x") || digits.starts_with("0X")) digits.remove_prefix(2);
  if (digits.size() != 8) {
    throw Error(Errc::ParseError, "compact bits need 8 hex digits: '" + std::string(text) + "'");
  }
  std::uint32_t bits = 0;
  const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), bits, 16);
  if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
    throw Error(Errc::ParseError, "invalid hex in compact bits: '" + std::string(text) + "'");
  }
  return CompactBits{bits};
}

Difficulty parse_difficulty(std::string_view text) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty()) {
    throw Error(Errc::ParseError, "invalid difficulty: '" + std::string(text) + "'");
  }
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw Error(Errc::NonPositiveDifficulty, "difficulty must be finite and > 0");
  }
  return Difficulty{value};
}

std::string format_compact(CompactBits bits) {
  char buf[11];
  std::snprintf(buf, sizeof buf, "0x%08x", bits.bits);
  return buf;
}

}  // namespace hashlotto
