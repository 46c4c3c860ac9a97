#include "staplegrid/serial.hpp"

#include <algorithm>

#include "staplegrid/error.hpp"

namespace staplegrid {

namespace {

Bytes strip_leading_zeros(BytesView v) {
  auto it = std::find_if(v.begin(), v.end(), [](std::uint8_t b) { return b != 0; });
  return Bytes(it, v.end());
}

}  // namespace

SerialNumber SerialNumber::from_magnitude(BytesView big_endian) {
  SerialNumber s;
  s.magnitude_ = strip_leading_zeros(big_endian);
  return s;
}

SerialNumber SerialNumber::from_hex(std::string_view hex) {
  if (hex.starts_with("0x") || hex.starts_with("0X")) hex.remove_prefix(2);
  if (hex.empty()) fail(Errc::InvalidArgument, "empty serial");
  return from_magnitude(staplegrid::from_hex(hex));
}

SerialNumber SerialNumber::from_decimal(std::string_view decimal) {
  if (decimal.empty()) fail(Errc::InvalidArgument, "empty serial");
  // Little-endian base-256 accumulator.
  Bytes acc;
  for (char c : decimal) {
    if (c < '0' || c > '9') fail(Errc::InvalidArgument, "bad decimal serial");
    unsigned carry = static_cast<unsigned>(c - '0');
    for (auto& b : acc) {
      unsigned v = b * 10u + carry;
      b = static_cast<std::uint8_t>(v & 0xFF);
      carry = v >> 8;
    }
    while (carry) {
      acc.push_back(static_cast<std::uint8_t>(carry & 0xFF));
      carry >>= 8;
    }
  }
  std::reverse(acc.begin(), acc.end());
  return from_magnitude(acc);
}

SerialNumber SerialNumber::from_u64(std::uint64_t v) {
  Bytes b(8);
  for (int i = 7; i >= 0; --i) {
    b[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(v & 0xFF);
    v >>= 8;
  }
  return from_magnitude(b);
}

SerialNumber SerialNumber::from_der_content(BytesView c) {
  if (c.empty()) fail(Errc::MalformedDer, "empty INTEGER");
  if (c.size() > 1 && ((c[0] == 0x00 && !(c[1] & 0x80)) || (c[0] == 0xFF && (c[1] & 0x80)))) {
    fail(Errc::MalformedDer, "non-minimal INTEGER");
  }
  if (c[0] & 0x80) fail(Errc::MalformedDer, "negative serial number");
  return from_magnitude(c);
}

Bytes SerialNumber::der_content() const {
  Bytes out;
  if (magnitude_.empty() || (magnitude_[0] & 0x80)) out.push_back(0x00);
  append(out, magnitude_);
  return out;
}

std::string SerialNumber::to_hex() const {
  if (magnitude_.empty()) return "0";
  return staplegrid::to_hex(magnitude_);
}

std::string SerialNumber::to_decimal() const {
  if (magnitude_.empty()) return "0";
  Bytes work = magnitude_;
  std::string digits;
  while (!work.empty()) {
    unsigned rem = 0;
    for (auto& b : work) {
      unsigned cur = (rem << 8) | b;
      b = static_cast<std::uint8_t>(cur / 10);
      rem = cur % 10;
    }
    digits.push_back(static_cast<char>('0' + rem));
    work = strip_leading_zeros(work);
  }
  std::reverse(digits.begin(), digits.end());
  return digits;
}

std::strong_ordering operator<=>(const SerialNumber& a, const SerialNumber& b) {
  if (a.magnitude_.size() != b.magnitude_.size()) return a.magnitude_.size() <=> b.magnitude_.size();
  return std::lexicographical_compare_three_way(a.magnitude_.begin(), a.magnitude_.end(),
                                                b.magnitude_.begin(), b.magnitude_.end());
}

std::size_t SerialNumberHash::operator()(const SerialNumber& s) const noexcept {
  // FNV-1a
  std::size_t h = 1469598103934665603ull;
  for (auto b : s.magnitude()) {
    h ^= b;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace staplegrid
