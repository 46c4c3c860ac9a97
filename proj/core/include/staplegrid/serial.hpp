#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <string_view>

#include "staplegrid/bytes.hpp"

namespace staplegrid {

// Non-negative arbitrary-precision certificate serial number, stored as its
// minimal big-endian magnitude.
class SerialNumber {
 public:
  SerialNumber() = default;
  static SerialNumber from_magnitude(BytesView big_endian);
  static SerialNumber from_hex(std::string_view hex);
  static SerialNumber from_decimal(std::string_view decimal);
  static SerialNumber from_u64(std::uint64_t v);
  // DER INTEGER content octets; negative or non-minimal encodings are MalformedDer.
  static SerialNumber from_der_content(BytesView content);

  const Bytes& magnitude() const noexcept { return magnitude_; }
  bool is_zero() const noexcept { return magnitude_.empty(); }
  Bytes der_content() const;

  std::string to_hex() const;  // uppercase, no separators, "0" for zero
  std::string to_decimal() const;

  friend bool operator==(const SerialNumber&, const SerialNumber&) = default;
  friend std::strong_ordering operator<=>(const SerialNumber& a, const SerialNumber& b);

 private:
  Bytes magnitude_;
};

struct SerialNumberHash {
  std::size_t operator()(const SerialNumber& s) const noexcept;
};

}  // namespace staplegrid

template <>
struct std::hash<staplegrid::SerialNumber> : staplegrid::SerialNumberHash {};
