#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "staplegrid/bytes.hpp"
#include "staplegrid/time.hpp"

namespace staplegrid {

class SerialNumber;

// Object identifier kept in its encoded (content octet) form.
class Oid {
 public:
  Oid() = default;
  explicit Oid(std::string_view dotted);
  static Oid from_encoded(BytesView content);

  const Bytes& encoded() const noexcept { return encoded_; }
  std::string to_string() const;

  friend bool operator==(const Oid&, const Oid&) = default;

 private:
  Bytes encoded_;
};

namespace der {

inline constexpr std::uint8_t kBoolean = 0x01;
inline constexpr std::uint8_t kInteger = 0x02;
inline constexpr std::uint8_t kBitString = 0x03;
inline constexpr std::uint8_t kOctetString = 0x04;
inline constexpr std::uint8_t kNull = 0x05;
inline constexpr std::uint8_t kOid = 0x06;
inline constexpr std::uint8_t kEnumerated = 0x0A;
inline constexpr std::uint8_t kUtf8String = 0x0C;
inline constexpr std::uint8_t kPrintableString = 0x13;
inline constexpr std::uint8_t kIa5String = 0x16;
inline constexpr std::uint8_t kUtcTime = 0x17;
inline constexpr std::uint8_t kGeneralizedTime = 0x18;
inline constexpr std::uint8_t kSequence = 0x30;
inline constexpr std::uint8_t kSet = 0x31;

constexpr std::uint8_t context(unsigned n, bool constructed) {
  return static_cast<std::uint8_t>(0x80 | (constructed ? 0x20 : 0x00) | n);
}
constexpr std::uint8_t explicit_tag(unsigned n) { return context(n, true); }

struct Element {
  std::uint8_t tag = 0;
  BytesView content;
  BytesView encoded;  // tag + length + content
};

// Strict DER reader: definite minimal lengths, low tag numbers only. Any
// violation, and any read past the end, throws Error(MalformedDer).
class Reader {
 public:
  explicit Reader(BytesView data) : data_(data) {}

  bool empty() const noexcept { return pos_ >= data_.size(); }
  std::optional<std::uint8_t> peek_tag() const noexcept;

  Element read();
  Element read(std::uint8_t expected_tag);
  std::optional<Element> read_optional(std::uint8_t tag);
  Reader enter(std::uint8_t tag) { return Reader(read(tag).content); }

  void expect_end() const;

 private:
  BytesView data_;
  std::size_t pos_ = 0;
};

// Parses exactly one element spanning all of `data`.
Element parse_single(BytesView data, std::uint8_t expected_tag);

// Primitive decoders over element content.
bool decode_boolean(const Element& e);
std::int64_t decode_small_integer(const Element& e);
Oid decode_oid(const Element& e);
// BIT STRING content with the unused-bits octet stripped; only whole-octet strings accepted.
BytesView decode_bit_string(const Element& e);
UtcTime decode_time(const Element& e);  // UTCTime or GeneralizedTime
std::string decode_string(const Element& e);

// Writers. Each returns a complete TLV.
Bytes tlv(std::uint8_t tag, BytesView content);
// In-place variants for hot paths that build large structures.
void append_header(Bytes& out, std::uint8_t tag, std::size_t len);
void append_tlv(Bytes& out, std::uint8_t tag, BytesView content);
std::size_t tlv_size(std::size_t len) noexcept;
Bytes concat(std::initializer_list<BytesView> parts);
Bytes sequence(std::initializer_list<BytesView> parts);
Bytes set(std::initializer_list<BytesView> parts);
Bytes explicit_wrap(unsigned n, BytesView inner);

Bytes boolean(bool v);
Bytes integer(std::int64_t v);
Bytes integer(const SerialNumber& v);
Bytes enumerated(std::int64_t v);
Bytes null();
Bytes oid(const Oid& v);
Bytes octet_string(BytesView v);
Bytes bit_string(BytesView v, std::uint8_t unused_bits = 0);
Bytes generalized_time(UtcTime t);
// UTCTime through 2049, GeneralizedTime afterwards (X.509 validity rule).
Bytes x509_time(UtcTime t);
Bytes ia5_string(std::string_view s);
Bytes utf8_string(std::string_view s);
Bytes printable_string(std::string_view s);

}  // namespace der
}  // namespace staplegrid
