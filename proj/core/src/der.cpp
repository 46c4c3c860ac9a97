#include "staplegrid/der.hpp"

#include "staplegrid/error.hpp"
#include "staplegrid/serial.hpp"

namespace staplegrid {

namespace {

void encode_base128(Bytes& out, std::uint64_t v) {
  std::uint8_t tmp[10];
  int n = 0;
  do {
    tmp[n++] = static_cast<std::uint8_t>(v & 0x7F);
    v >>= 7;
  } while (v != 0);
  while (n > 0) {
    --n;
    out.push_back(static_cast<std::uint8_t>(tmp[n] | (n > 0 ? 0x80 : 0x00)));
  }
}

}  // namespace

Oid::Oid(std::string_view dotted) {
  std::vector<std::uint64_t> arcs;
  std::uint64_t cur = 0;
  bool any = false;
  for (char c : dotted) {
    if (c == '.') {
      if (!any) fail(Errc::InvalidArgument, "bad OID");
      arcs.push_back(cur);
      cur = 0;
      any = false;
    } else if (c >= '0' && c <= '9') {
      cur = cur * 10 + static_cast<std::uint64_t>(c - '0');
      any = true;
    } else {
      fail(Errc::InvalidArgument, "bad OID");
    }
  }
  if (!any) fail(Errc::InvalidArgument, "bad OID");
  arcs.push_back(cur);
  if (arcs.size() < 2 || arcs[0] > 2 || (arcs[0] < 2 && arcs[1] > 39)) {
    fail(Errc::InvalidArgument, "bad OID");
  }
  encode_base128(encoded_, arcs[0] * 40 + arcs[1]);
  for (std::size_t i = 2; i < arcs.size(); ++i) encode_base128(encoded_, arcs[i]);
}

Oid Oid::from_encoded(BytesView content) {
  if (content.empty() || (content.back() & 0x80) != 0) fail(Errc::MalformedDer, "bad OID encoding");
  bool start = true;
  for (auto b : content) {
    if (start && b == 0x80) fail(Errc::MalformedDer, "non-minimal OID arc");
    start = (b & 0x80) == 0;
  }
  Oid o;
  o.encoded_.assign(content.begin(), content.end());
  return o;
}

std::string Oid::to_string() const {
  std::string out;
  std::uint64_t v = 0;
  bool first = true;
  for (auto b : encoded_) {
    v = (v << 7) | (b & 0x7F);
    if (b & 0x80) continue;
    if (first) {
      std::uint64_t top = v < 80 ? v / 40 : 2;
      out = std::to_string(top) + "." + std::to_string(v - top * 40);
      first = false;
    } else {
      out += "." + std::to_string(v);
    }
    v = 0;
  }
  return out;
}

namespace der {

std::optional<std::uint8_t> Reader::peek_tag() const noexcept {
  if (empty()) return std::nullopt;
  return data_[pos_];
}

Element Reader::read() {
  const std::size_t start = pos_;
  const std::size_t size = data_.size();
  if (pos_ >= size) fail(Errc::MalformedDer, "unexpected end of data");
  std::uint8_t tag = data_[pos_++];
  if ((tag & 0x1F) == 0x1F) fail(Errc::MalformedDer, "high tag numbers unsupported");
  if (pos_ >= size) fail(Errc::MalformedDer, "truncated length");
  std::size_t len = data_[pos_++];
  if (len & 0x80) {
    std::size_t n = len & 0x7F;
    if (n == 0) fail(Errc::MalformedDer, "indefinite length");
    if (n > 4) fail(Errc::MalformedDer, "over-long length");
    if (size - pos_ < n) fail(Errc::MalformedDer, "truncated length");
    if (data_[pos_] == 0) fail(Errc::MalformedDer, "non-minimal length");
    len = 0;
    for (std::size_t i = 0; i < n; ++i) len = (len << 8) | data_[pos_++];
    if (len < 0x80) fail(Errc::MalformedDer, "non-minimal length");
  }
  if (size - pos_ < len) fail(Errc::MalformedDer, "truncated content");
  Element e;
  e.tag = tag;
  e.content = data_.subspan(pos_, len);
  pos_ += len;
  e.encoded = data_.subspan(start, pos_ - start);
  return e;
}

Element Reader::read(std::uint8_t expected_tag) {
  auto tag = peek_tag();
  if (!tag) fail(Errc::MalformedDer, "unexpected end of data");
  if (*tag != expected_tag) {
    fail(Errc::MalformedDer, "unexpected tag 0x" + to_hex(BytesView(&*tag, 1)) + ", wanted 0x" +
                                 to_hex(BytesView(&expected_tag, 1)));
  }
  return read();
}

std::optional<Element> Reader::read_optional(std::uint8_t tag) {
  if (peek_tag() != tag) return std::nullopt;
  return read();
}

void Reader::expect_end() const {
  if (!empty()) fail(Errc::MalformedDer, "trailing data");
}

Element parse_single(BytesView data, std::uint8_t expected_tag) {
  Reader r(data);
  Element e = r.read(expected_tag);
  r.expect_end();
  return e;
}

bool decode_boolean(const Element& e) {
  if (e.content.size() != 1 || (e.content[0] != 0x00 && e.content[0] != 0xFF)) {
    fail(Errc::MalformedDer, "bad BOOLEAN");
  }
  return e.content[0] == 0xFF;
}

std::int64_t decode_small_integer(const Element& e) {
  const auto& c = e.content;
  if (c.empty() || c.size() > 8) fail(Errc::MalformedDer, "bad small INTEGER");
  if (c.size() > 1 && ((c[0] == 0x00 && !(c[1] & 0x80)) || (c[0] == 0xFF && (c[1] & 0x80)))) {
    fail(Errc::MalformedDer, "non-minimal INTEGER");
  }
  std::int64_t v = (c[0] & 0x80) ? -1 : 0;
  for (auto b : c) v = static_cast<std::int64_t>(static_cast<std::uint64_t>(v) << 8 | b);
  return v;
}

Oid decode_oid(const Element& e) { return Oid::from_encoded(e.content); }

BytesView decode_bit_string(const Element& e) {
  if (e.content.empty()) fail(Errc::MalformedDer, "empty BIT STRING");
  if (e.content[0] != 0) fail(Errc::MalformedDer, "BIT STRING with unused bits");
  return e.content.subspan(1);
}

UtcTime decode_time(const Element& e) {
  std::string_view s(reinterpret_cast<const char*>(e.content.data()), e.content.size());
  if (e.tag == kUtcTime) return parse_utc_time(s);
  if (e.tag == kGeneralizedTime) return parse_generalized_time(s);
  fail(Errc::MalformedDer, "expected a time value");
}

std::string decode_string(const Element& e) {
  return std::string(reinterpret_cast<const char*>(e.content.data()), e.content.size());
}

void append_header(Bytes& out, std::uint8_t tag, std::size_t len) {
  out.push_back(tag);
  if (len < 0x80) {
    out.push_back(static_cast<std::uint8_t>(len));
    return;
  }
  std::uint8_t tmp[8];
  int n = 0;
  while (len > 0) {
    tmp[n++] = static_cast<std::uint8_t>(len & 0xFF);
    len >>= 8;
  }
  out.push_back(static_cast<std::uint8_t>(0x80 | n));
  while (n > 0) out.push_back(tmp[--n]);
}

void append_tlv(Bytes& out, std::uint8_t tag, BytesView content) {
  append_header(out, tag, content.size());
  append(out, content);
}

std::size_t tlv_size(std::size_t len) noexcept {
  std::size_t n = 2;
  if (len >= 0x80) {
    for (std::size_t v = len; v > 0; v >>= 8) ++n;
  }
  return n + len;
}

Bytes tlv(std::uint8_t tag, BytesView content) {
  Bytes out;
  out.reserve(tlv_size(content.size()));
  append_tlv(out, tag, content);
  return out;
}

Bytes concat(std::initializer_list<BytesView> parts) {
  std::size_t total = 0;
  for (auto p : parts) total += p.size();
  Bytes out;
  out.reserve(total);
  for (auto p : parts) append(out, p);
  return out;
}

Bytes sequence(std::initializer_list<BytesView> parts) { return tlv(kSequence, concat(parts)); }
Bytes set(std::initializer_list<BytesView> parts) { return tlv(kSet, concat(parts)); }
Bytes explicit_wrap(unsigned n, BytesView inner) { return tlv(explicit_tag(n), inner); }

Bytes boolean(bool v) {
  std::uint8_t b = v ? 0xFF : 0x00;
  return tlv(kBoolean, BytesView(&b, 1));
}

namespace {

Bytes small_integer_content(std::int64_t v) {
  Bytes out;
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
  std::size_t skip = 0;
  while (skip + 1 < out.size() &&
         ((out[skip] == 0x00 && !(out[skip + 1] & 0x80)) ||
          (out[skip] == 0xFF && (out[skip + 1] & 0x80)))) {
    ++skip;
  }
  out.erase(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(skip));
  return out;
}

}  // namespace

Bytes integer(std::int64_t v) { return tlv(kInteger, small_integer_content(v)); }
Bytes integer(const SerialNumber& v) { return tlv(kInteger, v.der_content()); }
Bytes enumerated(std::int64_t v) { return tlv(kEnumerated, small_integer_content(v)); }
Bytes null() { return tlv(kNull, {}); }
Bytes oid(const Oid& v) { return tlv(kOid, v.encoded()); }
Bytes octet_string(BytesView v) { return tlv(kOctetString, v); }

Bytes bit_string(BytesView v, std::uint8_t unused_bits) {
  Bytes content;
  content.reserve(v.size() + 1);
  content.push_back(unused_bits);
  append(content, v);
  return tlv(kBitString, content);
}

Bytes generalized_time(UtcTime t) {
  auto s = format_generalized_time(t);
  return tlv(kGeneralizedTime, to_bytes(s));
}

Bytes x509_time(UtcTime t) {
  if (t >= make_utc(1950, 1, 1) && t < make_utc(2050, 1, 1)) {
    return tlv(kUtcTime, to_bytes(format_utc_time(t)));
  }
  return generalized_time(t);
}

Bytes ia5_string(std::string_view s) { return tlv(kIa5String, to_bytes(s)); }
Bytes utf8_string(std::string_view s) { return tlv(kUtf8String, to_bytes(s)); }
Bytes printable_string(std::string_view s) { return tlv(kPrintableString, to_bytes(s)); }

}  // namespace der
}  // namespace staplegrid
