#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "staplegrid/error.hpp"

namespace staplegrid {

using Bytes = std::vector<std::uint8_t>;
using BytesView = std::span<const std::uint8_t>;

inline Bytes to_bytes(std::string_view s) { return Bytes(s.begin(), s.end()); }

inline void append(Bytes& out, BytesView tail) { out.insert(out.end(), tail.begin(), tail.end()); }

std::string to_hex(BytesView data, bool upper = true);
Bytes from_hex(std::string_view hex);

std::string base64_encode(BytesView data);
Bytes base64_decode(std::string_view text);

// RFC 4648 section 5 alphabet, unpadded output; decoding accepts padded input too.
std::string base64url_encode(BytesView data);
Bytes base64url_decode(std::string_view text);

// Big-endian framing helpers for the on-disk formats.
void put_u32(Bytes& out, std::uint32_t v);
void put_u64(Bytes& out, std::uint64_t v);
// u32 length, then the bytes.
void put_blob(Bytes& out, BytesView data);

// Bounds-checked big-endian reader. Running past the end throws Error with
// the code given at construction.
class ByteCursor {
 public:
  ByteCursor(BytesView data, Errc error_code);

  std::uint8_t u8();
  std::uint32_t u32();
  std::uint64_t u64();
  BytesView take(std::size_t n);
  BytesView blob() { return take(u32()); }
  std::size_t remaining() const noexcept { return data_.size() - pos_; }
  bool empty() const noexcept { return remaining() == 0; }

 private:
  BytesView data_;
  std::size_t pos_ = 0;
  Errc error_code_;
};

}  // namespace staplegrid
