#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "staplegrid/bytes.hpp"
#include "staplegrid/crypto.hpp"
#include "staplegrid/serial.hpp"
#include "staplegrid/time.hpp"

namespace staplegrid {

inline constexpr std::uint64_t kDefaultBitCount = std::uint64_t{1} << 20;

enum class BitStatus { Valid, Revoked };
std::string_view bit_status_name(BitStatus s) noexcept;  // "VALID" | "REVOKED"

// Revocation bits of many certificates under one ECDSA-SHA256 signature.
// Bit i lives in byte i/8 at mask 0x80 >> (i%8).
struct SignedCollection {
  std::string name;
  UtcTime issued_at{};
  std::uint64_t bit_count = 0;
  Bytes bitmap;  // ceil(bit_count / 8) bytes, unused trailing bits zero
  Bytes signature;

  // u32 name length, name, i64 issued_at (unix seconds), u64 bit_count, bitmap.
  Bytes signed_payload() const;

  // "SGSC", version byte 1, signed payload, u32 signature length, signature.
  Bytes to_file() const;
  // InvalidArgument on bad magic, version, lengths or nonzero padding bits.
  static SignedCollection from_file(BytesView data);

  friend bool operator==(const SignedCollection&, const SignedCollection&) = default;
};

// One signing operation regardless of size. With bit_count unset, the
// collection is exactly statuses.size() bits; otherwise the tail is zero.
// InvalidArgument on empty statuses or bit_count < statuses.size().
SignedCollection build_collection(std::string name, const std::vector<bool>& statuses, UtcTime issued_at,
                                  Signer& key, std::optional<std::uint64_t> bit_count = std::nullopt);

// IndexOutOfRange unless index < bit_count.
BitStatus status_at(const SignedCollection& sc, std::uint64_t index);

bool verify_collection(const SignedCollection& sc, BytesView public_key_info);

// Human-readable summary for the CLI.
std::string describe_collection(const SignedCollection& sc);

// Stable serial -> (collection name, index) mapping. Indices are handed out
// in order; once bit_count serials are placed, new ones get CollectionFull.
class CollectionAssignment {
 public:
  explicit CollectionAssignment(std::string collection_name = "sc-0", std::uint64_t bit_count = kDefaultBitCount);

  std::pair<std::string, std::uint64_t> assign_index(const SerialNumber& serial);
  std::optional<std::uint64_t> index_of(const SerialNumber& serial) const;

  const std::string& collection_name() const noexcept { return name_; }
  std::uint64_t bit_count() const noexcept { return bit_count_; }
  std::uint64_t next_free_index() const noexcept { return next_; }

 private:
  std::string name_;
  std::uint64_t bit_count_;
  std::uint64_t next_ = 0;
  std::map<SerialNumber, std::uint64_t> index_;
};

}  // namespace staplegrid
