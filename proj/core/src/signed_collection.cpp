#include "staplegrid/signed_collection.hpp"

#include <cstring>
#include <sstream>

#include "staplegrid/error.hpp"

namespace staplegrid {

namespace {

constexpr std::uint8_t kMagic[4] = {'S', 'G', 'S', 'C'};
constexpr std::uint8_t kVersion = 1;

std::size_t bitmap_bytes(std::uint64_t bits) { return static_cast<std::size_t>((bits + 7) / 8); }

bool padding_clear(const Bytes& bitmap, std::uint64_t bits) {
  unsigned used = static_cast<unsigned>(bits % 8);
  if (used == 0 || bitmap.empty()) return true;
  return (bitmap.back() & (0xFFu >> used)) == 0;
}

}  // namespace

std::string_view bit_status_name(BitStatus s) noexcept { return s == BitStatus::Revoked ? "REVOKED" : "VALID"; }

Bytes SignedCollection::signed_payload() const {
  Bytes p;
  p.reserve(24 + name.size() + bitmap.size());
  put_blob(p, to_bytes(name));
  put_u64(p, static_cast<std::uint64_t>(issued_at.time_since_epoch().count()));
  put_u64(p, bit_count);
  append(p, bitmap);
  return p;
}

Bytes SignedCollection::to_file() const {
  Bytes out(kMagic, kMagic + 4);
  out.push_back(kVersion);
  append(out, signed_payload());
  put_blob(out, signature);
  return out;
}

SignedCollection SignedCollection::from_file(BytesView data) {
  ByteCursor c(data, Errc::InvalidArgument);
  if (std::memcmp(c.take(4).data(), kMagic, 4) != 0) fail(Errc::InvalidArgument, "not a signed collection file");
  if (c.u8() != kVersion) fail(Errc::InvalidArgument, "unsupported signed collection version");
  SignedCollection sc;
  auto name = c.blob();
  sc.name.assign(name.begin(), name.end());
  sc.issued_at = UtcTime(Seconds(static_cast<std::int64_t>(c.u64())));
  sc.bit_count = c.u64();
  if (sc.bit_count > c.remaining() * 8) fail(Errc::InvalidArgument, "bit_count exceeds file size");
  auto bitmap = c.take(bitmap_bytes(sc.bit_count));
  sc.bitmap.assign(bitmap.begin(), bitmap.end());
  auto sig = c.blob();
  sc.signature.assign(sig.begin(), sig.end());
  if (!c.empty()) fail(Errc::InvalidArgument, "trailing bytes after signature");
  if (!padding_clear(sc.bitmap, sc.bit_count)) fail(Errc::InvalidArgument, "nonzero padding bits");
  return sc;
}

SignedCollection build_collection(std::string name, const std::vector<bool>& statuses, UtcTime issued_at,
                                  Signer& key, std::optional<std::uint64_t> bit_count) {
  if (statuses.empty()) fail(Errc::InvalidArgument, "no statuses");
  if (key.scheme() != SignatureScheme::EcdsaSha256) fail(Errc::UnsupportedAlgorithm, "collections are ECDSA-SHA256");
  SignedCollection sc;
  sc.name = std::move(name);
  sc.issued_at = issued_at;
  sc.bit_count = bit_count.value_or(statuses.size());
  if (sc.bit_count < statuses.size()) fail(Errc::InvalidArgument, "bit_count smaller than the status list");
  sc.bitmap.assign(bitmap_bytes(sc.bit_count), 0);
  for (std::size_t i = 0; i < statuses.size(); ++i)
    if (statuses[i]) sc.bitmap[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
  sc.signature = key.sign(sc.signed_payload());
  return sc;
}

BitStatus status_at(const SignedCollection& sc, std::uint64_t index) {
  if (index >= sc.bit_count)
    fail(Errc::IndexOutOfRange, std::to_string(index) + " >= bit_count " + std::to_string(sc.bit_count));
  bool set = sc.bitmap.at(static_cast<std::size_t>(index / 8)) & (0x80u >> (index % 8));
  return set ? BitStatus::Revoked : BitStatus::Valid;
}

bool verify_collection(const SignedCollection& sc, BytesView public_key_info) {
  if (sc.bitmap.size() != bitmap_bytes(sc.bit_count) || !padding_clear(sc.bitmap, sc.bit_count)) return false;
  try {
    return verify_signature(public_key_info, SignatureScheme::EcdsaSha256, sc.signed_payload(), sc.signature);
  } catch (const Error&) {
    return false;
  }
}

std::string describe_collection(const SignedCollection& sc) {
  std::uint64_t revoked = 0;
  for (auto b : sc.bitmap) revoked += static_cast<std::uint64_t>(__builtin_popcount(b));
  std::ostringstream out;
  out << "name: " << sc.name << '\n'
      << "issued_at: " << format_sql_time(sc.issued_at) << '\n'
      << "bit_count: " << sc.bit_count << '\n'
      << "revoked_bits: " << revoked << '\n'
      << "bitmap_bytes: " << sc.bitmap.size() << '\n'
      << "signature: " << to_hex(sc.signature) << '\n';
  return out.str();
}

CollectionAssignment::CollectionAssignment(std::string collection_name, std::uint64_t bit_count)
    : name_(std::move(collection_name)), bit_count_(bit_count) {
  if (bit_count_ == 0) fail(Errc::InvalidArgument, "bit_count must be positive");
}

std::pair<std::string, std::uint64_t> CollectionAssignment::assign_index(const SerialNumber& serial) {
  auto it = index_.find(serial);
  if (it != index_.end()) return {name_, it->second};
  if (next_ >= bit_count_) fail(Errc::CollectionFull, name_ + " holds " + std::to_string(bit_count_) + " certificates");
  index_.emplace(serial, next_);
  return {name_, next_++};
}

std::optional<std::uint64_t> CollectionAssignment::index_of(const SerialNumber& serial) const {
  auto it = index_.find(serial);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

}  // namespace staplegrid
