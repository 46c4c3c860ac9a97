#pragma once

#include <atomic>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "staplegrid/bytes.hpp"
#include "staplegrid/der.hpp"

struct evp_pkey_st;

namespace staplegrid {

enum class HashAlgorithm { Sha1, Sha256 };

std::size_t digest_size(HashAlgorithm alg) noexcept;
std::string_view hash_name(HashAlgorithm alg) noexcept;
Bytes digest(HashAlgorithm alg, BytesView data);
inline Bytes sha1(BytesView data) { return digest(HashAlgorithm::Sha1, data); }
inline Bytes sha256(BytesView data) { return digest(HashAlgorithm::Sha256, data); }

Bytes random_bytes(std::size_t n);

// Signature schemes the codec understands. Only EcdsaSha256 is ever produced.
enum class SignatureScheme { EcdsaSha256, EcdsaSha384, RsaSha256, RsaSha1 };

std::string_view scheme_name(SignatureScheme s) noexcept;
const Oid& scheme_oid(SignatureScheme s) noexcept;
// Throws UnsupportedAlgorithm carrying the dotted OID.
SignatureScheme scheme_from_oid(const Oid& oid);
// DER AlgorithmIdentifier for the scheme (NULL parameters for RSA, absent for ECDSA).
Bytes algorithm_identifier(SignatureScheme s);

bool verify_signature(BytesView spki_der, SignatureScheme scheme, BytesView message,
                      BytesView signature);

class Signer {
 public:
  virtual ~Signer() = default;
  virtual Bytes sign(BytesView message) = 0;
  virtual SignatureScheme scheme() const = 0;
  // DER SubjectPublicKeyInfo of the verifying key.
  virtual Bytes public_key_der() const = 0;
};

// ECDSA P-256 private key. Copies share the underlying key object.
//
// Signatures are emitted with a low S value and are re-drawn until both
// integers encode in exactly 32 octets, so every signature is 70 bytes of
// DER. Response sizes are then a function of content alone.
class SigningKey final : public Signer {
 public:
  static SigningKey generate();
  // Deterministic key derived from `seed`.
  static SigningKey from_seed(BytesView seed);
  static SigningKey from_pem(std::string_view pem);

  std::string to_pem() const;

  Bytes sign(BytesView message) override;
  SignatureScheme scheme() const override { return SignatureScheme::EcdsaSha256; }
  Bytes public_key_der() const override { return spki_; }

 private:
  explicit SigningKey(std::shared_ptr<evp_pkey_st> key);

  std::shared_ptr<evp_pkey_st> key_;
  Bytes spki_;
};

// Signer decorator counting every signature operation it performs.
class CountingSigner final : public Signer {
 public:
  explicit CountingSigner(Signer& inner) : inner_(inner) {}

  Bytes sign(BytesView message) override {
    count_.fetch_add(1, std::memory_order_relaxed);
    return inner_.sign(message);
  }
  SignatureScheme scheme() const override { return inner_.scheme(); }
  Bytes public_key_der() const override { return inner_.public_key_der(); }

  std::uint64_t count() const noexcept { return count_.load(std::memory_order_relaxed); }

 private:
  Signer& inner_;
  std::atomic<std::uint64_t> count_{0};
};

}  // namespace staplegrid
