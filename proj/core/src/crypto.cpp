#include "staplegrid/crypto.hpp"

#include <openssl/bn.h>
#include <openssl/core_names.h>
#include <openssl/ec.h>
#include <openssl/evp.h>
#include <openssl/param_build.h>
#include <openssl/pem.h>
#include <openssl/rand.h>
#include <openssl/x509.h>

#include "staplegrid/error.hpp"
#include "staplegrid/oids.hpp"

namespace staplegrid {

namespace {

template <typename T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const noexcept { Free(p); }
};

using BnPtr = std::unique_ptr<BIGNUM, Deleter<BIGNUM, BN_free>>;
using BnCtxPtr = std::unique_ptr<BN_CTX, Deleter<BN_CTX, BN_CTX_free>>;
using MdCtxPtr = std::unique_ptr<EVP_MD_CTX, Deleter<EVP_MD_CTX, EVP_MD_CTX_free>>;
using PkeyCtxPtr = std::unique_ptr<EVP_PKEY_CTX, Deleter<EVP_PKEY_CTX, EVP_PKEY_CTX_free>>;
using GroupPtr = std::unique_ptr<EC_GROUP, Deleter<EC_GROUP, EC_GROUP_free>>;
using PointPtr = std::unique_ptr<EC_POINT, Deleter<EC_POINT, EC_POINT_free>>;
using ParamBldPtr = std::unique_ptr<OSSL_PARAM_BLD, Deleter<OSSL_PARAM_BLD, OSSL_PARAM_BLD_free>>;
using ParamPtr = std::unique_ptr<OSSL_PARAM, Deleter<OSSL_PARAM, OSSL_PARAM_free>>;
using SigPtr = std::unique_ptr<ECDSA_SIG, Deleter<ECDSA_SIG, ECDSA_SIG_free>>;
using BioPtr = std::unique_ptr<BIO, Deleter<BIO, BIO_free_all>>;

std::shared_ptr<EVP_PKEY> wrap(EVP_PKEY* p) { return std::shared_ptr<EVP_PKEY>(p, EVP_PKEY_free); }

[[noreturn]] void crypto_failure(const char* what) { fail(Errc::InvalidArgument, what); }

const EVP_MD* md_for(SignatureScheme s) {
  switch (s) {
    case SignatureScheme::EcdsaSha256:
    case SignatureScheme::RsaSha256: return EVP_sha256();
    case SignatureScheme::EcdsaSha384: return EVP_sha384();
    case SignatureScheme::RsaSha1: return EVP_sha1();
  }
  return EVP_sha256();
}

Bytes spki_of(EVP_PKEY* key) {
  int len = i2d_PUBKEY(key, nullptr);
  if (len <= 0) crypto_failure("cannot encode public key");
  Bytes out(static_cast<std::size_t>(len));
  unsigned char* p = out.data();
  i2d_PUBKEY(key, &p);
  return out;
}

// Low-S form with both integers occupying exactly 32 octets.
bool fixed_width_ecdsa(Bytes& der_sig, const BIGNUM* order) {
  const unsigned char* p = der_sig.data();
  SigPtr sig(d2i_ECDSA_SIG(nullptr, &p, static_cast<long>(der_sig.size())));
  if (!sig) return false;
  const BIGNUM* r = ECDSA_SIG_get0_r(sig.get());
  const BIGNUM* s = ECDSA_SIG_get0_s(sig.get());
  BnPtr half(BN_dup(order));
  BN_rshift1(half.get(), half.get());
  BnPtr new_s(BN_dup(s));
  if (BN_cmp(new_s.get(), half.get()) > 0) BN_sub(new_s.get(), order, s);
  auto ok_width = [](const BIGNUM* v) { return BN_num_bytes(v) == 32 && !BN_is_bit_set(v, 255); };
  if (!ok_width(r) || !ok_width(new_s.get())) return false;
  BnPtr new_r(BN_dup(r));
  ECDSA_SIG_set0(sig.get(), new_r.release(), new_s.release());
  int len = i2d_ECDSA_SIG(sig.get(), nullptr);
  der_sig.resize(static_cast<std::size_t>(len));
  unsigned char* out = der_sig.data();
  i2d_ECDSA_SIG(sig.get(), &out);
  return true;
}

}  // namespace

std::size_t digest_size(HashAlgorithm alg) noexcept { return alg == HashAlgorithm::Sha1 ? 20 : 32; }

std::string_view hash_name(HashAlgorithm alg) noexcept {
  return alg == HashAlgorithm::Sha1 ? "SHA1" : "SHA256";
}

Bytes digest(HashAlgorithm alg, BytesView data) {
  Bytes out(digest_size(alg));
  unsigned int len = 0;
  const EVP_MD* md = alg == HashAlgorithm::Sha1 ? EVP_sha1() : EVP_sha256();
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, md, nullptr) != 1) {
    crypto_failure("digest failed");
  }
  return out;
}

Bytes random_bytes(std::size_t n) {
  Bytes out(n);
  if (n > 0 && RAND_bytes(out.data(), static_cast<int>(n)) != 1) crypto_failure("RAND_bytes failed");
  return out;
}

std::string_view scheme_name(SignatureScheme s) noexcept {
  switch (s) {
    case SignatureScheme::EcdsaSha256: return "ecdsa-with-SHA256";
    case SignatureScheme::EcdsaSha384: return "ecdsa-with-SHA384";
    case SignatureScheme::RsaSha256: return "sha256WithRSAEncryption";
    case SignatureScheme::RsaSha1: return "sha1WithRSAEncryption";
  }
  return "unknown";
}

const Oid& scheme_oid(SignatureScheme s) noexcept {
  switch (s) {
    case SignatureScheme::EcdsaSha256: return oids::kEcdsaWithSha256;
    case SignatureScheme::EcdsaSha384: return oids::kEcdsaWithSha384;
    case SignatureScheme::RsaSha256: return oids::kSha256WithRsa;
    case SignatureScheme::RsaSha1: return oids::kSha1WithRsa;
  }
  return oids::kEcdsaWithSha256;
}

SignatureScheme scheme_from_oid(const Oid& oid) {
  for (auto s : {SignatureScheme::EcdsaSha256, SignatureScheme::EcdsaSha384,
                 SignatureScheme::RsaSha256, SignatureScheme::RsaSha1}) {
    if (scheme_oid(s) == oid) return s;
  }
  fail(Errc::UnsupportedAlgorithm, oid.to_string());
}

Bytes algorithm_identifier(SignatureScheme s) {
  if (s == SignatureScheme::RsaSha256 || s == SignatureScheme::RsaSha1) {
    return der::sequence({der::oid(scheme_oid(s)), der::null()});
  }
  return der::sequence({der::oid(scheme_oid(s))});
}

bool verify_signature(BytesView spki_der, SignatureScheme scheme, BytesView message,
                      BytesView signature) {
  const unsigned char* p = spki_der.data();
  auto key = wrap(d2i_PUBKEY(nullptr, &p, static_cast<long>(spki_der.size())));
  if (!key) return false;
  MdCtxPtr ctx(EVP_MD_CTX_new());
  if (EVP_DigestVerifyInit(ctx.get(), nullptr, md_for(scheme), nullptr, key.get()) != 1) return false;
  return EVP_DigestVerify(ctx.get(), signature.data(), signature.size(), message.data(),
                          message.size()) == 1;
}

SigningKey::SigningKey(std::shared_ptr<EVP_PKEY> key) : key_(std::move(key)), spki_(spki_of(key_.get())) {}

SigningKey SigningKey::generate() {
  EVP_PKEY* raw = EVP_EC_gen("prime256v1");
  if (!raw) crypto_failure("EC key generation failed");
  return SigningKey(wrap(raw));
}

SigningKey SigningKey::from_seed(BytesView seed) {
  GroupPtr group(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1));
  BnCtxPtr bn_ctx(BN_CTX_new());
  const BIGNUM* order = EC_GROUP_get0_order(group.get());
  BnPtr priv(BN_new());
  for (std::uint32_t counter = 0;; ++counter) {
    Bytes input(seed.begin(), seed.end());
    for (int i = 3; i >= 0; --i) input.push_back(static_cast<std::uint8_t>(counter >> (8 * i)));
    Bytes d = sha256(input);
    BN_bin2bn(d.data(), static_cast<int>(d.size()), priv.get());
    if (!BN_is_zero(priv.get()) && BN_cmp(priv.get(), order) < 0) break;
  }
  PointPtr pub(EC_POINT_new(group.get()));
  if (EC_POINT_mul(group.get(), pub.get(), priv.get(), nullptr, nullptr, bn_ctx.get()) != 1) {
    crypto_failure("EC point multiplication failed");
  }
  unsigned char pub_oct[65];
  std::size_t pub_len = EC_POINT_point2oct(group.get(), pub.get(), POINT_CONVERSION_UNCOMPRESSED,
                                           pub_oct, sizeof pub_oct, bn_ctx.get());

  ParamBldPtr bld(OSSL_PARAM_BLD_new());
  OSSL_PARAM_BLD_push_utf8_string(bld.get(), OSSL_PKEY_PARAM_GROUP_NAME, "prime256v1", 0);
  OSSL_PARAM_BLD_push_BN(bld.get(), OSSL_PKEY_PARAM_PRIV_KEY, priv.get());
  OSSL_PARAM_BLD_push_octet_string(bld.get(), OSSL_PKEY_PARAM_PUB_KEY, pub_oct, pub_len);
  ParamPtr params(OSSL_PARAM_BLD_to_param(bld.get()));
  PkeyCtxPtr ctx(EVP_PKEY_CTX_new_from_name(nullptr, "EC", nullptr));
  EVP_PKEY* raw = nullptr;
  if (!ctx || EVP_PKEY_fromdata_init(ctx.get()) != 1 ||
      EVP_PKEY_fromdata(ctx.get(), &raw, EVP_PKEY_KEYPAIR, params.get()) != 1) {
    crypto_failure("cannot build EC key from seed");
  }
  return SigningKey(wrap(raw));
}

SigningKey SigningKey::from_pem(std::string_view pem) {
  BioPtr bio(BIO_new_mem_buf(pem.data(), static_cast<int>(pem.size())));
  EVP_PKEY* raw = PEM_read_bio_PrivateKey(bio.get(), nullptr, nullptr, nullptr);
  if (!raw) fail(Errc::InvalidArgument, "cannot read private key PEM");
  if (EVP_PKEY_get_base_id(raw) != EVP_PKEY_EC) {
    EVP_PKEY_free(raw);
    fail(Errc::UnsupportedAlgorithm, "signing keys must be EC P-256");
  }
  return SigningKey(wrap(raw));
}

std::string SigningKey::to_pem() const {
  BioPtr bio(BIO_new(BIO_s_mem()));
  if (PEM_write_bio_PrivateKey(bio.get(), key_.get(), nullptr, nullptr, 0, nullptr, nullptr) != 1) {
    crypto_failure("cannot write private key");
  }
  char* data = nullptr;
  long len = BIO_get_mem_data(bio.get(), &data);
  return std::string(data, static_cast<std::size_t>(len));
}

Bytes SigningKey::sign(BytesView message) {
  static const GroupPtr group(EC_GROUP_new_by_curve_name(NID_X9_62_prime256v1));
  const BIGNUM* order = EC_GROUP_get0_order(group.get());
  for (;;) {
    MdCtxPtr ctx(EVP_MD_CTX_new());
    if (EVP_DigestSignInit(ctx.get(), nullptr, EVP_sha256(), nullptr, key_.get()) != 1) {
      crypto_failure("sign init failed");
    }
    std::size_t len = 0;
    if (EVP_DigestSign(ctx.get(), nullptr, &len, message.data(), message.size()) != 1) {
      crypto_failure("sign failed");
    }
    Bytes sig(len);
    if (EVP_DigestSign(ctx.get(), sig.data(), &len, message.data(), message.size()) != 1) {
      crypto_failure("sign failed");
    }
    sig.resize(len);
    if (fixed_width_ecdsa(sig, order)) return sig;
  }
}

}  // namespace staplegrid
