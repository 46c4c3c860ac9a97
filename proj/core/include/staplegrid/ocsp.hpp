#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "staplegrid/bytes.hpp"
#include "staplegrid/certificate.hpp"
#include "staplegrid/crypto.hpp"
#include "staplegrid/revocation.hpp"
#include "staplegrid/serial.hpp"
#include "staplegrid/time.hpp"

namespace staplegrid {

struct CertId {
  HashAlgorithm hash_alg = HashAlgorithm::Sha1;
  Bytes issuer_name_hash;
  Bytes issuer_key_hash;
  SerialNumber serial_number;

  friend bool operator==(const CertId&, const CertId&) = default;
};

// Hash of the issuer's subject Name DER and of its public key bit string.
struct IssuerHashes {
  HashAlgorithm hash_alg = HashAlgorithm::Sha1;
  Bytes name_hash;
  Bytes key_hash;

  static IssuerHashes of(const CertMeta& issuer, HashAlgorithm alg);
  bool matches(const CertId& id) const noexcept {
    return id.hash_alg == hash_alg && id.issuer_name_hash == name_hash && id.issuer_key_hash == key_hash;
  }
};

// IssuerMismatch unless subject.issuer_dn equals the issuer's subject_dn.
CertId compute_cert_id(const CertMeta& subject, const CertMeta& issuer,
                       HashAlgorithm alg = HashAlgorithm::Sha1);
CertId compute_cert_id(const CertMeta& subject, BytesView issuer_der,
                       HashAlgorithm alg = HashAlgorithm::Sha1);

inline constexpr std::size_t kMinNonceSize = 8;
inline constexpr std::size_t kMaxNonceSize = 32;

struct OcspRequest {
  std::vector<CertId> cert_ids;  // at least one
  std::optional<Bytes> nonce;    // 8..32 bytes when present

  friend bool operator==(const OcspRequest&, const OcspRequest&) = default;
};

Bytes encode_ocsp_request(const OcspRequest& req);
OcspRequest decode_ocsp_request(BytesView der);

enum class ResponseStatus {
  Successful = 0,
  MalformedRequest = 1,
  InternalError = 2,
  TryLater = 3,
  SigRequired = 5,
  Unauthorized = 6,
};

std::string_view response_status_name(ResponseStatus s) noexcept;

struct CertStatus {
  enum class Kind { Good, Revoked, Unknown };

  Kind kind = Kind::Good;
  UtcTime revocation_time{};  // meaningful only when Revoked
  RevocationReason reason = RevocationReason::Unspecified;

  static CertStatus good() { return {}; }
  static CertStatus unknown() { return {Kind::Unknown, {}, RevocationReason::Unspecified}; }
  static CertStatus revoked(UtcTime at, RevocationReason why) { return {Kind::Revoked, at, why}; }

  friend bool operator==(const CertStatus&, const CertStatus&) = default;
};

std::string_view status_name(CertStatus::Kind k) noexcept;  // "GOOD" | "REVOKED" | "UNKNOWN"

struct SingleResponse {
  CertId cert_id;
  CertStatus status;
  UtcTime this_update{};
  std::optional<UtcTime> next_update;  // strictly after this_update when present

  friend bool operator==(const SingleResponse&, const SingleResponse&) = default;
};

struct ResponderId {
  enum class Kind { ByName, ByKey };

  Kind kind = Kind::ByKey;
  Bytes value;  // Name DER, or SHA-1 of the responder's public key bits

  static ResponderId by_name(const CertMeta& signer);
  static ResponderId by_key(const CertMeta& signer);
  bool identifies(const CertMeta& cert) const;

  friend bool operator==(const ResponderId&, const ResponderId&) = default;
};

// The signed portion of a successful response.
struct ResponseData {
  ResponderId responder_id;
  UtcTime produced_at{};
  std::vector<SingleResponse> responses;
  std::optional<Bytes> nonce;

  friend bool operator==(const ResponseData&, const ResponseData&) = default;
};

struct OcspResponse {
  ResponseStatus response_status = ResponseStatus::Successful;
  UtcTime produced_at{};
  ResponderId responder_id;
  std::vector<SingleResponse> single_responses;
  std::optional<Bytes> nonce_echo;
  SignatureScheme signature_alg = SignatureScheme::EcdsaSha256;
  Bytes signature;
  std::vector<Bytes> signer_certs;
  Bytes tbs_response_data;
  Bytes raw_der;

  ResponseData data() const;
  const SingleResponse* find(const CertId& id) const;
};

// Signs `data` and wraps it as a successful BasicOCSPResponse.
Bytes encode_ocsp_response(const ResponseData& data, Signer& key, std::span<const Bytes> signer_certs);
// A non-successful OCSPResponse: responseStatus with no responseBytes.
Bytes encode_ocsp_error(ResponseStatus status);
OcspResponse decode_ocsp_response(BytesView der);

// Proof that a response's signature was checked against trust anchors.
class VerifiedResponse {
 public:
  const OcspResponse& response() const noexcept { return response_; }
  const std::vector<SingleResponse>& single_responses() const noexcept {
    return response_.single_responses;
  }
  const CertMeta& signer() const noexcept { return signer_; }

 private:
  friend VerifiedResponse verify_ocsp_signature(const OcspResponse&, std::span<const CertMeta>, UtcTime);
  VerifiedResponse(OcspResponse r, CertMeta s) : response_(std::move(r)), signer_(std::move(s)) {}

  OcspResponse response_;
  CertMeta signer_;
};

// The signer is whichever anchor or embedded certificate's key verifies the
// signature. It must be an anchor, or be issued by one and carry the
// OCSPSigning key purpose, and must be valid at `now`.
//
// Errors: SignatureInvalid when no available key verifies; UntrustedSigner;
// SignerCertExpired.
VerifiedResponse verify_ocsp_signature(const OcspResponse& resp, std::span<const CertMeta> trust_anchors,
                                       UtcTime now);

}  // namespace staplegrid
