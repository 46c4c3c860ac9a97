#pragma once

#include <optional>
#include <string>
#include <vector>

#include "staplegrid/bytes.hpp"
#include "staplegrid/crypto.hpp"
#include "staplegrid/der.hpp"
#include "staplegrid/name.hpp"
#include "staplegrid/serial.hpp"
#include "staplegrid/time.hpp"

namespace staplegrid {

// Recorded instead of failing when a certificate carries a critical
// extension this parser does not understand.
struct ParseWarning {
  Oid extension;
  std::string message;

  friend bool operator==(const ParseWarning&, const ParseWarning&) = default;
};

struct CertMeta {
  SerialNumber serial_number;
  DistinguishedName subject_dn;
  DistinguishedName issuer_dn;
  UtcTime not_before{};
  UtcTime not_after{};
  Bytes public_key_info;  // SubjectPublicKeyInfo TLV
  Bytes public_key_bits;  // subjectPublicKey contents, unused-bits octet excluded
  std::optional<std::string> aia_ocsp_url;
  std::optional<std::string> crl_dp_url;
  bool is_ca = false;
  bool ocsp_signing = false;  // extendedKeyUsage carries id-kp-OCSPSigning
  Oid signature_alg;
  Bytes signature;
  Bytes tbs_der;
  std::vector<ParseWarning> warnings;
  Bytes raw_der;

  bool valid_at(UtcTime t) const noexcept { return not_before <= t && t <= not_after; }
  bool self_issued() const noexcept { return subject_dn == issuer_dn; }

  friend bool operator==(const CertMeta&, const CertMeta&) = default;
};

// X.509 v3 only; v1/v2 certificates raise UnsupportedVersion.
CertMeta parse_certificate(BytesView der);
// DER or "CERTIFICATE" PEM.
CertMeta load_certificate(BytesView der_or_pem);

// True when `issuer`'s key verifies `cert`'s signature and the names chain.
bool is_issued_by(const CertMeta& cert, const CertMeta& issuer);

struct RawExtension {
  Oid oid;
  bool critical = false;
  Bytes value;  // extnValue contents
};

struct CertificateFields {
  SerialNumber serial_number;
  DistinguishedName issuer_dn;
  DistinguishedName subject_dn;
  UtcTime not_before{};
  UtcTime not_after{};
  Bytes public_key_info;
  bool is_ca = false;
  bool ocsp_signing = false;
  std::optional<std::string> aia_ocsp_url;
  std::optional<std::string> crl_dp_url;
  std::vector<RawExtension> extra_extensions;
};

Bytes encode_certificate(const CertificateFields& fields, Signer& issuer_key);

}  // namespace staplegrid
