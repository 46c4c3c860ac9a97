#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "staplegrid/bytes.hpp"
#include "staplegrid/certificate.hpp"
#include "staplegrid/crypto.hpp"
#include "staplegrid/name.hpp"
#include "staplegrid/revocation.hpp"
#include "staplegrid/serial.hpp"
#include "staplegrid/time.hpp"

namespace staplegrid {

struct CrlEntry {
  SerialNumber serial_number;
  UtcTime revocation_date{};
  RevocationReason reason = RevocationReason::Unspecified;

  friend bool operator==(const CrlEntry&, const CrlEntry&) = default;
};

struct CrlSnapshot {
  int version = 1;  // 1 when the version field is absent, 2 for v2 lists
  DistinguishedName issuer_dn;
  UtcTime last_update{};
  std::optional<UtcTime> next_update;  // absent means "Next Update: NONE"
  std::vector<CrlEntry> entries;       // in list order, serials pairwise distinct
  std::optional<std::uint64_t> crl_number;
  Oid signature_alg;
  Bytes signature;
  Bytes tbs_der;
  Bytes raw;  // DER, even when parsed from PEM

  friend bool operator==(const CrlSnapshot&, const CrlSnapshot&) = default;
};

enum class CrlEncoding { Der, Pem };

CrlSnapshot parse_crl(BytesView input, CrlEncoding encoding);
// Sniffs PEM armor.
CrlSnapshot load_crl(BytesView der_or_pem);

bool verify_crl_signature(const CrlSnapshot& crl, const CertMeta& issuer);

struct CrlFields {
  DistinguishedName issuer_dn;
  UtcTime last_update{};
  std::optional<UtcTime> next_update;
  std::vector<CrlEntry> entries;
  std::optional<std::uint64_t> crl_number;
};

// Emits a v2 CRL. Entries with reason UNSPECIFIED carry no reason extension.
Bytes encode_crl(const CrlFields& fields, Signer& issuer_key);

}  // namespace staplegrid
