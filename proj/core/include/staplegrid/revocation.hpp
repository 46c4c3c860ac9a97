#pragma once

#include <optional>
#include <string_view>

#include "staplegrid/time.hpp"

namespace staplegrid {

// X.509 CRLReason; enumerator values are the wire codes.
enum class RevocationReason {
  Unspecified = 0,
  KeyCompromise = 1,
  CaCompromise = 2,
  AffiliationChanged = 3,
  Superseded = 4,
  CessationOfOperation = 5,
  CertificateHold = 6,
};

struct Revocation {
  UtcTime at{};
  RevocationReason reason = RevocationReason::Unspecified;

  friend bool operator==(const Revocation&, const Revocation&) = default;
};

std::string_view reason_name(RevocationReason r) noexcept;
std::optional<RevocationReason> reason_from_code(long code) noexcept;
// Accepts the names above ("KEY_COMPROMISE") and the camel-case X.509 spellings ("keyCompromise").
std::optional<RevocationReason> reason_from_name(std::string_view name) noexcept;

}  // namespace staplegrid
