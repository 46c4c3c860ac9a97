#include "staplegrid/revocation.hpp"

#include <array>
#include <utility>

namespace staplegrid {

namespace {

struct ReasonNames {
  RevocationReason reason;
  std::string_view upper;
  std::string_view camel;
};

constexpr std::array<ReasonNames, 7> kReasons{{
    {RevocationReason::Unspecified, "UNSPECIFIED", "unspecified"},
    {RevocationReason::KeyCompromise, "KEY_COMPROMISE", "keyCompromise"},
    {RevocationReason::CaCompromise, "CA_COMPROMISE", "cACompromise"},
    {RevocationReason::AffiliationChanged, "AFFILIATION_CHANGED", "affiliationChanged"},
    {RevocationReason::Superseded, "SUPERSEDED", "superseded"},
    {RevocationReason::CessationOfOperation, "CESSATION_OF_OPERATION", "cessationOfOperation"},
    {RevocationReason::CertificateHold, "CERTIFICATE_HOLD", "certificateHold"},
}};

}  // namespace

std::string_view reason_name(RevocationReason r) noexcept {
  for (const auto& n : kReasons) {
    if (n.reason == r) return n.upper;
  }
  return "UNSPECIFIED";
}

std::optional<RevocationReason> reason_from_code(long code) noexcept {
  if (code < 0 || code > 6) return std::nullopt;
  return static_cast<RevocationReason>(code);
}

std::optional<RevocationReason> reason_from_name(std::string_view name) noexcept {
  for (const auto& n : kReasons) {
    if (name == n.upper || name == n.camel) return n.reason;
  }
  return std::nullopt;
}

}  // namespace staplegrid
