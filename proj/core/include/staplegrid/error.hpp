#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace staplegrid {

enum class Errc {
  MalformedDer,
  UnsupportedVersion,
  UnsupportedAlgorithm,
  SignatureFieldMissing,
  IssuerMismatch,
  SignatureInvalid,
  UntrustedSigner,
  SignerCertExpired,
  UnknownSerial,
  AlreadyRevoked,
  InvalidWindow,
  SourceUnavailable,
  BindFailure,
  NoOcspUrl,
  UpstreamUnreachable,
  UpstreamError,
  CertIdMismatch,
  NotCached,
  StoreCorrupt,
  IndexOutOfRange,
  CollectionFull,
  InvalidArgument,
  Io,
};

std::string_view errc_name(Errc code) noexcept;

// Every failure surfaced by the library is an Error carrying a typed code.
// For UnsupportedAlgorithm the detail is the dotted OID; for UpstreamError it
// is the OCSP responseStatus name.
class Error : public std::runtime_error {
 public:
  Error(Errc code, std::string detail);

  Errc code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  Errc code_;
  std::string detail_;
};

[[noreturn]] void fail(Errc code, std::string detail = {});

}  // namespace staplegrid
