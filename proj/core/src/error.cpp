#include "staplegrid/error.hpp"

namespace staplegrid {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::MalformedDer: return "MalformedDer";
    case Errc::UnsupportedVersion: return "UnsupportedVersion";
    case Errc::UnsupportedAlgorithm: return "UnsupportedAlgorithm";
    case Errc::SignatureFieldMissing: return "SignatureFieldMissing";
    case Errc::IssuerMismatch: return "IssuerMismatch";
    case Errc::SignatureInvalid: return "SignatureInvalid";
    case Errc::UntrustedSigner: return "UntrustedSigner";
    case Errc::SignerCertExpired: return "SignerCertExpired";
    case Errc::UnknownSerial: return "UnknownSerial";
    case Errc::AlreadyRevoked: return "AlreadyRevoked";
    case Errc::InvalidWindow: return "InvalidWindow";
    case Errc::SourceUnavailable: return "SourceUnavailable";
    case Errc::BindFailure: return "BindFailure";
    case Errc::NoOcspUrl: return "NoOcspUrl";
    case Errc::UpstreamUnreachable: return "UpstreamUnreachable";
    case Errc::UpstreamError: return "UpstreamError";
    case Errc::CertIdMismatch: return "CertIdMismatch";
    case Errc::NotCached: return "NotCached";
    case Errc::StoreCorrupt: return "StoreCorrupt";
    case Errc::IndexOutOfRange: return "IndexOutOfRange";
    case Errc::CollectionFull: return "CollectionFull";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::Io: return "Io";
  }
  return "Unknown";
}

namespace {

std::string compose(Errc code, const std::string& detail) {
  std::string msg(errc_name(code));
  if (!detail.empty()) {
    msg += ": ";
    msg += detail;
  }
  return msg;
}

}  // namespace

Error::Error(Errc code, std::string detail)
    : std::runtime_error(compose(code, detail)), code_(code), detail_(std::move(detail)) {}

void fail(Errc code, std::string detail) { throw Error(code, std::move(detail)); }

}  // namespace staplegrid
