#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>

#include "staplegrid/config.hpp"
#include "staplegrid/crl.hpp"
#include "staplegrid/ocsp.hpp"

namespace staplegrid {

// Revoked serials of one CRL generation, keyed for O(1) lookup.
struct BlacklistIndex {
  std::unordered_map<SerialNumber, Revocation> by_serial;
  UtcTime source_crl_last_update{};
  UtcTime loaded_at{};
  std::uint64_t generation = 0;
  Bytes crl_der;

  static BlacklistIndex from_crl(const CrlSnapshot& crl, UtcTime now, std::uint64_t generation = 0);
  const Revocation* find(const SerialNumber& serial) const;
};

// Where the responder pulls its CRL from.
class CrlSource {
 public:
  virtual ~CrlSource() = default;
  // Raw DER or PEM; SourceUnavailable when it cannot be read.
  virtual Bytes fetch() = 0;
  virtual std::string describe() const = 0;
};

// "http://..." gives an HTTP GET source, anything else a file path.
std::unique_ptr<CrlSource> make_crl_source(const std::string& url_or_path);

struct ResponderConfig {
  std::string listen_address = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string crl_source;
  Seconds refresh_interval{3600};
  Seconds response_validity{604800};
  CertMeta issuer_cert;
  std::shared_ptr<Signer> signing_key;
  // Delegated responder certificate; the issuer signs directly when absent.
  std::optional<CertMeta> signer_cert;

  const CertMeta& signer() const { return signer_cert ? *signer_cert : issuer_cert; }
  // InvalidArgument when an invariant does not hold.
  void validate() const;
};

// Keys: listen, port, crl_source, refresh_interval, response_validity,
// issuer_cert (PEM/DER path), signing_key (PEM path), signer_cert (optional).
ResponderConfig load_responder_config(const KeyValueConfig& cfg);

// Signed answer for every CertId in `req`, valid for config.response_validity.
// Per CertId: foreign issuer hashes -> UNKNOWN, serial in the index ->
// REVOKED, otherwise GOOD.
OcspResponse answer_query(const OcspRequest& req, const BlacklistIndex& index, const ResponderConfig& config,
                          UtcTime now);
// Same answer, DER only; what handle() sends.
Bytes answer_query_der(const OcspRequest& req, const BlacklistIndex& index, const ResponderConfig& config,
                      UtcTime now);

// CRL-backed OCSP responder. Queries read an immutable index snapshot; a
// refresh builds a new one and swaps it in.
class HybridResponder {
 public:
  HybridResponder(ResponderConfig config, std::unique_ptr<CrlSource> source);

  const ResponderConfig& config() const noexcept { return config_; }

  // Fetches, verifies and installs a fresh index. On any failure the old
  // index stays and SourceUnavailable is thrown.
  std::shared_ptr<const BlacklistIndex> refresh_blacklist(UtcTime now);
  // Installs an already-fetched CRL under the same checks.
  std::shared_ptr<const BlacklistIndex> install_crl(BytesView crl, UtcTime now);

  std::shared_ptr<const BlacklistIndex> index() const;

  // DER request in, DER response out. Undecodable input yields a
  // MALFORMED_REQUEST response; no index yet yields TRY_LATER.
  Bytes handle(BytesView request_der, UtcTime now) const;

  // The CRL backing the current index, if any.
  std::optional<Bytes> current_crl() const;

 private:
  ResponderConfig config_;
  std::unique_ptr<CrlSource> source_;
  mutable std::mutex mu_;
  std::shared_ptr<const BlacklistIndex> index_;
  std::uint64_t generation_ = 0;
  std::mutex refresh_mu_;
};

}  // namespace staplegrid
