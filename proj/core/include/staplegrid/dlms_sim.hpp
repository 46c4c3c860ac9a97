#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "staplegrid/responder.hpp"
#include "staplegrid/staple_cache.hpp"
#include "staplegrid/test_ca.hpp"
#include "staplegrid/transport.hpp"

namespace staplegrid {

enum class RejectReason {
  MissingStaple,
  RevokedStatus,
  StaleResponse,
  SignatureInvalid,
  CertIdMismatch,
  UntrustedSigner,
  ChainInvalid,
  // Direct mode only: the server could not reach the OCSP endpoint.
  UpstreamUnreachable,
};

std::string_view reject_reason_name(RejectReason r) noexcept;  // "STALE_RESPONSE", ...
std::optional<RejectReason> reject_reason_from_name(std::string_view name) noexcept;

// What a client presents in the handshake. On the wire: u32 length + client
// certificate, u32 chain length, each chain certificate length-prefixed,
// then u32 length + DER staple.
struct StapleBundle {
  Bytes client_cert;
  std::vector<Bytes> issuer_chain;  // issuer first, self-signed root last
  Bytes stapled_response;

  Bytes encode() const;
  // InvalidArgument on framing errors.
  static StapleBundle decode(BytesView wire);

  friend bool operator==(const StapleBundle&, const StapleBundle&) = default;
};

struct HandshakeOutcome {
  bool accepted = false;
  std::optional<RejectReason> reason;
  std::string detail;  // e.g. STATUS_NOT_GOOD for an UNKNOWN staple
  std::size_t server_ocsp_queries = 0;
  std::size_t bytes_on_wire = 0;

  std::string verdict() const;  // "ACCEPT" or "REJECT(<REASON>)"
  friend bool operator==(const HandshakeOutcome&, const HandshakeOutcome&) = default;
};

// Window checks allow this much disagreement between clocks.
inline constexpr Seconds kClockSkew{300};

// Fetches (or reuses) the cached staple for `cert_der` and packages it.
StapleBundle client_prepare_bundle(BytesView cert_der, std::vector<Bytes> issuer_chain, StapleCache& cache,
                                   UtcTime now, OcspTransport& upstream);

// Accepts only if, in order: the chain reaches a trusted root, the staple's
// signature verifies under that trust, it answers for this certificate, the
// status is GOOD, and now lies in [this_update - skew, next_update + skew].
// Never queries OCSP.
HandshakeOutcome server_verify_bundle(const StapleBundle& bundle, std::span<const CertMeta> trust_store,
                                      UtcTime now);

// The server asks the certificate's OCSP URL itself: one query per call.
HandshakeOutcome server_verify_direct(BytesView cert_der, std::span<const Bytes> issuer_chain, OcspTransport& endpoint,
                                      std::span<const CertMeta> trust_store, UtcTime now);

enum class HandshakeMode { Stapled, Direct };
std::string_view mode_name(HandshakeMode m) noexcept;  // "stapled" | "direct"
std::optional<HandshakeMode> mode_from_name(std::string_view name) noexcept;

struct ScenarioStats {
  std::size_t handshakes = 0;
  std::size_t accepts = 0;
  std::size_t rejects = 0;
  std::size_t server_ocsp_queries = 0;
  std::size_t client_ocsp_queries = 0;
  std::size_t total_bytes = 0;
  double mean_handshake_latency = 0;  // seconds, from the link model
  std::map<std::string, std::size_t> reject_reasons;

  // key=value lines, one per field.
  std::string to_table() const;
  std::string summary() const;
  friend bool operator==(const ScenarioStats&, const ScenarioStats&) = default;
};

struct SimulationOptions {
  std::uint64_t seed = 1;
  UtcTime start = make_utc(2024, 6, 19, 10, 0, 43);
  // Each message exchange costs one round trip on the modeled link.
  double link_rtt_seconds = 0.029;
};

// A self-contained fleet: one CA, its hybrid responder acting as the proxy
// OCSP server, a staple cache in front of it for the clients, and a DLMS
// server trusting the CA root. Time only moves through advance().
class Simulation {
 public:
  static constexpr const char* kProxyUrl = "http://proxy.sim/ocsp";

  explicit Simulation(SimulationOptions options = {});

  UtcTime now() const noexcept { return now_; }
  void advance(Seconds by) { now_ += by; }

  const CertMeta& issue(const std::string& name);
  // Publishes a fresh CRL to the proxy immediately.
  void revoke(const std::string& name, RevocationReason reason = RevocationReason::KeyCompromise);
  MaintenanceReport maintain();

  HandshakeOutcome handshake(const std::string& name, HandshakeMode mode);
  // Builds the bundle `name` would present right now and keeps it under `label`.
  const StapleBundle& capture(const std::string& name, const std::string& label);
  // Presents a captured bundle as-is, optionally with one byte of the staple flipped.
  HandshakeOutcome replay(const std::string& label, bool tamper = false);

  const ScenarioStats& stats() const noexcept { return stats_; }
  const CertMeta& cert(const std::string& name) const;
  bool has_cert(const std::string& name) const { return certs_.count(name) != 0; }
  StapleCache& cache() noexcept { return *cache_; }
  TestAuthority& ca() noexcept { return ca_; }

 private:
  HandshakeOutcome record(HandshakeOutcome o);
  std::vector<Bytes> chain() const { return {ca_.root().raw_der}; }

  SimulationOptions options_;
  UtcTime now_;
  TestAuthority ca_;
  std::shared_ptr<HybridResponder> proxy_;
  LoopbackTransport network_;
  CountingTransport client_link_{network_};
  CountingTransport server_link_{network_};
  std::unique_ptr<StapleCache> cache_;
  std::map<std::string, CertMeta> certs_;
  std::map<std::string, StapleBundle> captured_;
  ScenarioStats stats_;
  double latency_sum_ = 0;
};

struct ScenarioOptions {
  std::size_t n_clients = 100;
  HandshakeMode mode = HandshakeMode::Stapled;
  // Certificates shared round-robin by the clients; 0 means one per client.
  std::size_t distinct_certs = 0;
  SimulationOptions sim;
};

ScenarioStats run_scenario(const ScenarioOptions& options);

// Declarative scenario file, one event per line ('#' comments):
//   seed N | rtt SECONDS | clients N | certs N | mode stapled|direct
//   issue NAME | revoke NAME [REASON] | advance DURATION | maintain
//   handshake NAME [MODE] | capture NAME LABEL | replay LABEL [tampered]
//   expect accept | expect reject REASON
//   run        handshakes for `clients` clients over `certs` certificates
// seed and rtt must precede the first event that touches the fleet.
struct ScriptResult {
  ScenarioStats stats;
  std::vector<std::string> log;
  std::vector<std::string> failed_expectations;
  bool ok() const noexcept { return failed_expectations.empty(); }
};
// InvalidArgument on unknown directives or bad arguments, with the line number.
ScriptResult run_script(std::string_view script);

struct ReplayOptions {
  std::uint64_t seed = 1;
  // How far the clock moves after the revocation; the staple lives 7 days.
  Seconds advance = 8 * kDay;
  bool tamper = false;
};

// Issue, capture a GOOD staple, revoke, advance, then replay the captured bundle.
HandshakeOutcome replay_attack_scenario(const ReplayOptions& options = {});

}  // namespace staplegrid
