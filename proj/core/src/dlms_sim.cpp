#include "staplegrid/dlms_sim.hpp"

#include <array>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "staplegrid/error.hpp"

namespace staplegrid {

namespace {

constexpr std::array<std::pair<RejectReason, std::string_view>, 8> kReasonNames{{
    {RejectReason::MissingStaple, "MISSING_STAPLE"},
    {RejectReason::RevokedStatus, "REVOKED_STATUS"},
    {RejectReason::StaleResponse, "STALE_RESPONSE"},
    {RejectReason::SignatureInvalid, "SIGNATURE_INVALID"},
    {RejectReason::CertIdMismatch, "CERTID_MISMATCH"},
    {RejectReason::UntrustedSigner, "UNTRUSTED_SIGNER"},
    {RejectReason::ChainInvalid, "CHAIN_INVALID"},
    {RejectReason::UpstreamUnreachable, "UPSTREAM_UNREACHABLE"},
}};

HandshakeOutcome reject(RejectReason r, std::string detail = {}) {
  HandshakeOutcome o;
  o.reason = r;
  o.detail = std::move(detail);
  return o;
}

// (a): leaf <- chain[0] <- ... <- chain[last], last self-signed and trusted.
bool chain_valid(const CertMeta& leaf, const std::vector<CertMeta>& chain, std::span<const CertMeta> trust_store,
                 UtcTime now) {
  if (chain.empty() || !leaf.valid_at(now)) return false;
  const CertMeta* child = &leaf;
  for (const auto& c : chain) {
    if (!c.is_ca || !c.valid_at(now) || !is_issued_by(*child, c)) return false;
    child = &c;
  }
  const CertMeta& root = chain.back();
  if (!root.self_issued() || !is_issued_by(root, root)) return false;
  for (const auto& t : trust_store)
    if (t.raw_der == root.raw_der) return true;
  return false;
}

std::optional<std::vector<CertMeta>> parse_chain(std::span<const Bytes> ders) {
  std::vector<CertMeta> out;
  try {
    for (const auto& d : ders) out.push_back(parse_certificate(d));
  } catch (const Error&) {
    return std::nullopt;
  }
  return out;
}

// Checks (d) and (e) on the single response answering for the client.
std::optional<HandshakeOutcome> status_and_window(const SingleResponse& sr, UtcTime now) {
  if (sr.status.kind == CertStatus::Kind::Revoked) return reject(RejectReason::RevokedStatus, "REVOKED");
  if (sr.status.kind == CertStatus::Kind::Unknown) return reject(RejectReason::RevokedStatus, "STATUS_NOT_GOOD");
  if (!sr.next_update) return reject(RejectReason::StaleResponse, "no next_update");
  if (now < sr.this_update - kClockSkew) return reject(RejectReason::StaleResponse, "not yet valid");
  if (now > *sr.next_update + kClockSkew) return reject(RejectReason::StaleResponse, "expired " + format_sql_time(*sr.next_update));
  return std::nullopt;
}

const SingleResponse* response_for(const OcspResponse& resp, const CertMeta& cert, const CertMeta& issuer) {
  for (const auto& sr : resp.single_responses) {
    try {
      if (sr.cert_id == compute_cert_id(cert, issuer, sr.cert_id.hash_alg)) return &sr;
    } catch (const Error&) {
      return nullptr;
    }
  }
  return nullptr;
}

// Signature, CertId, status and window over a decoded response.
HandshakeOutcome check_response(BytesView staple, const CertMeta& cert, const CertMeta& issuer,
                                std::span<const CertMeta> trust_store, UtcTime now) {
  if (staple.empty()) return reject(RejectReason::MissingStaple);
  OcspResponse resp;
  try {
    resp = decode_ocsp_response(staple);
  } catch (const Error& e) {
    return reject(RejectReason::SignatureInvalid, e.what());
  }
  if (resp.response_status != ResponseStatus::Successful)
    return reject(RejectReason::MissingStaple, std::string(response_status_name(resp.response_status)));
  try {
    verify_ocsp_signature(resp, trust_store, now);
  } catch (const Error& e) {
    return reject(e.code() == Errc::SignatureInvalid ? RejectReason::SignatureInvalid : RejectReason::UntrustedSigner,
                  e.what());
  }
  const SingleResponse* sr = response_for(resp, cert, issuer);
  if (!sr) return reject(RejectReason::CertIdMismatch);
  if (auto bad = status_and_window(*sr, now)) return *bad;
  HandshakeOutcome ok;
  ok.accepted = true;
  return ok;
}

}  // namespace

std::string_view reject_reason_name(RejectReason r) noexcept {
  for (const auto& [k, v] : kReasonNames)
    if (k == r) return v;
  return "?";
}

std::optional<RejectReason> reject_reason_from_name(std::string_view name) noexcept {
  for (const auto& [k, v] : kReasonNames)
    if (v == name) return k;
  return std::nullopt;
}

std::string HandshakeOutcome::verdict() const {
  if (accepted) return "ACCEPT";
  return "REJECT(" + std::string(reason ? reject_reason_name(*reason) : "?") + ")";
}

Bytes StapleBundle::encode() const {
  Bytes out;
  put_blob(out, client_cert);
  put_u32(out, static_cast<std::uint32_t>(issuer_chain.size()));
  for (const auto& c : issuer_chain) put_blob(out, c);
  put_blob(out, stapled_response);
  return out;
}

StapleBundle StapleBundle::decode(BytesView wire) {
  ByteCursor c(wire, Errc::InvalidArgument);
  auto bytes = [&] {
    auto v = c.blob();
    return Bytes(v.begin(), v.end());
  };
  StapleBundle b;
  b.client_cert = bytes();
  std::uint32_t n = c.u32();
  if (n > c.remaining() / 4) fail(Errc::InvalidArgument, "chain length exceeds message");
  for (std::uint32_t i = 0; i < n; ++i) b.issuer_chain.push_back(bytes());
  b.stapled_response = bytes();
  if (!c.empty()) fail(Errc::InvalidArgument, "trailing bytes in bundle");
  return b;
}

StapleBundle client_prepare_bundle(BytesView cert_der, std::vector<Bytes> issuer_chain, StapleCache& cache,
                                   UtcTime now, OcspTransport& upstream) {
  if (issuer_chain.empty()) fail(Errc::InvalidArgument, "issuer chain is empty");
  CacheEntry row = cache.lookup_or_fetch(cert_der, issuer_chain.front(), now, upstream);
  Staple staple = cache.get_staple(SerialNumber::from_decimal(row.serial_number), now);
  return {Bytes(cert_der.begin(), cert_der.end()), std::move(issuer_chain), std::move(staple.response)};
}

HandshakeOutcome server_verify_bundle(const StapleBundle& bundle, std::span<const CertMeta> trust_store,
                                      UtcTime now) {
  HandshakeOutcome out;
  std::optional<CertMeta> cert;
  try {
    cert = parse_certificate(bundle.client_cert);
  } catch (const Error& e) {
    out = reject(RejectReason::ChainInvalid, e.what());
  }
  auto chain = parse_chain(bundle.issuer_chain);
  if (cert) {
    if (!chain || !chain_valid(*cert, *chain, trust_store, now)) out = reject(RejectReason::ChainInvalid);
    else out = check_response(bundle.stapled_response, *cert, chain->front(), trust_store, now);
  }
  out.server_ocsp_queries = 0;
  out.bytes_on_wire = bundle.encode().size();
  return out;
}

HandshakeOutcome server_verify_direct(BytesView cert_der, std::span<const Bytes> issuer_chain, OcspTransport& endpoint,
                                      std::span<const CertMeta> trust_store, UtcTime now) {
  // Without a staple the client still sends its certificate and chain.
  StapleBundle hello{Bytes(cert_der.begin(), cert_der.end()), {issuer_chain.begin(), issuer_chain.end()}, {}};
  std::size_t wire = hello.encode().size();
  HandshakeOutcome out;
  std::optional<CertMeta> cert;
  auto chain = parse_chain(issuer_chain);
  try {
    cert = parse_certificate(cert_der);
  } catch (const Error& e) {
    out = reject(RejectReason::ChainInvalid, e.what());
  }

  Bytes response;
  std::optional<HandshakeOutcome> query_failed;
  if (cert && chain && !chain->empty()) {
    try {
      if (!cert->aia_ocsp_url) fail(Errc::NoOcspUrl, "certificate has no OCSP URL");
      Bytes req = encode_ocsp_request({{compute_cert_id(*cert, chain->front())}, std::nullopt});
      wire += req.size();
      response = endpoint.post(*cert->aia_ocsp_url, req);
      wire += response.size();
    } catch (const Error& e) {
      query_failed = reject(RejectReason::UpstreamUnreachable, e.what());
    }
  }

  if (cert) {
    if (!chain || !chain_valid(*cert, *chain, trust_store, now)) out = reject(RejectReason::ChainInvalid);
    else if (query_failed) out = *query_failed;
    else out = check_response(response, *cert, chain->front(), trust_store, now);
  }
  out.server_ocsp_queries = 1;
  out.bytes_on_wire = wire;
  return out;
}

std::string_view mode_name(HandshakeMode m) noexcept { return m == HandshakeMode::Stapled ? "stapled" : "direct"; }

std::optional<HandshakeMode> mode_from_name(std::string_view name) noexcept {
  if (name == "stapled" || name == "STAPLED") return HandshakeMode::Stapled;
  if (name == "direct" || name == "DIRECT") return HandshakeMode::Direct;
  return std::nullopt;
}

std::string ScenarioStats::to_table() const {
  std::ostringstream out;
  out << "handshakes=" << handshakes << '\n'
      << "accepts=" << accepts << '\n'
      << "rejects=" << rejects << '\n'
      << "server_ocsp_queries=" << server_ocsp_queries << '\n'
      << "client_ocsp_queries=" << client_ocsp_queries << '\n'
      << "total_bytes=" << total_bytes << '\n'
      << "mean_handshake_latency=" << std::fixed << std::setprecision(6) << mean_handshake_latency << '\n';
  for (const auto& [reason, n] : reject_reasons) out << "reject." << reason << '=' << n << '\n';
  return out.str();
}

std::string ScenarioStats::summary() const {
  std::ostringstream out;
  out << handshakes << " handshakes: " << accepts << " accepted, " << rejects << " rejected; " << server_ocsp_queries
      << " server->OCSP queries, " << client_ocsp_queries << " client-side fetches; " << total_bytes
      << " bytes; mean latency " << std::fixed << std::setprecision(3) << mean_handshake_latency << " s";
  return out.str();
}

Simulation::Simulation(SimulationOptions options)
    : options_(options),
      now_(options.start),
      ca_(TestAuthority::generate_root(DistinguishedName::from_string("C=TW, O=staplegrid-sim, CN=sim-root"),
                                       options.start, options.seed)) {
  ResponderConfig cfg;
  cfg.issuer_cert = ca_.root();
  cfg.signing_key = std::make_shared<SigningKey>(ca_.root_key());
  proxy_ = std::make_shared<HybridResponder>(cfg, nullptr);
  proxy_->install_crl(ca_.emit_crl(now_).raw, now_);
  network_.route(kProxyUrl, [this](BytesView req) { return proxy_->handle(req, now_); });
  cache_ = std::make_unique<StapleCache>("", std::vector<CertMeta>{ca_.root()});
}

const CertMeta& Simulation::issue(const std::string& name) {
  if (certs_.count(name)) fail(Errc::InvalidArgument, "certificate already issued: " + name);
  auto cert = ca_.issue_cert(DistinguishedName::from_string("O=dlms-fleet, CN=" + name), std::string(kProxyUrl),
                             std::nullopt, 365, now_);
  return certs_.emplace(name, std::move(cert)).first->second;
}

const CertMeta& Simulation::cert(const std::string& name) const {
  auto it = certs_.find(name);
  if (it == certs_.end()) fail(Errc::InvalidArgument, "no certificate named " + name);
  return it->second;
}

void Simulation::revoke(const std::string& name, RevocationReason reason) {
  ca_.revoke(cert(name).serial_number, reason, now_);
  proxy_->install_crl(ca_.emit_crl(now_).raw, now_);
}

MaintenanceReport Simulation::maintain() { return cache_->maintain(now_, client_link_); }

HandshakeOutcome Simulation::record(HandshakeOutcome o) {
  ++stats_.handshakes;
  if (o.accepted) {
    ++stats_.accepts;
  } else {
    ++stats_.rejects;
    ++stats_.reject_reasons[std::string(o.reason ? reject_reason_name(*o.reason) : "?")];
  }
  stats_.server_ocsp_queries += o.server_ocsp_queries;
  stats_.client_ocsp_queries = client_link_.count();
  stats_.total_bytes += o.bytes_on_wire;
  latency_sum_ += static_cast<double>(1 + o.server_ocsp_queries) * options_.link_rtt_seconds;
  stats_.mean_handshake_latency = latency_sum_ / static_cast<double>(stats_.handshakes);
  return o;
}

HandshakeOutcome Simulation::handshake(const std::string& name, HandshakeMode mode) {
  const CertMeta& c = cert(name);
  std::vector<CertMeta> trust{ca_.root()};
  if (mode == HandshakeMode::Direct) {
    auto ch = chain();
    return record(server_verify_direct(c.raw_der, ch, server_link_, trust, now_));
  }
  StapleBundle bundle;
  try {
    bundle = client_prepare_bundle(c.raw_der, chain(), *cache_, now_, client_link_);
  } catch (const Error& e) {
    // The client could not obtain a staple and presents none.
    bundle = {c.raw_der, chain(), {}};
    auto o = server_verify_bundle(bundle, trust, now_);
    if (!o.accepted) o.detail = e.what();
    return record(o);
  }
  return record(server_verify_bundle(bundle, trust, now_));
}

const StapleBundle& Simulation::capture(const std::string& name, const std::string& label) {
  auto bundle = client_prepare_bundle(cert(name).raw_der, chain(), *cache_, now_, client_link_);
  return captured_[label] = std::move(bundle);
}

HandshakeOutcome Simulation::replay(const std::string& label, bool tamper) {
  auto it = captured_.find(label);
  if (it == captured_.end()) fail(Errc::InvalidArgument, "nothing captured as " + label);
  StapleBundle bundle = it->second;
  if (tamper && !bundle.stapled_response.empty()) {
    // Last byte of the signature value: still well-formed DER, no longer valid.
    auto resp = decode_ocsp_response(bundle.stapled_response);
    auto& der = bundle.stapled_response;
    auto at = std::search(der.begin(), der.end(), resp.signature.begin(), resp.signature.end());
    if (at != der.end()) *(at + static_cast<long>(resp.signature.size()) - 1) ^= 0x01;
  }
  std::vector<CertMeta> trust{ca_.root()};
  return record(server_verify_bundle(bundle, trust, now_));
}

namespace {

std::string client_cert_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "meter-%04zu", i);
  return buf;
}

void run_clients(Simulation& sim, std::size_t n_clients, std::size_t distinct, HandshakeMode mode) {
  std::size_t k = distinct == 0 ? n_clients : distinct;
  for (std::size_t i = 0; i < k; ++i)
    if (!sim.has_cert(client_cert_name(i))) sim.issue(client_cert_name(i));
  for (std::size_t i = 0; i < n_clients; ++i) sim.handshake(client_cert_name(i % k), mode);
}

}  // namespace

ScenarioStats run_scenario(const ScenarioOptions& options) {
  Simulation sim(options.sim);
  run_clients(sim, options.n_clients, options.distinct_certs, options.mode);
  return sim.stats();
}

ScriptResult run_script(std::string_view script) {
  ScriptResult result;
  SimulationOptions sim_opts;
  std::size_t clients = 100, certs = 0;
  HandshakeMode mode = HandshakeMode::Stapled;
  std::unique_ptr<Simulation> sim;
  std::optional<HandshakeOutcome> last;

  std::istringstream in{std::string(script)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream words(line);
    std::vector<std::string> w;
    for (std::string t; words >> t;) w.push_back(t);
    if (w.empty()) continue;
    auto bad = [&](const std::string& why) -> void {
      fail(Errc::InvalidArgument, "line " + std::to_string(lineno) + ": " + why);
    };
    auto need = [&](std::size_t n) {
      if (w.size() < n + 1) bad(w[0] + " needs " + std::to_string(n) + " argument(s)");
    };
    auto number = [&](const std::string& s) -> std::uint64_t {
      try {
        std::size_t used = 0;
        auto v = std::stoull(s, &used);
        if (used == s.size()) return v;
      } catch (const std::exception&) {
      }
      bad("not a number: " + s);
      return 0;
    };
    auto world = [&]() -> Simulation& {
      if (!sim) sim = std::make_unique<Simulation>(sim_opts);
      return *sim;
    };
    auto note = [&](const HandshakeOutcome& o, const std::string& what) {
      last = o;
      result.log.push_back(what + " -> " + o.verdict() + (o.detail.empty() ? "" : " (" + o.detail + ")"));
    };

    const std::string& cmd = w[0];
    try {
      if (cmd == "seed" || cmd == "rtt") {
        need(1);
        if (sim) bad(cmd + " must come before the first fleet event");
        if (cmd == "seed") sim_opts.seed = number(w[1]);
        else sim_opts.link_rtt_seconds = std::stod(w[1]);
      } else if (cmd == "clients") {
        need(1);
        clients = number(w[1]);
      } else if (cmd == "certs") {
        need(1);
        certs = number(w[1]);
      } else if (cmd == "mode") {
        need(1);
        auto m = mode_from_name(w[1]);
        if (!m) bad("unknown mode " + w[1]);
        mode = *m;
      } else if (cmd == "issue") {
        need(1);
        world().issue(w[1]);
        result.log.push_back("issued " + w[1]);
      } else if (cmd == "revoke") {
        need(1);
        auto reason = RevocationReason::KeyCompromise;
        if (w.size() > 2) {
          auto r = reason_from_name(w[2]);
          if (!r) bad("unknown reason " + w[2]);
          reason = *r;
        }
        world().revoke(w[1], reason);
        result.log.push_back("revoked " + w[1]);
      } else if (cmd == "advance") {
        need(1);
        world().advance(parse_duration(w[1]));
        result.log.push_back("clock " + format_sql_time(world().now()));
      } else if (cmd == "maintain") {
        auto r = world().maintain();
        result.log.push_back("maintain: " + std::to_string(r.updated.size()) + " updated, " +
                             std::to_string(r.skipped.size()) + " skipped, " + std::to_string(r.failed.size()) +
                             " failed");
      } else if (cmd == "handshake") {
        need(1);
        HandshakeMode m = mode;
        if (w.size() > 2) {
          auto parsed = mode_from_name(w[2]);
          if (!parsed) bad("unknown mode " + w[2]);
          m = *parsed;
        }
        note(world().handshake(w[1], m), "handshake " + w[1] + " " + std::string(mode_name(m)));
      } else if (cmd == "capture") {
        need(2);
        world().capture(w[1], w[2]);
        result.log.push_back("captured " + w[1] + " as " + w[2]);
      } else if (cmd == "replay") {
        need(1);
        bool tamper = w.size() > 2 && w[2] == "tampered";
        note(world().replay(w[1], tamper), "replay " + w[1] + (tamper ? " tampered" : ""));
      } else if (cmd == "expect") {
        need(1);
        std::string want = w[1] == "accept" ? "ACCEPT" : w[1] == "reject" && w.size() > 2 ? "REJECT(" + w[2] + ")" : "";
        if (want.empty()) bad("expect accept | expect reject REASON");
        if (w[1] == "reject" && !reject_reason_from_name(w[2])) bad("unknown reason " + w[2]);
        std::string got = last ? last->verdict() : "nothing";
        if (got != want)
          result.failed_expectations.push_back("line " + std::to_string(lineno) + ": expected " + want + ", got " + got);
      } else if (cmd == "run") {
        run_clients(world(), clients, certs, mode);
        result.log.push_back("ran " + std::to_string(clients) + " " + std::string(mode_name(mode)) + " handshakes");
      } else {
        bad("unknown directive " + cmd);
      }
    } catch (const Error& e) {
      if (e.code() == Errc::InvalidArgument && std::string(e.what()).rfind("line ", 0) == 0) throw;
      fail(Errc::InvalidArgument, "line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (sim) result.stats = sim->stats();
  return result;
}

HandshakeOutcome replay_attack_scenario(const ReplayOptions& options) {
  SimulationOptions so;
  so.seed = options.seed;
  Simulation sim(so);
  sim.issue("victim");
  sim.capture("victim", "captured");
  sim.revoke("victim", RevocationReason::KeyCompromise);
  sim.advance(options.advance);
  return sim.replay("captured", options.tamper);
}

}  // namespace staplegrid
