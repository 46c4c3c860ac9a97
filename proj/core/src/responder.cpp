#include "staplegrid/responder.hpp"

#include <fstream>
#include <sstream>

#include "staplegrid/error.hpp"
#include "staplegrid/pem.hpp"
#include "staplegrid/transport.hpp"

namespace staplegrid {

BlacklistIndex BlacklistIndex::from_crl(const CrlSnapshot& crl, UtcTime now, std::uint64_t generation) {
  BlacklistIndex idx;
  idx.by_serial.reserve(crl.entries.size());
  for (const auto& e : crl.entries) idx.by_serial.emplace(e.serial_number, Revocation{e.revocation_date, e.reason});
  idx.source_crl_last_update = crl.last_update;
  idx.loaded_at = now;
  idx.generation = generation;
  idx.crl_der = crl.raw;
  return idx;
}

const Revocation* BlacklistIndex::find(const SerialNumber& serial) const {
  auto it = by_serial.find(serial);
  return it == by_serial.end() ? nullptr : &it->second;
}

namespace {

class FileCrlSource final : public CrlSource {
 public:
  explicit FileCrlSource(std::filesystem::path p) : path_(std::move(p)) {}
  Bytes fetch() override {
    std::ifstream in(path_, std::ios::binary);
    if (!in) fail(Errc::SourceUnavailable, "cannot read " + path_.string());
    return Bytes(std::istreambuf_iterator<char>(in), {});
  }
  std::string describe() const override { return path_.string(); }

 private:
  std::filesystem::path path_;
};

class HttpCrlSource final : public CrlSource {
 public:
  explicit HttpCrlSource(std::string url) : url_(std::move(url)) {}
  Bytes fetch() override {
    try {
      return http_get(url_);
    } catch (const Error& e) {
      fail(Errc::SourceUnavailable, e.what());
    }
  }
  std::string describe() const override { return url_; }

 private:
  std::string url_;
};

Bytes read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::Io, "cannot read " + path);
  return Bytes(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

std::unique_ptr<CrlSource> make_crl_source(const std::string& url_or_path) {
  if (url_or_path.rfind("http://", 0) == 0) return std::make_unique<HttpCrlSource>(url_or_path);
  return std::make_unique<FileCrlSource>(url_or_path);
}

void ResponderConfig::validate() const {
  if (refresh_interval <= Seconds::zero()) fail(Errc::InvalidArgument, "refresh_interval must be positive");
  if (response_validity <= Seconds::zero()) fail(Errc::InvalidArgument, "response_validity must be positive");
  if (!signing_key) fail(Errc::InvalidArgument, "no signing key");
  if (signing_key->public_key_der() != signer().public_key_info)
    fail(Errc::InvalidArgument, "signing key does not match the responder certificate");
  if (port < 0 || port > 65535) fail(Errc::InvalidArgument, "port out of range");
}

ResponderConfig load_responder_config(const KeyValueConfig& cfg) {
  ResponderConfig c;
  c.listen_address = cfg.get_or("listen", c.listen_address);
  c.port = cfg.int_or("port", c.port);
  c.crl_source = cfg.get_or("crl_source", "");
  c.refresh_interval = cfg.duration_or("refresh_interval", c.refresh_interval);
  c.response_validity = cfg.duration_or("response_validity", c.response_validity);
  auto issuer = cfg.get("issuer_cert");
  auto key = cfg.get("signing_key");
  if (!issuer || !key) fail(Errc::InvalidArgument, "issuer_cert and signing_key are required");
  c.issuer_cert = load_certificate(read_file(*issuer));
  Bytes pem = read_file(*key);
  c.signing_key = std::make_shared<SigningKey>(SigningKey::from_pem(std::string(pem.begin(), pem.end())));
  if (auto s = cfg.get("signer_cert")) c.signer_cert = load_certificate(read_file(*s));
  if (c.crl_source.empty()) fail(Errc::InvalidArgument, "crl_source is required");
  c.validate();
  return c;
}

Bytes answer_query_der(const OcspRequest& req, const BlacklistIndex& index, const ResponderConfig& config,
                       UtcTime now) {
  IssuerHashes sha1 = IssuerHashes::of(config.issuer_cert, HashAlgorithm::Sha1);
  IssuerHashes sha256 = IssuerHashes::of(config.issuer_cert, HashAlgorithm::Sha256);
  ResponseData data;
  data.responder_id = ResponderId::by_key(config.signer());
  data.produced_at = now;
  data.nonce = req.nonce;
  data.responses.reserve(req.cert_ids.size());
  for (const auto& id : req.cert_ids) {
    const IssuerHashes& ours = id.hash_alg == HashAlgorithm::Sha1 ? sha1 : sha256;
    CertStatus st;
    if (!ours.matches(id)) {
      st = CertStatus::unknown();
    } else if (const Revocation* r = index.find(id.serial_number)) {
      st = CertStatus::revoked(r->at, r->reason);
    }
    data.responses.push_back({id, st, now, now + config.response_validity});
  }
  std::vector<Bytes> certs{config.signer().raw_der};
  return encode_ocsp_response(data, *config.signing_key, certs);
}

OcspResponse answer_query(const OcspRequest& req, const BlacklistIndex& index, const ResponderConfig& config,
                          UtcTime now) {
  return decode_ocsp_response(answer_query_der(req, index, config, now));
}

HybridResponder::HybridResponder(ResponderConfig config, std::unique_ptr<CrlSource> source)
    : config_(std::move(config)), source_(std::move(source)) {
  config_.validate();
}

std::shared_ptr<const BlacklistIndex> HybridResponder::refresh_blacklist(UtcTime now) {
  if (!source_) fail(Errc::SourceUnavailable, "no CRL source configured");
  Bytes raw;
  try {
    raw = source_->fetch();
  } catch (const Error& e) {
    fail(Errc::SourceUnavailable, source_->describe() + ": " + e.what());
  }
  return install_crl(raw, now);
}

std::shared_ptr<const BlacklistIndex> HybridResponder::install_crl(BytesView raw, UtcTime now) {
  std::lock_guard refresh(refresh_mu_);
  CrlSnapshot crl;
  try {
    crl = load_crl(raw);
  } catch (const Error& e) {
    fail(Errc::SourceUnavailable, std::string("CRL rejected: ") + e.what());
  }
  if (crl.issuer_dn != config_.issuer_cert.subject_dn || !verify_crl_signature(crl, config_.issuer_cert))
    fail(Errc::SourceUnavailable, "CRL is not signed by the configured issuer");
  std::uint64_t gen;
  {
    std::lock_guard lock(mu_);
    gen = ++generation_;
  }
  auto fresh = std::make_shared<const BlacklistIndex>(BlacklistIndex::from_crl(crl, now, gen));
  std::lock_guard lock(mu_);
  index_ = fresh;
  return fresh;
}

std::shared_ptr<const BlacklistIndex> HybridResponder::index() const {
  std::lock_guard lock(mu_);
  return index_;
}

Bytes HybridResponder::handle(BytesView request_der, UtcTime now) const {
  OcspRequest req;
  try {
    req = decode_ocsp_request(request_der);
  } catch (const Error&) {
    return encode_ocsp_error(ResponseStatus::MalformedRequest);
  }
  auto idx = index();
  if (!idx) return encode_ocsp_error(ResponseStatus::TryLater);
  try {
    return answer_query_der(req, *idx, config_, now);
  } catch (const Error&) {
    return encode_ocsp_error(ResponseStatus::InternalError);
  }
}

std::optional<Bytes> HybridResponder::current_crl() const {
  auto idx = index();
  if (!idx) return std::nullopt;
  return idx->crl_der;
}

}  // namespace staplegrid
