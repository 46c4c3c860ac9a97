#include "staplegrid/ocsp.hpp"

#include "staplegrid/error.hpp"
#include "staplegrid/oids.hpp"
#include "x509_internal.hpp"

namespace staplegrid {

namespace {

const Oid& hash_oid(HashAlgorithm alg) { return alg == HashAlgorithm::Sha1 ? oids::kSha1 : oids::kSha256; }

HashAlgorithm hash_from_oid(const Oid& oid) {
  if (oid == oids::kSha1) return HashAlgorithm::Sha1;
  if (oid == oids::kSha256) return HashAlgorithm::Sha256;
  fail(Errc::UnsupportedAlgorithm, oid.to_string());
}

const Bytes& hash_algorithm_der(HashAlgorithm alg) {
  static const Bytes sha1 = der::sequence({der::oid(hash_oid(HashAlgorithm::Sha1)), der::null()});
  static const Bytes sha256 = der::sequence({der::oid(hash_oid(HashAlgorithm::Sha256)), der::null()});
  return alg == HashAlgorithm::Sha1 ? sha1 : sha256;
}

Bytes encode_cert_id(const CertId& id) {
  return der::sequence({
      hash_algorithm_der(id.hash_alg),
      der::octet_string(id.issuer_name_hash),
      der::octet_string(id.issuer_key_hash),
      der::integer(id.serial_number),
  });
}

CertId decode_cert_id(der::Reader& r) {
  der::Reader seq = r.enter(der::kSequence);
  CertId id;
  id.hash_alg = hash_from_oid(detail::read_algorithm(seq));
  auto name_hash = seq.read(der::kOctetString).content;
  auto key_hash = seq.read(der::kOctetString).content;
  id.issuer_name_hash.assign(name_hash.begin(), name_hash.end());
  id.issuer_key_hash.assign(key_hash.begin(), key_hash.end());
  id.serial_number = SerialNumber::from_der_content(seq.read(der::kInteger).content);
  seq.expect_end();
  const auto want = digest_size(id.hash_alg);
  if (id.issuer_name_hash.size() != want || id.issuer_key_hash.size() != want) {
    fail(Errc::MalformedDer, "CertID hash length does not match its algorithm");
  }
  return id;
}

Bytes encode_nonce_extensions(BytesView nonce) {
  Bytes ext = detail::encode_extension(oids::kOcspNonce, false, der::octet_string(nonce));
  return der::tlv(der::kSequence, ext);
}

std::optional<Bytes> find_nonce(const der::Element& extensions_seq) {
  for (const auto& ext : detail::read_extensions(extensions_seq)) {
    if (!(ext.oid == oids::kOcspNonce)) continue;
    // RFC 8954 wraps the nonce in an OCTET STRING; older peers send it bare.
    try {
      auto inner = der::parse_single(ext.value, der::kOctetString);
      return Bytes(inner.content.begin(), inner.content.end());
    } catch (const Error&) {
      return Bytes(ext.value.begin(), ext.value.end());
    }
  }
  return std::nullopt;
}

void check_nonce_bounds(const std::optional<Bytes>& nonce, Errc code) {
  if (nonce && (nonce->size() < kMinNonceSize || nonce->size() > kMaxNonceSize)) {
    fail(code, "nonce must be 8..32 bytes, got " + std::to_string(nonce->size()));
  }
}

Bytes encode_cert_status(const CertStatus& st) {
  switch (st.kind) {
    case CertStatus::Kind::Good: return der::tlv(der::context(0, false), {});
    case CertStatus::Kind::Unknown: return der::tlv(der::context(2, false), {});
    case CertStatus::Kind::Revoked: {
      Bytes info = der::generalized_time(st.revocation_time);
      if (st.reason != RevocationReason::Unspecified) {
        append(info, der::explicit_wrap(0, der::enumerated(static_cast<std::int64_t>(st.reason))));
      }
      return der::tlv(der::context(1, true), info);
    }
  }
  return {};
}

CertStatus decode_cert_status(der::Reader& r) {
  der::Element e = r.read();
  if (e.tag == der::context(0, false) && e.content.empty()) return CertStatus::good();
  if (e.tag == der::context(2, false) && e.content.empty()) return CertStatus::unknown();
  if (e.tag != der::context(1, true)) fail(Errc::MalformedDer, "bad CertStatus");
  der::Reader info(e.content);
  UtcTime at = der::decode_time(info.read(der::kGeneralizedTime));
  RevocationReason reason = RevocationReason::Unspecified;
  if (auto wrapped = info.read_optional(der::explicit_tag(0))) {
    auto code = der::decode_small_integer(der::parse_single(wrapped->content, der::kEnumerated));
    auto decoded = reason_from_code(static_cast<long>(code));
    if (!decoded) fail(Errc::MalformedDer, "unsupported revocation reason " + std::to_string(code));
    reason = *decoded;
  }
  info.expect_end();
  return CertStatus::revoked(at, reason);
}

void check_single(const SingleResponse& s, UtcTime produced_at, Errc code) {
  if (s.next_update && !(s.this_update < *s.next_update)) {
    fail(code, "nextUpdate must follow thisUpdate");
  }
  if (s.status.kind == CertStatus::Kind::Revoked && s.status.revocation_time > produced_at) {
    fail(code, "revocation time after producedAt");
  }
}

// Encoded times repeat across a batch; keep the last one around.
struct TimeCache {
  UtcTime at{};
  Bytes der;
  bool set = false;
  BytesView get(UtcTime t) {
    if (!set || t != at) {
      at = t;
      der = der::generalized_time(t);
      set = true;
    }
    return der;
  }
};

void append_single(Bytes& out, const SingleResponse& s, TimeCache& this_cache, TimeCache& next_cache) {
  const CertId& id = s.cert_id;
  BytesView alg = hash_algorithm_der(id.hash_alg);
  Bytes serial = id.serial_number.der_content();
  std::size_t id_len = alg.size() + der::tlv_size(id.issuer_name_hash.size()) +
                       der::tlv_size(id.issuer_key_hash.size()) + der::tlv_size(serial.size());
  Bytes status = encode_cert_status(s.status);
  BytesView this_der = this_cache.get(s.this_update);
  BytesView next_der;
  if (s.next_update) next_der = next_cache.get(*s.next_update);
  std::size_t len = der::tlv_size(id_len) + status.size() + this_der.size();
  if (s.next_update) len += der::tlv_size(next_der.size());

  der::append_header(out, der::kSequence, len);
  der::append_header(out, der::kSequence, id_len);
  append(out, alg);
  der::append_tlv(out, der::kOctetString, id.issuer_name_hash);
  der::append_tlv(out, der::kOctetString, id.issuer_key_hash);
  der::append_tlv(out, der::kInteger, serial);
  append(out, status);
  append(out, this_der);
  if (s.next_update) der::append_tlv(out, der::explicit_tag(0), next_der);
}

SingleResponse decode_single(der::Reader& list) {
  der::Reader seq = list.enter(der::kSequence);
  SingleResponse s;
  s.cert_id = decode_cert_id(seq);
  s.status = decode_cert_status(seq);
  s.this_update = der::decode_time(seq.read(der::kGeneralizedTime));
  if (auto next = seq.read_optional(der::explicit_tag(0))) {
    s.next_update = der::decode_time(der::parse_single(next->content, der::kGeneralizedTime));
  }
  seq.read_optional(der::explicit_tag(1));  // singleExtensions
  seq.expect_end();
  return s;
}

}  // namespace

IssuerHashes IssuerHashes::of(const CertMeta& issuer, HashAlgorithm alg) {
  return {alg, digest(alg, issuer.subject_dn.der()), digest(alg, issuer.public_key_bits)};
}

CertId compute_cert_id(const CertMeta& subject, const CertMeta& issuer, HashAlgorithm alg) {
  if (!(subject.issuer_dn == issuer.subject_dn)) {
    fail(Errc::IssuerMismatch, "certificate issuer '" + subject.issuer_dn.to_string() +
                                   "' is not '" + issuer.subject_dn.to_string() + "'");
  }
  auto hashes = IssuerHashes::of(issuer, alg);
  return {alg, std::move(hashes.name_hash), std::move(hashes.key_hash), subject.serial_number};
}

CertId compute_cert_id(const CertMeta& subject, BytesView issuer_der, HashAlgorithm alg) {
  return compute_cert_id(subject, parse_certificate(issuer_der), alg);
}

Bytes encode_ocsp_request(const OcspRequest& req) {
  if (req.cert_ids.empty()) fail(Errc::InvalidArgument, "OCSP request needs at least one CertID");
  check_nonce_bounds(req.nonce, Errc::InvalidArgument);
  Bytes list;
  list.reserve(req.cert_ids.size() * 80);
  for (const auto& id : req.cert_ids) {
    Bytes cid = encode_cert_id(id);
    der::append_header(list, der::kSequence, cid.size());
    append(list, cid);
  }
  Bytes tbs = der::tlv(der::kSequence, list);
  if (req.nonce) append(tbs, der::explicit_wrap(2, encode_nonce_extensions(*req.nonce)));
  return der::sequence({der::tlv(der::kSequence, tbs)});
}

OcspRequest decode_ocsp_request(BytesView der_bytes) {
  der::Reader outer(der::parse_single(der_bytes, der::kSequence).content);
  der::Reader tbs = outer.enter(der::kSequence);
  outer.read_optional(der::explicit_tag(0));  // optionalSignature
  outer.expect_end();

  if (auto version = tbs.read_optional(der::explicit_tag(0))) {
    if (der::decode_small_integer(der::parse_single(version->content, der::kInteger)) != 0) {
      fail(Errc::UnsupportedVersion, "OCSP request version");
    }
  }
  tbs.read_optional(der::explicit_tag(1));  // requestorName
  OcspRequest req;
  der::Reader list = tbs.enter(der::kSequence);
  while (!list.empty()) {
    der::Reader request = list.enter(der::kSequence);
    req.cert_ids.push_back(decode_cert_id(request));
    request.read_optional(der::explicit_tag(0));  // singleRequestExtensions
    request.expect_end();
  }
  if (req.cert_ids.empty()) fail(Errc::MalformedDer, "empty requestList");
  if (auto exts = tbs.read_optional(der::explicit_tag(2))) {
    req.nonce = find_nonce(der::parse_single(exts->content, der::kSequence));
  }
  tbs.expect_end();
  check_nonce_bounds(req.nonce, Errc::MalformedDer);
  return req;
}

std::string_view response_status_name(ResponseStatus s) noexcept {
  switch (s) {
    case ResponseStatus::Successful: return "SUCCESSFUL";
    case ResponseStatus::MalformedRequest: return "MALFORMED_REQUEST";
    case ResponseStatus::InternalError: return "INTERNAL_ERROR";
    case ResponseStatus::TryLater: return "TRY_LATER";
    case ResponseStatus::SigRequired: return "SIG_REQUIRED";
    case ResponseStatus::Unauthorized: return "UNAUTHORIZED";
  }
  return "UNKNOWN";
}

std::string_view status_name(CertStatus::Kind k) noexcept {
  switch (k) {
    case CertStatus::Kind::Good: return "GOOD";
    case CertStatus::Kind::Revoked: return "REVOKED";
    case CertStatus::Kind::Unknown: return "UNKNOWN";
  }
  return "UNKNOWN";
}

ResponderId ResponderId::by_name(const CertMeta& signer) { return {Kind::ByName, signer.subject_dn.der()}; }

ResponderId ResponderId::by_key(const CertMeta& signer) { return {Kind::ByKey, sha1(signer.public_key_bits)}; }

bool ResponderId::identifies(const CertMeta& cert) const {
  if (kind == Kind::ByName) return value == cert.subject_dn.der();
  return value == sha1(cert.public_key_bits);
}

ResponseData OcspResponse::data() const { return {responder_id, produced_at, single_responses, nonce_echo}; }

const SingleResponse* OcspResponse::find(const CertId& id) const {
  for (const auto& s : single_responses) {
    if (s.cert_id == id) return &s;
  }
  return nullptr;
}

Bytes encode_ocsp_response(const ResponseData& data, Signer& key, std::span<const Bytes> signer_certs) {
  if (data.responses.empty()) fail(Errc::InvalidArgument, "successful response needs a SingleResponse");
  Bytes responder = data.responder_id.kind == ResponderId::Kind::ByName
                        ? der::explicit_wrap(1, data.responder_id.value)
                        : der::explicit_wrap(2, der::octet_string(data.responder_id.value));
  Bytes list;
  list.reserve(data.responses.size() * 96);
  TimeCache this_cache, next_cache;
  for (const auto& s : data.responses) {
    check_single(s, data.produced_at, Errc::InvalidArgument);
    append_single(list, s, this_cache, next_cache);
  }
  Bytes tbs_content = der::concat({responder, der::generalized_time(data.produced_at), der::tlv(der::kSequence, list)});
  if (data.nonce) append(tbs_content, der::explicit_wrap(1, encode_nonce_extensions(*data.nonce)));
  Bytes tbs = der::tlv(der::kSequence, tbs_content);

  Bytes basic = der::concat({tbs, algorithm_identifier(key.scheme()), der::bit_string(key.sign(tbs))});
  if (!signer_certs.empty()) {
    Bytes certs;
    for (const auto& c : signer_certs) append(certs, c);
    append(basic, der::explicit_wrap(0, der::tlv(der::kSequence, certs)));
  }
  Bytes response_bytes = der::sequence({der::oid(oids::kOcspBasic), der::octet_string(der::tlv(der::kSequence, basic))});
  return der::sequence({der::enumerated(0), der::explicit_wrap(0, response_bytes)});
}

Bytes encode_ocsp_error(ResponseStatus status) {
  if (status == ResponseStatus::Successful) fail(Errc::InvalidArgument, "not an error status");
  return der::sequence({der::enumerated(static_cast<std::int64_t>(status))});
}

OcspResponse decode_ocsp_response(BytesView der_bytes) {
  OcspResponse resp;
  der::Reader outer(der::parse_single(der_bytes, der::kSequence).content);
  auto status = der::decode_small_integer(outer.read(der::kEnumerated));
  switch (status) {
    case 0: case 1: case 2: case 3: case 5: case 6: break;
    default: fail(Errc::MalformedDer, "unknown OCSPResponseStatus " + std::to_string(status));
  }
  resp.response_status = static_cast<ResponseStatus>(status);
  auto bytes_el = outer.read_optional(der::explicit_tag(0));
  outer.expect_end();
  resp.raw_der.assign(der_bytes.begin(), der_bytes.end());

  if (resp.response_status != ResponseStatus::Successful) {
    if (bytes_el) fail(Errc::MalformedDer, "error response carries responseBytes");
    return resp;
  }
  if (!bytes_el) fail(Errc::MalformedDer, "successful response without responseBytes");

  der::Reader rb(der::parse_single(bytes_el->content, der::kSequence).content);
  Oid type = der::decode_oid(rb.read(der::kOid));
  if (!(type == oids::kOcspBasic)) fail(Errc::UnsupportedAlgorithm, type.to_string());
  auto basic_octets = rb.read(der::kOctetString).content;
  rb.expect_end();

  der::Reader basic(der::parse_single(basic_octets, der::kSequence).content);
  der::Element tbs_el = basic.read(der::kSequence);
  resp.signature_alg = scheme_from_oid(detail::read_algorithm(basic));
  BytesView sig = der::decode_bit_string(basic.read(der::kBitString));
  resp.signature.assign(sig.begin(), sig.end());
  if (auto certs = basic.read_optional(der::explicit_tag(0))) {
    der::Reader list(der::parse_single(certs->content, der::kSequence).content);
    while (!list.empty()) {
      auto c = list.read(der::kSequence);
      resp.signer_certs.emplace_back(c.encoded.begin(), c.encoded.end());
    }
  }
  basic.expect_end();

  der::Reader tbs(tbs_el.content);
  if (auto version = tbs.read_optional(der::explicit_tag(0))) {
    if (der::decode_small_integer(der::parse_single(version->content, der::kInteger)) != 0) {
      fail(Errc::UnsupportedVersion, "OCSP response version");
    }
  }
  der::Element rid = tbs.read();
  if (rid.tag == der::explicit_tag(1)) {
    resp.responder_id.kind = ResponderId::Kind::ByName;
    auto name = der::parse_single(rid.content, der::kSequence);
    resp.responder_id.value = DistinguishedName::from_der(name.encoded).der();
  } else if (rid.tag == der::explicit_tag(2)) {
    resp.responder_id.kind = ResponderId::Kind::ByKey;
    auto hash = der::parse_single(rid.content, der::kOctetString).content;
    resp.responder_id.value.assign(hash.begin(), hash.end());
  } else {
    fail(Errc::MalformedDer, "bad ResponderID");
  }
  resp.produced_at = der::decode_time(tbs.read(der::kGeneralizedTime));
  der::Reader list = tbs.enter(der::kSequence);
  while (!list.empty()) resp.single_responses.push_back(decode_single(list));
  if (resp.single_responses.empty()) fail(Errc::MalformedDer, "successful response without SingleResponse");
  if (auto exts = tbs.read_optional(der::explicit_tag(1))) {
    resp.nonce_echo = find_nonce(der::parse_single(exts->content, der::kSequence));
  }
  tbs.expect_end();
  for (const auto& s : resp.single_responses) check_single(s, resp.produced_at, Errc::MalformedDer);

  resp.tbs_response_data.assign(tbs_el.encoded.begin(), tbs_el.encoded.end());
  return resp;
}

VerifiedResponse verify_ocsp_signature(const OcspResponse& resp, std::span<const CertMeta> trust_anchors,
                                       UtcTime now) {
  if (resp.response_status != ResponseStatus::Successful) {
    fail(Errc::InvalidArgument, "only successful responses carry signatures");
  }

  std::vector<CertMeta> embedded;
  for (const auto& der_cert : resp.signer_certs) {
    try {
      embedded.push_back(parse_certificate(der_cert));
    } catch (const Error&) {
      // An unparseable embedded certificate can never be the signer.
    }
  }

  const CertMeta* signer = nullptr;
  const CertMeta* anchor_signer = nullptr;
  auto verifies = [&](const CertMeta& c) {
    return verify_signature(c.public_key_info, resp.signature_alg, resp.tbs_response_data, resp.signature);
  };
  for (const auto& a : trust_anchors) {
    if (verifies(a)) {
      signer = anchor_signer = &a;
      break;
    }
  }
  if (!signer) {
    for (const auto& c : embedded) {
      if (verifies(c)) {
        signer = &c;
        break;
      }
    }
  }
  if (!signer) fail(Errc::SignatureInvalid, "no trusted or embedded key verifies the response");
  if (!resp.responder_id.identifies(*signer)) fail(Errc::UntrustedSigner, "responderID does not name the signer");

  if (!anchor_signer) {
    for (const auto& a : trust_anchors) {
      if (a.public_key_info == signer->public_key_info && a.subject_dn == signer->subject_dn) {
        anchor_signer = &a;
        break;
      }
    }
  }
  if (anchor_signer) {
    if (!anchor_signer->valid_at(now)) fail(Errc::SignerCertExpired, "trust anchor outside its validity");
    return VerifiedResponse(resp, *anchor_signer);
  }

  const CertMeta* issuing_anchor = nullptr;
  for (const auto& a : trust_anchors) {
    if (is_issued_by(*signer, a)) {
      issuing_anchor = &a;
      break;
    }
  }
  if (!issuing_anchor) fail(Errc::UntrustedSigner, "signer does not chain to a trust anchor");
  if (!signer->ocsp_signing) fail(Errc::UntrustedSigner, "delegated signer lacks id-kp-OCSPSigning");
  if (!signer->valid_at(now) || !issuing_anchor->valid_at(now)) {
    fail(Errc::SignerCertExpired, "signer certificate outside its validity");
  }
  return VerifiedResponse(resp, *signer);
}

}  // namespace staplegrid
