#include "staplegrid/crl.hpp"

#include <unordered_set>

#include "staplegrid/error.hpp"
#include "staplegrid/oids.hpp"
#include "staplegrid/pem.hpp"
#include "x509_internal.hpp"

namespace staplegrid {

namespace {

bool is_time_tag(std::optional<std::uint8_t> tag) {
  return tag == der::kUtcTime || tag == der::kGeneralizedTime;
}

CrlEntry read_entry(der::Reader& list) {
  der::Reader entry = list.enter(der::kSequence);
  CrlEntry e;
  e.serial_number = SerialNumber::from_der_content(entry.read(der::kInteger).content);
  e.revocation_date = der::decode_time(entry.read());
  if (auto exts = entry.read_optional(der::kSequence)) {
    for (const auto& ext : detail::read_extensions(*exts)) {
      if (ext.oid == oids::kCrlReason) {
        auto code = der::decode_small_integer(der::parse_single(ext.value, der::kEnumerated));
        auto reason = reason_from_code(static_cast<long>(code));
        if (!reason) fail(Errc::MalformedDer, "unsupported CRL reason code " + std::to_string(code));
        e.reason = *reason;
      }
    }
  }
  entry.expect_end();
  return e;
}

}  // namespace

CrlSnapshot parse_crl(BytesView input, CrlEncoding encoding) {
  Bytes der_bytes;
  if (encoding == CrlEncoding::Pem) {
    der_bytes = pem_decode(std::string_view(reinterpret_cast<const char*>(input.data()), input.size()), kPemCrl);
  } else {
    der_bytes.assign(input.begin(), input.end());
  }

  CrlSnapshot crl;
  der::Reader outer(der::parse_single(der_bytes, der::kSequence).content);
  der::Element tbs_el = outer.read(der::kSequence);
  if (outer.empty()) fail(Errc::SignatureFieldMissing, "CRL carries no signature algorithm");
  crl.signature_alg = detail::read_algorithm(outer);
  if (outer.empty()) fail(Errc::SignatureFieldMissing, "CRL carries no signature value");
  BytesView sig = der::decode_bit_string(outer.read(der::kBitString));
  crl.signature.assign(sig.begin(), sig.end());
  outer.expect_end();

  der::Reader tbs(tbs_el.content);
  if (auto version = tbs.read_optional(der::kInteger)) {
    auto v = der::decode_small_integer(*version);
    if (v != 1) fail(Errc::UnsupportedVersion, "CRL version " + std::to_string(v + 1));
    crl.version = 2;
  }
  detail::read_algorithm(tbs);
  crl.issuer_dn = DistinguishedName::from_der(tbs.read(der::kSequence).encoded);
  crl.last_update = der::decode_time(tbs.read());
  if (is_time_tag(tbs.peek_tag())) crl.next_update = der::decode_time(tbs.read());
  if (crl.next_update && *crl.next_update < crl.last_update) {
    fail(Errc::MalformedDer, "nextUpdate precedes thisUpdate");
  }
  if (auto revoked = tbs.read_optional(der::kSequence)) {
    der::Reader list(revoked->content);
    std::unordered_set<SerialNumber> seen;
    while (!list.empty()) {
      CrlEntry e = read_entry(list);
      if (!seen.insert(e.serial_number).second) {
        fail(Errc::MalformedDer, "duplicate CRL serial " + e.serial_number.to_hex());
      }
      crl.entries.push_back(std::move(e));
    }
  }
  if (auto exts = tbs.read_optional(der::explicit_tag(0))) {
    for (const auto& ext : detail::read_extensions(der::parse_single(exts->content, der::kSequence))) {
      if (ext.oid == oids::kCrlNumber) {
        auto n = der::decode_small_integer(der::parse_single(ext.value, der::kInteger));
        if (n < 0) fail(Errc::MalformedDer, "negative CRL number");
        crl.crl_number = static_cast<std::uint64_t>(n);
      }
    }
  }
  tbs.expect_end();

  crl.tbs_der.assign(tbs_el.encoded.begin(), tbs_el.encoded.end());
  crl.raw = std::move(der_bytes);
  return crl;
}

CrlSnapshot load_crl(BytesView der_or_pem) {
  return parse_crl(der_or_pem, looks_like_pem(der_or_pem) ? CrlEncoding::Pem : CrlEncoding::Der);
}

bool verify_crl_signature(const CrlSnapshot& crl, const CertMeta& issuer) {
  if (!(crl.issuer_dn == issuer.subject_dn)) return false;
  SignatureScheme scheme;
  try {
    scheme = scheme_from_oid(crl.signature_alg);
  } catch (const Error&) {
    return false;
  }
  return verify_signature(issuer.public_key_info, scheme, crl.tbs_der, crl.signature);
}

Bytes encode_crl(const CrlFields& f, Signer& issuer_key) {
  const Bytes alg = algorithm_identifier(issuer_key.scheme());
  Bytes tbs_content = der::concat({der::integer(1), alg, f.issuer_dn.der(), der::x509_time(f.last_update)});
  if (f.next_update) append(tbs_content, der::x509_time(*f.next_update));
  if (!f.entries.empty()) {
    Bytes list;
    for (const auto& e : f.entries) {
      Bytes entry = der::concat({der::integer(e.serial_number), der::x509_time(e.revocation_date)});
      if (e.reason != RevocationReason::Unspecified) {
        Bytes reason_ext = detail::encode_extension(oids::kCrlReason, false,
                                                    der::enumerated(static_cast<std::int64_t>(e.reason)));
        append(entry, der::tlv(der::kSequence, reason_ext));
      }
      append(list, der::tlv(der::kSequence, entry));
    }
    append(tbs_content, der::tlv(der::kSequence, list));
  }
  if (f.crl_number) {
    Bytes ext = detail::encode_extension(oids::kCrlNumber, false,
                                         der::integer(static_cast<std::int64_t>(*f.crl_number)));
    append(tbs_content, der::explicit_wrap(0, der::tlv(der::kSequence, ext)));
  }
  Bytes tbs = der::tlv(der::kSequence, tbs_content);
  Bytes signature = issuer_key.sign(tbs);
  return der::sequence({tbs, alg, der::bit_string(signature)});
}

}  // namespace staplegrid
