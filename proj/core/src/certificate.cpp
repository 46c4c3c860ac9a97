#include "staplegrid/certificate.hpp"

#include "staplegrid/error.hpp"
#include "staplegrid/oids.hpp"
#include "staplegrid/pem.hpp"
#include "x509_internal.hpp"

namespace staplegrid {

namespace {

constexpr std::uint8_t kUriTag = der::context(6, false);

std::optional<std::string> first_ocsp_url(BytesView value) {
  der::Reader list(der::parse_single(value, der::kSequence).content);
  std::optional<std::string> url;
  while (!list.empty()) {
    der::Reader desc = list.enter(der::kSequence);
    Oid method = der::decode_oid(desc.read(der::kOid));
    der::Element location = desc.read();
    desc.expect_end();
    if (!url && method == oids::kAdOcsp && location.tag == kUriTag) url = der::decode_string(location);
  }
  return url;
}

std::optional<std::string> first_crl_url(BytesView value) {
  der::Reader points(der::parse_single(value, der::kSequence).content);
  std::optional<std::string> url;
  while (!points.empty()) {
    der::Reader point = points.enter(der::kSequence);
    auto dp_name = point.read_optional(der::explicit_tag(0));
    while (!point.empty()) point.read();  // reasons, cRLIssuer
    if (!dp_name) continue;
    der::Reader choice(dp_name->content);
    auto full_name = choice.read_optional(der::context(0, true));
    if (!full_name) continue;
    der::Reader names(full_name->content);
    while (!names.empty()) {
      auto gn = names.read();
      if (!url && gn.tag == kUriTag) url = der::decode_string(gn);
    }
  }
  return url;
}

bool basic_constraints_ca(BytesView value) {
  der::Reader bc(der::parse_single(value, der::kSequence).content);
  bool ca = false;
  if (auto flag = bc.read_optional(der::kBoolean)) ca = der::decode_boolean(*flag);
  if (!bc.empty()) bc.read(der::kInteger);
  bc.expect_end();
  return ca;
}

bool has_ocsp_signing(BytesView value) {
  der::Reader list(der::parse_single(value, der::kSequence).content);
  bool found = false;
  while (!list.empty()) {
    if (der::decode_oid(list.read(der::kOid)) == oids::kKpOcspSigning) found = true;
  }
  return found;
}

bool is_understood(const Oid& oid) {
  static const Oid* const known[] = {
      &oids::kSubjectKeyIdentifier, &oids::kKeyUsage,          &oids::kBasicConstraints,
      &oids::kAuthorityKeyIdentifier, &oids::kExtKeyUsage,     &oids::kAuthorityInfoAccess,
      &oids::kCrlDistributionPoints,
  };
  for (const Oid* k : known) {
    if (*k == oid) return true;
  }
  return false;
}

}  // namespace

CertMeta parse_certificate(BytesView der_bytes) {
  CertMeta meta;
  der::Reader cert(der::parse_single(der_bytes, der::kSequence).content);
  der::Element tbs_el = cert.read(der::kSequence);
  meta.signature_alg = detail::read_algorithm(cert);
  BytesView sig = der::decode_bit_string(cert.read(der::kBitString));
  meta.signature.assign(sig.begin(), sig.end());
  cert.expect_end();

  der::Reader tbs(tbs_el.content);
  auto version_el = tbs.read_optional(der::explicit_tag(0));
  if (!version_el) fail(Errc::UnsupportedVersion, "v1 certificate");
  std::int64_t version = der::decode_small_integer(der::parse_single(version_el->content, der::kInteger));
  if (version != 2) fail(Errc::UnsupportedVersion, "certificate version " + std::to_string(version + 1));

  meta.serial_number = SerialNumber::from_der_content(tbs.read(der::kInteger).content);
  if (meta.serial_number.is_zero()) fail(Errc::MalformedDer, "serial number must be positive");
  Oid inner_alg = detail::read_algorithm(tbs);
  if (!(inner_alg == meta.signature_alg)) fail(Errc::MalformedDer, "signature algorithm mismatch");
  meta.issuer_dn = DistinguishedName::from_der(tbs.read(der::kSequence).encoded);
  der::Reader validity = tbs.enter(der::kSequence);
  meta.not_before = der::decode_time(validity.read());
  meta.not_after = der::decode_time(validity.read());
  validity.expect_end();
  if (meta.not_before > meta.not_after) fail(Errc::MalformedDer, "notBefore after notAfter");
  meta.subject_dn = DistinguishedName::from_der(tbs.read(der::kSequence).encoded);

  der::Element spki_el = tbs.read(der::kSequence);
  meta.public_key_info.assign(spki_el.encoded.begin(), spki_el.encoded.end());
  der::Reader spki(spki_el.content);
  detail::read_algorithm(spki);
  BytesView key_bits = der::decode_bit_string(spki.read(der::kBitString));
  meta.public_key_bits.assign(key_bits.begin(), key_bits.end());
  spki.expect_end();

  tbs.read_optional(der::context(1, false));  // issuerUniqueID
  tbs.read_optional(der::context(2, false));  // subjectUniqueID
  if (auto exts = tbs.read_optional(der::explicit_tag(3))) {
    for (const auto& ext : detail::read_extensions(der::parse_single(exts->content, der::kSequence))) {
      if (ext.oid == oids::kAuthorityInfoAccess) {
        meta.aia_ocsp_url = first_ocsp_url(ext.value);
      } else if (ext.oid == oids::kCrlDistributionPoints) {
        meta.crl_dp_url = first_crl_url(ext.value);
      } else if (ext.oid == oids::kBasicConstraints) {
        meta.is_ca = basic_constraints_ca(ext.value);
      } else if (ext.oid == oids::kExtKeyUsage) {
        meta.ocsp_signing = has_ocsp_signing(ext.value);
      } else if (ext.critical && !is_understood(ext.oid)) {
        meta.warnings.push_back({ext.oid, "unrecognized critical extension " + ext.oid.to_string()});
      }
    }
  }
  tbs.expect_end();

  meta.tbs_der.assign(tbs_el.encoded.begin(), tbs_el.encoded.end());
  meta.raw_der.assign(der_bytes.begin(), der_bytes.end());
  return meta;
}

CertMeta load_certificate(BytesView der_or_pem) {
  return parse_certificate(der_from_der_or_pem(der_or_pem, kPemCertificate));
}

bool is_issued_by(const CertMeta& cert, const CertMeta& issuer) {
  if (!(cert.issuer_dn == issuer.subject_dn)) return false;
  SignatureScheme scheme;
  try {
    scheme = scheme_from_oid(cert.signature_alg);
  } catch (const Error&) {
    return false;
  }
  return verify_signature(issuer.public_key_info, scheme, cert.tbs_der, cert.signature);
}

Bytes encode_certificate(const CertificateFields& f, Signer& issuer_key) {
  const Bytes subject_key_id = sha1(detail::spki_key_bits(f.public_key_info));
  const Bytes issuer_key_id = sha1(detail::spki_key_bits(issuer_key.public_key_der()));

  Bytes exts;
  append(exts, detail::encode_extension(oids::kBasicConstraints, true,
                                        f.is_ca ? der::sequence({der::boolean(true)}) : der::sequence({})));
  const std::uint8_t key_usage = f.is_ca ? 0x86 : 0x80;  // digitalSignature [+ keyCertSign, cRLSign]
  append(exts, detail::encode_extension(oids::kKeyUsage, true,
                                        der::bit_string(BytesView(&key_usage, 1), f.is_ca ? 1 : 7)));
  append(exts, detail::encode_extension(oids::kSubjectKeyIdentifier, false, der::octet_string(subject_key_id)));
  append(exts, detail::encode_extension(oids::kAuthorityKeyIdentifier, false,
                                        der::sequence({der::tlv(der::context(0, false), issuer_key_id)})));
  if (f.ocsp_signing) {
    append(exts, detail::encode_extension(oids::kExtKeyUsage, false,
                                          der::sequence({der::oid(oids::kKpOcspSigning)})));
  }
  if (f.aia_ocsp_url) {
    Bytes uri = der::tlv(der::context(6, false), to_bytes(*f.aia_ocsp_url));
    append(exts, detail::encode_extension(oids::kAuthorityInfoAccess, false,
                                          der::sequence({der::sequence({der::oid(oids::kAdOcsp), uri})})));
  }
  if (f.crl_dp_url) {
    Bytes uri = der::tlv(der::context(6, false), to_bytes(*f.crl_dp_url));
    Bytes full_name = der::tlv(der::context(0, true), uri);
    Bytes point = der::sequence({der::explicit_wrap(0, full_name)});
    append(exts, detail::encode_extension(oids::kCrlDistributionPoints, false, der::sequence({point})));
  }
  for (const auto& extra : f.extra_extensions) {
    append(exts, detail::encode_extension(extra.oid, extra.critical, extra.value));
  }

  const Bytes alg = algorithm_identifier(issuer_key.scheme());
  Bytes tbs = der::sequence({
      der::explicit_wrap(0, der::integer(2)),
      der::integer(f.serial_number),
      alg,
      f.issuer_dn.der(),
      der::sequence({der::x509_time(f.not_before), der::x509_time(f.not_after)}),
      f.subject_dn.der(),
      f.public_key_info,
      der::explicit_wrap(3, der::tlv(der::kSequence, exts)),
  });
  Bytes signature = issuer_key.sign(tbs);
  return der::sequence({tbs, alg, der::bit_string(signature)});
}

}  // namespace staplegrid
