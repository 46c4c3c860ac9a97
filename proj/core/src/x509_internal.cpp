#include "x509_internal.hpp"

#include "staplegrid/error.hpp"

namespace staplegrid::detail {

Oid read_algorithm(der::Reader& r) {
  der::Reader alg = r.enter(der::kSequence);
  Oid oid = der::decode_oid(alg.read(der::kOid));
  if (!alg.empty()) alg.read();
  alg.expect_end();
  return oid;
}

std::vector<Extension> read_extensions(const der::Element& seq) {
  if (seq.tag != der::kSequence) fail(Errc::MalformedDer, "extensions must be a SEQUENCE");
  std::vector<Extension> out;
  der::Reader list(seq.content);
  while (!list.empty()) {
    der::Reader ext = list.enter(der::kSequence);
    Extension e;
    e.oid = der::decode_oid(ext.read(der::kOid));
    if (auto crit = ext.read_optional(der::kBoolean)) e.critical = der::decode_boolean(*crit);
    e.value = ext.read(der::kOctetString).content;
    ext.expect_end();
    for (const auto& prior : out) {
      if (prior.oid == e.oid) fail(Errc::MalformedDer, "duplicate extension " + e.oid.to_string());
    }
    out.push_back(e);
  }
  return out;
}

BytesView spki_key_bits(BytesView spki) {
  der::Reader r(der::parse_single(spki, der::kSequence).content);
  read_algorithm(r);
  BytesView bits = der::decode_bit_string(r.read(der::kBitString));
  r.expect_end();
  return bits;
}

Bytes encode_extension(const Oid& oid, bool critical, BytesView value) {
  if (critical) return der::sequence({der::oid(oid), der::boolean(true), der::octet_string(value)});
  return der::sequence({der::oid(oid), der::octet_string(value)});
}

}  // namespace staplegrid::detail
