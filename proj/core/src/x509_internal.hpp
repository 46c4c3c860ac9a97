#pragma once

#include <vector>

#include "staplegrid/der.hpp"

namespace staplegrid::detail {

struct Extension {
  Oid oid;
  bool critical = false;
  BytesView value;  // extnValue contents
};

// AlgorithmIdentifier; parameters are skipped.
Oid read_algorithm(der::Reader& r);

// Extensions ::= SEQUENCE SIZE (1..MAX) OF Extension, given the SEQUENCE element.
std::vector<Extension> read_extensions(const der::Element& seq);

// subjectPublicKey BIT STRING contents of a SubjectPublicKeyInfo TLV.
BytesView spki_key_bits(BytesView spki);

Bytes encode_extension(const Oid& oid, bool critical, BytesView value);

}  // namespace staplegrid::detail
