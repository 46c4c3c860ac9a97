#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "staplegrid/bytes.hpp"

namespace staplegrid {

inline constexpr std::string_view kPemCertificate = "CERTIFICATE";
inline constexpr std::string_view kPemCrl = "X509 CRL";
inline constexpr std::string_view kPemOcspRequest = "OCSP REQUEST";
inline constexpr std::string_view kPemOcspResponse = "OCSP RESPONSE";

std::string pem_encode(std::string_view label, BytesView der);
// Every block carrying `label`, in order of appearance.
std::vector<Bytes> pem_decode_all(std::string_view text, std::string_view label);
// First block carrying `label`; InvalidArgument when absent.
Bytes pem_decode(std::string_view text, std::string_view label);

bool looks_like_pem(BytesView data);
// Accepts DER as-is, or PEM with the given label.
Bytes der_from_der_or_pem(BytesView data, std::string_view label);

}  // namespace staplegrid
