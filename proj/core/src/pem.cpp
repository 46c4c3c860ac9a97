#include "staplegrid/pem.hpp"

#include "staplegrid/error.hpp"

namespace staplegrid {

std::string pem_encode(std::string_view label, BytesView der) {
  std::string body = base64_encode(der);
  std::string out = "-----BEGIN " + std::string(label) + "-----\n";
  for (std::size_t i = 0; i < body.size(); i += 64) {
    out.append(body, i, 64);
    out.push_back('\n');
  }
  out += "-----END " + std::string(label) + "-----\n";
  return out;
}

std::vector<Bytes> pem_decode_all(std::string_view text, std::string_view label) {
  const std::string begin = "-----BEGIN " + std::string(label) + "-----";
  const std::string end = "-----END " + std::string(label) + "-----";
  std::vector<Bytes> out;
  std::size_t pos = 0;
  while ((pos = text.find(begin, pos)) != std::string_view::npos) {
    std::size_t body_start = pos + begin.size();
    std::size_t stop = text.find(end, body_start);
    if (stop == std::string_view::npos) fail(Errc::InvalidArgument, "unterminated PEM block");
    out.push_back(base64_decode(text.substr(body_start, stop - body_start)));
    pos = stop + end.size();
  }
  return out;
}

Bytes pem_decode(std::string_view text, std::string_view label) {
  auto blocks = pem_decode_all(text, label);
  if (blocks.empty()) fail(Errc::InvalidArgument, "no PEM block labelled " + std::string(label));
  return std::move(blocks.front());
}

bool looks_like_pem(BytesView data) {
  static constexpr std::string_view marker = "-----BEGIN ";
  std::string_view text(reinterpret_cast<const char*>(data.data()), data.size());
  return text.find(marker) != std::string_view::npos;
}

Bytes der_from_der_or_pem(BytesView data, std::string_view label) {
  if (!looks_like_pem(data)) return Bytes(data.begin(), data.end());
  return pem_decode(std::string_view(reinterpret_cast<const char*>(data.data()), data.size()), label);
}

}  // namespace staplegrid
