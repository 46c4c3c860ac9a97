#include "staplegrid/name.hpp"

#include <array>

#include "staplegrid/der.hpp"
#include "staplegrid/error.hpp"
#include "staplegrid/oids.hpp"

namespace staplegrid {

namespace {

struct AttributeLabel {
  const char* label;
  const Oid* oid;
  bool printable;
};

const std::array<AttributeLabel, 7>& labels() {
  static const std::array<AttributeLabel, 7> table{{
      {"C", &oids::kCountry, true},
      {"ST", &oids::kState, false},
      {"L", &oids::kLocality, false},
      {"O", &oids::kOrganization, false},
      {"OU", &oids::kOrganizationalUnit, false},
      {"CN", &oids::kCommonName, false},
      {"serialNumber", &oids::kSerialNumberAttr, true},
  }};
  return table;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
  return s;
}

}  // namespace

DistinguishedName DistinguishedName::from_der(BytesView der) {
  auto name = der::parse_single(der, der::kSequence);
  der::Reader rdns(name.content);
  while (!rdns.empty()) {
    der::Reader rdn = rdns.enter(der::kSet);
    if (rdn.empty()) fail(Errc::MalformedDer, "empty RDN");
    while (!rdn.empty()) {
      der::Reader atv = rdn.enter(der::kSequence);
      atv.read(der::kOid);
      atv.read();
      atv.expect_end();
    }
  }
  DistinguishedName dn;
  dn.der_.assign(der.begin(), der.end());
  return dn;
}

DistinguishedName DistinguishedName::from_string(std::string_view text) {
  Bytes rdns;
  while (!text.empty()) {
    auto comma = text.find(',');
    std::string_view part = trim(text.substr(0, comma));
    text = comma == std::string_view::npos ? std::string_view{} : text.substr(comma + 1);
    if (part.empty()) continue;
    auto eq = part.find('=');
    if (eq == std::string_view::npos) fail(Errc::InvalidArgument, "expected key=value in DN");
    auto key = trim(part.substr(0, eq));
    auto value = trim(part.substr(eq + 1));
    const AttributeLabel* found = nullptr;
    for (const auto& l : labels()) {
      if (key == l.label) found = &l;
    }
    if (!found) fail(Errc::InvalidArgument, "unsupported DN attribute: " + std::string(key));
    Bytes encoded_value = found->printable ? der::printable_string(value) : der::utf8_string(value);
    append(rdns, der::set({der::sequence({der::oid(*found->oid), encoded_value})}));
  }
  DistinguishedName dn;
  dn.der_ = der::tlv(der::kSequence, rdns);
  return dn;
}

std::string DistinguishedName::to_string() const {
  if (der_.empty()) return {};
  std::string out;
  der::Reader rdns(der::parse_single(der_, der::kSequence).content);
  while (!rdns.empty()) {
    der::Reader rdn = rdns.enter(der::kSet);
    while (!rdn.empty()) {
      der::Reader atv = rdn.enter(der::kSequence);
      Oid type = der::decode_oid(atv.read(der::kOid));
      std::string value = der::decode_string(atv.read());
      std::string label = type.to_string();
      for (const auto& l : labels()) {
        if (*l.oid == type) label = l.label;
      }
      if (!out.empty()) out += ", ";
      out += label + "=" + value;
    }
  }
  return out;
}

}  // namespace staplegrid
