#pragma once

#include <string>
#include <string_view>

#include "staplegrid/bytes.hpp"

namespace staplegrid {

// X.501 Name with its DER bytes preserved exactly; equality is byte equality.
class DistinguishedName {
 public:
  DistinguishedName() = default;
  // Takes a complete Name TLV (SEQUENCE OF RDN).
  static DistinguishedName from_der(BytesView der);
  // "C=aa, ST=aa, O=aa, CN=rootca". Keys: C ST L O OU CN serialNumber.
  // Values may not contain commas.
  static DistinguishedName from_string(std::string_view text);

  const Bytes& der() const noexcept { return der_; }
  std::string to_string() const;

  friend bool operator==(const DistinguishedName&, const DistinguishedName&) = default;

 private:
  Bytes der_;
};

}  // namespace staplegrid
