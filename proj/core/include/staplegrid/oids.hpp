#pragma once

#include "staplegrid/der.hpp"

namespace staplegrid::oids {

inline const Oid kSha1{"1.3.14.3.2.26"};
inline const Oid kSha256{"2.16.840.1.101.3.4.2.1"};

inline const Oid kEcPublicKey{"1.2.840.10045.2.1"};
inline const Oid kPrime256v1{"1.2.840.10045.3.1.7"};
inline const Oid kRsaEncryption{"1.2.840.113549.1.1.1"};

inline const Oid kEcdsaWithSha256{"1.2.840.10045.4.3.2"};
inline const Oid kEcdsaWithSha384{"1.2.840.10045.4.3.3"};
inline const Oid kSha256WithRsa{"1.2.840.113549.1.1.11"};
inline const Oid kSha1WithRsa{"1.2.840.113549.1.1.5"};

inline const Oid kCommonName{"2.5.4.3"};
inline const Oid kSerialNumberAttr{"2.5.4.5"};
inline const Oid kCountry{"2.5.4.6"};
inline const Oid kLocality{"2.5.4.7"};
inline const Oid kState{"2.5.4.8"};
inline const Oid kOrganization{"2.5.4.10"};
inline const Oid kOrganizationalUnit{"2.5.4.11"};

inline const Oid kSubjectKeyIdentifier{"2.5.29.14"};
inline const Oid kKeyUsage{"2.5.29.15"};
inline const Oid kBasicConstraints{"2.5.29.19"};
inline const Oid kCrlNumber{"2.5.29.20"};
inline const Oid kCrlReason{"2.5.29.21"};
inline const Oid kCrlDistributionPoints{"2.5.29.31"};
inline const Oid kAuthorityKeyIdentifier{"2.5.29.35"};
inline const Oid kExtKeyUsage{"2.5.29.37"};
inline const Oid kAuthorityInfoAccess{"1.3.6.1.5.5.7.1.1"};

inline const Oid kAdOcsp{"1.3.6.1.5.5.7.48.1"};
inline const Oid kOcspBasic{"1.3.6.1.5.5.7.48.1.1"};
inline const Oid kOcspNonce{"1.3.6.1.5.5.7.48.1.2"};
inline const Oid kKpOcspSigning{"1.3.6.1.5.5.7.3.9"};
inline const Oid kKpClientAuth{"1.3.6.1.5.5.7.3.2"};

}  // namespace staplegrid::oids
