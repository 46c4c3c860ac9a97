#pragma once

#include <filesystem>
#include <string>

#include "staplegrid/responder.hpp"
#include "staplegrid/test_ca.hpp"
#include "staplegrid/transport.hpp"

namespace staplegrid::testing {

// thisUpdate of the cached response shown in the stapling-cache dump.
inline UtcTime fixture_now() { return make_utc(2024, 6, 19, 10, 0, 43); }

inline const std::string kOcspUrl = "http://127.0.0.1:8080/ocsp";
inline const std::string kCrlUrl = "http://127.0.0.1:1234/downloadcrl/download_crl";

inline DistinguishedName root_dn() { return DistinguishedName::from_string("C=aa, ST=aa, L=aa, O=aa, OU=aa, CN=rootca"); }

struct Pki {
  TestAuthority ca;
  CertMeta leaf;
};

inline Pki make_pki(std::uint64_t seed = 7, UtcTime now = fixture_now()) {
  auto ca = TestAuthority::generate_root(root_dn(), now, seed);
  auto leaf = ca.issue_cert(DistinguishedName::from_string("C=TW, O=meter-vendor, CN=meter-0001"), kOcspUrl, kCrlUrl,
                            365, now);
  return {std::move(ca), std::move(leaf)};
}

// Removes the directory on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

// A CA, its hybrid responder reachable in-process at kOcspUrl, and a movable clock.
struct InProcessUpstream {
  testing::Pki pki = testing::make_pki(17);
  std::shared_ptr<HybridResponder> responder;
  LoopbackTransport loop;
  CountingTransport counting{loop};
  UtcTime clock = fixture_now();

  InProcessUpstream() {
    ResponderConfig cfg;
    cfg.issuer_cert = pki.ca.root();
    cfg.signing_key = std::make_shared<SigningKey>(pki.ca.root_key());
    responder = std::make_shared<HybridResponder>(cfg, nullptr);
    publish_crl();
    loop.route(kOcspUrl, [this](BytesView req) { return responder->handle(req, clock); });
  }

  void publish_crl() { responder->install_crl(pki.ca.emit_crl(clock).raw, clock); }

  CertMeta issue(const std::string& cn, std::optional<std::string> url = kOcspUrl) {
    return pki.ca.issue_cert(DistinguishedName::from_string("CN=" + cn), url, std::nullopt, 365, fixture_now());
  }
  const Bytes& issuer() const { return pki.ca.root().raw_der; }
};

}  // namespace staplegrid::testing
