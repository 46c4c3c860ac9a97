// Acceptance gate: one PASS/FAIL line per criterion. With arguments, runs only
// the listed criterion numbers.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fixtures.hpp"
#include "openssl_oracle.hpp"
#include "staplegrid/bench.hpp"
#include "staplegrid/crl.hpp"
#include "staplegrid/crypto.hpp"
#include "staplegrid/dlms_sim.hpp"
#include "staplegrid/error.hpp"
#include "staplegrid/ocsp.hpp"
#include "staplegrid/responder.hpp"
#include "staplegrid/signed_collection.hpp"
#include "staplegrid/staple_cache.hpp"

using namespace staplegrid;
using testing::fixture_now;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
};

// Collects failures; the first few are kept for the report line.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (++failures_ <= 3) notes_.push_back(what);
  }
  Verdict verdict(std::string summary) const {
    if (failures_ == 0) return {true, std::move(summary)};
    std::string d = summary + "; " + std::to_string(failures_) + " failed check(s):";
    for (const auto& n : notes_) d += " [" + n + "]";
    return {false, d};
  }

 private:
  std::size_t failures_ = 0;
  std::vector<std::string> notes_;
};

using Stopwatch = std::chrono::steady_clock;
double since(Stopwatch::time_point t0) { return std::chrono::duration<double>(Stopwatch::now() - t0).count(); }

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Bytes rand_bytes(std::mt19937_64& rng, std::size_t n) {
  Bytes b(n);
  for (auto& x : b) x = static_cast<std::uint8_t>(rng());
  return b;
}

// ---- 1: throughput ----
Verdict throughput() {
  Check c;
  LocalBenchServer server(1000, 1);
  c.expect(server.responder().index()->by_serial.size() == 1000, "blacklist holds 1,000 serials");
  BenchOptions opts;
  opts.requests = 1000;
  opts.workers = 1;
  auto r = bench_requests(server.target(), opts);
  c.expect(r.requests == 1000, "1,000 cycles completed");
  c.expect(r.failures == 0, "every response verified: " + r.first_error);
  c.expect(!r.aborted, "run not aborted");
  c.expect(r.avg_request_time <= 0.05, "avg_request_time <= 0.05 s");
  c.expect(r.wall_time <= 60, "runtime <= 60 s");
  return c.verdict("n=1000 workers=1 avg_request_time=" + fmt("%.5f", r.avg_request_time) + " s p99=" +
                   fmt("%.5f", r.p99) + " s wall=" + fmt("%.2f", r.wall_time) + " s (reference 0.029 s)");
}

// ---- 2: frame size ----
Verdict frame_size() {
  Check c;
  LocalBenchServer server(10, 2);
  HttpTransport http;
  const CertMeta& cert = server.subjects().back();
  auto a = measure_frame(http, server.ocsp_url(), cert, server.issuer());
  std::this_thread::sleep_for(std::chrono::milliseconds(1100));
  auto b = measure_frame(http, server.ocsp_url(), cert, server.issuer());
  c.expect(a.total_bytes == a.request_bytes + a.response_bytes, "total == request + response");
  c.expect(a.total_bytes >= 500 && a.total_bytes <= 8000, "total in [500, 8000]");
  c.expect(a.request_bytes == b.request_bytes && a.response_bytes == b.response_bytes, "byte-stable across runs");
  return c.verdict("request=" + std::to_string(a.request_bytes) + " response=" + std::to_string(a.response_bytes) +
                   " total=" + std::to_string(a.total_bytes) + " bytes (reference 1,841)");
}

// ---- 3: round trips ----
Verdict round_trips() {
  Check c;
  auto t0 = Stopwatch::now();
  ScenarioOptions opts;
  opts.n_clients = 100;
  auto stapled = run_scenario(opts);
  opts.mode = HandshakeMode::Direct;
  auto direct = run_scenario(opts);
  opts.mode = HandshakeMode::Stapled;
  opts.distinct_certs = 10;
  auto shared = run_scenario(opts);
  double t = since(t0);
  c.expect(stapled.server_ocsp_queries == 0, "STAPLED server_ocsp_queries == 0");
  c.expect(stapled.accepts == 100, "STAPLED all accepted");
  c.expect(direct.server_ocsp_queries == 100, "DIRECT server_ocsp_queries == 100");
  c.expect(direct.accepts == 100, "DIRECT all accepted");
  c.expect(shared.client_ocsp_queries == 10, "shared certs: client fetches == 10");
  c.expect(shared.server_ocsp_queries == 0, "shared certs: server_ocsp_queries == 0");
  c.expect(t < 10, "runtime < 10 s");
  return c.verdict("stapled server=" + std::to_string(stapled.server_ocsp_queries) +
                   " direct server=" + std::to_string(direct.server_ocsp_queries) +
                   " 10-cert client fetches=" + std::to_string(shared.client_ocsp_queries) + " in " + fmt("%.2f", t) +
                   " s");
}

// ---- 4: replay ----
Verdict replay_defense() {
  Check c;
  ReplayOptions opts;
  auto stale = replay_attack_scenario(opts);
  c.expect(stale.verdict() == "REJECT(STALE_RESPONSE)", "past next_update: " + stale.verdict());
  opts.advance = kDay;
  auto inside = replay_attack_scenario(opts);
  c.expect(inside.verdict() == "ACCEPT", "inside window is the known vulnerability: " + inside.verdict());
  // The window is exactly the 7-day validity plus clock skew.
  opts.advance = 7 * kDay + kClockSkew;
  c.expect(replay_attack_scenario(opts).accepted, "last accepted second");
  opts.advance = 7 * kDay + kClockSkew + Seconds{1};
  c.expect(replay_attack_scenario(opts).verdict() == "REJECT(STALE_RESPONSE)", "first rejected second");
  opts.advance = kDay;
  opts.tamper = true;
  auto tampered = replay_attack_scenario(opts);
  c.expect(tampered.verdict() == "REJECT(SIGNATURE_INVALID)", "tampered: " + tampered.verdict());
  return c.verdict("after 8d " + stale.verdict() + ", after 1d " + inside.verdict() +
                   " (window closes at 7d+300s), tampered " + tampered.verdict());
}

// ---- 5: responder vs linear-scan CRL oracle ----
Verdict oracle_equivalence() {
  Check c;
  auto t0 = Stopwatch::now();
  auto pki = testing::make_pki(55);
  const CertMeta& root = pki.ca.root();
  // Issuer hashes from OpenSSL, not from the code under test.
  const Bytes name_der = oracle::issuer_name_der(root.raw_der);
  const Bytes key_bits = oracle::issuer_key_bits(root.raw_der);
  const Bytes name1 = oracle::sha1(name_der), key1 = oracle::sha1(key_bits);
  const Bytes name256 = oracle::sha256(name_der), key256 = oracle::sha256(key_bits);

  ResponderConfig cfg;
  cfg.issuer_cert = root;
  cfg.signing_key = std::make_shared<SigningKey>(pki.ca.root_key());
  HybridResponder responder(cfg, nullptr);

  std::mt19937_64 rng(20240619);
  constexpr int kSets = 1000, kQueries = 10000, kBatch = 1000;
  std::size_t queries = 0, revoked_hits = 0, unknown_hits = 0;
  for (int set = 0; set < kSets && queries == static_cast<std::size_t>(set) * kQueries; ++set) {
    std::size_t size = rng() % 1001;
    std::vector<std::uint64_t> serials;
    std::vector<RevocationReason> reasons;
    std::set<std::uint64_t> seen;
    while (serials.size() < size) {
      std::uint64_t s = rng() >> 1 | 1;
      if (!seen.insert(s).second) continue;
      serials.push_back(s);
      reasons.push_back(static_cast<RevocationReason>(rng() % 7));
    }
    CrlFields f;
    f.issuer_dn = root.subject_dn;
    f.last_update = fixture_now();
    for (std::size_t i = 0; i < serials.size(); ++i)
      f.entries.push_back({SerialNumber::from_u64(serials[i]), fixture_now() - kDay, reasons[i]});
    responder.install_crl(encode_crl(f, pki.ca.root_key()), fixture_now());

    for (int b = 0; b < kQueries / kBatch; ++b) {
      OcspRequest req;
      std::vector<std::uint64_t> asked;
      for (int q = 0; q < kBatch; ++q) {
        std::uint64_t s = !serials.empty() && rng() % 2 ? serials[rng() % serials.size()] : (rng() >> 1 | 1);
        bool sha256 = rng() % 2;
        CertId id{sha256 ? HashAlgorithm::Sha256 : HashAlgorithm::Sha1, sha256 ? name256 : name1,
                  sha256 ? key256 : key1, SerialNumber::from_u64(s)};
        if (rng() % 20 == 0) id.issuer_key_hash = rand_bytes(rng, id.issuer_key_hash.size());
        req.cert_ids.push_back(std::move(id));
        asked.push_back(s);
      }
      auto resp = decode_ocsp_response(responder.handle(encode_ocsp_request(req), fixture_now()));
      if (resp.response_status != ResponseStatus::Successful ||
          resp.single_responses.size() != req.cert_ids.size()) {
        c.expect(false, "batch answered in full");
        continue;
      }
      if (b == 0) {
        try {
          verify_ocsp_signature(resp, std::span(&root, 1), fixture_now());
        } catch (const Error& e) {
          c.expect(false, e.what());
        }
      }
      for (std::size_t q = 0; q < asked.size(); ++q) {
        const auto& sr = resp.single_responses[q];
        const auto& id = req.cert_ids[q];
        if (!(sr.cert_id == id)) c.expect(false, "answers in request order");
        bool ours = id.issuer_key_hash == (id.hash_alg == HashAlgorithm::Sha1 ? key1 : key256);
        auto hit = std::find(serials.begin(), serials.end(), asked[q]);  // the linear scan
        CertStatus::Kind want = !ours                 ? CertStatus::Kind::Unknown
                                : hit != serials.end() ? CertStatus::Kind::Revoked
                                                       : CertStatus::Kind::Good;
        if (sr.status.kind != want)
          c.expect(false, "set " + std::to_string(set) + " serial " + std::to_string(asked[q]) + ": got " +
                              std::string(status_name(sr.status.kind)));
        if (want == CertStatus::Kind::Revoked) {
          ++revoked_hits;
          if (sr.status.reason != reasons[static_cast<std::size_t>(hit - serials.begin())]) c.expect(false, "reason");
        }
        if (want == CertStatus::Kind::Unknown) ++unknown_hits;
        ++queries;
      }
    }
  }
  double t = since(t0);
  c.expect(queries == static_cast<std::size_t>(kSets) * kQueries, "all queries answered");
  c.expect(t < 60, "runtime < 60 s");
  return c.verdict(std::to_string(kSets) + " sets x " + std::to_string(kQueries) + " queries = " +
                   std::to_string(queries) + " (" + std::to_string(revoked_hits) + " revoked, " +
                   std::to_string(unknown_hits) + " foreign) in " + fmt("%.1f", t) + " s");
}

// ---- 6: maintenance rule ----
Verdict maintenance_rule() {
  Check c;
  testing::InProcessUpstream up;
  StapleCache cache("");
  const UtcTime now = fixture_now() + 30 * kDay;
  const std::vector<Seconds> deltas{-kDay, 12 * kHour, 3 * kDay, 6 * kDay + 23 * kHour, 7 * kDay + kHour, 30 * kDay};
  std::vector<std::int64_t> ids;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    up.clock = now + deltas[i] - 7 * kDay;
    auto cert = up.issue("row" + std::to_string(i));
    ids.push_back(cache.lookup_or_fetch(cert.raw_der, up.issuer(), up.clock, up.counting).id);
    c.expect(cache.rows().back().next_update == format_sql_time(now + deltas[i]), "row constructed at delta");
  }
  up.clock = now;
  auto before = cache.rows();
  auto first = cache.maintain(now, up.counting);
  c.expect(first.updated == std::vector<std::int64_t>{ids[0], ids[1], ids[2], ids[3]}, "-1d, 12h, 3d, 6d23h refetched");
  c.expect(first.skipped == std::vector<std::int64_t>{ids[4], ids[5]}, "7d1h and 30d untouched");
  c.expect(first.checked == first.updated.size() + first.skipped.size() + first.failed.size(),
           "checked = updated + skipped + failed");
  auto after = cache.rows();
  c.expect(after[4] == before[4] && after[5] == before[5], "skipped rows byte-identical");
  auto second = cache.maintain(now, up.counting);
  c.expect(second.updated.empty() && second.skipped.size() == 6, "second pass skips renewed rows");
  return c.verdict("first pass updated " + std::to_string(first.updated.size()) + ", skipped " +
                   std::to_string(first.skipped.size()) + "; second pass skipped " +
                   std::to_string(second.skipped.size()));
}

// ---- 7: signed collections ----
Verdict signed_collections() {
  Check c;
  auto t0 = Stopwatch::now();
  auto key = SigningKey::from_seed(to_bytes("acceptance-collection"));
  CountingSigner counting(key);
  std::mt19937_64 rng(7);
  std::vector<bool> statuses(1'000'000);
  for (std::size_t i = 0; i < statuses.size(); ++i) statuses[i] = rng() % 50 == 0;
  auto sc = build_collection("sc-0", statuses, fixture_now(), counting);
  c.expect(counting.count() == 1, "exactly one signing operation");
  c.expect(sc.bit_count == 1'000'000, "bit_count");
  c.expect(verify_collection(sc, key.public_key_der()), "untampered verifies");
  for (int i = 0; i < 1000; ++i) {
    std::uint64_t idx = rng() % statuses.size();
    c.expect((status_at(sc, idx) == BitStatus::Revoked) == statuses[idx], "lookup " + std::to_string(idx));
  }
  // Single-bit tampering of the file: every header and signature bit, and
  // a sample of bitmap bits.
  Bytes file = sc.to_file();
  const std::size_t bitmap_at = 4 + 1 + 4 + sc.name.size() + 8 + 8;
  const std::size_t sig_at = bitmap_at + sc.bitmap.size() + 4;
  std::vector<std::size_t> bits;
  for (std::size_t b = 0; b < bitmap_at * 8; ++b) bits.push_back(b);
  for (std::size_t b = sig_at * 8; b < file.size() * 8; ++b) bits.push_back(b);
  for (int i = 0; i < 512; ++i) bits.push_back(bitmap_at * 8 + rng() % (sc.bitmap.size() * 8));
  std::size_t rejected = 0;
  for (auto bit : bits) {
    Bytes t = file;
    t[bit / 8] ^= static_cast<std::uint8_t>(0x80 >> (bit % 8));
    bool accepted = false;
    try {
      accepted = verify_collection(SignedCollection::from_file(t), key.public_key_der());
    } catch (const Error&) {
    }
    c.expect(!accepted, "bit " + std::to_string(bit) + " tamper accepted");
    rejected += !accepted;
  }
  double t = since(t0);
  c.expect(t < 10, "runtime < 10 s");
  return c.verdict("1,000,000 bits, " + std::to_string(counting.count()) + " signature, 1000 lookups, " +
                   std::to_string(rejected) + "/" + std::to_string(bits.size()) + " single-bit tampers rejected in " +
                   fmt("%.2f", t) + " s");
}

// ---- 8: codec ----
Verdict codec_properties() {
  Check c;
  std::mt19937_64 rng(8);
  auto pki = testing::make_pki(8);
  auto random_id = [&] {
    auto alg = rng() % 2 ? HashAlgorithm::Sha1 : HashAlgorithm::Sha256;
    std::size_t d = digest_size(alg);
    return CertId{alg, rand_bytes(rng, d), rand_bytes(rng, d),
                  SerialNumber::from_magnitude(rand_bytes(rng, 1 + rng() % 20))};
  };
  std::vector<Bytes> samples;
  for (int i = 0; i < 10000; ++i) {
    OcspRequest req;
    for (std::size_t n = 1 + rng() % 4; n > 0; --n) req.cert_ids.push_back(random_id());
    if (rng() % 2) req.nonce = rand_bytes(rng, kMinNonceSize + rng() % (kMaxNonceSize - kMinNonceSize + 1));
    Bytes der = encode_ocsp_request(req);
    c.expect(decode_ocsp_request(der) == req, "request round trip");
    if (i < 10) samples.push_back(der);
  }
  std::vector<Bytes> certs{pki.ca.root().raw_der};
  for (int i = 0; i < 10000; ++i) {
    ResponseData data;
    data.responder_id = rng() % 2 ? ResponderId::by_key(pki.ca.root()) : ResponderId::by_name(pki.ca.root());
    data.produced_at = fixture_now() + Seconds(static_cast<long>(rng() % 10000000));
    for (std::size_t n = 1 + rng() % 3; n > 0; --n) {
      SingleResponse sr;
      sr.cert_id = random_id();
      switch (rng() % 3) {
        case 0: sr.status = CertStatus::good(); break;
        case 1: sr.status = CertStatus::unknown(); break;
        default: sr.status = CertStatus::revoked(data.produced_at - kDay, static_cast<RevocationReason>(rng() % 7));
      }
      sr.this_update = data.produced_at;
      if (rng() % 4) sr.next_update = data.produced_at + Seconds(1 + static_cast<long>(rng() % 1000000));
      data.responses.push_back(sr);
    }
    if (rng() % 2) data.nonce = rand_bytes(rng, kMinNonceSize + rng() % (kMaxNonceSize - kMinNonceSize + 1));
    Bytes der = encode_ocsp_response(data, pki.ca.root_key(), certs);
    auto back = decode_ocsp_response(der);
    c.expect(back.data() == data && back.signer_certs == certs, "response round trip");
    if (i < 10) samples.push_back(der);
  }

  auto fx = oracle::build_reference_rsa_crl();
  auto crl = parse_crl(fx.crl_der, CrlEncoding::Der);
  std::vector<std::string> serials;
  for (const auto& e : crl.entries) {
    serials.push_back(e.serial_number.to_hex());
    c.expect(e.reason == RevocationReason::KeyCompromise, "reason KEY_COMPROMISE");
  }
  std::sort(serials.begin(), serials.end());
  c.expect(serials == std::vector<std::string>{"221A0A99711F9968", "308C707EA89F47A5", "5238F3475665F7C4"},
           "fixture serials");
  c.expect(verify_crl_signature(crl, parse_certificate(fx.issuer_cert_der)), "fixture signature");
  samples.push_back(fx.crl_der);

  // Every strict prefix must fail cleanly.
  std::size_t prefixes = 0;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    for (std::size_t n = 0; n < samples[s].size(); ++n, ++prefixes) {
      BytesView cut(samples[s].data(), n);
      bool threw = false;
      try {
        if (s < 10) decode_ocsp_request(cut);
        else if (s < 20) decode_ocsp_response(cut);
        else parse_crl(cut, CrlEncoding::Der);
      } catch (const Error&) {
        threw = true;
      }
      c.expect(threw, "prefix of length " + std::to_string(n) + " accepted");
    }
  }
  return c.verdict("10,000 requests + 10,000 responses round-trip; " + std::to_string(prefixes) +
                   " truncated prefixes rejected; CRL fixture serials " + serials[0] + ", " + serials[1] + ", " +
                   serials[2] + " KEY_COMPROMISE");
}

// ---- 9: cache integrity ----
Verdict cache_integrity() {
  Check c;
  testing::InProcessUpstream up;

  // Dedup, including a deliberate race on the first lookup.
  std::size_t max_hits = 0;
  for (int round = 0; round < 5; ++round) {
    StapleCache cache("");
    LoopbackTransport slow;
    slow.route(testing::kOcspUrl, [&](BytesView req) {
      std::this_thread::sleep_for(std::chrono::milliseconds(30));
      return up.responder->handle(req, fixture_now());
    });
    CountingTransport counted(slow);
    std::thread t1([&] { cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), counted); });
    std::thread t2([&] { cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), counted); });
    t1.join();
    t2.join();
    cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), counted);
    c.expect(cache.size() == 1, "one row after concurrent fetches");
    max_hits = std::max<std::size_t>(max_hits, counted.count());
  }
  c.expect(max_hits <= 2, "<= 2 upstream hits");

  testing::TempDir dir;
  auto path = dir.path() / "cache.sgoc";
  std::vector<CacheEntry> written;
  {
    StapleCache cache(path);
    for (int i = 0; i < 100; ++i) {
      auto cert = up.issue("meter-" + std::to_string(i));
      if (i % 10 == 3) up.pki.ca.revoke(cert.serial_number, RevocationReason::KeyCompromise, fixture_now());
      if (i % 10 == 3) up.publish_crl();
      written.push_back(cache.lookup_or_fetch(cert.raw_der, up.issuer(), fixture_now(), up.counting));
    }
  }

  // Columns agree with the blobs they summarize.
  std::size_t revoked_rows = 0;
  for (const auto& row : written) {
    auto cert = parse_certificate(row.certificate);
    auto issuer = parse_certificate(row.issuer_certificate);
    auto resp = decode_ocsp_response(row.ocsp_response);
    const auto* sr = resp.find(compute_cert_id(cert, issuer));
    c.expect(cert.serial_number.to_decimal() == row.serial_number, "serial column");
    c.expect(cert.aia_ocsp_url == row.ocsp_url, "ocsp_url column");
    c.expect(sr && status_name(sr->status.kind) == row.cert_status, "cert_status column");
    c.expect(sr && sr->next_update && format_sql_time(*sr->next_update) == row.next_update, "next_update column");
    revoked_rows += row.cert_status == "REVOKED";
  }
  c.expect(revoked_rows == 10, "revoked rows recorded as REVOKED");

  // Corrupt one record and recover warm.
  Bytes raw;
  {
    std::ifstream in(path, std::ios::binary);
    raw.assign(std::istreambuf_iterator<char>(in), {});
  }
  const std::string marker = "ROW1";
  std::vector<std::size_t> starts;
  for (auto it = raw.begin(); (it = std::search(it, raw.end(), marker.begin(), marker.end())) != raw.end(); ++it)
    starts.push_back(static_cast<std::size_t>(it - raw.begin()));
  c.expect(starts.size() == 100, "100 records on disk");
  if (starts.size() == 100) raw[(starts[57] + starts[58]) / 2] ^= 0x5A;
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  }
  auto recovered = StapleCache::recover(path);
  auto expect_rows = written;
  expect_rows.erase(expect_rows.begin() + 57);
  c.expect(recovered->size() == 99, "99 rows survive");
  c.expect(recovered->quarantined() == 1, "one record quarantined");
  c.expect(recovered->rows() == expect_rows, "survivors byte-identical");
  c.expect(std::filesystem::exists(path.string() + ".quarantine"), "quarantine file written");
  return c.verdict("max " + std::to_string(max_hits) + " upstream hits under race; 100 rows columns agree; warm recovery " +
                   std::to_string(recovered->size()) + " rows, " + std::to_string(recovered->quarantined()) +
                   " quarantined");
}

struct Criterion {
  int id;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> all{
      {1, "throughput", throughput},
      {2, "frame-size", frame_size},
      {3, "round-trip-reduction", round_trips},
      {4, "replay-defense", replay_defense},
      {5, "responder-oracle-equivalence", oracle_equivalence},
      {6, "maintenance-rule", maintenance_rule},
      {7, "signed-collections", signed_collections},
      {8, "codec-properties", codec_properties},
      {9, "cache-integrity", cache_integrity},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& cr : all) {
    if (!wanted.empty() && !wanted.count(cr.id)) continue;
    auto t0 = Stopwatch::now();
    Verdict v;
    try {
      v = cr.run();
    } catch (const std::exception& e) {
      v = {false, std::string("threw: ") + e.what()};
    }
    failed += !v.pass;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  AC" << cr.id << ' ' << cr.name << " (" << fmt("%.2f", since(t0))
              << " s): " << v.detail << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
