#include <gtest/gtest.h>

#include <fstream>
#include <regex>
#include <sstream>
#include <thread>

#include "fixtures.hpp"
#include "openssl_oracle.hpp"
#include "staplegrid/error.hpp"
#include "staplegrid/responder.hpp"
#include "staplegrid/staple_cache.hpp"

namespace staplegrid {
namespace {

using testing::fixture_now;
using testing::kOcspUrl;

Errc code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::Io;
}

using Upstream = testing::InProcessUpstream;

TEST(StapleCacheTest, SecondLookupIsServedFromCache) {
  Upstream up;
  StapleCache cache("");
  auto first = cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), up.counting);
  EXPECT_EQ(up.counting.count(), 1u);
  EXPECT_EQ(first.id, 1);
  EXPECT_EQ(first.serial_number, up.pki.leaf.serial_number.to_decimal());
  EXPECT_EQ(first.cert_status, "GOOD");
  EXPECT_EQ(first.ocsp_url, kOcspUrl);
  EXPECT_EQ(first.next_update, "2024-06-26 10:00:43");
  auto second = cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now() + kHour, up.counting);
  EXPECT_EQ(up.counting.count(), 1u);
  EXPECT_EQ(second, first);
  EXPECT_EQ(cache.size(), 1u);
}

TEST(StapleCacheTest, MissingAiaUrl) {
  Upstream up;
  StapleCache cache("");
  auto bare = up.issue("no-aia", std::nullopt);
  EXPECT_EQ(code_of([&] { cache.lookup_or_fetch(bare.raw_der, up.issuer(), fixture_now(), up.counting); }),
            Errc::NoOcspUrl);
  EXPECT_EQ(cache.size(), 0u);
  EXPECT_EQ(up.counting.count(), 0u);
}

TEST(StapleCacheTest, RevokedStatusIsPersistedAndMatchesBlob) {
  Upstream up;
  auto cert = up.issue("revoked");
  up.pki.ca.revoke(cert.serial_number, RevocationReason::KeyCompromise, fixture_now() - kHour);
  up.publish_crl();
  StapleCache cache("");
  auto row = cache.lookup_or_fetch(cert.raw_der, up.issuer(), fixture_now(), up.counting);
  EXPECT_EQ(row.cert_status, "REVOKED");
  auto resp = decode_ocsp_response(row.ocsp_response);
  EXPECT_EQ(resp.single_responses.at(0).status.kind, CertStatus::Kind::Revoked);
  EXPECT_EQ(format_sql_time(*resp.single_responses.at(0).next_update), row.next_update);
}

TEST(StapleCacheTest, UnverifiedResponsesNeverEnterTheCache) {
  Upstream up;
  StapleCache cache("");
  LoopbackTransport evil;
  evil.route(kOcspUrl, [&](BytesView req) {
    auto resp = decode_ocsp_response(up.responder->handle(req, fixture_now()));
    Bytes der = resp.raw_der;
    const Bytes& tbs = resp.tbs_response_data;
    auto at = std::search(der.begin(), der.end(), tbs.begin(), tbs.end());
    *(at + static_cast<long>(tbs.size()) - 3) ^= 0x01;  // last bytes of the signed data
    return der;
  });
  Errc c = code_of([&] { cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), evil); });
  EXPECT_TRUE(c == Errc::SignatureInvalid || c == Errc::UpstreamError) << errc_name(c);
  EXPECT_EQ(cache.size(), 0u);

  auto other = TestAuthority::generate_root(testing::root_dn(), fixture_now(), 555);
  LoopbackTransport impostor;
  impostor.route(kOcspUrl, [&](BytesView req) {
    auto q = decode_ocsp_request(req);
    return other.sign_ocsp_response(q.cert_ids.at(0), CertStatus::good(), fixture_now(), fixture_now() + kDay).raw_der;
  });
  EXPECT_EQ(code_of([&] { cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), impostor); }),
            Errc::UntrustedSigner);
  EXPECT_EQ(cache.size(), 0u);
}

TEST(StapleCacheTest, SignatureFlipIsSignatureInvalid) {
  Upstream up;
  StapleCache cache("");
  LoopbackTransport evil;
  evil.route(kOcspUrl, [&](BytesView req) {
    auto resp = decode_ocsp_response(up.responder->handle(req, fixture_now()));
    Bytes der = resp.raw_der;
    auto at = std::search(der.begin(), der.end(), resp.signature.begin(), resp.signature.end());
    *(at + 20) ^= 0x04;
    return der;
  });
  EXPECT_EQ(code_of([&] { cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), evil); }),
            Errc::SignatureInvalid);
  EXPECT_EQ(cache.size(), 0u);
}

TEST(StapleCacheTest, UpstreamFailures) {
  Upstream up;
  StapleCache cache("");
  LoopbackTransport nowhere;
  EXPECT_EQ(code_of([&] { cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), nowhere); }),
            Errc::UpstreamUnreachable);
  LoopbackTransport busy;
  busy.route(kOcspUrl, [](BytesView) { return encode_ocsp_error(ResponseStatus::TryLater); });
  try {
    cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), busy);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::UpstreamError);
    EXPECT_EQ(e.detail(), response_status_name(ResponseStatus::TryLater));
  }
  EXPECT_EQ(cache.size(), 0u);
}

TEST(StapleCacheTest, GetStapleReturnsFetchedBytes) {
  Upstream up;
  StapleCache cache("");
  Bytes seen;
  LoopbackTransport spy;
  spy.route(kOcspUrl, [&](BytesView req) {
    seen = up.responder->handle(req, fixture_now());
    return seen;
  });
  cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), spy);
  auto staple = cache.get_staple(up.pki.leaf.serial_number, fixture_now());
  EXPECT_EQ(staple.response, seen);
  EXPECT_FALSE(staple.stale);
  auto resp = decode_ocsp_response(staple.response);
  EXPECT_NO_THROW(verify_ocsp_signature(resp, std::span(&up.pki.ca.root(), 1), fixture_now()));
  EXPECT_TRUE(oracle::ocsp_verifies(staple.response, up.issuer()));
  EXPECT_TRUE(cache.get_staple(up.pki.leaf.serial_number, fixture_now() + 8 * kDay).stale);
  EXPECT_EQ(code_of([&] { cache.get_staple(SerialNumber::from_u64(42), fixture_now()); }), Errc::NotCached);
}

TEST(MaintenanceTest, SevenDayRuleAsPredicate) {
  auto now = fixture_now();
  EXPECT_TRUE(needs_update(now - kDay, now));
  EXPECT_TRUE(needs_update(now + 12 * kHour, now));
  EXPECT_TRUE(needs_update(now + 6 * kDay + 23 * kHour, now));
  EXPECT_TRUE(needs_update(now + 7 * kDay - Seconds(1), now));
  EXPECT_FALSE(needs_update(now + 7 * kDay, now));
  EXPECT_FALSE(needs_update(now + 30 * kDay, now));
  EXPECT_TRUE(needs_update(std::nullopt, now));
}

TEST(MaintenanceTest, PartitionsRowsAndRenewedRowsAreSkipped) {
  Upstream up;
  StapleCache cache("");
  const UtcTime now = fixture_now() + 30 * kDay;
  const std::vector<Seconds> deltas{-kDay, 12 * kHour, 3 * kDay, 6 * kDay + 23 * kHour, 7 * kDay + kHour, 30 * kDay};
  std::vector<std::int64_t> ids;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    // Responses live 7 days, so fetching at now + delta - 7d lands next_update at now + delta.
    up.clock = now + deltas[i] - 7 * kDay;
    auto cert = up.issue("row" + std::to_string(i));
    ids.push_back(cache.lookup_or_fetch(cert.raw_der, up.issuer(), up.clock, up.counting).id);
    EXPECT_EQ(cache.rows().back().next_update, format_sql_time(now + deltas[i]));
  }
  up.clock = now;
  std::ostringstream log;
  auto report = cache.maintain(now, up.counting, &log);
  EXPECT_EQ(report.checked, 6u);
  EXPECT_EQ(report.updated, (std::vector<std::int64_t>{ids[0], ids[1], ids[2], ids[3]}));
  EXPECT_EQ(report.skipped, (std::vector<std::int64_t>{ids[4], ids[5]}));
  EXPECT_TRUE(report.failed.empty());
  EXPECT_NE(log.str().find("ID: 1 need update\nID: 1 update completed\n"), std::string::npos);
  EXPECT_NE(log.str().find("ID: 5 don't need update\n"), std::string::npos);
  for (auto id : report.updated) {
    auto row = cache.rows().at(static_cast<std::size_t>(id - 1));
    EXPECT_EQ(row.next_update, format_sql_time(now + 7 * kDay));
  }

  auto again = cache.maintain(now, up.counting);
  EXPECT_EQ(again.checked, 6u);
  EXPECT_TRUE(again.updated.empty());
  EXPECT_EQ(again.skipped.size(), 6u);
}

TEST(MaintenanceTest, FailedRefetchKeepsOldRow) {
  Upstream up;
  StapleCache cache("");
  auto row = cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), up.counting);
  up.loop.unroute(kOcspUrl);
  auto report = cache.maintain(fixture_now() + 2 * kDay, up.counting);
  ASSERT_EQ(report.failed.size(), 1u);
  EXPECT_EQ(report.failed[0].first, row.id);
  EXPECT_EQ(report.checked, report.updated.size() + report.skipped.size() + report.failed.size());
  EXPECT_EQ(cache.rows().at(0), row);
}

TEST(MaintenanceTest, SchedulerRunsImmediatelyThenStops) {
  Upstream up;
  StapleCache cache("");
  cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), up.counting);
  MaintenanceScheduler sched(cache, up.counting, kDay, [] { return fixture_now() + 3 * kDay; });
  sched.start();
  for (int i = 0; i < 200 && sched.runs() == 0; ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));
  sched.stop();
  EXPECT_EQ(sched.runs(), 1u);
  ASSERT_TRUE(sched.last_report());
  EXPECT_EQ(sched.last_report()->updated.size(), 1u);
}

TEST(StoreTest, FreshPathAndWarmReopen) {
  testing::TempDir dir;
  auto path = dir.path() / "cache.sgoc";
  Upstream up;
  std::vector<CacheEntry> written;
  {
    StapleCache cache(path);
    EXPECT_EQ(cache.size(), 0u);
    for (int i = 0; i < 100; ++i) {
      auto cert = up.issue("meter-" + std::to_string(i));
      written.push_back(cache.lookup_or_fetch(cert.raw_der, up.issuer(), fixture_now(), up.counting));
    }
  }
  auto cache = StapleCache::recover(path);
  EXPECT_EQ(cache->rows(), written);
  EXPECT_EQ(cache->quarantined(), 0u);
  EXPECT_FALSE(std::filesystem::exists(path.string() + ".quarantine"));
}

TEST(StoreTest, CorruptRecordIsQuarantined) {
  testing::TempDir dir;
  auto path = dir.path() / "cache.sgoc";
  Upstream up;
  std::vector<CacheEntry> written;
  {
    StapleCache cache(path);
    for (int i = 0; i < 100; ++i) {
      auto cert = up.issue("meter-" + std::to_string(i));
      written.push_back(cache.lookup_or_fetch(cert.raw_der, up.issuer(), fixture_now(), up.counting));
    }
  }
  // Flip one byte in the middle of the 43rd record.
  Bytes raw;
  {
    std::ifstream in(path, std::ios::binary);
    raw.assign(std::istreambuf_iterator<char>(in), {});
  }
  const std::string marker = "ROW1";
  std::vector<std::size_t> starts;
  for (auto it = raw.begin(); (it = std::search(it, raw.end(), marker.begin(), marker.end())) != raw.end(); ++it)
    starts.push_back(static_cast<std::size_t>(it - raw.begin()));
  ASSERT_EQ(starts.size(), 100u);
  raw[(starts[42] + starts[43]) / 2] ^= 0xFF;
  {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  }

  {
    StapleCache cache(path);
    EXPECT_EQ(cache.size(), 99u);
    EXPECT_EQ(cache.quarantined(), 1u);
    EXPECT_FALSE(cache.find(SerialNumber::from_decimal(written[42].serial_number)));
    EXPECT_TRUE(std::filesystem::exists(path.string() + ".quarantine"));
  }
  StapleCache reopened(path);
  EXPECT_EQ(reopened.size(), 99u);
  EXPECT_EQ(reopened.quarantined(), 0u);
  // Row ids keep increasing past the survivors.
  auto fresh = reopened.lookup_or_fetch(up.issue("late").raw_der, up.issuer(), fixture_now(), up.counting);
  EXPECT_EQ(fresh.id, 101);
}

TEST(StoreTest, UnreadableHeaderIsStoreCorrupt) {
  testing::TempDir dir;
  auto path = dir.path() / "cache.sgoc";
  {
    std::ofstream out(path, std::ios::binary);
    out << "SQLite format 3";
  }
  EXPECT_EQ(code_of([&] { StapleCache c(path); }), Errc::StoreCorrupt);
}

TEST(StoreTest, MaintenanceOverwritesSurviveReopen) {
  testing::TempDir dir;
  auto path = dir.path() / "cache.sgoc";
  Upstream up;
  {
    StapleCache cache(path);
    cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), up.counting);
    up.clock = fixture_now() + 3 * kDay;
    cache.maintain(up.clock, up.counting);
  }
  StapleCache cache(path);
  ASSERT_EQ(cache.size(), 1u);
  EXPECT_EQ(cache.rows()[0].next_update, format_sql_time(fixture_now() + 10 * kDay));
}

TEST(StapleCacheTest, ConcurrentFirstLookupsMakeOneRow) {
  Upstream up;
  for (int round = 0; round < 5; ++round) {
    StapleCache cache("");
    LoopbackTransport slow;
    slow.route(kOcspUrl, [&](BytesView req) {
      std::this_thread::sleep_for(std::chrono::milliseconds(30));
      return up.responder->handle(req, fixture_now());
    });
    CountingTransport counted(slow);
    CacheEntry a, b;
    std::thread t1([&] { a = cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), counted); });
    std::thread t2([&] { b = cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), counted); });
    t1.join();
    t2.join();
    EXPECT_EQ(cache.size(), 1u);
    EXPECT_LE(counted.count(), 2u);
    EXPECT_EQ(a, b);
  }
}

TEST(ExportTest, EmptyTableIsHeaderOnly) {
  StapleCache cache("");
  EXPECT_EQ(cache.export_table(), "ocsp_responses: 0 rows\n");
}

TEST(ExportTest, RowsShowEveryColumn) {
  Upstream up;
  StapleCache cache("");
  cache.lookup_or_fetch(up.pki.leaf.raw_der, up.issuer(), fixture_now(), up.counting);
  cache.lookup_or_fetch(up.issue("second").raw_der, up.issuer(), fixture_now(), up.counting);
  std::string dump = cache.export_table();
  EXPECT_EQ(dump.rfind("ocsp_responses: 2 rows\n", 0), 0u);
  std::regex next_update(R"(\nnext_update: \d{4}-\d{2}-\d{2} \d{2}:\d{2}:\d{2}\n)");
  EXPECT_EQ(std::distance(std::sregex_iterator(dump.begin(), dump.end(), next_update), std::sregex_iterator()), 2);
  EXPECT_NE(dump.find("\ncert_status: GOOD\n"), std::string::npos);
  for (const char* col : {"ID: ", "serial_number: ", "ocsp_url: ", "ocsp_response: b", "certificate: b",
                          "issuer_certificate: b"}) {
    std::size_t count = 0;
    for (auto p = dump.find(std::string("\n") + col); p != std::string::npos; p = dump.find(std::string("\n") + col, p + 1))
      ++count;
    EXPECT_EQ(count, 2u) << col;
  }
}

TEST(ExportTest, PythonBytesRepr) {
  Bytes fragment = from_hex("0201030A0100A08201CC308201C806092B");
  EXPECT_EQ(python_bytes_repr(fragment), R"(b'\x02\x01\x03\n\x01\x00\xa0\x82\x01\xcc0\x82\x01\xc8\x06\t+')");
  EXPECT_EQ(python_bytes_repr(to_bytes("it's")), R"(b"it's")");
  EXPECT_EQ(python_bytes_repr(to_bytes("'\"")), R"(b'\'"')");
  EXPECT_EQ(python_bytes_repr(to_bytes("a\\b\r\x7f")), R"(b'a\\b\r\x7f')");
  EXPECT_EQ(python_bytes_repr({}), "b''");
}

}  // namespace
}  // namespace staplegrid
