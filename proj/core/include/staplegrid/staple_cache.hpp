#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <shared_mutex>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>
#include <vector>

#include "staplegrid/certificate.hpp"
#include "staplegrid/ocsp.hpp"
#include "staplegrid/transport.hpp"

namespace staplegrid {

// One row of the ocsp_responses table.
struct CacheEntry {
  std::int64_t id = 0;
  std::string serial_number;  // decimal
  std::string cert_status;    // GOOD | REVOKED | UNKNOWN
  std::string ocsp_url;
  std::string next_update;  // "YYYY-MM-DD HH:MM:SS" UTC; empty when the response carried none
  Bytes ocsp_response;      // DER, byte-identical to what the upstream sent
  Bytes certificate;        // DER
  Bytes issuer_certificate;  // DER

  friend bool operator==(const CacheEntry&, const CacheEntry&) = default;
};

struct Staple {
  Bytes response;
  CacheEntry entry;
  bool stale = false;  // now is past next_update (or there is none)
};

struct MaintenanceReport {
  std::size_t checked = 0;
  std::vector<std::int64_t> updated;
  std::vector<std::int64_t> skipped;
  std::vector<std::pair<std::int64_t, std::string>> failed;
};

// Rows whose next_update is less than this far ahead get refetched.
inline constexpr Seconds kRefreshHorizon = 7 * kDay;
bool needs_update(std::optional<UtcTime> next_update, UtcTime now);

// Python-style bytes literal, e.g. b'\x02\x01\x03\n'.
std::string python_bytes_repr(BytesView data);

// Staple cache backed by a single append-only file:
//   header  "SGOC" u8 version, 3 zero bytes
//   record  "ROW1" u32 length, u32 crc32(payload), payload
// Later records for the same id supersede earlier ones. On open, records that
// fail framing, checksum, decoding or column/blob agreement are copied to
// "<path>.quarantine" and skipped, and the file is compacted.
class StapleCache {
 public:
  // Empty path: rows live in memory only. Responses are verified against
  // `anchors`; with none configured, the certificate's issuer is the anchor.
  // StoreCorrupt only when the header is unreadable.
  explicit StapleCache(std::filesystem::path store_path, std::vector<CertMeta> anchors = {});
  ~StapleCache();
  StapleCache(const StapleCache&) = delete;
  StapleCache& operator=(const StapleCache&) = delete;

  static std::unique_ptr<StapleCache> recover(const std::filesystem::path& store_path,
                                              std::vector<CertMeta> anchors = {});

  // Returns the cached row for the certificate's serial without touching the
  // network; otherwise fetches from the certificate's AIA URL, verifies, and
  // persists. Errors: NoOcspUrl, UpstreamUnreachable, UpstreamError,
  // SignatureInvalid / UntrustedSigner / SignerCertExpired, CertIdMismatch.
  CacheEntry lookup_or_fetch(BytesView cert_der, BytesView issuer_der, UtcTime now, OcspTransport& upstream);

  // NotCached if the serial has no row.
  Staple get_staple(const SerialNumber& serial, UtcTime now) const;
  std::optional<CacheEntry> find(const SerialNumber& serial) const;

  // Refetches every row with needs_update(); writes one line per row to `log`.
  MaintenanceReport maintain(UtcTime now, OcspTransport& upstream, std::ostream* log = nullptr);

  std::string export_table() const;

  std::vector<CacheEntry> rows() const;
  std::size_t size() const;
  std::size_t quarantined() const noexcept { return quarantined_; }
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  struct Fetched {
    Bytes der;
    SingleResponse single;
  };
  Fetched fetch_verified(const CertMeta& cert, const CertMeta& issuer, const std::string& url, UtcTime now,
                         OcspTransport& upstream) const;
  void load_store();
  void append_record(const CacheEntry& e);
  void rewrite_store();

  std::filesystem::path path_;
  std::vector<CertMeta> anchors_;
  mutable std::shared_mutex mu_;
  std::map<std::int64_t, CacheEntry> rows_;
  std::unordered_map<std::string, std::int64_t> by_serial_;
  std::int64_t next_id_ = 1;
  std::size_t quarantined_ = 0;
  std::ofstream out_;
};

// Runs maintain() once at start and then every `interval` until stopped.
class MaintenanceScheduler {
 public:
  MaintenanceScheduler(StapleCache& cache, OcspTransport& upstream, Seconds interval = kDay, Clock clock = utc_now,
                       std::ostream* log = nullptr);
  ~MaintenanceScheduler();

  void start();
  void stop();
  std::size_t runs() const noexcept { return runs_.load(); }
  std::optional<MaintenanceReport> last_report() const;

 private:
  void loop();

  StapleCache& cache_;
  OcspTransport& upstream_;
  Seconds interval_;
  Clock clock_;
  std::ostream* log_;
  std::thread thread_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  std::atomic<std::size_t> runs_{0};
  std::optional<MaintenanceReport> last_;
};

}  // namespace staplegrid
