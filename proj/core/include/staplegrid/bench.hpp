#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "staplegrid/certificate.hpp"
#include "staplegrid/ocsp.hpp"
#include "staplegrid/responder_service.hpp"
#include "staplegrid/test_ca.hpp"
#include "staplegrid/transport.hpp"

namespace staplegrid {

struct BenchResult {
  std::size_t requests = 0;  // completed cycles, failed ones included
  std::size_t failures = 0;
  std::size_t workers = 1;
  double wall_time = 0;         // seconds
  double avg_request_time = 0;  // wall_time / requests
  double p50 = 0, p95 = 0, p99 = 0;  // per-request latency
  bool aborted = false;         // more than max_failure_ratio failed
  std::string first_error;
};

// What to ask and whom to believe. Request i queries subjects[i % size].
struct BenchTarget {
  std::string ocsp_url;
  CertMeta issuer;
  std::vector<CertMeta> subjects;
  std::vector<CertMeta> trust_anchors;  // defaults to {issuer}
};

struct BenchOptions {
  std::size_t requests = 1000;
  std::size_t workers = 1;
  bool with_nonce = false;
  double max_failure_ratio = 0.01;
  Clock clock = utc_now;
  // One transport per worker; HTTP with keep-alive by default.
  std::function<std::unique_ptr<OcspTransport>()> transport;
};

// Times `requests` full POST cycles and verifies every answer: it must decode,
// be SUCCESSFUL, carry a valid signature and answer the CertId that was asked.
BenchResult bench_requests(const BenchTarget& target, const BenchOptions& options);

// One JSON object per line.
std::string bench_report_line(const BenchResult& r);
void write_bench_report(std::ostream& out, const BenchResult& r);

struct FrameMeasurement {
  std::size_t request_bytes = 0;
  std::size_t response_bytes = 0;
  std::size_t total_bytes = 0;
};

// Body sizes of one query cycle. UpstreamUnreachable from the transport.
FrameMeasurement measure_frame(OcspTransport& transport, const std::string& url, const CertMeta& cert,
                               const CertMeta& issuer, std::optional<Bytes> nonce = std::nullopt);

std::string frame_report_line(const FrameMeasurement& f);

// A throwaway CA with `blacklist_size` revoked certificates, served over HTTP
// on an ephemeral loopback port. Subjects mix good and revoked certificates.
class LocalBenchServer {
 public:
  explicit LocalBenchServer(std::size_t blacklist_size, std::uint64_t seed = 1, std::size_t good_subjects = 16);
  ~LocalBenchServer();

  BenchTarget target() const;
  std::string ocsp_url() const { return service_->ocsp_url(); }
  const CertMeta& issuer() const noexcept { return ca_.root(); }
  const std::vector<CertMeta>& subjects() const noexcept { return subjects_; }
  const HybridResponder& responder() const noexcept { return *responder_; }

 private:
  TestAuthority ca_;
  std::vector<CertMeta> subjects_;
  std::shared_ptr<HybridResponder> responder_;
  std::unique_ptr<ResponderService> service_;
};

// Nearest-rank percentile of an unsorted sample; 0 for an empty one.
double percentile(std::vector<double> sample, double p);

}  // namespace staplegrid
