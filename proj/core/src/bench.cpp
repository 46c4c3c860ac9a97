#include "staplegrid/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "staplegrid/crypto.hpp"
#include "staplegrid/error.hpp"

namespace staplegrid {

namespace {

using Stopwatch = std::chrono::steady_clock;

double seconds_since(Stopwatch::time_point t0) {
  return std::chrono::duration<double>(Stopwatch::now() - t0).count();
}

void check_answer(BytesView der, const CertId& asked, const std::optional<Bytes>& nonce,
                  std::span<const CertMeta> anchors, UtcTime now) {
  auto resp = decode_ocsp_response(der);
  if (resp.response_status != ResponseStatus::Successful)
    fail(Errc::UpstreamError, std::string(response_status_name(resp.response_status)));
  verify_ocsp_signature(resp, anchors, now);
  if (!resp.find(asked)) fail(Errc::CertIdMismatch, "response does not answer the query");
  if (nonce && resp.nonce_echo != nonce) fail(Errc::CertIdMismatch, "nonce not echoed");
}

}  // namespace

double percentile(std::vector<double> sample, double p) {
  if (sample.empty()) return 0;
  std::sort(sample.begin(), sample.end());
  auto rank = static_cast<std::size_t>(std::ceil(p / 100.0 * static_cast<double>(sample.size())));
  return sample[std::clamp<std::size_t>(rank, 1, sample.size()) - 1];
}

BenchResult bench_requests(const BenchTarget& target, const BenchOptions& options) {
  if (target.subjects.empty()) fail(Errc::InvalidArgument, "bench needs at least one subject certificate");
  if (options.workers == 0) fail(Errc::InvalidArgument, "workers must be positive");

  std::vector<CertId> ids;
  std::vector<Bytes> plain_requests;
  for (const auto& s : target.subjects) {
    ids.push_back(compute_cert_id(s, target.issuer));
    plain_requests.push_back(encode_ocsp_request({{ids.back()}, std::nullopt}));
  }
  std::vector<CertMeta> anchors = target.trust_anchors;
  if (anchors.empty()) anchors.push_back(target.issuer);
  auto make_transport = options.transport ? options.transport : [] {
    return std::unique_ptr<OcspTransport>(std::make_unique<HttpTransport>());
  };
  const auto allowed_failures = static_cast<std::size_t>(
      std::floor(options.max_failure_ratio * static_cast<double>(options.requests)));

  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> failures{0};
  std::atomic<bool> abort{false};
  std::mutex mu;
  std::vector<double> latencies;
  latencies.reserve(options.requests);
  std::string first_error;

  auto worker = [&] {
    auto transport = make_transport();
    std::vector<double> mine;
    for (;;) {
      if (abort.load()) break;
      std::size_t i = next.fetch_add(1);
      if (i >= options.requests) break;
      std::size_t k = i % ids.size();
      std::optional<Bytes> nonce;
      Bytes fresh;
      if (options.with_nonce) {
        nonce = random_bytes(16);
        fresh = encode_ocsp_request({{ids[k]}, nonce});
      }
      const Bytes& req = options.with_nonce ? fresh : plain_requests[k];
      auto t0 = Stopwatch::now();
      std::optional<std::string> error;
      bool timed = false;
      try {
        Bytes answer = transport->post(target.ocsp_url, req);
        mine.push_back(seconds_since(t0));
        timed = true;
        check_answer(answer, ids[k], nonce, anchors, options.clock());
      } catch (const Error& e) {
        if (!timed) mine.push_back(seconds_since(t0));
        error = e.what();
      }
      if (error) {
        std::lock_guard lock(mu);
        if (first_error.empty()) first_error = *error;
        if (failures.fetch_add(1) + 1 > allowed_failures) abort = true;
      }
    }
    std::lock_guard lock(mu);
    latencies.insert(latencies.end(), mine.begin(), mine.end());
  };

  auto t0 = Stopwatch::now();
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < options.workers; ++w) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  BenchResult r;
  r.wall_time = seconds_since(t0);
  r.workers = options.workers;
  r.requests = latencies.size();
  r.failures = failures.load();
  r.aborted = abort.load();
  r.first_error = first_error;
  r.avg_request_time = r.requests ? r.wall_time / static_cast<double>(r.requests) : 0;
  r.p50 = percentile(latencies, 50);
  r.p95 = percentile(latencies, 95);
  r.p99 = percentile(latencies, 99);
  return r;
}

std::string bench_report_line(const BenchResult& r) {
  nlohmann::json j{{"kind", "bench_requests"},
                   {"requests", r.requests},
                   {"failures", r.failures},
                   {"workers", r.workers},
                   {"wall_time", r.wall_time},
                   {"avg_request_time", r.avg_request_time},
                   {"p50", r.p50},
                   {"p95", r.p95},
                   {"p99", r.p99},
                   {"aborted", r.aborted}};
  if (!r.first_error.empty()) j["first_error"] = r.first_error;
  return j.dump();
}

void write_bench_report(std::ostream& out, const BenchResult& r) { out << bench_report_line(r) << '\n'; }

FrameMeasurement measure_frame(OcspTransport& transport, const std::string& url, const CertMeta& cert,
                               const CertMeta& issuer, std::optional<Bytes> nonce) {
  Bytes req = encode_ocsp_request({{compute_cert_id(cert, issuer)}, std::move(nonce)});
  Bytes resp = transport.post(url, req);
  return {req.size(), resp.size(), req.size() + resp.size()};
}

LocalBenchServer::LocalBenchServer(std::size_t blacklist_size, std::uint64_t seed, std::size_t good_subjects)
    : ca_(TestAuthority::generate_root(DistinguishedName::from_string("C=TW, O=staplegrid-bench, CN=bench-root"),
                                       utc_now(), seed)) {
  const UtcTime now = utc_now();
  IssueOptions opts;
  opts.aia_ocsp_url = "http://127.0.0.1/ocsp";
  // Leaves share the root's key: only the serials matter here.
  opts.public_key_info = ca_.root().public_key_info;
  for (std::size_t i = 0; i < blacklist_size + good_subjects; ++i) {
    auto cert = ca_.issue_cert(DistinguishedName::from_string("CN=bench-" + std::to_string(i)), opts, now);
    if (i < blacklist_size) {
      ca_.revoke(cert.serial_number, RevocationReason::KeyCompromise, now);
      if (i % 64 == 0) subjects_.push_back(std::move(cert));
    } else {
      subjects_.push_back(std::move(cert));
    }
  }
  ResponderConfig cfg;
  cfg.port = 0;
  cfg.issuer_cert = ca_.root();
  cfg.signing_key = std::make_shared<SigningKey>(ca_.root_key());
  responder_ = std::make_shared<HybridResponder>(cfg, nullptr);
  responder_->install_crl(ca_.emit_crl(now).raw, now);
  service_ = std::make_unique<ResponderService>(responder_, utc_now, [](const std::string&) {});
  service_->start();
}

LocalBenchServer::~LocalBenchServer() { service_->stop(); }

BenchTarget LocalBenchServer::target() const { return {ocsp_url(), ca_.root(), subjects_, {ca_.root()}}; }

std::string frame_report_line(const FrameMeasurement& f) {
  return nlohmann::json{{"kind", "bench_frame"},
                        {"request_bytes", f.request_bytes},
                        {"response_bytes", f.response_bytes},
                        {"total_bytes", f.total_bytes}}
      .dump();
}

}  // namespace staplegrid
