#include "staplegrid/staple_cache.hpp"

#include <zlib.h>

#include <algorithm>
#include <cstring>
#include <sstream>

#include "staplegrid/error.hpp"

namespace staplegrid {

namespace {

constexpr std::uint8_t kHeader[8] = {'S', 'G', 'O', 'C', 1, 0, 0, 0};
constexpr std::uint8_t kRowMarker[4] = {'R', 'O', 'W', '1'};
constexpr std::uint8_t kQuarantineMarker[4] = {'S', 'G', 'Q', '1'};
constexpr std::size_t kRecordHeader = 12;

std::uint32_t crc_of(BytesView data) {
  return static_cast<std::uint32_t>(crc32(0L, data.data(), static_cast<uInt>(data.size())));
}

std::string as_string(BytesView b) { return std::string(b.begin(), b.end()); }

Bytes encode_payload(const CacheEntry& e) {
  Bytes p;
  put_u64(p, static_cast<std::uint64_t>(e.id));
  put_blob(p, to_bytes(e.serial_number));
  put_blob(p, to_bytes(e.cert_status));
  put_blob(p, to_bytes(e.ocsp_url));
  put_blob(p, to_bytes(e.next_update));
  put_blob(p, e.ocsp_response);
  put_blob(p, e.certificate);
  put_blob(p, e.issuer_certificate);
  return p;
}

CacheEntry decode_payload(BytesView payload) {
  ByteCursor c(payload, Errc::StoreCorrupt);
  CacheEntry e;
  e.id = static_cast<std::int64_t>(c.u64());
  e.serial_number = as_string(c.blob());
  e.cert_status = as_string(c.blob());
  e.ocsp_url = as_string(c.blob());
  e.next_update = as_string(c.blob());
  auto blob = [&] {
    auto v = c.blob();
    return Bytes(v.begin(), v.end());
  };
  e.ocsp_response = blob();
  e.certificate = blob();
  e.issuer_certificate = blob();
  if (!c.empty()) fail(Errc::StoreCorrupt, "trailing bytes in record");
  return e;
}

Bytes frame(const CacheEntry& e) {
  Bytes payload = encode_payload(e);
  Bytes rec(kRowMarker, kRowMarker + 4);
  put_u32(rec, static_cast<std::uint32_t>(payload.size()));
  put_u32(rec, crc_of(payload));
  append(rec, payload);
  return rec;
}

const SingleResponse* single_for_serial(const OcspResponse& resp, const SerialNumber& serial) {
  for (const auto& sr : resp.single_responses)
    if (sr.cert_id.serial_number == serial) return &sr;
  return nullptr;
}

std::string column_time(const std::optional<UtcTime>& t) { return t ? format_sql_time(*t) : std::string(); }

// The denormalized columns must agree with the stored blobs.
void check_row(const CacheEntry& e) {
  if (e.id <= 0) fail(Errc::StoreCorrupt, "bad id");
  SerialNumber serial = SerialNumber::from_decimal(e.serial_number);
  if (parse_certificate(e.certificate).serial_number != serial) fail(Errc::StoreCorrupt, "certificate serial differs");
  auto resp = decode_ocsp_response(e.ocsp_response);
  const SingleResponse* sr = single_for_serial(resp, serial);
  if (!sr) fail(Errc::StoreCorrupt, "response does not cover the serial");
  if (status_name(sr->status.kind) != e.cert_status) fail(Errc::StoreCorrupt, "cert_status differs from blob");
  if (column_time(sr->next_update) != e.next_update) fail(Errc::StoreCorrupt, "next_update differs from blob");
}

std::size_t find_marker(const Bytes& data, std::size_t from) {
  auto it = std::search(data.begin() + static_cast<long>(std::min(from, data.size())), data.end(), kRowMarker,
                        kRowMarker + 4);
  return static_cast<std::size_t>(it - data.begin());
}

}  // namespace

bool needs_update(std::optional<UtcTime> next_update, UtcTime now) {
  return !next_update || *next_update - now < kRefreshHorizon;
}

std::string python_bytes_repr(BytesView data) {
  bool has_single = std::find(data.begin(), data.end(), '\'') != data.end();
  bool has_double = std::find(data.begin(), data.end(), '"') != data.end();
  char quote = has_single && !has_double ? '"' : '\'';
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "b";
  out += quote;
  for (std::uint8_t b : data) {
    if (b == '\\' || b == static_cast<std::uint8_t>(quote)) {
      out += '\\';
      out += static_cast<char>(b);
    } else if (b == '\t') {
      out += "\\t";
    } else if (b == '\n') {
      out += "\\n";
    } else if (b == '\r') {
      out += "\\r";
    } else if (b < 0x20 || b >= 0x7f) {
      out += "\\x";
      out += kHex[b >> 4];
      out += kHex[b & 0xF];
    } else {
      out += static_cast<char>(b);
    }
  }
  out += quote;
  return out;
}

StapleCache::StapleCache(std::filesystem::path store_path, std::vector<CertMeta> anchors)
    : path_(std::move(store_path)), anchors_(std::move(anchors)) {
  if (!path_.empty()) load_store();
}

StapleCache::~StapleCache() = default;

std::unique_ptr<StapleCache> StapleCache::recover(const std::filesystem::path& store_path,
                                                  std::vector<CertMeta> anchors) {
  return std::make_unique<StapleCache>(store_path, std::move(anchors));
}

void StapleCache::load_store() {
  Bytes data;
  if (std::filesystem::exists(path_)) {
    std::ifstream in(path_, std::ios::binary);
    if (!in) fail(Errc::StoreCorrupt, "cannot read " + path_.string());
    data.assign(std::istreambuf_iterator<char>(in), {});
  }
  if (data.empty()) {
    rewrite_store();
    return;
  }
  if (data.size() < sizeof kHeader || std::memcmp(data.data(), kHeader, sizeof kHeader) != 0)
    fail(Errc::StoreCorrupt, path_.string() + ": not a staple cache store");

  Bytes quarantine;
  std::size_t records = 0;
  std::size_t pos = sizeof kHeader;
  while (pos < data.size()) {
    std::optional<CacheEntry> row;
    std::size_t next = pos;
    if (data.size() - pos >= kRecordHeader && std::memcmp(&data[pos], kRowMarker, 4) == 0) {
      ByteCursor hdr(BytesView(data).subspan(pos + 4, 8), Errc::StoreCorrupt);
      std::uint32_t len = hdr.u32();
      std::uint32_t crc = hdr.u32();
      if (len <= data.size() - pos - kRecordHeader) {
        BytesView payload(data.data() + pos + kRecordHeader, len);
        if (crc_of(payload) == crc) {
          try {
            CacheEntry e = decode_payload(payload);
            check_row(e);
            row = std::move(e);
            next = pos + kRecordHeader + len;
          } catch (const Error&) {
          }
        }
      }
    }
    if (!row) {
      // Resynchronize at the next record marker and set the damaged span aside.
      next = find_marker(data, pos + 1);
      Bytes span(data.begin() + static_cast<long>(pos), data.begin() + static_cast<long>(next));
      append(quarantine, BytesView(kQuarantineMarker, 4));
      put_u64(quarantine, pos);
      put_blob(quarantine, span);
      ++quarantined_;
    } else {
      ++records;
      auto existing = by_serial_.find(row->serial_number);
      if (existing != by_serial_.end() && existing->second != row->id) {
        // A second id for one serial would break uniqueness; first row wins.
        ++quarantined_;
        Bytes span(data.begin() + static_cast<long>(pos), data.begin() + static_cast<long>(next));
        append(quarantine, BytesView(kQuarantineMarker, 4));
        put_u64(quarantine, pos);
        put_blob(quarantine, span);
      } else {
        by_serial_[row->serial_number] = row->id;
        next_id_ = std::max(next_id_, row->id + 1);
        rows_[row->id] = std::move(*row);
      }
    }
    pos = next;
  }

  if (!quarantine.empty()) {
    std::ofstream q(path_.string() + ".quarantine", std::ios::binary | std::ios::app);
    q.write(reinterpret_cast<const char*>(quarantine.data()), static_cast<std::streamsize>(quarantine.size()));
  }
  if (quarantined_ > 0 || records != rows_.size()) {
    rewrite_store();
  } else {
    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) fail(Errc::Io, "cannot append to " + path_.string());
  }
}

void StapleCache::rewrite_store() {
  auto tmp = path_;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) fail(Errc::Io, "cannot write " + tmp.string());
    f.write(reinterpret_cast<const char*>(kHeader), sizeof kHeader);
    for (const auto& [id, e] : rows_) {
      Bytes rec = frame(e);
      f.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
    }
    f.flush();
    if (!f) fail(Errc::Io, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, path_);
  out_.close();
  out_.open(path_, std::ios::binary | std::ios::app);
  if (!out_) fail(Errc::Io, "cannot append to " + path_.string());
}

void StapleCache::append_record(const CacheEntry& e) {
  if (path_.empty()) return;
  Bytes rec = frame(e);
  out_.write(reinterpret_cast<const char*>(rec.data()), static_cast<std::streamsize>(rec.size()));
  out_.flush();
  if (!out_) fail(Errc::Io, "write to " + path_.string() + " failed");
}

StapleCache::Fetched StapleCache::fetch_verified(const CertMeta& cert, const CertMeta& issuer, const std::string& url,
                                                 UtcTime now, OcspTransport& upstream) const {
  CertId id = compute_cert_id(cert, issuer);
  // No nonce: a staple is shared and pre-produced, its window is the freshness.
  Bytes raw = upstream.post(url, encode_ocsp_request({{id}, std::nullopt}));
  OcspResponse resp;
  try {
    resp = decode_ocsp_response(raw);
  } catch (const Error& e) {
    fail(Errc::UpstreamError, std::string("undecodable response: ") + e.what());
  }
  if (resp.response_status != ResponseStatus::Successful)
    fail(Errc::UpstreamError, std::string(response_status_name(resp.response_status)));
  std::vector<CertMeta> anchors = anchors_.empty() ? std::vector<CertMeta>{issuer} : anchors_;
  verify_ocsp_signature(resp, anchors, now);
  const SingleResponse* sr = resp.find(id);
  if (!sr) fail(Errc::CertIdMismatch, "response does not answer for serial " + cert.serial_number.to_hex());
  return {std::move(raw), *sr};
}

CacheEntry StapleCache::lookup_or_fetch(BytesView cert_der, BytesView issuer_der, UtcTime now,
                                        OcspTransport& upstream) {
  CertMeta cert = load_certificate(cert_der);
  std::string serial = cert.serial_number.to_decimal();
  {
    std::shared_lock lock(mu_);
    auto it = by_serial_.find(serial);
    if (it != by_serial_.end()) return rows_.at(it->second);
  }
  if (!cert.aia_ocsp_url) fail(Errc::NoOcspUrl, "certificate " + cert.serial_number.to_hex() + " has no OCSP URL");
  CertMeta issuer = load_certificate(issuer_der);
  Fetched f = fetch_verified(cert, issuer, *cert.aia_ocsp_url, now, upstream);

  std::unique_lock lock(mu_);
  auto it = by_serial_.find(serial);
  if (it != by_serial_.end()) return rows_.at(it->second);  // lost the race; keep the first row
  CacheEntry e;
  e.id = next_id_;
  e.serial_number = serial;
  e.cert_status = std::string(status_name(f.single.status.kind));
  e.ocsp_url = *cert.aia_ocsp_url;
  e.next_update = column_time(f.single.next_update);
  e.ocsp_response = std::move(f.der);
  e.certificate = cert.raw_der;
  e.issuer_certificate = issuer.raw_der;
  append_record(e);
  ++next_id_;
  by_serial_[serial] = e.id;
  rows_[e.id] = e;
  return e;
}

std::optional<CacheEntry> StapleCache::find(const SerialNumber& serial) const {
  std::shared_lock lock(mu_);
  auto it = by_serial_.find(serial.to_decimal());
  if (it == by_serial_.end()) return std::nullopt;
  return rows_.at(it->second);
}

Staple StapleCache::get_staple(const SerialNumber& serial, UtcTime now) const {
  auto row = find(serial);
  if (!row) fail(Errc::NotCached, "no staple for serial " + serial.to_hex());
  bool stale = row->next_update.empty() || parse_sql_time(row->next_update) < now;
  Bytes der = row->ocsp_response;
  return {std::move(der), std::move(*row), stale};
}

MaintenanceReport StapleCache::maintain(UtcTime now, OcspTransport& upstream, std::ostream* log) {
  MaintenanceReport report;
  auto say = [&](const std::string& line) {
    if (log) *log << line << '\n';
  };
  say(format_sql_time(now));
  for (const CacheEntry& row : rows()) {
    ++report.checked;
    std::string tag = "ID: " + std::to_string(row.id);
    std::optional<UtcTime> next;
    if (!row.next_update.empty()) next = parse_sql_time(row.next_update);
    if (!needs_update(next, now)) {
      report.skipped.push_back(row.id);
      say(tag + " don't need update");
      continue;
    }
    say(tag + " need update");
    try {
      CertMeta cert = parse_certificate(row.certificate);
      CertMeta issuer = parse_certificate(row.issuer_certificate);
      Fetched f = fetch_verified(cert, issuer, row.ocsp_url, now, upstream);
      CacheEntry updated = row;
      updated.cert_status = std::string(status_name(f.single.status.kind));
      updated.next_update = column_time(f.single.next_update);
      updated.ocsp_response = std::move(f.der);
      {
        std::unique_lock lock(mu_);
        append_record(updated);
        rows_[row.id] = std::move(updated);
      }
      report.updated.push_back(row.id);
      say(tag + " update completed");
    } catch (const std::exception& e) {
      report.failed.emplace_back(row.id, e.what());
      say(tag + " update failed: " + e.what());
    }
  }
  return report;
}

std::string StapleCache::export_table() const {
  auto all = rows();
  std::ostringstream out;
  out << "ocsp_responses: " << all.size() << (all.size() == 1 ? " row" : " rows") << '\n';
  for (const auto& e : all) {
    out << '\n'
        << "ID: " << e.id << '\n'
        << "serial_number: " << e.serial_number << '\n'
        << "cert_status: " << e.cert_status << '\n'
        << "ocsp_url: " << e.ocsp_url << '\n'
        << "next_update: " << e.next_update << '\n'
        << "ocsp_response: " << python_bytes_repr(e.ocsp_response) << '\n'
        << "certificate: " << python_bytes_repr(e.certificate) << '\n'
        << "issuer_certificate: " << python_bytes_repr(e.issuer_certificate) << '\n';
  }
  return out.str();
}

std::vector<CacheEntry> StapleCache::rows() const {
  std::shared_lock lock(mu_);
  std::vector<CacheEntry> out;
  out.reserve(rows_.size());
  for (const auto& [id, e] : rows_) out.push_back(e);
  return out;
}

std::size_t StapleCache::size() const {
  std::shared_lock lock(mu_);
  return rows_.size();
}

MaintenanceScheduler::MaintenanceScheduler(StapleCache& cache, OcspTransport& upstream, Seconds interval, Clock clock,
                                           std::ostream* log)
    : cache_(cache), upstream_(upstream), interval_(interval), clock_(std::move(clock)), log_(log) {
  if (interval_ <= Seconds::zero()) fail(Errc::InvalidArgument, "maintenance interval must be positive");
}

MaintenanceScheduler::~MaintenanceScheduler() { stop(); }

void MaintenanceScheduler::start() {
  if (thread_.joinable()) return;
  stopping_ = false;
  thread_ = std::thread([this] { loop(); });
}

void MaintenanceScheduler::stop() {
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  if (thread_.joinable()) thread_.join();
}

std::optional<MaintenanceReport> MaintenanceScheduler::last_report() const {
  std::lock_guard lock(mu_);
  return last_;
}

void MaintenanceScheduler::loop() {
  std::unique_lock lock(mu_);
  do {
    lock.unlock();
    auto report = cache_.maintain(clock_(), upstream_, log_);
    lock.lock();
    last_ = std::move(report);
    ++runs_;
  } while (!cv_.wait_for(lock, interval_, [this] { return stopping_; }));
}

}  // namespace staplegrid
