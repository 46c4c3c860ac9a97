#include "staplegrid/responder_service.hpp"

#include <httplib.h>

#include <algorithm>
#include <iostream>

#include "staplegrid/error.hpp"

namespace staplegrid {

struct ResponderService::Server {
  httplib::Server http;
};

namespace {

constexpr const char* kOcspResponseType = "application/ocsp-response";

void send_der(httplib::Response& res, const Bytes& der, const char* type) {
  res.status = 200;
  res.set_content(std::string(der.begin(), der.end()), type);
}

}  // namespace

ResponderService::ResponderService(std::shared_ptr<HybridResponder> responder, Clock clock, Logger log)
    : responder_(std::move(responder)), clock_(std::move(clock)), log_(std::move(log)),
      server_(std::make_unique<Server>()) {}

ResponderService::~ResponderService() { stop(); }

void ResponderService::log(const std::string& msg) const {
  if (log_) log_(msg);
  else std::cerr << "[responder] " << msg << '\n';
}

std::string ResponderService::base_url() const {
  return "http://" + responder_->config().listen_address + ":" + std::to_string(port_);
}

void ResponderService::start() {
  if (started_) return;
  auto& http = server_->http;
  auto responder = responder_;
  auto clock = clock_;

  http.Post("/ocsp", [responder, clock](const httplib::Request& req, httplib::Response& res) {
    BytesView body(reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size());
    send_der(res, responder->handle(body, clock()), kOcspResponseType);
  });
  http.Get(R"(/ocsp/(.+))", [responder, clock](const httplib::Request& req, httplib::Response& res) {
    Bytes der;
    try {
      // Some clients percent-encode or use the standard alphabet.
      std::string enc = req.matches[1];
      std::replace(enc.begin(), enc.end(), '+', '-');
      std::replace(enc.begin(), enc.end(), '/', '_');
      enc.erase(std::remove(enc.begin(), enc.end(), '='), enc.end());
      der = base64url_decode(enc);
    } catch (const std::exception&) {
      send_der(res, encode_ocsp_error(ResponseStatus::MalformedRequest), kOcspResponseType);
      return;
    }
    send_der(res, responder->handle(der, clock()), kOcspResponseType);
  });
  http.Get("/downloadcrl/download_crl", [responder](const httplib::Request&, httplib::Response& res) {
    auto crl = responder->current_crl();
    if (!crl) {
      res.status = 503;
      res.set_content("no CRL loaded\n", "text/plain");
      return;
    }
    send_der(res, *crl, "application/pkix-crl");
  });

  // httplib's default adds SO_REUSEPORT, which would let a second responder
  // silently share the port.
  http.set_tcp_nodelay(true);
  http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });

  const auto& cfg = responder_->config();
  int bound = cfg.port == 0 ? http.bind_to_any_port(cfg.listen_address) : (http.bind_to_port(cfg.listen_address, cfg.port) ? cfg.port : -1);
  if (bound <= 0) fail(Errc::BindFailure, "cannot bind " + cfg.listen_address + ":" + std::to_string(cfg.port));
  port_ = bound;

  try {
    responder_->refresh_blacklist(clock_());
  } catch (const Error& e) {
    log(std::string("initial CRL load failed: ") + e.what());
  }

  started_ = true;
  stopping_ = false;
  listen_thread_ = std::thread([this] { server_->http.listen_after_bind(); });
  refresh_thread_ = std::thread([this] { refresher_loop(); });
  server_->http.wait_until_ready();
}

void ResponderService::refresher_loop() {
  const Seconds interval = responder_->config().refresh_interval;
  Seconds delay = interval;
  int failures = 0;
  std::unique_lock lock(mu_);
  while (!cv_.wait_for(lock, delay, [this] { return stopping_; })) {
    lock.unlock();
    try {
      auto idx = responder_->refresh_blacklist(clock_());
      failures = 0;
      delay = interval;
      log("blacklist generation " + std::to_string(idx->generation) + ": " + std::to_string(idx->by_serial.size()) +
          " revoked serials");
    } catch (const Error& e) {
      // Back off 5s, 10s, 20s ... but never wait longer than the interval.
      ++failures;
      delay = std::min(interval, Seconds(5) * (1 << std::min(failures - 1, 16)));
      log(std::string("refresh failed, keeping previous blacklist, retry in ") + std::to_string(delay.count()) +
          "s: " + e.what());
    }
    lock.lock();
  }
}

void ResponderService::stop() {
  if (!started_) return;
  {
    std::lock_guard lock(mu_);
    stopping_ = true;
  }
  cv_.notify_all();
  server_->http.stop();
  if (listen_thread_.joinable()) listen_thread_.join();
  if (refresh_thread_.joinable()) refresh_thread_.join();
  started_ = false;
}

void ResponderService::wait() {
  if (listen_thread_.joinable()) listen_thread_.join();
}

}  // namespace staplegrid
