#pragma once

#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>

#include "staplegrid/responder.hpp"

namespace staplegrid {

// HTTP front end for a HybridResponder:
//   POST /ocsp                      application/ocsp-request -> application/ocsp-response
//   GET  /ocsp/{base64url request}
//   GET  /downloadcrl/download_crl  current CRL, DER
// plus a background task re-reading the CRL every refresh_interval.
class ResponderService {
 public:
  using Logger = std::function<void(const std::string&)>;

  explicit ResponderService(std::shared_ptr<HybridResponder> responder, Clock clock = utc_now,
                            Logger log = nullptr);
  ~ResponderService();
  ResponderService(const ResponderService&) = delete;
  ResponderService& operator=(const ResponderService&) = delete;

  // Binds and starts serving; BindFailure if the address is taken. An
  // initial refresh is attempted but its failure is only logged.
  void start();
  // Stops accepting, drains in-flight requests, joins threads. Idempotent.
  void stop();
  // Blocks until stop() is called from elsewhere.
  void wait();

  int port() const noexcept { return port_; }
  std::string base_url() const;
  std::string ocsp_url() const { return base_url() + "/ocsp"; }
  std::string crl_url() const { return base_url() + "/downloadcrl/download_crl"; }

 private:
  struct Server;

  void refresher_loop();
  void log(const std::string& msg) const;

  std::shared_ptr<HybridResponder> responder_;
  Clock clock_;
  Logger log_;
  std::unique_ptr<Server> server_;
  std::thread listen_thread_;
  std::thread refresh_thread_;
  std::mutex mu_;
  std::condition_variable cv_;
  bool stopping_ = false;
  bool started_ = false;
  int port_ = 0;
};

}  // namespace staplegrid
