#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "staplegrid/bytes.hpp"

namespace staplegrid {

struct HttpUrl {
  std::string host;
  int port = 80;
  std::string path = "/";

  std::string origin() const { return host + ":" + std::to_string(port); }
};

// Only plain http:// is supported. InvalidArgument otherwise.
HttpUrl parse_http_url(const std::string& url);

// One OCSP-over-HTTP exchange: POST the DER request, return the DER body.
class OcspTransport {
 public:
  virtual ~OcspTransport() = default;
  // UpstreamUnreachable on connection failures and non-200 replies.
  virtual Bytes post(const std::string& url, BytesView request_der) = 0;
};

// Keeps one keep-alive connection per origin. Calls are serialized; give each
// worker its own instance for parallel load.
class HttpTransport final : public OcspTransport {
 public:
  explicit HttpTransport(std::chrono::milliseconds timeout = std::chrono::seconds(5));
  ~HttpTransport() override;

  Bytes post(const std::string& url, BytesView request_der) override;

 private:
  struct Clients;
  std::chrono::milliseconds timeout_;
  std::mutex mu_;
  std::unique_ptr<Clients> clients_;
};

// Counts upstream round trips made through `inner`.
class CountingTransport final : public OcspTransport {
 public:
  explicit CountingTransport(OcspTransport& inner) : inner_(inner) {}

  Bytes post(const std::string& url, BytesView request_der) override {
    ++count_;
    return inner_.post(url, request_der);
  }
  std::size_t count() const noexcept { return count_.load(); }

 private:
  OcspTransport& inner_;
  std::atomic<std::size_t> count_{0};
};

// In-process transport: routes a URL straight to a handler, no sockets.
class LoopbackTransport final : public OcspTransport {
 public:
  using Handler = std::function<Bytes(BytesView request_der)>;

  void route(const std::string& url, Handler handler);
  void unroute(const std::string& url);
  Bytes post(const std::string& url, BytesView request_der) override;

 private:
  std::mutex mu_;
  std::map<std::string, Handler> routes_;
};

// Plain GET; UpstreamUnreachable unless the server answers 200.
Bytes http_get(const std::string& url, std::chrono::milliseconds timeout = std::chrono::seconds(5));

}  // namespace staplegrid
