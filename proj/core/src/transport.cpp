#include "staplegrid/transport.hpp"

#include <httplib.h>

#include "staplegrid/error.hpp"

namespace staplegrid {

HttpUrl parse_http_url(const std::string& url) {
  constexpr std::string_view kScheme = "http://";
  if (url.rfind(kScheme, 0) != 0) fail(Errc::InvalidArgument, "not an http:// URL: " + url);
  std::string rest = url.substr(kScheme.size());
  HttpUrl out;
  auto slash = rest.find('/');
  std::string authority = rest.substr(0, slash);
  if (slash != std::string::npos) out.path = rest.substr(slash);
  auto colon = authority.rfind(':');
  if (colon != std::string::npos) {
    out.host = authority.substr(0, colon);
    try {
      std::size_t used = 0;
      out.port = std::stoi(authority.substr(colon + 1), &used);
      if (used != authority.size() - colon - 1 || out.port <= 0 || out.port > 65535) throw std::out_of_range("port");
    } catch (const std::exception&) {
      fail(Errc::InvalidArgument, "bad port in URL: " + url);
    }
  } else {
    out.host = authority;
  }
  if (out.host.empty()) fail(Errc::InvalidArgument, "missing host in URL: " + url);
  return out;
}

struct HttpTransport::Clients {
  std::map<std::string, std::unique_ptr<httplib::Client>> by_origin;
};

HttpTransport::HttpTransport(std::chrono::milliseconds timeout)
    : timeout_(timeout), clients_(std::make_unique<Clients>()) {}

HttpTransport::~HttpTransport() = default;

namespace {

void configure(httplib::Client& c, std::chrono::milliseconds timeout) {
  c.set_keep_alive(true);
  c.set_tcp_nodelay(true);
  c.set_connection_timeout(timeout);
  c.set_read_timeout(timeout);
  c.set_write_timeout(timeout);
}

}  // namespace

Bytes HttpTransport::post(const std::string& url, BytesView request_der) {
  HttpUrl u = parse_http_url(url);
  std::lock_guard lock(mu_);
  auto& client = clients_->by_origin[u.origin()];
  if (!client) {
    client = std::make_unique<httplib::Client>(u.host, u.port);
    configure(*client, timeout_);
  }
  auto res = client->Post(u.path, reinterpret_cast<const char*>(request_der.data()), request_der.size(),
                          "application/ocsp-request");
  if (!res) {
    auto err = res.error();
    clients_->by_origin.erase(u.origin());
    fail(Errc::UpstreamUnreachable, url + ": " + httplib::to_string(err));
  }
  if (res->status != 200) fail(Errc::UpstreamUnreachable, url + ": HTTP " + std::to_string(res->status));
  return Bytes(res->body.begin(), res->body.end());
}

void LoopbackTransport::route(const std::string& url, Handler handler) {
  std::lock_guard lock(mu_);
  routes_[url] = std::move(handler);
}

void LoopbackTransport::unroute(const std::string& url) {
  std::lock_guard lock(mu_);
  routes_.erase(url);
}

Bytes LoopbackTransport::post(const std::string& url, BytesView request_der) {
  Handler h;
  {
    std::lock_guard lock(mu_);
    auto it = routes_.find(url);
    if (it == routes_.end()) fail(Errc::UpstreamUnreachable, "no route to " + url);
    h = it->second;
  }
  return h(request_der);
}

Bytes http_get(const std::string& url, std::chrono::milliseconds timeout) {
  HttpUrl u = parse_http_url(url);
  httplib::Client client(u.host, u.port);
  configure(client, timeout);
  client.set_keep_alive(false);
  auto res = client.Get(u.path);
  if (!res) fail(Errc::UpstreamUnreachable, url + ": " + httplib::to_string(res.error()));
  if (res->status != 200) fail(Errc::UpstreamUnreachable, url + ": HTTP " + std::to_string(res->status));
  return Bytes(res->body.begin(), res->body.end());
}

}  // namespace staplegrid
