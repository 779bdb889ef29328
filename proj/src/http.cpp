#include "http.hpp"

#include <cmath>
#include <httplib.h>

#include "tsdistill/errors.hpp"

namespace tsdistill::http {
namespace {

template <class Fn>
Response with_client(const Url& url, double timeout_s, Fn&& fn) {
  httplib::Client client(url.origin());
  const auto secs = static_cast<time_t>(std::floor(timeout_s));
  const auto usecs = static_cast<time_t>((timeout_s - std::floor(timeout_s)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Result res = fn(client);
  Response out;
  if (!res) {
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

httplib::Headers to_headers(const Headers& h) {
  httplib::Headers out;
  for (const auto& [k, v] : h) out.emplace(k, v);
  return out;
}

}  // namespace

std::string Url::origin() const { return scheme + "://" + host + ":" + std::to_string(port); }

Url parse_url(std::string_view url) {
  Url u;
  const auto sep = url.find("://");
  if (sep == std::string_view::npos) throw ValidationError("invalid URL (no scheme): " + std::string(url));
  u.scheme = std::string(url.substr(0, sep));
  if (u.scheme != "http" && u.scheme != "https")
    throw ValidationError("unsupported URL scheme: " + u.scheme);
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (u.scheme == "https") throw ValidationError("https URLs need a build with OpenSSL support");
#endif
  std::string_view rest = url.substr(sep + 3);
  const auto slash = rest.find('/');
  const std::string_view authority = rest.substr(0, slash);
  u.path = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
  const auto colon = authority.rfind(':');
  if (colon != std::string_view::npos && authority.find(']') == std::string_view::npos) {
    u.host = std::string(authority.substr(0, colon));
    const std::string port(authority.substr(colon + 1));
    if (port.empty() || port.find_first_not_of("0123456789") != std::string::npos)
      throw ValidationError("invalid URL port: " + std::string(url));
    u.port = std::stoi(port);
  } else {
    u.host = std::string(authority);
    u.port = u.scheme == "https" ? 443 : 80;
  }
  if (u.host.empty()) throw ValidationError("invalid URL (no host): " + std::string(url));
  return u;
}

Response post_json(const Url& url, const std::string& body, const Headers& headers,
                   double timeout_s) {
  return with_client(url, timeout_s, [&](httplib::Client& c) {
    return c.Post(url.path, to_headers(headers), body, "application/json");
  });
}

Response get(const Url& url, const Headers& headers, double timeout_s) {
  return with_client(url, timeout_s,
                     [&](httplib::Client& c) { return c.Get(url.path, to_headers(headers)); });
}

}  // namespace tsdistill::http
