#pragma once

// Thin wrapper so only http.cpp pulls in httplib.

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace tsdistill::http {

struct Url {
  std::string scheme;  ///< "http" or "https"
  std::string host;
  int port = 0;
  std::string path;    ///< begins with '/'

  std::string origin() const;
};

/// Throws ValidationError on anything but http(s)://host[:port][/path].
Url parse_url(std::string_view url);

struct Response {
  int status = 0;      ///< 0 when no HTTP response arrived
  std::string body;
  std::string error;   ///< transport-level failure description when status == 0
};

using Headers = std::vector<std::pair<std::string, std::string>>;

Response post_json(const Url& url, const std::string& body, const Headers& headers,
                   double timeout_s);
Response get(const Url& url, const Headers& headers, double timeout_s);

}  // namespace tsdistill::http
