#pragma once

#include <chrono>
#include <map>
#include <string>

namespace hecix::net {

struct HttpResponse {
  int status = 0;
  std::string body;
};

struct Url {
  std::string scheme_host_port;  // "https://api.example.com:8443"
  std::string path;              // "/v1", never ends with '/'
};

// Splits an absolute http(s) URL. Throws std::invalid_argument.
Url parse_url(const std::string& url);

// Percent-encodes a query component.
std::string query_escape(const std::string& text);

// Throws BackendError(timeout=true) when the transfer times out and
// BackendError on any other transport failure. Non-2xx statuses are returned.
HttpResponse http_get(const std::string& url, const std::map<std::string, std::string>& query,
                      std::chrono::milliseconds timeout);
HttpResponse http_post_json(const std::string& url, const std::string& body,
                            const std::map<std::string, std::string>& headers, std::chrono::milliseconds timeout);

}  // namespace hecix::net
