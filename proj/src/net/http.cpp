#include "hecix/net/http.hpp"

#include <httplib.h>

#include <cctype>
#include <stdexcept>

#include "hecix/errors.hpp"

namespace hecix::net {

Url parse_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw std::invalid_argument("URL without scheme: " + url);
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") throw std::invalid_argument("unsupported URL scheme: " + scheme);
  const auto path_start = url.find('/', scheme_end + 3);
  Url out;
  out.scheme_host_port = url.substr(0, path_start);
  if (out.scheme_host_port.size() == scheme_end + 3) throw std::invalid_argument("URL without host: " + url);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  return out;
}

std::string query_escape(const std::string& text) {
  static const char* hex = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      out += '%';
      out += hex[c >> 4];
      out += hex[c & 15];
    }
  }
  return out;
}

namespace {

httplib::Client make_client(const Url& url, std::chrono::milliseconds timeout) {
  httplib::Client client(url.scheme_host_port);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  client.set_write_timeout(secs.count(), usecs.count());
  client.set_follow_location(true);
  return client;
}

HttpResponse unwrap(const httplib::Result& result, const std::string& what) {
  if (!result) {
    const auto err = result.error();
    const bool timeout = err == httplib::Error::Read || err == httplib::Error::Write ||
                         err == httplib::Error::ConnectionTimeout;
    throw BackendError(what + ": " + httplib::to_string(err), timeout);
  }
  return {result->status, result->body};
}

}  // namespace

HttpResponse http_get(const std::string& url, const std::map<std::string, std::string>& query,
                      std::chrono::milliseconds timeout) {
  const Url u = parse_url(url);
  auto client = make_client(u, timeout);
  std::string target = u.path.empty() ? "/" : u.path;
  char sep = '?';
  for (const auto& [k, v] : query) {
    target += sep + query_escape(k) + "=" + query_escape(v);
    sep = '&';
  }
  return unwrap(client.Get(target), "GET " + u.scheme_host_port + u.path);
}

HttpResponse http_post_json(const std::string& url, const std::string& body,
                            const std::map<std::string, std::string>& headers, std::chrono::milliseconds timeout) {
  const Url u = parse_url(url);
  auto client = make_client(u, timeout);
  httplib::Headers h;
  for (const auto& [k, v] : headers) h.emplace(k, v);
  return unwrap(client.Post(u.path.empty() ? "/" : u.path, h, body, "application/json"),
                "POST " + u.scheme_host_port + u.path);
}

}  // namespace hecix::net
