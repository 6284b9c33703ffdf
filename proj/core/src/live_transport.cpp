// cpp-httplib backend for the gateway. Kept in its own translation unit so
// the header's size and OpenSSL dependency stay out of everything else.

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "fyi/gateway.hpp"

namespace fyi {

namespace {

struct SplitUrl {
    std::string origin; // scheme://host[:port]
    std::string path;
};

SplitUrl split_url(const std::string& url) {
    const size_t scheme = url.find("://");
    if (scheme == std::string::npos) raise(errc::config_error, "endpoint URL needs a scheme: " + url);
    const size_t path_start = url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

class LiveTransport : public HttpTransport {
  public:
    HttpResponse post(const std::string& endpoint, const std::string& body,
                      const std::vector<std::pair<std::string, std::string>>& headers,
                      double timeout_s) override {
        const SplitUrl url = split_url(endpoint);
        httplib::Client client(url.origin);
        client.set_connection_timeout(std::chrono::milliseconds(static_cast<long>(timeout_s * 1000)));
        client.set_read_timeout(std::chrono::milliseconds(static_cast<long>(timeout_s * 1000)));
        client.set_write_timeout(std::chrono::milliseconds(static_cast<long>(timeout_s * 1000)));

        httplib::Headers h;
        for (const auto& [k, v] : headers) h.emplace(k, v);
        const auto result = client.Post(url.path, h, body, "application/json");
        if (!result) {
            const auto err = result.error();
            if (err == httplib::Error::ConnectionTimeout || err == httplib::Error::Read ||
                err == httplib::Error::Write)
                raise(errc::timeout, "request timed out: " + httplib::to_string(err));
            raise(errc::transport_error, "request failed: " + httplib::to_string(err));
        }
        return {result->status, result->body};
    }
};

} // namespace

std::shared_ptr<HttpTransport> make_live_transport() { return std::make_shared<LiveTransport>(); }

} // namespace fyi
