#include "caer/http.hpp"

#include <algorithm>
#include <thread>

#include "httplib.h"

namespace caer {

namespace {

// Splits `http(s)://host[:port][/path...]` into origin and path.
std::pair<std::string, std::string> split_url(const std::string& url) {
    auto scheme_end = url.find("://");
    if (scheme_end == std::string::npos)
        throw std::runtime_error("invalid URL (missing scheme): " + url);
    auto path_start = url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) return {url, "/"};
    return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttplibTransport::HttplibTransport(std::chrono::milliseconds timeout) : timeout_(timeout) {}

HttpResponse HttplibTransport::post_json(const std::string& url, const std::string& body,
                                         const HttpHeaders& headers) {
    auto [origin, path] = split_url(url);
    httplib::Client client(origin);
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
    client.set_connection_timeout(secs.count() > 0 ? secs.count() : 1, 0);
    client.set_read_timeout(secs.count() > 0 ? secs.count() : 1, 0);
    client.set_write_timeout(secs.count() > 0 ? secs.count() : 1, 0);

    httplib::Headers hdrs;
    for (const auto& [k, v] : headers) hdrs.emplace(k, v);

    auto res = client.Post(path, hdrs, body, "application/json");
    if (!res)
        throw TransportError("POST " + url + " failed: " + httplib::to_string(res.error()));
    return HttpResponse{res->status, res->body};
}

void ThreadSleeper::sleep_for(std::chrono::milliseconds d) {
    std::this_thread::sleep_for(d);
}

std::chrono::milliseconds backoff_delay(const BackoffPolicy& policy, int retry_number) {
    auto delay = policy.base;
    for (int i = 1; i < retry_number && delay < policy.cap; ++i) delay *= 2;
    return std::min(delay, policy.cap);
}

HttpHeaders bearer_headers_from_env(const char* var) {
    HttpHeaders headers;
    if (const char* key = std::getenv(var); key && *key)
        headers.emplace_back("Authorization", std::string("Bearer ") + key);
    return headers;
}

}  // namespace caer
