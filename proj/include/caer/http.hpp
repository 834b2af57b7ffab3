#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace caer {

struct HttpResponse {
    int status = 0;
    std::string body;
};

// Connection-level failure (refused, reset, timed out); always retryable.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

using HttpHeaders = std::vector<std::pair<std::string, std::string>>;

class HttpTransport {
  public:
    virtual ~HttpTransport() = default;
    virtual HttpResponse post_json(const std::string& url, const std::string& body,
                                   const HttpHeaders& headers = {}) = 0;
};

// cpp-httplib backed transport. `url` must be `http(s)://host[:port][/path]`.
class HttplibTransport : public HttpTransport {
  public:
    explicit HttplibTransport(std::chrono::milliseconds timeout);
    HttpResponse post_json(const std::string& url, const std::string& body,
                           const HttpHeaders& headers) override;

  private:
    std::chrono::milliseconds timeout_;
};

// Injectable so tests can assert the backoff schedule without waiting.
class Sleeper {
  public:
    virtual ~Sleeper() = default;
    virtual void sleep_for(std::chrono::milliseconds d) = 0;
};

class ThreadSleeper : public Sleeper {
  public:
    void sleep_for(std::chrono::milliseconds d) override;
};

// delay(n) = base * 2^(n-1), capped. n is the 1-based retry number.
struct BackoffPolicy {
    std::chrono::milliseconds base{500};
    std::chrono::milliseconds cap{8000};
};

std::chrono::milliseconds backoff_delay(const BackoffPolicy& policy, int retry_number);

inline bool retryable_status(int status) {
    return status == 429 || (status >= 500 && status < 600);
}

// `Authorization: Bearer <key>` when the env var is set, else empty.
HttpHeaders bearer_headers_from_env(const char* var = "CAER_ICL_API_KEY");

struct HttpError : std::runtime_error {
    int status;
    HttpError(int status, const std::string& what)
        : std::runtime_error(what), status(status) {}
};

// Runs `attempt` up to max_retries + 1 times, sleeping the backoff schedule
// between tries on TransportError or a retryable HttpError. Sets
// attempt_count to the number of attempts actually made.
template <typename F>
auto retry_with_backoff(F&& attempt, int max_retries, const BackoffPolicy& policy,
                        Sleeper& sleeper, int& attempt_count) {
    for (int n = 1;; ++n) {
        attempt_count = n;
        try {
            return attempt();
        } catch (const TransportError&) {
            if (n > max_retries) throw;
        } catch (const HttpError& e) {
            if (!retryable_status(e.status) || n > max_retries) throw;
        }
        sleeper.sleep_for(backoff_delay(policy, n));
    }
}

}  // namespace caer
