#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "caer/embedding.hpp"
#include "caer/http.hpp"

namespace caer::testing {

// Fresh directory under the test binary's cwd; wiped on construction so a
// crashed run never leaks stale state into the next one.
class TempDir {
  public:
    explicit TempDir(const std::string& name) : path_(std::filesystem::path("tmp") / name) {
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }

    const std::filesystem::path& path() const { return path_; }
    std::string str(const std::string& child = "") const {
        return child.empty() ? path_.string() : (path_ / child).string();
    }

  private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + path);
}

// Plays back a scripted response sequence and records every request.
class ScriptedTransport : public HttpTransport {
  public:
    struct Step {
        bool transport_error = false;
        HttpResponse response;
    };

    struct Request {
        std::string url;
        std::string body;
        HttpHeaders headers;
    };

    void push_response(int status, std::string body) {
        steps_.push_back({false, {status, std::move(body)}});
    }
    void push_transport_error() { steps_.push_back({true, {}}); }

    HttpResponse post_json(const std::string& url, const std::string& body,
                           const HttpHeaders& headers) override {
        std::lock_guard lock(mutex_);
        requests_.push_back({url, body, headers});
        if (requests_.size() > steps_.size()) {
            throw std::logic_error("ScriptedTransport ran out of steps");
        }
        const Step& step = steps_[requests_.size() - 1];
        if (step.transport_error) throw TransportError("scripted transport failure");
        return step.response;
    }

    const std::vector<Request>& requests() const { return requests_; }

  private:
    std::vector<Step> steps_;
    std::vector<Request> requests_;
    std::mutex mutex_;
};

class RecordingSleeper : public Sleeper {
  public:
    void sleep_for(std::chrono::milliseconds d) override { delays.push_back(d); }
    std::vector<std::chrono::milliseconds> delays;
};

// Counts embed calls on the way through to an inner provider.
class CountingProvider : public EmbeddingProvider {
  public:
    explicit CountingProvider(std::shared_ptr<EmbeddingProvider> inner)
        : inner_(std::move(inner)) {}

    EmbeddingVector embed(const ContextImage& image) override {
        calls.fetch_add(1);
        return inner_->embed(image);
    }
    std::size_t declared_dim() const override { return inner_->declared_dim(); }

    std::atomic<std::size_t> calls{0};

  private:
    std::shared_ptr<EmbeddingProvider> inner_;
};

}  // namespace caer::testing
