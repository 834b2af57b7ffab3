#pragma once

#include <chrono>
#include <memory>
#include <semaphore>
#include <string>

#include "caer/demonstrations.hpp"
#include "caer/http.hpp"
#include "caer/prompt.hpp"

namespace caer {

enum class LvlmKind { http, mock_nearest, mock_canned };

std::string lvlm_kind_name(LvlmKind kind);
LvlmKind lvlm_kind_from_name(const std::string& name);

struct LvlmEndpointConfig {
    LvlmKind kind = LvlmKind::http;
    std::string base_url;
    std::string model_id;
    std::chrono::milliseconds timeout{120000};
    int max_retries = 3;
    int max_parallel = 4;
    double temperature = 0.0;  // greedy decoding by default
    int max_tokens = 512;
    std::string canned_response;  // mock_canned, and the mock_nearest zero-shot fallback
};

struct Completion {
    SourceId query;
    std::string raw_text;  // verbatim, untrimmed
    std::chrono::milliseconds latency{0};
    int attempt_count = 1;
};

class LvlmBackend {
  public:
    virtual ~LvlmBackend() = default;
    virtual Completion complete(const PromptBundle& bundle) = 0;
};

// Chat-completions wire shape: POST <base_url>/chat/completions with
//   {"model":..., "temperature":..., "max_tokens":...,
//    "messages":[{"role":"user","content":[{"type":"text","text":...} |
//      {"type":"image_url","image_url":{"url":"data:image/png;base64,..."}}]}]}
// reading the completion from choices[0].message.content. 429/5xx and
// transport failures retry with 500 ms * 2^(n-1) backoff capped at 8 s; other
// 4xx fail immediately. At most max_parallel requests are in flight at once.
class HttpLvlmClient : public LvlmBackend {
  public:
    explicit HttpLvlmClient(LvlmEndpointConfig config,
                            std::shared_ptr<HttpTransport> transport = nullptr,
                            std::shared_ptr<Sleeper> sleeper = nullptr);

    Completion complete(const PromptBundle& bundle) override;

    static std::string request_body(const LvlmEndpointConfig& config,
                                    const PromptBundle& bundle);

  private:
    LvlmEndpointConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<Sleeper> sleeper_;
    std::counting_semaphore<> in_flight_;
};

// Deterministic test double that answers with the labels of the most similar
// demonstration (the first selected index in the bundle meta), rendered
// exactly as a demonstration answer. Turns the pipeline into 1-NN. Zero-shot
// bundles get the configured fallback string.
class NearestDemoMock : public LvlmBackend {
  public:
    explicit NearestDemoMock(std::shared_ptr<const DemonstrationIndex> index,
                             std::string zero_shot_fallback = "");

    Completion complete(const PromptBundle& bundle) override;

  private:
    std::shared_ptr<const DemonstrationIndex> index_;
    std::string fallback_;
};

// Always answers the same string.
class CannedLvlm : public LvlmBackend {
  public:
    explicit CannedLvlm(std::string response) : response_(std::move(response)) {}
    Completion complete(const PromptBundle& bundle) override;

  private:
    std::string response_;
};

}  // namespace caer
