#include "caer/lvlm.hpp"

#include "json.hpp"

#include <stdexcept>

#include "caer/image_io.hpp"
#include "caer/util.hpp"

namespace caer {

using json = nlohmann::ordered_json;

std::string lvlm_kind_name(LvlmKind kind) {
    switch (kind) {
        case LvlmKind::http: return "http";
        case LvlmKind::mock_nearest: return "mock_nearest_demo";
        case LvlmKind::mock_canned: return "mock_canned";
    }
    throw std::logic_error("unknown LvlmKind");
}

LvlmKind lvlm_kind_from_name(const std::string& name) {
    if (name == "http") return LvlmKind::http;
    if (name == "mock_nearest_demo") return LvlmKind::mock_nearest;
    if (name == "mock_canned") return LvlmKind::mock_canned;
    throw std::runtime_error("unknown lvlm kind '" + name + "'");
}

HttpLvlmClient::HttpLvlmClient(LvlmEndpointConfig config,
                               std::shared_ptr<HttpTransport> transport,
                               std::shared_ptr<Sleeper> sleeper)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport)
                           : std::make_shared<HttplibTransport>(config_.timeout)),
      sleeper_(sleeper ? std::move(sleeper) : std::make_shared<ThreadSleeper>()),
      in_flight_(std::max(1, config_.max_parallel)) {
    if (config_.base_url.empty()) {
        throw std::invalid_argument("lvlm endpoint requires a base_url");
    }
}

std::string HttpLvlmClient::request_body(const LvlmEndpointConfig& config,
                                         const PromptBundle& bundle) {
    json content = json::array();
    for (const auto& segment : bundle.segments) {
        if (segment.kind == PromptSegment::Kind::text) {
            content.push_back({{"type", "text"}, {"text", segment.text}});
        } else {
            std::string data_url =
                "data:image/png;base64," + base64_encode(encode_png(segment.image->image));
            content.push_back(
                {{"type", "image_url"}, {"image_url", {{"url", data_url}}}});
        }
    }
    json body = {
        {"model", config.model_id},
        {"temperature", config.temperature},
        {"max_tokens", config.max_tokens},
        {"messages", json::array({{{"role", "user"}, {"content", content}}})},
    };
    return body.dump();
}

Completion HttpLvlmClient::complete(const PromptBundle& bundle) {
    in_flight_.acquire();
    struct Release {
        std::counting_semaphore<>& sem;
        ~Release() { sem.release(); }
    } release{in_flight_};

    std::string url = config_.base_url + "/chat/completions";
    std::string body = request_body(config_, bundle);
    HttpHeaders headers = bearer_headers_from_env();

    auto started = std::chrono::steady_clock::now();
    int attempts = 0;
    HttpResponse response = retry_with_backoff(
        [&] {
            HttpResponse r = transport_->post_json(url, body, headers);
            if (r.status != 200) {
                throw HttpError(r.status,
                                "lvlm endpoint returned HTTP " + std::to_string(r.status));
            }
            return r;
        },
        config_.max_retries, BackoffPolicy{}, *sleeper_, attempts);
    auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);

    json parsed;
    try {
        parsed = json::parse(response.body);
    } catch (const json::exception& e) {
        throw std::runtime_error("lvlm response is not valid JSON: " +
                                 std::string(e.what()));
    }
    if (!parsed.contains("choices") || !parsed["choices"].is_array() ||
        parsed["choices"].empty()) {
        throw std::runtime_error("lvlm response has no choices");
    }
    const json& message = parsed["choices"][0].value("message", json::object());
    if (!message.contains("content") || !message["content"].is_string()) {
        throw std::runtime_error("lvlm response choice has no message content");
    }

    Completion completion;
    completion.query = bundle.meta.query;
    completion.raw_text = message["content"].get<std::string>();
    completion.latency = elapsed;
    completion.attempt_count = attempts;
    return completion;
}

NearestDemoMock::NearestDemoMock(std::shared_ptr<const DemonstrationIndex> index,
                                 std::string zero_shot_fallback)
    : index_(std::move(index)), fallback_(std::move(zero_shot_fallback)) {
    if (!index_) throw std::invalid_argument("NearestDemoMock requires an index");
}

Completion NearestDemoMock::complete(const PromptBundle& bundle) {
    Completion completion;
    completion.query = bundle.meta.query;
    if (bundle.meta.selected_indices.empty()) {
        completion.raw_text = fallback_;
        return completion;
    }
    size_t nearest = bundle.meta.selected_indices.front();
    if (nearest >= index_->size()) {
        throw std::out_of_range("bundle references demonstration " +
                                std::to_string(nearest) + " but index has " +
                                std::to_string(index_->size()));
    }
    completion.raw_text =
        render_answer(index_->vocabulary, index_->records[nearest].answer_labels());
    return completion;
}

Completion CannedLvlm::complete(const PromptBundle& bundle) {
    Completion completion;
    completion.query = bundle.meta.query;
    completion.raw_text = response_;
    return completion;
}

}  // namespace caer
