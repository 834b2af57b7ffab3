#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "caer/http.hpp"
#include "caer/image.hpp"
#include "caer/types.hpp"

namespace caer {

// Values are held as doubles but quantized to float32 precision at every
// provider boundary, so the JSONL cache (which stores float32) round-trips
// bit-exactly while all similarity arithmetic runs in 64-bit.
struct EmbeddingVector {
    std::vector<double> values;

    std::size_t dim() const { return values.size(); }
    bool operator==(const EmbeddingVector&) const = default;
};

// Casts each value through float. Idempotent.
EmbeddingVector quantize_f32(EmbeddingVector v);

// The (person, scene, overall) triple for one agent.
struct ContextEmbeddings {
    SourceId source;
    EmbeddingVector person;
    EmbeddingVector scene;
    EmbeddingVector overall;

    bool operator==(const ContextEmbeddings&) const = default;
};

enum class EmbeddingProviderKind { http_service, file_cache, hash };

std::string embedding_kind_name(EmbeddingProviderKind kind);
EmbeddingProviderKind embedding_kind_from_name(const std::string& name);

struct EmbeddingProviderConfig {
    EmbeddingProviderKind kind = EmbeddingProviderKind::hash;
    std::string endpoint_url;             // http_service
    std::string cache_path;               // file_cache
    std::size_t declared_dim = 64;
    std::chrono::milliseconds timeout{30000};
    int max_retries = 3;
};

class EmbeddingProvider {
  public:
    virtual ~EmbeddingProvider() = default;
    virtual EmbeddingVector embed(const ContextImage& image) = 0;
    virtual std::size_t declared_dim() const = 0;
};

// POST endpoint_url with {"image_b64": <base64 PNG>}, expects
// {"embedding": [float, ...]} of exactly declared_dim finite values.
// Non-2xx retryable statuses (429/5xx) and transport failures back off
// 500 ms * 2^(n-1), capped at 8 s, up to max_retries retries.
class HttpEmbeddingProvider : public EmbeddingProvider {
  public:
    HttpEmbeddingProvider(EmbeddingProviderConfig config,
                          std::shared_ptr<HttpTransport> transport = nullptr,
                          std::shared_ptr<Sleeper> sleeper = nullptr);

    EmbeddingVector embed(const ContextImage& image) override;
    std::size_t declared_dim() const override { return config_.declared_dim; }

  private:
    EmbeddingProviderConfig config_;
    std::shared_ptr<HttpTransport> transport_;
    std::shared_ptr<Sleeper> sleeper_;
};

// JSONL cache keyed by `<image_id>__<person_id>__<kind>`, one record per
// line: {"key": ..., "dim": int, "values": [float, ...]}. With an upstream
// provider, misses are filled and appended (write-through); without one a
// miss is an error. Readers never block readers; writes are serialized.
class FileCacheProvider : public EmbeddingProvider {
  public:
    FileCacheProvider(std::string cache_path, std::size_t declared_dim,
                      std::shared_ptr<EmbeddingProvider> upstream = nullptr);

    EmbeddingVector embed(const ContextImage& image) override;
    std::size_t declared_dim() const override { return declared_dim_; }

    bool contains(const std::string& key) const;
    std::size_t size() const;

  private:
    void load();
    void append(const std::string& key, const EmbeddingVector& v);

    std::string cache_path_;
    std::size_t declared_dim_;
    std::shared_ptr<EmbeddingProvider> upstream_;
    std::map<std::string, EmbeddingVector> entries_;
    mutable std::shared_mutex mutex_;
};

// Deterministic stand-in for a real encoder: the vector is a pure function
// of the pixel bytes (FNV-1a seeded mt19937_64, values in [-1, 1]).
class HashEmbeddingProvider : public EmbeddingProvider {
  public:
    explicit HashEmbeddingProvider(std::size_t dim) : dim_(dim) {}

    EmbeddingVector embed(const ContextImage& image) override;
    std::size_t declared_dim() const override { return dim_; }

  private:
    std::size_t dim_;
};

std::shared_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config);

// Embeds crop_person, mask_scene and the unmodified image for one agent.
// Exactly three embed calls; the image is decoded once.
ContextEmbeddings embed_agent(EmbeddingProvider& provider, const AnnotatedPerson& person);

// Same, for callers that already decoded the image.
ContextEmbeddings embed_agent(EmbeddingProvider& provider, const AnnotatedPerson& person,
                              const Image& image);

}  // namespace caer
