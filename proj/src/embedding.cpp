#include "caer/embedding.hpp"

#include <cmath>
#include <fstream>
#include <mutex>
#include <random>

#include "json.hpp"

#include "caer/image_io.hpp"
#include "caer/util.hpp"

namespace caer {

using nlohmann::json;

EmbeddingVector quantize_f32(EmbeddingVector v) {
    for (double& x : v.values) x = static_cast<double>(static_cast<float>(x));
    return v;
}

std::string embedding_kind_name(EmbeddingProviderKind kind) {
    switch (kind) {
        case EmbeddingProviderKind::http_service: return "http_service";
        case EmbeddingProviderKind::file_cache: return "file_cache";
        case EmbeddingProviderKind::hash: return "hash";
    }
    throw std::logic_error("unknown EmbeddingProviderKind");
}

EmbeddingProviderKind embedding_kind_from_name(const std::string& name) {
    if (name == "http_service") return EmbeddingProviderKind::http_service;
    if (name == "file_cache") return EmbeddingProviderKind::file_cache;
    if (name == "hash") return EmbeddingProviderKind::hash;
    throw std::runtime_error("unknown embedding provider kind '" + name + "'");
}

namespace {

void check_vector(const EmbeddingVector& v, std::size_t declared_dim, const std::string& who) {
    if (v.dim() != declared_dim)
        throw std::runtime_error(who + ": dimension mismatch, got " + std::to_string(v.dim()) +
                                 ", declared " + std::to_string(declared_dim));
    for (double x : v.values)
        if (!std::isfinite(x)) throw std::runtime_error(who + ": non-finite embedding value");
}

}  // namespace

HttpEmbeddingProvider::HttpEmbeddingProvider(EmbeddingProviderConfig config,
                                             std::shared_ptr<HttpTransport> transport,
                                             std::shared_ptr<Sleeper> sleeper)
    : config_(std::move(config)),
      transport_(transport ? std::move(transport)
                           : std::make_shared<HttplibTransport>(config_.timeout)),
      sleeper_(sleeper ? std::move(sleeper) : std::make_shared<ThreadSleeper>()) {
    if (config_.endpoint_url.empty())
        throw std::runtime_error("http_service embedding provider requires endpoint_url");
}

EmbeddingVector HttpEmbeddingProvider::embed(const ContextImage& image) {
    json request;
    request["image_b64"] = base64_encode(encode_png(image.image));
    const std::string body = request.dump();
    const HttpHeaders headers = bearer_headers_from_env();

    int attempts = 0;
    HttpResponse response = retry_with_backoff(
        [&] {
            HttpResponse r = transport_->post_json(config_.endpoint_url, body, headers);
            if (r.status != 200)
                throw HttpError(r.status, "embedding service returned HTTP " +
                                              std::to_string(r.status));
            return r;
        },
        config_.max_retries, BackoffPolicy{}, *sleeper_, attempts);

    json parsed;
    try {
        parsed = json::parse(response.body);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(std::string("embedding service sent invalid JSON: ") + e.what());
    }
    if (!parsed.contains("embedding") || !parsed["embedding"].is_array())
        throw std::runtime_error("embedding service response lacks 'embedding' array");
    EmbeddingVector v;
    v.values = parsed["embedding"].get<std::vector<double>>();
    check_vector(v, config_.declared_dim, "embedding service");
    return quantize_f32(std::move(v));
}

FileCacheProvider::FileCacheProvider(std::string cache_path, std::size_t declared_dim,
                                     std::shared_ptr<EmbeddingProvider> upstream)
    : cache_path_(std::move(cache_path)), declared_dim_(declared_dim),
      upstream_(std::move(upstream)) {
    if (cache_path_.empty())
        throw std::runtime_error("file_cache embedding provider requires cache_path");
    if (upstream_ && upstream_->declared_dim() != declared_dim_)
        throw std::runtime_error("cache/upstream dimension mismatch");
    load();
}

void FileCacheProvider::load() {
    std::ifstream in(cache_path_);
    if (!in) return;  // cold cache
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw std::runtime_error(cache_path_ + ":" + std::to_string(line_no) +
                                     ": invalid cache record: " + e.what());
        }
        EmbeddingVector v;
        v.values = rec.at("values").get<std::vector<double>>();
        if (rec.at("dim").get<std::size_t>() != v.dim() || v.dim() != declared_dim_)
            throw std::runtime_error(cache_path_ + ":" + std::to_string(line_no) +
                                     ": cache record dimension mismatch");
        entries_[rec.at("key").get<std::string>()] = quantize_f32(std::move(v));
    }
}

void FileCacheProvider::append(const std::string& key, const EmbeddingVector& v) {
    std::ofstream out(cache_path_, std::ios::app);
    if (!out) throw std::runtime_error("cannot append to cache file: " + cache_path_);
    json rec;
    rec["key"] = key;
    rec["dim"] = v.dim();
    rec["values"] = v.values;
    out << rec.dump() << "\n";
}

EmbeddingVector FileCacheProvider::embed(const ContextImage& image) {
    const std::string key = image.cache_key();
    {
        std::shared_lock lock(mutex_);
        auto it = entries_.find(key);
        if (it != entries_.end()) return it->second;
    }
    if (!upstream_)
        throw std::runtime_error("embedding cache miss for key '" + key +
                                 "' in read-only cache mode");
    EmbeddingVector v = upstream_->embed(image);
    check_vector(v, declared_dim_, "upstream provider");
    std::unique_lock lock(mutex_);
    auto [it, inserted] = entries_.emplace(key, std::move(v));
    if (inserted) append(key, it->second);
    return it->second;
}

bool FileCacheProvider::contains(const std::string& key) const {
    std::shared_lock lock(mutex_);
    return entries_.count(key) > 0;
}

std::size_t FileCacheProvider::size() const {
    std::shared_lock lock(mutex_);
    return entries_.size();
}

EmbeddingVector HashEmbeddingProvider::embed(const ContextImage& image) {
    std::uint64_t h = fnv1a64(image.image.pixels.data(), image.image.pixels.size());
    h = fnv1a64(&image.image.width, sizeof(image.image.width), h);
    h = fnv1a64(&image.image.height, sizeof(image.image.height), h);
    std::mt19937_64 rng(h);
    EmbeddingVector v;
    v.values.reserve(dim_);
    for (std::size_t i = 0; i < dim_; ++i) {
        // 53-bit mantissa draw mapped to [-1, 1]
        double u = static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
        v.values.push_back(2.0 * u - 1.0);
    }
    return quantize_f32(std::move(v));
}

std::shared_ptr<EmbeddingProvider> make_provider(const EmbeddingProviderConfig& config) {
    switch (config.kind) {
        case EmbeddingProviderKind::http_service: {
            auto http = std::make_shared<HttpEmbeddingProvider>(config);
            if (!config.cache_path.empty())
                return std::make_shared<FileCacheProvider>(config.cache_path,
                                                           config.declared_dim, http);
            return http;
        }
        case EmbeddingProviderKind::file_cache:
            return std::make_shared<FileCacheProvider>(config.cache_path, config.declared_dim);
        case EmbeddingProviderKind::hash: {
            auto hash = std::make_shared<HashEmbeddingProvider>(config.declared_dim);
            if (!config.cache_path.empty())
                return std::make_shared<FileCacheProvider>(config.cache_path,
                                                           config.declared_dim, hash);
            return hash;
        }
    }
    throw std::runtime_error("unknown embedding provider kind");
}

ContextEmbeddings embed_agent(EmbeddingProvider& provider, const AnnotatedPerson& person) {
    return embed_agent(provider, person, load_image(person.image_path));
}

ContextEmbeddings embed_agent(EmbeddingProvider& provider, const AnnotatedPerson& person,
                              const Image& image) {
    const SourceId source = person.source();
    ContextEmbeddings out;
    out.source = source;
    out.person = provider.embed(crop_person(image, person.bbox, source));
    out.scene = provider.embed(mask_scene(image, person.bbox, source));
    out.overall = provider.embed(whole_image(image, source));
    return out;
}

}  // namespace caer
