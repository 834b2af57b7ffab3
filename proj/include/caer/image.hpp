#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caer/types.hpp"

namespace caer {

// Interleaved RGB8, row-major, origin top-left.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    bool operator==(const Image&) const = default;

    static Image blank(int width, int height) {
        return Image{width, height,
                     std::vector<std::uint8_t>(static_cast<std::size_t>(width) * height * 3, 0)};
    }

    std::size_t offset(int x, int y) const {
        return (static_cast<std::size_t>(y) * width + x) * 3;
    }
    const std::uint8_t* at(int x, int y) const { return pixels.data() + offset(x, y); }
    std::uint8_t* at(int x, int y) { return pixels.data() + offset(x, y); }
    void set(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
        auto* p = at(x, y);
        p[0] = r; p[1] = g; p[2] = b;
    }
};

enum class ContextKind { person, scene, overall, annotated };

std::string context_kind_name(ContextKind kind);

struct ContextImage {
    ContextKind kind = ContextKind::overall;
    Image image;
    SourceId source;

    // `<image_id>__<person_id>__<kind>`; names cache entries and PNG dumps.
    std::string cache_key() const { return source.str() + "__" + context_kind_name(kind); }
};

// Throws std::runtime_error on an out-of-bounds or zero-area bbox.
void validate_bbox(const Image& image, const BoundingBox& bbox);

// Person context: the bbox region copied out. Output pixel (i, j) equals
// input pixel (x_min + i, y_min + j).
ContextImage crop_person(const Image& image, const BoundingBox& bbox, const SourceId& source);

// Scene context: source-sized image with the bbox region filled black and
// everything else untouched.
ContextImage mask_scene(const Image& image, const BoundingBox& bbox, const SourceId& source);

// Full image with a pure-red rectangle outline drawn `stroke` pixels deep
// inward from the bbox boundary (clamped to the bbox, so a wide stroke fills
// the whole region).
ContextImage annotate_target(const Image& image, const BoundingBox& bbox,
                             const SourceId& source, int stroke);

ContextImage whole_image(const Image& image, const SourceId& source);

// max(3, round(0.005 * min(width, height))) — visible at thumbnail and full scale.
int default_stroke(const Image& image);

}  // namespace caer
