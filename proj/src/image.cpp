#include "caer/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace caer {

std::string context_kind_name(ContextKind kind) {
    switch (kind) {
        case ContextKind::person: return "person";
        case ContextKind::scene: return "scene";
        case ContextKind::overall: return "overall";
        case ContextKind::annotated: return "annotated";
    }
    return "overall";
}

void validate_bbox(const Image& image, const BoundingBox& bbox) {
    if (bbox.x_min >= bbox.x_max || bbox.y_min >= bbox.y_max)
        throw std::runtime_error("zero-area bbox");
    if (bbox.x_min < 0 || bbox.y_min < 0 || bbox.x_max > image.width ||
        bbox.y_max > image.height)
        throw std::runtime_error("bbox out of bounds for " + std::to_string(image.width) + "x" +
                                 std::to_string(image.height) + " image");
}

ContextImage crop_person(const Image& image, const BoundingBox& bbox, const SourceId& source) {
    validate_bbox(image, bbox);
    Image out = Image::blank(bbox.width(), bbox.height());
    for (int y = 0; y < out.height; ++y) {
        std::memcpy(out.at(0, y), image.at(bbox.x_min, bbox.y_min + y),
                    static_cast<std::size_t>(out.width) * 3);
    }
    return ContextImage{ContextKind::person, std::move(out), source};
}

ContextImage mask_scene(const Image& image, const BoundingBox& bbox, const SourceId& source) {
    validate_bbox(image, bbox);
    Image out = image;
    for (int y = bbox.y_min; y < bbox.y_max; ++y) {
        std::memset(out.at(bbox.x_min, y), 0, static_cast<std::size_t>(bbox.width()) * 3);
    }
    return ContextImage{ContextKind::scene, std::move(out), source};
}

ContextImage annotate_target(const Image& image, const BoundingBox& bbox,
                             const SourceId& source, int stroke) {
    validate_bbox(image, bbox);
    if (stroke < 1) throw std::runtime_error("stroke must be >= 1");
    Image out = image;
    for (int y = bbox.y_min; y < bbox.y_max; ++y) {
        for (int x = bbox.x_min; x < bbox.x_max; ++x) {
            bool on_band = x < bbox.x_min + stroke || x >= bbox.x_max - stroke ||
                           y < bbox.y_min + stroke || y >= bbox.y_max - stroke;
            if (on_band) out.set(x, y, 255, 0, 0);
        }
    }
    return ContextImage{ContextKind::annotated, std::move(out), source};
}

ContextImage whole_image(const Image& image, const SourceId& source) {
    return ContextImage{ContextKind::overall, image, source};
}

int default_stroke(const Image& image) {
    int base = static_cast<int>(std::lround(0.005 * std::min(image.width, image.height)));
    return std::max(3, base);
}

}  // namespace caer
