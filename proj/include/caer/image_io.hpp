#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "caer/image.hpp"

namespace caer {

// Decodes PNG or JPEG to RGB8; alpha is dropped, grayscale expanded.
Image load_image(const std::string& path);

void save_png(const Image& image, const std::string& path);

// PNG bytes in memory, for base64 transport payloads.
std::vector<std::uint8_t> encode_png(const Image& image);

}  // namespace caer
