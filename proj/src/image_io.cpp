#include "caer/image_io.hpp"

#include <stdexcept>

#pragma GCC diagnostic push
#pragma GCC diagnostic ignored "-Wdeprecated-enum-enum-conversion"
#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>
#pragma GCC diagnostic pop

namespace caer {

namespace {

Image from_bgr(const cv::Mat& bgr, const std::string& what) {
    if (bgr.empty()) throw std::runtime_error("cannot decode image: " + what);
    Image out = Image::blank(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            out.set(x, y, row[x][2], row[x][1], row[x][0]);
        }
    }
    return out;
}

cv::Mat to_bgr(const Image& image) {
    if (image.width <= 0 || image.height <= 0)
        throw std::runtime_error("cannot encode empty image");
    cv::Mat bgr(image.height, image.width, CV_8UC3);
    for (int y = 0; y < image.height; ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < image.width; ++x) {
            const auto* p = image.at(x, y);
            row[x] = cv::Vec3b(p[2], p[1], p[0]);
        }
    }
    return bgr;
}

}  // namespace

Image load_image(const std::string& path) {
    // IMREAD_COLOR forces 3-channel BGR: drops alpha, expands grayscale.
    cv::Mat bgr = cv::imread(path, cv::IMREAD_COLOR);
    return from_bgr(bgr, path);
}

void save_png(const Image& image, const std::string& path) {
    if (!cv::imwrite(path, to_bgr(image)))
        throw std::runtime_error("cannot write PNG: " + path);
}

std::vector<std::uint8_t> encode_png(const Image& image) {
    std::vector<std::uint8_t> buf;
    if (!cv::imencode(".png", to_bgr(image), buf))
        throw std::runtime_error("PNG encoding failed");
    return buf;
}

}  // namespace caer
