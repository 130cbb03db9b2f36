#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace procap {

// Interleaved 8-bit RGB pixel grid. Storage format on disk is binary PPM
// (P6); grayscale PGM (P5) reads are expanded to RGB.
struct ImageBuffer {
    int width = 0;
    int height = 0;
    std::vector<uint8_t> pixels; // width * height * 3

    bool empty() const { return width <= 0 || height <= 0; }

    uint8_t& at(int x, int y, int channel) {
        return pixels[(static_cast<size_t>(y) * static_cast<size_t>(width) +
                       static_cast<size_t>(x)) * 3 + static_cast<size_t>(channel)];
    }
    uint8_t at(int x, int y, int channel) const {
        return pixels[(static_cast<size_t>(y) * static_cast<size_t>(width) +
                       static_cast<size_t>(x)) * 3 + static_cast<size_t>(channel)];
    }

    bool operator==(const ImageBuffer&) const = default;
};

ImageBuffer make_image(int width, int height, uint8_t r, uint8_t g, uint8_t b);

ImageBuffer decode_image(const std::string& bytes);
std::string encode_ppm(const ImageBuffer& image);

ImageBuffer load_image(const std::filesystem::path& path);
void save_image(const ImageBuffer& image, const std::filesystem::path& path);

} // namespace procap
