#include "procap/image.hpp"

#include "procap/util.hpp"

#include <cctype>
#include <stdexcept>

namespace procap {

ImageBuffer make_image(int width, int height, uint8_t r, uint8_t g, uint8_t b) {
    ImageBuffer img;
    img.width = width;
    img.height = height;
    img.pixels.resize(static_cast<size_t>(width) * static_cast<size_t>(height) * 3);
    for (size_t i = 0; i + 2 < img.pixels.size(); i += 3) {
        img.pixels[i] = r;
        img.pixels[i + 1] = g;
        img.pixels[i + 2] = b;
    }
    return img;
}

namespace {

// Reads the next whitespace/comment-delimited header field of a PNM file.
size_t next_field(const std::string& bytes, size_t pos, long& value) {
    while (pos < bytes.size()) {
        unsigned char c = static_cast<unsigned char>(bytes[pos]);
        if (c == '#') {
            while (pos < bytes.size() && bytes[pos] != '\n') {
                ++pos;
            }
        } else if (std::isspace(c)) {
            ++pos;
        } else {
            break;
        }
    }
    if (pos >= bytes.size() || !std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
        throw std::runtime_error("undecodable image: malformed PNM header");
    }
    value = 0;
    while (pos < bytes.size() && std::isdigit(static_cast<unsigned char>(bytes[pos]))) {
        value = value * 10 + (bytes[pos] - '0');
        ++pos;
    }
    return pos;
}

} // namespace

ImageBuffer decode_image(const std::string& bytes) {
    if (bytes.size() < 2 || bytes[0] != 'P' || (bytes[1] != '6' && bytes[1] != '5')) {
        throw std::runtime_error("undecodable image: expected binary PPM (P6) or PGM (P5)");
    }
    bool gray = bytes[1] == '5';
    long width = 0;
    long height = 0;
    long maxval = 0;
    size_t pos = 2;
    pos = next_field(bytes, pos, width);
    pos = next_field(bytes, pos, height);
    pos = next_field(bytes, pos, maxval);
    if (pos >= bytes.size() || !std::isspace(static_cast<unsigned char>(bytes[pos]))) {
        throw std::runtime_error("undecodable image: malformed PNM header");
    }
    ++pos; // single whitespace byte before the raster
    if (width <= 0 || height <= 0) {
        throw std::runtime_error("undecodable image: empty pixel grid");
    }
    if (maxval != 255) {
        throw std::runtime_error("undecodable image: only maxval 255 supported");
    }
    size_t channels = gray ? 1 : 3;
    size_t expected = static_cast<size_t>(width) * static_cast<size_t>(height) * channels;
    if (bytes.size() - pos < expected) {
        throw std::runtime_error("undecodable image: truncated raster");
    }
    ImageBuffer img;
    img.width = static_cast<int>(width);
    img.height = static_cast<int>(height);
    img.pixels.resize(static_cast<size_t>(width) * static_cast<size_t>(height) * 3);
    if (gray) {
        for (size_t i = 0; i < expected; ++i) {
            uint8_t v = static_cast<uint8_t>(bytes[pos + i]);
            img.pixels[i * 3] = v;
            img.pixels[i * 3 + 1] = v;
            img.pixels[i * 3 + 2] = v;
        }
    } else {
        for (size_t i = 0; i < expected; ++i) {
            img.pixels[i] = static_cast<uint8_t>(bytes[pos + i]);
        }
    }
    return img;
}

std::string encode_ppm(const ImageBuffer& image) {
    if (image.empty()) {
        throw std::runtime_error("cannot encode empty image");
    }
    std::string out = "P6\n" + std::to_string(image.width) + " " +
                      std::to_string(image.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(image.pixels.data()), image.pixels.size());
    return out;
}

ImageBuffer load_image(const std::filesystem::path& path) {
    return decode_image(read_file(path));
}

void save_image(const ImageBuffer& image, const std::filesystem::path& path) {
    write_file(path, encode_ppm(image));
}

} // namespace procap
