#pragma once

#include "procap/dataset.hpp"
#include "procap/image.hpp"
#include "procap/preprocess.hpp"
#include "procap/rng.hpp"
#include "procap/util.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <unistd.h>

namespace procap::testing {

// Unique scratch directory removed on scope exit.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::atomic<uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("procap_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }
    std::filesystem::path file(const std::string& name) const { return path_ / name; }

private:
    std::filesystem::path path_;
};

inline MemeRecord make_record(const std::string& id, const std::string& text,
                              Label label, Split split = Split::train) {
    MemeRecord rec;
    rec.id = id;
    rec.image_ref = id + ".ppm";
    rec.text = text;
    rec.label = label;
    rec.split = split;
    return rec;
}

// Light 48x32 image with one dark "word" block at (8, 8) size 16x6.
inline ImageBuffer make_image_with_word() {
    ImageBuffer img = make_image(48, 32, 240, 240, 240);
    for (int y = 8; y < 14; ++y) {
        for (int x = 8; x < 24; ++x) {
            img.at(x, y, 0) = 10;
            img.at(x, y, 1) = 10;
            img.at(x, y, 2) = 10;
        }
    }
    return img;
}

// Draws a filled dark rectangle ("a word") onto a light image.
inline void draw_block(ImageBuffer& image, int x, int y, int w, int h) {
    for (int yy = y; yy < y + h; ++yy) {
        for (int xx = x; xx < x + w; ++xx) {
            image.at(xx, yy, 0) = 10;
            image.at(xx, yy, 1) = 10;
            image.at(xx, yy, 2) = 10;
        }
    }
}

// Pixel-driven OCR stand-in: reports each maximal run of dark rows/columns
// as one region via connected-component bounding boxes; the detected text
// length grows with the region width. Good enough to exercise the
// detect -> inpaint -> detect loop on synthetic images.
class ToyPixelOcr : public OcrBackend {
public:
    std::vector<TextRegion> detect(const ImageBuffer& image, const std::string&) override {
        std::vector<std::vector<bool>> dark(static_cast<size_t>(image.height),
                                            std::vector<bool>(static_cast<size_t>(image.width)));
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                int sum = image.at(x, y, 0) + image.at(x, y, 1) + image.at(x, y, 2);
                dark[static_cast<size_t>(y)][static_cast<size_t>(x)] = sum < 200;
            }
        }
        std::vector<std::vector<bool>> seen = dark;
        for (auto& row : seen) {
            row.assign(row.size(), false);
        }
        std::vector<TextRegion> regions;
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                if (!dark[static_cast<size_t>(y)][static_cast<size_t>(x)] ||
                    seen[static_cast<size_t>(y)][static_cast<size_t>(x)]) {
                    continue;
                }
                // flood fill
                int min_x = x, max_x = x, min_y = y, max_y = y;
                std::vector<std::pair<int, int>> stack{{x, y}};
                seen[static_cast<size_t>(y)][static_cast<size_t>(x)] = true;
                while (!stack.empty()) {
                    auto [cx, cy] = stack.back();
                    stack.pop_back();
                    min_x = std::min(min_x, cx);
                    max_x = std::max(max_x, cx);
                    min_y = std::min(min_y, cy);
                    max_y = std::max(max_y, cy);
                    const int dx[4] = {1, -1, 0, 0};
                    const int dy[4] = {0, 0, 1, -1};
                    for (int k = 0; k < 4; ++k) {
                        int nx = cx + dx[k];
                        int ny = cy + dy[k];
                        if (nx < 0 || ny < 0 || nx >= image.width || ny >= image.height) {
                            continue;
                        }
                        if (dark[static_cast<size_t>(ny)][static_cast<size_t>(nx)] &&
                            !seen[static_cast<size_t>(ny)][static_cast<size_t>(nx)]) {
                            seen[static_cast<size_t>(ny)][static_cast<size_t>(nx)] = true;
                            stack.emplace_back(nx, ny);
                        }
                    }
                }
                TextRegion region;
                region.x = min_x;
                region.y = min_y;
                region.width = max_x - min_x + 1;
                region.height = max_y - min_y + 1;
                region.detected_text = std::string(
                    static_cast<size_t>(std::max(1, region.width / 4)), 'x');
                region.confidence = 1.0;
                regions.push_back(region);
            }
        }
        return regions;
    }
};

inline double region_iou(const TextRegion& a, const TextRegion& b) {
    int x0 = std::max(a.x, b.x);
    int y0 = std::max(a.y, b.y);
    int x1 = std::min(a.x + a.width, b.x + b.width);
    int y1 = std::min(a.y + a.height, b.y + b.height);
    double inter = std::max(0, x1 - x0) * static_cast<double>(std::max(0, y1 - y0));
    double uni = static_cast<double>(a.width) * a.height +
                 static_cast<double>(b.width) * b.height - inter;
    return uni <= 0 ? 0.0 : inter / uni;
}

// Random lowercase word of 2-8 letters.
inline std::string random_word(Rng& rng) {
    size_t len = 2 + rng.next_below(7);
    std::string word;
    for (size_t i = 0; i < len; ++i) {
        word.push_back(static_cast<char>('a' + rng.next_below(26)));
    }
    return word;
}

inline std::string random_sentence(Rng& rng, size_t min_words, size_t max_words) {
    size_t n = min_words + rng.next_below(max_words - min_words + 1);
    std::string out;
    for (size_t i = 0; i < n; ++i) {
        if (i > 0) {
            out.push_back(' ');
        }
        out += random_word(rng);
    }
    return out;
}

} // namespace procap::testing
