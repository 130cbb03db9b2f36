#include "procap/preprocess.hpp"

#include "procap/util.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

#include "json.hpp"

namespace procap {

using json = nlohmann::json;

FixtureOcr::FixtureOcr(const std::filesystem::path& sidecar_path) {
    json doc = json::parse(read_file(sidecar_path));
    if (!doc.is_object()) {
        throw std::runtime_error("OCR sidecar must be a JSON object keyed by image id");
    }
    for (const auto& [id, entries] : doc.items()) {
        std::vector<TextRegion> regions;
        for (const auto& entry : entries) {
            TextRegion region;
            const auto& bbox = entry.at("bbox");
            region.x = bbox.at(0).get<int>();
            region.y = bbox.at(1).get<int>();
            region.width = bbox.at(2).get<int>();
            region.height = bbox.at(3).get<int>();
            region.detected_text = entry.at("text").get<std::string>();
            region.confidence = entry.value("confidence", 1.0);
            regions.push_back(std::move(region));
        }
        regions_[id] = std::move(regions);
    }
}

std::vector<TextRegion> FixtureOcr::detect(const ImageBuffer&, const std::string& image_id) {
    auto it = regions_.find(image_id);
    if (it == regions_.end()) {
        return {};
    }
    return it->second;
}

FillStrategy parse_fill_strategy(const std::string& name) {
    if (name == "median-ring") {
        return FillStrategy::median_ring;
    }
    if (name == "median-image") {
        return FillStrategy::median_image;
    }
    throw ConfigError("unknown fill strategy: " + name);
}

namespace {

bool region_in_bounds(const TextRegion& r, const ImageBuffer& image) {
    return r.width > 0 && r.height > 0 && r.x >= 0 && r.y >= 0 &&
           r.x + r.width <= image.width && r.y + r.height <= image.height;
}

bool region_contains(const TextRegion& r, int x, int y) {
    return x >= r.x && x < r.x + r.width && y >= r.y && y < r.y + r.height;
}

uint8_t lower_median(std::vector<uint8_t>& values) {
    size_t mid = (values.size() - 1) / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<ptrdiff_t>(mid),
                     values.end());
    return values[mid];
}

std::array<uint8_t, 3> image_median(const ImageBuffer& image) {
    std::array<uint8_t, 3> fill{};
    std::vector<uint8_t> channel;
    channel.reserve(static_cast<size_t>(image.width) * static_cast<size_t>(image.height));
    for (int c = 0; c < 3; ++c) {
        channel.clear();
        for (int y = 0; y < image.height; ++y) {
            for (int x = 0; x < image.width; ++x) {
                channel.push_back(image.at(x, y, c));
            }
        }
        fill[static_cast<size_t>(c)] = lower_median(channel);
    }
    return fill;
}

std::array<uint8_t, 3> ring_median(const ImageBuffer& image, const TextRegion& region) {
    constexpr int ring = 4;
    int x0 = std::max(0, region.x - ring);
    int y0 = std::max(0, region.y - ring);
    int x1 = std::min(image.width, region.x + region.width + ring);
    int y1 = std::min(image.height, region.y + region.height + ring);
    std::array<std::vector<uint8_t>, 3> samples;
    for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
            if (region_contains(region, x, y)) {
                continue;
            }
            for (int c = 0; c < 3; ++c) {
                samples[static_cast<size_t>(c)].push_back(image.at(x, y, c));
            }
        }
    }
    if (samples[0].empty()) {
        return image_median(image);
    }
    std::array<uint8_t, 3> fill{};
    for (int c = 0; c < 3; ++c) {
        fill[static_cast<size_t>(c)] = lower_median(samples[static_cast<size_t>(c)]);
    }
    return fill;
}

} // namespace

std::vector<TextRegion> detect_text_regions(const ImageBuffer& image,
                                            const std::string& image_id,
                                            OcrBackend& backend) {
    if (image.empty()) {
        throw std::runtime_error("undecodable image: empty pixel grid for '" + image_id + "'");
    }
    std::vector<TextRegion> regions = backend.detect(image, image_id);
    for (const TextRegion& r : regions) {
        if (!region_in_bounds(r, image)) {
            throw std::runtime_error("OCR region out of bounds for '" + image_id + "'");
        }
        if (r.confidence < 0.0 || r.confidence > 1.0) {
            throw std::runtime_error("OCR confidence outside [0,1] for '" + image_id + "'");
        }
    }
    std::stable_sort(regions.begin(), regions.end(),
                     [](const TextRegion& a, const TextRegion& b) {
                         if (a.y != b.y) {
                             return a.y < b.y;
                         }
                         return a.x < b.x;
                     });
    return regions;
}

ImageBuffer inpaint(const ImageBuffer& image, const std::vector<TextRegion>& regions,
                    FillStrategy strategy) {
    for (const TextRegion& r : regions) {
        if (!region_in_bounds(r, image)) {
            throw std::runtime_error("inpaint region out of bounds");
        }
    }
    ImageBuffer out = image;
    for (const TextRegion& r : regions) {
        std::array<uint8_t, 3> fill = strategy == FillStrategy::median_image
                                          ? image_median(image)
                                          : ring_median(image, r);
        for (int y = r.y; y < r.y + r.height; ++y) {
            for (int x = r.x; x < r.x + r.width; ++x) {
                for (int c = 0; c < 3; ++c) {
                    out.at(x, y, c) = fill[static_cast<size_t>(c)];
                }
            }
        }
    }
    return out;
}

} // namespace procap
