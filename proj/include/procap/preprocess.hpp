#pragma once

#include "procap/image.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace procap {

struct TextRegion {
    int x = 0;
    int y = 0;
    int width = 0;
    int height = 0;
    std::string detected_text;
    double confidence = 1.0;
};

// Text detector behind an interface so the pipeline runs without any OCR
// engine installed; the fixture implementation replays regions recorded in a
// sidecar file.
class OcrBackend {
public:
    virtual ~OcrBackend() = default;
    virtual std::vector<TextRegion> detect(const ImageBuffer& image,
                                           const std::string& image_id) = 0;
};

// Sidecar format: one JSON object mapping image id to a list of
// {bbox: [x, y, w, h], text, confidence}.
class FixtureOcr : public OcrBackend {
public:
    explicit FixtureOcr(const std::filesystem::path& sidecar_path);
    std::vector<TextRegion> detect(const ImageBuffer& image,
                                   const std::string& image_id) override;

private:
    std::map<std::string, std::vector<TextRegion>> regions_;
};

enum class FillStrategy {
    median_ring,  // per-channel median of a 4px ring around each bbox
    median_image, // per-channel median of the whole input image
};

FillStrategy parse_fill_strategy(const std::string& name);

// Runs the OCR backend and returns validated regions ordered top-to-bottom,
// left-to-right. Throws on an empty image, on out-of-bounds boxes and on
// confidences outside [0, 1].
std::vector<TextRegion> detect_text_regions(const ImageBuffer& image,
                                            const std::string& image_id,
                                            OcrBackend& backend);

// Replaces the pixels inside each region with the configured fill color.
// Ring samples come from the input image; when a ring is empty (the bbox
// covers the whole image) the fill falls back to the whole-image median.
// Pixels outside every bbox are left untouched. Median of an even count is
// the lower middle element.
ImageBuffer inpaint(const ImageBuffer& image, const std::vector<TextRegion>& regions,
                    FillStrategy strategy = FillStrategy::median_ring);

} // namespace procap
