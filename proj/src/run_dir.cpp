#include "procap/run_dir.hpp"

namespace procap {

RunDirectory::RunDirectory(std::filesystem::path root) : root_(std::move(root)) {
    if (root_.empty()) {
        throw ConfigError("run directory path is empty");
    }
}

void RunDirectory::ensure_layout() const {
    std::filesystem::create_directories(images_dir());
    std::filesystem::create_directories(captions_dir());
    std::filesystem::create_directories(checkpoints_dir());
    std::filesystem::create_directories(reports_dir());
}

void RunDirectory::write_snapshot(const RunConfig& config) const {
    ensure_layout();
    write_file(config_snapshot(), config.to_json());
}

} // namespace procap
