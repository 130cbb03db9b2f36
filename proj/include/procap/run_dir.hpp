#pragma once

#include "procap/run_config.hpp"

#include <filesystem>

namespace procap {

// Layout of one run's on-disk artifacts. Every subcommand writes exclusively
// under its run directory; the resolved config snapshot lands there before
// any work starts.
class RunDirectory {
public:
    explicit RunDirectory(std::filesystem::path root);

    const std::filesystem::path& root() const { return root_; }
    std::filesystem::path images_dir() const { return root_ / "images"; }
    std::filesystem::path captions_dir() const { return root_ / "captions"; }
    std::filesystem::path checkpoints_dir() const { return root_ / "checkpoints"; }
    std::filesystem::path reports_dir() const { return root_ / "reports"; }
    std::filesystem::path config_snapshot() const { return root_ / "config.json"; }

    void ensure_layout() const;
    void write_snapshot(const RunConfig& config) const;

private:
    std::filesystem::path root_;
};

} // namespace procap
