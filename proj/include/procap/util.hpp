#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace procap {

// Configuration / usage problems; the CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view content);

std::string to_lower(std::string_view s);
std::string trim(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);

uint64_t fnv1a64(std::string_view data);
std::string fingerprint_hex(std::string_view data);

std::string base64_encode(std::string_view data);
std::string base64_decode(std::string_view data);

} // namespace procap
