#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mgtdetect {

inline constexpr const char* kVersion = "0.1.0";

std::string sha256_hex(std::string_view bytes);
// Hex digest of a file's contents; a directory hashes its regular files in path order.
std::string sha256_file(const std::filesystem::path& path);

// Provenance record written next to every command's outputs.
struct Manifest {
    explicit Manifest(std::string cmd) : command(std::move(cmd)) {}

    std::string command;
    std::uint64_t seed = 0;
    std::map<std::string, std::string> parameters;
    std::map<std::string, std::string> inputs;   // path -> sha256
    std::map<std::string, std::string> outputs;  // path -> sha256

    void add_input(const std::filesystem::path& path);
    void add_output(const std::filesystem::path& path);
    std::string to_json() const;
    // Writes <dir>/manifest.<command>.json.
    std::filesystem::path write(const std::filesystem::path& dir) const;
};

}  // namespace mgtdetect
