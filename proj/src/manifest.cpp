#include "mgtdetect/manifest.hpp"

#include <algorithm>
#include <array>
#include <fstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "mgtdetect/error.hpp"

namespace mgtdetect {

namespace {

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new()) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw Error("SHA-256 unavailable");
    }
    ~Sha256() { EVP_MD_CTX_free(ctx_); }
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(const void* data, std::size_t n) { EVP_DigestUpdate(ctx_, data, n); }

    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_, md.data(), &len);
        static constexpr char kHex[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out += kHex[md[i] >> 4];
            out += kHex[md[i] & 15];
        }
        return out;
    }

private:
    EVP_MD_CTX* ctx_;
};

void hash_file_into(Sha256& h, const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    Sha256 h;
    h.update(bytes.data(), bytes.size());
    return h.hex();
}

std::string sha256_file(const std::filesystem::path& path) {
    Sha256 h;
    if (std::filesystem::is_directory(path)) {
        std::vector<std::filesystem::path> files;
        for (const auto& e : std::filesystem::recursive_directory_iterator(path))
            if (e.is_regular_file()) files.push_back(e.path());
        std::sort(files.begin(), files.end());
        for (const auto& f : files) {
            const auto rel = std::filesystem::relative(f, path).generic_string();
            h.update(rel.data(), rel.size() + 1);
            hash_file_into(h, f);
        }
    } else {
        hash_file_into(h, path);
    }
    return h.hex();
}

void Manifest::add_input(const std::filesystem::path& path) { inputs[path.string()] = sha256_file(path); }
void Manifest::add_output(const std::filesystem::path& path) { outputs[path.string()] = sha256_file(path); }

std::string Manifest::to_json() const {
    nlohmann::ordered_json j;
    j["command"] = command;
    j["version"] = kVersion;
    j["seed"] = seed;
    j["parameters"] = parameters;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    return j.dump(2) + "\n";
}

std::filesystem::path Manifest::write(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    const auto path = dir / ("manifest." + command + ".json");
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << to_json();
    return path;
}

}  // namespace mgtdetect
