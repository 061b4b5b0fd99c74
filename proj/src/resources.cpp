#include "mgtdetect/resources.hpp"

#include <cstdlib>
#include <fstream>
#include <mutex>

#include "mgtdetect/error.hpp"
#include "mgtdetect/text_util.hpp"

#ifndef MGTDETECT_RESOURCE_DIR
#define MGTDETECT_RESOURCE_DIR "resources"
#endif

namespace mgtdetect {

namespace {

std::ifstream open_resource(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("missing resource file " + path.string());
    return in;
}

}  // namespace

WordSet load_word_list(const std::filesystem::path& path) {
    auto in = open_resource(path);
    WordSet words;
    std::string line;
    while (std::getline(in, line)) {
        auto w = trim(line);
        if (w.empty() || w.front() == '#') continue;
        words.insert(to_lower_ascii(w));
    }
    return words;
}

Resources Resources::load(const std::filesystem::path& dir) {
    Resources r;
    r.stopwords = load_word_list(dir / "stopwords_en.txt");
    r.easy_words = load_word_list(dir / "easy_words_en.txt");
    auto in = open_resource(dir / "lexicon_en.tsv");
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') continue;
        const auto tab = line.find('\t');
        if (tab == std::string::npos) throw ConfigError("malformed lexicon line: " + line);
        r.lexicon.emplace(to_lower_ascii(line.substr(0, tab)), std::string(trim(line.substr(tab + 1))));
    }
    return r;
}

std::filesystem::path Resources::default_dir() {
    if (const char* env = std::getenv("MGTDETECT_RESOURCES"); env && *env) return env;
    return MGTDETECT_RESOURCE_DIR;
}

const Resources& Resources::shared() {
    static const Resources instance = load(default_dir());
    return instance;
}

}  // namespace mgtdetect
