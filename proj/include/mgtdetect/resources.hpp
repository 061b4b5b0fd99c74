#pragma once

#include <filesystem>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace mgtdetect {

using WordSet = std::unordered_set<std::string>;

// Pinned word lists shipped under resources/. Immutable once loaded.
struct Resources {
    WordSet stopwords;                                  // 179 lowercase entries
    WordSet easy_words;                                 // Dale-Chall easy words
    std::unordered_map<std::string, std::string> lexicon;  // lowercase word -> coarse PoS

    static Resources load(const std::filesystem::path& dir);
    // $MGTDETECT_RESOURCES if set, else the directory baked in at build time.
    static std::filesystem::path default_dir();
    static const Resources& shared();
};

// One lowercase entry per line, '#' comments and blank lines ignored.
WordSet load_word_list(const std::filesystem::path& path);

}  // namespace mgtdetect
