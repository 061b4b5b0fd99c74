#include "mgtdetect/text_util.hpp"

namespace mgtdetect {

std::string to_lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out)
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    return out;
}

bool is_ascii_alpha(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_ascii_digit(char c) { return c >= '0' && c <= '9'; }

char32_t next_code_point(std::string_view s, std::size_t& i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
        ++i;
        return b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + extra >= s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (int k = 1; k <= extra; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += extra + 1;
    return cp;
}

CharClass classify(char32_t cp) {
    if (cp >= 'a' && cp <= 'z') return CharClass::lower;
    if (cp >= 'A' && cp <= 'Z') return CharClass::upper;
    if (cp >= '0' && cp <= '9') return CharClass::digit;
    if (cp < 0xC0) return CharClass::other;
    // Latin-1 supplement
    if (cp <= 0xDE) return cp == 0xD7 ? CharClass::other : CharClass::upper;
    if (cp <= 0xFF) return cp == 0xF7 ? CharClass::other : CharClass::lower;
    // Latin Extended-A alternates upper/lower
    if (cp <= 0x17F) return (cp % 2 == 0) ? CharClass::upper : CharClass::lower;
    // Greek
    if (cp >= 0x391 && cp <= 0x3A9) return CharClass::upper;
    if (cp >= 0x3B1 && cp <= 0x3C9) return CharClass::lower;
    // Cyrillic
    if (cp >= 0x410 && cp <= 0x42F) return CharClass::upper;
    if (cp >= 0x430 && cp <= 0x44F) return CharClass::lower;
    return CharClass::other;
}

bool has_letter(std::string_view s) {
    std::size_t i = 0;
    while (i < s.size()) {
        const auto c = classify(next_code_point(s, i));
        if (c == CharClass::lower || c == CharClass::upper) return true;
    }
    return false;
}

bool has_digit(std::string_view s) {
    for (char c : s)
        if (is_ascii_digit(c)) return true;
    return false;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(s.substr(start));
            return out;
        }
        out.emplace_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace mgtdetect
