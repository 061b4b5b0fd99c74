#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace mgtdetect {

std::string to_lower_ascii(std::string_view s);

bool is_ascii_alpha(char c);
bool is_ascii_digit(char c);

// Decodes one UTF-8 code point starting at s[i]; advances i. Invalid bytes decode as U+FFFD.
char32_t next_code_point(std::string_view s, std::size_t& i);

enum class CharClass { lower, upper, digit, other };
CharClass classify(char32_t cp);

bool has_letter(std::string_view s);
bool has_digit(std::string_view s);

std::vector<std::string> split(std::string_view s, char sep);
std::string_view trim(std::string_view s);

}  // namespace mgtdetect
