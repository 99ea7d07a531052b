#pragma once

#include <string>
#include <string_view>

namespace nonsym::utf8 {

// Decodes UTF-8 into Unicode scalar values. Throws std::runtime_error with
// the byte offset on malformed input.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view chars);
std::string encode_char(char32_t c);

}  // namespace nonsym::utf8
