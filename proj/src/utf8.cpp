#include "nonsym/utf8.hpp"

#include <stdexcept>
#include <string>

namespace nonsym::utf8 {

namespace {
[[noreturn]] void bad(std::size_t offset) {
  throw std::runtime_error("invalid UTF-8 at byte offset " +
                           std::to_string(offset));
}
}  // namespace

std::u32string decode(std::string_view bytes) {
  std::u32string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  while (i < bytes.size()) {
    unsigned char b0 = bytes[i];
    char32_t cp;
    std::size_t n;
    if (b0 < 0x80) {
      cp = b0;
      n = 1;
    } else if ((b0 & 0xe0) == 0xc0) {
      cp = b0 & 0x1f;
      n = 2;
    } else if ((b0 & 0xf0) == 0xe0) {
      cp = b0 & 0x0f;
      n = 3;
    } else if ((b0 & 0xf8) == 0xf0) {
      cp = b0 & 0x07;
      n = 4;
    } else {
      bad(i);
    }
    if (i + n > bytes.size()) bad(i);
    for (std::size_t k = 1; k < n; ++k) {
      unsigned char b = bytes[i + k];
      if ((b & 0xc0) != 0x80) bad(i + k);
      cp = (cp << 6) | (b & 0x3f);
    }
    // reject overlong encodings and surrogates
    if ((n == 2 && cp < 0x80) || (n == 3 && cp < 0x800) ||
        (n == 4 && cp < 0x10000) || (cp >= 0xd800 && cp <= 0xdfff) ||
        cp > 0x10ffff) {
      bad(i);
    }
    out.push_back(cp);
    i += n;
  }
  return out;
}

std::string encode_char(char32_t c) {
  std::string out;
  if (c < 0x80) {
    out += char(c);
  } else if (c < 0x800) {
    out += char(0xc0 | (c >> 6));
    out += char(0x80 | (c & 0x3f));
  } else if (c < 0x10000) {
    out += char(0xe0 | (c >> 12));
    out += char(0x80 | ((c >> 6) & 0x3f));
    out += char(0x80 | (c & 0x3f));
  } else {
    out += char(0xf0 | (c >> 18));
    out += char(0x80 | ((c >> 12) & 0x3f));
    out += char(0x80 | ((c >> 6) & 0x3f));
    out += char(0x80 | (c & 0x3f));
  }
  return out;
}

std::string encode(std::u32string_view chars) {
  std::string out;
  out.reserve(chars.size());
  for (char32_t c : chars) out += encode_char(c);
  return out;
}

}  // namespace nonsym::utf8
