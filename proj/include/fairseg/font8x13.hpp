#pragma once
// 8x13 bitmap font covering printable ASCII (32..126); bit x of byte y
// is the pixel at (x, y) of the glyph cell.

#include <cstdint>

namespace fairseg {

inline constexpr int kFontWidth = 8;
inline constexpr int kFontHeight = 13;
inline constexpr int kFontFirstChar = 32;

inline constexpr uint8_t kFont8x13[95][13] = {
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // ' '
    {0x00, 0x00, 0x02, 0x02, 0x02, 0x02, 0x02, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00},  // '!'
    {0x00, 0x00, 0x06, 0x06, 0x06, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '"'
    {0x00, 0x00, 0x14, 0x0c, 0x0c, 0x1e, 0x0a, 0x1e, 0x0a, 0x06, 0x00, 0x00, 0x00},  // '#'
    {0x00, 0x08, 0x1c, 0x2a, 0x2a, 0x0e, 0x18, 0x28, 0x2a, 0x1c, 0x08, 0x00, 0x00},  // '$'
    {0x00, 0x00, 0x4e, 0x2a, 0x2a, 0x1e, 0xf0, 0xa8, 0xa4, 0xe4, 0x00, 0x00, 0x00},  // '%'
    {0x00, 0x00, 0x1c, 0x02, 0x22, 0x7c, 0x22, 0x22, 0x22, 0x3c, 0x00, 0x00, 0x00},  // '&'
    {0x00, 0x00, 0x02, 0x02, 0x02, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '\''
    {0x00, 0x00, 0x04, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x04, 0x04, 0x00, 0x00},  // '('
    {0x00, 0x00, 0x00, 0x01, 0x01, 0x01, 0x01, 0x01, 0x01, 0x00, 0x00, 0x00, 0x00},  // ')'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x08, 0x2a, 0x1c, 0x14, 0x00, 0x00, 0x00, 0x00},  // '*'
    {0x00, 0x00, 0x00, 0x00, 0x08, 0x08, 0x3e, 0x08, 0x08, 0x00, 0x00, 0x00, 0x00},  // '+'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00},  // ','
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x03, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '-'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00},  // '.'
    {0x00, 0x00, 0x02, 0x02, 0x01, 0x01, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '/'
    {0x00, 0x00, 0x1c, 0x36, 0x22, 0x22, 0x22, 0x22, 0x36, 0x1c, 0x00, 0x00, 0x00},  // '0'
    {0x00, 0x00, 0x0c, 0x0a, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x00, 0x00, 0x00},  // '1'
    {0x00, 0x00, 0x0c, 0x12, 0x10, 0x10, 0x08, 0x04, 0x02, 0x1f, 0x00, 0x00, 0x00},  // '2'
    {0x00, 0x00, 0x0e, 0x11, 0x10, 0x0c, 0x10, 0x11, 0x11, 0x0e, 0x00, 0x00, 0x00},  // '3'
    {0x00, 0x00, 0x10, 0x18, 0x14, 0x14, 0x12, 0x3f, 0x10, 0x10, 0x00, 0x00, 0x00},  // '4'
    {0x00, 0x00, 0x1e, 0x01, 0x01, 0x0d, 0x13, 0x10, 0x11, 0x0e, 0x00, 0x00, 0x00},  // '5'
    {0x00, 0x00, 0x1c, 0x24, 0x22, 0x1e, 0x22, 0x22, 0x22, 0x1c, 0x00, 0x00, 0x00},  // '6'
    {0x00, 0x00, 0x1f, 0x10, 0x08, 0x08, 0x04, 0x04, 0x02, 0x02, 0x00, 0x00, 0x00},  // '7'
    {0x00, 0x00, 0x1c, 0x22, 0x22, 0x1c, 0x22, 0x22, 0x22, 0x1c, 0x00, 0x00, 0x00},  // '8'
    {0x00, 0x00, 0x1c, 0x22, 0x22, 0x22, 0x3c, 0x22, 0x12, 0x1c, 0x00, 0x00, 0x00},  // '9'
    {0x00, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00},  // ':'
    {0x00, 0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x00, 0x02, 0x01, 0x00, 0x00},  // ';'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x18, 0x06, 0x02, 0x0c, 0x10, 0x00, 0x00, 0x00},  // '<'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x1e, 0x00, 0x1e, 0x00, 0x00, 0x00, 0x00, 0x00},  // '='
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x06, 0x18, 0x10, 0x0c, 0x02, 0x00, 0x00, 0x00},  // '>'
    {0x00, 0x00, 0x0c, 0x12, 0x12, 0x10, 0x08, 0x08, 0x00, 0x08, 0x00, 0x00, 0x00},  // '?'
    {0x00, 0x00, 0x70, 0x8c, 0x74, 0x4a, 0x4a, 0x2a, 0xda, 0x04, 0x78, 0x00, 0x00},  // '@'
    {0x00, 0x00, 0x08, 0x0c, 0x14, 0x12, 0x1e, 0x22, 0x22, 0x21, 0x00, 0x00, 0x00},  // 'A'
    {0x00, 0x00, 0x1e, 0x22, 0x22, 0x12, 0x3e, 0x22, 0x22, 0x1e, 0x00, 0x00, 0x00},  // 'B'
    {0x00, 0x00, 0x38, 0x44, 0x42, 0x02, 0x02, 0x42, 0x44, 0x3c, 0x00, 0x00, 0x00},  // 'C'
    {0x00, 0x00, 0x1e, 0x22, 0x42, 0x42, 0x42, 0x42, 0x22, 0x1e, 0x00, 0x00, 0x00},  // 'D'
    {0x00, 0x00, 0x3e, 0x02, 0x02, 0x02, 0x1e, 0x02, 0x02, 0x3e, 0x00, 0x00, 0x00},  // 'E'
    {0x00, 0x00, 0x3e, 0x02, 0x02, 0x02, 0x1e, 0x02, 0x02, 0x02, 0x00, 0x00, 0x00},  // 'F'
    {0x00, 0x00, 0x38, 0x64, 0x42, 0x02, 0x72, 0x42, 0x64, 0x5c, 0x00, 0x00, 0x00},  // 'G'
    {0x00, 0x00, 0x42, 0x42, 0x42, 0x42, 0x7e, 0x42, 0x42, 0x42, 0x00, 0x00, 0x00},  // 'H'
    {0x00, 0x00, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x00, 0x00, 0x00},  // 'I'
    {0x00, 0x00, 0x10, 0x10, 0x10, 0x10, 0x10, 0x12, 0x12, 0x0c, 0x00, 0x00, 0x00},  // 'J'
    {0x00, 0x00, 0x22, 0x12, 0x0a, 0x0a, 0x0e, 0x0a, 0x12, 0x22, 0x00, 0x00, 0x00},  // 'K'
    {0x00, 0x00, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x3e, 0x00, 0x00, 0x00},  // 'L'
    {0x00, 0x00, 0xc6, 0xc6, 0xc6, 0xaa, 0xaa, 0xaa, 0x9a, 0x92, 0x00, 0x00, 0x00},  // 'M'
    {0x00, 0x00, 0x26, 0x26, 0x26, 0x2a, 0x2a, 0x2a, 0x32, 0x32, 0x00, 0x00, 0x00},  // 'N'
    {0x00, 0x00, 0x38, 0x44, 0x82, 0x82, 0x82, 0x82, 0x44, 0x38, 0x00, 0x00, 0x00},  // 'O'
    {0x00, 0x00, 0x1e, 0x22, 0x22, 0x22, 0x1e, 0x02, 0x02, 0x02, 0x00, 0x00, 0x00},  // 'P'
    {0x00, 0x00, 0x38, 0x44, 0x82, 0x82, 0x82, 0x82, 0x44, 0xf8, 0x00, 0x00, 0x00},  // 'Q'
    {0x00, 0x00, 0x1e, 0x22, 0x22, 0x22, 0x1e, 0x32, 0x22, 0x22, 0x00, 0x00, 0x00},  // 'R'
    {0x00, 0x00, 0x1c, 0x22, 0x02, 0x04, 0x38, 0x20, 0x22, 0x1c, 0x00, 0x00, 0x00},  // 'S'
    {0x00, 0x00, 0x3e, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x08, 0x00, 0x00, 0x00},  // 'T'
    {0x00, 0x00, 0x22, 0x22, 0x22, 0x22, 0x22, 0x22, 0x22, 0x1c, 0x00, 0x00, 0x00},  // 'U'
    {0x00, 0x00, 0x21, 0x22, 0x22, 0x12, 0x14, 0x14, 0x0c, 0x08, 0x00, 0x00, 0x00},  // 'V'
    {0x00, 0x00, 0x31, 0x32, 0x32, 0x2a, 0xaa, 0xca, 0xcc, 0xc4, 0x00, 0x00, 0x00},  // 'W'
    {0x00, 0x00, 0x22, 0x12, 0x14, 0x0c, 0x0c, 0x14, 0x12, 0x22, 0x00, 0x00, 0x00},  // 'X'
    {0x00, 0x00, 0x22, 0x22, 0x14, 0x14, 0x08, 0x08, 0x08, 0x08, 0x00, 0x00, 0x00},  // 'Y'
    {0x00, 0x00, 0x3e, 0x20, 0x10, 0x08, 0x08, 0x04, 0x02, 0x3e, 0x00, 0x00, 0x00},  // 'Z'
    {0x00, 0x06, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x06, 0x00, 0x00},  // '['
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x01, 0x01, 0x01, 0x01, 0x02, 0x02, 0x00, 0x00},  // '\'
    {0x00, 0x01, 0x01, 0x01, 0x01, 0x01, 0x01, 0x01, 0x01, 0x01, 0x01, 0x00, 0x00},  // ']'
    {0x00, 0x00, 0x00, 0x00, 0x0c, 0x0a, 0x0a, 0x12, 0x00, 0x00, 0x00, 0x00, 0x00},  // '^'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1f, 0x00, 0x00},  // '_'
    {0x00, 0x00, 0x00, 0x02, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00},  // '`'
    {0x00, 0x00, 0x00, 0x00, 0x1c, 0x12, 0x18, 0x16, 0x12, 0x1e, 0x00, 0x00, 0x00},  // 'a'
    {0x00, 0x00, 0x02, 0x02, 0x1e, 0x22, 0x22, 0x22, 0x22, 0x1e, 0x00, 0x00, 0x00},  // 'b'
    {0x00, 0x00, 0x00, 0x00, 0x1c, 0x22, 0x02, 0x02, 0x22, 0x1c, 0x00, 0x00, 0x00},  // 'c'
    {0x00, 0x00, 0x20, 0x20, 0x3c, 0x22, 0x22, 0x22, 0x22, 0x3c, 0x00, 0x00, 0x00},  // 'd'
    {0x00, 0x00, 0x00, 0x00, 0x1c, 0x22, 0x3e, 0x02, 0x22, 0x1c, 0x00, 0x00, 0x00},  // 'e'
    {0x00, 0x04, 0x02, 0x02, 0x07, 0x02, 0x02, 0x02, 0x02, 0x02, 0x00, 0x00, 0x00},  // 'f'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x22, 0x22, 0x22, 0x22, 0x3c, 0x22, 0x1c, 0x00},  // 'g'
    {0x00, 0x00, 0x02, 0x02, 0x1e, 0x26, 0x22, 0x22, 0x22, 0x22, 0x00, 0x00, 0x00},  // 'h'
    {0x00, 0x00, 0x02, 0x00, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x00, 0x00, 0x00},  // 'i'
    {0x00, 0x00, 0x02, 0x00, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x03, 0x00},  // 'j'
    {0x00, 0x00, 0x02, 0x02, 0x12, 0x0a, 0x06, 0x0a, 0x0a, 0x12, 0x00, 0x00, 0x00},  // 'k'
    {0x00, 0x00, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x06, 0x00, 0x00, 0x00},  // 'l'
    {0x00, 0x00, 0x00, 0x00, 0xee, 0x92, 0x92, 0x92, 0x92, 0x92, 0x00, 0x00, 0x00},  // 'm'
    {0x00, 0x00, 0x00, 0x00, 0x1e, 0x26, 0x22, 0x22, 0x22, 0x22, 0x00, 0x00, 0x00},  // 'n'
    {0x00, 0x00, 0x00, 0x00, 0x1c, 0x22, 0x22, 0x22, 0x22, 0x1c, 0x00, 0x00, 0x00},  // 'o'
    {0x00, 0x00, 0x00, 0x00, 0x1e, 0x22, 0x22, 0x22, 0x22, 0x1e, 0x02, 0x02, 0x00},  // 'p'
    {0x00, 0x00, 0x00, 0x00, 0x3c, 0x22, 0x22, 0x22, 0x22, 0x3c, 0x20, 0x20, 0x00},  // 'q'
    {0x00, 0x00, 0x00, 0x00, 0x0e, 0x02, 0x02, 0x02, 0x02, 0x02, 0x00, 0x00, 0x00},  // 'r'
    {0x00, 0x00, 0x00, 0x00, 0x0e, 0x12, 0x06, 0x18, 0x12, 0x1e, 0x00, 0x00, 0x00},  // 's'
    {0x00, 0x00, 0x02, 0x02, 0x07, 0x02, 0x02, 0x02, 0x02, 0x06, 0x00, 0x00, 0x00},  // 't'
    {0x00, 0x00, 0x00, 0x00, 0x22, 0x22, 0x22, 0x22, 0x32, 0x3c, 0x00, 0x00, 0x00},  // 'u'
    {0x00, 0x00, 0x00, 0x00, 0x11, 0x11, 0x0a, 0x0a, 0x0a, 0x04, 0x00, 0x00, 0x00},  // 'v'
    {0x00, 0x00, 0x00, 0x00, 0x99, 0x59, 0x5a, 0x56, 0x66, 0x24, 0x00, 0x00, 0x00},  // 'w'
    {0x00, 0x00, 0x00, 0x00, 0x04, 0x05, 0x02, 0x03, 0x05, 0x04, 0x00, 0x00, 0x00},  // 'x'
    {0x00, 0x00, 0x00, 0x00, 0x11, 0x11, 0x0a, 0x0a, 0x0a, 0x04, 0x04, 0x02, 0x00},  // 'y'
    {0x00, 0x00, 0x00, 0x00, 0x1e, 0x10, 0x08, 0x04, 0x02, 0x1e, 0x00, 0x00, 0x00},  // 'z'
    {0x00, 0x06, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x06, 0x00, 0x00},  // '{'
    {0x00, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x00},  // '|'
    {0x00, 0x03, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x02, 0x03, 0x00, 0x00},  // '}'
    {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x16, 0x1a, 0x00, 0x00, 0x00, 0x00, 0x00},  // '~'
};

}  // namespace fairseg
