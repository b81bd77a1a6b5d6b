#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace softmap {

// 8-bit RGB image buffer.
struct Image {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<std::uint8_t> pixels;  // rgb, row-major

  Image() = default;
  Image(std::size_t w, std::size_t h) : width(w), height(h), pixels(w * h * 3, 0) {}

  void set(std::size_t x, std::size_t y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x >= width || y >= height) return;
    std::uint8_t* p = &pixels[(y * width + x) * 3];
    p[0] = r;
    p[1] = g;
    p[2] = b;
  }
};

namespace detail {

inline std::uint32_t crc32(const std::uint8_t* data, std::size_t len, std::uint32_t crc = 0) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t n = 0; n < 256; ++n) {
      std::uint32_t c = n;
      for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xedb88320u ^ (c >> 1) : c >> 1;
      t[n] = c;
    }
    return t;
  }();
  crc ^= 0xffffffffu;
  for (std::size_t i = 0; i < len; ++i) crc = table[(crc ^ data[i]) & 0xff] ^ (crc >> 8);
  return crc ^ 0xffffffffu;
}

inline std::uint32_t adler32(const std::uint8_t* data, std::size_t len) {
  std::uint32_t a = 1, b = 0;
  for (std::size_t i = 0; i < len; ++i) {
    a = (a + data[i]) % 65521;
    b = (b + a) % 65521;
  }
  return (b << 16) | a;
}

inline void put_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v >> 24));
  out.push_back(static_cast<char>(v >> 16));
  out.push_back(static_cast<char>(v >> 8));
  out.push_back(static_cast<char>(v));
}

inline void put_chunk(std::string& out, const char type[5], const std::string& body) {
  put_u32(out, static_cast<std::uint32_t>(body.size()));
  std::string payload = std::string(type, 4) + body;
  out += payload;
  put_u32(out, crc32(reinterpret_cast<const std::uint8_t*>(payload.data()), payload.size()));
}

}  // namespace detail

// Encodes truecolor 8-bit PNG using stored (uncompressed) deflate blocks:
// no compressor in the loop, so the bytes are identical on every platform.
inline std::string encode_png(const Image& img) {
  std::string out("\x89PNG\r\n\x1a\n", 8);

  std::string ihdr;
  detail::put_u32(ihdr, static_cast<std::uint32_t>(img.width));
  detail::put_u32(ihdr, static_cast<std::uint32_t>(img.height));
  ihdr += '\x08';  // bit depth
  ihdr += '\x02';  // truecolor
  ihdr += '\x00';  // deflate
  ihdr += '\x00';  // filter method
  ihdr += '\x00';  // no interlace
  detail::put_chunk(out, "IHDR", ihdr);

  // raw scanlines, filter byte 0 per row
  std::vector<std::uint8_t> raw;
  raw.reserve(img.height * (img.width * 3 + 1));
  for (std::size_t y = 0; y < img.height; ++y) {
    raw.push_back(0);
    const std::uint8_t* row = &img.pixels[y * img.width * 3];
    raw.insert(raw.end(), row, row + img.width * 3);
  }

  std::string idat;
  idat += '\x78';
  idat += '\x01';  // zlib header, no compression preset
  std::size_t pos = 0;
  while (pos < raw.size() || raw.empty()) {
    const std::size_t chunk = std::min<std::size_t>(65535, raw.size() - pos);
    const bool final = pos + chunk >= raw.size();
    idat += final ? '\x01' : '\x00';
    idat += static_cast<char>(chunk & 0xff);
    idat += static_cast<char>(chunk >> 8);
    idat += static_cast<char>(~chunk & 0xff);
    idat += static_cast<char>(~(chunk >> 8) & 0xff);
    idat.append(reinterpret_cast<const char*>(raw.data() + pos), chunk);
    pos += chunk;
    if (final) break;
  }
  detail::put_u32(idat, detail::adler32(raw.data(), raw.size()));
  detail::put_chunk(out, "IDAT", idat);
  detail::put_chunk(out, "IEND", "");
  return out;
}

inline std::string base64_encode(const std::string& bytes) {
  static const char* alphabet =
      "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 2 < bytes.size()) {
    const std::uint32_t v = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                            (static_cast<std::uint8_t>(bytes[i + 1]) << 8) |
                            static_cast<std::uint8_t>(bytes[i + 2]);
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += alphabet[(v >> 6) & 63];
    out += alphabet[v & 63];
    i += 3;
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t v = static_cast<std::uint8_t>(bytes[i]) << 16;
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t v = (static_cast<std::uint8_t>(bytes[i]) << 16) |
                            (static_cast<std::uint8_t>(bytes[i + 1]) << 8);
    out += alphabet[(v >> 18) & 63];
    out += alphabet[(v >> 12) & 63];
    out += alphabet[(v >> 6) & 63];
    out += '=';
  }
  return out;
}

}  // namespace softmap
