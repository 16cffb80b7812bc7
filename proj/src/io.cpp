#include "plmod/io.hpp"

#include <zlib.h>

#include <nlohmann/json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace plmod {

using nlohmann::json;

json poly_to_json(const Poly& p) {
  json arr = json::array();
  for (const cplx& c : p.coeffs()) arr.push_back(json::array({c.real(), c.imag()}));
  return json{{"coeffs", arr}, {"monic", p.is_monic()}};
}

Poly poly_from_json(const json& j) {
  if (!j.contains("coeffs") || !j["coeffs"].is_array())
    throw std::invalid_argument("poly json: missing coeffs array");
  std::vector<cplx> c;
  for (const auto& e : j["coeffs"]) {
    if (!e.is_array() || e.size() != 2)
      throw std::invalid_argument("poly json: coefficient must be [re, im]");
    c.emplace_back(e[0].get<double>(), e[1].get<double>());
  }
  Poly p(std::move(c));
  if (j.contains("monic") && j["monic"].get<bool>() && !p.is_monic())
    throw std::invalid_argument("poly json: monic flag set but leading coefficient != 1");
  return p;
}

Poly load_poly(const std::string& path) { return poly_from_json(load_json(path)); }

void save_json(const json& j, const std::string& path) {
  write_text_file(path, j.dump(2) + "\n");
}

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return j;
}

std::string fnv1a_hex(const std::string& bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back((v >> 24) & 0xff);
  out.push_back((v >> 16) & 0xff);
  out.push_back((v >> 8) & 0xff);
  out.push_back(v & 0xff);
}

void put_chunk(std::vector<std::uint8_t>& out, const char type[4],
               const std::vector<std::uint8_t>& data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  std::size_t crc_start = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  std::uint32_t crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + crc_start, static_cast<uInt>(out.size() - crc_start));
  put_u32(out, crc);
}

}  // namespace

std::vector<std::uint8_t> encode_png_gray(const std::uint8_t* pixels, int width, int height) {
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(height) * (width + 1));
  for (int y = 0; y < height; ++y) {
    raw.push_back(0);  // filter: none
    raw.insert(raw.end(), pixels + std::size_t(y) * width, pixels + std::size_t(y + 1) * width);
  }
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> compressed(bound);
  if (compress2(compressed.data(), &bound, raw.data(), static_cast<uLong>(raw.size()), 6) != Z_OK)
    throw std::runtime_error("png: zlib compression failed");
  compressed.resize(bound);

  std::vector<std::uint8_t> out{0x89, 'P', 'N', 'G', 0x0d, 0x0a, 0x1a, 0x0a};
  std::vector<std::uint8_t> ihdr;
  put_u32(ihdr, static_cast<std::uint32_t>(width));
  put_u32(ihdr, static_cast<std::uint32_t>(height));
  ihdr.push_back(8);  // bit depth
  ihdr.push_back(0);  // grayscale
  ihdr.push_back(0);  // compression
  ihdr.push_back(0);  // filter
  ihdr.push_back(0);  // no interlace
  put_chunk(out, "IHDR", ihdr);
  put_chunk(out, "IDAT", compressed);
  put_chunk(out, "IEND", {});
  return out;
}

void write_png_gray(const std::string& path, const std::uint8_t* pixels, int width, int height) {
  auto bytes = encode_png_gray(pixels, width, height);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

std::vector<std::uint8_t> read_png_gray(const std::string& path, int& width, int& height) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.size() < 8 || bytes[1] != 'P' || bytes[2] != 'N' || bytes[3] != 'G')
    throw std::runtime_error("png: bad signature in " + path);
  std::size_t pos = 8;
  auto get_u32 = [&](std::size_t at) {
    return (std::uint32_t(bytes[at]) << 24) | (std::uint32_t(bytes[at + 1]) << 16) |
           (std::uint32_t(bytes[at + 2]) << 8) | std::uint32_t(bytes[at + 3]);
  };
  width = height = 0;
  std::vector<std::uint8_t> idat;
  while (pos + 8 <= bytes.size()) {
    std::uint32_t len = get_u32(pos);
    std::string type(bytes.begin() + pos + 4, bytes.begin() + pos + 8);
    std::size_t data = pos + 8;
    if (data + len + 4 > bytes.size()) throw std::runtime_error("png: truncated chunk");
    if (type == "IHDR") {
      width = static_cast<int>(get_u32(data));
      height = static_cast<int>(get_u32(data + 4));
      if (bytes[data + 8] != 8 || bytes[data + 9] != 0)
        throw std::runtime_error("png: only 8-bit grayscale supported");
    } else if (type == "IDAT") {
      idat.insert(idat.end(), bytes.begin() + data, bytes.begin() + data + len);
    } else if (type == "IEND") {
      break;
    }
    pos = data + len + 4;
  }
  if (width <= 0 || height <= 0) throw std::runtime_error("png: missing IHDR");
  std::vector<std::uint8_t> raw(std::size_t(height) * (width + 1));
  uLongf raw_len = static_cast<uLongf>(raw.size());
  if (uncompress(raw.data(), &raw_len, idat.data(), static_cast<uLong>(idat.size())) != Z_OK ||
      raw_len != raw.size())
    throw std::runtime_error("png: inflate failed");
  std::vector<std::uint8_t> pixels(std::size_t(width) * height);
  for (int y = 0; y < height; ++y) {
    const std::uint8_t* row = raw.data() + std::size_t(y) * (width + 1);
    std::uint8_t filter = row[0];
    std::uint8_t* dst = pixels.data() + std::size_t(y) * width;
    std::memcpy(dst, row + 1, width);
    if (filter == 0) continue;
    // unfilter the few types zlib/our writer can produce
    const std::uint8_t* up = (y == 0) ? nullptr : pixels.data() + std::size_t(y - 1) * width;
    for (int x = 0; x < width; ++x) {
      int a = (x > 0) ? dst[x - 1] : 0;
      int b = up ? up[x] : 0;
      int c = (up && x > 0) ? up[x - 1] : 0;
      switch (filter) {
        case 1: dst[x] = std::uint8_t(dst[x] + a); break;
        case 2: dst[x] = std::uint8_t(dst[x] + b); break;
        case 3: dst[x] = std::uint8_t(dst[x] + (a + b) / 2); break;
        case 4: {
          int pa = std::abs(b - c), pb = std::abs(a - c), pc = std::abs(a + b - 2 * c);
          int pred = (pa <= pb && pa <= pc) ? a : (pb <= pc ? b : c);
          dst[x] = std::uint8_t(dst[x] + pred);
          break;
        }
        default: throw std::runtime_error("png: unsupported filter");
      }
    }
  }
  return pixels;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace plmod
