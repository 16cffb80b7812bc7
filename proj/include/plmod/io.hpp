#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "plmod/poly.hpp"

namespace plmod {

nlohmann::json poly_to_json(const Poly& p);
Poly poly_from_json(const nlohmann::json& j);
Poly load_poly(const std::string& path);
void save_json(const nlohmann::json& j, const std::string& path);
nlohmann::json load_json(const std::string& path);

// FNV-1a 64 of a string, hex-encoded; used for config digests and
// carrier hashes. Stable across platforms.
std::string fnv1a_hex(const std::string& bytes);

// Minimal 8-bit grayscale PNG codec (zlib-backed). write_png_gray emits a
// fixed-layout file so identical pixel data gives identical bytes.
std::vector<std::uint8_t> encode_png_gray(const std::uint8_t* pixels, int width, int height);
void write_png_gray(const std::string& path, const std::uint8_t* pixels, int width, int height);
// Reads only the subset of PNG this library writes (8-bit gray, non-interlaced).
std::vector<std::uint8_t> read_png_gray(const std::string& path, int& width, int& height);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace plmod
