#pragma once

#include <string>

#include "pvtrack/raster.hpp"

namespace pvtrack {

// Binary PGM (P5) and PPM (P6), 8-bit, maxval 255.

GrayImage read_pgm(const std::string& path);
void write_pgm(const GrayImage& img, const std::string& path);

RgbImage read_ppm(const std::string& path);
void write_ppm(const RgbImage& img, const std::string& path);

} // namespace pvtrack
