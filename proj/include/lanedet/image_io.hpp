#pragma once

#include <string>
#include <vector>

#include "lanedet/bezier.hpp"
#include "lanedet/image.hpp"

namespace lanedet {

// Decode a PGM (P5), PPM (P6) or PNG file to intensities in [0,1]. Color
// sources contribute their red channel only; grayscale passes through.
// Throws FormatError with the offending byte offset on malformed input.
ImageBuffer load_frame(const std::string& path);

// Same decoder over an in-memory file image.
ImageBuffer decode_frame(const std::vector<unsigned char>& bytes,
                         const std::string& name);

// Binary PGM, values clamped to [0,1] and scaled to maxval 255.
void save_pgm(const ImageBuffer& img, const std::string& path);

// PGM of a signed response image, normalized so 0 maps to mid-gray.
void save_pgm_signed(const ImageBuffer& img, const std::string& path);

// Binary PPM of the grayscale image with the splines' raster chains drawn
// in green.
void save_overlay_ppm(const ImageBuffer& gray, const std::vector<Spline>& splines,
                      const std::string& path);

} // namespace lanedet
