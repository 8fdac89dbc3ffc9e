#pragma once

#include <cassert>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "lanedet/geometry.hpp"

namespace lanedet {

// Coordinate frame a raster or curve lives in.
enum class FrameTag : uint8_t {
    image_frame, // input camera image, origin top-left, u right, v down
    ipm_frame,   // top-view raster, x right (lateral), y down (near at bottom)
};

const char* frame_tag_name(FrameTag tag);
FrameTag parse_frame_tag(const std::string& name); // throws FormatError

// Single-channel row-major raster of doubles. The carrier type of every
// pipeline stage.
class ImageBuffer {
public:
    ImageBuffer() = default;
    ImageBuffer(int width, int height, FrameTag tag, double fill = 0.0)
        : width_(width), height_(height), tag_(tag),
          data_(static_cast<size_t>(width) * height, fill) {
        assert(width > 0 && height > 0);
    }

    int width() const { return width_; }
    int height() const { return height_; }
    FrameTag tag() const { return tag_; }
    void set_tag(FrameTag tag) { tag_ = tag; }
    size_t size() const { return data_.size(); }
    bool empty() const { return data_.empty(); }

    double& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
    double at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }
    std::span<double> pixels() { return data_; }
    std::span<const double> pixels() const { return data_; }
    std::span<const double> row(int y) const {
        return {data_.data() + static_cast<size_t>(y) * width_, static_cast<size_t>(width_)};
    }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width_ && y >= 0 && y < height_;
    }
    PixelRect full_rect() const { return {0, 0, width_ - 1, height_ - 1}; }

    // Bilinear sample at a subpixel position; 0 outside [0,w-1]x[0,h-1].
    double sample_bilinear(double x, double y) const;

    // Copy of the column range [x0, x0+w). Caller keeps track of the offset.
    ImageBuffer crop_columns(int x0, int w) const;

private:
    int width_ = 0;
    int height_ = 0;
    FrameTag tag_ = FrameTag::image_frame;
    std::vector<double> data_;
};

} // namespace lanedet
