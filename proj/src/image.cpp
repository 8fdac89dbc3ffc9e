#include "lanedet/image.hpp"

#include <string>

#include "lanedet/errors.hpp"

namespace lanedet {

const char* frame_tag_name(FrameTag tag) {
    return tag == FrameTag::image_frame ? "image_frame" : "ipm_frame";
}

FrameTag parse_frame_tag(const std::string& name) {
    if (name == "image_frame") return FrameTag::image_frame;
    if (name == "ipm_frame") return FrameTag::ipm_frame;
    throw FormatError("unknown frame tag: " + name);
}

double ImageBuffer::sample_bilinear(double x, double y) const {
    if (!(x >= 0.0 && x <= width_ - 1 && y >= 0.0 && y <= height_ - 1)) return 0.0;
    if (width_ < 2 || height_ < 2) {
        int xi = static_cast<int>(x + 0.5);
        int yi = static_cast<int>(y + 0.5);
        if (xi >= width_) xi = width_ - 1;
        if (yi >= height_) yi = height_ - 1;
        return at(xi, yi);
    }
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    if (x0 > width_ - 2) x0 = width_ - 2;
    if (y0 > height_ - 2) y0 = height_ - 2;
    const double fx = x - x0;
    const double fy = y - y0;
    const double* p = data_.data() + static_cast<size_t>(y0) * width_ + x0;
    const double top = p[0] + fx * (p[1] - p[0]);
    const double bot = p[width_] + fx * (p[width_ + 1] - p[width_]);
    return top + fy * (bot - top);
}

ImageBuffer ImageBuffer::crop_columns(int x0, int w) const {
    ImageBuffer out(w, height_, tag_);
    for (int y = 0; y < height_; ++y) {
        const double* srow = data_.data() + static_cast<size_t>(y) * width_ + x0;
        double* drow = out.data() + static_cast<size_t>(y) * w;
        for (int x = 0; x < w; ++x) drow[x] = srow[x];
    }
    return out;
}

} // namespace lanedet
