#include "lanedet/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>

#include "lanedet/errors.hpp"

namespace lanedet {

namespace {

[[noreturn]] void fail(const std::string& name, size_t offset, const std::string& what) {
    throw FormatError(name + ": " + what + " (byte offset " + std::to_string(offset) + ")");
}

struct ByteCursor {
    const std::vector<unsigned char>& bytes;
    const std::string& name;
    size_t pos = 0;

    bool eof() const { return pos >= bytes.size(); }
    unsigned char peek() const { return bytes[pos]; }

    void skip_space_and_comments() {
        while (!eof()) {
            const unsigned char c = peek();
            if (c == '#') {
                while (!eof() && peek() != '\n') ++pos;
            } else if (std::isspace(c)) {
                ++pos;
            } else {
                break;
            }
        }
    }

    int read_int() {
        skip_space_and_comments();
        if (eof() || !std::isdigit(peek())) fail(name, pos, "expected an integer");
        long v = 0;
        while (!eof() && std::isdigit(peek())) {
            v = v * 10 + (peek() - '0');
            if (v > 1 << 30) fail(name, pos, "integer out of range");
            ++pos;
        }
        return static_cast<int>(v);
    }
};

ImageBuffer decode_netpbm(const std::vector<unsigned char>& bytes,
                          const std::string& name) {
    ByteCursor cur{bytes, name};
    const bool color = bytes[1] == '6';
    cur.pos = 2;
    const int width = cur.read_int();
    const int height = cur.read_int();
    const size_t maxval_at = cur.pos;
    const int maxval = cur.read_int();
    if (width <= 0 || height <= 0) fail(name, 2, "non-positive image dimensions");
    if (maxval <= 0 || maxval > 255)
        fail(name, maxval_at, "unsupported maxval (expected 1..255)");
    if (cur.eof() || !std::isspace(cur.peek()))
        fail(name, cur.pos, "missing whitespace after maxval");
    ++cur.pos; // single separator byte before the raster

    const size_t stride = color ? 3 : 1;
    const size_t need = static_cast<size_t>(width) * height * stride;
    if (bytes.size() - cur.pos < need)
        fail(name, bytes.size(), "truncated raster data");

    ImageBuffer img(width, height, FrameTag::image_frame);
    const unsigned char* raster = bytes.data() + cur.pos;
    const double scale = 1.0 / maxval;
    for (size_t i = 0; i < static_cast<size_t>(width) * height; ++i) {
        img.data()[i] = raster[i * stride] * scale; // red channel when color
    }
    return img;
}

ImageBuffer decode_png(const std::vector<unsigned char>& bytes,
                       const std::string& name) {
    png_image png;
    std::memset(&png, 0, sizeof(png));
    png.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&png, bytes.data(), bytes.size())) {
        fail(name, 0, std::string("PNG: ") + png.message);
    }
    png.format = PNG_FORMAT_RGB;
    std::vector<unsigned char> raster(PNG_IMAGE_SIZE(png));
    if (!png_image_finish_read(&png, nullptr, raster.data(), 0, nullptr)) {
        const std::string msg = png.message;
        png_image_free(&png);
        fail(name, 0, "PNG: " + msg);
    }
    ImageBuffer img(static_cast<int>(png.width), static_cast<int>(png.height),
                    FrameTag::image_frame);
    for (size_t i = 0; i < img.size(); ++i) {
        img.data()[i] = raster[i * 3] / 255.0; // red channel
    }
    return img;
}

} // namespace

ImageBuffer decode_frame(const std::vector<unsigned char>& bytes,
                         const std::string& name) {
    if (bytes.size() >= 2 && bytes[0] == 'P' && (bytes[1] == '5' || bytes[1] == '6')) {
        return decode_netpbm(bytes, name);
    }
    static const unsigned char png_magic[4] = {0x89, 'P', 'N', 'G'};
    if (bytes.size() >= 4 && std::memcmp(bytes.data(), png_magic, 4) == 0) {
        return decode_png(bytes, name);
    }
    fail(name, 0, "unrecognized image format (expected P5, P6 or PNG)");
}

ImageBuffer load_frame(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path + ": cannot open file (byte offset 0)");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return decode_frame(bytes, path);
}

namespace {

unsigned char to_byte(double v) {
    const double clamped = std::clamp(v, 0.0, 1.0);
    return static_cast<unsigned char>(std::lround(clamped * 255.0));
}

void write_file(const std::string& path, const std::string& header,
                const std::vector<unsigned char>& raster) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError(path + ": cannot write file (byte offset 0)");
    out << header;
    out.write(reinterpret_cast<const char*>(raster.data()),
              static_cast<std::streamsize>(raster.size()));
}

} // namespace

void save_pgm(const ImageBuffer& img, const std::string& path) {
    std::vector<unsigned char> raster(img.size());
    for (size_t i = 0; i < img.size(); ++i) raster[i] = to_byte(img.data()[i]);
    write_file(path, "P5\n" + std::to_string(img.width()) + " " +
                         std::to_string(img.height()) + "\n255\n", raster);
}

void save_pgm_signed(const ImageBuffer& img, const std::string& path) {
    double peak = 0.0;
    for (size_t i = 0; i < img.size(); ++i) peak = std::max(peak, std::abs(img.data()[i]));
    if (peak == 0.0) peak = 1.0;
    std::vector<unsigned char> raster(img.size());
    for (size_t i = 0; i < img.size(); ++i) {
        raster[i] = to_byte(0.5 + 0.5 * img.data()[i] / peak);
    }
    write_file(path, "P5\n" + std::to_string(img.width()) + " " +
                         std::to_string(img.height()) + "\n255\n", raster);
}

void save_overlay_ppm(const ImageBuffer& gray, const std::vector<Spline>& splines,
                      const std::string& path) {
    std::vector<unsigned char> raster(gray.size() * 3);
    for (size_t i = 0; i < gray.size(); ++i) {
        const unsigned char v = to_byte(gray.data()[i]);
        raster[i * 3] = raster[i * 3 + 1] = raster[i * 3 + 2] = v;
    }
    for (const Spline& s : splines) {
        for (const PixelCoord& p : rasterize(s)) {
            if (!gray.in_bounds(p.x, p.y)) continue;
            const size_t i = (static_cast<size_t>(p.y) * gray.width() + p.x) * 3;
            raster[i] = 0;
            raster[i + 1] = 255;
            raster[i + 2] = 0;
        }
    }
    write_file(path, "P6\n" + std::to_string(gray.width()) + " " +
                         std::to_string(gray.height()) + "\n255\n", raster);
}

} // namespace lanedet
