#pragma once

#include <cstddef>
#include <cstdint>

// Per-backend entry points. Only dispatch.cpp sees all of them; each
// backend lives in its own translation unit so it can be compiled with
// the matching ISA flags.

namespace lanedet::kernels::detail {

struct KernelTable {
    void (*conv_rows)(const double*, double*, int, int, const double*, int);
    void (*conv_cols)(const double*, double*, int, int, const double*, int);
    void (*bilinear_gather)(const double*, int, int, const double*, const double*,
                            int, double*, uint8_t*);
    void (*column_sums)(const double*, int, int, double*);
    void (*clamp_nonnegative)(const double*, double*, int);
    void (*threshold_keep_ge)(const double*, double*, int, double);
};

const KernelTable& scalar_table();

#if defined(__x86_64__) || defined(_M_X64)
#define LANEDET_KERNELS_HAVE_AVX2 1
const KernelTable& avx2_table();
#else
#define LANEDET_KERNELS_HAVE_AVX2 0
#endif

#if defined(__aarch64__)
#define LANEDET_KERNELS_HAVE_NEON 1
const KernelTable& neon_table();
#else
#define LANEDET_KERNELS_HAVE_NEON 0
#endif

// Scalar helpers shared with the SIMD variants for border pixels. The SIMD
// paths call these for the exact ranges they do not cover, so outputs stay
// bit-identical with the pure scalar path.
inline int clamp_index(int i, int n) {
    if (i < 0) return 0;
    if (i >= n) return n - 1;
    return i;
}

inline void conv_rows_span_scalar(const double* src, double* dst, int w, int h,
                                  const double* k, int klen, int x_begin, int x_end) {
    const int r = klen / 2;
    for (int y = 0; y < h; ++y) {
        const double* row = src + static_cast<size_t>(y) * w;
        double* out = dst + static_cast<size_t>(y) * w;
        for (int x = x_begin; x < x_end; ++x) {
            double acc = 0.0;
            for (int t = 0; t < klen; ++t) {
                acc += k[t] * row[clamp_index(x + t - r, w)];
            }
            out[x] = acc;
        }
    }
}

inline void conv_cols_rows_scalar(const double* src, double* dst, int w, int h,
                                  const double* k, int klen, int y, int x_begin,
                                  int x_end) {
    const int r = klen / 2;
    double* out = dst + static_cast<size_t>(y) * w;
    for (int x = x_begin; x < x_end; ++x) {
        double acc = 0.0;
        for (int t = 0; t < klen; ++t) {
            const double* row = src + static_cast<size_t>(clamp_index(y + t - r, h)) * w;
            acc += k[t] * row[x];
        }
        out[x] = acc;
    }
}

inline void bilinear_gather_one_scalar(const double* src, int sw, int sh,
                                       double x, double y, double* dst,
                                       uint8_t* valid) {
    if (!(x >= 0.0 && x <= sw - 1 && y >= 0.0 && y <= sh - 1)) {
        *dst = 0.0;
        if (valid) *valid = 0;
        return;
    }
    if (sw < 2 || sh < 2) {
        // Degenerate raster: nearest sample.
        int xi = clamp_index(static_cast<int>(x + 0.5), sw);
        int yi = clamp_index(static_cast<int>(y + 0.5), sh);
        *dst = src[static_cast<size_t>(yi) * sw + xi];
        if (valid) *valid = 1;
        return;
    }
    int x0 = static_cast<int>(x);
    int y0 = static_cast<int>(y);
    if (x0 > sw - 2) x0 = sw - 2;
    if (y0 > sh - 2) y0 = sh - 2;
    const double fx = x - x0;
    const double fy = y - y0;
    const double* p = src + static_cast<size_t>(y0) * sw + x0;
    // p00 + f*(p01-p00) keeps constant images exactly constant.
    const double top = p[0] + fx * (p[1] - p[0]);
    const double bot = p[sw] + fx * (p[sw + 1] - p[sw]);
    *dst = top + fy * (bot - top);
    if (valid) *valid = 1;
}

} // namespace lanedet::kernels::detail
