#include "kernels_internal.hpp"

#include <cstring>

namespace lanedet::kernels::detail {
namespace {

void conv_rows_scalar(const double* src, double* dst, int w, int h,
                      const double* k, int klen) {
    conv_rows_span_scalar(src, dst, w, h, k, klen, 0, w);
}

void conv_cols_scalar(const double* src, double* dst, int w, int h,
                      const double* k, int klen) {
    for (int y = 0; y < h; ++y) {
        conv_cols_rows_scalar(src, dst, w, h, k, klen, y, 0, w);
    }
}

void bilinear_gather_scalar(const double* src, int sw, int sh,
                            const double* xs, const double* ys, int n,
                            double* dst, uint8_t* valid) {
    for (int i = 0; i < n; ++i) {
        bilinear_gather_one_scalar(src, sw, sh, xs[i], ys[i], dst + i,
                                   valid ? valid + i : nullptr);
    }
}

void column_sums_scalar(const double* src, int w, int h, double* out) {
    std::memset(out, 0, sizeof(double) * static_cast<size_t>(w));
    for (int y = 0; y < h; ++y) {
        const double* row = src + static_cast<size_t>(y) * w;
        for (int x = 0; x < w; ++x) {
            out[x] += row[x];
        }
    }
}

void clamp_nonnegative_scalar(const double* src, double* dst, int n) {
    for (int i = 0; i < n; ++i) {
        dst[i] = src[i] < 0.0 ? 0.0 : src[i];
    }
}

void threshold_keep_ge_scalar(const double* src, double* dst, int n,
                              double threshold) {
    for (int i = 0; i < n; ++i) {
        dst[i] = src[i] >= threshold ? src[i] : 0.0;
    }
}

} // namespace

const KernelTable& scalar_table() {
    static const KernelTable table = {
        conv_rows_scalar,
        conv_cols_scalar,
        bilinear_gather_scalar,
        column_sums_scalar,
        clamp_nonnegative_scalar,
        threshold_keep_ge_scalar,
    };
    return table;
}

} // namespace lanedet::kernels::detail
