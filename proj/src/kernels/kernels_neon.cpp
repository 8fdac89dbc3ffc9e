#if defined(__aarch64__)

#include "kernels_internal.hpp"

#include <arm_neon.h>

#include <cstring>

// 2-wide float64 NEON variants. Same per-element operation order as the
// scalar reference (separate mul and add, no vfma) so results match
// bit for bit.

namespace lanedet::kernels::detail {
namespace {

void conv_rows_neon(const double* src, double* dst, int w, int h,
                    const double* k, int klen) {
    const int r = klen / 2;
    const int interior_end = w - r;
    for (int y = 0; y < h; ++y) {
        const double* row = src + static_cast<size_t>(y) * w;
        double* out = dst + static_cast<size_t>(y) * w;
        int x = 0;
        for (; x < r && x < w; ++x) {
            double acc = 0.0;
            for (int t = 0; t < klen; ++t) acc += k[t] * row[clamp_index(x + t - r, w)];
            out[x] = acc;
        }
        for (; x + 2 <= interior_end; x += 2) {
            float64x2_t acc = vdupq_n_f64(0.0);
            for (int t = 0; t < klen; ++t) {
                float64x2_t kv = vdupq_n_f64(k[t]);
                acc = vaddq_f64(acc, vmulq_f64(kv, vld1q_f64(row + x + t - r)));
            }
            vst1q_f64(out + x, acc);
        }
        for (; x < w; ++x) {
            double acc = 0.0;
            for (int t = 0; t < klen; ++t) acc += k[t] * row[clamp_index(x + t - r, w)];
            out[x] = acc;
        }
    }
}

void conv_cols_neon(const double* src, double* dst, int w, int h,
                    const double* k, int klen) {
    const int r = klen / 2;
    for (int y = 0; y < h; ++y) {
        double* out = dst + static_cast<size_t>(y) * w;
        int x = 0;
        for (; x + 2 <= w; x += 2) {
            float64x2_t acc = vdupq_n_f64(0.0);
            for (int t = 0; t < klen; ++t) {
                const double* row = src + static_cast<size_t>(clamp_index(y + t - r, h)) * w;
                acc = vaddq_f64(acc, vmulq_f64(vdupq_n_f64(k[t]), vld1q_f64(row + x)));
            }
            vst1q_f64(out + x, acc);
        }
        if (x < w) conv_cols_rows_scalar(src, dst, w, h, k, klen, y, x, w);
    }
}

void bilinear_gather_neon(const double* src, int sw, int sh,
                          const double* xs, const double* ys, int n,
                          double* dst, uint8_t* valid) {
    // No native gather; scalar reference per element.
    for (int i = 0; i < n; ++i) {
        bilinear_gather_one_scalar(src, sw, sh, xs[i], ys[i], dst + i,
                                   valid ? valid + i : nullptr);
    }
}

void column_sums_neon(const double* src, int w, int h, double* out) {
    std::memset(out, 0, sizeof(double) * static_cast<size_t>(w));
    for (int y = 0; y < h; ++y) {
        const double* row = src + static_cast<size_t>(y) * w;
        int x = 0;
        for (; x + 2 <= w; x += 2) {
            float64x2_t acc = vld1q_f64(out + x);
            vst1q_f64(out + x, vaddq_f64(acc, vld1q_f64(row + x)));
        }
        for (; x < w; ++x) out[x] += row[x];
    }
}

void clamp_nonnegative_neon(const double* src, double* dst, int n) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    int i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(src + i);
        uint64x2_t neg = vcltq_f64(v, zero);
        vst1q_f64(dst + i, vbslq_f64(neg, zero, v));
    }
    for (; i < n; ++i) dst[i] = src[i] < 0.0 ? 0.0 : src[i];
}

void threshold_keep_ge_neon(const double* src, double* dst, int n,
                            double threshold) {
    const float64x2_t zero = vdupq_n_f64(0.0);
    const float64x2_t thr = vdupq_n_f64(threshold);
    int i = 0;
    for (; i + 2 <= n; i += 2) {
        float64x2_t v = vld1q_f64(src + i);
        uint64x2_t keep = vcgeq_f64(v, thr);
        vst1q_f64(dst + i, vbslq_f64(keep, v, zero));
    }
    for (; i < n; ++i) dst[i] = src[i] >= threshold ? src[i] : 0.0;
}

} // namespace

const KernelTable& neon_table() {
    static const KernelTable table = {
        conv_rows_neon,
        conv_cols_neon,
        bilinear_gather_neon,
        column_sums_neon,
        clamp_nonnegative_neon,
        threshold_keep_ge_neon,
    };
    return table;
}

} // namespace lanedet::kernels::detail

#endif // __aarch64__
