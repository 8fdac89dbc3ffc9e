#if defined(__x86_64__) || defined(_M_X64)

#include "kernels_internal.hpp"

#include <immintrin.h>

#include <cstring>

// Compiled with -mavx2 (no FMA: results must stay bit-identical with the
// scalar reference, which evaluates mul and add separately).

namespace lanedet::kernels::detail {
namespace {

void conv_rows_avx2(const double* src, double* dst, int w, int h,
                    const double* k, int klen) {
    const int r = klen / 2;
    const int interior_end = w - r; // first x whose window needs clamping on the right
    for (int y = 0; y < h; ++y) {
        const double* row = src + static_cast<size_t>(y) * w;
        double* out = dst + static_cast<size_t>(y) * w;
        int x = 0;
        for (; x < r && x < w; ++x) {
            double acc = 0.0;
            for (int t = 0; t < klen; ++t) acc += k[t] * row[clamp_index(x + t - r, w)];
            out[x] = acc;
        }
        for (; x + 4 <= interior_end; x += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (int t = 0; t < klen; ++t) {
                __m256d kv = _mm256_set1_pd(k[t]);
                __m256d sv = _mm256_loadu_pd(row + x + t - r);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(kv, sv));
            }
            _mm256_storeu_pd(out + x, acc);
        }
        for (; x < w; ++x) {
            double acc = 0.0;
            for (int t = 0; t < klen; ++t) acc += k[t] * row[clamp_index(x + t - r, w)];
            out[x] = acc;
        }
    }
}

void conv_cols_avx2(const double* src, double* dst, int w, int h,
                    const double* k, int klen) {
    const int r = klen / 2;
    for (int y = 0; y < h; ++y) {
        double* out = dst + static_cast<size_t>(y) * w;
        int x = 0;
        for (; x + 4 <= w; x += 4) {
            __m256d acc = _mm256_setzero_pd();
            for (int t = 0; t < klen; ++t) {
                const double* row = src + static_cast<size_t>(clamp_index(y + t - r, h)) * w;
                __m256d kv = _mm256_set1_pd(k[t]);
                acc = _mm256_add_pd(acc, _mm256_mul_pd(kv, _mm256_loadu_pd(row + x)));
            }
            _mm256_storeu_pd(out + x, acc);
        }
        if (x < w) conv_cols_rows_scalar(src, dst, w, h, k, klen, y, x, w);
    }
}

void bilinear_gather_avx2(const double* src, int sw, int sh,
                          const double* xs, const double* ys, int n,
                          double* dst, uint8_t* valid) {
    if (sw < 2 || sh < 2) {
        for (int i = 0; i < n; ++i) {
            bilinear_gather_one_scalar(src, sw, sh, xs[i], ys[i], dst + i,
                                       valid ? valid + i : nullptr);
        }
        return;
    }
    const __m256d zero = _mm256_setzero_pd();
    const __m256d xmax = _mm256_set1_pd(static_cast<double>(sw - 1));
    const __m256d ymax = _mm256_set1_pd(static_cast<double>(sh - 1));
    const __m256d x0cap = _mm256_set1_pd(static_cast<double>(sw - 2));
    const __m256d y0cap = _mm256_set1_pd(static_cast<double>(sh - 2));
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d x = _mm256_loadu_pd(xs + i);
        __m256d y = _mm256_loadu_pd(ys + i);
        __m256d ok = _mm256_and_pd(
            _mm256_and_pd(_mm256_cmp_pd(x, zero, _CMP_GE_OQ),
                          _mm256_cmp_pd(x, xmax, _CMP_LE_OQ)),
            _mm256_and_pd(_mm256_cmp_pd(y, zero, _CMP_GE_OQ),
                          _mm256_cmp_pd(y, ymax, _CMP_LE_OQ)));
        if (_mm256_movemask_pd(ok) != 0xF) {
            // Any out-of-range lane: take the scalar path for this group.
            for (int j = i; j < i + 4; ++j) {
                bilinear_gather_one_scalar(src, sw, sh, xs[j], ys[j], dst + j,
                                           valid ? valid + j : nullptr);
            }
            continue;
        }
        __m256d x0d = _mm256_min_pd(_mm256_floor_pd(x), x0cap);
        __m256d y0d = _mm256_min_pd(_mm256_floor_pd(y), y0cap);
        __m256d fx = _mm256_sub_pd(x, x0d);
        __m256d fy = _mm256_sub_pd(y, y0d);
        __m128i x0 = _mm256_cvttpd_epi32(x0d);
        __m128i y0 = _mm256_cvttpd_epi32(y0d);
        __m128i idx = _mm_add_epi32(_mm_mullo_epi32(y0, _mm_set1_epi32(sw)), x0);
        __m256d p00 = _mm256_i32gather_pd(src, idx, 8);
        __m256d p01 = _mm256_i32gather_pd(src, _mm_add_epi32(idx, _mm_set1_epi32(1)), 8);
        __m128i idx2 = _mm_add_epi32(idx, _mm_set1_epi32(sw));
        __m256d p10 = _mm256_i32gather_pd(src, idx2, 8);
        __m256d p11 = _mm256_i32gather_pd(src, _mm_add_epi32(idx2, _mm_set1_epi32(1)), 8);
        __m256d top = _mm256_add_pd(p00, _mm256_mul_pd(fx, _mm256_sub_pd(p01, p00)));
        __m256d bot = _mm256_add_pd(p10, _mm256_mul_pd(fx, _mm256_sub_pd(p11, p10)));
        __m256d res = _mm256_add_pd(top, _mm256_mul_pd(fy, _mm256_sub_pd(bot, top)));
        _mm256_storeu_pd(dst + i, res);
        if (valid) std::memset(valid + i, 1, 4);
    }
    for (; i < n; ++i) {
        bilinear_gather_one_scalar(src, sw, sh, xs[i], ys[i], dst + i,
                                   valid ? valid + i : nullptr);
    }
}

void column_sums_avx2(const double* src, int w, int h, double* out) {
    std::memset(out, 0, sizeof(double) * static_cast<size_t>(w));
    for (int y = 0; y < h; ++y) {
        const double* row = src + static_cast<size_t>(y) * w;
        int x = 0;
        for (; x + 4 <= w; x += 4) {
            __m256d acc = _mm256_loadu_pd(out + x);
            acc = _mm256_add_pd(acc, _mm256_loadu_pd(row + x));
            _mm256_storeu_pd(out + x, acc);
        }
        for (; x < w; ++x) out[x] += row[x];
    }
}

void clamp_nonnegative_avx2(const double* src, double* dst, int n) {
    const __m256d zero = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(src + i);
        __m256d neg = _mm256_cmp_pd(v, zero, _CMP_LT_OQ);
        _mm256_storeu_pd(dst + i, _mm256_blendv_pd(v, zero, neg));
    }
    for (; i < n; ++i) dst[i] = src[i] < 0.0 ? 0.0 : src[i];
}

void threshold_keep_ge_avx2(const double* src, double* dst, int n,
                            double threshold) {
    const __m256d zero = _mm256_setzero_pd();
    const __m256d thr = _mm256_set1_pd(threshold);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d v = _mm256_loadu_pd(src + i);
        __m256d keep = _mm256_cmp_pd(v, thr, _CMP_GE_OQ);
        _mm256_storeu_pd(dst + i, _mm256_blendv_pd(zero, v, keep));
    }
    for (; i < n; ++i) dst[i] = src[i] >= threshold ? src[i] : 0.0;
}

} // namespace

const KernelTable& avx2_table() {
    static const KernelTable table = {
        conv_rows_avx2,
        conv_cols_avx2,
        bilinear_gather_avx2,
        column_sums_avx2,
        clamp_nonnegative_avx2,
        threshold_keep_ge_avx2,
    };
    return table;
}

} // namespace lanedet::kernels::detail

#endif // x86_64
