#pragma once

#include <cstdint>
#include <string>

namespace lanedet::kernels {

// Raster inner loops used by the warp, filter and histogram stages. Each
// operation has a scalar reference implementation and SIMD variants; the
// active variant is picked at runtime from CPU capabilities. All variants
// are required to produce bit-identical output (same per-element operation
// order, no FMA contraction), which the kernel tests enforce.

enum class Backend {
    scalar,
    avx2,
    neon,
};

const char* backend_name(Backend b);

// Best backend the running CPU supports.
Backend best_supported_backend();

// Currently selected backend (auto-detected on first use).
Backend active_backend();

// Force a backend; throws std::runtime_error if unsupported on this CPU.
void set_backend(Backend b);

// Horizontal 1-D convolution, replicated borders. klen odd.
// dst[y,x] = sum_t k[t] * src[y, clamp(x + t - klen/2)]
void conv_rows(const double* src, double* dst, int w, int h,
               const double* k, int klen);

// Vertical 1-D convolution, replicated borders. klen odd.
// dst[y,x] = sum_t k[t] * src[clamp(y + t - klen/2), x]
void conv_cols(const double* src, double* dst, int w, int h,
               const double* k, int klen);

// Bilinear gather: dst[i] = src sampled at (xs[i], ys[i]); samples outside
// [0,sw-1]x[0,sh-1] produce 0 and valid[i] = 0. valid may be null.
void bilinear_gather(const double* src, int sw, int sh,
                     const double* xs, const double* ys, int n,
                     double* dst, uint8_t* valid);

// out[x] = sum over rows y of src[y,x], accumulated in ascending y.
void column_sums(const double* src, int w, int h, double* out);

// dst[i] = max(src[i], 0)
void clamp_nonnegative(const double* src, double* dst, int n);

// dst[i] = src[i] >= threshold ? src[i] : 0
void threshold_keep_ge(const double* src, double* dst, int n, double threshold);

} // namespace lanedet::kernels
