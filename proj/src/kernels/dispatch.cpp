#include "lanedet/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <cstring>
#include <stdexcept>

#include "kernels_internal.hpp"

namespace lanedet::kernels {

using detail::KernelTable;

namespace {

bool backend_supported(Backend b) {
    switch (b) {
    case Backend::scalar:
        return true;
    case Backend::avx2:
#if LANEDET_KERNELS_HAVE_AVX2
        return __builtin_cpu_supports("avx2") != 0;
#else
        return false;
#endif
    case Backend::neon:
#if LANEDET_KERNELS_HAVE_NEON
        return true;
#else
        return false;
#endif
    }
    return false;
}

const KernelTable* table_for(Backend b) {
    switch (b) {
#if LANEDET_KERNELS_HAVE_AVX2
    case Backend::avx2:
        return &detail::avx2_table();
#endif
#if LANEDET_KERNELS_HAVE_NEON
    case Backend::neon:
        return &detail::neon_table();
#endif
    default:
        return &detail::scalar_table();
    }
}

struct Dispatch {
    std::atomic<Backend> backend;
    std::atomic<const KernelTable*> table;
    Dispatch() {
        Backend b = best_supported_backend();
        // LANEDET_KERNELS=scalar|avx2|neon overrides auto-detection, e.g. to
        // cross-check full-pipeline results between variants.
        if (const char* env = std::getenv("LANEDET_KERNELS")) {
            for (Backend cand : {Backend::scalar, Backend::avx2, Backend::neon}) {
                if (std::strcmp(env, backend_name(cand)) == 0 && backend_supported(cand)) {
                    b = cand;
                }
            }
        }
        backend.store(b);
        table.store(table_for(b));
    }
};

Dispatch& dispatch() {
    static Dispatch d;
    return d;
}

const KernelTable& active() { return *dispatch().table.load(std::memory_order_relaxed); }

} // namespace

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::scalar: return "scalar";
    case Backend::avx2: return "avx2";
    case Backend::neon: return "neon";
    }
    return "unknown";
}

Backend best_supported_backend() {
    if (backend_supported(Backend::avx2)) return Backend::avx2;
    if (backend_supported(Backend::neon)) return Backend::neon;
    return Backend::scalar;
}

Backend active_backend() { return dispatch().backend.load(std::memory_order_relaxed); }

void set_backend(Backend b) {
    if (!backend_supported(b)) {
        throw std::runtime_error(std::string("kernel backend not supported on this CPU: ") +
                                 backend_name(b));
    }
    dispatch().backend.store(b);
    dispatch().table.store(table_for(b));
}

void conv_rows(const double* src, double* dst, int w, int h,
               const double* k, int klen) {
    active().conv_rows(src, dst, w, h, k, klen);
}

void conv_cols(const double* src, double* dst, int w, int h,
               const double* k, int klen) {
    active().conv_cols(src, dst, w, h, k, klen);
}

void bilinear_gather(const double* src, int sw, int sh,
                     const double* xs, const double* ys, int n,
                     double* dst, uint8_t* valid) {
    active().bilinear_gather(src, sw, sh, xs, ys, n, dst, valid);
}

void column_sums(const double* src, int w, int h, double* out) {
    active().column_sums(src, w, h, out);
}

void clamp_nonnegative(const double* src, double* dst, int n) {
    active().clamp_nonnegative(src, dst, n);
}

void threshold_keep_ge(const double* src, double* dst, int n, double threshold) {
    active().threshold_keep_ge(src, dst, n, threshold);
}

} // namespace lanedet::kernels
