// AVX2 + FMA variants of the kernel set. Compiled with -mavx2 -mfma on x86_64
// builds; the runtime CPU check below keeps the dispatcher honest when the
// binary runs on an older machine.

#include "veoact/kernels.hpp"

#if defined(__AVX2__) && defined(__FMA__)
#define VEOACT_KERNELS_AVX2 1
#include <immintrin.h>
#else
#define VEOACT_KERNELS_AVX2 0
#endif

#include <cmath>
#include <cstring>

namespace veoact::kernels {

#if VEOACT_KERNELS_AVX2

namespace avx2 {

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    __m128d swapped = _mm_unpackhi_pd(lo, lo);
    return _mm_cvtsd_f64(_mm_add_sd(lo, swapped));
}

double dot(const double* x, const double* y, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i + 4), _mm256_loadu_pd(y + i + 4), acc1);
    }
    for (; i + 4 <= n; i += 4) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), acc0);
    }
    double acc = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(a);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        __m256d vy = _mm256_loadu_pd(y + i);
        vy = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), vy);
        _mm256_storeu_pd(y + i, vy);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void gemv(const double* w, const double* x, const double* b, double* y,
          std::size_t rows, std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        y[r] = b[r] + dot(w + r * cols, x, cols);
    }
}

void gemv_t(const double* w, const double* dy, double* dx, std::size_t rows,
            std::size_t cols) {
    std::memset(dx, 0, cols * sizeof(double));
    for (std::size_t r = 0; r < rows; ++r) {
        axpy(dy[r], w + r * cols, dx, cols);
    }
}

void ger(const double* dy, const double* x, double* dw, std::size_t rows,
         std::size_t cols) {
    for (std::size_t r = 0; r < rows; ++r) {
        axpy(dy[r], x, dw + r * cols, cols);
    }
}

void adamw(double* param, const double* grad, double* m, double* v, std::size_t n,
           const AdamScalars& s) {
    const __m256d b1 = _mm256_set1_pd(s.beta1);
    const __m256d b2 = _mm256_set1_pd(s.beta2);
    const __m256d one_m_b1 = _mm256_set1_pd(1.0 - s.beta1);
    const __m256d one_m_b2 = _mm256_set1_pd(1.0 - s.beta2);
    const __m256d ib1 = _mm256_set1_pd(s.inv_bias1);
    const __m256d ib2 = _mm256_set1_pd(s.inv_bias2);
    const __m256d eps = _mm256_set1_pd(s.eps);
    const __m256d lr = _mm256_set1_pd(s.lr);
    const __m256d wd = _mm256_set1_pd(s.weight_decay);

    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d g = _mm256_loadu_pd(grad + i);
        __m256d mi = _mm256_loadu_pd(m + i);
        __m256d vi = _mm256_loadu_pd(v + i);
        mi = _mm256_add_pd(_mm256_mul_pd(b1, mi), _mm256_mul_pd(one_m_b1, g));
        vi = _mm256_add_pd(_mm256_mul_pd(b2, vi),
                           _mm256_mul_pd(one_m_b2, _mm256_mul_pd(g, g)));
        _mm256_storeu_pd(m + i, mi);
        _mm256_storeu_pd(v + i, vi);
        const __m256d mhat = _mm256_mul_pd(mi, ib1);
        const __m256d vhat = _mm256_mul_pd(vi, ib2);
        const __m256d denom = _mm256_add_pd(_mm256_sqrt_pd(vhat), eps);
        __m256d p = _mm256_loadu_pd(param + i);
        __m256d update = _mm256_add_pd(_mm256_div_pd(mhat, denom), _mm256_mul_pd(wd, p));
        p = _mm256_sub_pd(p, _mm256_mul_pd(lr, update));
        _mm256_storeu_pd(param + i, p);
    }
    for (; i < n; ++i) {
        const double g = grad[i];
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g;
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g * g;
        const double mhat = m[i] * s.inv_bias1;
        const double vhat = v[i] * s.inv_bias2;
        param[i] -= s.lr * (mhat / (std::sqrt(vhat) + s.eps) + s.weight_decay * param[i]);
    }
}

void relu(const double* z, double* a, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(a + i, _mm256_max_pd(_mm256_loadu_pd(z + i), zero));
    }
    for (; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward(const double* z, double* dz, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(z + i), zero, _CMP_GT_OQ);
        _mm256_storeu_pd(dz + i, _mm256_and_pd(_mm256_loadu_pd(dz + i), mask));
    }
    for (; i < n; ++i) {
        if (z[i] <= 0.0) dz[i] = 0.0;
    }
}

}  // namespace avx2

const Backend* avx2_backend() {
    static const bool supported =
        __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    if (!supported) return nullptr;
    static const Backend backend{
        "avx2",       avx2::dot,   avx2::axpy,  avx2::gemv,
        avx2::gemv_t, avx2::ger,   avx2::adamw, avx2::relu,
        avx2::relu_backward,
    };
    return &backend;
}

#else  // !VEOACT_KERNELS_AVX2

const Backend* avx2_backend() { return nullptr; }

#endif

}  // namespace veoact::kernels
