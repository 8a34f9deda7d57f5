#include "veoact/kernels.hpp"

#include <atomic>
#include <cmath>
#include <cstring>

#include "veoact/error.hpp"

namespace veoact::kernels {

// ---------------------------------------------------------------------------
// Scalar reference kernels. These define the semantics; the SIMD variants
// must agree with them to rounding.
// ---------------------------------------------------------------------------
namespace scalar {

double dot(const double* x, const double* y, std::size_t n) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
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
    for (std::size_t i = 0; i < n; ++i) {
        const double g = grad[i];
        m[i] = s.beta1 * m[i] + (1.0 - s.beta1) * g;
        v[i] = s.beta2 * v[i] + (1.0 - s.beta2) * g * g;
        const double mhat = m[i] * s.inv_bias1;
        const double vhat = v[i] * s.inv_bias2;
        param[i] -= s.lr * (mhat / (std::sqrt(vhat) + s.eps) + s.weight_decay * param[i]);
    }
}

void relu(const double* z, double* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) a[i] = z[i] > 0.0 ? z[i] : 0.0;
}

void relu_backward(const double* z, double* dz, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) {
        if (z[i] <= 0.0) dz[i] = 0.0;
    }
}

}  // namespace scalar

const Backend& scalar_backend() {
    static const Backend backend{
        "scalar",       scalar::dot,   scalar::axpy,  scalar::gemv,
        scalar::gemv_t, scalar::ger,   scalar::adamw, scalar::relu,
        scalar::relu_backward,
    };
    return backend;
}

// ---------------------------------------------------------------------------
// Dispatch
// ---------------------------------------------------------------------------

namespace {

const Backend* pick_default() {
    if (const Backend* avx2 = avx2_backend()) return avx2;
    return &scalar_backend();
}

std::atomic<const Backend*> g_active{nullptr};

}  // namespace

const Backend& active() {
    const Backend* b = g_active.load(std::memory_order_acquire);
    if (!b) {
        b = pick_default();
        g_active.store(b, std::memory_order_release);
    }
    return *b;
}

void force_backend(const std::string& name) {
    if (name == "auto") {
        g_active.store(pick_default(), std::memory_order_release);
    } else if (name == "scalar") {
        g_active.store(&scalar_backend(), std::memory_order_release);
    } else if (name == "avx2") {
        const Backend* b = avx2_backend();
        if (!b) throw Error("avx2 backend not available on this machine");
        g_active.store(b, std::memory_order_release);
    } else {
        throw Error("unknown kernel backend: " + name);
    }
}

}  // namespace veoact::kernels
