#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops behind the network math: a scalar reference
// implementation plus an AVX2 variant, selected once at startup by CPU
// probing. The two backends are equivalence-tested against each other;
// everything above this layer is backend-agnostic.
//
// All matrices are row-major double precision.
namespace veoact::kernels {

struct AdamScalars {
    double lr;
    double beta1;
    double beta2;
    double eps;
    double weight_decay;
    double inv_bias1;  // 1 / (1 - beta1^t)
    double inv_bias2;  // 1 / (1 - beta2^t)
};

struct Backend {
    const char* name;

    // sum_i x[i] * y[i]
    double (*dot)(const double* x, const double* y, std::size_t n);
    // y += a * x
    void (*axpy)(double a, const double* x, double* y, std::size_t n);
    // y = W x + b,  W is rows x cols
    void (*gemv)(const double* w, const double* x, const double* b, double* y,
                 std::size_t rows, std::size_t cols);
    // dx = W^T dy
    void (*gemv_t)(const double* w, const double* dy, double* dx, std::size_t rows,
                   std::size_t cols);
    // dW += dy x^T  (rank-1 accumulation)
    void (*ger)(const double* dy, const double* x, double* dw, std::size_t rows,
                std::size_t cols);
    // AdamW update of one parameter block, decoupled weight decay.
    void (*adamw)(double* param, const double* grad, double* m, double* v,
                  std::size_t n, const AdamScalars& s);
    // a = max(z, 0)
    void (*relu)(const double* z, double* a, std::size_t n);
    // dz[i] = z[i] > 0 ? dz[i] : 0
    void (*relu_backward)(const double* z, double* dz, std::size_t n);
};

const Backend& scalar_backend();

// nullptr when the binary was built without AVX2 support or the CPU lacks it.
const Backend* avx2_backend();

// The dispatched backend. Defaults to the best available; stable for the
// lifetime of the process unless force_backend is called.
const Backend& active();

// "scalar", "avx2" or "auto". Throws Error for unknown/unavailable names.
void force_backend(const std::string& name);

}  // namespace veoact::kernels
