#pragma once

#include <cstddef>
#include <string>

namespace relocnet::kernels {

// Row-major C(MxN) += / = A(MxK) * B(KxN). When accumulate is false C is
// overwritten. All variants keep the i,k,j accumulation order so scalar and
// SIMD results agree to rounding.
using GemmFn = void (*)(std::size_t m, std::size_t n, std::size_t k,
                        const double* a, const double* b, double* c,
                        bool accumulate);

// y[i] += alpha * x[i]
using AxpyFn = void (*)(std::size_t n, double alpha, const double* x, double* y);

// y[i] = alpha * y[i] + beta * x[i]   (momentum update step)
using ScaleAddFn = void (*)(std::size_t n, double alpha, double beta,
                            const double* x, double* y);

struct KernelTable {
  GemmFn gemm;
  AxpyFn axpy;
  ScaleAddFn scale_add;
  const char* name;
};

// Scalar reference kernels (always available).
extern const KernelTable kScalar;

#ifdef RELOCNET_BUILD_AVX2
extern const KernelTable kAvx2;
#endif

// Table selected at startup: AVX2 when the CPU supports it, scalar otherwise.
// RELOCNET_KERNEL=scalar|avx2 overrides the choice.
const KernelTable& active();
const char* active_name();

inline void gemm(std::size_t m, std::size_t n, std::size_t k, const double* a,
                 const double* b, double* c, bool accumulate = false) {
  active().gemm(m, n, k, a, b, c, accumulate);
}
inline void axpy(std::size_t n, double alpha, const double* x, double* y) {
  active().axpy(n, alpha, x, y);
}
inline void scale_add(std::size_t n, double alpha, double beta, const double* x,
                      double* y) {
  active().scale_add(n, alpha, beta, x, y);
}

}  // namespace relocnet::kernels
