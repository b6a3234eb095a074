#include <immintrin.h>

#include <cstring>

#include "relocnet/kernels.hpp"

namespace relocnet::kernels {
namespace {

// Same i,k,j order as the scalar kernel; lanes run independent j columns so
// each c[i][j] sees the same sequence of fused multiply-adds.
void gemm_avx2(std::size_t m, std::size_t n, std::size_t k, const double* a,
               const double* b, double* c, bool accumulate) {
  if (!accumulate) std::memset(c, 0, m * n * sizeof(double));
  const std::size_t n4 = n & ~std::size_t(3);
  for (std::size_t i = 0; i < m; ++i) {
    const double* arow = a + i * k;
    double* crow = c + i * n;
    for (std::size_t kk = 0; kk < k; ++kk) {
      const __m256d av = _mm256_set1_pd(arow[kk]);
      const double* brow = b + kk * n;
      std::size_t j = 0;
      for (; j < n4; j += 4) {
        __m256d cv = _mm256_loadu_pd(crow + j);
        cv = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cv);
        _mm256_storeu_pd(crow + j, cv);
      }
      const double as = arow[kk];
      for (; j < n; ++j) crow[j] += as * brow[j];
    }
  }
}

void axpy_avx2(std::size_t n, double alpha, const double* x, double* y) {
  const __m256d av = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t(3);
  for (; i < n4; i += 4) {
    __m256d yv = _mm256_loadu_pd(y + i);
    yv = _mm256_fmadd_pd(av, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_add_avx2(std::size_t n, double alpha, double beta, const double* x,
                    double* y) {
  const __m256d av = _mm256_set1_pd(alpha);
  const __m256d bv = _mm256_set1_pd(beta);
  std::size_t i = 0;
  const std::size_t n4 = n & ~std::size_t(3);
  for (; i < n4; i += 4) {
    __m256d yv = _mm256_mul_pd(av, _mm256_loadu_pd(y + i));
    yv = _mm256_fmadd_pd(bv, _mm256_loadu_pd(x + i), yv);
    _mm256_storeu_pd(y + i, yv);
  }
  for (; i < n; ++i) y[i] = alpha * y[i] + beta * x[i];
}

}  // namespace

const KernelTable kAvx2 = {gemm_avx2, axpy_avx2, scale_add_avx2, "avx2"};

}  // namespace relocnet::kernels
