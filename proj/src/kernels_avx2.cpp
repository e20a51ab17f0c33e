// AVX2+FMA variants of the complex primitives. Compiled with -mavx2 -mfma;
// selection against the scalar reference happens at runtime in kernels.cpp.

#include <immintrin.h>

#include "secbeam/kernels.hpp"

namespace secbeam::kernels::avx2 {

namespace {

// Accumulates conj(a)*b over a 256-bit lane pair. With a = (ar0,ai0,ar1,ai1)
// and b likewise, the real parts live in even lanes of ar*br + ai*bi and the
// imaginary parts in odd lanes of ar*bi - ai*br.
struct DotAcc {
    __m256d acc1 = _mm256_setzero_pd();  // a_re * b
    __m256d acc2 = _mm256_setzero_pd();  // a_im * swap(b)

    void step(const double* pa, const double* pb) {
        const __m256d va = _mm256_loadu_pd(pa);
        const __m256d vb = _mm256_loadu_pd(pb);
        const __m256d vb_swap = _mm256_permute_pd(vb, 0x5);
        const __m256d va_re = _mm256_movedup_pd(va);
        const __m256d va_im = _mm256_permute_pd(va, 0xF);
        acc1 = _mm256_fmadd_pd(va_re, vb, acc1);
        acc2 = _mm256_fmadd_pd(va_im, vb_swap, acc2);
    }

    cplx reduce() const {
        alignas(32) double t1[4], t2[4];
        _mm256_store_pd(t1, acc1);
        _mm256_store_pd(t2, acc2);
        const double re = (t1[0] + t2[0]) + (t1[2] + t2[2]);
        const double im = (t1[1] - t2[1]) + (t1[3] - t2[3]);
        return {re, im};
    }
};

}  // namespace

cplx cdot(const cplx* a, const cplx* b, int n) {
    const double* pa = reinterpret_cast<const double*>(a);
    const double* pb = reinterpret_cast<const double*>(b);
    DotAcc acc;
    int i = 0;
    for (; i + 2 <= n; i += 2) {
        acc.step(pa + 2 * i, pb + 2 * i);
    }
    cplx out = acc.reduce();
    for (; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        out += cplx{ar * br + ai * bi, ar * bi - ai * br};
    }
    return out;
}

double quad_form(const cplx* h, const cplx* m, int n) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
        const cplx t = cdot(h, m + static_cast<std::ptrdiff_t>(j) * n, n);
        acc += t.real() * h[j].real() - t.imag() * h[j].imag();
    }
    return acc;
}

void matvec_adj(const cplx* a, int rows, int cols, const cplx* x, cplx* y) {
    for (int j = 0; j < cols; ++j) {
        y[j] = cdot(a + static_cast<std::ptrdiff_t>(j) * rows, x, rows);
    }
}

}  // namespace secbeam::kernels::avx2
