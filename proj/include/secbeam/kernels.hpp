#pragma once

#include <complex>

namespace secbeam::kernels {

using cplx = std::complex<double>;

/// Function table for the hot numeric primitives. `cdot` is the conjugated
/// dot product sum_i conj(a_i) b_i; `quad_form` is Re(h^H M h) with M stored
/// column-major n x n; `matvec_adj` computes y = A^H x for column-major A.
struct Ops {
    cplx (*cdot)(const cplx* a, const cplx* b, int n);
    double (*quad_form)(const cplx* h, const cplx* m, int n);
    void (*matvec_adj)(const cplx* a, int rows, int cols, const cplx* x, cplx* y);
    const char* name;
};

namespace scalar {
cplx cdot(const cplx* a, const cplx* b, int n);
double quad_form(const cplx* h, const cplx* m, int n);
void matvec_adj(const cplx* a, int rows, int cols, const cplx* x, cplx* y);
}  // namespace scalar

#if defined(SECBEAM_HAVE_AVX2_TU)
namespace avx2 {
cplx cdot(const cplx* a, const cplx* b, int n);
double quad_form(const cplx* h, const cplx* m, int n);
void matvec_adj(const cplx* a, int rows, int cols, const cplx* x, cplx* y);
}  // namespace avx2
#endif

/// True when the AVX2 variants are compiled in and the CPU supports them
/// (and SECBEAM_NO_AVX2 is not set in the environment).
bool avx2_active();

/// Dispatched table, resolved once at first use.
const Ops& ops();

inline cplx cdot(const cplx* a, const cplx* b, int n) { return ops().cdot(a, b, n); }
inline double quad_form(const cplx* h, const cplx* m, int n) { return ops().quad_form(h, m, n); }
inline void matvec_adj(const cplx* a, int rows, int cols, const cplx* x, cplx* y) {
    ops().matvec_adj(a, rows, cols, x, y);
}

}  // namespace secbeam::kernels
