#include "secbeam/kernels.hpp"

#include <cstdlib>

namespace secbeam::kernels {

namespace scalar {

cplx cdot(const cplx* a, const cplx* b, int n) {
    double re = 0.0, im = 0.0;
    for (int i = 0; i < n; ++i) {
        const double ar = a[i].real(), ai = a[i].imag();
        const double br = b[i].real(), bi = b[i].imag();
        re += ar * br + ai * bi;
        im += ar * bi - ai * br;
    }
    return {re, im};
}

double quad_form(const cplx* h, const cplx* m, int n) {
    // h^H M h = sum_j (h^H m_col_j) h_j; the result is real for Hermitian M.
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

}  // namespace scalar

bool avx2_active() {
#if defined(SECBEAM_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(_M_X64))
    static const bool active = [] {
        if (std::getenv("SECBEAM_NO_AVX2") != nullptr) return false;
        return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
    }();
    return active;
#else
    return false;
#endif
}

const Ops& ops() {
    static const Ops table = [] {
#if defined(SECBEAM_HAVE_AVX2_TU)
        if (avx2_active()) {
            return Ops{&avx2::cdot, &avx2::quad_form, &avx2::matvec_adj, "avx2"};
        }
#endif
        return Ops{&scalar::cdot, &scalar::quad_form, &scalar::matvec_adj, "scalar"};
    }();
    return table;
}

}  // namespace secbeam::kernels
