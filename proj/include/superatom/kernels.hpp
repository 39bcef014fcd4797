#pragma once

// Data-parallel inner loops with a scalar reference implementation and
// optional SIMD variants. The variant is picked once per process from the
// CPU feature bits; SUPERATOM_KERNELS=scalar|avx2 overrides the choice.

#include <complex>
#include <cstddef>
#include <string_view>

namespace superatom::kernels {

using Complex = std::complex<double>;

enum class Isa { scalar, avx2 };

// C = A * B for square column-major n x n matrices. C must not alias A or B.
using MatmulFn = void (*)(std::size_t n, const Complex* a, const Complex* b, Complex* c);

// y = A * x for a column-major n x n matrix. y must not alias x.
using MatvecFn = void (*)(std::size_t n, const Complex* a, const Complex* x, Complex* y);

// Wigner quasi-probability of a dim x dim column-major density matrix at
// `count` phase-space points alpha = (x + i p)/sqrt(2), given as split
// real/imaginary arrays. Writes one real value per point.
using WignerFn = void (*)(std::size_t dim, const Complex* rho, std::size_t count,
                          const double* alpha_re, const double* alpha_im, double* out);

struct KernelTable {
  Isa isa;
  MatmulFn matmul;
  MatvecFn matvec;
  WignerFn wigner;
};

bool available(Isa isa);

// Table for a specific ISA; throws std::invalid_argument if unavailable.
const KernelTable& table(Isa isa);

// Process-wide selection (cached after the first call).
const KernelTable& active();

std::string_view name(Isa isa);

namespace scalar {
void matmul(std::size_t n, const Complex* a, const Complex* b, Complex* c);
void matvec(std::size_t n, const Complex* a, const Complex* x, Complex* y);
void wigner(std::size_t dim, const Complex* rho, std::size_t count, const double* alpha_re,
            const double* alpha_im, double* out);
}  // namespace scalar

#ifdef SUPERATOM_WITH_AVX2
namespace avx2 {
void matmul(std::size_t n, const Complex* a, const Complex* b, Complex* c);
void matvec(std::size_t n, const Complex* a, const Complex* x, Complex* y);
void wigner(std::size_t dim, const Complex* rho, std::size_t count, const double* alpha_re,
            const double* alpha_im, double* out);
}  // namespace avx2
#endif

}  // namespace superatom::kernels
