// Compiled with -mavx2 -mfma; only reached through the dispatch table after
// a CPUID check.

#include "superatom/kernels.hpp"

#include <immintrin.h>

#include <cmath>
#include <numbers>
#include <vector>

namespace superatom::kernels::avx2 {
namespace {

// [ar0, ai0, ar1, ai1] * (br + i bi) for two packed complex numbers.
inline __m256d cmul_broadcast(__m256d a, __m256d br, __m256d bi) {
  const __m256d swapped = _mm256_permute_pd(a, 0b0101);
  return _mm256_fmaddsub_pd(a, br, _mm256_mul_pd(swapped, bi));
}

// y[0..n) += a[0..n) * b, complex; n counted in complex elements.
inline void caxpy(std::size_t n, const double* a, double br, double bi, double* y) {
  const __m256d vbr = _mm256_set1_pd(br);
  const __m256d vbi = _mm256_set1_pd(bi);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d y0 = _mm256_loadu_pd(y + 2 * i);
    __m256d y1 = _mm256_loadu_pd(y + 2 * i + 4);
    y0 = _mm256_add_pd(y0, cmul_broadcast(_mm256_loadu_pd(a + 2 * i), vbr, vbi));
    y1 = _mm256_add_pd(y1, cmul_broadcast(_mm256_loadu_pd(a + 2 * i + 4), vbr, vbi));
    _mm256_storeu_pd(y + 2 * i, y0);
    _mm256_storeu_pd(y + 2 * i + 4, y1);
  }
  for (; i + 2 <= n; i += 2) {
    __m256d y0 = _mm256_loadu_pd(y + 2 * i);
    y0 = _mm256_add_pd(y0, cmul_broadcast(_mm256_loadu_pd(a + 2 * i), vbr, vbi));
    _mm256_storeu_pd(y + 2 * i, y0);
  }
  for (; i < n; ++i) {
    const double ar = a[2 * i];
    const double ai = a[2 * i + 1];
    y[2 * i] += ar * br - ai * bi;
    y[2 * i + 1] += ar * bi + ai * br;
  }
}

}  // namespace

void matmul(std::size_t n, const Complex* a, const Complex* b, Complex* c) {
  const auto* ad = reinterpret_cast<const double*>(a);
  const auto* bd = reinterpret_cast<const double*>(b);
  auto* cd = reinterpret_cast<double*>(c);
  for (std::size_t j = 0; j < n; ++j) {
    double* cj = cd + 2 * j * n;
    for (std::size_t i = 0; i < 2 * n; ++i) cj[i] = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      const double br = bd[2 * (k + j * n)];
      const double bi = bd[2 * (k + j * n) + 1];
      if (br == 0.0 && bi == 0.0) continue;
      caxpy(n, ad + 2 * k * n, br, bi, cj);
    }
  }
}

void matvec(std::size_t n, const Complex* a, const Complex* x, Complex* y) {
  const auto* ad = reinterpret_cast<const double*>(a);
  const auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < 2 * n; ++i) yd[i] = 0.0;
  for (std::size_t k = 0; k < n; ++k) caxpy(n, ad + 2 * k * n, xd[2 * k], xd[2 * k + 1], yd);
}

// Same per-diagonal recurrence as the scalar kernel, four phase-space points
// per lane group.
void wigner(std::size_t dim, const Complex* rho, std::size_t count, const double* alpha_re,
            const double* alpha_im, double* out) {
  constexpr std::size_t kLanes = 4;
  const std::size_t vec_count = count - count % kLanes;
  if (vec_count < count) {
    scalar::wigner(dim, rho, count - vec_count, alpha_re + vec_count, alpha_im + vec_count,
                   out + vec_count);
  }
  if (vec_count == 0) return;

  std::vector<double> sq(dim + 1);
  for (std::size_t n = 0; n <= dim; ++n) sq[n] = std::sqrt(static_cast<double>(n));
  struct alignas(32) Lane4 { double d[4]; };
  std::vector<Lane4> wr_buf(dim), wi_buf(dim);
  auto* w0r = reinterpret_cast<__m256d*>(wr_buf.data());
  auto* w0i = reinterpret_cast<__m256d*>(wi_buf.data());
  const auto* rd = reinterpret_cast<const double*>(rho);
  const __m256d two = _mm256_set1_pd(2.0);

  for (std::size_t pt = 0; pt < vec_count; pt += kLanes) {
    const __m256d ar = _mm256_loadu_pd(alpha_re + pt);
    const __m256d ai = _mm256_loadu_pd(alpha_im + pt);
    const __m256d tar = _mm256_mul_pd(two, ar);
    const __m256d tai = _mm256_mul_pd(two, ai);
    const __m256d x = _mm256_mul_pd(_mm256_set1_pd(4.0), _mm256_fmadd_pd(ar, ar, _mm256_mul_pd(ai, ai)));

    alignas(32) double xs[kLanes];
    _mm256_store_pd(xs, x);
    alignas(32) double g[kLanes];
    for (std::size_t l = 0; l < kLanes; ++l) g[l] = std::exp(-0.5 * xs[l]) * std::numbers::inv_pi;
    w0r[0] = _mm256_load_pd(g);
    w0i[0] = _mm256_setzero_pd();
    for (std::size_t k = 1; k < dim; ++k) {
      const __m256d s = _mm256_set1_pd(sq[k]);
      const __m256d pr = _mm256_fmsub_pd(tar, w0r[k - 1], _mm256_mul_pd(tai, w0i[k - 1]));
      const __m256d pi = _mm256_fmadd_pd(tar, w0i[k - 1], _mm256_mul_pd(tai, w0r[k - 1]));
      w0r[k] = _mm256_div_pd(pr, s);
      w0i[k] = _mm256_div_pd(pi, s);
    }

    __m256d acc = _mm256_setzero_pd();
    for (std::size_t k = 0; k < dim; ++k) {
      __m256d gr = w0r[k], gi = w0i[k];
      __m256d hr = _mm256_setzero_pd(), hi = _mm256_setzero_pd();
      __m256d sum = _mm256_setzero_pd();
      for (std::size_t m = 0; m + k < dim; ++m) {
        const double* r = rd + 2 * (m + (m + k) * dim);
        sum = _mm256_add_pd(sum, _mm256_fmsub_pd(_mm256_set1_pd(r[0]), gr, _mm256_mul_pd(_mm256_set1_pd(r[1]), gi)));
        const double inv = 1.0 / (sq[m + 1] * sq[m + k + 1]);
        const __m256d c = _mm256_mul_pd(_mm256_sub_pd(x, _mm256_set1_pd(static_cast<double>(2 * m + k + 1))),
                                        _mm256_set1_pd(inv));
        const __m256d d = _mm256_set1_pd(sq[m] * sq[m + k] * inv);
        const __m256d nr = _mm256_fmsub_pd(c, gr, _mm256_mul_pd(d, hr));
        const __m256d ni = _mm256_fmsub_pd(c, gi, _mm256_mul_pd(d, hi));
        hr = gr;
        hi = gi;
        gr = nr;
        gi = ni;
      }
      acc = _mm256_fmadd_pd(_mm256_set1_pd(k == 0 ? 1.0 : 2.0), sum, acc);
    }
    _mm256_storeu_pd(out + pt, acc);
  }
}

}  // namespace superatom::kernels::avx2
