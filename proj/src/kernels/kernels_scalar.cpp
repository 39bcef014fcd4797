#include "superatom/kernels.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace superatom::kernels::scalar {

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
      const double* ak = ad + 2 * k * n;
      for (std::size_t i = 0; i < n; ++i) {
        const double ar = ak[2 * i];
        const double ai = ak[2 * i + 1];
        cj[2 * i] += ar * br - ai * bi;
        cj[2 * i + 1] += ar * bi + ai * br;
      }
    }
  }
}

void matvec(std::size_t n, const Complex* a, const Complex* x, Complex* y) {
  const auto* ad = reinterpret_cast<const double*>(a);
  const auto* xd = reinterpret_cast<const double*>(x);
  auto* yd = reinterpret_cast<double*>(y);
  for (std::size_t i = 0; i < 2 * n; ++i) yd[i] = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double xr = xd[2 * k];
    const double xi = xd[2 * k + 1];
    const double* ak = ad + 2 * k * n;
    for (std::size_t i = 0; i < n; ++i) {
      const double ar = ak[2 * i];
      const double ai = ak[2 * i + 1];
      yd[2 * i] += ar * xr - ai * xi;
      yd[2 * i + 1] += ar * xi + ai * xr;
    }
  }
}

// W = sum_k sum_m c_k Re(rho_{m,m+k} w_{m,m+k}) with c_0 = 1, c_k = 2 and
// w_{m,m+k} = (-1)^m (2 alpha)^k sqrt(m!/(m+k)!) L_m^k(4|alpha|^2) e^{-2|alpha|^2} / pi.
// Each diagonal k runs the Laguerre three-term recurrence upward in m, which
// is stable because the polynomial is the dominant solution.
void wigner(std::size_t dim, const Complex* rho, std::size_t count, const double* alpha_re,
            const double* alpha_im, double* out) {
  std::vector<double> sq(dim + 1);
  for (std::size_t n = 0; n <= dim; ++n) sq[n] = std::sqrt(static_cast<double>(n));
  std::vector<double> w0r(dim), w0i(dim);
  const auto* rd = reinterpret_cast<const double*>(rho);

  for (std::size_t pt = 0; pt < count; ++pt) {
    const double ar = alpha_re[pt];
    const double ai = alpha_im[pt];
    const double two_ar = 2.0 * ar;
    const double two_ai = 2.0 * ai;
    const double x = 4.0 * (ar * ar + ai * ai);

    // first row w_{0,k} = (2 alpha)^k / sqrt(k!) e^{-2|alpha|^2} / pi
    w0r[0] = std::exp(-0.5 * x) * std::numbers::inv_pi;
    w0i[0] = 0.0;
    for (std::size_t k = 1; k < dim; ++k) {
      w0r[k] = (two_ar * w0r[k - 1] - two_ai * w0i[k - 1]) / sq[k];
      w0i[k] = (two_ar * w0i[k - 1] + two_ai * w0r[k - 1]) / sq[k];
    }

    double acc = 0.0;
    for (std::size_t k = 0; k < dim; ++k) {
      double gr = w0r[k], gi = w0i[k], hr = 0.0, hi = 0.0;
      double sum = 0.0;
      for (std::size_t m = 0; m + k < dim; ++m) {
        const double* r = rd + 2 * (m + (m + k) * dim);
        sum += r[0] * gr - r[1] * gi;
        const double inv = 1.0 / (sq[m + 1] * sq[m + k + 1]);
        const double c = (x - static_cast<double>(2 * m + k + 1)) * inv;
        const double d = sq[m] * sq[m + k] * inv;
        const double nr = c * gr - d * hr;
        const double ni = c * gi - d * hi;
        hr = gr;
        hi = gi;
        gr = nr;
        gi = ni;
      }
      acc += (k == 0 ? 1.0 : 2.0) * sum;
    }
    out[pt] = acc;
  }
}

}  // namespace superatom::kernels::scalar
