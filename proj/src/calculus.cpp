#include "pucp/calculus.hpp"

#include "pucp/fft.hpp"

#include <cmath>

namespace pucp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

WirtingerPair wirtinger_spectral(const ComplexField& f) {
  const DiskGrid& g = f.grid;
  const int n = g.n;
  std::vector<complex_t> hat = f.samples;
  fft2(hat, n, false);

  WirtingerPair out{ComplexField(g), ComplexField(g)};
  std::vector<complex_t> dz_hat(hat.size()), dzb_hat(hat.size());
  const double k0 = kTwoPi / g.embed_side;
#pragma omp parallel for schedule(static)
  for (int ky = 0; ky < n; ++ky) {
    int my = freq_index(ky, n);
    for (int kx = 0; kx < n; ++kx) {
      int mx = freq_index(kx, n);
      std::size_t idx = static_cast<std::size_t>(ky) * n + kx;
      if (mx == -n / 2 || my == -n / 2) {
        // Nyquist rows carry no usable derivative phase; drop them.
        dz_hat[idx] = 0.0;
        dzb_hat[idx] = 0.0;
        continue;
      }
      complex_t zeta(k0 * mx, k0 * my);
      complex_t half_i(0.0, 0.5);
      dz_hat[idx] = half_i * std::conj(zeta) * hat[idx];
      dzb_hat[idx] = half_i * zeta * hat[idx];
    }
  }
  fft2(dz_hat, n, true);
  fft2(dzb_hat, n, true);
  out.dz.samples = std::move(dz_hat);
  out.dzbar.samples = std::move(dzb_hat);
  return out;
}

WirtingerPair wirtinger_centered(const ComplexField& f) {
  const DiskGrid& g = f.grid;
  const int n = g.n;
  WirtingerPair out{ComplexField(g), ComplexField(g)};
  const double inv2h = 1.0 / (2.0 * g.spacing);
  const double invh = 1.0 / g.spacing;
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      complex_t fx, fy;
      if (ix == 0)
        fx = (f.at(1, iy) - f.at(0, iy)) * invh;
      else if (ix == n - 1)
        fx = (f.at(n - 1, iy) - f.at(n - 2, iy)) * invh;
      else
        fx = (f.at(ix + 1, iy) - f.at(ix - 1, iy)) * inv2h;
      if (iy == 0)
        fy = (f.at(ix, 1) - f.at(ix, 0)) * invh;
      else if (iy == n - 1)
        fy = (f.at(ix, n - 1) - f.at(ix, n - 2)) * invh;
      else
        fy = (f.at(ix, iy + 1) - f.at(ix, iy - 1)) * inv2h;
      complex_t i_unit(0.0, 1.0);
      out.dz.samples[g.index(ix, iy)] = 0.5 * (fx - i_unit * fy);
      out.dzbar.samples[g.index(ix, iy)] = 0.5 * (fx + i_unit * fy);
    }
  return out;
}

} // namespace

WirtingerPair wirtinger_derivatives(const ComplexField& f, DerivMethod method) {
  for (std::size_t i = 0; i < f.samples.size(); ++i)
    if (f.mask[i] && !std::isfinite(std::abs(f.samples[i])))
      throw std::invalid_argument("wirtinger_derivatives: non-finite sample inside domain");
  return method == DerivMethod::spectral ? wirtinger_spectral(f) : wirtinger_centered(f);
}

VectorField2 gradient_centered(const RealField& v) {
  ComplexField c = to_complex(v);
  WirtingerPair d = wirtinger_centered(c);
  VectorField2 out(v.grid);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(out.xc.size()); ++i) {
    // grad = (2 Re dz, -2 Im dz) for real input
    out.xc[i] = 2.0 * d.dz.samples[i].real();
    out.yc[i] = -2.0 * d.dz.samples[i].imag();
  }
  return out;
}

namespace {

// C^2 bump (1 - t^2)^3 on t in [0,1).
double bump(double t) {
  if (t >= 1.0) return 0.0;
  double s = 1.0 - t * t;
  return s * s * s;
}

std::vector<double> convolve(const std::vector<double>& a, const DiskGrid& g,
                             const std::vector<double>& kernel, int kr) {
  const int n = g.n;
  std::vector<double> out(a.size(), 0.0);
  const int kw = 2 * kr + 1;
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < n; ++iy)
    for (int ix = 0; ix < n; ++ix) {
      double acc = 0.0;
      for (int dy = -kr; dy <= kr; ++dy) {
        int jy = iy + dy;
        if (jy < 0 || jy >= n) continue;
        for (int dx = -kr; dx <= kr; ++dx) {
          int jx = ix + dx;
          if (jx < 0 || jx >= n) continue;
          acc += kernel[(dy + kr) * kw + (dx + kr)] * a[g.index(jx, jy)];
        }
      }
      out[g.index(ix, iy)] = acc;
    }
  return out;
}

std::vector<double> make_kernel(const DiskGrid& g, double epsilon, int& kr) {
  kr = static_cast<int>(std::ceil(epsilon / g.spacing));
  const int kw = 2 * kr + 1;
  std::vector<double> kernel(static_cast<std::size_t>(kw) * kw, 0.0);
  double sum = 0.0;
  for (int dy = -kr; dy <= kr; ++dy)
    for (int dx = -kr; dx <= kr; ++dx) {
      double r = std::hypot(dx * g.spacing, dy * g.spacing);
      double v = bump(r / epsilon);
      kernel[(dy + kr) * kw + (dx + kr)] = v;
      sum += v;
    }
  for (double& v : kernel) v /= sum; // discrete unit mass
  return kernel;
}

} // namespace

VectorField2 mollify_drift(const VectorField2& w, double epsilon) {
  require(epsilon >= 2.0 * w.grid.spacing, "mollify_drift: epsilon below grid resolution");
  int kr = 0;
  std::vector<double> kernel = make_kernel(w.grid, epsilon, kr);
  VectorField2 out(w.grid);
  out.xc = convolve(w.xc, w.grid, kernel, kr);
  out.yc = convolve(w.yc, w.grid, kernel, kr);
  return out;
}

double mollifier_gradient_l1(const DiskGrid& g, double epsilon) {
  int kr = 0;
  std::vector<double> kernel = make_kernel(g, epsilon, kr);
  const int kw = 2 * kr + 1;
  // discrete L1 norm of the kernel x-difference quotient; y is symmetric
  double acc = 0.0;
  for (int dy = 0; dy < kw; ++dy)
    for (int dx = 0; dx + 1 < kw; ++dx)
      acc += std::fabs(kernel[dy * kw + dx + 1] - kernel[dy * kw + dx]) / g.spacing;
  return acc;
}

} // namespace pucp
