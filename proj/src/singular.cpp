#include "pucp/singular.hpp"

#include "pucp/fft.hpp"

#include <cmath>

namespace pucp {

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;
constexpr double kTwoPi = 2.0 * kPi;

std::vector<complex_t> multiplier_table(const DiskGrid& g, TransformKind kind) {
  const int n = g.n;
  std::vector<complex_t> mult(g.size());
  const double k0 = kTwoPi / g.embed_side;
#pragma omp parallel for schedule(static)
  for (int ky = 0; ky < n; ++ky) {
    int my = freq_index(ky, n);
    for (int kx = 0; kx < n; ++kx) {
      int mx = freq_index(kx, n);
      std::size_t idx = static_cast<std::size_t>(ky) * n + kx;
      if (mx == 0 && my == 0) {
        mult[idx] = 0.0;
        continue;
      }
      complex_t zeta(k0 * mx, k0 * my);
      if (kind == TransformKind::cauchy) {
        // inverse of the dzbar symbol (i/2) zeta; Nyquist rows dropped to
        // stay consistent with the spectral derivative convention
        if (mx == -n / 2 || my == -n / 2)
          mult[idx] = 0.0;
        else
          mult[idx] = complex_t(0.0, -2.0) / zeta;
      } else {
        mult[idx] = std::conj(zeta) / zeta; // unit modulus everywhere
      }
    }
  }
  return mult;
}

// Free-space kernel sampled at lattice displacements and truncated at
// half the embedding side, transformed to the frequency domain. Circular
// convolution with it equals the free-space integral for fields supported
// in the domain disk, evaluated there.
std::vector<complex_t> sampled_kernel_table(const DiskGrid& g, TransformKind kind) {
  const int n = g.n;
  const double h = g.spacing;
  const double cutoff = 0.5 * g.embed_side;
  std::vector<complex_t> ker(g.size(), complex_t{0.0, 0.0});
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < n; ++iy) {
    int dy = freq_index(iy, n);
    for (int ix = 0; ix < n; ++ix) {
      int dx = freq_index(ix, n);
      if (dx == 0 && dy == 0) continue; // punctured singular cell
      complex_t w(dx * h, dy * h);
      if (std::abs(w) >= cutoff) continue;
      std::size_t idx = static_cast<std::size_t>(iy) * n + ix;
      // convolution form: T has kernel +1/(pi w), S has -1/(pi w^2)
      if (kind == TransformKind::cauchy)
        ker[idx] = 1.0 / (kPi * w);
      else
        ker[idx] = -1.0 / (kPi * w * w);
    }
  }
  fft2(ker, n, false);
  return ker;
}

complex_t mean_value(const ComplexField& g) {
  std::vector<double> rows_re(g.grid.n, 0.0), rows_im(g.grid.n, 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < g.grid.n; ++iy) {
    complex_t acc{0.0, 0.0};
    for (int ix = 0; ix < g.grid.n; ++ix) acc += g.samples[g.grid.index(ix, iy)];
    rows_re[iy] = acc.real();
    rows_im[iy] = acc.imag();
  }
  double inv = 1.0 / static_cast<double>(g.grid.size());
  return {deterministic_sum(rows_re) * inv, deterministic_sum(rows_im) * inv};
}

ComplexField apply_multiplier(const TransformPlan& plan, const ComplexField& g,
                              const std::vector<complex_t>& mult) {
  require(plan.grid == g.grid, "transform: plan and field grids differ");
  ComplexField out(g.grid);
  std::vector<complex_t> hat = g.samples;
  fft2(hat, g.grid.n, false);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(hat.size()); ++i) hat[i] *= mult[i];
  fft2(hat, g.grid.n, true);
  out.samples = std::move(hat);
  return out;
}

} // namespace

TransformPlan make_transform_plan(const DiskGrid& g, KernelMode mode) {
  TransformPlan plan;
  plan.grid = g;
  plan.kernel_mode = mode;
  if (mode == KernelMode::fourier_multiplier) {
    plan.cauchy_mult = multiplier_table(g, TransformKind::cauchy);
    plan.beurling_mult = multiplier_table(g, TransformKind::beurling);
  } else {
    plan.cauchy_mult = sampled_kernel_table(g, TransformKind::cauchy);
    plan.beurling_mult = sampled_kernel_table(g, TransformKind::beurling);
    const double cell = g.spacing * g.spacing;
    for (auto& v : plan.cauchy_mult) v *= cell;
    for (auto& v : plan.beurling_mult) v *= cell;
  }
  return plan;
}

ComplexField cauchy_transform(const TransformPlan& plan, const ComplexField& g) {
  ComplexField out = apply_multiplier(plan, g, plan.cauchy_mult);
  if (plan.kernel_mode == KernelMode::fourier_multiplier) {
    // Mean-mode correction: the periodic multiplier solves dzbar(w) = g - mean(g).
    // Free space puts the mean into a conj(z) term; add it back, tapered so the
    // output stays smooth and compactly supported on the torus.
    complex_t m0 = mean_value(g);
    if (std::abs(m0) > 0.0) {
      const DiskGrid& gr = g.grid;
      // Correction window: 1 on the domain disk, 0 from 2R outward. The wide
      // transition keeps the term band-limited at every supported grid size.
      const double R = gr.domain_radius;
#pragma omp parallel for schedule(static)
      for (int iy = 0; iy < gr.n; ++iy)
        for (int ix = 0; ix < gr.n; ++ix) {
          complex_t z = gr.point(ix, iy);
          double w = taper_profile((std::abs(z - gr.center) - R) / R);
          out.samples[gr.index(ix, iy)] += m0 * w * std::conj(z - gr.center);
        }
    }
  }
  return out;
}

ComplexField beurling_transform(const TransformPlan& plan, const ComplexField& g) {
  return apply_multiplier(plan, g, plan.beurling_mult);
}

std::vector<complex_t> quadrature_oracle(const ComplexField& g, TransformKind kind,
                                         const std::vector<complex_t>& eval_points) {
  const DiskGrid& gr = g.grid;
  for (complex_t z : eval_points)
    require(gr.inside_domain(z), "quadrature_oracle: evaluation point outside domain");

  const double h = gr.spacing;
  const double cell = h * h;
  std::vector<complex_t> out(eval_points.size(), complex_t{0.0, 0.0});
  const double skip2 = 0.25 * h * h; // treat |xi - z| < h/2 as the singular cell

  for (std::size_t q = 0; q < eval_points.size(); ++q) {
    const complex_t z = eval_points[q];
    std::vector<double> rows_re(gr.n, 0.0), rows_im(gr.n, 0.0);
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < gr.n; ++iy) {
      complex_t acc{0.0, 0.0};
      for (int ix = 0; ix < gr.n; ++ix) {
        complex_t w = gr.point(ix, iy) - z;
        double w2 = std::norm(w);
        if (w2 < skip2) continue;
        complex_t gv = g.samples[gr.index(ix, iy)];
        if (kind == TransformKind::cauchy)
          acc += gv / w;
        else
          acc += gv / (w * w);
      }
      rows_re[iy] = acc.real();
      rows_im[iy] = acc.imag();
    }
    complex_t sum{deterministic_sum(rows_re), deterministic_sum(rows_im)};
    out[q] = -(cell / kPi) * sum;
  }
  return out;
}

} // namespace pucp
