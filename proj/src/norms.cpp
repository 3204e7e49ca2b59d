#include "pucp/norms.hpp"

#include <algorithm>
#include <cmath>

namespace pucp {

namespace {

// Row range [iy0, iy1) of rows that can intersect the disc.
struct RowSpan {
  int iy0, iy1;
};

RowSpan row_span(const DiskGrid& g, complex_t center, double radius) {
  double ylo = center.imag() - radius, yhi = center.imag() + radius;
  double base = g.center.imag() - 0.5 * g.embed_side;
  int iy0 = std::max(0, static_cast<int>(std::floor((ylo - base) / g.spacing - 0.5)));
  int iy1 = std::min(g.n, static_cast<int>(std::ceil((yhi - base) / g.spacing + 0.5)));
  return {iy0, iy1};
}

void check_disc(const DiskGrid& g, complex_t center, double radius) {
  require(radius > 0.0, "norm_on_disc: radius must be positive");
  require(std::abs(center - g.center) + radius <= g.domain_radius + 1e-12,
          "norm_on_disc: disc escapes the domain disk");
}

template <class F, class Abs>
double disc_integral(const F& f, const Abs& modulus, double p, complex_t center, double radius) {
  const DiskGrid& g = f.grid;
  const double r2 = radius * radius;
  const double cell = g.spacing * g.spacing;
  RowSpan span = row_span(g, center, radius);
  std::vector<double> rows(std::max(0, span.iy1 - span.iy0), 0.0);
  std::vector<long long> counts(rows.size(), 0);
#pragma omp parallel for schedule(static)
  for (int iy = span.iy0; iy < span.iy1; ++iy) {
    double acc = 0.0;
    long long cnt = 0;
    for (int ix = 0; ix < g.n; ++ix) {
      complex_t z = g.point(ix, iy);
      double dx = z.real() - center.real(), dy = z.imag() - center.imag();
      if (dx * dx + dy * dy < r2) {
        acc += std::pow(modulus(f.samples[g.index(ix, iy)]), p);
        ++cnt;
      }
    }
    rows[iy - span.iy0] = acc * cell;
    counts[iy - span.iy0] = cnt;
  }
  long long total = 0;
  for (long long c : counts) total += c;
  require(total >= 4, "norm_on_disc: disc contains fewer than 4 samples");
  return deterministic_sum(rows);
}

template <class F, class Abs>
double disc_sup(const F& f, const Abs& modulus, complex_t center, double radius) {
  const DiskGrid& g = f.grid;
  const double r2 = radius * radius;
  RowSpan span = row_span(g, center, radius);
  std::vector<double> rows(std::max(0, span.iy1 - span.iy0), 0.0);
  std::vector<long long> counts(rows.size(), 0);
#pragma omp parallel for schedule(static)
  for (int iy = span.iy0; iy < span.iy1; ++iy) {
    double m = 0.0;
    long long cnt = 0;
    for (int ix = 0; ix < g.n; ++ix) {
      complex_t z = g.point(ix, iy);
      double dx = z.real() - center.real(), dy = z.imag() - center.imag();
      if (dx * dx + dy * dy < r2) {
        m = std::max(m, modulus(f.samples[g.index(ix, iy)]));
        ++cnt;
      }
    }
    rows[iy - span.iy0] = m;
    counts[iy - span.iy0] = cnt;
  }
  long long total = 0;
  for (long long c : counts) total += c;
  require(total >= 4, "norm_on_disc: disc contains fewer than 4 samples");
  double m = 0.0;
  for (double v : rows) m = std::max(m, v);
  return m;
}

double abs_real(double v) { return std::fabs(v); }
double abs_cplx(complex_t v) { return std::abs(v); }

} // namespace

DiscScan scan_disc(const DiskGrid& g, complex_t center, double radius) {
  const double r2 = radius * radius;
  DiscScan s;
  RowSpan span = row_span(g, center, radius);
  for (int iy = span.iy0; iy < span.iy1; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      complex_t z = g.point(ix, iy);
      double dx = z.real() - center.real(), dy = z.imag() - center.imag();
      double d2 = dx * dx + dy * dy;
      if (d2 < r2) {
        ++s.count;
        s.effective_radius = std::max(s.effective_radius, std::sqrt(d2));
      }
    }
  return s;
}

double norm_on_disc(const RealField& f, double p, double radius, complex_t center) {
  check_disc(f.grid, center, radius);
  if (p == kInfExponent) return disc_sup(f, abs_real, center, radius);
  return std::pow(disc_integral(f, abs_real, p, center, radius), 1.0 / p);
}

double norm_on_disc(const ComplexField& f, double p, double radius, complex_t center) {
  check_disc(f.grid, center, radius);
  if (p == kInfExponent) return disc_sup(f, abs_cplx, center, radius);
  return std::pow(disc_integral(f, abs_cplx, p, center, radius), 1.0 / p);
}

double integral_on_disc(const RealField& f, double p, double radius, complex_t center) {
  check_disc(f.grid, center, radius);
  return disc_integral(f, abs_real, p, center, radius);
}

double integral_on_disc(const ComplexField& f, double p, double radius, complex_t center) {
  check_disc(f.grid, center, radius);
  return disc_integral(f, abs_cplx, p, center, radius);
}

double mean_abs_on_disc(const ComplexField& f, double radius, complex_t center) {
  const DiskGrid& g = f.grid;
  check_disc(g, center, radius);
  double integral = disc_integral(f, abs_cplx, 1.0, center, radius);
  DiscScan s = scan_disc(g, center, radius);
  return integral / (static_cast<double>(s.count) * g.spacing * g.spacing);
}

double norm_on_domain(const ComplexField& f, double p) {
  return norm_on_disc(f, p, f.grid.domain_radius, f.grid.center);
}

double norm_on_domain(const RealField& f, double p) {
  return norm_on_disc(f, p, f.grid.domain_radius, f.grid.center);
}

double sup_abs_minus(const RealField& f, double offset, double radius, complex_t center) {
  check_disc(f.grid, center, radius);
  auto shifted = [offset](double v) { return std::fabs(v - offset); };
  return disc_sup(f, shifted, center, radius);
}

double nested_norm(const std::function<complex_t(complex_t)>& f, double p, double radius,
                   complex_t center, int n_aux) {
  DiskGrid g = make_disk_grid(n_aux, radius, 4.0 * radius, center);
  ComplexField field = sample_complex(g, f);
  return norm_on_disc(field, p, radius, center);
}

AnnulusNorms annulus_norms(const ComplexField& f, const std::vector<double>& radii,
                           complex_t center) {
  AnnulusNorms out;
  out.center = center;
  for (std::size_t i = 1; i < radii.size(); ++i)
    require(radii[i] > radii[i - 1], "annulus_norms: radii must be strictly increasing");
  for (double r : radii) {
    out.radii.push_back(r);
    out.effective_radii.push_back(scan_disc(f.grid, center, r).effective_radius);
    out.sup_norms.push_back(norm_on_disc(f, kInfExponent, r, center));
    out.l2_norms.push_back(norm_on_disc(f, 2.0, r, center));
  }
  return out;
}

} // namespace pucp
