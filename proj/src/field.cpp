#include "pucp/field.hpp"

#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace pucp {

void require(bool cond, const std::string& msg) {
  if (!cond) throw std::invalid_argument(msg);
}

static bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

DiskGrid make_disk_grid(int n_per_side, double domain_radius, double embed_side,
                        complex_t center) {
  require(n_per_side >= 16, "make_disk_grid: need n_per_side >= 16");
  require(is_power_of_two(n_per_side), "make_disk_grid: n_per_side must be a power of two");
  require(domain_radius > 0.0, "make_disk_grid: domain_radius must be positive");
  require(embed_side >= 4.0 * domain_radius,
          "make_disk_grid: embed_side must be at least 4 x domain_radius");

  DiskGrid g;
  g.n = n_per_side;
  g.domain_radius = domain_radius;
  g.embed_side = embed_side;
  g.spacing = embed_side / n_per_side;
  g.center = center;
  return g;
}

static std::vector<uint8_t> make_mask(const DiskGrid& g) {
  std::vector<uint8_t> m(g.size());
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      m[g.index(ix, iy)] = g.inside_domain(g.point(ix, iy)) ? 1 : 0;
  return m;
}

RealField::RealField(const DiskGrid& g) : grid(g), samples(g.size(), 0.0), mask(make_mask(g)) {}
ComplexField::ComplexField(const DiskGrid& g)
    : grid(g), samples(g.size(), complex_t{0.0, 0.0}), mask(make_mask(g)) {}
VectorField2::VectorField2(const DiskGrid& g) : grid(g), xc(g.size(), 0.0), yc(g.size(), 0.0) {}

RealField sample_real(const DiskGrid& g, const std::function<double(complex_t)>& f) {
  RealField out(g);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      out.samples[g.index(ix, iy)] = f(g.point(ix, iy));
  return out;
}

ComplexField sample_complex(const DiskGrid& g, const std::function<complex_t(complex_t)>& f) {
  ComplexField out(g);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      out.samples[g.index(ix, iy)] = f(g.point(ix, iy));
  return out;
}

VectorField2 sample_vector(const DiskGrid& g, const std::function<double(complex_t)>& fx,
                           const std::function<double(complex_t)>& fy) {
  VectorField2 out(g);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      complex_t z = g.point(ix, iy);
      out.xc[g.index(ix, iy)] = fx(z);
      out.yc[g.index(ix, iy)] = fy(z);
    }
  return out;
}

ComplexField to_complex(const RealField& f) {
  ComplexField out;
  out.grid = f.grid;
  out.mask = f.mask;
  out.samples.resize(f.samples.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(f.samples.size()); ++i)
    out.samples[i] = complex_t(f.samples[i], 0.0);
  return out;
}

RealField real_part(const ComplexField& f) {
  RealField out;
  out.grid = f.grid;
  out.mask = f.mask;
  out.samples.resize(f.samples.size());
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(f.samples.size()); ++i)
    out.samples[i] = f.samples[i].real();
  return out;
}

// erf smoothstep, rescaled to hit 1 and 0 exactly at the endpoints. The
// Gaussian spectral decay of erf keeps tapered fields effectively
// band-limited; the endpoint derivative mismatch is ~e^{-25}.
double taper_profile(double t) {
  if (t <= 0.0) return 1.0;
  if (t >= 1.0) return 0.0;
  constexpr double alpha = 5.0;
  const double lo = std::erfc(alpha), hi = std::erfc(-alpha);
  return (std::erfc(alpha * (2.0 * t - 1.0)) - lo) / (hi - lo);
}

double taper_window(const DiskGrid& g, complex_t z) {
  double r0 = g.domain_radius;
  double width = 0.25 * g.domain_radius;
  double r = std::abs(z - g.center);
  return taper_profile((r - r0) / width);
}

void apply_taper(ComplexField& f) {
  const DiskGrid& g = f.grid;
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      f.samples[g.index(ix, iy)] *= taper_window(g, g.point(ix, iy));
}

void apply_taper(RealField& f) {
  const DiskGrid& g = f.grid;
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      f.samples[g.index(ix, iy)] *= taper_window(g, g.point(ix, iy));
}

std::vector<uint8_t> disk_interior_mask(const DiskGrid& g) {
  return make_mask(g);
}

std::vector<uint8_t> annulus_interior_mask(const DiskGrid& g, double r_inner, double r_outer) {
  require(0.0 < r_inner && r_inner < r_outer && r_outer <= g.domain_radius,
          "annulus mask: bad radii");
  std::vector<uint8_t> m(g.size(), 0);
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      double r = std::abs(g.point(ix, iy) - g.center);
      m[g.index(ix, iy)] = (r > r_inner && r < r_outer) ? 1 : 0;
    }
  return m;
}

double deterministic_sum(const std::vector<double>& row_partials) {
  double s = 0.0;
  for (double v : row_partials) s += v;
  return s;
}

} // namespace pucp
