#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pucp {

using complex_t = std::complex<double>;

//! Uniform cell-centered sampling of a centered disk embedded in a periodic
//! square. The square side must leave at least one disk diameter of padding
//! on each side so that periodic convolutions do not alias the disk.
struct DiskGrid {
  int n = 0;                  // samples per side, power of two
  double domain_radius = 0.0; // radius of the disk of interest
  double embed_side = 0.0;    // side of the periodic embedding square
  double spacing = 0.0;       // embed_side / n
  complex_t center{0.0, 0.0};

  // Cell-centered coordinates: no sample falls exactly on the grid center.
  double x(int ix) const { return center.real() - 0.5 * embed_side + (ix + 0.5) * spacing; }
  double y(int iy) const { return center.imag() - 0.5 * embed_side + (iy + 0.5) * spacing; }
  complex_t point(int ix, int iy) const { return {x(ix), y(iy)}; }
  std::size_t index(int ix, int iy) const { return static_cast<std::size_t>(iy) * n + ix; }
  std::size_t size() const { return static_cast<std::size_t>(n) * n; }
  bool inside_domain(complex_t z) const { return std::abs(z - center) < domain_radius; }

  bool operator==(const DiskGrid& o) const {
    return n == o.n && domain_radius == o.domain_radius && embed_side == o.embed_side &&
           center == o.center;
  }
};

//! Builds a grid, validating the power-of-two and padding preconditions.
DiskGrid make_disk_grid(int n_per_side, double domain_radius, double embed_side,
                        complex_t center = {0.0, 0.0});

//! Sampled real function with a support mask marking samples inside the
//! domain disk. Samples outside the mask are kept (zero-extension semantics)
//! but no norm or certificate ever reads them.
struct RealField {
  DiskGrid grid;
  std::vector<double> samples;     // row-major, size n*n
  std::vector<uint8_t> mask;       // 1 = inside domain disk

  RealField() = default;
  explicit RealField(const DiskGrid& g);

  double& at(int ix, int iy) { return samples[grid.index(ix, iy)]; }
  double at(int ix, int iy) const { return samples[grid.index(ix, iy)]; }
};

//! Sampled complex function; same layout conventions as RealField.
struct ComplexField {
  DiskGrid grid;
  std::vector<complex_t> samples;
  std::vector<uint8_t> mask;

  ComplexField() = default;
  explicit ComplexField(const DiskGrid& g);

  complex_t& at(int ix, int iy) { return samples[grid.index(ix, iy)]; }
  complex_t at(int ix, int iy) const { return samples[grid.index(ix, iy)]; }
};

//! Pair of real sample arrays, used for gradients and drift fields.
struct VectorField2 {
  DiskGrid grid;
  std::vector<double> xc, yc;

  VectorField2() = default;
  explicit VectorField2(const DiskGrid& g);
};

RealField sample_real(const DiskGrid& g, const std::function<double(complex_t)>& f);
ComplexField sample_complex(const DiskGrid& g, const std::function<complex_t(complex_t)>& f);
VectorField2 sample_vector(const DiskGrid& g, const std::function<double(complex_t)>& fx,
                           const std::function<double(complex_t)>& fy);

ComplexField to_complex(const RealField& f);
RealField real_part(const ComplexField& f);

//! Smooth radial window: 1 on the domain disk, decaying to 0 over an annulus
//! of width domain_radius/4, identically 0 beyond. The profile is C-infinity
//! (exponential smoothstep), so tapered fields keep spectral accuracy.
double taper_profile(double t); // 1 for t<=0, 0 for t>=1, smooth in between
double taper_window(const DiskGrid& g, complex_t z);

//! Multiplies a field by the taper window in place.
void apply_taper(ComplexField& f);
void apply_taper(RealField& f);

//! Node masks: 1 on samples strictly inside the disk (resp. open annulus).
std::vector<uint8_t> disk_interior_mask(const DiskGrid& g);
std::vector<uint8_t> annulus_interior_mask(const DiskGrid& g, double r_inner, double r_outer);

//! Deterministic full-grid sum: serial accumulation of per-row partial sums
//! in row order. Rows may be processed in parallel; the result is identical
//! to the plain serial loop for any thread count.
double deterministic_sum(const std::vector<double>& row_partials);

void require(bool cond, const std::string& msg);

} // namespace pucp
