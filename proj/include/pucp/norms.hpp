#pragma once

#include "pucp/field.hpp"

#include <limits>

namespace pucp {

constexpr double kInfExponent = std::numeric_limits<double>::infinity();

//! Result of scanning the samples of a disc: count, largest sample radius
//! actually present (the effective radius), and the argmax location.
struct DiscScan {
  std::size_t count = 0;
  double effective_radius = 0.0;
};

DiscScan scan_disc(const DiskGrid& g, complex_t center, double radius);

//! L^p norm over the open disc |z - center| < radius via the midpoint rule,
//! or the sample supremum of |f| for p = infinity. Summation is row-major
//! and deterministic for any thread count. The disc must lie inside the
//! domain disk and contain at least 4 samples.
double norm_on_disc(const RealField& f, double p, double radius, complex_t center);
double norm_on_disc(const ComplexField& f, double p, double radius, complex_t center);

//! Same quadrature, no outer |.|^{1/p}: integral of |f|^p over the disc.
double integral_on_disc(const RealField& f, double p, double radius, complex_t center);
double integral_on_disc(const ComplexField& f, double p, double radius, complex_t center);

//! Mean of |f| over the disc.
double mean_abs_on_disc(const ComplexField& f, double radius, complex_t center);

//! Norms of a field restricted to the whole domain disk.
double norm_on_domain(const ComplexField& f, double p);
double norm_on_domain(const RealField& f, double p);

//! sup over disc samples of |f - offset|.
double sup_abs_minus(const RealField& f, double offset, double radius, complex_t center);

//! Ordered per-radius sup and L2 norms of a field, the raw material of the
//! three-circle and vanishing-order machinery.
struct AnnulusNorms {
  std::vector<double> radii;            // requested, strictly increasing
  std::vector<double> effective_radii;  // largest sample radius present
  std::vector<double> sup_norms;
  std::vector<double> l2_norms;
  complex_t center{0.0, 0.0};
};

AnnulusNorms annulus_norms(const ComplexField& f, const std::vector<double>& radii,
                           complex_t center);

//! Norm of an analytically sampled function over a disc, evaluated on a
//! dedicated grid of the requested resolution centered on the disc. Used
//! where a radius is too small for the primary grid; the sampled-values-only
//! convention carries over (sup over nested grid samples).
double nested_norm(const std::function<complex_t(complex_t)>& f, double p, double radius,
                   complex_t center, int n_aux = 256);

} // namespace pucp
