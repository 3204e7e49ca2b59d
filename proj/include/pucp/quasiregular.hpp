#pragma once

#include "pucp/field.hpp"
#include "pucp/norms.hpp"

namespace pucp {

enum class ThreeCircleMode { holomorphic_exact, quasiregular_fit };

//! One radius row of a three-circle evaluation.
struct ThreeCircleRow {
  double r = 0.0;          // sweep radius
  double theta_star = 0.0; // equality-making exponent from measured norms
  double lhs = 0.0;        // ||phi||_{Linf(B_1)} (or inner sup in exact mode)
  double rhs = 0.0;        // bound with the fitted constants
};

struct ThreeCircleReport {
  ThreeCircleMode mode = ThreeCircleMode::holomorphic_exact;
  // holomorphic_exact: Hadamard equality at effective radii
  double equality_residual = 0.0; // relative |M2 - M1^theta M3^(1-theta)|
  double theta = 0.0;
  // quasiregular_fit: theta*(r) log(E'/r) ~ E regression
  std::vector<ThreeCircleRow> rows;
  double fitted_E = 0.0;
  double fitted_Eprime = 0.0;
  double fit_spread = 0.0; // max relative deviation of theta* log(E'/r) from E
  bool degenerate = false; // infinite-order signal: inner norm vanished
};

//! Hadamard three-circle machinery. In holomorphic_exact mode the triple of
//! discs is (r, 1, 6) and theta is computed from the measured effective radii,
//! making the equality exact for monomials on lattice data. In
//! quasiregular_fit mode a dyadic sweep of inner radii fits theta*(r) to the
//! form E / log(E'/r).
ThreeCircleReport three_circle_check(const ComplexField& field, double r, complex_t center,
                                     ThreeCircleMode mode);

//! Fit over a caller-supplied radius sweep (quasiregular_fit only).
ThreeCircleReport three_circle_fit(const ComplexField& field, const std::vector<double>& radii,
                                   complex_t center);

//! Same fit for an analytically sampled map: every disc norm is evaluated on
//! a nested grid of its own, so the sweep may go far below the resolution of
//! any primary grid.
ThreeCircleReport three_circle_fit_analytic(const std::function<complex_t(complex_t)>& sampler,
                                            const std::vector<double>& radii, complex_t center);

struct HarnackReport {
  double sup_half = 0.0;  // ||phi||_{Linf(B_{r/2})}
  double mean_full = 0.0; // mean of |phi| over B_r
  double c_measured = 0.0;
  bool pass = false;
};

//! Upper Harnack estimate: sup over the half disc against the mean of the
//! modulus over the full disc, compared to a caller budget.
HarnackReport upper_harnack_check(const ComplexField& field, double r, complex_t center,
                                  double c_budget);

struct HolderReport {
  std::size_t pairs = 0;
  std::size_t upper_violations = 0; // |f(x)-f(y)| > C0 |x-y|^alpha
  std::size_t lower_violations = 0; // |f(x)-f(y)| < C0^{-1} |x-y|^{1/alpha}
  double worst_upper = 0.0;         // max ratio against the upper bound
  double worst_lower = 0.0;         // min ratio against the lower bound
  bool pass = false;
};

//! Bi-Holder check over seeded random sample pairs drawn from B_{3R/4}.
HolderReport holder_check_qc(const ComplexField& map_samples, double alpha_expected,
                             double c0_expected, std::size_t pair_count = 10000,
                             uint64_t seed = 0);

enum class VanishingVerdict { finite_order, exceeds_nmax, identically_constant };

struct VanishingOrderFit {
  std::vector<double> radii;           // effective radii used in the regression
  std::vector<double> sup_norms;       // sup |v - v(center)| per radius
  double slope = 0.0;                  // fitted vanishing order
  double regression_residual = 0.0;    // rms residual of the log-log fit
  double smallest_decade_slope = 0.0;  // local slope at the two smallest radii
  VanishingVerdict verdict = VanishingVerdict::finite_order;
};

//! Log-log regression of sup_{B_r} |v - v(center)| against the effective
//! radius over a dyadic sweep [r_min, r_max]; r_min must be at least
//! 4 x spacing. A local slope above n_max on the smallest decade yields the
//! exceeds_nmax verdict; an all-but-constant field yields
//! identically_constant.
VanishingOrderFit vanishing_order_fit(const RealField& v, complex_t center, double r_min,
                                      double r_max, double n_max);

} // namespace pucp
