#pragma once

#include "pucp/field.hpp"
#include "pucp/singular.hpp"

namespace pucp {

enum class BeltramiVariant { drift, weighted_lipschitz, weighted_nonlinear };

//! Closed-form ellipticity data of the reduction:
//!   k = (p-2)/(p+2) for p >= 2, (2-p)/(3p-2) for 1 < p <= 2,
//!   K = (1+k)/(1-k), p0 = 1 + 1/k (infinity when k = 0).
struct BeltramiConstants {
  double k = 0.0;
  double K = 1.0;
  double p0 = 0.0; // +inf sentinel when k = 0
};

BeltramiConstants beltrami_constants(double p);

//! Integrability exponent of the lower-bound chain:
//! delta = q when q < 1 + 1/k, otherwise (3k+1)/(2k); delta = q when k = 0.
double choose_delta(double p, double q);

//! Coefficients of the quasilinear Beltrami equation
//!   F_zbar = q1 F_z + q2 conj(F_z) + q3 F
//! together with the combined form F_zbar = o1 F_z + o2 F used by the
//! integral equation. Samples with |F| below mask_tau are masked out and
//! their coefficients set to zero (the zero extension outside B_8 included).
struct BeltramiSystem {
  BeltramiVariant variant = BeltramiVariant::drift;
  double p = 2.0;
  double a = 0.0;      // (p-2)/2
  double k = 0.0;      // ellipticity bound
  double K = 1.0;
  double p0 = 0.0;
  double delta = 2.0;
  ComplexField F;      // the reduced unknown the coefficients refer to
  ComplexField q1, q2, q3;
  ComplexField mu;     // weighted_nonlinear only
  ComplexField o1, o2;
  std::vector<uint8_t> coeff_mask;
  double mask_tau = 0.0;
  double masked_fraction = 0.0; // of domain-disk samples
  double q3_delta_norm = 0.0;   // ||q3||_{L^delta(B8)}
  double M = 1.0;               // measured coefficient bound, >= 1 guard
  double beltrami_consistency = 0.0; // ||F_zbar - o1 F_z - q3 F|| / ||F_zbar||
};

//! F = |G|^a G with G = v_x - i v_y (drift) or G = A (v_x - i v_y) (weighted).
ComplexField complex_gradient_F(const RealField& v, double p);
ComplexField complex_gradient_F_weighted(const RealField& v, const RealField& A, double p);

BeltramiSystem assemble_coefficients(const RealField& v, const VectorField2& drift, double p,
                                     double q);
BeltramiSystem assemble_coefficients_weighted(const RealField& v, const RealField& A, double p,
                                              double q);
BeltramiSystem assemble_coefficients_nonlinear(const RealField& v, const RealField& A, double p);

struct NeumannReport {
  int iterations = 0;
  std::vector<double> contraction_history; // per-step update ratios
  double residual = 0.0;                   // ||(I - o1 S) g - o2||_{L2}
  double residual_bound = 0.0;             // tol (1+k)/(1-k) certificate
  double g_delta_norm = 0.0;               // ||g||_{L^delta(B8)}
};

//! Fixed-point solve of (I - o1 S) g = o2 by g <- o2 + o1 S g. The discrete
//! Beurling isometry makes the update a contraction at rate k.
ComplexField neumann_solve(const BeltramiSystem& system, const TransformPlan& plan, double tol,
                           int max_iter, NeumannReport* report = nullptr);

struct NormalizeReport {
  double omega_sup = 0.0;     // ||omega||_{Linf(B8)}
  double omega_w12 = 0.0;     // ||omega||_{W^{1,2}(B8)}
  double representation_error = 0.0; // ||f e^omega - F|| / ||F|| on B8
};

struct NormalizedPair {
  ComplexField omega;
  ComplexField f;
  NormalizeReport report;
};

//! omega = T g and f = F e^{-omega}. Throws when ||omega||_inf exceeds the
//! exponential range guard (50).
NormalizedPair normalize_f(const ComplexField& F, const ComplexField& g,
                           const TransformPlan& plan);

struct QuasiregularityReport {
  double ratio_sup = 0.0;  // ess-sup of |f_zbar| / |f_z| on the admitted set
  double ratio_p99 = 0.0;
  double ratio_p90 = 0.0;
  double ratio_median = 0.0;
  std::size_t admitted = 0;
  bool pass = false;
};

//! Measures |f_zbar|/|f_z| by centered differences over interior samples
//! with |f_z| above threshold; passes iff the 99th percentile is at most
//! k_expected + tolerance.
QuasiregularityReport quasiregularity_check(const ComplexField& f, double k_expected,
                                            double tolerance = 0.02,
                                            double threshold_frac = 1e-6);

struct DifferenceQuotientReport {
  std::vector<double> offsets;    // |h|
  std::vector<double> quotients;  // ||eta (F(.+h) - F)||_{L2} / |h|
  double slope = 0.0;             // log-quotient vs log|h| regression slope
  bool pass = false;              // no growth trend: slope >= -0.1
};

//! Windowed W^{1,2} difference-quotient check; offsets are lattice shifts.
DifferenceQuotientReport w12_difference_quotient_check(const ComplexField& F,
                                                       const std::vector<complex_t>& h_values);

struct ConjugateResult {
  RealField w;
  double curl_residual = 0.0; // ||d(phi1)/dy - d(phi2)/dx||_{L2} on the region
  double ls_residual = 0.0;   // ||grad w - phi||_{L2}
};

//! Stream function w with grad w = (-A |grad v|^{p-2} v_y, A |grad v|^{p-2} v_x),
//! recovered by least squares on a simply connected region mask and pinned to
//! zero at the sample nearest the grid center. Throws when the curl residual
//! shows the input is not a solution.
ConjugateResult conjugate_function(const RealField& v, const RealField& A, double p,
                                   const std::vector<uint8_t>& region_mask,
                                   double curl_tol = 1e-2);

//! End-to-end reduction record.
struct ReductionResult {
  BeltramiSystem system;
  ComplexField g, omega, f;
  NeumannReport neumann;
  NormalizeReport normalize;
};

ReductionResult run_reduction(BeltramiSystem system, const TransformPlan& plan, double tol,
                              int max_iter);

} // namespace pucp
