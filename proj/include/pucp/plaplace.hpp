#pragma once

#include "pucp/field.hpp"

namespace pucp {

enum class EquationVariant { drift, weighted };

//! Dirichlet problem for the p-Laplace equation with a drift term
//!   div(|grad v|^{p-2} grad v) + W . (|grad v|^{p-2} grad v) = 0
//! or the weighted equation
//!   div(A |grad v|^{p-2} grad v) = 0
//! on the masked interior of the grid (the domain disk by default; fixtures
//! may restrict to an annulus). Nodes outside the interior hold Dirichlet
//! data sampled from boundary_data.
struct PLaplaceProblem {
  EquationVariant variant = EquationVariant::drift;
  double p = 2.0;
  DiskGrid grid;
  VectorField2 drift;                         // variant drift
  RealField weight;                           // variant weighted, >= c0 > 0
  std::function<double(complex_t)> boundary_data;
  double epsilon = 0.0;                       // gradient regularization, must be > 0
  std::vector<uint8_t> solve_mask;            // 1 = interior unknown
  std::vector<double> initial_guess;          // optional interior starting iterate

  void validate() const;
};

struct SolveReport {
  int iterations = 0;            // accepted Picard steps
  double final_residual = 0.0;   // unregularized weak-form residual, L2
  std::vector<double> damping_history;
  bool achieved_tolerance = false;
  int linear_iterations = 0;     // total inner Krylov iterations
};

struct SolveResult {
  RealField v;
  SolveReport report;
};

SolveResult solve_dirichlet(const PLaplaceProblem& problem, double tol, int max_iter);

//! Unregularized weak-form residual norm of a candidate solution.
double plaplace_residual(const PLaplaceProblem& problem, const RealField& v);

enum class ManufacturedKind { affine, harmonic_monomial, radial, drifted };

//! Problem plus known reference solution. For kind drifted the drift field is
//! constructed from a chosen smooth solution by solving the pointwise
//! identity W . (|grad v|^{p-2} grad v) = -div(|grad v|^{p-2} grad v) along
//! the gradient direction, with W = 0 where |grad v| falls below threshold.
struct ManufacturedInstance {
  PLaplaceProblem problem;
  RealField reference;
  std::function<double(complex_t)> exact;      // reference resampler
  std::function<complex_t(complex_t)> exact_w; // drift, zero when absent
};

ManufacturedInstance manufactured_instance(ManufacturedKind kind, double p, const DiskGrid& grid,
                                           int monomial_degree = 3);

//! Weighted reference instance: v = x with a y-dependent Lipschitz weight
//! A(y) >= c0 solves the weighted equation exactly for every p.
ManufacturedInstance weighted_reference_instance(double p, const DiskGrid& grid);

} // namespace pucp
