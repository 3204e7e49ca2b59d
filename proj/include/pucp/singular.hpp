#pragma once

#include "pucp/field.hpp"

namespace pucp {

enum class KernelMode { fourier_multiplier, sampled_kernel };
enum class TransformKind { cauchy, beurling };

//! Precomputed frequency-domain data for the Cauchy transform
//!   Tg(z) = -(1/pi) int g(xi)/(xi - z) dA(xi)
//! and the Beurling transform
//!   Sg(z) = -(1/pi) p.v. int g(xi)/(xi - z)^2 dA(xi)
//! on the padded torus. Plans are immutable and reusable across fields on
//! the identical grid.
//!
//! fourier_multiplier mode: S is the exact multiplier conj(zeta)/zeta with
//! the zero frequency mapped to 0, so |multiplier| = 1 at every nonzero
//! frequency and Parseval gives ||Sg||^2 = ||g||^2 - |mean g|^2 |Q| exactly.
//! T is the multiplier -2i/zeta; the zero mode is carried by an analytic
//! mean-term correction mean(g) * taper(z) * conj(z - center), which makes
//! dzbar(Tg) = g exact on the domain disk even for fields with nonzero mean.
//!
//! sampled_kernel mode: circular convolution with the free-space kernel
//! truncated at |w| < embed_side/2, alias-free for fields supported in the
//! domain disk and evaluation there.
struct TransformPlan {
  DiskGrid grid;
  KernelMode kernel_mode = KernelMode::fourier_multiplier;
  std::vector<complex_t> cauchy_mult;   // frequency domain
  std::vector<complex_t> beurling_mult; // frequency domain
};

TransformPlan make_transform_plan(const DiskGrid& g,
                                  KernelMode mode = KernelMode::fourier_multiplier);

ComplexField cauchy_transform(const TransformPlan& plan, const ComplexField& g);
ComplexField beurling_transform(const TransformPlan& plan, const ComplexField& g);

//! Direct quadrature of the singular integrals at a few evaluation points,
//! independent of the FFT path. The Beurling principal value uses the
//! punctured lattice sum (4-fold symmetry cancels the odd singularity)
//! with the analytic corrections for the excluded cell; the correction
//! derivatives come from local centered differences of g.
std::vector<complex_t> quadrature_oracle(const ComplexField& g, TransformKind kind,
                                         const std::vector<complex_t>& eval_points);

} // namespace pucp
