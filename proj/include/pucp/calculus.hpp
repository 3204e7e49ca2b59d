#pragma once

#include "pucp/field.hpp"

namespace pucp {

enum class DerivMethod { spectral, centered_difference };

//! Wirtinger derivatives d/dz = (d/dx - i d/dy)/2 and d/dzbar = (d/dx + i d/dy)/2.
//!
//! The spectral method differentiates the periodic trigonometric interpolant;
//! it is exact for band-limited data and requires the field to decay smoothly
//! to zero before the embedding boundary (taper first, caller responsibility).
//! The centered_difference method is local and second order; on the outermost
//! sample ring it falls back to one-sided differences.
struct WirtingerPair {
  ComplexField dz;
  ComplexField dzbar;
};

WirtingerPair wirtinger_derivatives(const ComplexField& f, DerivMethod method);

//! Gradient of a real field by centered differences (one-sided at edges).
VectorField2 gradient_centered(const RealField& v);

//! Componentwise convolution with a normalized C^2 bump of radius epsilon.
//! Support grows by at most epsilon. Requires epsilon >= 2 x spacing.
VectorField2 mollify_drift(const VectorField2& w, double epsilon);

//! L1 norm of the mollifier gradient (the convolution Lipschitz budget).
double mollifier_gradient_l1(const DiskGrid& g, double epsilon);

} // namespace pucp
