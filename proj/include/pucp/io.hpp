#pragma once

#include "pucp/field.hpp"

namespace pucp {

//! Binary field container. Layout, all little-endian:
//!   magic "PUCP1", version byte 0x01, u32 n_per_side, f64 domain_radius,
//!   f64 embed_side, f64 center_re, f64 center_im,
//!   u8 dtype (0 = f64 real, 1 = 2 x f64 complex), samples row-major.
//! Round trips are bit-exact.
void write_field(const std::string& path, const RealField& f);
void write_field(const std::string& path, const ComplexField& f);

RealField read_real_field(const std::string& path);
ComplexField read_complex_field(const std::string& path);

//! dtype stored in a file without loading the samples.
int peek_field_dtype(const std::string& path);

} // namespace pucp
