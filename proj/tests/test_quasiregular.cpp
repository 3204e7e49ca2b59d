#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pucp/quasiregular.hpp"

#include <cmath>

using namespace pucp;

namespace {

DiskGrid std_grid(int n = 512) { return make_disk_grid(n, 8.0, 32.0); }

const double kLog6Over24 = std::log(6.0) / std::log(24.0);

} // namespace

TEST_CASE("exact Hadamard equality for monomials at effective radii") {
  DiskGrid g = std_grid();
  for (int N : {1, 3, 5}) {
    ComplexField f = sample_complex(g, [N](complex_t z) { return std::pow(z, N); });
    ThreeCircleReport rep =
        three_circle_check(f, 0.25, {0, 0}, ThreeCircleMode::holomorphic_exact);
    CAPTURE(N);
    CHECK(rep.equality_residual < 1e-6);
    CHECK(rep.theta > 0.0);
    CHECK(rep.theta < 1.0);
    // nominal theta = log 6 / log 24 up to the grid-radius wobble
    CHECK(rep.theta == doctest::Approx(kLog6Over24).epsilon(0.01));
  }
}

TEST_CASE("constant fields give equality; monomial sums obey the inequality") {
  DiskGrid g = std_grid();
  ComplexField c = sample_complex(g, [](complex_t) { return complex_t{2.5, -1.0}; });
  ThreeCircleReport rc = three_circle_check(c, 0.25, {0, 0}, ThreeCircleMode::holomorphic_exact);
  CHECK(rc.equality_residual < 1e-12);

  ComplexField s = sample_complex(g, [](complex_t z) { return z * z * z + 0.5 * z + 0.1; });
  AnnulusNorms an = annulus_norms(s, {0.25, 1.0, 6.0}, {0, 0});
  double theta = std::log(an.effective_radii[2] / an.effective_radii[1]) /
                 std::log(an.effective_radii[2] / an.effective_radii[0]);
  double bound = std::pow(an.sup_norms[0], theta) * std::pow(an.sup_norms[2], 1.0 - theta);
  CHECK(an.sup_norms[1] <= bound * (1.0 + 1e-6));
}

TEST_CASE("quasiregular fit: stretched monomial has theta* log(E'/r) constant within 20%") {
  // |phi| = |z|^{3/2}: the K=2 radial stretch composed with z^3 samples
  auto sampler = [](complex_t z) -> complex_t {
    complex_t w = z * z * z;
    double m = std::abs(w);
    return m > 0.0 ? w * std::pow(m, -0.5) : complex_t{0.0, 0.0};
  };
  std::vector<double> radii;
  for (int j = 3; j <= 8; ++j) radii.push_back(std::pow(2.0, -j));
  ThreeCircleReport rep = three_circle_fit_analytic(sampler, radii, {0, 0});
  REQUIRE_FALSE(rep.degenerate);
  CHECK(rep.fitted_E > 0.0);
  CHECK(rep.fitted_Eprime > 0.0);
  CAPTURE(rep.fitted_E);
  CAPTURE(rep.fitted_Eprime);
  CHECK(rep.fit_spread < 0.20);
  for (const auto& row : rep.rows) {
    CHECK(row.theta_star > 0.0);
    CHECK(row.theta_star < 1.0);
  }
  // theta(r) -> 0 at rate 1/log(1/r): fitted form enforces it; spot-check
  CHECK(rep.rows.back().theta_star < rep.rows.front().theta_star);
}

TEST_CASE("degenerate inner norms are flagged, not thrown") {
  DiskGrid g = std_grid(256);
  // zero on B_2, nonzero outside: inner L2 over B_{r/2} vanishes
  ComplexField f = sample_complex(g, [](complex_t z) {
    double r = std::abs(z);
    return r > 2.0 && r < 7.5 ? complex_t{1.0, 0.0} : complex_t{0.0, 0.0};
  });
  ThreeCircleReport rep = three_circle_fit(f, {1.0, 2.0}, {0, 0});
  CHECK(rep.degenerate);
}

TEST_CASE("upper Harnack: constants, the identity map, and scale stability") {
  DiskGrid g = std_grid();
  ComplexField c = sample_complex(g, [](complex_t) { return complex_t{3.0, 4.0}; });
  HarnackReport rc = upper_harnack_check(c, 1.0, {0, 0}, 1.5);
  CHECK(rc.c_measured == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(rc.pass);

  // phi = z on B_1: sup over B_{1/2} is 1/2, mean of |z| over B_1 is 2/3
  ComplexField idm = sample_complex(g, [](complex_t z) { return z; });
  HarnackReport ri = upper_harnack_check(idm, 1.0, {0, 0}, 1.0);
  CHECK(ri.sup_half == doctest::Approx(0.5).epsilon(2.0 * g.spacing));
  CHECK(ri.mean_full == doctest::Approx(2.0 / 3.0).epsilon(0.01));
  CHECK(ri.c_measured == doctest::Approx(0.75).epsilon(0.02));

  // radial stretch: ratio stable across r (homogeneous map)
  ComplexField st = sample_complex(g, [](complex_t z) {
    double r = std::abs(z);
    return r > 0.0 ? z * std::pow(r, -0.5) : complex_t{0.0, 0.0};
  });
  double c1 = upper_harnack_check(st, 0.5, {0, 0}, 10.0).c_measured;
  double c2 = upper_harnack_check(st, 0.25, {0, 0}, 10.0).c_measured;
  double c3 = upper_harnack_check(st, 0.125, {0, 0}, 10.0).c_measured;
  CHECK(c1 == doctest::Approx(c2).epsilon(0.05));
  CHECK(c2 == doctest::Approx(c3).epsilon(0.05));

  // scaling invariance of the ratio under phi -> c phi
  ComplexField scaled = idm;
  for (auto& v : scaled.samples) v *= complex_t{0.0, 17.0};
  HarnackReport rs = upper_harnack_check(scaled, 1.0, {0, 0}, 1.0);
  CHECK(rs.c_measured == doctest::Approx(ri.c_measured).epsilon(1e-12));
}

TEST_CASE("bi-Holder check: identity, rotation, radial stretch") {
  DiskGrid g = make_disk_grid(512, 1.0, 4.0);
  ComplexField idm = sample_complex(g, [](complex_t z) { return z; });
  HolderReport r1 = holder_check_qc(idm, 1.0, 1.0, 10000, 7);
  CHECK(r1.pass);

  ComplexField rot = sample_complex(g, [](complex_t z) { return z * std::polar(1.0, 0.7); });
  HolderReport r2 = holder_check_qc(rot, 1.0, 1.0, 10000, 7);
  CHECK(r2.pass);

  ComplexField st = sample_complex(g, [](complex_t z) {
    double r = std::abs(z);
    return r > 0.0 ? z * std::pow(r, -0.5) : complex_t{0.0, 0.0};
  });
  HolderReport r3 = holder_check_qc(st, 0.5, 2.0, 10000, 7);
  CHECK(r3.pass);
  CHECK(r3.pairs > 9000);

  // too-tight constants must produce violations
  HolderReport r4 = holder_check_qc(st, 0.5, 1.05, 10000, 7);
  CHECK_FALSE(r4.pass);
}

TEST_CASE("vanishing order fit: monomials, affine, constants") {
  DiskGrid g = std_grid(1024); // six dyadic radii between 4h and half the domain
  for (int N : {1, 2, 3, 4, 6}) {
    RealField v = sample_real(g, [N](complex_t z) { return std::pow(z, N).real(); });
    VanishingOrderFit fit = vanishing_order_fit(v, {0, 0}, 4.0 * g.spacing, 4.0, 50.0);
    CAPTURE(N);
    CHECK(fit.verdict == VanishingVerdict::finite_order);
    CHECK(fit.slope == doctest::Approx(static_cast<double>(N)).epsilon(0.05 / N));
  }

  RealField vx = sample_real(g, [](complex_t z) { return z.real(); });
  VanishingOrderFit f1 = vanishing_order_fit(vx, {0, 0}, 4.0 * g.spacing, 4.0, 50.0);
  CHECK(std::fabs(f1.slope - 1.0) < 0.02);

  RealField c = sample_real(g, [](complex_t) { return 3.0; });
  VanishingOrderFit fc = vanishing_order_fit(c, {0, 0}, 4.0 * g.spacing, 4.0, 50.0);
  CHECK(fc.verdict == VanishingVerdict::identically_constant);
}

TEST_CASE("vanishing order fit is offset invariant and scale equivariant") {
  DiskGrid g = std_grid(1024);
  RealField v = sample_real(g, [](complex_t z) { return std::pow(z, 3).real(); });
  RealField v_shift = v, v_scaled = v;
  for (auto& s : v_shift.samples) s += 11.0;
  for (auto& s : v_scaled.samples) s *= -5.0;
  double b0 = vanishing_order_fit(v, {0, 0}, 4.0 * g.spacing, 4.0, 50.0).slope;
  double b1 = vanishing_order_fit(v_shift, {0, 0}, 4.0 * g.spacing, 4.0, 50.0).slope;
  double b2 = vanishing_order_fit(v_scaled, {0, 0}, 4.0 * g.spacing, 4.0, 50.0).slope;
  CHECK(b0 == doctest::Approx(b1).epsilon(1e-9));
  CHECK(b0 == doctest::Approx(b2).epsilon(1e-9));
}

TEST_CASE("exp(-1/|z|) exceeds every practical order bound on a fine grid") {
  DiskGrid g = make_disk_grid(2048, 1.0, 4.0);
  RealField v = sample_real(g, [](complex_t z) {
    double r = std::abs(z);
    return r > 1e-12 ? std::exp(-1.0 / r) : 0.0;
  });
  VanishingOrderFit fit = vanishing_order_fit(v, {0, 0}, 4.0 * g.spacing, 0.5, 50.0);
  CHECK(fit.verdict == VanishingVerdict::exceeds_nmax);
  // closed form sup_{B_r} = e^{-1/r}: local slope at the smallest dyadic pair
  double r0 = fit.radii[0], r1 = fit.radii[1];
  double expect = (-1.0 / r1 + 1.0 / r0) / std::log(r1 / r0);
  CHECK(fit.smallest_decade_slope == doctest::Approx(expect).epsilon(0.05));
}

TEST_CASE("r_min below 4 spacings is rejected") {
  DiskGrid g = std_grid(128);
  RealField v = sample_real(g, [](complex_t z) { return z.real(); });
  CHECK_THROWS(vanishing_order_fit(v, {0, 0}, 2.0 * g.spacing, 4.0, 10.0));
}
