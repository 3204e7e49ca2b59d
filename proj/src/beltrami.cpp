#include "pucp/beltrami.hpp"

#include "pucp/calculus.hpp"
#include "pucp/norms.hpp"

#include <algorithm>
#include <cmath>

namespace pucp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ComplexField power_gradient(const RealField& v, double p, const RealField* A) {
  const DiskGrid& g = v.grid;
  VectorField2 grad = gradient_centered(v);
  ComplexField F(g);
  const double a = 0.5 * (p - 2.0);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(g.size()); ++i) {
    complex_t G(grad.xc[i], -grad.yc[i]);
    if (A) G *= A->samples[i];
    double mag = std::abs(G);
    F.samples[i] = (mag == 0.0) ? complex_t{0.0, 0.0} : std::pow(mag, a) * G;
  }
  return F;
}

double masked_lp_norm(const ComplexField& f, const std::vector<uint8_t>& mask, double p) {
  const DiskGrid& g = f.grid;
  std::vector<double> rows(g.n, 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < g.n; ++iy) {
    double acc = 0.0;
    for (int ix = 0; ix < g.n; ++ix) {
      std::size_t k = g.index(ix, iy);
      if (mask[k]) acc += std::pow(std::abs(f.samples[k]), p);
    }
    rows[iy] = acc * g.spacing * g.spacing;
  }
  return std::pow(deterministic_sum(rows), 1.0 / p);
}

double torus_l2(const ComplexField& f) {
  const DiskGrid& g = f.grid;
  std::vector<double> rows(g.n, 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < g.n; ++iy) {
    double acc = 0.0;
    for (int ix = 0; ix < g.n; ++ix) acc += std::norm(f.samples[g.index(ix, iy)]);
    rows[iy] = acc * g.spacing * g.spacing;
  }
  return std::sqrt(deterministic_sum(rows));
}

// shared scaffolding for the three variants
struct SystemBuilder {
  BeltramiSystem sys;
  WirtingerPair dF;

  void init(BeltramiVariant variant, double p, ComplexField F) {
    sys.variant = variant;
    sys.p = p;
    sys.a = 0.5 * (p - 2.0);
    BeltramiConstants bc = beltrami_constants(p);
    sys.k = bc.k;
    sys.K = bc.K;
    sys.p0 = bc.p0;
    sys.F = std::move(F);
    dF = wirtinger_derivatives(sys.F, DerivMethod::centered_difference);

    const DiskGrid& g = sys.F.grid;
    double fsup = norm_on_domain(sys.F, kInfExponent);
    sys.mask_tau = 1e-8 * fsup;
    sys.coeff_mask.assign(g.size(), 0);
    std::size_t in_disk = 0, masked = 0;
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        std::size_t kk = g.index(ix, iy);
        if (!sys.F.mask[kk]) continue;
        ++in_disk;
        if (std::abs(sys.F.samples[kk]) >= sys.mask_tau)
          sys.coeff_mask[kk] = 1;
        else
          ++masked;
      }
    sys.masked_fraction = in_disk ? static_cast<double>(masked) / in_disk : 0.0;
    sys.q1 = ComplexField(g);
    sys.q2 = ComplexField(g);
    sys.q3 = ComplexField(g);
    sys.mu = ComplexField(g);
    sys.o1 = ComplexField(g);
    sys.o2 = ComplexField(g);
  }

  // o1 absorbs the conjugate-linear part: o1 = q1 + q2 conj(F_z)/F_z.
  void combine() {
    const DiskGrid& g = sys.F.grid;
    double dz_sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (sys.coeff_mask[i]) dz_sup = std::max(dz_sup, std::abs(dF.dz.samples[i]));
    const double dz_tau = 1e-8 * dz_sup;
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(g.size()); ++i) {
      if (!sys.coeff_mask[i]) continue;
      complex_t fz = dF.dz.samples[i];
      if (std::abs(fz) > dz_tau)
        sys.o1.samples[i] = sys.q1.samples[i] + sys.q2.samples[i] * std::conj(fz) / fz;
      sys.o2.samples[i] = sys.q3.samples[i];
    }
  }

  void consistency() {
    const DiskGrid& g = sys.F.grid;
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!sys.coeff_mask[i]) continue;
      complex_t resid = dF.dzbar.samples[i] - sys.o1.samples[i] * dF.dz.samples[i] -
                        sys.q3.samples[i] * sys.F.samples[i];
      num += std::norm(resid);
      den += std::norm(dF.dzbar.samples[i]);
    }
    sys.beltrami_consistency = den > 0.0 ? std::sqrt(num / den) : 0.0;
  }
};

} // namespace

BeltramiConstants beltrami_constants(double p) {
  require(p > 1.0, "beltrami_constants: need p > 1");
  BeltramiConstants out;
  out.k = p >= 2.0 ? (p - 2.0) / (p + 2.0) : (2.0 - p) / (3.0 * p - 2.0);
  out.K = (1.0 + out.k) / (1.0 - out.k);
  out.p0 = out.k > 0.0 ? 1.0 + 1.0 / out.k : kInf;
  return out;
}

double choose_delta(double p, double q) {
  // q between 2 and 1+1/k is admissible as well (delta = q branch)
  require(q >= 2.0, "choose_delta: need q >= 2");
  double k = beltrami_constants(p).k;
  if (k == 0.0) return q;
  double cap = 1.0 + 1.0 / k;
  return q < cap ? q : (3.0 * k + 1.0) / (2.0 * k);
}

ComplexField complex_gradient_F(const RealField& v, double p) {
  require(p > 1.0, "complex_gradient_F: need p > 1");
  return power_gradient(v, p, nullptr);
}

ComplexField complex_gradient_F_weighted(const RealField& v, const RealField& A, double p) {
  require(p > 1.0, "complex_gradient_F: need p > 1");
  return power_gradient(v, p, &A);
}

BeltramiSystem assemble_coefficients(const RealField& v, const VectorField2& drift, double p,
                                     double q) {
  SystemBuilder b;
  b.init(BeltramiVariant::drift, p, complex_gradient_F(v, p));
  BeltramiSystem& sys = b.sys;
  const DiskGrid& g = sys.F.grid;

  const double alpha_c = (p - 2.0) / (p + 2.0);
  const double beta_c = (p - 2.0) / (3.0 * p - 2.0);
  // Drift prefactor p/(2(3p-2)). Derivation anchor: at p = 2 the equation
  // gives F_zbar = (1/2) lap v = -(1/2) A . grad v, and the bracket times F
  // equals 2 A . grad v, forcing the 1/4; the general-a computation scales
  // it to p/(2(3p-2)). Verified against the measured Beltrami consistency.
  const double drift_c = p / (2.0 * (3.0 * p - 2.0));
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(g.size()); ++i) {
    if (!sys.coeff_mask[i]) continue;
    complex_t F = sys.F.samples[i];
    complex_t ratio = std::conj(F) / F;
    sys.q1.samples[i] = -0.5 * (alpha_c + beta_c) * ratio;
    sys.q2.samples[i] = -0.5 * (beta_c - alpha_c) / ratio;
    complex_t i_unit(0.0, 1.0);
    sys.q3.samples[i] = -drift_c * (drift.xc[i] * (1.0 + ratio) +
                                    i_unit * drift.yc[i] * (1.0 - ratio));
  }
  sys.delta = choose_delta(p, q);
  sys.q3_delta_norm = masked_lp_norm(sys.q3, sys.coeff_mask, sys.delta);
  // the theorems assume the coefficient bound M >= 1
  double aq = 0.0;
  {
    RealField amag(g);
    for (std::size_t i = 0; i < g.size(); ++i)
      amag.samples[i] = std::hypot(drift.xc[i], drift.yc[i]);
    aq = norm_on_domain(amag, q);
  }
  sys.M = std::max(1.0, aq);
  b.combine();
  b.consistency();
  return sys;
}

BeltramiSystem assemble_coefficients_weighted(const RealField& v, const RealField& A, double p,
                                              double q) {
  for (std::size_t i = 0; i < A.samples.size(); ++i)
    if (A.mask[i]) require(A.samples[i] > 0.0, "weighted coefficients: A must be positive");

  SystemBuilder b;
  b.init(BeltramiVariant::weighted_lipschitz, p, complex_gradient_F_weighted(v, A, p));
  BeltramiSystem& sys = b.sys;
  const DiskGrid& g = sys.F.grid;

  RealField invA(g), invApm2(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double a = std::max(A.samples[i], 1e-300);
    invA.samples[i] = 1.0 / a;
    invApm2.samples[i] = std::pow(a, -(p - 2.0));
  }
  WirtingerPair dInvA = wirtinger_derivatives(to_complex(invA), DerivMethod::centered_difference);
  WirtingerPair dInvApm2 =
      wirtinger_derivatives(to_complex(invApm2), DerivMethod::centered_difference);

  const double alpha_c = (p - 2.0) / (p + 2.0);
  const double beta_c = (p - 2.0) / (3.0 * p - 2.0);
  const double c1 = p / (p + 2.0);
  const double c2 = p / (3.0 * p - 2.0);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(g.size()); ++i) {
    if (!sys.coeff_mask[i]) continue;
    complex_t F = sys.F.samples[i];
    complex_t ratio = std::conj(F) / F;
    sys.q1.samples[i] = -0.5 * (alpha_c + beta_c) * ratio;
    sys.q2.samples[i] = -0.5 * (beta_c - alpha_c) / ratio;
    double a = A.samples[i];
    double apm2 = std::pow(a, p - 2.0);
    sys.q3.samples[i] =
        a * c1 * (ratio * dInvA.dz.samples[i] - dInvA.dzbar.samples[i]) -
        apm2 * c2 * (ratio * dInvApm2.dz.samples[i] + dInvApm2.dzbar.samples[i]);
  }
  double qq = std::max(q, std::max(2.0, p));
  sys.delta = choose_delta(p, qq);
  sys.q3_delta_norm = masked_lp_norm(sys.q3, sys.coeff_mask, sys.delta);
  sys.M = std::max(1.0, norm_on_domain(sys.q3, kInfExponent));
  b.combine();
  b.consistency();
  return sys;
}

BeltramiSystem assemble_coefficients_nonlinear(const RealField& v, const RealField& A, double p) {
  for (std::size_t i = 0; i < A.samples.size(); ++i)
    if (A.mask[i]) require(A.samples[i] > 0.0, "nonlinear coefficients: A must be positive");
  require(p <= 2.0, "nonlinear coefficients: the conjugate-pair route covers 1 < p <= 2");

  ConjugateResult conj = conjugate_function(v, A, p, disk_interior_mask(v.grid), 5e-2);
  const DiskGrid& g = v.grid;
  ComplexField F(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    F.samples[i] = F.mask[i] ? complex_t(v.samples[i], conj.w.samples[i]) : complex_t{0.0, 0.0};

  SystemBuilder b;
  b.init(BeltramiVariant::weighted_nonlinear, p, std::move(F));
  BeltramiSystem& sys = b.sys;

  // mu from the real part's z-derivative: |f| = 2 |(Re F)_z| = |grad v|
  ComplexField reF = to_complex(real_part(sys.F));
  WirtingerPair dRe = wirtinger_derivatives(reF, DerivMethod::centered_difference);
  const double two_pm2 = std::pow(2.0, p - 2.0);
  double mu_sup = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!sys.coeff_mask[i]) continue;
    double t = two_pm2 * A.samples[i] * std::pow(std::abs(dRe.dz.samples[i]), p - 2.0);
    double mu = (1.0 - t) / (1.0 + t);
    sys.mu.samples[i] = mu;
    mu_sup = std::max(mu_sup, std::fabs(mu));
    // conjugate-linear Beltrami equation F_zbar = mu conj(F_z): fold into o1
    complex_t fz = b.dF.dz.samples[i];
    if (std::abs(fz) > 0.0) sys.o1.samples[i] = sys.mu.samples[i] * std::conj(fz) / fz;
  }
  // measured ellipticity replaces the closed form for the nonlinear route
  sys.k = mu_sup;
  sys.K = (1.0 + sys.k) / (1.0 - sys.k);
  sys.p0 = sys.k > 0.0 ? 1.0 + 1.0 / sys.k : kInf;
  sys.delta = 2.0;
  sys.M = std::max(1.0, norm_on_domain(A, kInfExponent));
  b.consistency();
  return sys;
}

ComplexField neumann_solve(const BeltramiSystem& system, const TransformPlan& plan, double tol,
                           int max_iter, NeumannReport* report) {
  require(system.k < 1.0, "neumann_solve: ellipticity bound must be below 1");
  const DiskGrid& g = system.o2.grid;
  require(plan.grid == g, "neumann_solve: plan grid mismatch");

  ComplexField gcur = system.o2;
  NeumannReport rep;
  double prev_delta = -1.0;
  bool converged = false;
  for (int it = 0; it < max_iter; ++it) {
    ComplexField sg = beurling_transform(plan, gcur);
    ComplexField gnext(g);
#pragma omp parallel for schedule(static)
    for (long long i = 0; i < static_cast<long long>(g.size()); ++i)
      gnext.samples[i] = system.o2.samples[i] + system.o1.samples[i] * sg.samples[i];
    ComplexField diff(g);
    for (std::size_t i = 0; i < g.size(); ++i)
      diff.samples[i] = gnext.samples[i] - gcur.samples[i];
    double delta = torus_l2(diff);
    if (prev_delta > 0.0) {
      double ratio = delta / prev_delta;
      rep.contraction_history.push_back(ratio);
      if (ratio >= 1.0)
        throw std::runtime_error(
            "neumann_solve: contraction estimate >= 1 (internal inconsistency)");
    }
    prev_delta = delta > 0.0 ? delta : -1.0;
    gcur = std::move(gnext);
    rep.iterations = it + 1;
    if (delta <= tol) {
      converged = true;
      break;
    }
  }
  if (!converged) throw std::runtime_error("neumann_solve: max_iter exceeded");

  // residual certificate
  ComplexField sg = beurling_transform(plan, gcur);
  ComplexField resid(g);
  for (std::size_t i = 0; i < g.size(); ++i)
    resid.samples[i] = gcur.samples[i] - system.o1.samples[i] * sg.samples[i] -
                       system.o2.samples[i];
  rep.residual = torus_l2(resid);
  rep.residual_bound = tol * (1.0 + system.k) / (1.0 - system.k);
  rep.g_delta_norm = masked_lp_norm(gcur, gcur.mask, system.delta);
  if (report) *report = rep;
  return gcur;
}

NormalizedPair normalize_f(const ComplexField& F, const ComplexField& g,
                           const TransformPlan& plan) {
  require(F.grid == g.grid, "normalize_f: grid mismatch");
  NormalizedPair out;
  out.omega = cauchy_transform(plan, g);
  const DiskGrid& gr = F.grid;

  out.report.omega_sup = norm_on_domain(out.omega, kInfExponent);
  if (out.report.omega_sup > 50.0)
    throw std::runtime_error("normalize_f: ||omega||_inf = " +
                             std::to_string(out.report.omega_sup) +
                             " exceeds the exponential range guard");

  // W^{1,2} norm without numerical differentiation: omega_zbar = g and
  // omega_z = S g by construction
  ComplexField sg = beurling_transform(plan, g);
  double l2_omega = norm_on_domain(out.omega, 2.0);
  double l2_g = norm_on_domain(g, 2.0);
  double l2_sg = norm_on_domain(sg, 2.0);
  out.report.omega_w12 =
      std::sqrt(l2_omega * l2_omega + 2.0 * l2_g * l2_g + 2.0 * l2_sg * l2_sg);

  out.f = ComplexField(gr);
#pragma omp parallel for schedule(static)
  for (long long i = 0; i < static_cast<long long>(gr.size()); ++i)
    out.f.samples[i] = F.samples[i] * std::exp(-out.omega.samples[i]);

  // representation identity F = f e^omega, round-off only
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < gr.size(); ++i) {
    if (!F.mask[i]) continue;
    num += std::norm(out.f.samples[i] * std::exp(out.omega.samples[i]) - F.samples[i]);
    den += std::norm(F.samples[i]);
  }
  out.report.representation_error = den > 0.0 ? std::sqrt(num / den) : 0.0;
  return out;
}

QuasiregularityReport quasiregularity_check(const ComplexField& f, double k_expected,
                                            double tolerance, double threshold_frac) {
  const DiskGrid& g = f.grid;
  WirtingerPair d = wirtinger_derivatives(f, DerivMethod::centered_difference);

  double dz_sup = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (f.mask[i]) dz_sup = std::max(dz_sup, std::abs(d.dz.samples[i]));
  const double threshold = threshold_frac * dz_sup;

  std::vector<double> ratios;
  ratios.reserve(g.size() / 4);
  for (int iy = 1; iy < g.n - 1; ++iy)
    for (int ix = 1; ix < g.n - 1; ++ix) {
      std::size_t kk = g.index(ix, iy);
      // full centered stencil must stay inside the domain disk
      if (!f.mask[kk] || !f.mask[g.index(ix - 1, iy)] || !f.mask[g.index(ix + 1, iy)] ||
          !f.mask[g.index(ix, iy - 1)] || !f.mask[g.index(ix, iy + 1)])
        continue;
      double fz = std::abs(d.dz.samples[kk]);
      if (fz < threshold) continue;
      ratios.push_back(std::abs(d.dzbar.samples[kk]) / fz);
    }
  QuasiregularityReport rep;
  require(!ratios.empty(), "quasiregularity_check: admitted sample set is empty");
  std::sort(ratios.begin(), ratios.end());
  auto q = [&](double frac) {
    return ratios[std::min(ratios.size() - 1,
                           static_cast<std::size_t>(frac * (ratios.size() - 1)))];
  };
  rep.admitted = ratios.size();
  rep.ratio_sup = ratios.back();
  rep.ratio_p99 = q(0.99);
  rep.ratio_p90 = q(0.90);
  rep.ratio_median = q(0.50);
  rep.pass = rep.ratio_p99 <= k_expected + tolerance;
  return rep;
}

DifferenceQuotientReport w12_difference_quotient_check(const ComplexField& F,
                                                       const std::vector<complex_t>& h_values) {
  const DiskGrid& g = F.grid;
  DifferenceQuotientReport rep;

  // inner window: 1 on B_{R/2}, 0 beyond 3R/4
  auto eta = [&](complex_t z) {
    double r = std::abs(z - g.center);
    double r0 = 0.5 * g.domain_radius, r1 = 0.75 * g.domain_radius;
    return taper_profile((r - r0) / (r1 - r0));
  };

  for (complex_t h : h_values) {
    int sx = static_cast<int>(std::round(h.real() / g.spacing));
    int sy = static_cast<int>(std::round(h.imag() / g.spacing));
    require(std::abs(sx * g.spacing - h.real()) < 1e-12 &&
                std::abs(sy * g.spacing - h.imag()) < 1e-12,
            "w12 check: offsets must be lattice multiples of the spacing");
    double habs = std::hypot(h.real(), h.imag());
    require(habs <= g.domain_radius / 8.0 + 1e-12, "w12 check: offset too large");
    std::vector<double> rows(g.n, 0.0);
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < g.n; ++iy) {
      double acc = 0.0;
      for (int ix = 0; ix < g.n; ++ix) {
        int jx = ix + sx, jy = iy + sy;
        if (jx < 0 || jx >= g.n || jy < 0 || jy >= g.n) continue;
        double w = eta(g.point(ix, iy));
        if (w == 0.0) continue;
        acc += w * w * std::norm(F.samples[g.index(jx, jy)] - F.samples[g.index(ix, iy)]);
      }
      rows[iy] = acc * g.spacing * g.spacing;
    }
    rep.offsets.push_back(habs);
    rep.quotients.push_back(std::sqrt(deterministic_sum(rows)) / habs);
  }

  // log-log regression slope
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = rep.offsets.size();
  for (std::size_t i = 0; i < n; ++i) {
    double x = std::log(rep.offsets[i]), y = std::log(std::max(rep.quotients[i], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  rep.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  rep.pass = rep.slope >= -0.1;
  return rep;
}

ConjugateResult conjugate_function(const RealField& v, const RealField& A, double p,
                                   const std::vector<uint8_t>& region_mask, double curl_tol) {
  const DiskGrid& g = v.grid;
  require(region_mask.size() == g.size(), "conjugate_function: bad region mask");

  VectorField2 grad = gradient_centered(v);
  std::vector<double> phi1(g.size(), 0.0), phi2(g.size(), 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    double g2 = grad.xc[i] * grad.xc[i] + grad.yc[i] * grad.yc[i];
    double c = g2 > 0.0 ? std::pow(g2, 0.5 * (p - 2.0)) : 0.0;
    phi1[i] = -A.samples[i] * c * grad.yc[i];
    phi2[i] = A.samples[i] * c * grad.xc[i];
  }

  // curl condition d(phi1)/dy = d(phi2)/dx on the eroded region
  double curl_num = 0.0, phi_den = 0.0;
  for (int iy = 1; iy < g.n - 1; ++iy)
    for (int ix = 1; ix < g.n - 1; ++ix) {
      std::size_t kk = g.index(ix, iy);
      bool interior = region_mask[kk] && region_mask[g.index(ix - 1, iy)] &&
                      region_mask[g.index(ix + 1, iy)] && region_mask[g.index(ix, iy - 1)] &&
                      region_mask[g.index(ix, iy + 1)];
      if (!interior) continue;
      double dphi1_dy = (phi1[g.index(ix, iy + 1)] - phi1[g.index(ix, iy - 1)]) / (2 * g.spacing);
      double dphi2_dx = (phi2[g.index(ix + 1, iy)] - phi2[g.index(ix - 1, iy)]) / (2 * g.spacing);
      curl_num += (dphi1_dy - dphi2_dx) * (dphi1_dy - dphi2_dx);
      phi_den += (phi1[kk] * phi1[kk] + phi2[kk] * phi2[kk]) / (g.spacing * g.spacing);
    }
  ConjugateResult out;
  out.curl_residual = phi_den > 0.0 ? std::sqrt(curl_num / phi_den) : 0.0;
  require(out.curl_residual <= curl_tol,
          "conjugate_function: curl residual above tolerance, input is not a solution");

  // least-squares potential: minimize sum over region edges of
  // (w_j - w_i - phi_edge h)^2, normal equations solved by CG
  auto edge_ok = [&](std::size_t a, std::size_t b) { return region_mask[a] && region_mask[b]; };
  std::vector<double> rhs(g.size(), 0.0);
  auto apply_lap = [&](const std::vector<double>& w, std::vector<double>& out_v) {
#pragma omp parallel for schedule(static)
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        std::size_t kk = g.index(ix, iy);
        if (!region_mask[kk]) {
          out_v[kk] = 0.0;
          continue;
        }
        double acc = 0.0;
        if (ix + 1 < g.n && edge_ok(kk, g.index(ix + 1, iy)))
          acc += w[g.index(ix + 1, iy)] - w[kk];
        if (ix > 0 && edge_ok(kk, g.index(ix - 1, iy))) acc += w[g.index(ix - 1, iy)] - w[kk];
        if (iy + 1 < g.n && edge_ok(kk, g.index(ix, iy + 1)))
          acc += w[g.index(ix, iy + 1)] - w[kk];
        if (iy > 0 && edge_ok(kk, g.index(ix, iy - 1))) acc += w[g.index(ix, iy - 1)] - w[kk];
        out_v[kk] = acc;
      }
  };
  // rhs = divergence of the edge-averaged phi
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      std::size_t kk = g.index(ix, iy);
      if (!region_mask[kk]) continue;
      double acc = 0.0;
      if (ix + 1 < g.n && edge_ok(kk, g.index(ix + 1, iy)))
        acc += 0.5 * (phi1[kk] + phi1[g.index(ix + 1, iy)]) * g.spacing;
      if (ix > 0 && edge_ok(kk, g.index(ix - 1, iy)))
        acc -= 0.5 * (phi1[kk] + phi1[g.index(ix - 1, iy)]) * g.spacing;
      if (iy + 1 < g.n && edge_ok(kk, g.index(ix, iy + 1)))
        acc += 0.5 * (phi2[kk] + phi2[g.index(ix, iy + 1)]) * g.spacing;
      if (iy > 0 && edge_ok(kk, g.index(ix, iy - 1)))
        acc -= 0.5 * (phi2[kk] + phi2[g.index(ix, iy - 1)]) * g.spacing;
      rhs[kk] = acc;
    }

  // CG on the (singular) graph Laplacian; project out the constant mode
  std::vector<double> w(g.size(), 0.0), r(g.size(), 0.0), pv(g.size(), 0.0), ap(g.size(), 0.0);
  std::size_t region_count = 0;
  for (std::size_t i = 0; i < g.size(); ++i)
    if (region_mask[i]) ++region_count;
  auto project = [&](std::vector<double>& x) {
    double mean = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (region_mask[i]) mean += x[i];
    mean /= static_cast<double>(region_count);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (region_mask[i]) x[i] -= mean;
  };
  auto dot = [&](const std::vector<double>& a, const std::vector<double>& b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (region_mask[i]) acc += a[i] * b[i];
    return acc;
  };
  project(rhs);
  apply_lap(w, ap);
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = region_mask[i] ? rhs[i] - ap[i] : 0.0;
  pv = r;
  double rr = dot(r, r);
  double rr0 = rr;
  for (int it = 0; it < 20000 && rr > 1e-24 * std::max(1.0, rr0); ++it) {
    apply_lap(pv, ap);
    double alpha = rr / dot(pv, ap);
    for (std::size_t i = 0; i < g.size(); ++i)
      if (region_mask[i]) {
        w[i] += alpha * pv[i];
        r[i] -= alpha * ap[i];
      }
    double rr_new = dot(r, r);
    double beta = rr_new / rr;
    rr = rr_new;
    for (std::size_t i = 0; i < g.size(); ++i)
      if (region_mask[i]) pv[i] = r[i] + beta * pv[i];
  }

  // pin w at the region sample nearest the grid center
  std::size_t pin = 0;
  double best = 1e300;
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      std::size_t kk = g.index(ix, iy);
      if (!region_mask[kk]) continue;
      double d = std::abs(g.point(ix, iy) - g.center);
      if (d < best) {
        best = d;
        pin = kk;
      }
    }
  double off = w[pin];
  for (std::size_t i = 0; i < g.size(); ++i)
    if (region_mask[i]) w[i] -= off;

  out.w = RealField(g);
  out.w.samples = std::move(w);

  // gradient mismatch on region edges
  double mis = 0.0;
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix + 1 < g.n; ++ix) {
      std::size_t a = g.index(ix, iy), b2 = g.index(ix + 1, iy);
      if (!edge_ok(a, b2)) continue;
      double d = (out.w.samples[b2] - out.w.samples[a]) / g.spacing -
                 0.5 * (phi1[a] + phi1[b2]);
      mis += d * d * g.spacing * g.spacing;
    }
  for (int iy = 0; iy + 1 < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix) {
      std::size_t a = g.index(ix, iy), b2 = g.index(ix, iy + 1);
      if (!edge_ok(a, b2)) continue;
      double d = (out.w.samples[b2] - out.w.samples[a]) / g.spacing -
                 0.5 * (phi2[a] + phi2[b2]);
      mis += d * d * g.spacing * g.spacing;
    }
  out.ls_residual = std::sqrt(mis);
  return out;
}

ReductionResult run_reduction(BeltramiSystem system, const TransformPlan& plan, double tol,
                              int max_iter) {
  ReductionResult out;
  out.g = neumann_solve(system, plan, tol, max_iter, &out.neumann);
  NormalizedPair np = normalize_f(system.F, out.g, plan);
  out.omega = std::move(np.omega);
  out.f = std::move(np.f);
  out.normalize = np.report;
  out.system = std::move(system);
  return out;
}

} // namespace pucp
