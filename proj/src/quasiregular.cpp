#include "pucp/quasiregular.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace pucp {

namespace {

struct LineFit {
  double slope = 0.0, intercept = 0.0, rms = 0.0;
};

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LineFit f;
  std::size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  f.slope = (n * sxy - sx * sy) / denom;
  f.intercept = (sy - f.slope * sx) / n;
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double e = y[i] - f.slope * x[i] - f.intercept;
    acc += e * e;
  }
  f.rms = std::sqrt(acc / n);
  return f;
}

ThreeCircleReport fit_from_rows(std::vector<ThreeCircleRow> rows) {
  ThreeCircleReport rep;
  rep.mode = ThreeCircleMode::quasiregular_fit;
  std::vector<double> xs, ys;
  for (const auto& row : rows) {
    if (row.theta_star <= 0.0) {
      rep.degenerate = true;
      rep.rows = std::move(rows);
      return rep;
    }
    xs.push_back(std::log(1.0 / row.r));
    ys.push_back(1.0 / row.theta_star);
  }
  LineFit lf = fit_line(xs, ys);
  rep.fitted_E = 1.0 / lf.slope;
  rep.fitted_Eprime = std::exp(lf.intercept / lf.slope);
  double spread = 0.0;
  for (const auto& row : rows) {
    double val = row.theta_star * std::log(rep.fitted_Eprime / row.r);
    spread = std::max(spread, std::fabs(val - rep.fitted_E) / std::fabs(rep.fitted_E));
  }
  rep.fit_spread = spread;
  rep.rows = std::move(rows);
  return rep;
}

} // namespace

ThreeCircleReport three_circle_check(const ComplexField& field, double r, complex_t center,
                                     ThreeCircleMode mode) {
  require(r > 0.0 && r < 1.0, "three_circle_check: need r in (0, 1)");
  if (mode == ThreeCircleMode::holomorphic_exact) {
    // triple (r, 1, 6); theta from the measured effective radii so that the
    // Hadamard equality is exact for monomial data on the lattice
    AnnulusNorms an = annulus_norms(field, {r, 1.0, 6.0}, center);
    const double rho1 = an.effective_radii[0], rho2 = an.effective_radii[1],
                 rho3 = an.effective_radii[2];
    ThreeCircleReport rep;
    rep.mode = mode;
    rep.theta = std::log(rho3 / rho2) / std::log(rho3 / rho1);
    double bound = std::pow(an.sup_norms[0], rep.theta) *
                   std::pow(an.sup_norms[2], 1.0 - rep.theta);
    rep.equality_residual =
        std::fabs(an.sup_norms[1] - bound) / std::max(an.sup_norms[1], 1e-300);
    return rep;
  }
  // default dyadic sweep at resolvable radii
  std::vector<double> radii;
  double rr = r;
  for (int j = 0; j < 6 && rr / 2.0 >= 4.0 * field.grid.spacing; ++j, rr *= 0.5)
    radii.push_back(rr);
  std::reverse(radii.begin(), radii.end());
  require(radii.size() >= 2, "three_circle_check: too few resolvable radii for the fit");
  return three_circle_fit(field, radii, center);
}

ThreeCircleReport three_circle_fit(const ComplexField& field, const std::vector<double>& radii,
                                   complex_t center) {
  const DiskGrid& g = field.grid;
  double sup_b1 = norm_on_disc(field, kInfExponent, 1.0, center);
  double l2_b7 = norm_on_disc(field, 2.0, 7.0, center);
  std::vector<ThreeCircleRow> rows;
  for (double r : radii) {
    require(0.5 * r >= 4.0 * g.spacing - 1e-12,
            "three_circle_fit: inner disc needs at least 4 spacings");
    ThreeCircleRow row;
    row.r = r;
    double inner = norm_on_disc(field, 2.0, 0.5 * r, center);
    row.lhs = sup_b1;
    double a = inner / r;
    if (a <= 0.0 || l2_b7 <= 0.0 || sup_b1 <= 0.0) {
      row.theta_star = 0.0;
    } else {
      row.theta_star = std::log(sup_b1 / l2_b7) / std::log(a / l2_b7);
    }
    rows.push_back(row);
  }
  return fit_from_rows(std::move(rows));
}

ThreeCircleReport three_circle_fit_analytic(const std::function<complex_t(complex_t)>& sampler,
                                            const std::vector<double>& radii, complex_t center) {
  double sup_b1 = nested_norm(sampler, kInfExponent, 1.0, center, 512);
  double l2_b7 = nested_norm(sampler, 2.0, 7.0, center, 512);
  std::vector<ThreeCircleRow> rows;
  for (double r : radii) {
    ThreeCircleRow row;
    row.r = r;
    row.lhs = sup_b1;
    double inner = nested_norm(sampler, 2.0, 0.5 * r, center, 256);
    double a = inner / r;
    row.theta_star = (a > 0.0 && l2_b7 > 0.0 && sup_b1 > 0.0)
                         ? std::log(sup_b1 / l2_b7) / std::log(a / l2_b7)
                         : 0.0;
    rows.push_back(row);
  }
  return fit_from_rows(std::move(rows));
}

HarnackReport upper_harnack_check(const ComplexField& field, double r, complex_t center,
                                  double c_budget) {
  HarnackReport rep;
  rep.sup_half = norm_on_disc(field, kInfExponent, 0.5 * r, center);
  rep.mean_full = mean_abs_on_disc(field, r, center);
  rep.c_measured = rep.mean_full > 0.0 ? rep.sup_half / rep.mean_full
                                       : (rep.sup_half > 0.0 ? kInfExponent : 1.0);
  rep.pass = rep.c_measured <= c_budget;
  return rep;
}

HolderReport holder_check_qc(const ComplexField& map_samples, double alpha_expected,
                             double c0_expected, std::size_t pair_count, uint64_t seed) {
  const DiskGrid& g = map_samples.grid;
  const double region = 0.75 * g.domain_radius;
  std::mt19937_64 rng(seed ? seed : 0x9e3779b97f4a7c15ULL);
  auto uniform = [&rng]() {
    return static_cast<double>(rng() >> 11) / 9007199254740992.0;
  };
  auto draw = [&]() -> std::size_t {
    for (;;) {
      int ix = static_cast<int>(uniform() * g.n);
      int iy = static_cast<int>(uniform() * g.n);
      ix = std::min(ix, g.n - 1);
      iy = std::min(iy, g.n - 1);
      if (std::abs(g.point(ix, iy) - g.center) < region) return g.index(ix, iy);
    }
  };

  HolderReport rep;
  rep.worst_lower = kInfExponent;
  const double slack = 1.0 + 1e-9;
  for (std::size_t i = 0; i < pair_count; ++i) {
    std::size_t ka = draw(), kb = draw();
    if (ka == kb) continue;
    int ay = static_cast<int>(ka) / g.n, ax = static_cast<int>(ka) % g.n;
    int by = static_cast<int>(kb) / g.n, bx = static_cast<int>(kb) % g.n;
    double d = std::abs(g.point(ax, ay) - g.point(bx, by));
    double val = std::abs(map_samples.samples[ka] - map_samples.samples[kb]);
    double upper = c0_expected * std::pow(d, alpha_expected);
    double lower = std::pow(d, 1.0 / alpha_expected) / c0_expected;
    ++rep.pairs;
    if (val > upper * slack) ++rep.upper_violations;
    if (val < lower / slack) ++rep.lower_violations;
    rep.worst_upper = std::max(rep.worst_upper, val / upper);
    rep.worst_lower = std::min(rep.worst_lower, val / lower);
  }
  rep.pass = rep.upper_violations == 0 && rep.lower_violations == 0;
  return rep;
}

VanishingOrderFit vanishing_order_fit(const RealField& v, complex_t center, double r_min,
                                      double r_max, double n_max) {
  const DiskGrid& g = v.grid;
  require(r_min >= 4.0 * g.spacing - 1e-12,
          "vanishing_order_fit: r_min must be at least 4 x spacing");
  require(r_max > r_min && std::abs(center - g.center) + r_max <= g.domain_radius + 1e-12,
          "vanishing_order_fit: bad radius range");

  // value at the sample nearest the requested center
  double vc = 0.0;
  {
    double best = 1e300;
    for (int iy = 0; iy < g.n; ++iy)
      for (int ix = 0; ix < g.n; ++ix) {
        double d = std::abs(g.point(ix, iy) - center);
        if (d < best) {
          best = d;
          vc = v.samples[g.index(ix, iy)];
        }
      }
  }

  VanishingOrderFit fit;
  for (double r = r_min; r <= r_max * (1.0 + 1e-12); r *= 2.0) {
    fit.radii.push_back(scan_disc(g, center, r).effective_radius);
    fit.sup_norms.push_back(sup_abs_minus(v, vc, r, center));
  }
  require(fit.radii.size() >= 6, "vanishing_order_fit: need at least 6 dyadic radii");

  double vscale = std::max(1.0, std::fabs(vc));
  bool constant = true;
  for (double m : fit.sup_norms)
    if (m > 10.0 * std::numeric_limits<double>::epsilon() * vscale) constant = false;
  if (constant) {
    fit.verdict = VanishingVerdict::identically_constant;
    return fit;
  }

  std::vector<double> xs, ys;
  for (std::size_t i = 0; i < fit.radii.size(); ++i) {
    xs.push_back(std::log(fit.radii[i]));
    ys.push_back(std::log(std::max(fit.sup_norms[i], 1e-300)));
  }
  LineFit lf = fit_line(xs, ys);
  fit.slope = lf.slope;
  fit.regression_residual = lf.rms;
  fit.smallest_decade_slope = (ys[1] - ys[0]) / (xs[1] - xs[0]);
  fit.verdict = fit.smallest_decade_slope > n_max ? VanishingVerdict::exceeds_nmax
                                                  : VanishingVerdict::finite_order;
  return fit;
}

} // namespace pucp
