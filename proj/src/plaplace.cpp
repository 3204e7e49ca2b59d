#include "pucp/plaplace.hpp"

#include "pucp/norms.hpp"

#include <cmath>

namespace pucp {

namespace {

struct Stencil {
  const DiskGrid& g;
  const std::vector<uint8_t>& interior;
  double p, eps;
  EquationVariant variant;
  const RealField* weight;
  const VectorField2* drift;

  // midpoint-gradient edge coefficient between (ix,iy) and (ix+1,iy)
  double coeff_x(const std::vector<double>& u, int ix, int iy) const {
    const double h = g.spacing;
    double gx = (u[g.index(ix + 1, iy)] - u[g.index(ix, iy)]) / h;
    double gy = (u[g.index(ix, iy + 1)] + u[g.index(ix + 1, iy + 1)] -
                 u[g.index(ix, iy - 1)] - u[g.index(ix + 1, iy - 1)]) /
                (4.0 * h);
    double c = std::pow(gx * gx + gy * gy + eps * eps, 0.5 * (p - 2.0));
    if (variant == EquationVariant::weighted)
      c *= 0.5 * (weight->samples[g.index(ix, iy)] + weight->samples[g.index(ix + 1, iy)]);
    return c;
  }

  double coeff_y(const std::vector<double>& u, int ix, int iy) const {
    const double h = g.spacing;
    double gy = (u[g.index(ix, iy + 1)] - u[g.index(ix, iy)]) / h;
    double gx = (u[g.index(ix + 1, iy)] + u[g.index(ix + 1, iy + 1)] -
                 u[g.index(ix - 1, iy)] - u[g.index(ix - 1, iy + 1)]) /
                (4.0 * h);
    double c = std::pow(gx * gx + gy * gy + eps * eps, 0.5 * (p - 2.0));
    if (variant == EquationVariant::weighted)
      c *= 0.5 * (weight->samples[g.index(ix, iy)] + weight->samples[g.index(ix, iy + 1)]);
    return c;
  }
};

// Frozen-coefficient linear operator: four edge coefficients and the drift
// row (centered first-order term) per interior node.
struct LinearOp {
  const DiskGrid* g = nullptr;
  const std::vector<uint8_t>* interior = nullptr;
  std::vector<double> ce, cw, cn, cs; // edge coefficients
  std::vector<double> bx, by;         // drift . (c grad .) weights at the node
  double h = 0.0;

  // y(u) = L u at interior nodes, using the full-grid vector u
  void apply(const std::vector<double>& u, std::vector<double>& out) const {
    const DiskGrid& gr = *g;
    const double inv_h2 = 1.0 / (h * h);
    const double inv_2h = 1.0 / (2.0 * h);
#pragma omp parallel for schedule(static)
    for (int iy = 1; iy < gr.n - 1; ++iy)
      for (int ix = 1; ix < gr.n - 1; ++ix) {
        std::size_t k = gr.index(ix, iy);
        if (!(*interior)[k]) continue;
        double uc = u[k];
        double diff = (ce[k] * (u[gr.index(ix + 1, iy)] - uc) +
                       cw[k] * (u[gr.index(ix - 1, iy)] - uc) +
                       cn[k] * (u[gr.index(ix, iy + 1)] - uc) +
                       cs[k] * (u[gr.index(ix, iy - 1)] - uc)) *
                      inv_h2;
        double gx = (u[gr.index(ix + 1, iy)] - u[gr.index(ix - 1, iy)]) * inv_2h;
        double gy = (u[gr.index(ix, iy + 1)] - u[gr.index(ix, iy - 1)]) * inv_2h;
        out[k] = diff + bx[k] * gx + by[k] * gy;
      }
  }
};

LinearOp freeze_coefficients(const PLaplaceProblem& pb, const std::vector<double>& v) {
  const DiskGrid& g = pb.grid;
  Stencil st{g, pb.solve_mask, pb.p, pb.epsilon, pb.variant,
             pb.variant == EquationVariant::weighted ? &pb.weight : nullptr,
             pb.variant == EquationVariant::drift ? &pb.drift : nullptr};
  LinearOp op;
  op.g = &g;
  op.interior = &pb.solve_mask;
  op.h = g.spacing;
  op.ce.assign(g.size(), 0.0);
  op.cw.assign(g.size(), 0.0);
  op.cn.assign(g.size(), 0.0);
  op.cs.assign(g.size(), 0.0);
  op.bx.assign(g.size(), 0.0);
  op.by.assign(g.size(), 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 1; iy < g.n - 1; ++iy)
    for (int ix = 1; ix < g.n - 1; ++ix) {
      std::size_t k = g.index(ix, iy);
      if (!pb.solve_mask[k]) continue;
      op.ce[k] = st.coeff_x(v, ix, iy);
      op.cw[k] = st.coeff_x(v, ix - 1, iy);
      op.cn[k] = st.coeff_y(v, ix, iy);
      op.cs[k] = st.coeff_y(v, ix, iy - 1);
      if (pb.variant == EquationVariant::drift) {
        const double h = g.spacing;
        double gx = (v[g.index(ix + 1, iy)] - v[g.index(ix - 1, iy)]) / (2.0 * h);
        double gy = (v[g.index(ix, iy + 1)] - v[g.index(ix, iy - 1)]) / (2.0 * h);
        double c = std::pow(gx * gx + gy * gy + pb.epsilon * pb.epsilon, 0.5 * (pb.p - 2.0));
        op.bx[k] = pb.drift.xc[k] * c;
        op.by[k] = pb.drift.yc[k] * c;
      }
    }
  return op;
}

// Deterministic masked dot product (row partials accumulated in order).
double masked_dot(const DiskGrid& g, const std::vector<uint8_t>& m, const std::vector<double>& a,
                  const std::vector<double>& b) {
  std::vector<double> rows(g.n, 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 0; iy < g.n; ++iy) {
    double acc = 0.0;
    for (int ix = 0; ix < g.n; ++ix) {
      std::size_t k = g.index(ix, iy);
      if (m[k]) acc += a[k] * b[k];
    }
    rows[iy] = acc;
  }
  return deterministic_sum(rows);
}

// BiCGStab on the interior unknowns with Jacobi preconditioning.
// Solves L(x) = rhs where rhs absorbs the Dirichlet data. Returns iterations.
int bicgstab(const LinearOp& op, const PLaplaceProblem& pb, const std::vector<double>& rhs,
             std::vector<double>& x, double rel_tol, int max_iter) {
  const DiskGrid& g = pb.grid;
  const auto& m = pb.solve_mask;
  const std::size_t N = g.size();

  std::vector<double> diag(N, 1.0);
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < static_cast<long long>(N); ++k)
    if (m[k]) {
      double d = -(op.ce[k] + op.cw[k] + op.cn[k] + op.cs[k]) / (op.h * op.h);
      diag[k] = (d == 0.0) ? 1.0 : d;
    }
  auto precond = [&](const std::vector<double>& r, std::vector<double>& z) {
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(N); ++k) z[k] = m[k] ? r[k] / diag[k] : 0.0;
  };

  std::vector<double> r(N, 0.0), r0(N, 0.0), pvec(N, 0.0), vv(N, 0.0), s(N, 0.0), t(N, 0.0),
      phat(N, 0.0), shat(N, 0.0), tmp(N, 0.0);

  op.apply(x, tmp);
#pragma omp parallel for schedule(static)
  for (long long k = 0; k < static_cast<long long>(N); ++k) r[k] = m[k] ? rhs[k] - tmp[k] : 0.0;
  r0 = r;

  double rnorm0 = std::sqrt(masked_dot(g, m, r, r));
  if (rnorm0 == 0.0) return 0;
  double rho_old = 1.0, alpha = 1.0, omega = 1.0;
  int it = 0;
  for (; it < max_iter; ++it) {
    double rho = masked_dot(g, m, r0, r);
    if (std::fabs(rho) < 1e-300) break;
    if (it == 0) {
      pvec = r;
    } else {
      double beta = (rho / rho_old) * (alpha / omega);
#pragma omp parallel for schedule(static)
      for (long long k = 0; k < static_cast<long long>(N); ++k)
        pvec[k] = r[k] + beta * (pvec[k] - omega * vv[k]);
    }
    precond(pvec, phat);
    op.apply(phat, vv);
    double denom = masked_dot(g, m, r0, vv);
    if (std::fabs(denom) < 1e-300) break;
    alpha = rho / denom;
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(N); ++k) s[k] = r[k] - alpha * vv[k];
    double snorm = std::sqrt(masked_dot(g, m, s, s));
    if (snorm <= rel_tol * rnorm0) {
#pragma omp parallel for schedule(static)
      for (long long k = 0; k < static_cast<long long>(N); ++k)
        if (m[k]) x[k] += alpha * phat[k];
      break;
    }
    precond(s, shat);
    op.apply(shat, t);
    double tt = masked_dot(g, m, t, t);
    if (tt == 0.0) break;
    omega = masked_dot(g, m, t, s) / tt;
#pragma omp parallel for schedule(static)
    for (long long k = 0; k < static_cast<long long>(N); ++k)
      if (m[k]) {
        x[k] += alpha * phat[k] + omega * shat[k];
        r[k] = s[k] - omega * t[k];
      }
    double rnorm = std::sqrt(masked_dot(g, m, r, r));
    if (rnorm <= rel_tol * rnorm0) break;
    if (omega == 0.0) break;
    rho_old = rho;
  }
  return it + 1;
}

// Unregularized flux magnitude factor |grad|^{p-2}, with the continuous
// extension flux = 0 at a vanishing gradient (valid for p > 1).
inline double flux_factor(double g2, double p) {
  if (g2 <= 0.0) return 0.0;
  return std::pow(g2, 0.5 * (p - 2.0));
}

} // namespace

void PLaplaceProblem::validate() const {
  require(p > 1.0, "p-laplace: need p > 1");
  require(epsilon > 0.0, "p-laplace: regularization epsilon must be positive");
  require(solve_mask.size() == grid.size(), "p-laplace: solve mask size mismatch");
  require(static_cast<bool>(boundary_data), "p-laplace: boundary data missing");
  if (variant == EquationVariant::weighted) {
    require(weight.samples.size() == grid.size(), "p-laplace: weight field missing");
    for (std::size_t k = 0; k < grid.size(); ++k)
      if (solve_mask[k])
        require(weight.samples[k] > 0.0, "p-laplace: weight must be positive on the interior");
  } else {
    require(drift.xc.size() == grid.size(), "p-laplace: drift field missing");
  }
}

double plaplace_residual(const PLaplaceProblem& pb, const RealField& v) {
  const DiskGrid& g = pb.grid;
  const double h = g.spacing;
  const auto& u = v.samples;
  std::vector<double> rows(g.n, 0.0);
#pragma omp parallel for schedule(static)
  for (int iy = 2; iy < g.n - 2; ++iy) {
    double acc = 0.0;
    for (int ix = 2; ix < g.n - 2; ++ix) {
      std::size_t k = g.index(ix, iy);
      if (!pb.solve_mask[k]) continue;
      // unregularized edge fluxes
      auto edge_flux_x = [&](int jx, int jy) {
        double gx = (u[g.index(jx + 1, jy)] - u[g.index(jx, jy)]) / h;
        double gy = (u[g.index(jx, jy + 1)] + u[g.index(jx + 1, jy + 1)] -
                     u[g.index(jx, jy - 1)] - u[g.index(jx + 1, jy - 1)]) /
                    (4.0 * h);
        double c = flux_factor(gx * gx + gy * gy, pb.p);
        if (pb.variant == EquationVariant::weighted)
          c *= 0.5 * (pb.weight.samples[g.index(jx, jy)] + pb.weight.samples[g.index(jx + 1, jy)]);
        return c * gx;
      };
      auto edge_flux_y = [&](int jx, int jy) {
        double gy = (u[g.index(jx, jy + 1)] - u[g.index(jx, jy)]) / h;
        double gx = (u[g.index(jx + 1, jy)] + u[g.index(jx + 1, jy + 1)] -
                     u[g.index(jx - 1, jy)] - u[g.index(jx - 1, jy + 1)]) /
                    (4.0 * h);
        double c = flux_factor(gx * gx + gy * gy, pb.p);
        if (pb.variant == EquationVariant::weighted)
          c *= 0.5 * (pb.weight.samples[g.index(jx, jy)] + pb.weight.samples[g.index(jx, jy + 1)]);
        return c * gy;
      };
      double div = (edge_flux_x(ix, iy) - edge_flux_x(ix - 1, iy) + edge_flux_y(ix, iy) -
                    edge_flux_y(ix, iy - 1)) /
                   h;
      double r = div;
      if (pb.variant == EquationVariant::drift) {
        double gx = (u[g.index(ix + 1, iy)] - u[g.index(ix - 1, iy)]) / (2.0 * h);
        double gy = (u[g.index(ix, iy + 1)] - u[g.index(ix, iy - 1)]) / (2.0 * h);
        double c = flux_factor(gx * gx + gy * gy, pb.p);
        r += pb.drift.xc[k] * c * gx + pb.drift.yc[k] * c * gy;
      }
      acc += r * r;
    }
    rows[iy] = acc * h * h;
  }
  return std::sqrt(deterministic_sum(rows));
}

SolveResult solve_dirichlet(const PLaplaceProblem& problem, double tol, int max_iter) {
  const PLaplaceProblem& pb = problem;
  pb.validate();
  const DiskGrid& g = pb.grid;

  // initial iterate: boundary data everywhere (also fills Dirichlet nodes),
  // unless the problem carries an explicit starting guess
  RealField v(g);
  for (int iy = 0; iy < g.n; ++iy)
    for (int ix = 0; ix < g.n; ++ix)
      v.samples[g.index(ix, iy)] = pb.boundary_data(g.point(ix, iy));
  if (!pb.initial_guess.empty()) {
    require(pb.initial_guess.size() == g.size(), "solve_dirichlet: bad initial guess size");
    for (std::size_t k = 0; k < g.size(); ++k)
      if (pb.solve_mask[k]) v.samples[k] = pb.initial_guess[k];
  }

  SolveResult res;
  res.report.final_residual = plaplace_residual(pb, v);
  double lambda = 1.0;

  for (int outer = 0; outer < max_iter; ++outer) {
    if (res.report.final_residual <= tol) {
      res.report.achieved_tolerance = true;
      break;
    }
    LinearOp op = freeze_coefficients(pb, v.samples);

    // rhs = -L(boundary part); unknowns start from the current iterate
    std::vector<double> zero_bc = v.samples;
    for (std::size_t k = 0; k < g.size(); ++k)
      if (pb.solve_mask[k]) zero_bc[k] = 0.0;
    std::vector<double> Lb(g.size(), 0.0);
    op.apply(zero_bc, Lb);
    std::vector<double> rhs(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k)
      if (pb.solve_mask[k]) rhs[k] = -Lb[k];

    std::vector<double> u = v.samples; // full grid; interior entries are unknowns
    for (std::size_t k = 0; k < g.size(); ++k)
      if (!pb.solve_mask[k]) u[k] = 0.0;
    // the operator treats u as interior-only; add boundary via rhs
    res.report.linear_iterations += bicgstab(op, pb, rhs, u, 1e-12, 4000);

    // candidate with damping; retry with smaller steps on residual increase
    bool accepted = false;
    while (lambda >= 1e-6) {
      RealField cand = v;
      for (std::size_t k = 0; k < g.size(); ++k)
        if (pb.solve_mask[k])
          cand.samples[k] = v.samples[k] + lambda * (u[k] + 0.0 - v.samples[k]);
      // note: u holds interior-only values; combine with boundary from v
      double r_cand = plaplace_residual(pb, cand);
      if (r_cand < res.report.final_residual || lambda <= 2e-6) {
        v = cand;
        res.report.final_residual = r_cand;
        res.report.damping_history.push_back(lambda);
        res.report.iterations++;
        lambda = std::min(1.0, lambda * 1.5);
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) break;
  }
  if (res.report.final_residual <= tol) res.report.achieved_tolerance = true;
  res.v = std::move(v);
  return res;
}

ManufacturedInstance manufactured_instance(ManufacturedKind kind, double p, const DiskGrid& grid,
                                           int monomial_degree) {
  require(p > 1.0, "manufactured_instance: need p > 1");
  ManufacturedInstance inst;
  inst.problem.p = p;
  inst.problem.grid = grid;
  inst.problem.epsilon = grid.spacing;
  inst.problem.variant = EquationVariant::drift;
  inst.problem.drift = VectorField2(grid);
  inst.problem.solve_mask = disk_interior_mask(grid);
  inst.exact_w = [](complex_t) { return complex_t{0.0, 0.0}; };

  switch (kind) {
    case ManufacturedKind::affine: {
      inst.exact = [](complex_t z) { return z.real(); };
      break;
    }
    case ManufacturedKind::harmonic_monomial: {
      require(std::fabs(p - 2.0) < 1e-14,
              "manufactured_instance: harmonic monomials solve the p=2 equation only");
      int N = monomial_degree;
      inst.exact = [N](complex_t z) { return std::pow(z, N).real(); };
      break;
    }
    case ManufacturedKind::radial: {
      require(std::fabs(p - 2.0) > 1e-12, "manufactured_instance: radial kind needs p != 2");
      require(grid.domain_radius >= 4.0, "manufactured_instance: radial annulus needs radius 4");
      double alpha = (p - 2.0) / (p - 1.0);
      inst.exact = [alpha](complex_t z) { return std::pow(std::abs(z), alpha); };
      inst.problem.solve_mask = annulus_interior_mask(grid, 1.0, 4.0);
      // gradients are bounded below on the annulus; a tiny regularization
      // keeps the fixed point at the unregularized discrete solution
      inst.problem.epsilon = 0.01 * grid.spacing;
      break;
    }
    case ManufacturedKind::drifted: {
      // v = x + beta (x^2 - y^2) is harmonic with |grad v| >= 1/2 on B_8;
      // the drift is solved from the pointwise identity along grad v.
      const double beta = 1.0 / 32.0;
      inst.problem.epsilon = 0.01 * grid.spacing; // |grad v| >= 1/2 on B_8
      const double threshold = 10.0 * inst.problem.epsilon;
      inst.exact = [beta](complex_t z) {
        return z.real() + beta * (z.real() * z.real() - z.imag() * z.imag());
      };
      inst.exact_w = [beta, p, threshold](complex_t z) -> complex_t {
        double vx = 1.0 + 2.0 * beta * z.real();
        double vy = -2.0 * beta * z.imag();
        double g2 = vx * vx + vy * vy;
        if (g2 < threshold * threshold) return {0.0, 0.0};
        double div_flux_over_c = (p - 2.0) / g2 * 2.0 * beta * (vx * vx - vy * vy);
        double scale = -div_flux_over_c / g2;
        return {scale * vx, scale * vy};
      };
      inst.problem.drift = sample_vector(
          grid, [&inst](complex_t z) { return inst.exact_w(z).real(); },
          [&inst](complex_t z) { return inst.exact_w(z).imag(); });
      break;
    }
  }
  inst.problem.boundary_data = inst.exact;
  inst.reference = sample_real(grid, inst.exact);
  return inst;
}

ManufacturedInstance weighted_reference_instance(double p, const DiskGrid& grid) {
  ManufacturedInstance inst;
  inst.problem.p = p;
  inst.problem.grid = grid;
  inst.problem.epsilon = grid.spacing;
  inst.problem.variant = EquationVariant::weighted;
  inst.problem.solve_mask = disk_interior_mask(grid);
  const double R = grid.domain_radius;
  auto a_of = [R](complex_t z) { return 1.0 + 0.3 * std::cos(3.14159265358979324 * z.imag() / R); };
  inst.problem.weight = sample_real(grid, a_of);
  inst.exact = [](complex_t z) { return z.real(); };
  inst.exact_w = [](complex_t) { return complex_t{0.0, 0.0}; };
  inst.problem.boundary_data = inst.exact;
  inst.reference = sample_real(grid, inst.exact);
  return inst;
}

} // namespace pucp
