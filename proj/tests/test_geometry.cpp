#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "prolong/exceptions.hpp"
#include "prolong/geometry.hpp"
#include "prolong/grid.hpp"

#include <random>

using namespace prolong;

namespace {

Eigen::VectorXd random_point(std::mt19937_64& rng, int n, double radius) {
  std::uniform_real_distribution<double> unif(-radius, radius);
  Eigen::VectorXd x(n);
  do {
    for (int a = 0; a < n; ++a) x[a] = unif(rng);
  } while (x.norm() > radius);
  return x;
}

std::vector<MetricChart> sample_charts(int n) {
  std::vector<MetricChart> charts = {flat_chart(n), sphere_chart(n, 1.0),
                                     hyperbolic_chart(n, 1.0)};
  MultiPoly phi(n, 2);
  phi += MultiPoly::variable(n, 2, 0) * 0.2;
  phi += MultiPoly::variable(n, 2, 0) * MultiPoly::variable(n, 2, 1) * 0.1;
  charts.push_back(conformal_poly_chart(n, phi));
  return charts;
}

} // namespace

TEST_CASE("christoffel closed forms") {
  auto fl = flat_chart(3);
  Eigen::VectorXd x(3);
  x << 0.4, -0.2, 0.9;
  for (const auto& g : christoffel(fl, x)) CHECK(g.norm() == 0.0);

  // The sphere factor has a critical point at the origin.
  auto sph = sphere_chart(3, 1.0);
  for (const auto& g : christoffel(sph, Eigen::VectorXd::Zero(3)))
    CHECK(g.norm() == doctest::Approx(0.0));

  const double c = 1.3;
  MultiPoly phi = MultiPoly::variable(2, 1, 0) * c;
  auto cp = conformal_poly_chart(2, phi);
  Eigen::VectorXd y(2);
  y << 0.5, 0.25;
  auto g = christoffel(cp, y);
  CHECK(g[0](0, 0) == doctest::Approx(c));
  CHECK(g[0](1, 1) == doctest::Approx(-c));
  CHECK(g[1](0, 1) == doctest::Approx(c));
  CHECK(g[1](0, 0) == doctest::Approx(0.0));
}

TEST_CASE("metric compatibility and curvature symmetries at sampled points") {
  std::mt19937_64 rng(11);
  const int n = 3;
  for (const auto& chart : sample_charts(n)) {
    for (int trial = 0; trial < 100; ++trial) {
      Eigen::VectorXd x = random_point(rng, n, 0.6);
      const auto gamma = christoffel(chart, x);
      const Eigen::VectorXd dphi = phi_grad(chart, x);
      const double e2 = std::exp(2.0 * phi_value(chart, x));

      // d_c g_ab - Gamma^d_ca g_db - Gamma^d_cb g_ad = 0.
      for (int cdir = 0; cdir < n; ++cdir)
        for (int a = 0; a < n; ++a)
          for (int b = 0; b < n; ++b) {
            const double dg = 2.0 * dphi[cdir] * e2 * (a == b ? 1.0 : 0.0);
            const double corr = gamma[b](cdir, a) * e2 + gamma[a](cdir, b) * e2;
            CHECK(std::abs(dg - corr) < 1e-10 * std::max(1.0, std::abs(dg)));
          }

      // Riemann antisymmetries, pair symmetry, first Bianchi (lowered).
      const auto riem = riemann(chart, x);
      std::vector<std::vector<Eigen::MatrixXd>> low(
          n, std::vector<Eigen::MatrixXd>(n, Eigen::MatrixXd::Zero(n, n)));
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) low[i][j](k, l) = e2 * riem[i][j](k, l);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          for (int k = 0; k < n; ++k)
            for (int l = 0; l < n; ++l) {
              CHECK(std::abs(low[i][j](k, l) + low[j][i](k, l)) < 1e-9);
              CHECK(std::abs(low[i][j](k, l) + low[i][j](l, k)) < 1e-9);
              CHECK(std::abs(low[i][j](k, l) - low[k][l](i, j)) < 1e-9);
              CHECK(std::abs(low[i][j](k, l) + low[i][k](l, j) + low[i][l](j, k)) < 1e-9);
            }
    }
  }
}

TEST_CASE("curvature values on the catalog") {
  std::mt19937_64 rng(12);
  auto fl = flat_chart(3);
  for (int t = 0; t < 10; ++t) {
    Eigen::VectorXd x = random_point(rng, 3, 1.0);
    const auto riem = riemann(fl, x);
    for (const auto& block : riem)
      for (const auto& m : block) CHECK(m.norm() == 0.0);
  }

  for (double rho : {1.0, 2.0}) {
    auto sph = sphere_chart(3, rho);
    auto hyp = hyperbolic_chart(3, rho);
    for (int t = 0; t < 100; ++t) {
      Eigen::VectorXd x = random_point(rng, 3, 0.5 * rho);
      CHECK(scalar_curvature(sph, x) == doctest::Approx(6.0 / (rho * rho)).epsilon(1e-10));
      CHECK(tracefree_ricci(sph, x).norm() < 1e-10);
      CHECK(scalar_curvature(hyp, x) == doctest::Approx(-6.0 / (rho * rho)).epsilon(1e-10));
      CHECK(tracefree_ricci(hyp, x).norm() < 1e-10);
    }
  }
}

TEST_CASE("conformal Ricci closed form matches the Christoffel assembly") {
  std::mt19937_64 rng(13);
  for (const auto& chart : sample_charts(3)) {
    for (int t = 0; t < 20; ++t) {
      Eigen::VectorXd x = random_point(rng, 3, 0.6);
      const Eigen::MatrixXd direct = ricci(chart, x);
      const Eigen::MatrixXd closed =
          ricci_from_conformal_factor(3, phi_grad(chart, x), phi_hess(chart, x));
      CHECK((direct - closed).norm() < 1e-10 * std::max(1.0, direct.norm()));
    }
  }
}

TEST_CASE("finite-difference curvature converges at fourth order") {
  auto sph = sphere_chart(3, 1.0);
  Eigen::VectorXd x(3);
  x << 0.3, -0.2, 0.1;

  auto fd_dgamma = [&](double h) {
    // FD the Christoffel symbols, compare against the exact derivative.
    double worst = 0.0;
    const auto exact = christoffel_derivative(sph, x);
    for (int d = 0; d < 3; ++d) {
      auto s = [&](int off) {
        Eigen::VectorXd y = x;
        y[d] += off * h;
        return christoffel(sph, y);
      };
      auto gm2 = s(-2), gm1 = s(-1), gp1 = s(1), gp2 = s(2);
      for (int a = 0; a < 3; ++a) {
        Eigen::MatrixXd fd =
            (gm2[a] - 8.0 * gm1[a] + 8.0 * gp1[a] - gp2[a]) / (12.0 * h);
        worst = std::max(worst, (fd - exact[a][d]).norm());
      }
    }
    return worst;
  };
  const double gap1 = fd_dgamma(1e-2);
  const double gap2 = fd_dgamma(5e-3);
  CHECK(gap1 / gap2 >= 8.0);
}

TEST_CASE("covariant derivatives of component fields") {
  auto fl = flat_chart(2);
  MultiPoly f = MultiPoly::variable(2, 2, 0) * MultiPoly::variable(2, 2, 1);
  Eigen::VectorXd x(2);
  x << 0.7, -0.3;
  Eigen::MatrixXd hess = covariant_hessian(fl, x, ScalarField::from_poly(f));
  CHECK(hess(0, 1) == doctest::Approx(1.0));
  CHECK(hess(1, 0) == doctest::Approx(1.0));
  CHECK(hess(0, 0) == doctest::Approx(0.0));
  CHECK(hess(1, 1) == doctest::Approx(0.0));

  // Metricity: nabla g = 0 for every catalog chart, with exact partials.
  std::mt19937_64 rng(14);
  for (const auto& chart : sample_charts(3)) {
    for (int t = 0; t < 10; ++t) {
      Eigen::VectorXd p = random_point(rng, 3, 0.6);
      const double e2 = std::exp(2.0 * phi_value(chart, p));
      const Eigen::VectorXd dphi = phi_grad(chart, p);
      Eigen::MatrixXd g = e2 * Eigen::MatrixXd::Identity(3, 3);
      std::vector<Eigen::MatrixXd> dg(3);
      for (int c = 0; c < 3; ++c) dg[c] = 2.0 * dphi[c] * g;
      const auto cov = cov_deriv_twotensor(chart, p, g, dg);
      for (int c = 0; c < 3; ++c) CHECK(cov[c].norm() < 1e-10);
    }
  }

  // nabla of the zero lower-order tensor vanishes.
  auto sph = sphere_chart(3, 1.0);
  auto a0 = LowerOrderTensor::zero(3);
  Eigen::VectorXd p(3);
  p << 0.2, 0.1, -0.4;
  for (const auto& m : a0.covariant(sph, p)) CHECK(m.norm() == 0.0);
}

TEST_CASE("lower-order tensor projection and validation") {
  const int n = 3;
  // A = x1 e1 (x) e1 declared as components; projection removes the trace.
  std::vector<MultiPoly> upper(n * (n + 1) / 2, MultiPoly(n, 1));
  upper[0] = MultiPoly::variable(n, 1, 0); // (0,0) entry
  auto a = LowerOrderTensor::from_components(n, upper, /*declare_tracefree=*/false);
  CHECK(a.projected_on_load);
  std::mt19937_64 rng(15);
  for (int t = 0; t < 20; ++t) {
    Eigen::VectorXd x = random_point(rng, n, 1.0);
    CHECK(std::abs(a.value(x).trace()) < 1e-12);
    CHECK(a.value(x)(0, 0) == doctest::Approx(x[0] * 2.0 / 3.0));
  }
  CHECK_THROWS_AS(LowerOrderTensor::from_components(n, upper, /*declare_tracefree=*/true),
                  ConfigError);
  CHECK(LowerOrderTensor::zero(n).is_zero());
  CHECK(!a.is_zero());
}

TEST_CASE("einstein rescaling residuals") {
  auto fl = flat_chart(3);
  std::vector<Eigen::VectorXd> region;
  for (double u = -0.5; u <= 0.51; u += 0.25)
    for (double v = -0.5; v <= 0.51; v += 0.25)
      for (double w = -0.5; w <= 0.51; w += 0.5) {
        Eigen::VectorXd p(3);
        p << u, v, w;
        region.push_back(p);
      }

  CHECK(einstein_residual_of_rescaling(fl, ScalarField::constant(3, 1.0), region) <
        1e-12);

  MultiPoly one_plus_r2 = MultiPoly::constant(3, 2, 1.0);
  for (int a = 0; a < 3; ++a) {
    MultiPoly xa = MultiPoly::variable(3, 2, a);
    one_plus_r2 += xa * xa;
  }
  CHECK(einstein_residual_of_rescaling(fl, ScalarField::from_poly(one_plus_r2), region) <
        1e-8);

  std::vector<Eigen::VectorXd> halfspace;
  for (double u = 0.5; u <= 1.01; u += 0.25)
    for (double v = -0.4; v <= 0.41; v += 0.2) {
      Eigen::VectorXd p(3);
      p << u, v, 0.1;
      halfspace.push_back(p);
    }
  MultiPoly x1 = MultiPoly::variable(3, 2, 0);
  CHECK(einstein_residual_of_rescaling(fl, ScalarField::from_poly(x1), halfspace) < 1e-8);

  // Positivity precondition: f = x1 dips below eps on a region crossing 0.
  CHECK_THROWS_AS(
      einstein_residual_of_rescaling(fl, ScalarField::from_poly(x1), region),
      ConfigError);
}

TEST_CASE("chart jets agree with closed-form derivatives") {
  std::mt19937_64 rng(16);
  for (const auto& chart : sample_charts(3)) {
    for (int t = 0; t < 5; ++t) {
      Eigen::VectorXd x = random_point(rng, 3, 0.5);
      MultiPoly jet = phi_jet(chart, x, 3);
      CHECK(jet.constant_term() == doctest::Approx(phi_value(chart, x)).epsilon(1e-12));
      const Eigen::VectorXd g = phi_grad(chart, x);
      const Eigen::MatrixXd h = phi_hess(chart, x);
      for (int a = 0; a < 3; ++a) {
        CHECK(jet.derivative(a).constant_term() == doctest::Approx(g[a]).epsilon(1e-11));
        for (int b = 0; b < 3; ++b)
          CHECK(jet.derivative(a).derivative(b).constant_term() ==
                doctest::Approx(h(a, b)).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("domain checks") {
  auto hyp = hyperbolic_chart(3, 1.0);
  Eigen::VectorXd inside(3), outside(3);
  inside << 0.5, 0.0, 0.0;
  outside << 0.95, 0.0, 0.0;
  CHECK(in_domain(hyp, inside));
  CHECK(!in_domain(hyp, outside));
  CHECK_THROWS_AS(christoffel(hyp, outside), ConfigError);
  CHECK_THROWS_AS(phi_value(sphere_chart(2, 1.0), Eigen::VectorXd::Constant(2, 4.0)),
                  ConfigError);
}

TEST_CASE("grid stencils are exact on low-degree polynomials") {
  Eigen::VectorXd center(2);
  center << 0.1, -0.2;
  Grid grid(center, 0.05, 13);
  MultiPoly p = MultiPoly::variable(2, 3, 0) * MultiPoly::variable(2, 3, 1) *
                    MultiPoly::variable(2, 3, 1) +
                MultiPoly::variable(2, 3, 0) * 2.0;
  auto gf = GridScalarField::sample(grid, [&](const Eigen::VectorXd& x) { return p.eval(x); });

  std::vector<int> idx = {6, 6};
  const Eigen::VectorXd x = grid.node(idx);
  Eigen::VectorXd grad = gf.gradient(idx);
  CHECK(grad[0] == doctest::Approx(p.derivative(0).eval(x)).epsilon(1e-10));
  CHECK(grad[1] == doctest::Approx(p.derivative(1).eval(x)).epsilon(1e-10));
  Eigen::MatrixXd hess = gf.hessian(idx);
  CHECK(hess(0, 1) == doctest::Approx(p.derivative(0).derivative(1).eval(x)).epsilon(1e-9));
  CHECK(hess(1, 1) == doctest::Approx(p.derivative(1).derivative(1).eval(x)).epsilon(1e-9));

  // Margin violations raise.
  CHECK_THROWS_AS(gf.gradient({0, 6}), NumericError);
  CHECK_THROWS_AS(gf.hessian({6, 1}), NumericError);
  CHECK_THROWS_AS(Grid(center, 0.05, 12), ConfigError);
}
