#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "aenet/discretization.hpp"
#include "aenet/errors.hpp"
#include "aenet/pde_data.hpp"

using namespace aenet;

namespace {

std::vector<double> random_values(Rng& rng, std::size_t n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  std::vector<double> v(n);
  for (auto& x : v) x = normal(rng);
  return v;
}

Grid1D random_grid(Rng& rng, QuadratureKind kind) {
  std::uniform_real_distribution<double> lo(-2.0, 2.0), len(0.1, 5.0);
  std::uniform_int_distribution<int> half(2, 60);
  const double a = lo(rng);
  const double b = a + len(rng);
  const std::size_t n = static_cast<std::size_t>(2 * half(rng) + 1);
  if (kind == QuadratureKind::simpson) return Grid1D::closed(a, b, n);
  return (n % 4 == 1) ? Grid1D::periodic(a, b, n) : Grid1D::closed(a, b, n);
}

}  // namespace

TEST_CASE("grid nodes follow the topology") {
  auto closed = Grid1D::closed(0.0, 1.0, 5);
  CHECK(closed.node(0) == 0.0);
  CHECK(closed.node(4) == 1.0);
  CHECK(closed.spacing() == doctest::Approx(0.25));

  auto periodic = Grid1D::periodic(0.0, 1.0, 4);
  CHECK(periodic.node(3) == doctest::Approx(0.75));
  CHECK(periodic.spacing() == doctest::Approx(0.25));

  CHECK_THROWS_AS(Grid1D::closed(0.0, 1.0, 1), ConfigError);
  CHECK_THROWS_AS(Grid1D::closed(1.0, 1.0, 4), ConfigError);
}

TEST_CASE("discretize samples at nodes") {
  auto zero = discretize([](double) { return 0.0; }, Grid1D::periodic(0, 1, 16));
  for (double v : zero.values()) CHECK(v == 0.0);

  auto line = discretize([](double x) { return x; }, Grid1D::closed(0, 1, 3));
  CHECK(line[0] == 0.0);
  CHECK(line[1] == 0.5);
  CHECK(line[2] == 1.0);

  SUBCASE("two-hat peak lands near node 64 of a 512 grid") {
    const Grid1D grid = Grid1D::closed(0, 1, 512);
    auto g = discretize(transport_ic({Family::transport, 1.0, 0.0}), grid);
    // Hand evaluation of the first hat: 1 - 40 |x - 0.125| near its peak.
    for (std::size_t i = 63; i <= 65; ++i) {
      const double x = grid.node(i);
      CHECK(g[i] == doctest::Approx(1.0 - 40.0 * std::abs(x - 0.125)).epsilon(1e-12));
      CHECK(g[i] > 0.9);
    }
  }

  SUBCASE("non-finite value names the node") {
    try {
      discretize([](double x) { return x > 0.65 ? std::nan("") : x; },
                 Grid1D::closed(0, 1, 11));
      FAIL("expected EvaluationError");
    } catch (const EvaluationError& e) {
      CHECK(std::string(e.what()).find("node 7") != std::string::npos);
    }
  }
}

TEST_CASE("discretization is linear") {
  Rng rng(11);
  std::uniform_real_distribution<double> coef(-3, 3);
  const Grid1D grid = Grid1D::closed(-1, 2, 37);
  for (int trial = 0; trial < 20; ++trial) {
    const double alpha = coef(rng), beta = coef(rng), f0 = coef(rng), g0 = coef(rng);
    ScalarFunction f = [f0](double x) { return std::sin(f0 * x); };
    ScalarFunction g = [g0](double x) { return x * x * g0; };
    auto combo = discretize([&](double x) { return alpha * f(x) + beta * g(x); }, grid);
    auto df = discretize(f, grid);
    auto dg = discretize(g, grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      CHECK(combo[i] == doctest::Approx(alpha * df[i] + beta * dg[i]).epsilon(1e-14));
    }
  }
}

TEST_CASE("quadrature weights") {
  auto mid = make_quadrature(Grid1D::periodic(0, 1, 512), QuadratureKind::midpoint);
  for (double w : mid.weights()) CHECK(w == 1.0 / 512.0);
  CHECK(mid.is_uniform());

  auto trap = make_quadrature(Grid1D::closed(0, 1, 3), QuadratureKind::trapezoid);
  CHECK(trap.weight(0) == doctest::Approx(0.25));
  CHECK(trap.weight(1) == doctest::Approx(0.5));
  CHECK(trap.weight(2) == doctest::Approx(0.25));

  auto simp = make_quadrature(Grid1D::closed(0, 1, 5), QuadratureKind::simpson);
  const double expect[] = {1, 4, 2, 4, 1};
  for (std::size_t i = 0; i < 5; ++i) CHECK(simp.weight(i) == doctest::Approx(expect[i] / 12));

  CHECK_THROWS_AS(make_quadrature(Grid1D::closed(0, 1, 4), QuadratureKind::simpson),
                  ConfigError);
  CHECK_THROWS_AS(make_quadrature(Grid1D::periodic(0, 1, 5), QuadratureKind::simpson),
                  ConfigError);
}

TEST_CASE("weights sum to the domain length") {
  Rng rng(3);
  for (auto kind : {QuadratureKind::midpoint, QuadratureKind::trapezoid,
                    QuadratureKind::simpson}) {
    for (int t = 0; t < 50; ++t) {
      const Grid1D grid = random_grid(rng, kind);
      auto rule = make_quadrature(grid, kind);
      double total = 0;
      for (double w : rule.weights()) {
        CHECK(w > 0);
        total += w;
      }
      CHECK(total == doctest::Approx(grid.length()).epsilon(1e-12));
    }
  }
}

TEST_CASE("weighted inner product examples") {
  const Grid1D periodic = Grid1D::periodic(0, 1, 64);
  auto mid = make_quadrature(periodic, QuadratureKind::midpoint);
  auto one = discretize([](double) { return 1.0; }, periodic);
  CHECK(weighted_inner(one, one, mid) == doctest::Approx(1.0).epsilon(1e-15));

  const Grid1D closed = Grid1D::closed(0, 1, 513);
  auto simp = make_quadrature(closed, QuadratureKind::simpson);
  auto x = discretize([](double t) { return t; }, closed);
  auto c1 = discretize([](double) { return 1.0; }, closed);
  CHECK(std::abs(weighted_inner(x, c1, simp) - 0.5) < 1e-12);
  CHECK(std::abs(weighted_inner(x, x, simp) - 1.0 / 3.0) < 1e-12);

  auto other = discretize([](double) { return 1.0; }, Grid1D::closed(0, 1, 9));
  CHECK_THROWS_AS(weighted_inner(x, other, simp), DimensionError);
}

TEST_CASE("weighted norm examples") {
  const Grid1D grid = Grid1D::periodic(0, 1, 100);
  auto rule = make_quadrature(grid, QuadratureKind::midpoint);
  CHECK(weighted_norm(discretize([](double) { return 0.0; }, grid), rule) == 0.0);
  CHECK(weighted_norm(discretize([](double) { return 2.0; }, grid), rule) ==
        doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("simpson integrates cubics exactly") {
  Rng rng(5);
  std::uniform_real_distribution<double> c(-5, 5);
  for (int t = 0; t < 200; ++t) {
    const Grid1D grid = random_grid(rng, QuadratureKind::simpson);
    auto rule = make_quadrature(grid, QuadratureKind::simpson);
    const double c0 = c(rng), c1 = c(rng), c2 = c(rng), c3 = c(rng);
    auto p = discretize([&](double x) { return c0 + x * (c1 + x * (c2 + x * c3)); }, grid);
    auto one = discretize([](double) { return 1.0; }, grid);
    auto antideriv = [&](double x) {
      return x * (c0 + x * (c1 / 2 + x * (c2 / 3 + x * c3 / 4)));
    };
    const double exact = antideriv(grid.x_hi()) - antideriv(grid.x_lo());
    const double scale = std::max(1.0, std::abs(exact));
    CHECK(std::abs(weighted_inner(p, one, rule) - exact) <= 1e-12 * scale);
  }
}

TEST_CASE("weighted norm satisfies the norm axioms and Cauchy-Schwarz") {
  Rng rng(7);
  std::uniform_real_distribution<double> lam(-10, 10);
  const QuadratureKind kinds[] = {QuadratureKind::midpoint, QuadratureKind::trapezoid,
                                  QuadratureKind::simpson};
  for (int t = 0; t < 1000; ++t) {
    const auto kind = kinds[t % 3];
    const Grid1D grid = random_grid(rng, kind);
    auto rule = make_quadrature(grid, kind);
    DiscreteFunction u(grid, random_values(rng, grid.size()));
    DiscreteFunction v(grid, random_values(rng, grid.size(), 3.0));
    const double nu = weighted_norm(u, rule);
    const double nv = weighted_norm(v, rule);
    CHECK(nu >= 0.0);

    std::vector<double> sum(grid.size()), scaled(grid.size());
    const double l = lam(rng);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      sum[i] = u[i] + v[i];
      scaled[i] = l * u[i];
    }
    const double tol = 1e-12 * (nu + nv + 1.0);
    CHECK(weighted_norm(DiscreteFunction(grid, sum), rule) <= nu + nv + tol);
    CHECK(std::abs(weighted_norm(DiscreteFunction(grid, scaled), rule) -
                   std::abs(l) * nu) <= 1e-12 * std::abs(l) * nu + 1e-300);
    CHECK(std::abs(weighted_inner(u, v, rule)) <= nu * nv * (1 + 1e-12));
    CHECK(weighted_inner(u, v, rule) == doctest::Approx(weighted_inner(v, u, rule)));
  }
  // Definiteness.
  const Grid1D grid = Grid1D::closed(0, 1, 9);
  auto rule = make_quadrature(grid, QuadratureKind::trapezoid);
  std::vector<double> spike(9, 0.0);
  spike[4] = 1e-150;
  CHECK(weighted_norm(DiscreteFunction(grid, spike), rule) > 0.0);
}

TEST_CASE("interpolation") {
  SUBCASE("identity on the same grid") {
    const Grid1D g = Grid1D::closed(0, 1, 33);
    Rng rng(1);
    DiscreteFunction u(g, random_values(rng, 33));
    for (auto m : {InterpMethod::piecewise_constant, InterpMethod::linear, InterpMethod::cubic}) {
      auto w = interpolate(u, g, m);
      for (std::size_t i = 0; i < 33; ++i) CHECK(w[i] == u[i]);
    }
  }
  SUBCASE("linear reproduces linears") {
    auto u = discretize([](double x) { return x; }, Grid1D::closed(0, 1, 9));
    auto w = interpolate(u, Grid1D::closed(0, 1, 17), InterpMethod::linear);
    for (std::size_t i = 0; i < 17; ++i) {
      CHECK(w[i] == doctest::Approx(w.grid().node(i)).epsilon(1e-15));
    }
  }
  SUBCASE("not-a-knot cubic reproduces cubics") {
    auto f = [](double x) { return 1 - 2 * x + 3 * x * x - 4 * x * x * x; };
    auto u = discretize(f, Grid1D::closed(-1, 2, 11));
    const Grid1D fine = Grid1D::closed(-1, 2, 97);
    auto w = interpolate(u, fine, InterpMethod::cubic);
    for (std::size_t i = 0; i < fine.size(); ++i) {
      CHECK(w[i] == doctest::Approx(f(fine.node(i))).epsilon(1e-11));
    }
  }
  SUBCASE("cubic on a smooth sine, closed and periodic") {
    auto f = [](double x) { return std::sin(2 * std::numbers::pi * x); };
    for (auto topo : {Topology::closed, Topology::periodic}) {
      auto u = discretize(f, Grid1D(0, 1, 64, topo));
      const Grid1D fine(0, 1, 512, topo);
      auto w = interpolate(u, fine, InterpMethod::cubic);
      double err = 0;
      for (std::size_t i = 0; i < 512; ++i) err = std::max(err, std::abs(w[i] - f(fine.node(i))));
      CHECK(err < 1e-4);
    }
  }
  SUBCASE("round trip through a finer grid keeps shared nodes") {
    Rng rng(2);
    const Grid1D coarse = Grid1D::closed(0, 1, 9);
    DiscreteFunction u(coarse, random_values(rng, 9));
    for (auto m : {InterpMethod::piecewise_constant, InterpMethod::linear, InterpMethod::cubic}) {
      auto back = interpolate(interpolate(u, Grid1D::closed(0, 1, 17), m), coarse, m);
      for (std::size_t i = 0; i < 9; ++i) CHECK(back[i] == doctest::Approx(u[i]).epsilon(1e-12));
    }
    const Grid1D pc = Grid1D::periodic(0, 1, 8);
    DiscreteFunction p(pc, random_values(rng, 8));
    auto pback = interpolate(interpolate(p, Grid1D::periodic(0, 1, 32), InterpMethod::cubic),
                             pc, InterpMethod::cubic);
    for (std::size_t i = 0; i < 8; ++i) CHECK(pback[i] == doctest::Approx(p[i]).epsilon(1e-12));
  }
  SUBCASE("closed sources clamp within one spacing and reject beyond") {
    auto u = discretize([](double x) { return x; }, Grid1D::closed(0, 1, 11));
    auto w = interpolate(u, Grid1D::closed(-0.05, 1.05, 12), InterpMethod::linear);
    CHECK(w[0] == 0.0);
    CHECK(w[11] == 1.0);
    CHECK_THROWS_AS(interpolate(u, Grid1D::closed(-0.5, 1.0, 12), InterpMethod::cubic),
                    RangeError);
  }
  SUBCASE("periodic sources wrap") {
    auto f = [](double x) { return std::cos(2 * std::numbers::pi * x); };
    auto u = discretize(f, Grid1D::periodic(0, 1, 128));
    const Grid1D shifted = Grid1D::periodic(0.3, 1.3, 50);
    auto w = interpolate(u, shifted, InterpMethod::cubic);
    for (std::size_t i = 0; i < 50; ++i) CHECK(w[i] == doctest::Approx(f(shifted.node(i))).epsilon(1e-6));
  }
}

TEST_CASE("norm equivalence on the Fourier family") {
  SUBCASE("zero violations at the guaranteed spacing") {
    const int max_mode = 4;
    const double dx = fourier_family_max_spacing(max_mode, 1.0, 1.0);
    CHECK(dx == doctest::Approx(3.0 / (2 * std::numbers::pi * 20)));
    const auto n = static_cast<std::size_t>(std::ceil(1.0 / dx));
    const Grid1D grid = Grid1D::periodic(0, 1, n);
    REQUIRE(grid.spacing() <= dx);
    auto rule = make_quadrature(grid, QuadratureKind::midpoint);
    auto report = verify_norm_equivalence(fourier_family_sampler(max_mode, 1.0, 1.0), grid,
                                          rule, 1000, 42);
    CHECK(report.trials == 1000);
    CHECK(report.violations == 0);
    CHECK(report.min_ratio >= 0.5);
    CHECK(report.max_ratio <= 2.0);
  }
  SUBCASE("single mode has ratio one") {
    const Grid1D grid = Grid1D::periodic(0, 1, 512);
    auto rule = make_quadrature(grid, QuadratureKind::midpoint);
    FunctionSampler mode = [](Rng&) {
      return SampledFunction{
          [](double x) { return std::polar(1.0, 2 * std::numbers::pi * x); }, 1.0};
    };
    auto report = verify_norm_equivalence(mode, grid, rule, 3, 0);
    CHECK(std::abs(report.worst_ratio - 1.0) < 1e-10);
  }
  SUBCASE("constant has ratio exactly one") {
    const Grid1D grid = Grid1D::periodic(0, 1, 64);
    auto rule = make_quadrature(grid, QuadratureKind::midpoint);
    FunctionSampler constant = [](Rng&) {
      return SampledFunction{[](double) { return std::complex<double>(1.0, 0.0); }, 1.0};
    };
    CHECK(verify_norm_equivalence(constant, grid, rule, 5, 0).worst_ratio == 1.0);
  }
  SUBCASE("a coarse grid aliases and is flagged") {
    const Grid1D grid = Grid1D::periodic(0, 1, 4);
    auto rule = make_quadrature(grid, QuadratureKind::midpoint);
    FunctionSampler alias = [](Rng&) {
      return SampledFunction{[](double x) {
        return std::complex<double>(std::cos(8 * std::numbers::pi * x) +
                                    std::cos(0.0 * x) * 1.0, 0.0);
      }, std::sqrt(1.5)};
    };
    auto report = verify_norm_equivalence(alias, grid, rule, 2, 0);
    CHECK(report.worst_ratio == doctest::Approx(2.0 / std::sqrt(1.5)));
  }
}

TEST_CASE("box-counting dimension") {
  Rng rng(9);
  std::uniform_real_distribution<double> unit(0, 1);
  const auto scales = geometric_scales(0.2, 0.02, 6);

  SUBCASE("segment in R^3") {
    Eigen::MatrixXd pts(10000, 3);
    for (int i = 0; i < 10000; ++i) {
      const double t = unit(rng);
      pts.row(i) << 0.1 + 0.6 * t, 0.2 + 0.3 * t, 0.5 - 0.4 * t;
    }
    const double d = box_counting_dimension(pts, scales);
    CHECK(d >= 0.8);
    CHECK(d <= 1.2);
    const double c = box_counting_dimension(pts, scales, BoxCount::cover);
    CHECK(c >= 0.8);
    CHECK(c <= 1.2);
  }
  SUBCASE("unit square in R^3") {
    Eigen::MatrixXd pts(10000, 3);
    for (int i = 0; i < 10000; ++i) pts.row(i) << unit(rng), unit(rng), 0.25;
    const double d = box_counting_dimension(pts, scales);
    CHECK(d >= 1.7);
    CHECK(d <= 2.2);
    const double c = box_counting_dimension(pts, scales, BoxCount::cover);
    CHECK(c >= 1.7);
    CHECK(c <= 2.2);
  }
  SUBCASE("repeated point") {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Constant(50, 4, 0.3);
    CHECK(box_counting_dimension(pts, scales) == doctest::Approx(0.0));
    CHECK(box_counting_dimension(pts, scales, BoxCount::cover) == doctest::Approx(0.0));
  }
  SUBCASE("degenerate scales") {
    Eigen::MatrixXd pts = Eigen::MatrixXd::Zero(3, 2);
    const std::vector<double> same{0.1, 0.1, 0.1};
    CHECK_THROWS_AS(box_counting_dimension(pts, same), ConfigError);
  }
}

TEST_CASE("function files round-trip exactly") {
  Rng rng(4);
  for (auto topo : {Topology::closed, Topology::periodic}) {
    const Grid1D grid(-0.3, 1.7, 41, topo);
    DiscreteFunction u(grid, random_values(rng, 41, 1e3));
    std::stringstream csv, bin;
    write_csv(csv, u);
    write_binary(bin, u);
    auto a = read_csv_function(csv);
    auto b = read_binary_function(bin);
    CHECK(a.grid() == grid);
    CHECK(b.grid() == grid);
    for (std::size_t i = 0; i < 41; ++i) {
      CHECK(a[i] == u[i]);
      CHECK(b[i] == u[i]);
    }
  }
}
