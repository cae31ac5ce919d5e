#include <catch2/catch_amalgamated.hpp>

#include "test_support.hpp"

using namespace gtwc;

namespace {

// The scalar objective the program must reproduce: with x_i = q_{1,i}^2
// and tail_i = x_{i+2} + ... + x_N,
//   sum_{i=1}^{N-2} s1*x_i*(f_{2,i+1}^2 s1 + s2*(1+tail_i))
//                   / ((f_{2,i+1}^2 s1 + s2)*(1+tail_i))
//   + s1*(x_{N-1} + x_N)
double scalar_objective(const Vector& x, const Vector& f2sub, const ChannelParams& p) {
  const int n = p.n;
  const double s1 = p.sigma1_sq, s2 = p.sigma2_sq;
  double total = s1 * (x(n - 2) + x(n - 1));
  for (int i = 1; i <= n - 2; ++i) {
    double tail = 0.0;
    for (int j = i + 2; j <= n; ++j) tail += x(j - 1);
    const double f = f2sub(i - 1);  // f_{2,i+1}
    total += s1 * x(i - 1) * (f * f * s1 + s2 * (1.0 + tail)) / ((f * f * s1 + s2) * (1.0 + tail));
  }
  return total;
}

Vector random_feasible(RandomStream& rs, int n, double budget) {
  Vector w(n);
  for (int i = 0; i < n; ++i) w(i) = -std::log(std::max(rs.uniform01(), 1e-12));
  return budget * w / w.sum();
}

}  // namespace

TEST_CASE("zero-feedback program: flat objective at sigma1^2 * eta1") {
  const ChannelParams p{5, 1.0, 0.5};
  const Targets t{10.0, 10.0, 0.8};
  const FractionalProgram fp = build_fractional_program(Matrix::Zero(5, 5), p, t);
  for (std::size_t i = 0; i + 1 < fp.u.size(); ++i) REQUIRE(fp.u[i].cwiseAbs().maxCoeff() == 0.0);
  RandomStream rs(3);
  for (int k = 0; k < 10; ++k) {
    const Vector x = random_feasible(rs, 5, t.eta1);
    REQUIRE(fp_objective(fp, x) == Catch::Approx(p.sigma1_sq * t.eta1).margin(1e-10));
  }
}

TEST_CASE("three-use program coefficients by hand") {
  const ChannelParams p{3, 1.0, 0.5};
  const Targets t{10.0, 10.0, 0.8};
  Vector sub = Vector::Zero(2);
  sub(0) = 1.0;
  const FractionalProgram fp = build_fractional_program(f2_from_subdiag(sub), p, t);
  REQUIRE(fp.u.size() == 2);
  REQUIRE(fp.u[0](0) == Catch::Approx(2.0 / 3.0).margin(1e-15));
  REQUIRE(fp.u[0](1) == 0.0);
  REQUIRE(fp.u[0](2) == 0.0);
  REQUIRE(fp.u[1](0) == Catch::Approx(1.0 / 3.0).margin(1e-15));
  REQUIRE(fp.u[1](1) == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(fp.u[1](2) == Catch::Approx(1.0).margin(1e-15));
  REQUIRE(fp.m[1].cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("vector form reproduces the scalar objective; denominator indexing is i+2..N") {
  const ChannelParams p{6, 1.0, 0.5};
  const Targets t{10.0, 10.0, 0.8};
  RandomStream rs(11);
  const Vector sub = testsup::random_subdiag(rs, 6);
  const FractionalProgram fp = build_fractional_program(f2_from_subdiag(sub), p, t);

  for (int k = 0; k < 100; ++k) {
    const Vector x = random_feasible(rs, 6, t.eta1);
    const double want = scalar_objective(x, sub, p);
    REQUIRE(std::abs(fp_objective(fp, x) - want) <= 1e-10 * std::max(1.0, std::abs(want)));
  }

  // off-by-one indicator sets do not reproduce it
  for (int shift : {0, 1}) {  // ones starting at position i resp. i+1
    FractionalProgram wrong = fp;
    for (int i = 1; i <= p.n - 2; ++i) {
      Vector m = Vector::Zero(p.n);
      for (int pos = i + shift; pos <= p.n; ++pos) m(pos - 1) = 1.0;
      wrong.m[i - 1] = m;
    }
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
      const Vector x = random_feasible(rs, 6, t.eta1);
      worst = std::max(worst, std::abs(fp_objective(wrong, x) - scalar_objective(x, sub, p)));
    }
    REQUIRE(worst > 1e-3);
  }
}

TEST_CASE("program objective equals the block energy at the closed-form F1") {
  const ChannelParams p{5, 1.0, 0.5};
  const Targets t{10.0, 10.0, 0.8};
  RandomStream rs(13);
  for (int k = 0; k < 20; ++k) {
    const Vector sub = testsup::random_subdiag(rs, 5);
    const Matrix f2 = f2_from_subdiag(sub);
    const FractionalProgram fp = build_fractional_program(f2, p, t);
    const Vector x = random_feasible(rs, 5, t.eta1);
    const Vector q1 = q1_from_x(x, t.eta1);
    const Matrix f1 = solve_f1(q1, f2, p);
    const double p1 = reduced_powers(q1, f1, f2, p, t).p1;
    REQUIRE(fp_objective(fp, x) == Catch::Approx(p1).epsilon(1e-8));
  }
}

TEST_CASE("build rejects a live relay weight on the last use") {
  const ChannelParams p{4, 1.0, 0.5};
  const Targets t{10.0, 10.0, 0.8};
  RandomStream rs(17);
  Vector sub = testsup::random_subdiag(rs, 4, 0.7, true);
  sub(2) = 0.5;  // f_{2,N} != 0
  REQUIRE_THROWS_AS(build_fractional_program(f2_from_subdiag(sub), p, t), std::invalid_argument);
}

TEST_CASE("simplex projection") {
  Vector v(3);
  v << 1.0, 0.2, -0.4;
  const Vector x = project_simplex(v, 1.0);
  REQUIRE(x.sum() == Catch::Approx(1.0).margin(1e-12));
  REQUIRE((x.array() >= 0.0).all());
  // already-feasible points are fixed points
  const Vector y = project_simplex(x, 1.0);
  REQUIRE((x - y).cwiseAbs().maxCoeff() < 1e-12);
  // mass below the water line is cut exactly to zero
  Vector big(3);
  big << 10.0, 0.0, 0.1;
  const Vector z = project_simplex(big, 1.0);
  REQUIRE(z(1) == 0.0);
  REQUIRE(z(2) == 0.0);
  REQUIRE(z(0) == Catch::Approx(1.0).margin(1e-12));
}

TEST_CASE("all-mass-on-last-use certificate bounds the solver") {
  const ChannelParams p{5, 1.0, 0.5};
  const Targets t{10.0, 10.0, 0.8};
  RandomStream rs(19);
  for (int k = 0; k < 10; ++k) {
    const Vector sub = testsup::random_subdiag(rs, 5, 1.0);
    const FractionalProgram fp = build_fractional_program(f2_from_subdiag(sub), p, t);
    Vector cert = Vector::Zero(5);
    cert(4) = t.eta1;
    REQUIRE(fp_objective(fp, cert) == Catch::Approx(p.sigma1_sq * t.eta1).margin(1e-10));
    const FractionalSolution sol = solve_fractional(fp, {}, 100 + k);
    REQUIRE(sol.objective <= p.sigma1_sq * t.eta1 + 1e-9);
    REQUIRE(sol.x.sum() == Catch::Approx(t.eta1).margin(1e-9));
    REQUIRE((sol.x.array() >= 0.0).all());
    REQUIRE(sol.stationarity <= 1e-6);
    REQUIRE(sol.converged);
  }
}

TEST_CASE("solver matches an exhaustive three-use grid") {
  const ChannelParams p{3, 1.0, 0.5};
  const Targets t{10.0, 10.0, 0.8};
  RandomStream rs(23);
  for (int k = 0; k < 8; ++k) {
    Vector sub = Vector::Zero(2);
    sub(0) = rs.uniform01() * 1.5;
    const FractionalProgram fp = build_fractional_program(f2_from_subdiag(sub), p, t);
    const FractionalSolution sol = solve_fractional(fp, {}, 200 + k);
    const double grid = testsup::grid_min_n3(fp, 200);
    REQUIRE(std::abs(sol.objective - grid) <= 1e-3 * std::abs(grid));
  }
}

TEST_CASE("iteration cap returns the best iterate unconverged") {
  const ChannelParams p{5, 1.0, 0.5};
  const Targets t{10.0, 10.0, 0.8};
  RandomStream rs(31);
  const FractionalProgram fp = build_fractional_program(f2_from_subdiag(testsup::random_subdiag(rs, 5, 1.2)), p, t);
  FractionalSolverConfig starved;
  starved.max_iters = 1;
  starved.random_starts = 1;
  const FractionalSolution sol = solve_fractional(fp, starved, 9);
  REQUIRE(!sol.converged);
  REQUIRE(sol.x.sum() == Catch::Approx(t.eta1).margin(1e-9));
  REQUIRE(std::isfinite(sol.objective));
}

TEST_CASE("support restriction pins the complement to zero") {
  const ChannelParams p{6, 1.0, 0.5};
  const Targets t{10.0, 10.0, 0.8};
  RandomStream rs(29);
  const Vector sub = testsup::random_subdiag(rs, 6, 1.0);
  const FractionalProgram fp = build_fractional_program(f2_from_subdiag(sub), p, t);
  const std::vector<int> support{0, 2, 4, 5};
  const FractionalSolution sol = solve_fractional(fp, {}, 7, &support);
  REQUIRE(sol.x(1) == 0.0);
  REQUIRE(sol.x(3) == 0.0);
  REQUIRE(sol.x.sum() == Catch::Approx(t.eta1).margin(1e-9));
  const FractionalSolution full = solve_fractional(fp, {}, 7);
  REQUIRE(full.objective <= sol.objective + 1e-9);
}
