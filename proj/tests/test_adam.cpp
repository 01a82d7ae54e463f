#include <doctest.h>

#include <cmath>
#include <limits>

#include "rafs/adam.hpp"
#include "rafs/errors.hpp"

using namespace rafs;

TEST_CASE("zero gradients leave parameters unchanged") {
  const std::vector<double> p{1.0, -2.0, 3.5};
  const auto [next, state] = optimizer_step(p, std::vector<double>(3, 0.0), OptimizerState::fresh(3));
  CHECK(next == p);
  CHECK(state.step == 1);
}

TEST_CASE("first step moves by the step size against the gradient") {
  AdamHyperparams hp;
  hp.step_size = 0.1;
  const std::vector<double> p{0.0};
  const auto [next, state] = optimizer_step(p, std::vector<double>{1.0}, OptimizerState::fresh(1, hp));
  // m_hat = 1, v_hat = 1, update = 0.1 * 1 / (1 + 1e-8).
  CHECK(next[0] == doctest::Approx(-0.1 / (1.0 + 1e-8)).epsilon(1e-15));
  CHECK(state.first_moment[0] == doctest::Approx(0.1));
  CHECK(state.second_moment[0] == doctest::Approx(0.001));
}

TEST_CASE("second step follows the bias-corrected closed form") {
  AdamHyperparams hp;
  hp.step_size = 0.05;
  OptimizerState s = OptimizerState::fresh(1, hp);
  std::vector<double> p{0.3};
  auto r1 = optimizer_step(p, std::vector<double>{2.0}, s);
  auto r2 = optimizer_step(r1.first, std::vector<double>{-1.0}, r1.second);
  const double m = 0.9 * (0.1 * 2.0) + 0.1 * -1.0;
  const double v = 0.999 * (0.001 * 4.0) + 0.001 * 1.0;
  const double m_hat = m / (1.0 - 0.9 * 0.9);
  const double v_hat = v / (1.0 - 0.999 * 0.999);
  const double expected = r1.first[0] - 0.05 * m_hat / (std::sqrt(v_hat) + 1e-8);
  CHECK(r2.first[0] == doctest::Approx(expected).epsilon(1e-14));
  CHECK(r2.second.step == 2);
}

TEST_CASE("optimizer_step is pure and deterministic") {
  const std::vector<double> p{0.5, 0.25};
  const std::vector<double> g{0.1, -3.0};
  const OptimizerState s0 = OptimizerState::fresh(2);
  const auto a = optimizer_step(p, g, s0);
  const auto b = optimizer_step(p, g, s0);
  CHECK(a.first == b.first);
  CHECK(a.second == b.second);
  CHECK(s0.step == 0);
  const auto a2 = optimizer_step(a.first, g, a.second);
  const auto b2 = optimizer_step(b.first, g, b.second);
  CHECK(a2.first == b2.first);

  std::vector<double> inplace = p;
  OptimizerState s = s0;
  optimizer_step_inplace(inplace, g, s);
  optimizer_step_inplace(inplace, g, s);
  CHECK(inplace == a2.first);
  CHECK(s == a2.second);
}

TEST_CASE("optimizer rejects mismatched shapes and non-finite gradients") {
  const std::vector<double> p{1.0, 2.0};
  CHECK_THROWS_AS(optimizer_step(p, std::vector<double>{1.0}, OptimizerState::fresh(2)), ShapeError);
  CHECK_THROWS_AS(optimizer_step(p, std::vector<double>{1.0, 1.0}, OptimizerState::fresh(3)), ShapeError);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(optimizer_step(p, std::vector<double>{nan, 1.0}, OptimizerState::fresh(2)),
                  NumericError);
}
