#include <cmath>
#include <limits>

#include "doctest.h"

#include "alinet/errors.hpp"
#include "alinet/numerics.hpp"

using namespace alinet;

TEST_CASE("xavier bound and determinism") {
  Rng rng(7);
  Matrix m = xavier_init(1, 5, rng);
  for (double v : m.data) CHECK(std::abs(v) <= 1.0);  // sqrt(6/6)

  Rng a(11), b(11);
  Matrix ma = xavier_init(20, 13, a);
  Matrix mb = xavier_init(20, 13, b);
  CHECK(max_abs_diff(ma, mb) == 0.0);

  // no entry may leave the interval, ever
  Rng c(12);
  for (int iter = 0; iter < 50; ++iter) {
    const int r = 1 + static_cast<int>(c.below(30));
    const int cc = 1 + static_cast<int>(c.below(30));
    const double bound = std::sqrt(6.0 / (r + cc));
    Matrix x = xavier_init(r, cc, c);
    for (double v : x.data) CHECK(std::abs(v) <= bound);
  }
}

TEST_CASE("xavier sample variance is close to 2/(rows+cols)") {
  Rng rng(13);
  double acc = 0.0;
  std::size_t count = 0;
  for (int draw = 0; draw < 12; ++draw) {
    Matrix m = xavier_init(100, 100, rng);
    for (double v : m.data) acc += v * v;  // mean is 0 by symmetry
    count += m.size();
  }
  const double variance = acc / static_cast<double>(count);
  CHECK(variance == doctest::Approx(0.01).epsilon(0.2));
}

TEST_CASE("activation point values") {
  Matrix m(1, 3);
  m(0, 0) = 0.0;
  m(0, 1) = -1.0;
  m(0, 2) = -2.0;
  CHECK(apply_activation(m, Act::tanh)(0, 0) == 0.0);
  CHECK(apply_activation(m, Act::relu)(0, 1) == 0.0);
  CHECK(apply_activation(m, Act::leaky_relu, 0.2)(0, 2) == doctest::Approx(-0.4));
}

TEST_CASE("activations match a scalar loop exactly") {
  Rng rng(14);
  Matrix m(9, 6);
  for (double& v : m.data) v = rng.uniform(-3.0, 3.0);
  for (Act kind : {Act::tanh, Act::relu, Act::leaky_relu, Act::sigmoid}) {
    Matrix out = apply_activation(m, kind, 0.2);
    for (int i = 0; i < m.rows; ++i) {
      for (int j = 0; j < m.cols; ++j) {
        double e = m(i, j);
        switch (kind) {
          case Act::tanh: e = std::tanh(e); break;
          case Act::relu: e = e > 0 ? e : 0; break;
          case Act::leaky_relu: e = e > 0 ? e : 0.2 * e; break;
          case Act::sigmoid: e = 1.0 / (1.0 + std::exp(-e)); break;
          case Act::identity: break;
        }
        CHECK(out(i, j) == e);
      }
    }
  }
}

TEST_CASE("l2 row normalization") {
  Matrix m(3, 2);
  m(0, 0) = 3.0;
  m(0, 1) = 4.0;
  m(1, 0) = 1.0;  // already unit
  // row 2 stays zero
  Matrix n = l2_normalize_rows(m);
  CHECK(n(0, 0) == doctest::Approx(0.6));
  CHECK(n(0, 1) == doctest::Approx(0.8));
  CHECK(n(1, 0) == doctest::Approx(1.0));
  CHECK(n(2, 0) == 0.0);
  CHECK(n(2, 1) == 0.0);
  // idempotent
  CHECK(max_abs_diff(l2_normalize_rows(n), n) < 1e-15);
}

TEST_CASE("adam with zero gradients is the identity") {
  Matrix p(3, 3, 1.25);
  Matrix g(3, 3, 0.0);
  AdamState state = AdamState::init({&p}, AdamConfig{});
  Matrix before = p;
  for (int i = 0; i < 5; ++i) adam_step({&p}, {&g}, state);
  CHECK(max_abs_diff(p, before) == 0.0);
}

TEST_CASE("adam first step moves by -lr * sign(g) up to epsilon") {
  Matrix p(1, 2);
  p(0, 0) = 0.5;
  p(0, 1) = -0.25;
  Matrix g(1, 2);
  g(0, 0) = 3.0;
  g(0, 1) = -0.007;
  AdamConfig cfg;
  AdamState state = AdamState::init({&p}, cfg);
  adam_step({&p}, {&g}, state);
  // bias-corrected first step: delta = -lr * g / (|g| + eps)
  CHECK(p(0, 0) == doctest::Approx(0.5 - cfg.learning_rate * 3.0 / (3.0 + cfg.epsilon))
                       .epsilon(1e-12));
  CHECK(p(0, 1) ==
        doctest::Approx(-0.25 + cfg.learning_rate * 0.007 / (0.007 + cfg.epsilon))
            .epsilon(1e-12));
}

TEST_CASE("adam matches a hand-executed scalar recurrence") {
  Matrix p(1, 1);
  p(0, 0) = 1.0;
  AdamConfig cfg;
  AdamState state = AdamState::init({&p}, cfg);

  double theta = 1.0, m = 0.0, v = 0.0;
  const double grads[2] = {0.4, -1.3};
  for (int t = 1; t <= 2; ++t) {
    Matrix g(1, 1);
    g(0, 0) = grads[t - 1];
    adam_step({&p}, {&g}, state);

    m = cfg.beta1 * m + (1 - cfg.beta1) * grads[t - 1];
    v = cfg.beta2 * v + (1 - cfg.beta2) * grads[t - 1] * grads[t - 1];
    const double mhat = m / (1 - std::pow(cfg.beta1, t));
    const double vhat = v / (1 - std::pow(cfg.beta2, t));
    theta -= cfg.learning_rate * mhat / (std::sqrt(vhat) + cfg.epsilon);
    CHECK(p(0, 0) == doctest::Approx(theta).epsilon(1e-12));
  }
}

TEST_CASE("finite differences: a non-finite loss is a numeric error") {
  Matrix theta(1, 1, 0.5);
  Matrix grad(1, 1, 1.0);
  auto bad_loss = [&]() { return std::numeric_limits<double>::quiet_NaN(); };
  CHECK_THROWS_AS(finite_diff_check(bad_loss, theta, grad, 1e-5), NumericError);
}

TEST_CASE("finite differences: quadratic loss is exact, scaled grads fail") {
  Rng rng(15);
  Matrix theta(4, 3);
  for (double& v : theta.data) v = rng.uniform(-1.0, 1.0);
  auto loss = [&]() {
    double s = 0.0;
    for (double v : theta.data) s += 0.5 * v * v;
    return s;
  };
  Matrix grad = theta;  // d(0.5 theta^2) = theta
  // central differences have zero truncation error on quadratics, so a large
  // step keeps roundoff negligible
  CHECK(finite_diff_check(loss, theta, grad, 1e-3) < 1e-9);

  Matrix doubled = theta;
  scale_inplace(doubled, 2.0);
  // |2g - g| / (|2g| + |g|) = 1/3
  CHECK(finite_diff_check(loss, theta, doubled, 1e-3) ==
        doctest::Approx(1.0 / 3.0).epsilon(1e-4));
}
