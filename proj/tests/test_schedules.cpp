#include <doctest.h>

#include <cmath>
#include <initializer_list>

#include "adastorm/schedules.hpp"

using namespace adastorm;

TEST_CASE("ada_lr") {
  CHECK(ada_lr(1e6, 0.3, 0.0) == doctest::Approx(0.01).epsilon(1e-14));
  // sum 50 <= T^(1/3) = 100: first branch.
  CHECK(ada_lr(1e6, 0.3, 50.0) == doctest::Approx(0.01).epsilon(1e-14));
  // 10^(-0.7*6/3) * 10^(-0.3*4) = 10^-2.6.
  CHECK(ada_lr(1e6, 0.3, 1e4) == doctest::Approx(std::pow(10.0, -2.6)).epsilon(1e-12));
  CHECK(ada_lr(1e6, 0.3, 1e4) == doctest::Approx(2.512e-3).epsilon(1e-3));
  CHECK_THROWS(ada_lr(1e6, 0.34, 1.0));
  CHECK_THROWS(ada_lr(0.5, 0.3, 1.0));
}

TEST_CASE("ada_lr: branch boundary and monotonicity") {
  for (double T : {8.0, 1000.0, 12345.0, 1e6}) {
    const double boundary = std::cbrt(T);
    const double first = std::pow(T, -1.0 / 3.0);
    CHECK(ada_lr(T, 0.3, boundary * 0.999) == first);
    CHECK(ada_lr(T, 0.3, boundary * 1.001) < first);
    double prev = ada_lr(T, 0.3, 0.0);
    for (double s = 0.01; s < 1e8; s *= 1.7) {
      const double eta = ada_lr(T, 0.3, s);
      CHECK(eta <= prev);
      CHECK(eta > 0.0);
      prev = eta;
    }
  }
}

TEST_CASE("ada_beta") {
  CHECK(ada_beta(1.0) == 1.0);
  CHECK(ada_beta(8.0) == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(ada_beta(1e6) == doctest::Approx(1e-4).epsilon(1e-12));
}

TEST_CASE("doubling_params") {
  const DoublingParams first = doubling_params(1, 0.3, 0.5);
  CHECK(first.stage_length == 1);
  CHECK(first.beta == 1.0);
  CHECK(first.stage_reset);
  CHECK(doubling_params(7, 0.3, 1.0).stage_length == 4);
  CHECK_FALSE(doubling_params(7, 0.3, 1.0).stage_reset);
  CHECK(doubling_params(8, 0.3, 1.0).stage_length == 8);
  CHECK(doubling_params(8, 0.3, 1.0).stage_reset);

  // t = 8, stage sum 2 = 8^(1/3): both branches equal 2^-1.
  CHECK(doubling_params(8, 0.3, 2.0).eta == doctest::Approx(0.5).epsilon(1e-12));
  // Past the boundary: 8^(-0.7/3) * 4^(-0.3) = 2^-1.3.
  CHECK(doubling_params(8, 0.3, 4.0).eta == doctest::Approx(std::pow(2.0, -1.3)).epsilon(1e-12));

  for (std::uint64_t t = 1; t < 5000; ++t) {
    const auto I = stage_length(t);
    CHECK(I <= t);
    CHECK(t < 2 * I);
    CHECK(doubling_params(t, 0.3, 1.0).stage_reset == ((t & (t - 1)) == 0));
  }
}

TEST_CASE("finite_sum_lr / finite_sum_beta") {
  CHECK(finite_sum_lr(1, 0.3, 1.0) == 1.0);
  CHECK(finite_sum_beta(1) == 1.0);
  CHECK(finite_sum_beta(100) == 0.01);
  CHECK(finite_sum_lr(100, 0.3, 1e4) ==
        doctest::Approx(std::pow(10.0, -0.7) * std::pow(10.0, -1.2)).epsilon(1e-12));
  CHECK(finite_sum_lr(100, 0.3, 1e4) == doctest::Approx(1.2589e-2).epsilon(1e-4));

  const double floored = finite_sum_lr(10, 0.3, 0.0);
  CHECK(floored == finite_sum_lr(10, 0.3, kFiniteSumFloor));
  CHECK(finite_sum_lr(10, 0.3, 1e-40) == floored);
  CHECK(std::isfinite(floored));
  CHECK(finite_sum_lr(10, 0.3, 1e-3) <= floored);
}

TEST_CASE("storm_original_params") {
  const auto empty = storm_original_params(0.7, 2.0, 1.0, 0.0);
  CHECK(empty.eta == doctest::Approx(0.7 / std::cbrt(2.0)));
  const auto p = storm_original_params(1.0, 1.0, 1.0, 7.0);
  CHECK(p.eta == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(p.beta == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(storm_original_params(1.0, 1.0, 1e6, 7.0).beta == 1.0);
  CHECK_THROWS(storm_original_params(0.0, 1.0, 1.0, 0.0));
}

TEST_CASE("initial_batch_size is ceil of the cube root") {
  CHECK(initial_batch_size(1) == 1);
  CHECK(initial_batch_size(8) == 2);
  CHECK(initial_batch_size(9) == 3);
  CHECK(initial_batch_size(1000) == 10);
  CHECK(initial_batch_size(1001) == 11);
  CHECK(initial_batch_size(1000000) == 100);
  CHECK(initial_batch_size(30000) == 32);
}
