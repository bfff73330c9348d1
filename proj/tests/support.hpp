#pragma once

#include <array>
#include <numeric>
#include <random>
#include <string>

#include "muntz/galerkin.hpp"

namespace muntz::testing {

/// Small random system: one grid q <= 6, n <= 3 equations with non-integer orders on that
/// grid, couplings and forcings that are Muntz polynomials of degree <= 2, and N <= 8.
struct RandomProblem {
  ProblemSpec spec;
  long degree;
};

inline ScalarFn random_scalar(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> num(-6, 6), den(1, 4);
  const Rational re(num(rng), den(rng)), im(num(rng), den(rng));
  return [re, im](Precision p) { return Complex(Real(re, p), Real(im, p)); };
}

inline CoefficientFunction random_poly(std::mt19937_64& rng, long q) {
  std::vector<std::pair<Rational, ScalarFn>> terms;
  std::bernoulli_distribution keep(0.7);
  for (long mu = 0; mu <= 2; ++mu) {
    if (keep(rng)) terms.emplace_back(Rational(mu, q), random_scalar(rng));
  }
  return CoefficientFunction::polynomial(std::move(terms), "random");
}

inline RandomProblem random_problem(std::mt19937_64& rng) {
  std::uniform_int_distribution<long> pick_q(2, 6), pick_n(1, 3), pick_deg(4, 8);
  for (;;) {
    const long q = pick_q(rng);
    const long n_eq = pick_n(rng);
    const long degree = pick_deg(rng);
    ProblemSpec spec;
    spec.name = "random";
    std::uniform_int_distribution<long> pick_num(1, 2 * q);
    long max_shift = 0;
    while (static_cast<long>(spec.orders.size()) < n_eq) {
      const Rational theta(pick_num(rng), q);
      if (theta.is_integer()) continue;
      spec.orders.emplace_back(theta);
      max_shift = std::max(max_shift, theta.num() * (q / theta.den()));
    }
    if (max_shift > degree) continue;
    spec.couplings.resize(static_cast<std::size_t>(n_eq));
    for (long j = 0; j < n_eq; ++j) {
      for (long r = 0; r < n_eq; ++r) spec.couplings[static_cast<std::size_t>(j)].push_back(random_poly(rng, q));
      spec.forcings.push_back(random_poly(rng, q));
      std::vector<ScalarFn> init;
      for (long k = 0; k < spec.orders[static_cast<std::size_t>(j)].ceil(); ++k) init.push_back(random_scalar(rng));
      spec.initial.push_back(std::move(init));
    }
    std::uniform_int_distribution<long> pick_t(0, 2);
    const Rational horizon = std::array<Rational, 3>{Rational(1, 2), Rational(1), Rational(2)}[static_cast<std::size_t>(pick_t(rng))];
    spec.horizon = [horizon](Precision p) { return Real(horizon, p); };
    spec.horizon_text = horizon.str();
    // pin the grid to q even if no coefficient mentions it
    if (spec.grid_q() != q) continue;
    return {std::move(spec), degree};
  }
}

}  // namespace muntz::testing
