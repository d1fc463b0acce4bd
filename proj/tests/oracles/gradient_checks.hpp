#pragma once

#include <vector>

#include "oracles/finite_diff.hpp"
#include "trine/trainer.hpp"

namespace trine::testing {

/// Worst relative error between the analytic step of explicit_step (divided by
/// lr) and the finite-difference gradient of coef * w * log s(u.v).
inline double explicit_gradient_error(std::vector<double> u, std::vector<double> v, double w, double coef, double lr) {
  auto f = [&] { return coef * w * log_sig(dot_of(u, v)); };
  const auto gu = numeric_gradient(u, f);
  const auto gv = numeric_gradient(v, f);
  auto nu = u, nv = v;
  explicit_step(nu, nv, w, coef, lr);
  std::vector<double> au(u.size()), av(v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    au[i] = (nu[i] - u[i]) / lr;
    av[i] = (nv[i] - v[i]) / lr;
  }
  return std::max(relative_error(au, gu), relative_error(av, gv));
}

/// Same check for implicit_update on a one-party store with `n` nodes:
/// objective alpha * [log s(x.c) + sum_z log s(-x.z)].
inline double implicit_gradient_error(std::size_t d, std::size_t n, Rng& rng, int negatives, double alpha, double lr) {
  EmbeddingStore store;
  store.node[0] = Matrix(n, d);
  store.context[0] = Matrix(n, d);
  for (double& x : store.node[0].data()) x = 2.0 * uniform01(rng) - 1.0;
  for (double& x : store.context[0].data()) x = 2.0 * uniform01(rng) - 1.0;
  const auto center = static_cast<std::uint32_t>(uniform_index(rng, n));
  const auto context = static_cast<std::uint32_t>(uniform_index(rng, n));
  std::vector<std::uint32_t> negs;
  for (int k = 0; k < negatives; ++k) negs.push_back(static_cast<std::uint32_t>(uniform_index(rng, n)));

  std::vector<double> x(store.node[0].row(center).begin(), store.node[0].row(center).end());
  std::vector<double> theta(store.context[0].data().begin(), store.context[0].data().end());
  auto row = [&](std::uint32_t z) { return std::span<const double>(theta.data() + z * d, d); };
  auto f = [&] {
    double s = log_sig(dot_of(x, row(context)));
    for (auto z : negs) s += log_sig(-dot_of(x, row(z)));
    return alpha * s;
  };
  const auto gx = numeric_gradient(x, f);
  const auto gt = numeric_gradient(theta, f);

  const auto before = store;
  implicit_update(store, Party::T1, center, context, negs, alpha, lr);
  std::vector<double> ax(d), at(theta.size());
  for (std::size_t i = 0; i < d; ++i) ax[i] = (store.node[0](center, i) - before.node[0](center, i)) / lr;
  for (std::size_t i = 0; i < theta.size(); ++i) at[i] = (store.context[0].data()[i] - before.context[0].data()[i]) / lr;
  return std::max(relative_error(ax, gx), relative_error(at, gt));
}

}  // namespace trine::testing
