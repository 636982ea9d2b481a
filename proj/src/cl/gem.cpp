/*
 * Copyright 2026 The cxrcl Authors. All Rights Reserved.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *    http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cxrcl/cl/gem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "cxrcl/error.hpp"
#include "cxrcl/random.hpp"

namespace cxrcl::cl {
namespace {

using nn::Matrix;
using nn::Vector;

// Largest KKT violation of the dual  min 1/2 l'Ql + c'l,  l >= 0.
double kkt_residual(const Matrix& q, const Vector& c, const Vector& lambda) {
  const Vector grad = q * lambda + c;
  double worst = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (q(i, i) <= 0.0) continue;
    worst = std::max(worst, lambda[i] > 0.0 ? std::abs(grad[i]) : std::max(0.0, -grad[i]));
  }
  return worst;
}

// Most negative inner product of the projected gradient with a reference.
double primal_violation(const Vector& c, const Vector& qlambda) {
  return std::max(0.0, -(qlambda + c).minCoeff());
}

constexpr double kFeasibilitySlack = 1e-12;

}  // namespace

Vector gem_project(const Vector& g, std::span<const Vector> refs, const GemSolverConfig& solver) {
  for (const auto& r : refs) {
    require(r.size() == g.size(), ErrorCode::kShapeMismatch,
            "reference gradient length differs from the gradient");
  }
  if (std::all_of(refs.begin(), refs.end(), [&](const Vector& r) { return r.dot(g) >= 0.0; })) {
    return g;
  }

  const auto m = static_cast<Eigen::Index>(refs.size());
  Matrix rows(m, g.size());
  for (Eigen::Index i = 0; i < m; ++i) rows.row(i) = refs[static_cast<std::size_t>(i)].transpose();
  const Matrix q = rows * rows.transpose();
  const Vector c = rows * g;
  const double scale = std::max(1.0, c.cwiseAbs().maxCoeff());

  Vector lambda = Vector::Zero(m);
  Vector qlambda = Vector::Zero(m);  // kept equal to q * lambda
  bool converged = false;
  for (int iter = 0; iter < solver.max_iterations && !converged; ++iter) {
    for (Eigen::Index i = 0; i < m; ++i) {
      if (q(i, i) <= 0.0) continue;  // zero reference: constraint is vacuous
      const double updated = std::max(0.0, lambda[i] - (qlambda[i] + c[i]) / q(i, i));
      const double delta = updated - lambda[i];
      if (delta != 0.0) {
        qlambda += delta * q.col(i);
        lambda[i] = updated;
      }
    }
    converged = kkt_residual(q, c, lambda) <= solver.tolerance * scale &&
                primal_violation(c, qlambda) <= kFeasibilitySlack * scale;
  }
  if (!converged) {
    fail(ErrorCode::kSolverFailure,
         "GEM dual did not converge in " + std::to_string(solver.max_iterations) + " iterations");
  }

  // Re-solve the equality system on the active set; this removes the
  // coordinate-descent residual when the active set is already right.
  std::vector<Eigen::Index> active;
  for (Eigen::Index i = 0; i < m; ++i) {
    if (lambda[i] > 0.0) active.push_back(i);
  }
  if (!active.empty()) {
    const auto a = static_cast<Eigen::Index>(active.size());
    Matrix q_aa(a, a);
    Vector c_a(a);
    for (Eigen::Index i = 0; i < a; ++i) {
      c_a[i] = c[active[i]];
      for (Eigen::Index j = 0; j < a; ++j) q_aa(i, j) = q(active[i], active[j]);
    }
    const Vector solved = q_aa.completeOrthogonalDecomposition().solve(-c_a);
    Vector polished = Vector::Zero(m);
    for (Eigen::Index i = 0; i < a; ++i) polished[active[i]] = solved[i];
    if ((polished.array() >= 0.0).all() && polished.allFinite() &&
        kkt_residual(q, c, polished) <= kkt_residual(q, c, lambda) &&
        primal_violation(c, q * polished) <= kFeasibilitySlack * scale) {
      lambda = polished;
    }
  }
  return g + rows.transpose() * lambda;
}

std::size_t GemState::size() const noexcept {
  std::size_t n = 0;
  for (const auto& [id, samples] : memory) n += samples.size();
  return n;
}

void gem_store(GemState& state, int experience_id, std::span<const Sample> samples) {
  require(state.capacity >= 1, ErrorCode::kInvalidArgument, "GEM memory capacity must be positive");
  if (state.memory.erase(experience_id) == 0) ++state.experiences_seen;
  const std::size_t quota = state.capacity / state.experiences_seen;

  // Stored lists are kept in shuffled order, so trimming a prefix stays a
  // uniform subsample.
  std::vector<std::size_t> order(samples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(derive_seed(state.seed, static_cast<std::uint64_t>(experience_id)));
  std::shuffle(order.begin(), order.end(), rng);

  if (quota == 0) {
    state.memory.clear();
    if (!samples.empty()) state.memory[experience_id] = {samples[order.front()]};
    return;
  }
  for (auto& [id, stored] : state.memory) {
    if (stored.size() > quota) stored.resize(quota);
  }
  auto& fresh = state.memory[experience_id];
  const std::size_t take = std::min(quota, samples.size());
  fresh.reserve(take);
  for (std::size_t i = 0; i < take; ++i) fresh.push_back(samples[order[i]]);
}

}  // namespace cxrcl::cl
