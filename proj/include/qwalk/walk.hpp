#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/parallel.hpp"
#include "qwalk/transition.hpp"

namespace qwalk {

// Real walker amplitudes over the nodes. Every operator in the walk is real,
// so the evolution never leaves the reals.
class AmplitudeVector {
 public:
  AmplitudeVector() = default;
  explicit AmplitudeVector(std::size_t n) : values_(n, 0.0) {}
  explicit AmplitudeVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  std::span<const double> span() const { return values_; }
  std::span<double> span() { return values_; }
  const std::vector<double>& values() const { return values_; }

  double squared_norm() const {
    double s = 0.0;
    for (double v : values_) s += v * v;
    return s;
  }

  bool operator==(const AmplitudeVector&) const = default;

 private:
  std::vector<double> values_;
};

enum class ScoringMode { naive, batched };

struct WalkConfig {
  int steps = 2;
  bool oracle_enabled = true;
  WeightScheme scheme = WeightScheme::uniform;
  ScoringMode scoring_mode = ScoringMode::batched;
  // Divide the score by ||psi_k||^2. Off by default: scores are rank-only.
  bool normalize = false;

  void validate() const {
    if (steps < 1) throw Error("walk steps must be >= 1, got " + std::to_string(steps));
  }
};

inline AmplitudeVector init_state(std::size_t n, NodeId j) {
  if (j >= n) throw Error("start node " + std::to_string(j) + " out of range for " + std::to_string(n) + " nodes");
  AmplitudeVector psi(n);
  psi[j] = 1.0;
  return psi;
}

// (2P - I) psi
inline AmplitudeVector apply_transition(const TransitionOperator& op, const AmplitudeVector& psi) {
  if (psi.size() != op.size()) {
    throw Error("amplitude vector has " + std::to_string(psi.size()) + " entries, operator expects " +
                std::to_string(op.size()));
  }
  AmplitudeVector out(psi.size());
  op.reflect(psi.span(), out.span());
  return out;
}

// (I - 2|t><t|) psi
inline AmplitudeVector apply_oracle(AmplitudeVector psi, NodeId t) {
  if (t >= psi.size()) throw Error("oracle target " + std::to_string(t) + " out of range");
  psi[t] = -psi[t];
  return psi;
}

namespace detail {

inline void require_finite(std::span<const double> v, int step) {
  for (double x : v) {
    if (!std::isfinite(x)) throw NumericalError("non-finite amplitude after step " + std::to_string(step));
  }
}

}  // namespace detail

// k applications of U_O U_T to an arbitrary initial state; the oracle acts after
// every transition, including the last. No renormalization between steps.
inline AmplitudeVector evolve(const TransitionOperator& op, AmplitudeVector psi, NodeId t, const WalkConfig& cfg) {
  cfg.validate();
  if (psi.size() != op.size()) throw Error("initial state dimension does not match operator");
  if (t >= op.size()) throw Error("target " + std::to_string(t) + " out of range");
  AmplitudeVector next(psi.size());
  for (int step = 1; step <= cfg.steps; ++step) {
    op.reflect(psi.span(), next.span());
    if (cfg.oracle_enabled) next[t] = -next[t];
    detail::require_finite(next.span(), step);
    std::swap(psi, next);
  }
  return psi;
}

inline AmplitudeVector evolve(const TransitionOperator& op, NodeId j, NodeId t, const WalkConfig& cfg) {
  return evolve(op, init_state(op.size(), j), t, cfg);
}

inline double score_from_state(const AmplitudeVector& psi, NodeId t, bool normalize) {
  const double amp = psi[t];
  const double p = amp * amp;
  if (!normalize) return p;
  const double norm = psi.squared_norm();
  return norm > 0.0 ? p / norm : 0.0;
}

// |<t| (U_O U_T)^k |j>|^2
inline double score_pair(const TransitionOperator& op, NodeId j, NodeId t, const WalkConfig& cfg) {
  return score_from_state(evolve(op, j, t, cfg), t, cfg.normalize);
}

// Scores many pairs without running one full walk per pair.
//
// Let U = 2P - I, phi_m = U^m e_j and rho_s = U^s e_t. Expanding the oracle
// step v_m = U v_{m-1} - 2 (U v_{m-1})[t] e_t gives
//   c_r      = phi_r[t] - 2 sum_{s=1}^{r-1} c_s rho_{r-s}[t]
//   psi_k[t] = phi_k[t] - 2 sum_{r=1}^{k} c_r rho_{k-r}[t]
// so each pair needs phi_1..k at t (one walk per distinct source) and the
// diagonal returns rho_0..k-1 at t (one walk per distinct target).
inline std::vector<double> score_batch(const TransitionOperator& op, std::span<const NodePair> pairs,
                                       const WalkConfig& cfg, unsigned threads = 1) {
  cfg.validate();
  const std::size_t n = op.size();
  for (const auto& p : pairs) {
    if (p.u >= n || p.v >= n) throw Error("pair references a node outside the operator");
  }
  std::vector<double> scores(pairs.size());
  if (pairs.empty()) return scores;

  if (cfg.scoring_mode == ScoringMode::naive || cfg.normalize) {
    parallel_for(pairs.size(), threads, [&](std::size_t i) { scores[i] = score_pair(op, pairs[i].u, pairs[i].v, cfg); });
    return scores;
  }

  const int k = cfg.steps;

  // Pair indices grouped by source.
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a].u < pairs[b].u; });
  std::vector<std::size_t> group_begin;
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (i == 0 || pairs[order[i]].u != pairs[order[i - 1]].u) group_begin.push_back(i);
  }
  group_begin.push_back(order.size());

  // rho_s[t] for s = 0..k-1, per distinct target; index = target slot.
  std::vector<NodeId> targets;
  std::vector<std::uint32_t> target_slot(n, UINT32_MAX);
  if (cfg.oracle_enabled) {
    for (const auto& p : pairs) {
      if (target_slot[p.v] == UINT32_MAX) {
        target_slot[p.v] = static_cast<std::uint32_t>(targets.size());
        targets.push_back(p.v);
      }
    }
  }
  std::vector<double> rho(targets.size() * static_cast<std::size_t>(k));
  parallel_for(targets.size(), threads, [&](std::size_t slot) {
    const NodeId t = targets[slot];
    double* out = rho.data() + slot * static_cast<std::size_t>(k);
    out[0] = 1.0;
    if (k == 1) return;
    std::vector<double> x(n, 0.0), y(n, 0.0);
    x[t] = 1.0;
    for (int s = 1; s < k; ++s) {
      op.reflect(x, y);
      detail::require_finite(y, s);
      out[s] = y[t];
      std::swap(x, y);
    }
  }, 4);

  const std::size_t groups = group_begin.size() - 1;
  parallel_for(groups, threads, [&](std::size_t g) {
    const NodeId j = pairs[order[group_begin[g]]].u;
    // phi_1..k at every node, laid out step-major.
    std::vector<double> phi(static_cast<std::size_t>(k) * n);
    std::vector<double> x(n, 0.0);
    x[j] = 1.0;
    for (int m = 1; m <= k; ++m) {
      std::span<double> y(phi.data() + static_cast<std::size_t>(m - 1) * n, n);
      op.reflect(x, y);
      detail::require_finite(y, m);
      std::copy(y.begin(), y.end(), x.begin());
    }
    std::vector<double> c(static_cast<std::size_t>(k) + 1);
    for (std::size_t idx = group_begin[g]; idx < group_begin[g + 1]; ++idx) {
      const std::size_t pi = order[idx];
      const NodeId t = pairs[pi].v;
      auto phi_at = [&](int m) { return phi[static_cast<std::size_t>(m - 1) * n + t]; };
      double amp;
      if (!cfg.oracle_enabled) {
        amp = phi_at(k);
      } else {
        const double* r = rho.data() + static_cast<std::size_t>(target_slot[t]) * static_cast<std::size_t>(k);
        for (int step = 1; step <= k; ++step) {
          double acc = phi_at(step);
          for (int s = 1; s < step; ++s) acc -= 2.0 * c[s] * r[step - s];
          c[step] = acc;
        }
        amp = phi_at(k);
        for (int step = 1; step <= k; ++step) amp -= 2.0 * c[step] * r[k - step];
      }
      scores[pi] = amp * amp;
    }
  }, 1);
  return scores;
}

}  // namespace qwalk
