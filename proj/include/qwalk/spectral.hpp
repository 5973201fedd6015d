#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qwalk/error.hpp"
#include "qwalk/graph.hpp"
#include "qwalk/heuristics.hpp"
#include "qwalk/transition.hpp"
#include "qwalk/walk.hpp"

namespace qwalk {

inline constexpr std::size_t kDenseSpectralCap = 2048;
inline constexpr double kDegenerateGap = 1e-12;

// Full eigendecomposition of a symmetric transition operator.
struct SpectralReport {
  std::vector<double> eigenvalues;  // descending
  std::vector<double> mu;           // 2*lambda - 1, same order
  double gap = 0.0;                 // 1 - lambda_2
  double lambda_min = 0.0;
  bool degenerate = true;           // gap within kDegenerateGap of zero
  // The noise-decay envelope |1-2*gap|^m applies: non-degenerate gap, every
  // noise eigenvalue of U_T no larger in magnitude than mu_2, and no
  // eigenvalue of P_T at -1.
  bool bound_assumption_ok = false;
  Eigen::MatrixXd eigenvectors;     // column i pairs with eigenvalues[i]

  std::size_t size() const { return eigenvalues.size(); }
  std::span<const double> vector(std::size_t i) const {
    return {eigenvectors.col(static_cast<Eigen::Index>(i)).data(), size()};
  }
};

inline Eigen::MatrixXd to_dense(const TransitionOperator& op) {
  const auto n = static_cast<Eigen::Index>(op.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  auto offsets = op.offsets();
  auto cols = op.columns();
  auto vals = op.values();
  for (Eigen::Index i = 0; i < n; ++i) {
    for (auto k = offsets[static_cast<std::size_t>(i)]; k < offsets[static_cast<std::size_t>(i) + 1]; ++k) {
      m(i, cols[k]) += vals[k];
    }
  }
  return m;
}

inline SpectralReport eigendecompose(const TransitionOperator& op, std::size_t cap = kDenseSpectralCap) {
  const std::size_t n = op.size();
  if (n > cap) {
    throw Error("dense eigendecomposition capped at " + std::to_string(cap) + " nodes, graph has " + std::to_string(n));
  }
  if (!op.is_symmetric()) throw Error("eigendecomposition requires a symmetric transition operator");
  if (n == 0) throw Error("eigendecomposition of an empty operator");

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_dense(op));
  if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigensolver did not converge");

  // Eigen returns ascending order.
  SpectralReport r;
  r.eigenvalues.resize(n);
  r.mu.resize(n);
  r.eigenvectors.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const auto src = static_cast<Eigen::Index>(n - 1 - i);
    r.eigenvalues[i] = solver.eigenvalues()(src);
    r.mu[i] = 2.0 * r.eigenvalues[i] - 1.0;
    r.eigenvectors.col(static_cast<Eigen::Index>(i)) = solver.eigenvectors().col(src);
  }
  r.lambda_min = r.eigenvalues.back();
  r.gap = n >= 2 ? 1.0 - r.eigenvalues[1] : 0.0;
  r.degenerate = n < 2 || std::abs(r.gap) <= kDegenerateGap || r.gap < 0.0;
  if (!r.degenerate) {
    const double envelope = std::abs(1.0 - 2.0 * r.gap);
    bool ok = r.lambda_min > -1.0 + 1e-12;
    for (std::size_t i = 1; i < n && ok; ++i) ok = std::abs(r.mu[i]) <= envelope + 1e-12;
    r.bound_assumption_ok = ok;
  }
  return r;
}

// c_i = <v_i | psi>
inline std::vector<double> project_coefficients(const SpectralReport& r, std::span<const double> psi) {
  if (psi.size() != r.size()) throw Error("state dimension does not match the spectral report");
  Eigen::Map<const Eigen::VectorXd> v(psi.data(), static_cast<Eigen::Index>(psi.size()));
  Eigen::VectorXd c = r.eigenvectors.transpose() * v;
  return {c.data(), c.data() + c.size()};
}

// sum_i coeffs_i v_i
inline std::vector<double> reconstruct(const SpectralReport& r, std::span<const double> coeffs) {
  if (coeffs.size() != r.size()) throw Error("coefficient count does not match the spectral report");
  Eigen::Map<const Eigen::VectorXd> c(coeffs.data(), static_cast<Eigen::Index>(coeffs.size()));
  Eigen::VectorXd v = r.eigenvectors * c;
  return {v.data(), v.data() + v.size()};
}

// Oracle-free U_T^k e_j through the eigenbasis: sum_i mu_i^k <v_i|j> v_i.
inline std::vector<double> eigen_propagate(const SpectralReport& r, NodeId j, int k) {
  if (j >= r.size()) throw Error("start node out of range");
  std::vector<double> coeffs(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    coeffs[i] = std::pow(r.mu[i], k) * r.eigenvectors(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i));
  }
  return reconstruct(r, coeffs);
}

struct NoiseTrajectory {
  std::vector<double> norms;     // ||Pi_noise psi_m||, m = 0..k
  std::vector<double> envelope;  // |1-2*gap|^m ||Pi_noise psi_0||, empty when not applicable
  bool bound_applicable = false;
  bool within_bound = true;
};

inline NoiseTrajectory noise_norm_trajectory(const TransitionOperator& op, const SpectralReport& r, NodeId j,
                                             NodeId t, int k, bool oracle_enabled, double tolerance = 1e-9) {
  if (op.size() != r.size()) throw Error("operator and spectral report sizes differ");
  if (k < 0) throw Error("trajectory length must be non-negative");
  auto v1 = r.vector(0);
  auto noise_norm = [&](const AmplitudeVector& psi) {
    double overlap = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) overlap += v1[i] * psi[i];
    double s = 0.0;
    for (std::size_t i = 0; i < psi.size(); ++i) {
      const double d = psi[i] - overlap * v1[i];
      s += d * d;
    }
    return std::sqrt(s);
  };

  NoiseTrajectory out;
  AmplitudeVector psi = init_state(op.size(), j);
  if (t >= op.size()) throw Error("target out of range");
  out.norms.push_back(noise_norm(psi));
  WalkConfig step{1, oracle_enabled};
  for (int m = 1; m <= k; ++m) {
    psi = evolve(op, std::move(psi), t, step);
    out.norms.push_back(noise_norm(psi));
  }
  out.bound_applicable = !r.degenerate && r.bound_assumption_ok && !oracle_enabled;
  if (out.bound_applicable) {
    const double base = std::abs(1.0 - 2.0 * r.gap);
    for (int m = 0; m <= k; ++m) {
      out.envelope.push_back(std::pow(base, m) * out.norms[0]);
      if (out.norms[static_cast<std::size_t>(m)] > out.envelope.back() + tolerance) out.within_bound = false;
    }
  }
  return out;
}

// (1 - gap) / gap
inline double classical_noise_bound(double gap) {
  if (!(gap > kDegenerateGap)) throw Error("classical noise bound needs a positive spectral gap");
  return (1.0 - gap) / gap;
}

inline double classical_noise_bound(const SpectralReport& r) { return classical_noise_bound(r.gap); }

inline double quantum_noise_bound(double gap, int k) { return std::pow(1.0 - 2.0 * gap, 2 * k); }

// (1-2*gap)^{2k} / ((1-gap)/gap)
inline double suppression_ratio(double gap, int k) { return quantum_noise_bound(gap, k) / classical_noise_bound(gap); }

namespace detail {

// Dense <b|U_T|a> built straight from the adjacency, independent of
// TransitionOperator.
inline std::vector<std::vector<double>> dense_walk_matrix(const Graph& g, WeightScheme scheme) {
  const std::size_t n = g.node_count();
  std::vector<double> w(n);
  for (NodeId k = 0; k < n; ++k) {
    const double d = g.degree(k);
    switch (scheme) {
      case WeightScheme::uniform: w[k] = 1.0; break;
      case WeightScheme::inverse_degree: w[k] = d > 0 ? 1.0 / d : 0.0; break;
      case WeightScheme::inverse_log_degree: w[k] = d >= 2 ? 1.0 / std::log(d) : 0.0; break;
    }
  }
  std::vector<std::vector<double>> a(n, std::vector<double>(n, 0.0));
  for (NodeId u = 0; u < n; ++u)
    for (NodeId v = 0; v < n; ++v)
      if (g.has_edge(u, v)) a[u][v] = w[v];
  std::vector<double> s(n, 0.0);
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = 0; v < n; ++v) s[u] += a[u][v];
  std::vector<std::vector<double>> u_mat(n, std::vector<double>(n, 0.0));
  for (std::size_t b = 0; b < n; ++b)
    for (std::size_t c = 0; c < n; ++c) {
      const double p = (s[b] > 0 && s[c] > 0) ? a[b][c] / std::sqrt(s[b] * s[c]) : 0.0;
      u_mat[b][c] = 2.0 * p - (b == c ? 1.0 : 0.0);
    }
  return u_mat;
}

}  // namespace detail

inline constexpr std::size_t kPathSumMaxNodes = 10;
inline constexpr int kPathSumMaxSteps = 5;

// Brute-force sum over every node sequence u_1 = j, ..., u_{k+1} = t of
//   prod_l s(u_{l+1}) * <u_{l+1}|U_T|u_l>,  s(u) = -1 if u == t (oracle on) else 1.
inline double path_sum_amplitude(const Graph& g, WeightScheme scheme, NodeId j, NodeId t, int k,
                                 bool oracle_enabled = true) {
  const std::size_t n = g.node_count();
  if (n > kPathSumMaxNodes || k < 1 || k > kPathSumMaxSteps) {
    throw Error("path-sum enumeration limited to N <= 10 and 1 <= k <= 5");
  }
  if (j >= n || t >= n) throw Error("node id out of range");
  const auto u = detail::dense_walk_matrix(g, scheme);
  auto sign = [&](std::size_t node) { return oracle_enabled && node == t ? -1.0 : 1.0; };

  // Odometer over the k-1 free intermediate nodes.
  std::vector<std::size_t> mid(static_cast<std::size_t>(k - 1), 0);
  double total = 0.0;
  for (;;) {
    double amp = 1.0;
    std::size_t prev = j;
    for (int l = 0; l < k; ++l) {
      const std::size_t next = l + 1 < k ? mid[static_cast<std::size_t>(l)] : t;
      amp *= sign(next) * u[next][prev];
      if (amp == 0.0) break;
      prev = next;
    }
    total += amp;
    std::size_t pos = 0;
    while (pos < mid.size() && ++mid[pos] == n) mid[pos++] = 0;
    if (pos == mid.size()) break;
  }
  return total;
}

struct UnificationRecord {
  double quantum_amp = 0.0;      // <t|U_T^2|j> by two operator applications
  double identity_rhs = 0.0;     // 4 (P^2)_{tj} - 4 P_{tj} + delta_{jt}
  double heuristic_value = 0.0;  // matched classical heuristic for the scheme
  double identity_residual = 0.0;
};

// Degree-normalized common neighbors: sum_k A_jk A_kt / (d_k sqrt(d_j d_t)),
// which is (P^2)_{jt} for the uniform scheme.
inline double degree_normalized_cn(const Graph& g, NodeId j, NodeId t) {
  if (g.degree(j) == 0 || g.degree(t) == 0) return 0.0;
  double s = 0.0;
  detail::for_each_common_neighbor(g, j, t, [&](NodeId k) { s += 1.0 / static_cast<double>(g.degree(k)); });
  return s / std::sqrt(static_cast<double>(g.degree(j)) * static_cast<double>(g.degree(t)));
}

inline UnificationRecord unification_check(const Graph& g, const TransitionOperator& op, NodeId j, NodeId t) {
  if (j >= g.node_count() || t >= g.node_count()) throw Error("node id out of range");
  if (op.size() != g.node_count()) throw Error("operator and graph sizes differ");
  const WeightScheme scheme = op.scheme();
  UnificationRecord rec;
  auto psi = apply_transition(op, apply_transition(op, init_state(op.size(), j)));
  rec.quantum_amp = psi[t];

  double p2 = 0.0;
  auto offsets = op.offsets();
  auto cols = op.columns();
  auto vals = op.values();
  for (auto q = offsets[t]; q < offsets[t + 1]; ++q) p2 += vals[q] * op.entry(cols[q], j);
  rec.identity_rhs = 4.0 * p2 - 4.0 * op.entry(t, j) + (j == t ? 1.0 : 0.0);
  rec.identity_residual = std::abs(rec.quantum_amp - rec.identity_rhs);

  switch (scheme) {
    case WeightScheme::uniform: rec.heuristic_value = degree_normalized_cn(g, j, t); break;
    case WeightScheme::inverse_degree: rec.heuristic_value = ra_score(g, j, t); break;
    case WeightScheme::inverse_log_degree: rec.heuristic_value = aa_score(g, j, t); break;
  }
  return rec;
}

inline UnificationRecord unification_check(const Graph& g, NodeId j, NodeId t, WeightScheme scheme) {
  return unification_check(g, build_transition_operator(g, scheme), j, t);
}

struct TopEigenvalues {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  double gap = 0.0;
  int iterations = 0;
};

// Power iteration on (P + I)/2, then again on the complement of the leading
// vector. For operators beyond the dense cap.
inline TopEigenvalues estimate_top_eigenvalues(const TransitionOperator& op, int max_iterations = 5000,
                                               double tolerance = 1e-10, std::uint64_t seed = 7) {
  if (!op.is_symmetric()) throw Error("power iteration requires a symmetric transition operator");
  const std::size_t n = op.size();
  if (n < 2) throw Error("need at least two nodes to estimate a spectral gap");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;

  auto normalize = [](std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    s = std::sqrt(s);
    if (s == 0.0) return false;
    for (double& v : x) v /= s;
    return true;
  };
  auto shifted = [&](const std::vector<double>& x, std::vector<double>& y) {
    op.multiply(x, y);
    for (std::size_t i = 0; i < n; ++i) y[i] = 0.5 * (y[i] + x[i]);
  };
  auto rayleigh = [&](const std::vector<double>& x) {
    std::vector<double> y(n);
    op.multiply(x, y);
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i] * y[i];
    return s;
  };

  TopEigenvalues out;
  auto run = [&](const std::vector<double>* deflate) {
    std::vector<double> x(n), y(n);
    for (double& v : x) v = gauss(rng);
    auto project = [&](std::vector<double>& z) {
      if (!deflate) return;
      double d = 0.0;
      for (std::size_t i = 0; i < n; ++i) d += z[i] * (*deflate)[i];
      for (std::size_t i = 0; i < n; ++i) z[i] -= d * (*deflate)[i];
    };
    project(x);
    normalize(x);
    double previous = rayleigh(x);
    for (int it = 0; it < max_iterations; ++it) {
      shifted(x, y);
      project(y);
      if (!normalize(y)) break;
      std::swap(x, y);
      const double current = rayleigh(x);
      ++out.iterations;
      if (std::abs(current - previous) < tolerance) break;
      previous = current;
    }
    return x;
  };
  auto v1 = run(nullptr);
  out.lambda1 = rayleigh(v1);
  auto v2 = run(&v1);
  out.lambda2 = rayleigh(v2);
  out.gap = 1.0 - out.lambda2;
  return out;
}

}  // namespace qwalk
