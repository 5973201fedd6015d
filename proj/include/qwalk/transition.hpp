#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "qwalk/error.hpp"
#include "qwalk/graph.hpp"

namespace qwalk {

// Edge weighting applied before symmetric normalization.
//   uniform            W_jk = A_jk
//   inverse_degree     W_jk = A_jk / d_k          (resource-allocation limit)
//   inverse_log_degree W_jk = A_jk / ln d_k, 0 when d_k <= 1 (Adamic-Adar limit)
enum class WeightScheme { uniform, inverse_degree, inverse_log_degree };

inline std::string_view to_string(WeightScheme s) {
  switch (s) {
    case WeightScheme::uniform: return "uniform";
    case WeightScheme::inverse_degree: return "inverse-degree";
    case WeightScheme::inverse_log_degree: return "inverse-log-degree";
  }
  return "?";
}

inline WeightScheme parse_weight_scheme(std::string_view s) {
  if (s == "uniform") return WeightScheme::uniform;
  if (s == "inverse-degree" || s == "ra") return WeightScheme::inverse_degree;
  if (s == "inverse-log-degree" || s == "aa") return WeightScheme::inverse_log_degree;
  throw Error("unknown weight scheme '" + std::string(s) + "'");
}

// Weight of an edge entering node k.
inline double scheme_weight(WeightScheme s, std::uint32_t degree_k) {
  switch (s) {
    case WeightScheme::uniform: return 1.0;
    case WeightScheme::inverse_degree: return degree_k == 0 ? 0.0 : 1.0 / static_cast<double>(degree_k);
    case WeightScheme::inverse_log_degree:
      return degree_k <= 1 ? 0.0 : 1.0 / std::log(static_cast<double>(degree_k));
  }
  return 0.0;
}

// P = S^{-1/2} W S^{-1/2} stored on the graph's CSR pattern, where S holds
// the row sums of W. Rows and columns with zero row sum are all-zero.
class TransitionOperator {
 public:
  TransitionOperator() = default;

  // Direct construction for tests and fault injection; no invariants enforced
  // beyond shape.
  static TransitionOperator from_csr(std::vector<std::uint64_t> offsets, std::vector<NodeId> columns,
                                     std::vector<double> values, WeightScheme scheme) {
    if (offsets.empty() || offsets.back() != columns.size() || columns.size() != values.size()) {
      throw Error("transition operator CSR arrays have inconsistent sizes");
    }
    TransitionOperator op;
    op.offsets_ = std::move(offsets);
    op.columns_ = std::move(columns);
    op.values_ = std::move(values);
    op.scheme_ = scheme;
    op.symmetric_ = op.check_symmetric();
    return op;
  }

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t entry_count() const { return values_.size(); }
  WeightScheme scheme() const { return scheme_; }
  bool is_symmetric() const { return symmetric_; }

  std::span<const std::uint64_t> offsets() const { return offsets_; }
  std::span<const NodeId> columns() const { return columns_; }
  std::span<const double> values() const { return values_; }

  double entry(NodeId i, NodeId j) const {
    for (auto k = offsets_[i]; k < offsets_[i + 1]; ++k) {
      if (columns_[k] == j) return values_[k];
    }
    return 0.0;
  }

  // y = P x
  void multiply(std::span<const double> x, std::span<double> y) const {
    if (x.size() != size() || y.size() != size()) throw Error("transition operator dimension mismatch");
    for (std::size_t i = 0; i < size(); ++i) {
      double acc = 0.0;
      for (auto k = offsets_[i]; k < offsets_[i + 1]; ++k) acc += values_[k] * x[columns_[k]];
      y[i] = acc;
    }
  }

  // y = (2P - I) x
  void reflect(std::span<const double> x, std::span<double> y) const {
    if (x.size() != size() || y.size() != size()) throw Error("transition operator dimension mismatch");
    for (std::size_t i = 0; i < size(); ++i) {
      double acc = 0.0;
      for (auto k = offsets_[i]; k < offsets_[i + 1]; ++k) acc += values_[k] * x[columns_[k]];
      y[i] = 2.0 * acc - x[i];
    }
  }

 private:
  friend TransitionOperator build_transition_operator(const Graph&, WeightScheme);

  bool check_symmetric() const {
    for (std::size_t i = 0; i < size(); ++i) {
      for (auto k = offsets_[i]; k < offsets_[i + 1]; ++k) {
        const NodeId j = columns_[k];
        bool found = false;
        for (auto q = offsets_[j]; q < offsets_[j + 1]; ++q) {
          if (columns_[q] == i) {
            if (values_[q] != values_[k]) return false;
            found = true;
            break;
          }
        }
        if (!found && values_[k] != 0.0) return false;
      }
    }
    return true;
  }

  std::vector<std::uint64_t> offsets_;
  std::vector<NodeId> columns_;
  std::vector<double> values_;
  WeightScheme scheme_ = WeightScheme::uniform;
  bool symmetric_ = true;
};

inline TransitionOperator build_transition_operator(const Graph& g, WeightScheme scheme = WeightScheme::uniform) {
  const std::size_t n = g.node_count();
  std::vector<double> column_weight(n);
  for (NodeId k = 0; k < n; ++k) column_weight[k] = scheme_weight(scheme, g.degree(k));

  std::vector<double> row_sum(n, 0.0);
  for (NodeId i = 0; i < n; ++i) {
    for (NodeId j : g.neighbors(i)) row_sum[i] += column_weight[j];
  }

  TransitionOperator op;
  op.offsets_ = g.offsets();
  op.columns_ = g.neighbor_array();
  op.values_.resize(op.columns_.size());
  op.scheme_ = scheme;
  for (NodeId i = 0; i < n; ++i) {
    for (auto k = op.offsets_[i]; k < op.offsets_[i + 1]; ++k) {
      const NodeId j = op.columns_[k];
      const double s = row_sum[i] * row_sum[j];
      op.values_[k] = s > 0.0 ? column_weight[j] / std::sqrt(s) : 0.0;
    }
  }
  op.symmetric_ = scheme == WeightScheme::uniform ? true : op.check_symmetric();
  return op;
}

}  // namespace qwalk
