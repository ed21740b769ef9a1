// Copyright (c) 2026 The sphot authors.
// SPDX-License-Identifier: Apache-2.0

#include "sphot/ot.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace sphot {

Eigen::MatrixXd cost_matrix(const Eigen::MatrixXd& source_points,
                            const Eigen::MatrixXd& target_points) {
  if (source_points.rows() == 0 || target_points.rows() == 0)
    throw Error(ErrorCode::EmptyInput, "cost_matrix: empty point set");
  if (source_points.cols() != target_points.cols())
    throw Error(ErrorCode::DimensionMismatch,
                "cost_matrix: embedding dimensions differ");
  Eigen::MatrixXd cost =
      Eigen::MatrixXd::Ones(source_points.rows(), target_points.rows()) -
      source_points * target_points.transpose();
  return cost.cwiseMax(0.0).cwiseMin(2.0);
}

namespace {

// Weights are accepted if within 1e-6 of the simplex and renormalized to it.
Eigen::VectorXd to_simplex(const Eigen::VectorXd& weights, const char* side) {
  if (weights.size() == 0)
    throw Error(ErrorCode::EmptyInput,
                std::string("solve_ot: empty ") + side + " weights");
  if ((weights.array() < -1e-6).any())
    throw Error(ErrorCode::InfeasibleWeights,
                std::string("solve_ot: negative ") + side + " weight");
  const double total = weights.sum();
  if (std::abs(total - 1.0) > 1e-6)
    throw Error(ErrorCode::InfeasibleWeights,
                std::string("solve_ot: ") + side +
                    " weights sum away from 1 beyond 1e-6");
  return weights.cwiseMax(0.0) / weights.cwiseMax(0.0).sum();
}

// Transportation simplex over the dense bipartite problem. Nodes 0..n-1 are
// sources, n..n+m-1 targets; the basis is a spanning tree of basic cells.
class TransportSimplex {
 public:
  TransportSimplex(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                   const Eigen::MatrixXd& cost)
      : a_(a),
        b_(b),
        cost_(cost),
        n_(a.size()),
        m_(b.size()),
        flow_(Eigen::MatrixXd::Zero(a.size(), b.size())),
        basic_(Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic>::Zero(
            a.size(), b.size())),
        adjacency_(static_cast<std::size_t>(a.size() + b.size())),
        dual_u_(a.size()),
        dual_v_(b.size()) {}

  OtResult run(int max_iterations) {
    initial_solution();
    patch_forest_to_tree();

    int consecutive_degenerate = 0;
    bool bland = false;
    int iteration = 0;
    bool converged = false;
    for (; iteration < max_iterations; ++iteration) {
      compute_duals();
      Eigen::Index ei, ej;
      if (!find_entering(bland, &ei, &ej)) {
        converged = true;
        break;
      }
      const double theta = pivot(ei, ej);
      if (theta <= 1e-15) {
        if (++consecutive_degenerate >= 64) bland = true;
      } else {
        consecutive_degenerate = 0;
        bland = false;
      }
    }
    compute_duals();

    OtResult result;
    result.coupling = flow_;
    result.dual_source = dual_u_;
    result.dual_target = dual_v_;
    result.objective = flow_.cwiseProduct(cost_).sum();
    result.iterations = iteration;
    result.converged = converged;
    return result;
  }

 private:
  // Greedy least-cost allocation. The positive cells form a forest; each
  // allocation exhausts a row or a column.
  void initial_solution() {
    std::vector<Eigen::Index> order(static_cast<std::size_t>(n_ * m_));
    std::iota(order.begin(), order.end(), Eigen::Index(0));
    std::sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
      const double cx = cost_(x / m_, x % m_);
      const double cy = cost_(y / m_, y % m_);
      if (cx != cy) return cx < cy;
      return x < y;
    });

    Eigen::VectorXd remaining_a = a_;
    Eigen::VectorXd remaining_b = b_;
    std::vector<char> row_alive(static_cast<std::size_t>(n_), 1);
    std::vector<char> col_alive(static_cast<std::size_t>(m_), 1);
    // Zero-weight lines are exhausted from the start.
    for (Eigen::Index i = 0; i < n_; ++i)
      if (remaining_a[i] <= 0.0) row_alive[static_cast<std::size_t>(i)] = 0;
    for (Eigen::Index j = 0; j < m_; ++j)
      if (remaining_b[j] <= 0.0) col_alive[static_cast<std::size_t>(j)] = 0;

    for (const Eigen::Index idx : order) {
      const Eigen::Index i = idx / m_;
      const Eigen::Index j = idx % m_;
      if (!row_alive[static_cast<std::size_t>(i)] ||
          !col_alive[static_cast<std::size_t>(j)])
        continue;
      const double amount = std::min(remaining_a[i], remaining_b[j]);
      add_basic(i, j, amount);
      if (remaining_a[i] <= remaining_b[j]) {
        remaining_b[j] -= remaining_a[i];
        remaining_a[i] = 0.0;
        row_alive[static_cast<std::size_t>(i)] = 0;
        if (remaining_b[j] <= 0.0) col_alive[static_cast<std::size_t>(j)] = 0;
      } else {
        remaining_a[i] -= remaining_b[j];
        remaining_b[j] = 0.0;
        col_alive[static_cast<std::size_t>(j)] = 0;
      }
    }
  }

  // Connect forest components with zero-flow basic arcs until the basis is a
  // single spanning tree. Component labels are recomputed per patch; the
  // lowest-cost arc bridging the first component to any other is chosen,
  // ties by linear cell index.
  void patch_forest_to_tree() {
    for (;;) {
      const std::vector<int> component = components();
      const int total =
          *std::max_element(component.begin(), component.end()) + 1;
      if (total <= 1) return;
      double best_cost = std::numeric_limits<double>::infinity();
      Eigen::Index bi = -1, bj = -1;
      for (Eigen::Index i = 0; i < n_; ++i) {
        for (Eigen::Index j = 0; j < m_; ++j) {
          const bool crosses =
              (component[static_cast<std::size_t>(i)] == 0) !=
              (component[static_cast<std::size_t>(n_ + j)] == 0);
          if (!crosses) continue;
          if (cost_(i, j) < best_cost) {
            best_cost = cost_(i, j);
            bi = i;
            bj = j;
          }
        }
      }
      add_basic(bi, bj, 0.0);
    }
  }

  std::vector<int> components() const {
    const std::size_t total_nodes = static_cast<std::size_t>(n_ + m_);
    std::vector<int> component(total_nodes, -1);
    int label = 0;
    std::vector<Eigen::Index> stack;
    for (std::size_t start = 0; start < total_nodes; ++start) {
      if (component[start] >= 0) continue;
      stack.push_back(static_cast<Eigen::Index>(start));
      component[start] = label;
      while (!stack.empty()) {
        const Eigen::Index node = stack.back();
        stack.pop_back();
        for (const Eigen::Index next :
             adjacency_[static_cast<std::size_t>(node)]) {
          if (component[static_cast<std::size_t>(next)] < 0) {
            component[static_cast<std::size_t>(next)] = label;
            stack.push_back(next);
          }
        }
      }
      ++label;
    }
    return component;
  }

  void add_basic(Eigen::Index i, Eigen::Index j, double amount) {
    flow_(i, j) = amount;
    basic_(i, j) = 1;
    adjacency_[static_cast<std::size_t>(i)].push_back(n_ + j);
    adjacency_[static_cast<std::size_t>(n_ + j)].push_back(i);
  }

  void remove_basic(Eigen::Index i, Eigen::Index j) {
    flow_(i, j) = 0.0;
    basic_(i, j) = 0;
    auto& ai = adjacency_[static_cast<std::size_t>(i)];
    ai.erase(std::find(ai.begin(), ai.end(), n_ + j));
    auto& aj = adjacency_[static_cast<std::size_t>(n_ + j)];
    aj.erase(std::find(aj.begin(), aj.end(), i));
  }

  // Dual potentials from the tree: u[0] = 0, u_i + v_j = C_ij on basic arcs.
  void compute_duals() {
    const std::size_t total_nodes = static_cast<std::size_t>(n_ + m_);
    std::vector<char> visited(total_nodes, 0);
    std::vector<Eigen::Index> stack{0};
    visited[0] = 1;
    dual_u_[0] = 0.0;
    while (!stack.empty()) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      for (const Eigen::Index next :
           adjacency_[static_cast<std::size_t>(node)]) {
        if (visited[static_cast<std::size_t>(next)]) continue;
        visited[static_cast<std::size_t>(next)] = 1;
        if (node < n_)
          dual_v_[next - n_] = cost_(node, next - n_) - dual_u_[node];
        else
          dual_u_[next] = cost_(next, node - n_) - dual_v_[node - n_];
        stack.push_back(next);
      }
    }
  }

  // Most negative reduced cost among non-basic cells (Dantzig), or the first
  // negative cell in row-major order under Bland's rule. Returns false when
  // optimal within tolerance.
  bool find_entering(bool bland, Eigen::Index* ei, Eigen::Index* ej) const {
    constexpr double kTol = 1e-12;
    if (bland) {
      for (Eigen::Index i = 0; i < n_; ++i)
        for (Eigen::Index j = 0; j < m_; ++j) {
          if (basic_(i, j)) continue;
          if (cost_(i, j) - dual_u_[i] - dual_v_[j] < -kTol) {
            *ei = i;
            *ej = j;
            return true;
          }
        }
      return false;
    }
    double best = -kTol;
    Eigen::Index bi = -1, bj = -1;
    for (Eigen::Index i = 0; i < n_; ++i) {
      const double ui = dual_u_[i];
      for (Eigen::Index j = 0; j < m_; ++j) {
        if (basic_(i, j)) continue;
        const double reduced = cost_(i, j) - ui - dual_v_[j];
        if (reduced < best) {
          best = reduced;
          bi = i;
          bj = j;
        }
      }
    }
    if (bi < 0) return false;
    *ei = bi;
    *ej = bj;
    return true;
  }

  // Tree path from node `from` to node `to` as a node sequence.
  std::vector<Eigen::Index> tree_path(Eigen::Index from, Eigen::Index to) const {
    const std::size_t total_nodes = static_cast<std::size_t>(n_ + m_);
    std::vector<Eigen::Index> parent(total_nodes, Eigen::Index(-2));
    parent[static_cast<std::size_t>(from)] = -1;
    std::vector<Eigen::Index> stack{from};
    while (!stack.empty()) {
      const Eigen::Index node = stack.back();
      stack.pop_back();
      if (node == to) break;
      for (const Eigen::Index next :
           adjacency_[static_cast<std::size_t>(node)]) {
        if (parent[static_cast<std::size_t>(next)] != Eigen::Index(-2))
          continue;
        parent[static_cast<std::size_t>(next)] = node;
        stack.push_back(next);
      }
    }
    std::vector<Eigen::Index> path;
    for (Eigen::Index node = to; node != -1;
         node = parent[static_cast<std::size_t>(node)])
      path.push_back(node);
    std::reverse(path.begin(), path.end());
    return path;
  }

  // Add the entering arc, shift theta around the unique tree cycle and drop
  // the blocking arc. Returns theta.
  double pivot(Eigen::Index enter_i, Eigen::Index enter_j) {
    // Cycle: entering arc (enter_i -> n+enter_j) plus the tree path from
    // n+enter_j back to enter_i. Arcs along the path alternate -theta,
    // +theta starting with -theta.
    const std::vector<Eigen::Index> path = tree_path(n_ + enter_j, enter_i);

    // Collect (i, j, sign) triples for the path arcs.
    struct CycleArc {
      Eigen::Index i, j;
      int sign;
    };
    std::vector<CycleArc> arcs;
    arcs.push_back({enter_i, enter_j, +1});
    int sign = -1;
    for (std::size_t t = 0; t + 1 < path.size(); ++t) {
      const Eigen::Index x = path[t];
      const Eigen::Index y = path[t + 1];
      const Eigen::Index i = x < n_ ? x : y;
      const Eigen::Index j = x < n_ ? y - n_ : x - n_;
      arcs.push_back({i, j, sign});
      sign = -sign;
    }

    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = 0;
    for (std::size_t t = 1; t < arcs.size(); ++t) {
      if (arcs[t].sign < 0 && flow_(arcs[t].i, arcs[t].j) < theta) {
        theta = flow_(arcs[t].i, arcs[t].j);
        leaving = t;
      }
    }

    for (std::size_t t = 1; t < arcs.size(); ++t)
      flow_(arcs[t].i, arcs[t].j) += arcs[t].sign * theta;
    const Eigen::Index li = arcs[leaving].i;
    const Eigen::Index lj = arcs[leaving].j;
    remove_basic(li, lj);
    add_basic(enter_i, enter_j, theta);
    return theta;
  }

  Eigen::VectorXd a_, b_;
  const Eigen::MatrixXd& cost_;
  Eigen::Index n_, m_;
  Eigen::MatrixXd flow_;
  Eigen::Matrix<char, Eigen::Dynamic, Eigen::Dynamic> basic_;
  std::vector<std::vector<Eigen::Index>> adjacency_;
  Eigen::VectorXd dual_u_, dual_v_;
};

}  // namespace

OtResult solve_ot(const Eigen::VectorXd& source_weights,
                  const Eigen::VectorXd& target_weights,
                  const Eigen::MatrixXd& cost, int max_iterations) {
  const Eigen::VectorXd a = to_simplex(source_weights, "source");
  const Eigen::VectorXd b = to_simplex(target_weights, "target");
  if (cost.rows() != a.size() || cost.cols() != b.size())
    throw Error(ErrorCode::DimensionMismatch,
                "solve_ot: cost shape does not match weight lengths");
  if (!cost.allFinite())
    throw Error(ErrorCode::InvalidArgument, "solve_ot: non-finite cost");

  TransportSimplex simplex(a, b, cost);
  return simplex.run(max_iterations);
}

namespace {

double log_sum_exp(const Eigen::VectorXd& values) {
  const double peak = values.maxCoeff();
  if (!std::isfinite(peak)) return peak;
  return peak + std::log((values.array() - peak).exp().sum());
}

}  // namespace

Eigen::MatrixXd solve_ot_entropic(const Eigen::VectorXd& source_weights,
                                  const Eigen::VectorXd& target_weights,
                                  const Eigen::MatrixXd& cost,
                                  double epsilon_reg, int max_iterations) {
  if (!(epsilon_reg > 0.0))
    throw Error(ErrorCode::InvalidArgument,
                "solve_ot_entropic: epsilon_reg must be positive");
  const Eigen::VectorXd a = to_simplex(source_weights, "source");
  const Eigen::VectorXd b = to_simplex(target_weights, "target");
  if (cost.rows() != a.size() || cost.cols() != b.size())
    throw Error(ErrorCode::DimensionMismatch,
                "solve_ot_entropic: cost shape does not match weights");

  const Eigen::Index n = a.size();
  const Eigen::Index m = b.size();
  const double neg_inf = -std::numeric_limits<double>::infinity();

  // Log-domain potentials; zero-weight lines are pinned to -inf so their
  // coupling entries vanish.
  Eigen::VectorXd log_a(n), log_b(m);
  for (Eigen::Index i = 0; i < n; ++i)
    log_a[i] = a[i] > 0.0 ? std::log(a[i]) : neg_inf;
  for (Eigen::Index j = 0; j < m; ++j)
    log_b[j] = b[j] > 0.0 ? std::log(b[j]) : neg_inf;

  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd g = Eigen::VectorXd::Zero(m);
  for (Eigen::Index i = 0; i < n; ++i)
    if (a[i] <= 0.0) f[i] = neg_inf;
  for (Eigen::Index j = 0; j < m; ++j)
    if (b[j] <= 0.0) g[j] = neg_inf;

  const auto coupling_from_potentials = [&]() {
    Eigen::MatrixXd plan(n, m);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < m; ++j) {
        const double exponent = (f[i] + g[j] - cost(i, j)) / epsilon_reg;
        plan(i, j) = std::isfinite(exponent) ? std::exp(exponent) : 0.0;
      }
    return plan;
  };

  constexpr double kMarginalTol = 1e-10;
  for (int iter = 0; iter < max_iterations; ++iter) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (a[i] <= 0.0) continue;
      Eigen::VectorXd terms = (g - cost.row(i).transpose()) / epsilon_reg;
      f[i] = epsilon_reg * (log_a[i] - log_sum_exp(terms));
      if (!std::isfinite(f[i]))
        throw Error(ErrorCode::NumericalUnderflow,
                    "solve_ot_entropic: potential became non-finite");
    }
    for (Eigen::Index j = 0; j < m; ++j) {
      if (b[j] <= 0.0) continue;
      Eigen::VectorXd terms = (f - cost.col(j)) / epsilon_reg;
      g[j] = epsilon_reg * (log_b[j] - log_sum_exp(terms));
      if (!std::isfinite(g[j]))
        throw Error(ErrorCode::NumericalUnderflow,
                    "solve_ot_entropic: potential became non-finite");
    }
    const Eigen::MatrixXd plan = coupling_from_potentials();
    const double row_err = (plan.rowwise().sum() - a).cwiseAbs().maxCoeff();
    const double col_err =
        (plan.colwise().sum().transpose() - b).cwiseAbs().maxCoeff();
    if (row_err < kMarginalTol && col_err < kMarginalTol) return plan;
  }
  return coupling_from_potentials();
}

Eigen::MatrixXd normalize_coupling(const Eigen::MatrixXd& coupling) {
  if ((coupling.array() < 0.0).any())
    throw Error(ErrorCode::InvalidArgument,
                "normalize_coupling: negative entry");
  const double total = coupling.sum();
  if (!(total > 0.0))
    throw Error(ErrorCode::ZeroCoupling,
                "normalize_coupling: coupling has no mass");
  return coupling / total;
}

}  // namespace sphot
