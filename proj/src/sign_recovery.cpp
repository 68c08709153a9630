#include "crowdrank/sign_recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <string>
#include <tuple>

#include "crowdrank/error.hpp"

namespace crowdrank {

namespace {

struct TreeEdge {
  int parent;
  int child;
  double c;
};

double edge_value(const CorrelationEstimate& corr, int i, int j) {
  const auto* e = corr.find(i, j);
  require(e != nullptr, ErrorKind::kParameter,
          "graph edge (" + std::to_string(i) + ", " + std::to_string(j) +
              ") has no correlation entry");
  return e->c;
}

std::string edge_name(int i, int j) {
  return "(" + std::to_string(std::min(i, j)) + ", " + std::to_string(std::max(i, j)) + ")";
}

// Prim's algorithm on weights |c_ij|, largest first. Returns tree edges in
// the order their child was reached; ties go to lower worker indices.
std::vector<TreeEdge> max_abs_spanning_tree(int root, const CorrelationEstimate& corr,
                                            const InteractionGraph& graph,
                                            std::vector<char>& in_tree) {
  using Candidate = std::tuple<double, int, int, double>;  // |c|, -child, parent, c
  std::priority_queue<Candidate> frontier;
  std::vector<TreeEdge> tree;
  auto push_neighbors = [&](int u) {
    for (const auto& nb : graph.neighbors(u)) {
      if (in_tree[static_cast<std::size_t>(nb.worker)]) continue;
      const double c = edge_value(corr, u, nb.worker);
      frontier.emplace(std::abs(c), -nb.worker, u, c);
    }
  };
  in_tree[static_cast<std::size_t>(root)] = 1;
  push_neighbors(root);
  while (!frontier.empty()) {
    const auto [abs_c, neg_child, parent, c] = frontier.top();
    frontier.pop();
    const int child = -neg_child;
    if (in_tree[static_cast<std::size_t>(child)]) continue;
    in_tree[static_cast<std::size_t>(child)] = 1;
    tree.push_back({parent, child, c});
    push_neighbors(child);
  }
  return tree;
}

int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

}  // namespace

double sign_noise_floor(std::int64_t n, int class_count, double z) {
  if (n <= 0) return std::numeric_limits<double>::infinity();
  const double m = static_cast<double>(class_count);
  // c is an affine map of a mean of n indicators with slope M/(M-1).
  const double sigma = m / (2.0 * (m - 1.0) * std::sqrt(static_cast<double>(n)));
  return z * sigma;
}

SignedSkills recover_signs(const SkillVector& magnitudes, const CorrelationEstimate& corr,
                           const InteractionGraph& graph, ZeroEdgePolicy zero_edges) {
  const int w = graph.worker_count();
  require(magnitudes.size() == w && corr.worker_count() == w, ErrorKind::kParameter,
          "dimension mismatch between magnitudes, correlations and graph");
  require((magnitudes.values.array() >= 0.0).all(), ErrorKind::kParameter,
          "sign recovery expects nonnegative magnitudes");

  const auto report = analyze_components(graph);
  SignAssignment out;
  out.signs.assign(static_cast<std::size_t>(w), 0);
  out.component_flipped.assign(report.components.size(), false);
  std::vector<char> in_tree(static_cast<std::size_t>(w), 0);
  std::vector<int> tree_sign(static_cast<std::size_t>(w), 0);
  std::vector<int> block_of(static_cast<std::size_t>(w), -1);

  for (std::size_t comp = 0; comp < report.components.size(); ++comp) {
    const auto& members = report.components[comp];
    if (members.size() < 2) continue;
    const int root = members.front();
    tree_sign[static_cast<std::size_t>(root)] = 1;
    const int first_block = out.sign_blocks++;
    block_of[static_cast<std::size_t>(root)] = first_block;
    const auto tree = max_abs_spanning_tree(root, corr, graph, in_tree);

    for (const auto& te : tree) {
      const auto child = static_cast<std::size_t>(te.child);
      const bool split_here =
          zero_edges == ZeroEdgePolicy::kSplitInsignificant &&
          std::abs(te.c) <= sign_noise_floor(graph.count(te.parent, te.child), corr.class_count(), kSignSplitZ);
      if (te.c == 0.0 || split_here) {
        // Prim only takes a zero edge when every edge leaving the tree is 0.
        if (zero_edges == ZeroEdgePolicy::kError) {
          fail(ErrorKind::kData, "ambiguous sign: zero correlation on needed edge " +
                                     edge_name(te.parent, te.child));
        }
        tree_sign[child] = 1;
        block_of[child] = out.sign_blocks++;
        continue;
      }
      tree_sign[child] = tree_sign[static_cast<std::size_t>(te.parent)] * sign_of(te.c);
      block_of[child] = block_of[static_cast<std::size_t>(te.parent)];
    }

    // Every graph edge that is not a tree edge closes a cycle; its sign must
    // equal the product of its endpoint signs.
    int checked = 0;
    int disagreeing = 0;
    int first_bad_i = -1;
    int first_bad_j = -1;
    std::vector<int> parent_of(static_cast<std::size_t>(w), -1);
    for (const auto& te : tree) parent_of[static_cast<std::size_t>(te.child)] = te.parent;
    for (const int u : members) {
      for (const auto& nb : graph.neighbors(u)) {
        const int v = nb.worker;
        if (v <= u) continue;
        if (parent_of[static_cast<std::size_t>(v)] == u || parent_of[static_cast<std::size_t>(u)] == v)
          continue;
        if (block_of[static_cast<std::size_t>(u)] != block_of[static_cast<std::size_t>(v)]) continue;
        const double c = edge_value(corr, u, v);
        // An edge whose |c| is within sampling noise of 0 says nothing about
        // the sign; leave it out of the vote.
        if (std::abs(c) <= sign_noise_floor(nb.n, corr.class_count(), kSignVoteZ)) {
          ++out.insignificant_edges;
          continue;
        }
        const int s = sign_of(c);
        ++checked;
        if (s != tree_sign[static_cast<std::size_t>(u)] * tree_sign[static_cast<std::size_t>(v)]) {
          ++disagreeing;
          if (first_bad_i < 0) {
            first_bad_i = u;
            first_bad_j = v;
          }
        }
      }
    }
    out.checked_edges += checked;
    out.disagreeing_edges += disagreeing;
    if (checked > 0 &&
        static_cast<double>(checked - disagreeing) < kSignAgreementThreshold * checked) {
      fail(ErrorKind::kData, "sign-inconsistent data: edge " + edge_name(first_bad_i, first_bad_j) +
                                 " disagrees with the spanning-tree signs (" +
                                 std::to_string(disagreeing) + " of " + std::to_string(checked) +
                                 " cycle edges)");
    }

    std::vector<double> signed_sum(static_cast<std::size_t>(out.sign_blocks - first_block), 0.0);
    for (const int u : members) {
      const auto b = static_cast<std::size_t>(block_of[static_cast<std::size_t>(u)] - first_block);
      signed_sum[b] += tree_sign[static_cast<std::size_t>(u)] * magnitudes.values(u);
    }
    std::vector<int> flip(signed_sum.size(), 1);
    for (std::size_t b = 0; b < signed_sum.size(); ++b) {
      if (signed_sum[b] == 0.0) out.zero_sum_ambiguous = true;
      if (signed_sum[b] <= 0.0) {
        flip[b] = -1;
        out.component_flipped[comp] = true;
        out.flipped_globally = true;
      }
    }
    for (const int u : members) {
      const auto b = static_cast<std::size_t>(block_of[static_cast<std::size_t>(u)] - first_block);
      out.signs[static_cast<std::size_t>(u)] =
          magnitudes.values(u) > 0.0 ? flip[b] * tree_sign[static_cast<std::size_t>(u)] : 0;
    }
  }

  SignedSkills result;
  result.skills.class_count = magnitudes.class_count;
  result.skills.magnitude_only = false;
  result.skills.values.resize(w);
  for (int i = 0; i < w; ++i)
    result.skills.values(i) = out.signs[static_cast<std::size_t>(i)] * magnitudes.values(i);
  result.signs = std::move(out);
  return result;
}

double odd_cycle_magnitude(std::span<const int> cycle, const CorrelationEstimate& corr) {
  const auto length = cycle.size();
  require(length >= 3 && length % 2 == 1, ErrorKind::kParameter,
          "odd_cycle_magnitude needs an odd cycle of length >= 3");
  double log_square = 0.0;
  for (std::size_t k = 0; k < length; ++k) {
    const int u = cycle[k];
    const int v = cycle[(k + 1) % length];
    const auto c = corr.value(u, v);
    require(c.has_value(), ErrorKind::kParameter, "cycle edge " + edge_name(u, v) + " not observed");
    require(*c != 0.0, ErrorKind::kData, "degenerate cycle: zero correlation on " + edge_name(u, v));
    const double term = std::log(std::abs(*c));
    log_square += (k % 2 == 0) ? term : -term;
  }
  return std::exp(0.5 * log_square);
}

SkillVector propagate_magnitudes(int anchor, double anchor_magnitude,
                                 const CorrelationEstimate& corr, const InteractionGraph& graph) {
  const int w = graph.worker_count();
  require(anchor >= 0 && anchor < w, ErrorKind::kParameter, "anchor out of range");
  require(anchor_magnitude > 0.0, ErrorKind::kParameter, "anchor magnitude must be positive");
  std::vector<char> in_tree(static_cast<std::size_t>(w), 0);
  SkillVector out;
  out.class_count = corr.class_count();
  out.magnitude_only = true;
  out.values = Eigen::VectorXd::Zero(w);
  out.values(anchor) = anchor_magnitude;
  for (const auto& te : max_abs_spanning_tree(anchor, corr, graph, in_tree)) {
    require(te.c != 0.0, ErrorKind::kData,
            "degenerate path: zero correlation on " + edge_name(te.parent, te.child));
    out.values(te.child) = std::abs(te.c) / out.values(te.parent);
  }
  return out;
}

}  // namespace crowdrank
