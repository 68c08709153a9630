#pragma once

#include <span>
#include <vector>

#include "crowdrank/correlation.hpp"
#include "crowdrank/interaction_graph.hpp"
#include "crowdrank/rank1_solver.hpp"

namespace crowdrank {

struct SignAssignment {
  std::vector<int> signs;               // -1, 0 or +1 per worker; 0 = not estimable
  std::vector<bool> component_flipped;  // per component of the graph
  bool flipped_globally = false;        // any component was flipped
  bool consistent = true;               // non-tree edges agree (majority rule)
  bool zero_sum_ambiguous = false;      // some component's signed sum was exactly 0
  int checked_edges = 0;                // non-tree edges examined
  int disagreeing_edges = 0;            // non-tree edges whose sign disagreed
  int insignificant_edges = 0;          // non-tree edges skipped as |c| within noise
  int sign_blocks = 0;                  // independently oriented blocks (kSplit only adds)
};

struct SignedSkills {
  SkillVector skills;
  SignAssignment signs;
};

/// Fraction of non-tree edges that must agree with the spanning-tree signs.
inline constexpr double kSignAgreementThreshold = 0.9;
/// Non-tree edges vote only when |c| exceeds this many standard deviations;
/// strict so a lone noisy edge among few does not sink the 90% rule.
inline constexpr double kSignVoteZ = 3.0;
/// kSplitInsignificant cuts tree edges whose |c| is below this many.
inline constexpr double kSignSplitZ = 2.0;

/// z times the worst-case standard deviation of an empirical correlation
/// over n shared tasks, M / (2 (M-1) sqrt(n)).
double sign_noise_floor(std::int64_t n, int class_count, double z);

/// What to do when a spanning-tree edge cannot carry a sign.
enum class ZeroEdgePolicy {
  kError,              // c = 0 on a needed edge is an "ambiguous sign" data error
  kSplit,              // c = 0: orient each side separately with the positive-sum rule
  kSplitInsignificant, // same, for any tree edge with |c| inside sign_noise_floor
};

/// Turns |s| into signed skills. Per component: root the maximum-|c|
/// spanning tree at the lowest-index worker with sign +, propagate sign(c_ij)
/// along tree edges, check the remaining edges whose |c| clears the noise
/// floor (fewer than 90% agreeing is an error), then flip the component if
/// its signed sum is <= 0.
SignedSkills recover_signs(const SkillVector& magnitudes, const CorrelationEstimate& corr,
                           const InteractionGraph& graph,
                           ZeroEdgePolicy zero_edges = ZeroEdgePolicy::kError);

/// |s_1| from the alternating product around an odd cycle v_1 .. v_{2k+1}
/// (closing edge v_{2k+1} - v_1):
///   |s_1|^2 = |c_{1,2k+1}| * |c_{1,2}| / |c_{2,3}| * |c_{3,4}| / ... / |c_{2k,2k+1}|.
double odd_cycle_magnitude(std::span<const int> cycle, const CorrelationEstimate& corr);

/// |s_l| for every worker reachable from `anchor`, walking the maximum-|c|
/// spanning tree with |s_v| = |c_uv| / |s_u|. Unreachable workers get 0.
SkillVector propagate_magnitudes(int anchor, double anchor_magnitude,
                                 const CorrelationEstimate& corr, const InteractionGraph& graph);

}  // namespace crowdrank
