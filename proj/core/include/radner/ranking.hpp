#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "radner/trajectory.hpp"

namespace radner {

/// One agent's realized trading target and initial stock endowment.
struct AgentSpec {
  double target = 0.0;
  double endowment = 0.0;

  /// Shares still to be acquired (negative: sold) relative to the endowment.
  double relative_target() const { return target - endowment; }
};

std::vector<double> relative_targets(std::span<const AgentSpec> agents);

/// How to resolve an Argmax with several maximizers. Any rule yields the
/// same drift; the choice only fixes which representative ordering is built.
enum class TieBreak {
  /// Largest lambda-free selection score (see fast_rank), then lowest index.
  /// Makes the permutation identical for every lambda.
  canonical,
  /// Lowest alphabetical index among the tied candidates.
  lowest_index,
  /// Highest alphabetical index among the tied candidates.
  highest_index,
};

/// Relative tolerance used when deciding that two candidates tie.
inline constexpr double kTieTolerance = 1e-10;

/// Rank-based ordering produced by the backward induction.
///
/// Every per-rank vector has num_agents + 1 entries and is indexed by the
/// rank j = 1..I; slot 0 is a sentinel (tau[0] = 0, the rest zero).
struct RankOrdering {
  int num_agents = 0;
  double lambda = 0.0;
  /// rank -> 0-based alphabetical agent index
  std::vector<std::size_t> agent;
  /// a^(j), relative target of the rank-j agent
  std::vector<double> a;
  /// theta^(j)_{0-}
  std::vector<double> endowment;
  /// a_Sigma^{>=j} = a^(j) + a_Sigma^{>=j+1}; entry I holds a^(I)
  std::vector<double> a_sigma_geq;
  /// A^(j) = a^(j) - a_Sigma^{>=j} / (I - j + 1); A^(I) = -A^(I-1)
  std::vector<double> A;
  /// stop-trade times, nondecreasing in j, tau[I-1] == tau[I] < T
  std::vector<double> tau;
  /// A^(j) F(tau^(j)) = c_j lambda whenever tau^(j) > 0; absent otherwise
  std::vector<std::optional<double>> c;
  /// Tail constant used at step j, sum_{k=j+1}^{I-2} A^(k) F(tau^(k)) / (I-k),
  /// from the c recursion (used) and from direct F evaluation (cross-check).
  std::vector<double> tail_const;
  std::vector<double> tail_const_direct;

  /// Alphabetical agent index for ranks 1..I, as a plain 0-based list.
  std::vector<std::size_t> permutation() const;
  /// Inverse map: agent index -> rank.
  std::vector<int> rank_of_agent() const;
};

/// Base-case stop time for the pair (a_i, a_l):
/// inf{t : |a_i - a_l| / 2 * F(t) <= lambda}.
double eta_base(double a_i, double a_l, double lambda, const TrajectoryModel& model);

struct BasePair {
  std::size_t first = 0;   ///< agent taking rank I-1
  std::size_t second = 0;  ///< agent taking rank I
  double tau = 0.0;
};

/// Selects the last two agents to stop trading. Throws SpecError for I < 2.
BasePair base_case(std::span<const double> a, double lambda, const TrajectoryModel& model,
                   TieBreak tie_break = TieBreak::canonical);

/// Induction-step stop time for a candidate a_i at rank j (1 <= j <= I-2),
/// using the constant-tail reduction valid on [0, t_cap], t_cap = tau^(j+1).
/// tail_const must satisfy |tail_const| < lambda (InternalError otherwise).
double eta_step(double a_i, int rank, int num_agents, double a_sigma_tail, double tail_const, double lambda,
                const TrajectoryModel& model, double t_cap);

/// The expression inside |.| defining the induction step, evaluated without
/// the constant-tail reduction:
///   (a_i - a_Sigma^{>=j+1}/(I-j)) F(t) + sum_{k=j+1}^{I-2} A^(k)/(I-k) F(t v tau^(k)).
/// Reads ranks j+1..I from `ordering`.
double eta_full_expression(double a_i, int rank, const RankOrdering& ordering, const TrajectoryModel& model,
                           double t);

/// Full backward induction. Throws SpecError for I < 2 or non-finite input.
RankOrdering build_ordering(std::span<const AgentSpec> agents, double lambda, const TrajectoryModel& model,
                            TieBreak tie_break = TieBreak::canonical);

/// Builds the ordering for a fixed rank permutation (rank 1..I listed in
/// order), recomputing stop times and c constants for this lambda. The
/// permutation must be one the induction could select, e.g. fast_rank's.
RankOrdering ordering_from_permutation(std::span<const AgentSpec> agents, std::span<const std::size_t> permutation,
                                       double lambda, const TrajectoryModel& model);

/// Lambda-, kappa- and gamma-free rank selection: at every step picks the
/// agent maximizing (b)^+ / (1 - S) + (b)^- / (1 + S), where
/// b = a_i - a_Sigma^{>=j+1}/(I-j) and S = sum_{k>j} c_k/(I-k).
/// Returns agents in rank order 1..I.
std::vector<std::size_t> fast_rank(std::span<const double> a);

/// Selection score used by fast_rank and by the canonical tie-break.
double selection_score(double b, double tail_sum);

/// True when `permutation` orders the same agents as `ordering` within every
/// block of ranks sharing one stop time (within `tolerance`).
bool same_up_to_ties(const RankOrdering& ordering, std::span<const std::size_t> permutation,
                     double tolerance = 1e-10);

}  // namespace radner
