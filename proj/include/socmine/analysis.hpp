#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "socmine/petri_net.hpp"
#include "socmine/stochastic.hpp"

namespace socmine {

class MeasureError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// |F| / (|V| (|V| - 1)) over places and transitions.
double density(const PetriNet &net);

/// Longest directed shortest path, in arcs, over reachable ordered pairs.
std::size_t diameter(const PetriNet &net);

/// Row-stochastic matrix in compressed sparse rows.
struct MarkovChain {
  struct Entry {
    std::size_t to;
    double probability;
  };
  /// Reachability-graph state index of each chain state; chain state 0 is the
  /// initial marking.
  std::vector<std::size_t> states;
  std::vector<std::vector<Entry>> rows;
  std::optional<std::vector<double>> stationary;

  std::size_t size() const { return rows.size(); }
  /// Number of closure edges added from end states back to the initial state.
  std::size_t closure_edges = 0;

  static MarkovChain from_dense(const std::vector<std::vector<double>> &matrix);
};

class ChainError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Transition frequencies of replayed firing sequences over the reachability
/// graph. Unvisited states are dropped; visited states without outgoing
/// traversals get a probability-1 edge back to the initial state.
MarkovChain build_markov_chain(const ReachabilityGraph &rg, const std::vector<ReplayResult> &replays);

class ConvergenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

constexpr double default_stationary_tol = 1e-10;
constexpr std::size_t default_max_iterations = 100'000;

/// Power iteration on (P + I) / 2 until ||mu P - mu||_1 <= tol. Throws
/// ChainError for rows that do not sum to 1 and ConvergenceError when the
/// chain has several closed classes or does not converge.
std::vector<double> stationary_distribution(const MarkovChain &mc, double tol = default_stationary_tol,
                                            std::size_t max_iterations = default_max_iterations);

/// -sum_i mu_i sum_j P_ij log P_ij; the stationary distribution is computed
/// when the chain does not carry one.
double ks_entropy(const MarkovChain &mc, double log_base = 0.0 /* natural */);

struct KsResult {
  double statistic;
  double p_value;
};

/// Two-sample Kolmogorov-Smirnov test with the asymptotic p-value.
KsResult ks_two_sample(std::span<const double> a, std::span<const double> b);

/// Kolmogorov survival function Q(lambda) = 2 sum_{k>=1} (-1)^(k-1) exp(-2 k^2 lambda^2).
double kolmogorov_q(double lambda);

} // namespace socmine
