#include "socmine/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <queue>

namespace socmine {

double density(const PetriNet &net) {
  const auto v = static_cast<double>(net.node_count());
  if (net.node_count() < 2)
    throw MeasureError("density is undefined for fewer than two nodes");
  return static_cast<double>(net.arc_count()) / (v * (v - 1.0));
}

std::size_t diameter(const PetriNet &net) {
  if (net.arc_count() == 0)
    throw MeasureError("diameter is undefined for a net without arcs");
  // places are nodes [0, P), transitions [P, P + T)
  const auto np = net.place_count();
  const auto n = net.node_count();
  std::vector<std::vector<std::size_t>> succ(n);
  for (std::size_t t = 0; t < net.transition_count(); ++t) {
    const auto tid = static_cast<TransitionId>(t);
    for (const auto p : net.preset(tid))
      succ[index(p)].push_back(np + t);
    for (const auto p : net.postset(tid))
      succ[np + t].push_back(index(p));
  }
  std::size_t best = 0;
  std::vector<std::size_t> dist(n);
  std::vector<std::size_t> queue;
  queue.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    std::fill(dist.begin(), dist.end(), SIZE_MAX);
    dist[s] = 0;
    queue.clear();
    queue.push_back(s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const auto u = queue[head];
      for (const auto v : succ[u])
        if (dist[v] == SIZE_MAX) {
          dist[v] = dist[u] + 1;
          best = std::max(best, dist[v]);
          queue.push_back(v);
        }
    }
  }
  return best;
}

MarkovChain MarkovChain::from_dense(const std::vector<std::vector<double>> &matrix) {
  MarkovChain mc;
  mc.rows.resize(matrix.size());
  for (std::size_t i = 0; i < matrix.size(); ++i) {
    if (matrix[i].size() != matrix.size())
      throw ChainError("matrix is not square");
    mc.states.push_back(i);
    for (std::size_t j = 0; j < matrix.size(); ++j)
      if (matrix[i][j] != 0.0)
        mc.rows[i].push_back({j, matrix[i][j]});
  }
  return mc;
}

MarkovChain build_markov_chain(const ReachabilityGraph &rg, const std::vector<ReplayResult> &replays) {
  std::map<std::pair<std::size_t, std::size_t>, std::uint64_t> traversals;
  std::vector<bool> visited(rg.states.size(), false);
  std::size_t used = 0;
  if (!rg.states.empty())
    visited[0] = true;
  for (const auto &replay : replays) {
    if (!replay.conforming)
      continue;
    ++used;
    std::size_t state = 0;
    for (const auto &firing : replay.firings) {
      const auto next = rg.successor(state, firing.transition);
      if (!next)
        throw ChainError("replayed firing of transition " + std::to_string(index(firing.transition)) +
                         " has no edge in the reachability graph");
      ++traversals[{state, *next}];
      state = *next;
      visited[state] = true;
    }
  }
  if (used == 0)
    throw ChainError("no conforming replay to estimate transition frequencies from");

  MarkovChain mc;
  std::vector<std::size_t> chain_index(rg.states.size(), SIZE_MAX);
  for (std::size_t s = 0; s < rg.states.size(); ++s)
    if (visited[s]) {
      chain_index[s] = mc.states.size();
      mc.states.push_back(s);
    }
  mc.rows.resize(mc.states.size());
  std::vector<std::uint64_t> out_total(mc.states.size(), 0);
  for (const auto &[edge, count] : traversals)
    out_total[chain_index[edge.first]] += count;
  for (const auto &[edge, count] : traversals) {
    const auto from = chain_index[edge.first];
    mc.rows[from].push_back(
        {chain_index[edge.second], static_cast<double>(count) / static_cast<double>(out_total[from])});
  }
  // totally-connected closure
  for (std::size_t i = 0; i < mc.rows.size(); ++i)
    if (mc.rows[i].empty()) {
      mc.rows[i].push_back({0, 1.0});
      ++mc.closure_edges;
    }
  return mc;
}

namespace {

void validate_rows(const MarkovChain &mc) {
  for (std::size_t i = 0; i < mc.rows.size(); ++i) {
    double sum = 0;
    for (const auto &e : mc.rows[i]) {
      if (e.to >= mc.rows.size() || !(e.probability >= 0.0))
        throw ChainError("row " + std::to_string(i) + " has an invalid entry");
      sum += e.probability;
    }
    if (std::abs(sum - 1.0) > 1e-9)
      throw ChainError("row " + std::to_string(i) + " sums to " + std::to_string(sum) + ", not 1");
  }
}

// Closed communicating classes (bottom strongly connected components).
std::vector<std::vector<std::size_t>> closed_classes(const MarkovChain &mc) {
  const auto n = mc.rows.size();
  constexpr auto unset = SIZE_MAX;
  std::vector<std::size_t> idx(n, unset), low(n, 0), comp(n, unset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call;
  std::size_t counter = 0, comps = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (idx[root] != unset)
      continue;
    call.push_back({root, 0});
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto &[v, pos] = call.back();
      if (pos < mc.rows[v].size()) {
        const auto w = mc.rows[v][pos++].to;
        if (idx[w] == unset) {
          idx[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = true;
          call.push_back({w, 0});
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], idx[w]);
        }
        continue;
      }
      if (low[v] == idx[v]) {
        while (true) {
          const auto w = stack.back();
          stack.pop_back();
          on_stack[w] = false;
          comp[w] = comps;
          if (w == v)
            break;
        }
        ++comps;
      }
      const auto done = v;
      call.pop_back();
      if (!call.empty())
        low[call.back().first] = std::min(low[call.back().first], low[done]);
    }
  }
  std::vector<bool> has_exit(comps, false);
  for (std::size_t v = 0; v < n; ++v)
    for (const auto &e : mc.rows[v])
      if (e.probability > 0.0 && comp[e.to] != comp[v])
        has_exit[comp[v]] = true;
  std::vector<std::vector<std::size_t>> members(comps);
  for (std::size_t v = 0; v < n; ++v)
    members[comp[v]].push_back(v);
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t c = 0; c < comps; ++c)
    if (!has_exit[c])
      out.push_back(members[c]);
  std::sort(out.begin(), out.end());
  return out;
}

} // namespace

std::vector<double> stationary_distribution(const MarkovChain &mc, double tol, std::size_t max_iterations) {
  const auto n = mc.rows.size();
  if (n == 0)
    throw ChainError("empty Markov chain");
  validate_rows(mc);
  const auto classes = closed_classes(mc);
  if (classes.size() > 1) {
    std::string names;
    for (const auto &cls : classes) {
      names += names.empty() ? "{" : ", {";
      for (std::size_t i = 0; i < cls.size(); ++i)
        names += (i ? "," : "") + std::to_string(cls[i]);
      names += "}";
    }
    throw ConvergenceError("chain has " + std::to_string(classes.size()) + " closed classes: " + names);
  }

  std::vector<double> mu(n, 1.0 / static_cast<double>(n)), next(n);
  auto step = [&](const std::vector<double> &in, std::vector<double> &out) {
    std::fill(out.begin(), out.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
      for (const auto &e : mc.rows[i])
        out[e.to] += in[i] * e.probability;
  };
  for (std::size_t it = 0; it < max_iterations; ++it) {
    step(mu, next);
    double residual = 0;
    for (std::size_t i = 0; i < n; ++i)
      residual += std::abs(next[i] - mu[i]);
    if (residual <= tol)
      return mu;
    // lazy step: (mu + mu P) / 2 shares the fixed point and is aperiodic
    double total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      mu[i] = 0.5 * (mu[i] + next[i]);
      total += mu[i];
    }
    for (auto &x : mu)
      x /= total;
  }
  throw ConvergenceError("power iteration did not reach tolerance within " + std::to_string(max_iterations) +
                         " iterations");
}

double ks_entropy(const MarkovChain &mc, double log_base) {
  const auto mu = mc.stationary ? *mc.stationary : stationary_distribution(mc);
  const double scale = log_base > 0.0 ? 1.0 / std::log(log_base) : 1.0;
  double h = 0;
  for (std::size_t i = 0; i < mc.rows.size(); ++i) {
    double row = 0;
    for (const auto &e : mc.rows[i])
      if (e.probability > 0.0)
        row -= e.probability * std::log(e.probability);
    h += mu[i] * row;
  }
  return std::max(0.0, h * scale);
}

double kolmogorov_q(double lambda) {
  // alternating series; for small lambda it converges too slowly and Q -> 1
  constexpr double eps1 = 1e-6, eps2 = 1e-16;
  double sign = 2.0, sum = 0.0, previous = 0.0;
  const double a = -2.0 * lambda * lambda;
  for (int k = 1; k <= 100; ++k) {
    const double term = sign * std::exp(a * k * k);
    sum += term;
    if (std::abs(term) <= eps1 * previous || std::abs(term) <= eps2 * sum)
      return std::clamp(sum, 0.0, 1.0);
    sign = -sign;
    previous = std::abs(term);
  }
  return 1.0;
}

KsResult ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("ks_two_sample: both samples must be nonempty");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size()), m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] <= v)
      ++i;
    while (j < y.size() && y[j] <= v)
      ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  const double ne = n * m / (n + m);
  const double sq = std::sqrt(ne);
  const double lambda = (sq + 0.12 + 0.11 / sq) * d;
  return {d, kolmogorov_q(lambda)};
}

} // namespace socmine
