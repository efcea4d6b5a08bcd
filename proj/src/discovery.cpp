#include "socmine/discovery.hpp"

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace socmine {

// ---------------------------------------------------------------------------
// ProcessTree text form

namespace {

const char *operator_symbol(ProcessTree::Kind kind) {
  switch (kind) {
  case ProcessTree::Kind::sequence:
    return "->";
  case ProcessTree::Kind::exclusive_choice:
    return "X";
  case ProcessTree::Kind::parallel:
    return "/\\";
  case ProcessTree::Kind::loop:
    return "*";
  default:
    return "";
  }
}

bool needs_quotes(const std::string &name) {
  if (name.empty() || name == "tau" || name == "X" || name == "*" || name.rfind("->", 0) == 0 ||
      name.rfind("/\\", 0) == 0)
    return true;
  return name.find_first_of("(),\" \t\r\n") != std::string::npos;
}

void write_tree(const ProcessTree &tree, std::string &out) {
  switch (tree.kind) {
  case ProcessTree::Kind::silent:
    out += "tau";
    return;
  case ProcessTree::Kind::activity:
    if (needs_quotes(tree.activity)) {
      out.push_back('"');
      for (char c : tree.activity) {
        if (c == '"' || c == '\\')
          out.push_back('\\');
        out.push_back(c);
      }
      out.push_back('"');
    } else {
      out += tree.activity;
    }
    return;
  default:
    out += operator_symbol(tree.kind);
    out.push_back('(');
    for (std::size_t i = 0; i < tree.children.size(); ++i) {
      if (i > 0)
        out += ", ";
      write_tree(tree.children[i], out);
    }
    out.push_back(')');
  }
}

class TreeParser {
public:
  explicit TreeParser(const std::string &text) : s_(text) {}

  ProcessTree parse() {
    auto tree = node();
    skip_ws();
    if (pos_ != s_.size())
      fail("trailing input");
    return tree;
  }

private:
  [[noreturn]] void fail(const std::string &what) const {
    throw std::invalid_argument("process tree text, offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
      ++pos_;
  }

  bool consume(std::string_view token) {
    if (s_.compare(pos_, token.size(), token) == 0) {
      pos_ += token.size();
      return true;
    }
    return false;
  }

  ProcessTree node() {
    skip_ws();
    for (const auto kind : {ProcessTree::Kind::sequence, ProcessTree::Kind::exclusive_choice,
                            ProcessTree::Kind::parallel, ProcessTree::Kind::loop}) {
      const std::string_view sym = operator_symbol(kind);
      if (s_.compare(pos_, sym.size(), sym) == 0 && pos_ + sym.size() < s_.size() && s_[pos_ + sym.size()] == '(') {
        pos_ += sym.size() + 1;
        std::vector<ProcessTree> children;
        while (true) {
          children.push_back(node());
          skip_ws();
          if (consume(","))
            continue;
          if (consume(")"))
            break;
          fail("expected ',' or ')'");
        }
        return ProcessTree::node(kind, std::move(children));
      }
    }
    if (pos_ < s_.size() && s_[pos_] == '"') {
      ++pos_;
      std::string name;
      while (pos_ < s_.size() && s_[pos_] != '"') {
        if (s_[pos_] == '\\' && pos_ + 1 < s_.size())
          ++pos_;
        name.push_back(s_[pos_++]);
      }
      if (!consume("\""))
        fail("unterminated quoted activity");
      return ProcessTree::leaf(std::move(name));
    }
    const auto start = pos_;
    while (pos_ < s_.size() && std::string_view("(),\" \t\r\n").find(s_[pos_]) == std::string_view::npos)
      ++pos_;
    if (pos_ == start)
      fail("expected a node");
    const auto name = s_.substr(start, pos_ - start);
    return name == "tau" ? ProcessTree::tau() : ProcessTree::leaf(name);
  }

  const std::string &s_;
  std::size_t pos_ = 0;
};

} // namespace

ProcessTree ProcessTree::leaf(std::string activity) {
  ProcessTree t;
  t.kind = Kind::activity;
  t.activity = std::move(activity);
  return t;
}

ProcessTree ProcessTree::tau() { return ProcessTree{}; }

ProcessTree ProcessTree::node(Kind kind, std::vector<ProcessTree> children) {
  if (kind == Kind::activity || kind == Kind::silent)
    throw std::invalid_argument("ProcessTree::node: leaf kind given to an operator");
  if (children.size() < 2)
    throw std::invalid_argument("ProcessTree::node: operators need at least two children");
  ProcessTree t;
  t.kind = kind;
  t.children = std::move(children);
  return t;
}

std::string ProcessTree::to_string() const {
  std::string out;
  write_tree(*this, out);
  return out;
}

ProcessTree parse_process_tree(const std::string &text) { return TreeParser(text).parse(); }

// ---------------------------------------------------------------------------
// Integer-coded logs and DFGs used by the miner

namespace {

using Act = std::uint32_t;
using ITrace = std::vector<Act>;
using ILog = std::vector<ITrace>;

struct IDfg {
  std::map<std::pair<Act, Act>, std::uint64_t> edges;
  std::map<Act, std::uint64_t> starts;
  std::map<Act, std::uint64_t> ends;
};

using IWitnesses = std::map<Act, std::set<Act>>;

struct ICut {
  Cut::Kind kind;
  std::vector<std::vector<Act>> blocks; // each sorted ascending
};

IDfg build_idfg(const ILog &log) {
  IDfg dfg;
  for (const auto &trace : log) {
    if (trace.empty())
      continue;
    ++dfg.starts[trace.front()];
    ++dfg.ends[trace.back()];
    for (std::size_t i = 1; i < trace.size(); ++i)
      ++dfg.edges[{trace[i - 1], trace[i]}];
  }
  return dfg;
}

IDfg filter_idfg(const IDfg &dfg, double threshold) {
  if (threshold <= 0.0)
    return dfg;
  std::map<Act, std::uint64_t> max_out;
  for (const auto &[edge, count] : dfg.edges)
    max_out[edge.first] = std::max(max_out[edge.first], count);
  IDfg out;
  for (const auto &[edge, count] : dfg.edges)
    if (static_cast<double>(count) >= threshold * static_cast<double>(max_out[edge.first]))
      out.edges.emplace(edge, count);
  auto filter_counts = [&](const std::map<Act, std::uint64_t> &in, std::map<Act, std::uint64_t> &dst) {
    std::uint64_t max = 0;
    for (const auto &[a, c] : in)
      max = std::max(max, c);
    for (const auto &[a, c] : in)
      if (static_cast<double>(c) >= threshold * static_cast<double>(max))
        dst.emplace(a, c);
  };
  filter_counts(dfg.starts, out.starts);
  filter_counts(dfg.ends, out.ends);
  return out;
}

IWitnesses witnesses_of(const ILog &log) {
  std::map<Act, std::size_t> best;
  IWitnesses witnesses;
  for (const auto &trace : log) {
    std::unordered_map<Act, std::size_t> last;
    for (std::size_t i = 0; i < trace.size(); ++i) {
      const auto a = trace[i];
      if (const auto it = last.find(a); it != last.end()) {
        const auto distance = i - it->second - 1;
        const auto b = best.find(a);
        if (b == best.end() || distance < b->second) {
          best[a] = distance;
          witnesses[a].clear();
        }
        if (best[a] == distance)
          witnesses[a].insert(trace.begin() + static_cast<std::ptrdiff_t>(it->second) + 1,
                              trace.begin() + static_cast<std::ptrdiff_t>(i));
      }
      last[a] = i;
    }
  }
  return witnesses;
}

class UnionFind {
public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // the smaller root wins so group representatives are deterministic
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b)
      return;
    if (b < a)
      std::swap(a, b);
    parent_[b] = a;
  }
  /// Groups of members, each ascending, ordered by smallest member.
  std::vector<std::vector<std::size_t>> groups() {
    std::vector<std::vector<std::size_t>> out;
    std::vector<std::size_t> slot(parent_.size(), SIZE_MAX);
    for (std::size_t i = 0; i < parent_.size(); ++i) {
      const auto r = find(i);
      if (slot[r] == SIZE_MAX) {
        slot[r] = out.size();
        out.emplace_back();
      }
      out[slot[r]].push_back(i);
    }
    return out;
  }

private:
  std::vector<std::size_t> parent_;
};

class Bitset {
public:
  explicit Bitset(std::size_t n = 0) : words_((n + 63) / 64) {}
  void set(std::size_t i) { words_[i / 64] |= std::uint64_t{1} << (i % 64); }
  bool test(std::size_t i) const { return (words_[i / 64] >> (i % 64)) & 1u; }
  Bitset &operator|=(const Bitset &o) {
    for (std::size_t w = 0; w < words_.size(); ++w)
      words_[w] |= o.words_[w];
    return *this;
  }
  std::size_t count() const {
    std::size_t n = 0;
    for (const auto w : words_)
      n += static_cast<std::size_t>(__builtin_popcountll(w));
    return n;
  }

private:
  std::vector<std::uint64_t> words_;
};

// DFG restricted to an alphabet, with nodes renumbered 0..n-1 in alphabet order.
struct LocalGraph {
  std::vector<Act> acts;
  std::vector<std::vector<std::size_t>> succ, pred;
  std::vector<bool> start, end;
  std::unordered_set<std::uint64_t> edge_keys;

  LocalGraph(const IDfg &dfg, const std::vector<Act> &alphabet) : acts(alphabet) {
    const auto n = acts.size();
    succ.resize(n);
    pred.resize(n);
    start.assign(n, false);
    end.assign(n, false);
    std::unordered_map<Act, std::size_t> local;
    for (std::size_t i = 0; i < n; ++i)
      local.emplace(acts[i], i);
    for (const auto &[edge, count] : dfg.edges) {
      const auto a = local.find(edge.first);
      const auto b = local.find(edge.second);
      if (a == local.end() || b == local.end())
        continue;
      succ[a->second].push_back(b->second);
      pred[b->second].push_back(a->second);
      edge_keys.insert(key(a->second, b->second));
    }
    for (const auto &[a, count] : dfg.starts)
      if (const auto it = local.find(a); it != local.end())
        start[it->second] = true;
    for (const auto &[a, count] : dfg.ends)
      if (const auto it = local.find(a); it != local.end())
        end[it->second] = true;
  }

  std::size_t size() const { return acts.size(); }
  std::uint64_t key(std::size_t a, std::size_t b) const { return static_cast<std::uint64_t>(a) * acts.size() + b; }
  bool has_edge(std::size_t a, std::size_t b) const { return edge_keys.count(key(a, b)) != 0; }

  std::vector<Act> to_acts(const std::vector<std::size_t> &members) const {
    std::vector<Act> out;
    out.reserve(members.size());
    for (const auto m : members)
      out.push_back(acts[m]);
    std::sort(out.begin(), out.end());
    return out;
  }
};

std::optional<ICut> xor_cut(const LocalGraph &g) {
  UnionFind uf(g.size());
  for (std::size_t a = 0; a < g.size(); ++a)
    for (const auto b : g.succ[a])
      uf.unite(a, b);
  auto groups = uf.groups();
  if (groups.size() < 2)
    return std::nullopt;
  ICut cut{Cut::Kind::exclusive_choice, {}};
  for (const auto &grp : groups)
    cut.blocks.push_back(g.to_acts(grp));
  return cut;
}

// Tarjan's algorithm, iterative. Components are numbered in reverse
// topological order: an edge between components always points to a lower id.
std::vector<std::size_t> strongly_connected(const LocalGraph &g, std::size_t &component_count) {
  const auto n = g.size();
  constexpr auto unset = SIZE_MAX;
  std::vector<std::size_t> idx(n, unset), low(n, 0), comp(n, unset);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::pair<std::size_t, std::size_t>> call; // (node, next successor position)
  std::size_t counter = 0;
  component_count = 0;
  for (std::size_t root = 0; root < n; ++root) {
    if (idx[root] != unset)
      continue;
    call.push_back({root, 0});
    idx[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = true;
    while (!call.empty()) {
      auto &[v, pos] = call.back();
      if (pos < g.succ[v].size()) {
        const auto w = g.succ[v][pos++];
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
          comp[w] = component_count;
          if (w == v)
            break;
        }
        ++component_count;
      }
      const auto finished = v;
      call.pop_back();
      if (!call.empty())
        low[call.back().first] = std::min(low[call.back().first], low[finished]);
    }
  }
  return comp;
}

std::optional<ICut> sequence_cut(const LocalGraph &g) {
  std::size_t sccs = 0;
  const auto comp = strongly_connected(g, sccs);
  if (sccs < 2)
    return std::nullopt;

  std::vector<std::vector<std::size_t>> comp_succ(sccs);
  for (std::size_t a = 0; a < g.size(); ++a)
    for (const auto b : g.succ[a])
      if (comp[a] != comp[b])
        comp_succ[comp[a]].push_back(comp[b]);
  // successors have lower ids, so ascending order is a valid evaluation order
  std::vector<Bitset> reach(sccs, Bitset(sccs));
  for (std::size_t c = 0; c < sccs; ++c) {
    reach[c].set(c);
    for (const auto d : comp_succ[c])
      reach[c] |= reach[d];
  }

  UnionFind uf(sccs);
  for (std::size_t a = 0; a < sccs; ++a)
    for (std::size_t b = a + 1; b < sccs; ++b)
      if (!reach[a].test(b) && !reach[b].test(a))
        uf.unite(a, b);
  const auto groups = uf.groups();
  if (groups.size() < 2)
    return std::nullopt;

  struct Block {
    std::vector<std::size_t> comps;
    std::size_t reach_count;
    Act min_act;
  };
  std::vector<Block> blocks;
  std::vector<std::vector<std::size_t>> members(sccs);
  for (std::size_t a = 0; a < g.size(); ++a)
    members[comp[a]].push_back(a);
  for (const auto &grp : groups) {
    Bitset r(sccs);
    Act min_act = std::numeric_limits<Act>::max();
    for (const auto c : grp) {
      r |= reach[c];
      for (const auto a : members[c])
        min_act = std::min(min_act, g.acts[a]);
    }
    blocks.push_back({grp, r.count(), min_act});
  }
  std::sort(blocks.begin(), blocks.end(), [](const Block &a, const Block &b) {
    return a.reach_count != b.reach_count ? a.reach_count > b.reach_count : a.min_act < b.min_act;
  });
  for (std::size_t i = 0; i < blocks.size(); ++i)
    for (std::size_t j = i + 1; j < blocks.size(); ++j)
      for (const auto a : blocks[i].comps)
        for (const auto b : blocks[j].comps)
          if (!reach[a].test(b) || reach[b].test(a))
            return std::nullopt;

  ICut cut{Cut::Kind::sequence, {}};
  for (const auto &block : blocks) {
    std::vector<std::size_t> nodes;
    for (const auto c : block.comps)
      nodes.insert(nodes.end(), members[c].begin(), members[c].end());
    cut.blocks.push_back(g.to_acts(nodes));
  }
  return cut;
}

std::optional<ICut> parallel_cut(const LocalGraph &g, const IWitnesses *witnesses) {
  const auto n = g.size();
  UnionFind uf(n);
  // components of the complement of the "connected both ways" relation
  std::vector<std::size_t> remaining(n);
  std::iota(remaining.begin(), remaining.end(), 0);
  std::vector<std::size_t> frontier;
  while (!remaining.empty()) {
    const auto seed = remaining.front();
    remaining.erase(remaining.begin());
    frontier.push_back(seed);
    while (!frontier.empty()) {
      const auto u = frontier.back();
      frontier.pop_back();
      std::vector<std::size_t> keep;
      for (const auto v : remaining) {
        if (g.has_edge(u, v) && g.has_edge(v, u)) {
          keep.push_back(v);
        } else {
          uf.unite(u, v);
          frontier.push_back(v);
        }
      }
      remaining.swap(keep);
    }
  }
  if (witnesses) {
    std::unordered_map<Act, std::size_t> local;
    for (std::size_t i = 0; i < n; ++i)
      local.emplace(g.acts[i], i);
    for (const auto &[a, ws] : *witnesses) {
      const auto la = local.find(a);
      if (la == local.end())
        continue;
      for (const auto w : ws)
        if (const auto lw = local.find(w); lw != local.end())
          uf.unite(la->second, lw->second);
    }
  }
  auto groups = uf.groups();
  auto complete = [&](const std::vector<std::size_t> &grp) {
    bool has_start = false, has_end = false;
    for (const auto a : grp) {
      has_start = has_start || g.start[a];
      has_end = has_end || g.end[a];
    }
    return has_start && has_end;
  };
  // a block without a start or end activity cannot run on its own; fold it into a neighbour
  while (groups.size() > 1) {
    const auto it = std::find_if_not(groups.begin(), groups.end(), complete);
    if (it == groups.end())
      break;
    const auto i = static_cast<std::size_t>(it - groups.begin());
    const auto j = i + 1 < groups.size() ? i + 1 : i - 1;
    groups[j].insert(groups[j].end(), groups[i].begin(), groups[i].end());
    std::sort(groups[j].begin(), groups[j].end());
    groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(i));
  }
  if (groups.size() < 2)
    return std::nullopt;
  ICut cut{Cut::Kind::parallel, {}};
  for (const auto &grp : groups)
    cut.blocks.push_back(g.to_acts(grp));
  return cut;
}

std::optional<ICut> loop_cut(const LocalGraph &g) {
  const auto n = g.size();
  std::vector<std::size_t> starts, ends;
  for (std::size_t a = 0; a < n; ++a) {
    if (g.start[a])
      starts.push_back(a);
    if (g.end[a])
      ends.push_back(a);
  }
  if (starts.empty() || ends.empty())
    return std::nullopt;
  std::vector<bool> body(n, false);
  for (std::size_t a = 0; a < n; ++a)
    body[a] = g.start[a] || g.end[a];

  UnionFind uf(n);
  for (std::size_t a = 0; a < n; ++a)
    if (!body[a])
      for (const auto b : g.succ[a])
        if (!body[b])
          uf.unite(a, b);
  std::vector<std::vector<std::size_t>> redo;
  std::vector<std::size_t> body_nodes;
  for (std::size_t a = 0; a < n; ++a)
    if (body[a])
      body_nodes.push_back(a);
  for (auto &grp : uf.groups()) {
    if (body[grp.front()])
      continue;
    bool from_end = false, to_start = false, is_redo = true;
    for (const auto c : grp) {
      bool entered_from_end = false, exits_to_start = false;
      for (const auto b : g.pred[c]) {
        if (!body[b])
          continue;
        if (!g.end[b])
          is_redo = false; // entered from the middle of the body
        else
          entered_from_end = true;
      }
      for (const auto b : g.succ[c]) {
        if (!body[b])
          continue;
        if (!g.start[b])
          is_redo = false; // jumps back into the middle of the body
        else
          exits_to_start = true;
      }
      if (entered_from_end)
        for (const auto e : ends)
          is_redo = is_redo && g.has_edge(e, c);
      if (exits_to_start)
        for (const auto s : starts)
          is_redo = is_redo && g.has_edge(c, s);
      from_end = from_end || entered_from_end;
      to_start = to_start || exits_to_start;
    }
    if (is_redo && from_end && to_start)
      redo.push_back(std::move(grp));
    else
      body_nodes.insert(body_nodes.end(), grp.begin(), grp.end());
  }
  if (redo.empty())
    return std::nullopt;
  ICut cut{Cut::Kind::loop, {g.to_acts(body_nodes)}};
  for (const auto &grp : redo)
    cut.blocks.push_back(g.to_acts(grp));
  return cut;
}

std::optional<ICut> find_icut(const IDfg &dfg, const std::vector<Act> &alphabet, const IWitnesses *witnesses) {
  if (alphabet.size() < 2)
    return std::nullopt;
  const LocalGraph g(dfg, alphabet);
  if (auto cut = xor_cut(g))
    return cut;
  if (auto cut = sequence_cut(g))
    return cut;
  if (auto cut = parallel_cut(g, witnesses))
    return cut;
  return loop_cut(g);
}

// ---------------------------------------------------------------------------
// Log splitting

std::unordered_map<Act, std::size_t> block_index(const ICut &cut) {
  std::unordered_map<Act, std::size_t> out;
  for (std::size_t b = 0; b < cut.blocks.size(); ++b)
    for (const auto a : cut.blocks[b])
      out.emplace(a, b);
  return out;
}

std::vector<ILog> split_log(const ILog &log, const ICut &cut) {
  const auto k = cut.blocks.size();
  const auto where = block_index(cut);
  // activities outside every block were filtered out of the DFG as noise
  auto block_of = [&](Act a) -> std::size_t {
    const auto it = where.find(a);
    return it == where.end() ? SIZE_MAX : it->second;
  };
  std::vector<ILog> out(k);
  switch (cut.kind) {
  case Cut::Kind::exclusive_choice:
    for (const auto &trace : log) {
      std::vector<std::size_t> counts(k, 0);
      for (const auto a : trace)
        if (const auto b = block_of(a); b != SIZE_MAX)
          ++counts[b];
      const auto best = static_cast<std::size_t>(std::max_element(counts.begin(), counts.end()) - counts.begin());
      ITrace sub;
      for (const auto a : trace)
        if (block_of(a) == best)
          sub.push_back(a);
      out[best].push_back(std::move(sub));
    }
    break;
  case Cut::Kind::sequence:
    for (const auto &trace : log) {
      std::size_t pos = 0;
      for (std::size_t b = 0; b < k; ++b) {
        ITrace sub;
        // the segment for block b runs until the first event of a later block
        while (pos < trace.size()) {
          const auto blk = block_of(trace[pos]);
          if (b + 1 < k && blk != SIZE_MAX && blk > b)
            break;
          if (blk == b)
            sub.push_back(trace[pos]);
          ++pos;
        }
        out[b].push_back(std::move(sub));
      }
    }
    break;
  case Cut::Kind::parallel:
    for (const auto &trace : log) {
      std::vector<ITrace> subs(k);
      for (const auto a : trace)
        if (const auto b = block_of(a); b != SIZE_MAX)
          subs[b].push_back(a);
      for (std::size_t b = 0; b < k; ++b)
        out[b].push_back(std::move(subs[b]));
    }
    break;
  case Cut::Kind::loop:
    for (const auto &trace : log) {
      // maximal runs of one block; body runs alternate with redo runs
      std::size_t current = SIZE_MAX;
      ITrace run;
      bool expect_body = true;
      auto flush = [&] {
        if (current == SIZE_MAX)
          return;
        if (current == 0) {
          out[0].push_back(std::move(run));
          expect_body = false;
        } else {
          if (expect_body)
            out[0].push_back({});
          out[current].push_back(std::move(run));
          expect_body = true;
        }
        run.clear();
      };
      for (const auto a : trace) {
        const auto b = block_of(a);
        if (b == SIZE_MAX)
          continue;
        if (b != current) {
          flush();
          current = b;
        }
        run.push_back(a);
      }
      flush();
      if (expect_body)
        out[0].push_back({});
    }
    break;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Recursive discovery

class Miner {
public:
  Miner(std::vector<std::string> names, double threshold) : names_(std::move(names)), threshold_(threshold) {}

  ProcessTree mine(ILog log, bool root = false) const {
    if (log.empty())
      return ProcessTree::tau();
    const auto empties = static_cast<std::size_t>(
        std::count_if(log.begin(), log.end(), [](const ITrace &t) { return t.empty(); }));
    if (empties == log.size())
      return ProcessTree::tau();
    if (empties > 0) {
      ILog rest;
      rest.reserve(log.size() - empties);
      for (auto &t : log)
        if (!t.empty())
          rest.push_back(std::move(t));
      // empty input traces always stay; empty sub-traces below the threshold are noise
      if (!root && threshold_ > 0.0 && static_cast<double>(empties) < threshold_ * static_cast<double>(log.size()))
        return mine(std::move(rest));
      return ProcessTree::node(ProcessTree::Kind::exclusive_choice, {ProcessTree::tau(), mine(std::move(rest))});
    }

    std::vector<Act> alphabet;
    for (const auto &t : log)
      alphabet.insert(alphabet.end(), t.begin(), t.end());
    std::sort(alphabet.begin(), alphabet.end());
    alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());

    if (alphabet.size() == 1) {
      auto leaf = ProcessTree::leaf(names_[alphabet.front()]);
      const bool once = std::all_of(log.begin(), log.end(), [](const ITrace &t) { return t.size() == 1; });
      if (once)
        return leaf;
      return ProcessTree::node(ProcessTree::Kind::loop, {std::move(leaf), ProcessTree::tau()});
    }

    const auto dfg = filter_idfg(build_idfg(log), threshold_);
    const auto witnesses = witnesses_of(log);
    const auto cut = find_icut(dfg, alphabet, &witnesses);
    if (!cut) {
      std::vector<ProcessTree> children{ProcessTree::tau()};
      for (const auto a : alphabet)
        children.push_back(ProcessTree::leaf(names_[a]));
      return ProcessTree::node(ProcessTree::Kind::loop, std::move(children));
    }

    auto sublogs = split_log(log, *cut);
    log.clear();
    std::vector<ProcessTree> children;
    children.reserve(sublogs.size());
    for (auto &sub : sublogs)
      children.push_back(mine(std::move(sub)));
    ProcessTree::Kind kind{};
    switch (cut->kind) {
    case Cut::Kind::exclusive_choice:
      kind = ProcessTree::Kind::exclusive_choice;
      break;
    case Cut::Kind::sequence:
      kind = ProcessTree::Kind::sequence;
      break;
    case Cut::Kind::parallel:
      kind = ProcessTree::Kind::parallel;
      break;
    case Cut::Kind::loop:
      kind = ProcessTree::Kind::loop;
      break;
    }
    return ProcessTree::node(kind, std::move(children));
  }

private:
  std::vector<std::string> names_;
  double threshold_;
};

// Shared string <-> id table; ids follow lexicographic order.
struct Alphabet {
  std::vector<std::string> names;
  std::unordered_map<std::string, Act> ids;

  explicit Alphabet(const std::set<std::string> &activities) : names(activities.begin(), activities.end()) {
    for (Act i = 0; i < names.size(); ++i)
      ids.emplace(names[i], i);
  }
  Act id(const std::string &name) const { return ids.at(name); }
};

} // namespace

SelfDistanceWitnesses self_distance_witnesses(const EventLog &log) {
  const Alphabet alpha(log.activities());
  ILog ilog;
  for (const auto &trace : log.traces) {
    ITrace t;
    for (const auto &e : trace.events)
      t.push_back(alpha.id(e.activity));
    ilog.push_back(std::move(t));
  }
  SelfDistanceWitnesses out;
  for (const auto &[a, ws] : witnesses_of(ilog)) {
    auto &dst = out[alpha.names[a]];
    for (const auto w : ws)
      dst.insert(alpha.names[w]);
  }
  return out;
}

Dfg filter_dfg(const Dfg &dfg, double threshold) {
  if (threshold < 0.0 || threshold > 1.0)
    throw std::invalid_argument("filter_dfg: threshold must lie in [0,1]");
  const Alphabet alpha(dfg.activities());
  IDfg in;
  for (const auto &[edge, c] : dfg.edges)
    in.edges.emplace(std::pair{alpha.id(edge.first), alpha.id(edge.second)}, c);
  for (const auto &[a, c] : dfg.starts)
    in.starts.emplace(alpha.id(a), c);
  for (const auto &[a, c] : dfg.ends)
    in.ends.emplace(alpha.id(a), c);
  const auto filtered = filter_idfg(in, threshold);
  Dfg out;
  for (const auto &[edge, c] : filtered.edges)
    out.edges.emplace(std::pair{alpha.names[edge.first], alpha.names[edge.second]}, c);
  for (const auto &[a, c] : filtered.starts)
    out.starts.emplace(alpha.names[a], c);
  for (const auto &[a, c] : filtered.ends)
    out.ends.emplace(alpha.names[a], c);
  return out;
}

std::optional<Cut> find_cut(const Dfg &dfg, const std::set<std::string> &alphabet,
                            const SelfDistanceWitnesses *witnesses) {
  auto all = dfg.activities();
  all.insert(alphabet.begin(), alphabet.end());
  if (witnesses)
    for (const auto &[a, ws] : *witnesses) {
      all.insert(a);
      all.insert(ws.begin(), ws.end());
    }
  const Alphabet alpha(all);
  IDfg in;
  for (const auto &[edge, c] : dfg.edges)
    in.edges.emplace(std::pair{alpha.id(edge.first), alpha.id(edge.second)}, c);
  for (const auto &[a, c] : dfg.starts)
    in.starts.emplace(alpha.id(a), c);
  for (const auto &[a, c] : dfg.ends)
    in.ends.emplace(alpha.id(a), c);
  std::vector<Act> ialphabet;
  for (const auto &a : alphabet)
    ialphabet.push_back(alpha.id(a));
  std::sort(ialphabet.begin(), ialphabet.end());
  IWitnesses iw;
  if (witnesses)
    for (const auto &[a, ws] : *witnesses)
      for (const auto &w : ws)
        iw[alpha.id(a)].insert(alpha.id(w));
  const auto cut = find_icut(in, ialphabet, witnesses ? &iw : nullptr);
  if (!cut)
    return std::nullopt;
  Cut out{cut->kind, {}};
  for (const auto &block : cut->blocks) {
    std::set<std::string> names;
    for (const auto a : block)
      names.insert(alpha.names[a]);
    out.blocks.push_back(std::move(names));
  }
  return out;
}

ProcessTree discover_tree(const EventLog &log, double threshold) {
  if (threshold < 0.0 || threshold > 1.0)
    throw std::invalid_argument("discover_tree: threshold must lie in [0,1]");
  const Alphabet alpha(log.activities());
  ILog ilog;
  ilog.reserve(log.traces.size());
  for (const auto &trace : log.traces) {
    ITrace t;
    t.reserve(trace.events.size());
    for (const auto &e : trace.events)
      t.push_back(alpha.id(e.activity));
    ilog.push_back(std::move(t));
  }
  return Miner(alpha.names, threshold).mine(std::move(ilog), true);
}

// ---------------------------------------------------------------------------
// Tree to net

namespace {

class NetBuilder {
public:
  PetriNet build(const ProcessTree &tree) {
    const auto source = place(1);
    const auto sink = place(0);
    add(tree, source, sink);
    return std::move(net_);
  }

private:
  PlaceId place(std::uint32_t tokens = 0) { return net_.add_place("p" + std::to_string(net_.place_count()), tokens); }
  TransitionId transition(std::optional<std::string> label) {
    return net_.add_transition("t" + std::to_string(net_.transition_count()), std::move(label));
  }
  void arc(PlaceId p, TransitionId t) { net_.add_arc(p, t); }
  void arc(TransitionId t, PlaceId p) { net_.add_arc(t, p); }

  void add(const ProcessTree &tree, PlaceId in, PlaceId out) {
    using K = ProcessTree::Kind;
    switch (tree.kind) {
    case K::activity:
    case K::silent: {
      const auto t = transition(tree.kind == K::activity ? std::optional{tree.activity} : std::nullopt);
      arc(in, t);
      arc(t, out);
      break;
    }
    case K::sequence: {
      auto from = in;
      for (std::size_t i = 0; i < tree.children.size(); ++i) {
        const auto to = i + 1 == tree.children.size() ? out : place();
        add(tree.children[i], from, to);
        from = to;
      }
      break;
    }
    case K::exclusive_choice:
      for (const auto &child : tree.children)
        add(child, in, out);
      break;
    case K::parallel: {
      const auto split = transition(std::nullopt);
      arc(in, split);
      std::vector<PlaceId> ends;
      for (const auto &child : tree.children) {
        const auto a = place();
        const auto b = place();
        arc(split, a);
        add(child, a, b);
        ends.push_back(b);
      }
      const auto join = transition(std::nullopt);
      for (const auto b : ends)
        arc(b, join);
      arc(join, out);
      break;
    }
    case K::loop: {
      const auto entry = transition(std::nullopt);
      const auto loop_start = place();
      const auto loop_end = place();
      arc(in, entry);
      arc(entry, loop_start);
      add(tree.children.front(), loop_start, loop_end);
      for (std::size_t i = 1; i < tree.children.size(); ++i)
        add(tree.children[i], loop_end, loop_start);
      const auto exit = transition(std::nullopt);
      arc(loop_end, exit);
      arc(exit, out);
      break;
    }
    }
  }

  PetriNet net_;
};

} // namespace

PetriNet tree_to_net(const ProcessTree &tree) { return NetBuilder{}.build(tree); }

// ---------------------------------------------------------------------------
// Silent-transition reduction

PetriNet reduce_silent(const PetriNet &net) {
  const auto np = net.place_count();
  const auto nt = net.transition_count();
  std::vector<bool> place_alive(np, true), trans_alive(nt, true);
  std::vector<std::set<std::size_t>> pre(nt), post(nt), producers(np), consumers(np);
  for (std::size_t t = 0; t < nt; ++t) {
    for (const auto p : net.preset(static_cast<TransitionId>(t))) {
      pre[t].insert(index(p));
      consumers[index(p)].insert(t);
    }
    for (const auto p : net.postset(static_cast<TransitionId>(t))) {
      post[t].insert(index(p));
      producers[index(p)].insert(t);
    }
  }
  auto silent = [&](std::size_t t) { return net.transitions()[t].silent(); };
  auto marked = [&](std::size_t p) { return net.places()[p].initial_tokens > 0; };

  bool changed = true;
  while (changed) {
    changed = false;
    // unconsumed places
    for (std::size_t p = 0; p < np; ++p) {
      if (!place_alive[p] || !consumers[p].empty() || marked(p))
        continue;
      for (const auto t : producers[p])
        post[t].erase(p);
      producers[p].clear();
      place_alive[p] = false;
      changed = true;
    }
    for (std::size_t t = 0; t < nt; ++t) {
      if (!trans_alive[t] || !silent(t))
        continue;
      // silent sinks: only consume from places that feed nothing else
      if (post[t].empty() && !pre[t].empty() &&
          std::all_of(pre[t].begin(), pre[t].end(), [&](std::size_t p) { return consumers[p].size() == 1; })) {
        for (const auto p : pre[t])
          consumers[p].erase(t);
        pre[t].clear();
        trans_alive[t] = false;
        changed = true;
        continue;
      }
      // fusion into the single producer of the single input place
      if (pre[t].size() != 1)
        continue;
      const auto p = *pre[t].begin();
      if (marked(p) || consumers[p].size() != 1 || producers[p].size() != 1)
        continue;
      const auto u = *producers[p].begin();
      if (u == t || std::any_of(post[t].begin(), post[t].end(), [&](std::size_t q) { return post[u].count(q) != 0; }))
        continue;
      post[u].erase(p);
      for (const auto q : post[t]) {
        post[u].insert(q);
        producers[q].erase(t);
        producers[q].insert(u);
      }
      post[t].clear();
      pre[t].clear();
      producers[p].clear();
      consumers[p].clear();
      place_alive[p] = false;
      trans_alive[t] = false;
      changed = true;
    }
  }

  PetriNet out;
  std::vector<PlaceId> pmap(np);
  std::vector<TransitionId> tmap(nt);
  for (std::size_t p = 0; p < np; ++p)
    if (place_alive[p])
      pmap[p] = out.add_place(net.places()[p].name, net.places()[p].initial_tokens);
  for (std::size_t t = 0; t < nt; ++t)
    if (trans_alive[t])
      tmap[t] = out.add_transition(net.transitions()[t].name, net.transitions()[t].label);
  for (std::size_t t = 0; t < nt; ++t) {
    if (!trans_alive[t])
      continue;
    for (const auto p : pre[t])
      out.add_arc(pmap[p], tmap[t]);
    for (const auto p : post[t])
      out.add_arc(tmap[t], pmap[p]);
  }
  return out;
}

} // namespace socmine
