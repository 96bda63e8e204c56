#include "dsfm/flow.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace dsfm {

double exchange_capacity(const SubmodularPotential& pot, const BasePoint& x,
                         int u_pos, int v_pos, const PotSfmFn& sfm) {
  const int k = pot.arity();
  if (x.size() != k)
    fail(ErrorCategory::invalid_input, "point size != arity");
  if (u_pos < 0 || v_pos < 0 || u_pos >= k || v_pos >= k || u_pos == v_pos)
    fail(ErrorCategory::invalid_input, "bad arc positions");
  // Unit margins drive u into and v out of every exact minimizer; on the
  // forced family the objective reduces to f - x up to a constant.
  Eigen::VectorXd w = -x;
  const Mask full = pot.full_mask();
  w(u_pos) = -(pot.value(Mask(1) << u_pos) + 1.0);
  w(v_pos) = -(pot.value(full) - pot.value(full ^ (Mask(1) << v_pos)) - 1.0);
  std::pair<Mask, double> res;
  if (sfm) {
    res = sfm(pot, w);
  } else {
    res = brute_force_sfm(pot, w);
  }
  const Mask A = res.first;
  if (!((A >> u_pos) & 1) || ((A >> v_pos) & 1))
    fail(ErrorCategory::oracle_exactness,
         "exchange set violates the forced margins; inner minimizer inexact");
  double xa = 0;
  for (int p = 0; p < k; ++p)
    if ((A >> p) & 1) xa += x(p);
  return pot.value(A) - xa;
}

std::vector<int> minimal_tight_set(const SubmodularPotential& pot,
                                   const BasePoint& x, int u_pos, double tau) {
  const int k = pot.arity();
  if (k > 20)
    fail(ErrorCategory::capability, "tight-set scan limited to arity 20");
  if (x.size() != k)
    fail(ErrorCategory::invalid_input, "point size != arity");
  if (u_pos < 0 || u_pos >= k)
    fail(ErrorCategory::invalid_input, "position out of range");
  const Mask full = pot.full_mask();
  Mask acc = full;  // the full support is always tight
  for (Mask m = 0; m <= full; ++m) {
    if (!((m >> u_pos) & 1)) continue;
    double xs = 0;
    for (int p = 0; p < k; ++p)
      if ((m >> p) & 1) xs += x(p);
    if (pot.value(m) - xs <= tau) acc &= m;
  }
  return mask_to_ids(pot, acc);
}

void augment(BlockVector& x, const std::vector<PathArc>& path, double eps) {
  for (const PathArc& a : path) x.apply_swap(a.pot, a.u_pos, a.v_pos, eps);
}

namespace {

bool block_in_base(const SubmodularPotential& pot, const BasePoint& x,
                   double tau) {
  if (pot.kind() == Kind::region) {
    // Symmetric cardinality polytope: top-k prefix sums against k(m-k).
    const int m = pot.arity();
    std::vector<double> sorted(x.data(), x.data() + m);
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    double run = 0;
    for (int k = 1; k <= m; ++k) {
      run += sorted[k - 1];
      const double cap = double(k) * double(m - k);
      if (k < m && run > cap + tau) return false;
    }
    return std::abs(run) <= tau;
  }
  if (pot.arity() <= 12) return check_base_membership(pot, x, tau);
  return true;  // too large to verify exhaustively
}

struct AuxContext {
  const DecomposableInstance& inst;
  const OracleSet& oracles;
  const FlowOptions& opts;
  BlockVector& x;
  const Eigen::VectorXd& target;
  FlowStats stats;

  double deficit(int v) const { return target(v) - x.aggregate()(v); }
  bool in_n(int v) const { return x.aggregate()(v) < target(v) - opts.deficit_tol; }
  bool in_p(int v) const { return x.aggregate()(v) > target(v) + opts.deficit_tol; }

  double capacity(int i, int pu, int pv) {
    ++stats.capacity_queries;
    const auto& pot = inst.potential(i);
    if (pot.kind() == Kind::edge_cut)
      return pot.value(Mask(1) << pu) - x.block(i)(pu);
    return exchange_capacity(
        pot, x.block(i), pu, pv,
        [this, i](const SubmodularPotential&, const Eigen::VectorXd& w) {
          return oracles.sfm(i, w);
        });
  }

  // Applies the path left to right, re-querying capacity whenever an earlier
  // swap touched the same potential (other potentials cannot interfere).
  // Returns false and undoes everything when interference eats the headroom.
  bool checked_apply(const std::vector<PathArc>& path, double eps) {
    std::vector<char> seen(inst.r(), 0);
    bool repeats = false;
    for (const PathArc& a : path) {
      if (seen[a.pot]) repeats = true;
      seen[a.pot] = 1;
    }
    if (!repeats) {
      augment(x, path, eps);
      return true;
    }
    std::fill(seen.begin(), seen.end(), 0);
    for (std::size_t j = 0; j < path.size(); ++j) {
      const PathArc& a = path[j];
      if (seen[a.pot]) {
        const double cap = capacity(a.pot, a.u_pos, a.v_pos);
        if (cap + 1e-12 < eps) {
          for (std::size_t b = j; b-- > 0;)
            x.apply_swap(path[b].pot, path[b].u_pos, path[b].v_pos, -eps);
          return false;
        }
      }
      seen[a.pot] = 1;
      x.apply_swap(a.pot, a.u_pos, a.v_pos, eps);
    }
    return true;
  }

  void validate_path_blocks(const std::vector<PathArc>& path) {
    if (!opts.validate_blocks) return;
    std::vector<int> pots;
    for (const PathArc& a : path) pots.push_back(a.pot);
    std::sort(pots.begin(), pots.end());
    pots.erase(std::unique(pots.begin(), pots.end()), pots.end());
    for (int i : pots)
      if (!block_in_base(inst.potential(i), x.block(i), 1e-6))
        fail(ErrorCategory::internal,
             "augmentation pushed a block outside its base polytope");
  }
};

struct BfsOutcome {
  bool found = false;
  int end = -1;
  std::vector<char> visited;
  std::vector<int> parent;
  std::vector<PathArc> parent_arc;
  std::vector<double> parent_cap;
  std::vector<int> dist;
};

// Multi-source shortest BFS over positive-capacity arcs; stops at the first
// target-side node. Parallel arcs resolve to the largest fresh capacity.
BfsOutcome aux_bfs(AuxContext& ctx, const std::vector<char>& sources,
                   const std::vector<char>& sinks) {
  const int n = ctx.inst.n();
  BfsOutcome out;
  out.visited.assign(n, 0);
  out.parent.assign(n, -1);
  out.parent_arc.assign(n, PathArc{-1, -1, -1});
  out.parent_cap.assign(n, 0.0);
  out.dist.assign(n, -1);
  ++ctx.stats.rounds;
  std::deque<int> queue;
  for (int v = 0; v < n; ++v) {
    if (sources[v]) {
      out.visited[v] = 1;
      out.dist[v] = 0;
      queue.push_back(v);
    }
  }
  std::vector<double> cand_cap(n, 0.0);
  std::vector<PathArc> cand_arc(n);
  std::vector<int> touched;
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    touched.clear();
    for (auto [i, pu] : ctx.inst.incidence(u)) {
      const auto& sup = ctx.inst.potential(i).support();
      for (int pv = 0; pv < static_cast<int>(sup.size()); ++pv) {
        if (pv == pu) continue;
        const int v = sup[pv];
        if (out.visited[v]) continue;
        const double cap = ctx.capacity(i, pu, pv);
        if (cap <= ctx.opts.capacity_tol) continue;
        if (cand_cap[v] == 0.0) touched.push_back(v);
        if (cap > cand_cap[v]) {
          cand_cap[v] = cap;
          cand_arc[v] = PathArc{i, pu, pv};
        }
      }
    }
    for (int v : touched) {
      if (out.visited[v]) continue;
      out.visited[v] = 1;
      out.dist[v] = out.dist[u] + 1;
      out.parent[v] = u;
      out.parent_arc[v] = cand_arc[v];
      out.parent_cap[v] = cand_cap[v];
      cand_cap[v] = 0.0;
      if (sinks[v]) {
        out.found = true;
        out.end = v;
        return out;
      }
      queue.push_back(v);
    }
    for (int v : touched) cand_cap[v] = 0.0;
  }
  return out;
}

// Hop distances to the sink side over positive arcs (reverse BFS); used by
// the debug label-monotonicity assertion.
std::vector<int> distances_to_sinks(AuxContext& ctx,
                                    const std::vector<char>& sinks) {
  const int n = ctx.inst.n();
  std::vector<int> dist(n, -1);
  std::deque<int> queue;
  for (int v = 0; v < n; ++v)
    if (sinks[v]) {
      dist[v] = 0;
      queue.push_back(v);
    }
  while (!queue.empty()) {
    const int u = queue.front();
    queue.pop_front();
    for (auto [i, pu] : ctx.inst.incidence(u)) {
      const auto& sup = ctx.inst.potential(i).support();
      for (int pw = 0; pw < static_cast<int>(sup.size()); ++pw) {
        if (pw == pu) continue;
        const int w = sup[pw];
        if (dist[w] >= 0) continue;
        if (ctx.capacity(i, pw, pu) > ctx.opts.capacity_tol)
          dist[w] = dist[u] + 1, queue.push_back(w);
      }
    }
  }
  return dist;
}

void guard_augmentations(AuxContext& ctx) {
  if (ctx.stats.augmentations > ctx.opts.max_augmentations)
    fail(ErrorCategory::convergence,
         "augmentation cap exceeded: " + std::to_string(ctx.stats.augmentations) +
             " augmentations, " + std::to_string(ctx.stats.capacity_queries) +
             " capacity queries, " + std::to_string(ctx.stats.rounds) +
             " search rounds");
}

// Shortest augmenting paths until deficits clear or no path remains.
// Returns the final reachable set from N (empty when cleared).
std::vector<char> ekd_core(AuxContext& ctx, bool transport_mode) {
  const int n = ctx.inst.n();
  std::vector<int> prev_labels;
  while (true) {
    std::vector<char> in_n(n, 0), in_p(n, 0);
    bool any_deficit = false;
    for (int v = 0; v < n; ++v) {
      in_n[v] = ctx.in_n(v);
      in_p[v] = ctx.in_p(v);
      any_deficit = any_deficit || in_n[v];
    }
    if (!any_deficit) {
      ctx.stats.cleared = true;
      return std::vector<char>(n, 0);
    }
    BfsOutcome bfs = aux_bfs(ctx, in_n, in_p);
    if (!bfs.found) {
      if (transport_mode)
        fail(ErrorCategory::oracle_exactness,
             "transport blocked: no augmenting path while a deficit remains; "
             "the target lies outside the base polytope or an oracle "
             "answered inexactly");
      return bfs.visited;
    }
    std::vector<PathArc> path;
    double eps = std::numeric_limits<double>::infinity();
    int v = bfs.end;
    while (bfs.parent[v] >= 0) {
      path.push_back(bfs.parent_arc[v]);
      eps = std::min(eps, bfs.parent_cap[v]);
      v = bfs.parent[v];
    }
    std::reverse(path.begin(), path.end());
    eps = std::min(eps, ctx.deficit(v));                    // v = start in N
    eps = std::min(eps, -ctx.deficit(bfs.end));             // excess at end
    if (!(eps > 0))
      fail(ErrorCategory::internal, "nonpositive augmentation step");
    if (!ctx.checked_apply(path, eps))
      fail(ErrorCategory::internal,
           "capacity interference on a shortest path");
    ++ctx.stats.augmentations;
    guard_augmentations(ctx);
    ctx.validate_path_blocks(path);
    if (ctx.opts.check_labels) {
      std::vector<int> labels = distances_to_sinks(ctx, in_p);
      if (!prev_labels.empty()) {
        for (int u = 0; u < n; ++u)
          if (labels[u] >= 0 && prev_labels[u] >= 0 &&
              labels[u] < prev_labels[u])
            ctx.stats.label_monotone = false;
      }
      prev_labels = std::move(labels);
    }
  }
}

// Bidirectional growth with incremental trees. Tree arcs are revalidated
// after every augmentation that touches their potential; stale shortest-path
// information is healed by full rebuilds, and termination is certified by a
// fresh search.
class IbfsCore {
 public:
  IbfsCore(AuxContext& ctx) : ctx_(ctx), n_(ctx.inst.n()) {}

  std::vector<char> run() {
    rebuild();
    int barren_rebuilds = 0;
    while (true) {
      if (cleared_) {
        ctx_.stats.cleared = true;
        return std::vector<char>(n_, 0);
      }
      const bool grow_src = level_src_ <= level_snk_;
      if (!advance(grow_src)) {
        // Growth stalled; confirm against fresh capacities before trusting
        // tree state (arcs can appear when augmentations touch a clique).
        std::vector<char> in_n(n_, 0), in_p(n_, 0);
        for (int v = 0; v < n_; ++v) in_n[v] = ctx_.in_n(v), in_p[v] = ctx_.in_p(v);
        BfsOutcome fresh = aux_bfs(ctx_, in_n, in_p);
        if (!fresh.found) return fresh.visited;
        if (++barren_rebuilds > n_ + 16)
          fail(ErrorCategory::convergence, "tree rebuilds without progress");
        rebuild();
        continue;
      }
      if (progressed_) barren_rebuilds = 0;
    }
  }

 private:
  static constexpr char kFree = 0, kSrc = 1, kSnk = 2;

  void rebuild() {
    side_.assign(n_, kFree);
    label_.assign(n_, -1);
    parent_.assign(n_, -1);
    parent_arc_.assign(n_, PathArc{-1, -1, -1});
    children_.assign(n_, {});
    q_src_.clear();
    q_snk_.clear();
    next_src_.clear();
    next_snk_.clear();
    orphans_.clear();
    level_src_ = level_snk_ = 0;
    cleared_ = true;
    for (int v = 0; v < n_; ++v) {
      if (ctx_.in_n(v)) {
        side_[v] = kSrc;
        label_[v] = 0;
        q_src_.push_back(v);
        cleared_ = false;
      } else if (ctx_.in_p(v)) {
        side_[v] = kSnk;
        label_[v] = 0;
        q_snk_.push_back(v);
      }
    }
  }

  // One growth step on the chosen side; returns false when that tree is
  // exhausted. Sets progressed_ when an augmentation happened.
  bool advance(bool src_side) {
    progressed_ = false;
    auto& q = src_side ? q_src_ : q_snk_;
    auto& next = src_side ? next_src_ : next_snk_;
    int& level = src_side ? level_src_ : level_snk_;
    while (q.empty() && !next.empty()) {
      q.swap(next);
      ++level;
    }
    if (q.empty()) return false;
    const int u = q.front();
    q.pop_front();
    const char want = src_side ? kSrc : kSnk;
    if (side_[u] != want || label_[u] != level) return true;  // stale entry
    scan(u, src_side);
    return true;
  }

  void scan(int u, bool src_side) {
    const char mine = src_side ? kSrc : kSnk;
    const char other = src_side ? kSnk : kSrc;
    for (auto [i, pu] : ctx_.inst.incidence(u)) {
      const auto& sup = ctx_.inst.potential(i).support();
      for (int pw = 0; pw < static_cast<int>(sup.size()); ++pw) {
        if (pw == pu) continue;
        const int w = sup[pw];
        if (side_[w] == mine) continue;
        // Arc orientation follows the side: out-arcs grow the source tree,
        // in-arcs the sink tree.
        const int a_pos = src_side ? pu : pw;
        const int b_pos = src_side ? pw : pu;
        const double cap = ctx_.capacity(i, a_pos, b_pos);
        if (cap <= ctx_.opts.capacity_tol) continue;
        if (side_[w] == other) {
          const int su = src_side ? u : w;
          const int sv = src_side ? w : u;
          if (!augment_through(su, PathArc{i, a_pos, b_pos}, sv)) return;
          if (side_[u] != mine) return;  // u fell out of its tree
          continue;
        }
        side_[w] = mine;
        label_[w] = label_[u] + 1;
        parent_[w] = u;
        parent_arc_[w] = PathArc{i, a_pos, b_pos};
        children_[u].push_back(w);
        (src_side ? next_src_ : next_snk_).push_back(w);
      }
    }
  }

  // Path: src root -> u, bridge, v -> snk root. Returns false on rebuild.
  bool augment_through(int u, PathArc bridge, int v) {
    std::vector<PathArc> path;
    for (int a = u; parent_[a] >= 0; a = parent_[a]) path.push_back(parent_arc_[a]);
    std::reverse(path.begin(), path.end());
    const int src_root = path.empty() ? u : walk_root(u);
    path.push_back(bridge);
    for (int b = v; parent_[b] >= 0; b = parent_[b]) path.push_back(parent_arc_[b]);
    const int snk_root = walk_root(v);

    double eps = ctx_.deficit(src_root);
    eps = std::min(eps, -ctx_.deficit(snk_root));
    std::vector<double> caps(path.size());
    double min_cap = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < path.size(); ++j) {
      caps[j] = ctx_.capacity(path[j].pot, path[j].u_pos, path[j].v_pos);
      min_cap = std::min(min_cap, caps[j]);
    }
    eps = std::min(eps, min_cap);
    if (!(eps > ctx_.opts.capacity_tol)) {
      if (min_cap <= ctx_.opts.capacity_tol) {
        // A tree arc decayed since it was recorded.
        invalidate_path_arcs(path, caps);
        return true;
      }
      rebuild();  // a terminal is drained below working precision
      return false;
    }
    if (!ctx_.checked_apply(path, eps)) {
      rebuild();
      return false;
    }
    ++ctx_.stats.augmentations;
    progressed_ = true;
    guard_augmentations(ctx_);
    ctx_.validate_path_blocks(path);

    if (!ctx_.in_n(src_root) || !ctx_.in_p(snk_root)) {
      rebuild();  // a terminal exhausted; its whole tree needs new roots
      return false;
    }
    // Revalidate every tree arc riding a touched potential.
    std::vector<int> pots;
    for (const PathArc& a : path) pots.push_back(a.pot);
    std::sort(pots.begin(), pots.end());
    pots.erase(std::unique(pots.begin(), pots.end()), pots.end());
    for (int i : pots) {
      const auto& sup = ctx_.inst.potential(i).support();
      for (int w : sup) {
        if (side_[w] == kFree || parent_[w] < 0 || parent_arc_[w].pot != i)
          continue;
        const PathArc& pa = parent_arc_[w];
        if (ctx_.capacity(pa.pot, pa.u_pos, pa.v_pos) <= ctx_.opts.capacity_tol)
          make_orphan(w);
      }
    }
    process_orphans();
    return true;
  }

  int walk_root(int a) {
    while (parent_[a] >= 0) a = parent_[a];
    return a;
  }

  void invalidate_path_arcs(const std::vector<PathArc>& path,
                            const std::vector<double>& caps) {
    for (std::size_t j = 0; j < path.size(); ++j) {
      if (caps[j] > ctx_.opts.capacity_tol) continue;
      for (int w = 0; w < n_; ++w) {
        if (side_[w] == kFree || parent_[w] < 0) continue;
        const PathArc& pa = parent_arc_[w];
        if (pa.pot == path[j].pot && pa.u_pos == path[j].u_pos &&
            pa.v_pos == path[j].v_pos) {
          make_orphan(w);
          break;
        }
      }
    }
    process_orphans();
  }

  void make_orphan(int w) {
    parent_[w] = -1;
    orphans_.push_back(w);
  }

  void drop_from_tree(int w) {
    side_[w] = kFree;
    label_[w] = -1;
    parent_[w] = -1;
    for (int c : children_[w]) {
      if (parent_[c] == w) make_orphan(c);
    }
    children_[w].clear();
  }

  // FIFO adoption: same-level parent first, then one level deeper within
  // the grown region, otherwise drop the subtree root.
  void process_orphans() {
    while (!orphans_.empty()) {
      const int o = orphans_.front();
      orphans_.pop_front();
      if (side_[o] == kFree) continue;
      const bool src_side = side_[o] == kSrc;
      const int max_level = (src_side ? level_src_ : level_snk_) + 1;
      int best_parent = -1, best_label = std::numeric_limits<int>::max();
      PathArc best_arc{-1, -1, -1};
      for (auto [i, po] : ctx_.inst.incidence(o)) {
        const auto& sup = ctx_.inst.potential(i).support();
        for (int pp = 0; pp < static_cast<int>(sup.size()); ++pp) {
          if (pp == po) continue;
          const int p = sup[pp];
          if (side_[p] != side_[o] || parent_[p] == o) continue;
          if (label_[p] + 1 >= best_label || label_[p] + 1 > max_level) continue;
          const int a_pos = src_side ? pp : po;
          const int b_pos = src_side ? po : pp;
          if (ctx_.capacity(i, a_pos, b_pos) > ctx_.opts.capacity_tol) {
            best_parent = p;
            best_label = label_[p] + 1;
            best_arc = PathArc{i, a_pos, b_pos};
            if (best_label == label_[o]) break;  // cannot do better
          }
        }
        if (best_label == label_[o]) break;
      }
      if (best_parent < 0) {
        drop_from_tree(o);
        continue;
      }
      parent_[o] = best_parent;
      parent_arc_[o] = best_arc;
      children_[best_parent].push_back(o);
      if (best_label != label_[o]) {
        label_[o] = best_label;
        // Children levels no longer line up with the new depth.
        for (int c : children_[o])
          if (parent_[c] == o) make_orphan(c);
        children_[o].clear();
        const int level = src_side ? level_src_ : level_snk_;
        if (best_label == level + 1)
          (src_side ? next_src_ : next_snk_).push_back(o);
        else if (best_label == level)
          (src_side ? q_src_ : q_snk_).push_back(o);
        // Depths below the frontier were already scanned.
      }
    }
  }

  AuxContext& ctx_;
  int n_;
  std::vector<char> side_;
  std::vector<int> label_, parent_;
  std::vector<PathArc> parent_arc_;
  std::vector<std::vector<int>> children_;
  std::deque<int> q_src_, q_snk_, next_src_, next_snk_, orphans_;
  int level_src_ = 0, level_snk_ = 0;
  bool cleared_ = false;
  bool progressed_ = false;
};

SolveReport finish_flow(const char* name, AuxContext& ctx,
                        const std::vector<char>& reachable,
                        std::chrono::steady_clock::time_point t0) {
  const int n = ctx.inst.n();
  SolveReport rep;
  rep.solver = name;
  for (int v = 0; v < n; ++v)
    if (reachable[v]) rep.minimizer.push_back(v);
  rep.value = ctx.inst.evaluate(rep.minimizer);
  double xminus = 0;
  for (int v = 0; v < n; ++v) xminus += std::min(ctx.x.aggregate()(v), 0.0);
  rep.certificate_gap = rep.value - xminus;
  rep.iterations = ctx.stats.augmentations;
  rep.augmentations = ctx.stats.augmentations;
  rep.capacity_queries = ctx.stats.capacity_queries;
  rep.oracle_calls = ctx.oracles.total_calls();
  rep.oracle_calls_by_kind = ctx.oracles.calls_by_kind();
  rep.certified = ctx.oracles.all_certified();
  rep.converged = true;
  rep.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

void flow_preflight(const DecomposableInstance& inst, const OracleSet& oracles,
                    const FlowOptions& opts, const BlockVector* x0) {
  if (opts.strict && !oracles.all_certified())
    fail(ErrorCategory::validation,
         "flow minimization needs certified-exact oracles; the configured "
         "stack is approximate (iteration-capped or loose-tolerance Wolfe)");
  if (x0 && x0->blocks() != inst.r())
    fail(ErrorCategory::invalid_input, "warm start block count mismatch");
}

}  // namespace

SolveReport solve_flow_ekd(const DecomposableInstance& inst,
                           const OracleSet& oracles, const FlowOptions& opts,
                           const BlockVector* x0, FlowStats* stats,
                           BlockVector* x_out) {
  const auto t0 = std::chrono::steady_clock::now();
  flow_preflight(inst, oracles, opts, x0);
  oracles.reset_counters();
  BlockVector x = x0 ? *x0 : BlockVector::greedy_init(inst);
  const Eigen::VectorXd target = Eigen::VectorXd::Zero(inst.n());
  AuxContext ctx{inst, oracles, opts, x, target};
  std::vector<char> reachable = ekd_core(ctx, false);
  if (stats) *stats = ctx.stats;
  if (x_out) *x_out = x;
  return finish_flow("ekd", ctx, reachable, t0);
}

SolveReport solve_flow_ibfs(const DecomposableInstance& inst,
                            const OracleSet& oracles, const FlowOptions& opts,
                            const BlockVector* x0, FlowStats* stats,
                            BlockVector* x_out) {
  const auto t0 = std::chrono::steady_clock::now();
  flow_preflight(inst, oracles, opts, x0);
  oracles.reset_counters();
  BlockVector x = x0 ? *x0 : BlockVector::greedy_init(inst);
  const Eigen::VectorXd target = Eigen::VectorXd::Zero(inst.n());
  AuxContext ctx{inst, oracles, opts, x, target};
  IbfsCore core(ctx);
  std::vector<char> reachable = core.run();
  if (stats) *stats = ctx.stats;
  if (x_out) *x_out = x;
  return finish_flow("ibfs", ctx, reachable, t0);
}

BlockVector transport_to_target(const DecomposableInstance& inst,
                                const OracleSet& oracles, const BlockVector& y,
                                const Eigen::VectorXd& target,
                                const FlowOptions& opts, FlowStats* stats) {
  if (target.size() != inst.n())
    fail(ErrorCategory::invalid_input, "target size != ground set");
  BlockVector x = y;
  AuxContext ctx{inst, oracles, opts, x, target};
  ekd_core(ctx, true);
  if (stats) *stats = ctx.stats;
  return x;
}

}  // namespace dsfm
