#include "sftlab/finite_system.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace sftlab {

FiniteSystem FiniteSystem::make(
    const GroupCtx& ctx, std::vector<std::string> states,
    std::vector<std::vector<int>> generator_images,
    std::optional<std::vector<std::vector<double>>> metric) {
  FiniteSystem sys(ctx);
  require(!states.empty(), Errc::Inconsistency, "empty state set");
  {
    std::set<std::string> names(states.begin(), states.end());
    require(names.size() == states.size(), Errc::Inconsistency,
            "duplicate state name");
  }
  int n = (int)states.size();
  require((int)generator_images.size() == ctx.rank(), Errc::Inconsistency,
          "one permutation per generator required");
  sys.states_ = std::move(states);
  for (const auto& img : generator_images) {
    require((int)img.size() == n, Errc::NotAPermutation,
            "permutation image list has wrong length");
    std::vector<char> hit(n, 0);
    for (int v : img) {
      require(v >= 0 && v < n, Errc::NotAPermutation, "image out of range");
      require(!hit[v], Errc::NotAPermutation, "repeated image");
      hit[v] = 1;
    }
  }
  sys.perm_ = std::move(generator_images);
  for (const auto& p : sys.perm_) {
    std::vector<int> ip(n);
    for (int x = 0; x < n; ++x) ip[p[x]] = x;
    sys.inv_perm_.push_back(ip);
  }
  if (ctx.kind() != GroupKind::Free) {
    for (int i = 0; i < ctx.rank(); ++i)
      for (int j = i + 1; j < ctx.rank(); ++j)
        for (int x = 0; x < n; ++x)
          require(sys.perm_[i][sys.perm_[j][x]] == sys.perm_[j][sys.perm_[i][x]],
                  Errc::Inconsistency, "lattice generator permutations must commute");
  }
  for (const auto& p : sys.perm_) {
    Cycles c;
    c.cycle_of.assign(n, -1);
    c.pos_in.assign(n, -1);
    for (int x = 0; x < n; ++x) {
      if (c.cycle_of[x] != -1) continue;
      std::vector<int> cyc;
      int y = x;
      while (c.cycle_of[y] == -1) {
        c.cycle_of[y] = (int)c.cycles.size();
        c.pos_in[y] = (int)cyc.size();
        cyc.push_back(y);
        y = p[y];
      }
      c.cycles.push_back(std::move(cyc));
    }
    sys.cycles_.push_back(std::move(c));
  }
  if (metric) {
    auto& d = *metric;
    require((int)d.size() == n, Errc::Inconsistency, "metric table has wrong size");
    for (int i = 0; i < n; ++i) {
      require((int)d[i].size() == n, Errc::Inconsistency, "metric row has wrong size");
      require(d[i][i] == 0.0, Errc::Inconsistency, "metric diagonal must be zero");
      for (int j = 0; j < n; ++j) {
        require(d[i][j] == d[j][i], Errc::Inconsistency, "metric must be symmetric");
        require(i == j || d[i][j] > 0, Errc::Inconsistency,
                "distinct states need positive distance");
        for (int k = 0; k < n; ++k)
          require(d[i][j] <= d[i][k] + d[k][j] + 1e-12, Errc::Inconsistency,
                  "metric violates the triangle inequality");
      }
    }
    sys.dist_ = std::move(d);
  }
  return sys;
}

int FiniteSystem::state(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (states_[i] == name) return i;
  fail(Errc::UnresolvedRef, "unknown state '" + name + "'");
}

int FiniteSystem::apply(const GroupElement& g, int x) const {
  ctx_.validate(g);
  require(x >= 0 && x < size(), Errc::Inconsistency, "state out of range");
  if (ctx_.kind() == GroupKind::Free) {
    // rightmost letter acts first
    const auto& w = g.data();
    for (auto it = w.rbegin(); it != w.rend(); ++it) {
      int l = (int)*it;
      x = l > 0 ? perm_[l - 1][x] : inv_perm_[-l - 1][x];
    }
    return x;
  }
  for (int i = 0; i < ctx_.rank(); ++i) {
    long long e = g.data()[i];
    if (e == 0) continue;
    const auto& c = cycles_[i];
    const auto& cyc = c.cycles[c.cycle_of[x]];
    long long L = (long long)cyc.size();
    long long p = ((c.pos_in[x] + e) % L + L) % L;
    x = cyc[p];
  }
  return x;
}

double FiniteSystem::dist(int x, int y) const {
  require(has_metric(), Errc::NoMetric, "system has no metric");
  require(x >= 0 && x < size() && y >= 0 && y < size(), Errc::Inconsistency,
          "state out of range");
  return dist_[x][y];
}

double FiniteSystem::space_diameter() const {
  require(has_metric(), Errc::NoMetric, "system has no metric");
  double m = 0;
  for (int i = 0; i < size(); ++i)
    for (int j = 0; j < size(); ++j) m = std::max(m, dist_[i][j]);
  return m;
}

Cover Cover::of(const FiniteSystem& sys, std::vector<std::vector<int>> blocks) {
  Cover c;
  std::vector<char> covered(sys.size(), 0);
  for (auto& b : blocks) {
    require(!b.empty(), Errc::NotACover, "cover contains an empty block");
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    for (int x : b) {
      require(x >= 0 && x < sys.size(), Errc::NotACover, "block state out of range");
      covered[x] = 1;
    }
  }
  for (int x = 0; x < sys.size(); ++x)
    require(covered[x], Errc::NotACover,
            "cover misses state '" + sys.states()[x] + "'");
  // drop exact duplicates, keep first occurrence order
  for (const auto& b : blocks)
    if (std::find(c.blocks.begin(), c.blocks.end(), b) == c.blocks.end())
      c.blocks.push_back(b);
  std::vector<int> owner(sys.size(), -1);
  c.partition = true;
  for (std::size_t i = 0; i < c.blocks.size(); ++i)
    for (int x : c.blocks[i]) {
      if (owner[x] != -1) c.partition = false;
      owner[x] = (int)i;
    }
  return c;
}

Cover Cover::whole(const FiniteSystem& sys) {
  std::vector<int> all(sys.size());
  for (int i = 0; i < sys.size(); ++i) all[i] = i;
  return of(sys, {all});
}

Cover Cover::singletons(const FiniteSystem& sys) {
  std::vector<std::vector<int>> b;
  for (int i = 0; i < sys.size(); ++i) b.push_back({i});
  return of(sys, b);
}

int Cover::block_of(int x) const {
  for (std::size_t i = 0; i < blocks.size(); ++i)
    if (std::binary_search(blocks[i].begin(), blocks[i].end(), x)) return (int)i;
  fail(Errc::NotACover, "state not covered");
}

bool Cover::same_blocks(const Cover& o) const {
  std::set<std::vector<int>> a(blocks.begin(), blocks.end());
  std::set<std::vector<int>> b(o.blocks.begin(), o.blocks.end());
  return a == b;
}

CoverOps cover_ops(const FiniteSystem& sys, const Cover& U, const Cover& V,
                   bool partition_strict) {
  CoverOps ops;
  auto subset = [](const std::vector<int>& a, const std::vector<int>& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
  };
  auto meets = [](const std::vector<int>& a, const std::vector<int>& b) {
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
      if (a[i] == b[j]) return true;
      a[i] < b[j] ? ++i : ++j;
    }
    return false;
  };
  ops.refines = true;
  for (const auto& v : V.blocks) {
    bool inside = false;
    for (const auto& u : U.blocks)
      if (subset(v, u)) {
        inside = true;
        break;
      }
    ops.refines = ops.refines && inside;
  }
  require(!partition_strict || ops.refines, Errc::RefinementError,
          "iota requires a refining pair in partition-strict mode");

  std::vector<std::vector<int>> joined;
  for (const auto& u : U.blocks)
    for (const auto& v : V.blocks) {
      std::vector<int> inter;
      std::set_intersection(u.begin(), u.end(), v.begin(), v.end(),
                            std::back_inserter(inter));
      if (!inter.empty()) joined.push_back(inter);
    }
  ops.join = Cover::of(sys, joined);

  for (const auto& v : V.blocks) {
    int pick = -1;
    for (std::size_t i = 0; i < U.blocks.size() && pick < 0; ++i)
      if (meets(v, U.blocks[i])) pick = (int)i;
    ops.iota.push_back(pick);
  }
  return ops;
}

Geometry geometry(const FiniteSystem& sys, const Cover& U) {
  require(sys.has_metric(), Errc::NoMetric, "geometry needs a metric");
  Geometry g;
  for (const auto& b : U.blocks)
    for (int x : b)
      for (int y : b) g.diam = std::max(g.diam, sys.dist(x, y));
  double cap = sys.space_diameter() + 1;
  std::set<double> candidates{cap};
  for (int x = 0; x < sys.size(); ++x)
    for (int y = 0; y < sys.size(); ++y)
      if (sys.dist(x, y) > 0) candidates.insert(sys.dist(x, y));
  g.lebesgue = 0;
  for (double delta : candidates) {
    bool ok = true;
    for (int x = 0; x < sys.size() && ok; ++x) {
      // open ball of radius delta
      std::vector<int> ball;
      for (int y = 0; y < sys.size(); ++y)
        if (sys.dist(x, y) < delta) ball.push_back(y);
      bool inside = false;
      for (const auto& b : U.blocks)
        if (std::includes(b.begin(), b.end(), ball.begin(), ball.end())) {
          inside = true;
          break;
        }
      ok = inside;
    }
    if (ok) g.lebesgue = std::max(g.lebesgue, delta);
  }
  return g;
}

std::vector<int> star(const std::vector<int>& A, const Cover& U) {
  std::set<int> a(A.begin(), A.end()), out;
  for (const auto& b : U.blocks) {
    bool meet = false;
    for (int x : b) meet = meet || a.count(x);
    if (meet) out.insert(b.begin(), b.end());
  }
  return {out.begin(), out.end()};
}

Cover orbit_pattern_classes(const FiniteSystem& sys, const Cover& U,
                            const std::vector<GroupElement>& S, int* rounds) {
  require(U.partition, Errc::PartitionRequired,
          "orbit-pattern classes need a partition");
  int n = sys.size();
  std::vector<std::vector<int>> step;  // images under each s and s^-1
  for (const auto& s : S) {
    std::vector<int> f(n), b(n);
    for (int x = 0; x < n; ++x) {
      f[x] = sys.apply(s, x);
      b[x] = sys.apply(sys.ctx().inv(s), x);
    }
    step.push_back(f);
    step.push_back(b);
  }
  std::vector<int> cls(n);
  for (int x = 0; x < n; ++x) cls[x] = U.block_of(x);
  int r = 0;
  for (;; ++r) {
    std::map<std::vector<int>, int> sig_id;
    std::vector<int> next(n);
    for (int x = 0; x < n; ++x) {
      std::vector<int> sig{cls[x]};
      for (const auto& f : step) sig.push_back(cls[f[x]]);
      auto [it, fresh] = sig_id.insert({sig, (int)sig_id.size()});
      next[x] = it->second;
    }
    bool stable = true;
    // same partition iff class counts match (next always refines cls)
    std::set<int> a(cls.begin(), cls.end()), b(next.begin(), next.end());
    stable = a.size() == b.size();
    cls = std::move(next);
    if (stable) break;
  }
  if (rounds) *rounds = r;
  std::map<int, std::vector<int>> by;
  for (int x = 0; x < n; ++x) by[cls[x]].push_back(x);
  // canonical order: by least member
  std::vector<std::vector<int>> blocks;
  std::vector<std::pair<int, std::vector<int>>> items;
  for (auto& [k, v] : by) items.push_back({v[0], v});
  std::sort(items.begin(), items.end());
  for (auto& [k, v] : items) blocks.push_back(v);
  auto out = Cover::of(sys, blocks);
  require(out.partition, Errc::Internal, "class map must be a partition");
  return out;
}

}  // namespace sftlab
