#include "doctest.h"

#include <algorithm>
#include <set>
#include <vector>

#include "sftlab/patterns.hpp"
#include "sftlab/zgraph.hpp"

using namespace sftlab;

namespace {

std::vector<GroupElement> zwin(std::initializer_list<long long> xs) {
  std::vector<GroupElement> w;
  for (long long x : xs) w.push_back(GroupElement::lattice({x}));
  return w;
}

Pattern zword(std::initializer_list<int> syms, long long start = 0) {
  Pattern p;
  long long x = start;
  for (int s : syms) p.cells[GroupElement::lattice({x++})] = s;
  return p;
}

std::set<std::vector<int>> slice_words(const LanguageSlice& s) {
  std::set<std::vector<int>> out;
  for (const auto& p : s.patterns) {
    std::vector<int> w;
    for (const auto& [g, sym] : p.cells) w.push_back(sym);
    out.insert(w);
  }
  return out;
}

/* Word-level language oracle for Z SFTs, independent of the transfer graph:
 * locally admissible everywhere + extendable K steps on both sides, with K
 * at least the block count, so extendability pumps to bi-infinite. */
struct ZOracle {
  int asz;
  // forbidden translates as (offset list, symbol list), offsets >= 0
  std::vector<std::pair<std::vector<long long>, std::vector<int>>> forb;
  long long span;

  bool admissible(const std::vector<int>& w) const {
    for (long long anchor = 0; anchor + span <= (long long)w.size(); ++anchor)
      for (const auto& [off, sym] : forb) {
        bool match = true;
        for (std::size_t i = 0; i < off.size(); ++i)
          if (w[anchor + off[i]] != sym[i]) {
            match = false;
            break;
          }
        if (match) return false;
      }
    return true;
  }
  bool extend_right(std::vector<int>& w, int steps) const {
    if (steps == 0) return true;
    for (int a = 0; a < asz; ++a) {
      w.push_back(a);
      bool ok = admissible(w) && extend_right(w, steps - 1);
      w.pop_back();
      if (ok) return true;
    }
    return false;
  }
  bool extend_left(std::vector<int>& w, int steps) const {
    if (steps == 0) return true;
    for (int a = 0; a < asz; ++a) {
      w.insert(w.begin(), a);
      bool ok = admissible(w) && extend_left(w, steps - 1);
      w.erase(w.begin());
      if (ok) return true;
    }
    return false;
  }
  std::set<std::vector<int>> language(int n) const {
    int K = 1;
    for (long long i = 0; i + 1 < span; ++i) K *= asz;
    K += 1;
    std::set<std::vector<int>> out;
    std::vector<int> w(n, 0);
    for (;;) {
      if (admissible(w)) {
        auto v = w;
        if (extend_right(v, K) && extend_left(v, K)) out.insert(w);
      }
      int i = n - 1;
      while (i >= 0 && w[i] == asz - 1) w[i--] = 0;
      if (i < 0) break;
      ++w[i];
    }
    return out;
  }
};

ZOracle oracle_of(const std::vector<std::vector<long long>>& sites,
                  const std::vector<std::vector<int>>& syms, int asz) {
  ZOracle o;
  o.asz = asz;
  long long lo = sites[0][0], hi = sites[0][0];
  for (const auto& s : sites)
    for (long long x : s) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  o.span = hi - lo + 1;
  for (std::size_t i = 0; i < sites.size(); ++i) {
    std::vector<long long> off;
    for (long long x : sites[i]) off.push_back(x - lo);
    o.forb.push_back({off, syms[i]});
  }
  return o;
}

// direct acceptance on a labeled graph, independent of ZShiftGraph
bool graph_accepts(const SoficGraph& g, const std::vector<int>& w) {
  std::set<int> cur;
  for (int v = 0; v < g.vertices; ++v) cur.insert(v);
  for (int a : w) {
    std::set<int> next;
    for (const auto& e : g.edges)
      if (e.label == a && cur.count(e.from)) next.insert(e.to);
    if (next.empty()) return false;
    cur = next;
  }
  return true;
}

SubshiftPresentation golden_mean_sft() {
  auto Z = GroupCtx::integers();
  return SubshiftPresentation::sft(Z, {"0", "1"}, zwin({0, 1}),
                                   {zword({1, 1})});
}

SoficGraph golden_mean_graph() {
  SoficGraph g;
  g.vertices = 2;
  g.edges = {{0, 0, 0}, {0, 1, 1}, {1, 0, 0}};
  return g;
}

SoficGraph even_shift_graph() {
  SoficGraph g;
  g.vertices = 2;
  g.edges = {{0, 0, 1}, {0, 1, 0}, {1, 0, 0}};
  return g;
}

}  // namespace

TEST_CASE("shift_apply moves windows the right way") {
  auto Z = GroupCtx::integers();
  Pattern x = zword({0, 1});  // 0 -> a, 1 -> b
  Pattern y = shift_apply(x, Z.parse("1"), Z);
  CHECK(y.cells == std::map<GroupElement, int>{{GroupElement::lattice({-1}), 0},
                                               {GroupElement::lattice({0}), 1}});
  CHECK(shift_apply(x, Z.identity(), Z) == x);

  auto Z2 = GroupCtx::lattice(2);
  Pattern p;
  p.cells[Z2.parse("(0,0)")] = 0;
  p.cells[Z2.parse("(1,0)")] = 1;
  Pattern q = shift_apply(p, Z2.parse("(0,1)"), Z2);
  CHECK(q.cells == std::map<GroupElement, int>{{Z2.parse("(0,-1)"), 0},
                                               {Z2.parse("(1,-1)"), 1}});
}

TEST_CASE("shift_apply is an action: composition on radius-2 balls") {
  for (auto ctx : {GroupCtx::lattice(2), GroupCtx::free_group(2)}) {
    Pattern x;
    int s = 0;
    for (const auto& g : ctx.ball(ctx.generators(), 1)) x.cells[g] = (s++ % 3);
    auto b2 = ctx.ball(ctx.generators(), 2);
    for (const auto& g : b2)
      for (const auto& h : b2) {
        auto lhs = shift_apply(shift_apply(x, g, ctx), h, ctx);
        auto rhs = shift_apply(x, ctx.mul(h, g), ctx);
        CHECK(lhs == rhs);
      }
  }
}

TEST_CASE("golden-mean language slices are exact") {
  auto X = golden_mean_sft();
  CHECK(X.nonempty());
  CHECK_FALSE(X.nonempty_window_level_only());
  auto s = language(X, zwin({0, 1}));
  CHECK(s.flag == Exactness::Exact);
  CHECK(slice_words(s) ==
        std::set<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}});
}

TEST_CASE("Z languages agree with the word-level oracle") {
  auto Z = GroupCtx::integers();
  struct Case {
    int asz;
    std::vector<std::vector<long long>> sites;
    std::vector<std::vector<int>> syms;
  };
  std::vector<Case> cases = {
      {2, {{0, 1}}, {{1, 1}}},                              // golden mean
      {2, {{0, 1}, {0, 1}}, {{0, 0}, {1, 1}}},              // alternating
      {3, {{0, 1}, {0, 1}, {0, 1}}, {{0, 1}, {1, 2}, {2, 0}}},
      {2, {{0, 2}, {0, 2}}, {{0, 0}, {1, 1}}},              // sparse window
      {2, {{0, 1}, {0, 1}, {0, 1}, {0, 1}}, {{0, 0}, {0, 1}, {1, 0}, {1, 1}}},
  };
  for (const auto& c : cases) {
    std::vector<std::string> alpha;
    for (int i = 0; i < c.asz; ++i) alpha.push_back(std::to_string(i));
    // assemble window = union of sites
    std::set<long long> wset;
    for (const auto& s : c.sites)
      for (long long x : s) wset.insert(x);
    std::vector<GroupElement> win;
    for (long long x : wset) win.push_back(GroupElement::lattice({x}));
    std::vector<Pattern> forb;
    for (std::size_t i = 0; i < c.sites.size(); ++i) {
      // fill unmentioned window cells in every way
      std::vector<long long> missing;
      for (long long x : wset)
        if (std::find(c.sites[i].begin(), c.sites[i].end(), x) == c.sites[i].end())
          missing.push_back(x);
      std::vector<int> fill(missing.size(), 0);
      for (;;) {
        Pattern p;
        for (std::size_t k = 0; k < c.sites[i].size(); ++k)
          p.cells[GroupElement::lattice({c.sites[i][k]})] = c.syms[i][k];
        for (std::size_t k = 0; k < missing.size(); ++k)
          p.cells[GroupElement::lattice({missing[k]})] = fill[k];
        forb.push_back(p);
        int j = (int)fill.size() - 1;
        while (j >= 0 && fill[j] == c.asz - 1) fill[j--] = 0;
        if (j < 0) break;
        ++fill[j];
      }
    }
    auto X = SubshiftPresentation::sft(Z, alpha, win, forb);
    auto O = oracle_of(c.sites, c.syms, c.asz);
    for (int n = 1; n <= 8; ++n) {
      std::vector<GroupElement> A;
      for (long long x = 0; x < n; ++x) A.push_back(GroupElement::lattice({x}));
      auto s = language(X, A);
      CHECK(s.flag == Exactness::Exact);
      CHECK(slice_words(s) == O.language(n));
    }
  }
}

TEST_CASE("full shift language has every pattern") {
  auto Z = GroupCtx::integers();
  auto X = SubshiftPresentation::sft(Z, {"0", "1"}, zwin({0, 1}), {});
  auto s = language(X, zwin({0, 1, 2}));
  CHECK(s.patterns.size() == 8);
  CHECK(s.flag == Exactness::Exact);
}

TEST_CASE("empty Z presentation: exact empty slices") {
  auto Z = GroupCtx::integers();
  std::vector<Pattern> all;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) all.push_back(zword({a, b}));
  auto X = SubshiftPresentation::sft(Z, {"0", "1"}, zwin({0, 1}), all);
  CHECK_FALSE(X.nonempty());
  auto s = language(X, zwin({0}));
  CHECK(s.patterns.empty());
  CHECK(s.flag == Exactness::Exact);
}

TEST_CASE("lattice languages are flagged as upper bounds") {
  auto Z2 = GroupCtx::lattice(2);
  std::vector<GroupElement> win{Z2.parse("(0,0)"), Z2.parse("(1,0)")};
  Pattern f;
  f.cells[Z2.parse("(0,0)")] = 1;
  f.cells[Z2.parse("(1,0)")] = 1;
  auto X = SubshiftPresentation::sft(Z2, {"0", "1"}, win, {f});
  CHECK(X.nonempty());
  CHECK(X.nonempty_window_level_only());
  auto s = language(X, win);
  CHECK(s.flag == Exactness::LocallyAdmissibleUpperBound);
  CHECK(slice_words(s) ==
        std::set<std::vector<int>>{{0, 0}, {0, 1}, {1, 0}});
}

TEST_CASE("language restriction coherence on exact slices") {
  auto X = golden_mean_sft();
  auto B = zwin({0, 1, 2, 3});
  auto A = zwin({1, 3});
  auto sB = language(X, B);
  auto sA = language(X, A);
  std::set<Pattern> restricted;
  for (const auto& p : sB.patterns) restricted.insert(p.restrict_to(A));
  CHECK(restricted == sA.patterns);
}

TEST_CASE("shift metric: first disagreement in enumeration order") {
  auto Z = GroupCtx::integers();
  Pattern x, y;
  for (const auto& g : Z.enumerate(11)) {
    x.cells[g] = 0;
    y.cells[g] = 0;
  }
  auto d = shift_metric(x, y, Z);
  CHECK(d.bound);
  CHECK(d.exponent == 11);

  Pattern a = zword({0}), b = zword({1});
  auto d0 = shift_metric(a, b, Z);
  CHECK_FALSE(d0.bound);
  CHECK(d0.exponent == 0);
  CHECK(d0.value() == 1.0);

  // agree at 0, differ at g1 = 1
  Pattern p = zword({0, 0}, 0), q = zword({0, 1}, 0);
  auto d1 = shift_metric(p, q, Z);
  CHECK_FALSE(d1.bound);
  CHECK(d1.exponent == 1);

  // precision demanded beyond the common window and no disagreement found
  CHECK_THROWS_AS((void)shift_metric(a, zword({0}), Z, 5), Error);
}

TEST_CASE("sofic_is_sft: golden mean graph is a 2-step SFT") {
  auto X = SubshiftPresentation::sofic({"0", "1"}, golden_mean_graph());
  auto d = sofic_is_sft(X);
  CHECK(d.is_sft);
  CHECK(d.window == 2);
  CHECK(d.forbidden_words == std::set<std::vector<int>>{{1, 1}});
}

TEST_CASE("sofic_is_sft: full shift graph") {
  SoficGraph g;
  g.vertices = 1;
  g.edges = {{0, 0, 0}, {0, 0, 1}};
  auto X = SubshiftPresentation::sofic({"0", "1"}, g);
  auto d = sofic_is_sft(X);
  CHECK(d.is_sft);
  CHECK(d.forbidden_words.empty());
}

TEST_CASE("sofic_is_sft: even shift is not an SFT, witnesses check out") {
  auto g = even_shift_graph();
  auto X = SubshiftPresentation::sofic({"0", "1"}, g);
  auto d = sofic_is_sft(X);
  CHECK_FALSE(d.is_sft);
  CHECK(d.tested_up_to >= 1);
  CHECK(d.witnesses.size() == (std::size_t)d.tested_up_to);
  int m = 1;
  for (const auto& w : d.witnesses) {
    CHECK((int)w.v.size() == m++);
    std::vector<int> uv = w.u, vw = w.v, uvw = w.u;
    uv.insert(uv.end(), w.v.begin(), w.v.end());
    vw.insert(vw.end(), w.w.begin(), w.w.end());
    uvw.insert(uvw.end(), w.v.begin(), w.v.end());
    uvw.insert(uvw.end(), w.w.begin(), w.w.end());
    CHECK(graph_accepts(g, uv));
    CHECK(graph_accepts(g, vw));
    CHECK_FALSE(graph_accepts(g, uvw));
  }
}

TEST_CASE("returned SFT presentations match the sofic language") {
  std::vector<SoficGraph> graphs{golden_mean_graph()};
  {
    SoficGraph full;
    full.vertices = 1;
    full.edges = {{0, 0, 0}, {0, 0, 1}};
    graphs.push_back(full);
  }
  {
    // period-3 cycle over {0,1}: 0 0 1 repeating
    SoficGraph c;
    c.vertices = 3;
    c.edges = {{0, 1, 0}, {1, 2, 0}, {2, 0, 1}};
    graphs.push_back(c);
  }
  auto Z = GroupCtx::integers();
  for (const auto& g : graphs) {
    auto X = SubshiftPresentation::sofic({"0", "1"}, g);
    auto d = sofic_is_sft(X);
    REQUIRE(d.is_sft);
    std::vector<GroupElement> win;
    for (int i = 0; i < d.window; ++i) win.push_back(GroupElement::lattice({i}));
    std::vector<Pattern> forb;
    for (const auto& w : d.forbidden_words) {
      Pattern p;
      for (int i = 0; i < d.window; ++i) p.cells[GroupElement::lattice({i})] = w[i];
      forb.push_back(p);
    }
    auto Y = SubshiftPresentation::sft(Z, {"0", "1"}, win, forb);
    for (int n = 1; n <= 10; ++n) {
      std::vector<GroupElement> A;
      for (long long x = 0; x < n; ++x) A.push_back(GroupElement::lattice({x}));
      CHECK(language(X, A).patterns == language(Y, A).patterns);
    }
  }
}

TEST_CASE("minimal forbidden words") {
  auto Xg = SubshiftPresentation::sofic({"0", "1"}, golden_mean_graph());
  CHECK(minimal_forbidden_words(Xg, 6) == std::set<std::vector<int>>{{1, 1}});

  auto Xe = SubshiftPresentation::sofic({"0", "1"}, even_shift_graph());
  std::set<std::vector<int>> expect;
  for (int k = 0; 2 * k + 3 <= 12; ++k) {
    std::vector<int> w{1};
    for (int i = 0; i < 2 * k + 1; ++i) w.push_back(0);
    w.push_back(1);
    expect.insert(w);
  }
  CHECK(minimal_forbidden_words(Xe, 12) == expect);
}

TEST_CASE("transfer graph utilities behave") {
  auto X = SubshiftPresentation::sofic({"0", "1"}, golden_mean_graph());
  const auto& G = *X.zgraph();
  CHECK(G.irreducible());
  CHECK(G.period() == 1);
  CHECK(G.primitive_index() >= 1);
  // the period-3 cycle has period 3 and is not primitive
  SoficGraph c;
  c.vertices = 3;
  c.edges = {{0, 1, 0}, {1, 2, 0}, {2, 0, 1}};
  auto Y = SubshiftPresentation::sofic({"0", "1"}, c);
  CHECK(Y.zgraph()->period() == 3);
  CHECK(Y.zgraph()->primitive_index() == -1);
  CHECK(Y.zgraph()->connects(0, 0, 3));
  CHECK_FALSE(Y.zgraph()->connects(0, 0, 4));
  CHECK(Y.zgraph()->connects(0, 0, 300));
  auto w = Y.zgraph()->path_label(0, 0, 6);
  CHECK(w == std::vector<int>{0, 0, 1, 0, 0, 1});
}
