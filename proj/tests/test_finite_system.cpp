#include "doctest.h"

#include <algorithm>
#include <random>
#include <set>

#include "sftlab/finite_system.hpp"

using namespace sftlab;

namespace {

FiniteSystem fs1() {
  // three states on a cycle a -> b -> c -> a, uniform metric
  std::vector<std::vector<double>> d{{0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
  return FiniteSystem::make(GroupCtx::integers(), {"a", "b", "c"}, {{1, 2, 0}}, d);
}

FiniteSystem z2_swap() {
  // Z^2: first generator acts trivially, second swaps a <-> b
  return FiniteSystem::make(GroupCtx::lattice(2), {"a", "b"}, {{0, 1}, {1, 0}});
}

}  // namespace

TEST_CASE("apply: cycles, inverses, huge exponents") {
  auto sys = fs1();
  auto Z = sys.ctx();
  int a = sys.state("a");
  CHECK(sys.apply(Z.identity(), a) == a);
  CHECK(sys.apply(Z.parse("2"), a) == sys.state("c"));
  CHECK(sys.apply(Z.parse("-1"), a) == sys.state("c"));
  CHECK(sys.apply(Z.parse("3000000000000"), a) == a);  // multiple of 3

  auto sw = z2_swap();
  CHECK(sw.apply(sw.ctx().parse("(5,3)"), sw.state("a")) == sw.state("b"));
  CHECK(sw.apply(sw.ctx().parse("(7,0)"), sw.state("a")) == sw.state("a"));
}

TEST_CASE("apply on free groups composes right-to-left") {
  auto F2 = GroupCtx::free_group(2);
  // a: 3-cycle, b: transposition of first two states
  auto sys = FiniteSystem::make(F2, {"x", "y", "z"}, {{1, 2, 0}, {1, 0, 2}});
  int x = 0;
  // Phi_{ab}(x) = Phi_a(Phi_b(x))
  int via_word = sys.apply(F2.parse("a b"), x);
  int composed = sys.apply(F2.parse("a"), sys.apply(F2.parse("b"), x));
  CHECK(via_word == composed);
  CHECK(sys.apply(F2.parse("a a'"), x) == x);
  // exhaustive composition law on the radius-2 ball
  auto ball = F2.ball(F2.generators(), 2);
  for (const auto& g : ball)
    for (const auto& h : ball)
      for (int s = 0; s < 3; ++s)
        CHECK(sys.apply(F2.mul(g, h), s) == sys.apply(g, sys.apply(h, s)));
}

TEST_CASE("construction rejects bad input") {
  auto Z = GroupCtx::integers();
  CHECK_THROWS_AS(FiniteSystem::make(Z, {"a", "b", "c"}, {{0, 0, 1}}), Error);
  CHECK_THROWS_AS(FiniteSystem::make(Z, {"a", "b"}, {{0, 1}, {1, 0}}), Error);
  // Z^2 with non-commuting permutations
  CHECK_THROWS_AS(
      FiniteSystem::make(GroupCtx::lattice(2), {"a", "b", "c"},
                         {{1, 0, 2}, {0, 2, 1}}),
      Error);
  // same pair is fine over F_2
  CHECK_NOTHROW(FiniteSystem::make(GroupCtx::free_group(2), {"a", "b", "c"},
                                   {{1, 0, 2}, {0, 2, 1}}));
  // broken metrics
  CHECK_THROWS_AS(FiniteSystem::make(Z, {"a", "b"}, {{1, 0}},
                                     std::vector<std::vector<double>>{{0, 1}, {2, 0}}),
                  Error);
  CHECK_THROWS_AS(FiniteSystem::make(Z, {"a", "b"}, {{1, 0}},
                                     std::vector<std::vector<double>>{{0, 0}, {0, 0}}),
                  Error);
}

TEST_CASE("cover construction and flags") {
  auto sys = fs1();
  auto U = Cover::of(sys, {{0}, {1, 2}});
  CHECK(U.partition);
  auto V = Cover::of(sys, {{0, 1}, {1, 2}});
  CHECK_FALSE(V.partition);
  CHECK(Cover::whole(sys).blocks.size() == 1);
  CHECK(Cover::singletons(sys).blocks.size() == 3);
  CHECK_THROWS_AS(Cover::of(sys, {{0, 1}}), Error);      // misses c
  CHECK_THROWS_AS(Cover::of(sys, {{}, {0, 1, 2}}), Error);  // empty block
}

TEST_CASE("cover_ops: refinement, join, iota") {
  auto sys = fs1();
  auto whole = Cover::whole(sys);
  auto sing = Cover::singletons(sys);
  auto U = Cover::of(sys, {{0}, {1, 2}});

  auto ops = cover_ops(sys, whole, U);
  CHECK(ops.refines);
  CHECK(ops.iota == std::vector<int>{0, 0});

  auto ops2 = cover_ops(sys, U, sing, true);
  CHECK(ops2.refines);
  CHECK(ops2.iota == std::vector<int>{0, 1, 1});

  auto A = Cover::of(sys, {{0, 1}, {2}});
  auto B = Cover::of(sys, {{0}, {1, 2}});
  auto j = cover_ops(sys, A, B).join;
  CHECK(j.same_blocks(sing));

  CHECK_FALSE(cover_ops(sys, B, A).refines);
  CHECK_THROWS_AS(cover_ops(sys, B, A, true), Error);
}

TEST_CASE("join is associative and commutative on random covers") {
  std::mt19937 rng(42);
  auto Z = GroupCtx::integers();
  for (int trial = 0; trial < 30; ++trial) {
    int n = 3 + (int)(rng() % 4);
    std::vector<std::string> names;
    std::vector<int> img(n);
    for (int i = 0; i < n; ++i) {
      names.push_back("s" + std::to_string(i));
      img[i] = i;
    }
    auto sys = FiniteSystem::make(Z, names, {img});
    auto rand_cover = [&] {
      std::vector<std::vector<int>> blocks(1 + rng() % 3);
      for (int x = 0; x < n; ++x) blocks[rng() % blocks.size()].push_back(x);
      for (int x = 0; x < n; ++x)
        if (rng() % 3 == 0) blocks[rng() % blocks.size()].push_back(x);
      blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                                  [](auto& b) { return b.empty(); }),
                   blocks.end());
      return Cover::of(sys, blocks);
    };
    auto U = rand_cover(), V = rand_cover(), W = rand_cover();
    auto UV = cover_ops(sys, U, V).join;
    auto VU = cover_ops(sys, V, U).join;
    CHECK(UV.same_blocks(VU));
    auto l = cover_ops(sys, cover_ops(sys, U, V).join, W).join;
    auto r = cover_ops(sys, U, cover_ops(sys, V, W).join).join;
    CHECK(l.same_blocks(r));
    if (U.partition) CHECK(cover_ops(sys, U, U).join.same_blocks(U));
  }
}

TEST_CASE("geometry: diameter, Lebesgue number, star") {
  auto sys = fs1();
  auto whole = Cover::whole(sys);
  auto g = geometry(sys, whole);
  CHECK(g.diam == 1.0);
  CHECK(g.lebesgue == 2.0);  // capped at diam(X) + 1

  auto sing = Cover::singletons(sys);
  auto gs = geometry(sys, sing);
  CHECK(gs.diam == 0.0);
  CHECK(gs.lebesgue == 1.0);  // open balls of radius 1 are singletons

  auto U = Cover::of(sys, {{0, 1}, {1, 2}});
  CHECK(star({0}, U) == std::vector<int>{0, 1});
  CHECK(star({1}, U) == std::vector<int>{0, 1, 2});

  auto nom = FiniteSystem::make(GroupCtx::integers(), {"a", "b"}, {{1, 0}});
  CHECK_THROWS_AS((void)geometry(nom, Cover::whole(nom)), Error);
}

TEST_CASE("Lebesgue number is maximal and its balls fit blocks") {
  std::mt19937 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    int n = 4 + (int)(rng() % 9);  // up to 12
    // distinct points in a small grid, L1 metric
    std::set<std::pair<int, int>> pts;
    while ((int)pts.size() < n)
      pts.insert({(int)(rng() % 10), (int)(rng() % 10)});
    std::vector<std::pair<int, int>> p(pts.begin(), pts.end());
    std::vector<std::vector<double>> d(n, std::vector<double>(n, 0));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        d[i][j] = std::abs(p[i].first - p[j].first) +
                  std::abs(p[i].second - p[j].second);
    std::vector<std::string> names;
    std::vector<int> img(n);
    for (int i = 0; i < n; ++i) {
      names.push_back("s" + std::to_string(i));
      img[i] = i;
    }
    auto sys = FiniteSystem::make(GroupCtx::integers(), names, {img}, d);
    std::vector<std::vector<int>> blocks(2 + rng() % 2);
    for (int x = 0; x < n; ++x) blocks[rng() % blocks.size()].push_back(x);
    for (int x = 0; x < n; ++x)
      if (rng() % 2) blocks[rng() % blocks.size()].push_back(x);
    blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                                [](auto& b) { return b.empty(); }),
                 blocks.end());
    auto U = Cover::of(sys, blocks);
    auto g = geometry(sys, U);

    auto ball_fits = [&](double delta) {
      for (int x = 0; x < n; ++x) {
        std::set<int> ball;
        for (int y = 0; y < n; ++y)
          if (sys.dist(x, y) < delta) ball.insert(y);
        bool inside = false;
        for (const auto& b : U.blocks) {
          std::set<int> bs(b.begin(), b.end());
          inside = inside || std::includes(bs.begin(), bs.end(), ball.begin(),
                                           ball.end());
        }
        if (!inside) return false;
      }
      return true;
    };
    CHECK(ball_fits(g.lebesgue * (1 - 1e-9)));
    // maximal among candidate radii
    std::set<double> cands{sys.space_diameter() + 1};
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (d[i][j] > 0) cands.insert(d[i][j]);
    for (double c : cands)
      if (c > g.lebesgue) CHECK_FALSE(ball_fits(c));
  }
}

TEST_CASE("orbit-pattern classes: frozen examples") {
  auto sys = fs1();
  auto S = std::vector<GroupElement>{sys.ctx().parse("1")};

  auto sing = orbit_pattern_classes(sys, Cover::singletons(sys), S);
  CHECK(sing.same_blocks(Cover::singletons(sys)));

  // phase-shifted itineraries split {b,c}
  auto U = Cover::of(sys, {{0}, {1, 2}});
  auto cls = orbit_pattern_classes(sys, U, S);
  CHECK(cls.same_blocks(Cover::singletons(sys)));

  // (0 1)(2 3) with blocks {0,2},{1,3} stays two classes
  auto Z = GroupCtx::integers();
  auto four = FiniteSystem::make(Z, {"p", "q", "r", "s"}, {{1, 0, 3, 2}});
  auto U2 = Cover::of(four, {{0, 2}, {1, 3}});
  auto cls2 = orbit_pattern_classes(four, U2, {Z.parse("1")});
  CHECK(cls2.same_blocks(U2));
}

TEST_CASE("orbit-pattern classes agree with itinerary brute force") {
  std::mt19937 rng(99);
  auto rand_perm = [&](int n) {
    std::vector<int> p(n);
    for (int i = 0; i < n; ++i) p[i] = i;
    std::shuffle(p.begin(), p.end(), rng);
    return p;
  };
  for (int trial = 0; trial < 25; ++trial) {
    int n = 3 + (int)(rng() % 6);  // up to 8
    std::vector<std::string> names;
    for (int i = 0; i < n; ++i) names.push_back("s" + std::to_string(i));
    int mode = trial % 3;
    GroupCtx ctx = mode == 0   ? GroupCtx::integers()
                   : mode == 1 ? GroupCtx::lattice(2)
                               : GroupCtx::free_group(2);
    std::vector<std::vector<int>> gens;
    if (mode == 0) {
      gens = {rand_perm(n)};
    } else if (mode == 1) {
      // commuting pair: powers of one permutation
      auto s = rand_perm(n);
      auto sq = s;
      for (int i = 0; i < n; ++i) sq[i] = s[s[i]];
      gens = {s, sq};
    } else {
      gens = {rand_perm(n), rand_perm(n)};
    }
    auto sys = FiniteSystem::make(ctx, names, gens);
    // random starting partition
    std::vector<std::vector<int>> blocks(1 + rng() % 3);
    for (int x = 0; x < n; ++x) blocks[rng() % blocks.size()].push_back(x);
    blocks.erase(std::remove_if(blocks.begin(), blocks.end(),
                                [](auto& b) { return b.empty(); }),
                 blocks.end());
    auto U = Cover::of(sys, blocks);
    auto S = ctx.generators();
    auto cls = orbit_pattern_classes(sys, U, S);

    // split depth is < |X|, so radius 7 separates everything for n <= 8;
    // free-group balls blow up exponentially beyond that
    int radius = ctx.kind() == GroupKind::Free ? std::min(2 * n, 7) : 2 * n;
    auto ball = ctx.ball(S, radius);
    for (int x = 0; x < n; ++x)
      for (int y = 0; y < n; ++y) {
        bool same_itin = true;
        for (const auto& g : ball)
          same_itin =
              same_itin && U.block_of(sys.apply(g, x)) == U.block_of(sys.apply(g, y));
        CHECK((cls.block_of(x) == cls.block_of(y)) == same_itin);
      }
    // fixpoint is stable
    auto again = orbit_pattern_classes(sys, cls, S);
    CHECK(again.same_blocks(cls));
  }
}
