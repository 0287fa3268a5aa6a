#include "sftlab/orbit_spaces.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <sstream>

namespace sftlab {
namespace {

std::string block_name(const FiniteSystem& sys, const std::vector<int>& block) {
  std::string n = "{";
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (i) n += ",";
    n += sys.states()[block[i]];
  }
  return n + "}";
}

std::vector<std::vector<char>> block_membership(const FiniteSystem& sys,
                                                const Cover& U) {
  std::vector<std::vector<char>> in(U.blocks.size(),
                                    std::vector<char>(sys.size(), 0));
  for (std::size_t b = 0; b < U.blocks.size(); ++b)
    for (int x : U.blocks[b]) in[b][x] = 1;
  return in;
}

// candidate blocks at one site: those containing the site value and every
// incoming shifted value
std::vector<int> site_mask(const std::vector<std::vector<char>>& in, int xv,
                           const std::vector<int>& inputs) {
  std::vector<int> m;
  for (std::size_t b = 0; b < in.size(); ++b) {
    if (!in[b][xv]) continue;
    bool ok = true;
    for (int v : inputs)
      if (!in[b][v]) {
        ok = false;
        break;
      }
    if (ok) m.push_back((int)b);
  }
  return m;
}

}  // namespace

PseudoOrbitSpace build_po_space(const FiniteSystem& sys, const Cover& U,
                                const std::vector<GroupElement>& S) {
  const GroupCtx& ctx = sys.ctx();
  require(!S.empty(), Errc::NotApplicable, "shift set must be nonempty");
  std::vector<GroupElement> shifts;
  for (const auto& s : S) {
    ctx.validate(s);
    if (std::find(shifts.begin(), shifts.end(), s) == shifts.end())
      shifts.push_back(s);
  }
  std::vector<GroupElement> window{ctx.identity()};
  for (const auto& s : shifts)
    if (!(s == ctx.identity())) window.push_back(s);

  const int nb = (int)U.blocks.size();
  double combos = std::pow((double)nb, (double)window.size());
  require(combos <= (double)(1 << 20), Errc::NotApplicable,
          "window assignment enumeration too large");

  std::vector<std::string> names;
  names.reserve(nb);
  for (const auto& b : U.blocks) names.push_back(block_name(sys, b));

  auto in = block_membership(sys, U);
  // images[s][x] = Phi_s(x), for the window position of s
  std::vector<std::vector<int>> images(window.size(),
                                       std::vector<int>(sys.size()));
  for (std::size_t i = 0; i < window.size(); ++i)
    for (int x = 0; x < sys.size(); ++x) images[i][x] = sys.apply(window[i], x);

  std::vector<Pattern> forbidden, allowed;
  std::vector<int> assign(window.size(), 0);
  for (;;) {
    // a witness is a state in the anchor block whose every shift lands in
    // the assigned block there
    bool witness = false;
    for (int x : U.blocks[assign[0]]) {
      bool ok = true;
      for (std::size_t i = 1; i < window.size() && ok; ++i)
        ok = in[assign[i]][images[i][x]];
      if (ok) {
        witness = true;
        break;
      }
    }
    Pattern p = Pattern::on(window, assign);
    (witness ? allowed : forbidden).push_back(std::move(p));

    std::size_t d = 0;
    while (d < assign.size() && ++assign[d] == nb) assign[d++] = 0;
    if (d == assign.size()) break;
  }

  SubshiftPresentation pres =
      SubshiftPresentation::sft(ctx, names, window, forbidden);
  return PseudoOrbitSpace{sys,   U,     shifts,          window,
                          names, pres,  std::move(allowed)};
}

OrbitSpace::OrbitSpace(FiniteSystem base, Cover u)
    : base_(std::move(base)), cover_(std::move(u)) {
  require(cover_.partition, Errc::PartitionRequired,
          "orbit space requires a partition");
  classes_ =
      orbit_pattern_classes(base_, cover_, base_.ctx().generators(), &rounds_);
  // classes must be shift-stable: the class of Phi_g(x) depends only on the
  // class of x
  for (int c = 0; c < point_count(); ++c)
    for (const auto& g : base_.ctx().generators())
      for (int x : classes_.blocks[c])
        if (class_of(base_.apply(g, x)) != class_of(base_.apply(g, rep(c))))
          fail(Errc::Internal, "orbit classes are not shift-stable");
}

int OrbitSpace::shift(const GroupElement& g, int cls) const {
  return class_of(base_.apply(g, rep(cls)));
}

Pattern OrbitSpace::pattern_of(int cls,
                               const std::vector<GroupElement>& window) const {
  Pattern p;
  int r = rep(cls);
  for (const auto& g : window)
    p.cells[g] = cover_.block_of(base_.apply(g, r));
  return p;
}

std::set<Pattern> OrbitSpace::slice(
    const std::vector<GroupElement>& window) const {
  std::set<Pattern> s;
  for (int c = 0; c < point_count(); ++c) s.insert(pattern_of(c, window));
  return s;
}

OrbitSpace build_orbit_space(const FiniteSystem& sys, const Cover& U) {
  return OrbitSpace(sys, U);
}

int FiniteConfig::value(const FiniteSystem& sys, const GroupElement& g) const {
  require(base_state >= 0 && base_state < sys.size(), Errc::Inconsistency,
          "configuration state out of range");
  auto it = overrides.find(g);
  int v;
  if (it != overrides.end())
    v = it->second;
  else
    v = background == Background::Orbit ? sys.apply(g, base_state) : base_state;
  require(v >= 0 && v < sys.size(), Errc::Inconsistency,
          "configuration state out of range");
  return v;
}

PoVerdict is_pseudo_orbit(const FiniteSystem& sys, const FiniteConfig& seq,
                          const Cover& U, const std::vector<GroupElement>& S) {
  const GroupCtx& ctx = sys.ctx();
  for (const auto& s : S) ctx.validate(s);
  auto in = block_membership(sys, U);

  // sites whose constraint can differ from the background's
  std::set<GroupElement> affected;
  for (const auto& [d, v] : seq.overrides) {
    (void)v;
    affected.insert(d);
    for (const auto& s : S) affected.insert(ctx.mul(s, d));
  }

  auto mask_at = [&](const GroupElement& h) {
    std::vector<int> inputs;
    inputs.reserve(S.size());
    for (const auto& s : S)
      inputs.push_back(sys.apply(s, seq.value(sys, ctx.mul(ctx.inv(s), h))));
    return site_mask(in, seq.value(sys, h), inputs);
  };

  PoVerdict v;
  // a constant background must satisfy the intersection at generic sites;
  // an orbit background always does (all inputs equal the site value)
  if (seq.background == FiniteConfig::Background::Constant) {
    std::vector<int> inputs;
    for (const auto& s : S) inputs.push_back(sys.apply(s, seq.base_state));
    if (site_mask(in, seq.base_state, inputs).empty()) {
      GroupElement g;
      for (int n = 1;; n *= 2) {
        bool found = false;
        for (const auto& cand : ctx.enumerate(n))
          if (!affected.count(cand)) {
            g = cand;
            found = true;
            break;
          }
        if (found) break;
      }
      v.yes = false;
      v.offending = g;
      v.detail =
          "constant background admits no common block (fails at every "
          "unaffected site)";
      return v;
    }
  }

  for (const auto& h : affected) {
    auto m = mask_at(h);
    if (m.empty()) {
      v.yes = false;
      v.offending = h;
      v.detail = "no block contains the site value and all incoming shifts at " +
                 ctx.to_string(h);
      return v;
    }
    v.witness[h] = m[0];
  }
  if (!affected.count(ctx.identity()))
    v.witness[ctx.identity()] = mask_at(ctx.identity())[0];

  v.yes = true;
  std::ostringstream d;
  d << "pseudo-orbit pattern exists; " << affected.size()
    << " perturbed site(s) checked";
  v.detail = d.str();
  return v;
}

namespace {

enum class Tri { In, Out, Unknown };

Tri cylinder_member(const Pattern& x, const Pattern& cyl) {
  bool undecided = false;
  for (const auto& [g, sym] : cyl.cells) {
    if (!x.has(g)) {
      undecided = true;
      continue;
    }
    if (x.at(g) != sym) return Tri::Out;
  }
  return undecided ? Tri::Unknown : Tri::In;
}

Tri union_member(const Pattern& x, const std::vector<Pattern>& block) {
  bool unknown = false;
  for (const auto& cyl : block) {
    Tri t = cylinder_member(x, cyl);
    if (t == Tri::In) return Tri::In;
    if (t == Tri::Unknown) unknown = true;
  }
  return unknown ? Tri::Unknown : Tri::Out;
}

}  // namespace

PoVerdict is_pseudo_orbit_cylinder(const GroupCtx& ctx,
                                   const std::map<GroupElement, Pattern>& seq,
                                   const CylinderCover& U,
                                   const std::vector<GroupElement>& S) {
  require(!U.blocks.empty(), Errc::NotACover, "cover has no blocks");
  PoVerdict v;
  int checked = 0;
  for (const auto& [h, xh] : seq) {
    // the constraint at h is determined only when every input site is given
    std::vector<Pattern> values{xh};
    bool complete = true;
    for (const auto& s : S) {
      auto it = seq.find(ctx.mul(ctx.inv(s), h));
      if (it == seq.end()) {
        complete = false;
        break;
      }
      values.push_back(shift_apply(it->second, s, ctx));
    }
    if (!complete) continue;
    ++checked;

    bool unknown_block = false;
    int candidate = -1;
    for (std::size_t b = 0; b < U.blocks.size() && candidate < 0; ++b) {
      bool all_in = true, any_out = false;
      for (const auto& val : values) {
        Tri t = union_member(val, U.blocks[b]);
        if (t != Tri::In) all_in = false;
        if (t == Tri::Out) any_out = true;
      }
      if (all_in)
        candidate = (int)b;
      else if (!any_out)
        unknown_block = true;
    }
    if (candidate >= 0) {
      v.witness[h] = candidate;
      continue;
    }
    if (unknown_block)
      fail(Errc::InsufficientWindow,
           "pattern windows cannot decide block membership at " +
               ctx.to_string(h));
    v.yes = false;
    v.offending = h;
    v.detail = "no block contains the site value and all incoming shifts at " +
               ctx.to_string(h);
    return v;
  }
  v.yes = true;
  std::ostringstream d;
  d << "pseudo-orbit pattern exists on the given window; " << checked
    << " site(s) checked";
  v.detail = d.str();
  return v;
}

int ShadowingDecision::config_value(const FiniteSystem& sys,
                                    const std::vector<GroupElement>& S,
                                    const GroupElement& g) const {
  const GroupCtx& ctx = sys.ctx();
  Subgroup H(ctx, S);
  for (const auto& ch : choices) {
    GroupElement rel = ctx.mul(g, ctx.inv(ch.rep));
    if (H.contains(rel)) return sys.apply(rel, ch.state);
  }
  fail(Errc::Internal, "site lies outside the certified cosets");
}

ShadowingDecision check_shadowing_td(const FiniteSystem& sys,
                                     const std::vector<GroupElement>& S,
                                     const Cover& U) {
  const GroupCtx& ctx = sys.ctx();
  require(U.partition, Errc::PartitionRequired,
          "shadowing decision requires a partition");
  require(!S.empty(), Errc::NotApplicable, "shift set must be nonempty");
  for (const auto& s : S) ctx.validate(s);

  OrbitSpace os(sys, U);
  const int nc = os.point_count();
  require(nc <= 64, Errc::NotApplicable, "too many orbit classes");

  int s_rad = 0;
  for (const auto& s : S) s_rad = std::max(s_rad, (int)ctx.norm(s));
  const int R = std::max(s_rad, os.distinguishing_radius()) + 1;
  auto ball = ctx.ball(ctx.generators(), R);

  // group the ball sites into cosets of <S>; pseudo-orbits at the singleton
  // partition are exactly the configurations equivariant on each coset, so
  // their restriction to the ball is one free state choice per coset class
  Subgroup H(ctx, S);
  std::vector<GroupElement> reps;
  std::vector<std::vector<int>> class_sites;
  std::vector<int> site_class(ball.size(), -1);
  for (std::size_t i = 0; i < ball.size(); ++i) {
    for (std::size_t k = 0; k < reps.size(); ++k)
      if (H.contains(ctx.mul(ball[i], ctx.inv(reps[k])))) {
        site_class[i] = (int)k;
        break;
      }
    if (site_class[i] < 0) {
      site_class[i] = (int)reps.size();
      reps.push_back(ball[i]);
      class_sites.emplace_back();
    }
    class_sites[site_class[i]].push_back((int)i);
  }
  const int K = (int)reps.size();

  // orbit-class block itineraries over the ball
  std::vector<std::vector<int>> pat(nc, std::vector<int>(ball.size()));
  for (int c = 0; c < nc; ++c)
    for (std::size_t i = 0; i < ball.size(); ++i)
      pat[c][i] = U.block_of(sys.apply(ball[i], os.rep(c)));

  // matches[k][z]: orbit classes whose pattern agrees on coset class k with
  // the choice z placed at its representative
  const std::uint64_t full =
      nc == 64 ? ~0ull : ((std::uint64_t)1 << nc) - 1;
  std::vector<std::vector<std::uint64_t>> matches(
      K, std::vector<std::uint64_t>(sys.size(), 0));
  for (int k = 0; k < K; ++k)
    for (int z = 0; z < sys.size(); ++z) {
      std::uint64_t m = 0;
      for (int c = 0; c < nc; ++c) {
        bool ok = true;
        for (int i : class_sites[k]) {
          int val = sys.apply(ctx.mul(ball[i], ctx.inv(reps[k])), z);
          if (U.block_of(val) != pat[c][i]) {
            ok = false;
            break;
          }
        }
        if (ok) m |= (std::uint64_t)1 << c;
      }
      matches[k][z] = m;
    }

  // the inclusion of the singleton pseudo-orbit space into the orbit space
  // holds iff every choice vector keeps some orbit class alive on the whole
  // ball; search the reachable alive-sets, preferring low state indices so a
  // failure reconstructs to the simplest defeating configuration
  std::vector<std::map<std::uint64_t, std::pair<std::uint64_t, int>>> layers(
      K + 1);
  layers[0][full] = {full, -1};
  bool defeated = false;
  for (int k = 0; k < K && !defeated; ++k)
    for (const auto& [mask, src] : layers[k]) {
      (void)src;
      for (int z = 0; z < sys.size() && !defeated; ++z) {
        std::uint64_t next = mask & matches[k][z];
        if (!layers[k + 1].count(next)) layers[k + 1][next] = {mask, z};
        if (next == 0) defeated = true;
      }
      if (defeated) break;
    }

  ShadowingDecision out;
  out.window_radius = R;
  std::ostringstream d;
  if (!defeated) {
    out.holds = true;
    out.refinement = Cover::singletons(sys);
    d << "every singleton pseudo-orbit matches an orbit pattern on the ball "
         "of radius "
      << R << " (" << K << " coset class(es), " << nc << " orbit class(es))";
    out.detail = d.str();

    // certificate re-check: the block map applied to each allowed window
    // pattern of the singleton pseudo-orbit space lands in the orbit space's
    // window slice
    auto po = build_po_space(sys, out.refinement, S);
    auto orbit_slice = os.slice(po.window);
    bool ok = true;
    for (const auto& p : po.allowed) {
      Pattern q;
      for (const auto& [g, v] : p.cells) q.cells[g] = U.block_of(v);
      if (!orbit_slice.count(q)) {
        ok = false;
        break;
      }
    }
    if (!ok) fail(Errc::Internal, "window certificate re-check failed");
    out.reverified = true;
    return out;
  }

  // reconstruct the defeating choice per coset class
  int kill = -1;
  for (int k = 1; k <= K && kill < 0; ++k)
    if (layers[k].count(0)) kill = k;
  std::vector<int> choice(K, 0);
  std::uint64_t cur = 0;
  for (int k = kill; k > 0; --k) {
    auto [prev, z] = layers[k].at(cur);
    choice[k - 1] = z;
    cur = prev;
  }
  out.holds = false;
  out.choices.reserve(K);
  for (int k = 0; k < K; ++k)
    out.choices.push_back(CosetChoice{reps[k], choice[k]});

  // for every state, a site where the configuration leaves its orbit pattern
  for (int x0 = 0; x0 < sys.size(); ++x0) {
    for (std::size_t i = 0; i < ball.size(); ++i) {
      int k = site_class[i];
      int cfg = sys.apply(ctx.mul(ball[i], ctx.inv(reps[k])), choice[k]);
      if (U.block_of(cfg) != U.block_of(sys.apply(ball[i], x0))) {
        out.defeats[x0] = ball[i];
        break;
      }
    }
    if (!out.defeats.count(x0))
      fail(Errc::Internal, "defeating configuration fails to defeat a state");
  }
  d << "a pseudo-orbit over the singleton partition escapes every orbit "
       "pattern within radius "
    << R;
  out.detail = d.str();
  return out;
}

Lemma41Report verify_lemma41(const FiniteSystem& sys, const Cover& U,
                             const Cover& V,
                             const std::vector<GroupElement>& S) {
  const GroupCtx& ctx = sys.ctx();
  require(U.partition && V.partition, Errc::PartitionRequired,
          "both covers must be partitions");
  auto ops = cover_ops(sys, U, V, true);  // throws unless V refines U

  OrbitSpace ou(sys, U), ov(sys, V);
  const int R =
      std::max(ou.distinguishing_radius(), ov.distinguishing_radius()) + 1;
  auto ball = ctx.ball(ctx.generators(), R);

  auto map_blocks = [&](const Pattern& p) {
    Pattern q;
    for (const auto& [g, b] : p.cells) q.cells[g] = ops.iota[b];
    return q;
  };

  Lemma41Report rep;
  rep.window_radius = R;

  // (1) the block map carries the V-orbit space onto the U-orbit space
  {
    std::set<Pattern> lhs, rhs = ou.slice(ball);
    for (int c = 0; c < ov.point_count(); ++c)
      lhs.insert(map_blocks(ov.pattern_of(c, ball)));
    rep.orbit_image_equal = lhs == rhs;
  }

  // (2a) every U-orbit pattern is the image of a V-pseudo-orbit pattern:
  // the V-itinerary of the same state works, and it satisfies the
  // intersection constraint at every anchor in the ball
  {
    auto vin = block_membership(sys, V);
    bool ok = true;
    for (int c = 0; c < ou.point_count() && ok; ++c) {
      int r = ou.rep(c);
      for (const auto& g : ball) {
        // anchor constraint: some witness in the block at g shifts into the
        // blocks at sg for every s
        bool witness = false;
        for (int y : V.blocks[V.block_of(sys.apply(g, r))]) {
          bool all = true;
          for (const auto& s : S)
            if (!vin[V.block_of(sys.apply(ctx.mul(s, g), r))][sys.apply(s, y)]) {
              all = false;
              break;
            }
          if (all) {
            witness = true;
            break;
          }
        }
        if (!witness) {
          ok = false;
          break;
        }
      }
      if (ok) {
        Pattern vpat;
        for (const auto& g : ball) vpat.cells[g] = V.block_of(sys.apply(g, r));
        ok = map_blocks(vpat) == ou.pattern_of(c, ball);
      }
    }
    rep.orbit_inside_iota_po = ok;
  }

  // (2b) the block map sends every allowed V window pattern to an allowed U
  // window pattern; window languages are exact, so this settles the
  // inclusion of the pseudo-orbit spaces
  {
    auto pov = build_po_space(sys, V, S);
    auto pou = build_po_space(sys, U, S);
    std::set<Pattern> allowed_u(pou.allowed.begin(), pou.allowed.end());
    bool ok = true;
    for (const auto& p : pov.allowed)
      if (!allowed_u.count(map_blocks(p))) {
        ok = false;
        break;
      }
    rep.iota_po_inside_po = ok;
  }

  // block map and shifts commute on all tested patterns
  {
    bool ok = true;
    for (int c = 0; c < ov.point_count() && ok; ++c) {
      Pattern p = ov.pattern_of(c, ball);
      for (const auto& g : ctx.generators())
        if (!(shift_apply(map_blocks(p), g, ctx) ==
              map_blocks(shift_apply(p, g, ctx)))) {
          ok = false;
          break;
        }
    }
    rep.shift_commutes = ok;
  }

  std::ostringstream d;
  d << ov.point_count() << " V-class(es), " << ou.point_count()
    << " U-class(es), ball radius " << R;
  rep.detail = d.str();
  return rep;
}

ReconstructResult reconstruct(const FiniteSystem& sys,
                              const std::vector<Cover>& chain,
                              const std::vector<int>& picks, int radius) {
  const GroupCtx& ctx = sys.ctx();
  require(chain.size() == picks.size(), Errc::Inconsistency,
          "one pick per chain partition required");

  std::vector<char> alive(sys.size(), 1);
  for (std::size_t i = 0; i < chain.size(); ++i) {
    require(chain[i].partition, Errc::PartitionRequired,
            "chain members must be partitions");
    require(picks[i] >= 0 && picks[i] < (int)chain[i].blocks.size(),
            Errc::Inconsistency, "pick out of range");
    std::vector<char> inb(sys.size(), 0);
    for (int x : chain[i].blocks[picks[i]]) inb[x] = 1;
    for (int x = 0; x < sys.size(); ++x) alive[x] = alive[x] && inb[x];
  }

  std::vector<int> survivors;
  for (int x = 0; x < sys.size(); ++x)
    if (alive[x]) survivors.push_back(x);
  require(!survivors.empty(), Errc::Inconsistency,
          "no point lies in every picked block");
  if (survivors.size() > 1) {
    std::string who;
    for (std::size_t i = 0; i < survivors.size(); ++i) {
      if (i) who += ", ";
      who += sys.states()[survivors[i]];
    }
    fail(Errc::AmbiguousReconstruction,
         "chain does not separate points; survivors: " + who);
  }

  ReconstructResult res;
  res.point = survivors[0];

  std::vector<OrbitSpace> spaces;
  spaces.reserve(chain.size());
  for (const auto& u : chain) spaces.emplace_back(sys, u);

  for (const auto& g : ctx.ball(ctx.generators(), radius)) {
    std::vector<char> t(sys.size(), 1);
    for (std::size_t i = 0; i < chain.size(); ++i) {
      // union over orbit-space points whose anchor block is the pick of the
      // block those points show at g
      std::vector<char> u(sys.size(), 0);
      for (int c = 0; c < spaces[i].point_count(); ++c) {
        if (chain[i].block_of(spaces[i].rep(c)) != picks[i]) continue;
        for (int y :
             chain[i].blocks[chain[i].block_of(sys.apply(g, spaces[i].rep(c)))])
          u[y] = 1;
      }
      for (int x = 0; x < sys.size(); ++x) t[x] = t[x] && u[x];
    }
    std::vector<int> img;
    for (int x = 0; x < sys.size(); ++x)
      if (t[x]) img.push_back(x);
    if (img.size() != 1 || img[0] != sys.apply(g, res.point))
      fail(Errc::Internal, "image formula disagrees with direct application");
    res.images[g] = img[0];
  }
  return res;
}

}  // namespace sftlab
