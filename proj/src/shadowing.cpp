#include "sftlab/shadowing.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "sftlab/error.hpp"
#include "sftlab/zgraph.hpp"

namespace sftlab {
namespace {

long long floormod(long long a, long long m) {
  long long r = a % m;
  return r < 0 ? r + m : r;
}

// enumeration index of a Z site in the order 0, 1, -1, 2, -2, ...
long long site_index(long long j) {
  if (j == 0) return 0;
  return j > 0 ? 2 * j - 1 : -2 * j;
}

// extreme sites whose enumeration index is still <= t
long long pos_reach(int t) { return ((long long)t + 1) / 2; }
long long neg_reach(int t) { return (long long)t / 2; }

GroupElement zel(long long n) { return GroupElement::lattice({n}); }

std::string word_str(const SubshiftPresentation& X, const std::vector<int>& w) {
  bool compact = true;
  for (const auto& a : X.alphabet()) compact = compact && a.size() == 1;
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    if (i && !compact) out += ' ';
    out += X.alphabet()[(size_t)w[i]];
  }
  return out;
}

std::optional<std::vector<int>> find_path(const ZShiftGraph& zg,
                                          const std::vector<int>& w) {
  const int V = zg.vertex_count();
  std::vector<std::vector<char>> dead(w.size() + 1, std::vector<char>((size_t)V, 0));
  std::vector<int> path;
  std::function<bool(int, size_t)> go = [&](int v, size_t pos) -> bool {
    if (pos == w.size()) {
      path.push_back(v);
      return true;
    }
    if (dead[pos][(size_t)v]) return false;
    for (auto [lab, t] : zg.out()[(size_t)v])
      if (lab == w[pos] && go(t, pos + 1)) {
        path.push_back(v);
        return true;
      }
    dead[pos][(size_t)v] = 1;
    return false;
  };
  for (int v = 0; v < V; ++v)
    if (go(v, 0)) {
      std::reverse(path.begin(), path.end());
      return path;
    }
  return std::nullopt;
}

}  // namespace

int EvPeriodicSeq::at(long long n) const {
  if (n < lo) {
    require(!left_period.empty(), Errc::Internal, "sequence has no left period");
    return left_period[(size_t)floormod(n - lo, (long long)left_period.size())];
  }
  if (n > hi()) {
    require(!right_period.empty(), Errc::Internal, "sequence has no right period");
    return right_period[(size_t)floormod(n - hi() - 1,
                                         (long long)right_period.size())];
  }
  return center[(size_t)(n - lo)];
}

const std::vector<int>& PseudoOrbitPresentation::entry(long long n) const {
  if (n < lo) {
    require(!left_period.empty(), Errc::Internal, "pseudo-orbit has no left period");
    return left_period[(size_t)floormod(n - lo, (long long)left_period.size())];
  }
  if (n > hi()) {
    require(!right_period.empty(), Errc::Internal,
            "pseudo-orbit has no right period");
    return right_period[(size_t)floormod(n - hi() - 1,
                                         (long long)right_period.size())];
  }
  return center[(size_t)(n - lo)];
}

std::vector<int> window_of(const EvPeriodicSeq& s, long long n, int r) {
  std::vector<int> w;
  w.reserve(2 * (size_t)r + 1);
  for (long long j = -r; j <= r; ++j) w.push_back(s.at(n + j));
  return w;
}

EvPeriodicSeq extend_word(const ZShiftGraph& zg, const std::vector<int>& word,
                          long long lo) {
  require(!word.empty(), Errc::NotApplicable, "cannot extend an empty word");
  auto path = find_path(zg, word);
  require(path.has_value(), Errc::NotApplicable,
          "word is not in the language; no extension exists");
  const int V = zg.vertex_count();
  std::vector<std::vector<std::pair<int, int>>> rin((size_t)V);
  for (int v = 0; v < V; ++v)
    for (auto [lab, t] : zg.out()[(size_t)v]) rin[(size_t)t].push_back({lab, v});

  EvPeriodicSeq seq;
  std::vector<int> pre;
  {  // backward walk from the start vertex until a vertex repeats
    std::vector<int> labs;  // labs[i] = symbol at position lo-1-i
    std::vector<int> verts{path->front()};
    std::map<int, int> seen{{path->front(), 0}};
    for (;;) {
      auto [lab, prev] = rin[(size_t)verts.back()].front();
      labs.push_back(lab);
      auto it = seen.find(prev);
      if (it != seen.end()) {
        const int jj = it->second, ii = (int)labs.size();
        for (int t = ii - 1; t >= jj; --t) seq.left_period.push_back(labs[(size_t)t]);
        for (int t = jj - 1; t >= 0; --t) pre.push_back(labs[(size_t)t]);
        seq.lo = lo - jj;
        break;
      }
      seen[prev] = (int)verts.size();
      verts.push_back(prev);
    }
  }
  seq.center = pre;
  seq.center.insert(seq.center.end(), word.begin(), word.end());
  {  // forward walk from the end vertex until a vertex repeats
    std::vector<int> labs;  // labs[i] = symbol at position lo+|word|+i
    std::vector<int> verts{path->back()};
    std::map<int, int> seen{{path->back(), 0}};
    for (;;) {
      auto [lab, nxt] = zg.out()[(size_t)verts.back()].front();
      labs.push_back(lab);
      auto it = seen.find(nxt);
      if (it != seen.end()) {
        const int jj = it->second, ii = (int)labs.size();
        for (int t = 0; t < jj; ++t) seq.center.push_back(labs[(size_t)t]);
        for (int t = jj; t < ii; ++t) seq.right_period.push_back(labs[(size_t)t]);
        break;
      }
      seen[nxt] = (int)verts.size();
      verts.push_back(nxt);
    }
  }
  return seq;
}

PseudoOrbitPresentation po_from_points(const std::vector<EvPeriodicSeq>& pieces,
                                       const std::vector<long long>& cuts,
                                       int depth, bool declare_defects) {
  require(!pieces.empty(), Errc::NotApplicable, "need at least one point");
  require(cuts.size() + 1 == pieces.size(), Errc::NotApplicable,
          "need exactly one cut between consecutive points");
  for (size_t i = 1; i < cuts.size(); ++i)
    require(cuts[i - 1] < cuts[i], Errc::NotApplicable, "cuts must increase");
  require(depth >= 0, Errc::NotApplicable, "depth must be >= 0");
  PseudoOrbitPresentation po;
  po.depth = depth;
  const int r = po.radius();
  auto piece_at = [&](long long n) -> const EvPeriodicSeq& {
    size_t i = 0;
    while (i < cuts.size() && n > cuts[i]) ++i;
    return pieces[i];
  };
  long long clo = pieces.front().lo - r - 1;
  long long chi = pieces.back().hi() + r + 1;
  if (!cuts.empty()) {
    clo = std::min(clo, cuts.front() - r - 1);
    chi = std::max(chi, cuts.back() + r + 1);
  }
  po.lo = clo;
  const long long La = (long long)pieces.front().left_period.size();
  const long long Rb = (long long)pieces.back().right_period.size();
  require(La > 0 && Rb > 0, Errc::NotApplicable,
          "outermost pieces must have periodic tails");
  for (long long i = 0; i < La; ++i)
    po.left_period.push_back(window_of(pieces.front(), clo - La + i, r));
  for (long long n = clo; n <= chi; ++n)
    po.center.push_back(window_of(piece_at(n), n, r));
  for (long long i = 0; i < Rb; ++i)
    po.right_period.push_back(window_of(pieces.back(), chi + 1 + i, r));
  if (declare_defects)
    for (long long c : cuts) po.defects.insert(c + 1);
  return po;
}

void validate_po(const SubshiftPresentation& X, const PseudoOrbitPresentation& po) {
  require(X.ctx().kind() == GroupKind::Integers, Errc::UnsupportedGroup,
          "pseudo-orbit presentations are over Z");
  require(X.z_exact(), Errc::UnsupportedPresentation,
          "pseudo-orbit validation needs an exact Z presentation");
  require(po.depth >= 0, Errc::Inconsistency, "pseudo-orbit depth must be >= 0");
  require(!po.left_period.empty() && !po.right_period.empty(), Errc::Inconsistency,
          "pseudo-orbit needs periodic tails on both sides");
  const int r = po.radius();
  const size_t width = 2 * (size_t)r + 1;
  auto check_word = [&](const std::vector<int>& w, const char* where) {
    require(w.size() == width, Errc::Inconsistency,
            std::string(where) + ": entry width must be 2*radius+1 = " +
                std::to_string(width));
    for (int sym : w)
      require(sym >= 0 && sym < (int)X.alphabet().size(), Errc::Inconsistency,
              std::string(where) + ": symbol out of range");
    require(X.zgraph()->accepts(w), Errc::Inconsistency,
            std::string(where) + ": entry is not a legal window: " + word_str(X, w));
  };
  for (const auto& w : po.left_period) check_word(w, "left period");
  for (const auto& w : po.center) check_word(w, "center");
  for (const auto& w : po.right_period) check_word(w, "right period");

  const long long L = (long long)po.left_period.size();
  const long long R = (long long)po.right_period.size();
  const long long lo = po.lo - L - 1, hi = po.hi() + R + 1;
  for (long long d : po.defects)
    require(d >= lo && d <= hi, Errc::Inconsistency,
            "defect site " + std::to_string(d) +
                " outside the explicit carrier range");
  for (long long n = lo; n <= hi; ++n) {
    if (po.defects.count(n) || po.defects.count(n + 1)) continue;
    const auto& a = po.entry(n);
    const auto& b = po.entry(n + 1);
    for (long long j = -r; j + 1 <= r; ++j) {
      if (site_index(j) > po.depth) continue;
      if (a[(size_t)(r + j + 1)] != b[(size_t)(r + j)])
        fail(Errc::Inconsistency,
             "orbit relation broken at transition " + std::to_string(n) + " -> " +
                 std::to_string(n + 1) + " (site " + std::to_string(j) +
                 ", enumeration index " + std::to_string(site_index(j)) + ")");
    }
  }
}

namespace {

ShadowingVerdict::NoWitness make_splice_witness(const SubshiftPresentation& X,
                                                const std::vector<int>& u, int k) {
  const long long L = (long long)u.size();
  std::vector<int> u_pref(u.begin(), u.end() - 1);
  std::vector<int> u_suff(u.begin() + 1, u.end());
  // A carries u minus its last letter at [0, L-2]; B carries u minus its
  // first letter at [1, L-1]; both are legal points of X.
  EvPeriodicSeq A = extend_word(*X.zgraph(), u_pref, 0);
  EvPeriodicSeq B = extend_word(*X.zgraph(), u_suff, 1);
  // The switch happens mid-word, so the broken sites sit at enumeration
  // index >= 2k+1 > k: a genuine depth-k pseudo-orbit with no defects.
  const long long mid = k;
  std::vector<long long> cuts{mid};
  PseudoOrbitPresentation po = po_from_points({A, B}, cuts, k, false);
  validate_po(X, po);
  // Any shadow at depth k is forced cell-by-cell to equal the splice, and
  // the splice carries the full forbidden word: no candidate survives.
  const int r = po.radius();
  for (long long n = 0; n < L; ++n)
    require(po.entry(n)[(size_t)r] == u[(size_t)n], Errc::Internal,
            "splice does not carry the forbidden word");
  require(!X.zgraph()->accepts(u), Errc::Internal,
          "witness word is unexpectedly legal");
  ShadowingVerdict::NoWitness w;
  w.depth = k;
  w.word = u;
  w.po = std::move(po);
  w.word_lo = 0;
  return w;
}

constexpr int kWitnessMaxLen = 15;  // covers splice witnesses up to depth 6
constexpr int kWitnessMaxDepth = 6;

}  // namespace

ShadowingVerdict shadowing_decide(const SubshiftPresentation& X,
                                  const std::vector<GroupElement>& S) {
  require(X.ctx().kind() == GroupKind::Integers, Errc::UnsupportedGroup,
          "shadowing is decided over Z only");
  require(X.z_exact(), Errc::UnsupportedPresentation,
          "shadowing decision needs an exact Z presentation");
  require(!S.empty(), Errc::NotApplicable, "empty direction set");
  for (const auto& s : S) {
    X.ctx().validate(s);
    require(s == zel(1), Errc::NotApplicable,
            "decision implemented for S = {+1} only");
  }
  ShadowingVerdict v;
  v.sft = sofic_is_sft(X);
  v.shadows = v.sft.is_sft;
  if (v.shadows) return v;
  const auto mf = minimal_forbidden_words(X, kWitnessMaxLen);
  for (int k = 1; k <= kWitnessMaxDepth; ++k) {
    const std::vector<int>* u = nullptr;
    const size_t need = (size_t)(2 * k + 3);
    for (const auto& w : mf)
      if (w.size() >= need && (!u || w.size() < u->size())) u = &w;
    if (!u) break;  // no witness word long enough within the search bound
    v.witnesses.push_back(make_splice_witness(X, *u, k));
  }
  return v;
}

TraceResult trace(const SubshiftPresentation& X, const PseudoOrbitPresentation& po,
                  int eps_depth) {
  require(X.ctx().kind() == GroupKind::Integers, Errc::UnsupportedGroup,
          "tracing is implemented over Z only");
  require(X.z_exact(), Errc::UnsupportedPresentation,
          "tracing needs an exact Z presentation");
  require(eps_depth >= 0, Errc::NotApplicable, "resolution depth must be >= 0");
  const auto sft = sofic_is_sft(X);
  require(sft.is_sft, Errc::NotApplicable,
          "tracing requires a shift of finite type");
  const int w = sft.window;
  const int required = eps_depth + w;
  require(po.depth >= required, Errc::PrecisionError,
          "pseudo-orbit depth " + std::to_string(po.depth) +
              " insufficient: tracing at resolution depth " +
              std::to_string(eps_depth) + " over a window of length " +
              std::to_string(w) + " needs delta-depth >= " +
              std::to_string(required));
  validate_po(X, po);

  const int r = po.radius();
  const long long L = (long long)po.left_period.size();
  const long long Rp = (long long)po.right_period.size();
  const int pw = w + 2;  // patch half-width around a defect
  const long long reachp = pos_reach(eps_depth), reachn = neg_reach(eps_depth);
  const long long margin =
      L + Rp + 2 * (long long)r + w + pw + eps_depth + 8;
  const long long qlo = po.lo - L - margin, qhi = po.hi() + Rp + margin;

  // spliced center symbols; s.at(n) == entry(n)[r] for every n
  EvPeriodicSeq s;
  s.lo = qlo;
  for (long long i = 0; i < L; ++i)
    s.left_period.push_back(po.entry(qlo - L + i)[(size_t)r]);
  for (long long n = qlo; n <= qhi; ++n) s.center.push_back(po.entry(n)[(size_t)r]);
  for (long long i = 0; i < Rp; ++i)
    s.right_period.push_back(po.entry(qhi + 1 + i)[(size_t)r]);

  // cells open to patching: a half-width pw interval around each defect,
  // merged when two zones could share a forbidden window
  std::vector<std::pair<long long, long long>> clusters;
  for (long long d : po.defects) {
    const long long a = d - pw, b = d + pw;
    if (!clusters.empty() && a <= clusters.back().second + w)
      clusters.back().second = std::max(clusters.back().second, b);
    else
      clusters.push_back({a, b});
  }

  std::map<long long, int> patch;
  auto val = [&](long long n) {
    auto it = patch.find(n);
    return it == patch.end() ? s.at(n) : it->second;
  };
  auto window_bad = [&](long long t) {
    std::vector<int> word((size_t)w);
    for (int i = 0; i < w; ++i) word[(size_t)i] = val(t + i);
    return sft.forbidden_words.count(word) != 0;
  };
  auto in_cluster_range = [&](long long t) {
    for (auto [a, b] : clusters)
      if (t + w - 1 >= a && t <= b) return true;
    return false;
  };

  if (!sft.forbidden_words.empty())
    for (long long t = qlo - w; t <= qhi + w; ++t) {
      if (in_cluster_range(t)) continue;
      if (window_bad(t))
        fail(Errc::PrecisionError,
             "carrier splice contains a forbidden window at " + std::to_string(t) +
                 " away from any defect; the pseudo-orbit is too coarse for "
                 "window length " +
                 std::to_string(w));
    }

  // patch search: deepest-first backtracking, splice symbol preferred, so
  // the first solution found changes as late and as little as possible
  long long nodes = 0;
  const long long kNodeBudget = 4000000;
  std::function<bool(long long, long long, long long)> place =
      [&](long long a, long long b, long long k) -> bool {
    if (k > b) return true;
    require(++nodes <= kNodeBudget, Errc::Internal, "patch search budget exceeded");
    const int base = s.at(k);
    const int asz = (int)X.alphabet().size();
    for (int c = 0; c < asz; ++c) {
      const int sym = c == 0 ? base : (c - 1 < base ? c - 1 : c);
      patch[k] = sym;
      bool ok = true;
      if (!sft.forbidden_words.empty()) {
        if (k < b) {
          ok = !window_bad(k - w + 1);
        } else {
          for (long long t = b - w + 1; t <= b && ok; ++t) ok = !window_bad(t);
        }
      }
      if (ok && place(a, b, k + 1)) return true;
    }
    patch.erase(k);
    return false;
  };
  for (auto [a, b] : clusters) {
    require(a > qlo && b < qhi, Errc::Internal, "patch zone outside working range");
    if (!place(a, b, a))
      fail(Errc::NotApplicable,
           "no legal patch of half-width " + std::to_string(pw) +
               " around defect cluster [" + std::to_string(a) + ", " +
               std::to_string(b) + "]; the defect cannot be shadowed at this "
               "resolution");
  }
  for (auto it = patch.begin(); it != patch.end();) {
    if (it->second == s.at(it->first))
      it = patch.erase(it);
    else
      ++it;
  }

  TraceResult out;
  out.bound_depth = eps_depth;
  out.shadow.lo = qlo;
  out.shadow.left_period = s.left_period;
  out.shadow.right_period = s.right_period;
  out.shadow.center = s.center;
  for (auto [k, sym] : patch) out.shadow.center[(size_t)(k - qlo)] = sym;
  out.mismatches = patch;

  // sites where a patched cell can enter the depth-eps comparison window
  std::vector<std::pair<long long, long long>> nominal;
  for (auto [a, b] : clusters) {
    const long long na = a - reachp, nb = b + reachn;
    if (!nominal.empty() && na <= nominal.back().second + 1)
      nominal.back().second = std::max(nominal.back().second, nb);
    else
      nominal.push_back({na, nb});
  }
  auto in_nominal = [&](long long n) {
    for (auto [a, b] : nominal)
      if (n >= a && n <= b) return true;
    return false;
  };
  auto bound_ok = [&](long long n) {
    const auto& e = po.entry(n);
    for (long long j = -reachn; j <= reachp; ++j) {
      if (site_index(j) > eps_depth) continue;
      if (out.shadow.at(n + j) != e[(size_t)(r + j)]) return false;
    }
    return true;
  };
  const long long vlo = qlo + r + 1, vhi = qhi - r - 1;
  for (long long n = vlo; n <= vhi; ++n) {
    if (in_nominal(n)) continue;
    require(bound_ok(n), Errc::Internal,
            "shadow bound verification failed at site " + std::to_string(n));
  }
  for (auto [a, b] : nominal) {
    bool open = false;
    long long start = 0;
    for (long long n = a; n <= b; ++n) {
      const bool bad = !bound_ok(n);
      if (bad && !open) {
        open = true;
        start = n;
      }
      if (!bad && open) {
        out.waived.push_back({start, n - 1});
        open = false;
      }
    }
    if (open) out.waived.push_back({start, b});
  }

  long long confinement = 0;
  for (auto [k, sym] : patch) {
    long long best = -1;
    for (long long d : po.defects)
      best = best < 0 ? std::llabs(k - d) : std::min(best, std::llabs(k - d));
    confinement = std::max(confinement, best);
  }
  out.detail = std::to_string(patch.size()) + " cell(s) patched across " +
               std::to_string(clusters.size()) + " defect zone(s), at most " +
               std::to_string(confinement) +
               " cells from a defect; dyadic bound 2^-" +
               std::to_string(eps_depth) + " verified outside " +
               std::to_string(out.waived.size()) + " waived interval(s)";
  return out;
}

Lemma33Report lemma33_crosscheck(const FiniteSystem& sys,
                                 const std::vector<GroupElement>& S) {
  require(sys.has_metric(), Errc::NoMetric,
          "the metric/cover comparison needs an exact metric");
  require(!S.empty(), Errc::NotApplicable, "empty direction set");
  std::vector<GroupElement> dirs;
  for (const auto& s : S) {
    sys.ctx().validate(s);
    if (std::find(dirs.begin(), dirs.end(), s) == dirs.end()) dirs.push_back(s);
  }
  const int nst = sys.size();
  require(nst <= 30, Errc::NotApplicable,
          "state space too large for the exhaustive crosscheck");

  std::set<double> dset;
  for (int x = 0; x < nst; ++x)
    for (int y = 0; y < nst; ++y)
      if (sys.dist(x, y) > 0) dset.insert(sys.dist(x, y));
  const std::vector<double> deltas(dset.begin(), dset.end());
  std::set<double> eset = dset;
  eset.insert(sys.space_diameter() + 1);
  const std::vector<double> epses(eset.begin(), eset.end());

  Lemma33Report rep;
  rep.ball_radius = 1;
  const auto gens = sys.ctx().generators();
  const auto outer = sys.ctx().ball(gens, rep.ball_radius + 1);
  const auto inner = sys.ctx().ball(gens, rep.ball_radius);
  const int V = (int)outer.size();
  std::map<GroupElement, int> oidx;
  for (int i = 0; i < V; ++i) oidx[outer[(size_t)i]] = i;

  const int nd = (int)dirs.size();
  std::vector<std::vector<int>> sapp((size_t)nd, std::vector<int>((size_t)nst));
  for (int d = 0; d < nd; ++d)
    for (int x = 0; x < nst; ++x)
      sapp[(size_t)d][(size_t)x] = sys.apply(dirs[(size_t)d], x);
  std::vector<std::vector<int>> gapp(inner.size(), std::vector<int>((size_t)nst));
  std::vector<int> inner_idx(inner.size());
  for (size_t i = 0; i < inner.size(); ++i) {
    inner_idx[i] = oidx.at(inner[i]);
    for (int x = 0; x < nst; ++x) gapp[i][(size_t)x] = sys.apply(inner[i], x);
  }

  // relation edges (a, d, b): the direction d constrains (x_a, x_b)
  struct Rel {
    int a, d, b;
  };
  std::vector<Rel> rels;
  for (int a = 0; a < V; ++a)
    for (int d = 0; d < nd; ++d) {
      const GroupElement sg = sys.ctx().mul(dirs[(size_t)d], outer[(size_t)a]);
      auto it = oidx.find(sg);
      if (it != oidx.end()) rels.push_back({a, d, it->second});
    }
  std::vector<std::vector<Rel>> by_site((size_t)V);
  for (const auto& e : rels) by_site[(size_t)std::max(e.a, e.b)].push_back(e);

  long long budget = 50000000;
  auto charge = [&](long long c) {
    budget -= c;
    require(budget > 0, Errc::NotApplicable,
            "state space too large for the exhaustive crosscheck");
  };

  // --- metric route: point pseudo-orbits within delta, shadows within eps
  std::vector<int> asg((size_t)V, -1);
  std::function<bool(int, double, double)> metric_all = [&](int pos, double delta,
                                                            double eps) -> bool {
    if (pos == V) {
      charge(nst * (long long)inner.size());
      for (int z = 0; z < nst; ++z) {
        bool ok = true;
        for (size_t i = 0; i < inner.size() && ok; ++i)
          ok = sys.dist(gapp[i][(size_t)z], asg[(size_t)inner_idx[i]]) < eps;
        if (ok) return true;
      }
      return false;
    }
    for (int x = 0; x < nst; ++x) {
      charge(1);
      asg[(size_t)pos] = x;
      bool ok = true;
      for (const auto& e : by_site[(size_t)pos])
        if (sys.dist(sapp[(size_t)e.d][(size_t)asg[(size_t)e.a]],
                     asg[(size_t)e.b]) >= delta) {
          ok = false;
          break;
        }
      if (ok && !metric_all(pos + 1, delta, eps)) {
        asg[(size_t)pos] = -1;
        return false;
      }
    }
    asg[(size_t)pos] = -1;
    return true;
  };

  // --- cover route: block patterns over the delta-ball cover, shadows
  // sharing an eps-ball block with the pattern
  auto ball_blocks = [&](double rad) {
    std::set<std::vector<int>> bs;
    for (int x = 0; x < nst; ++x) {
      std::vector<int> b;
      for (int y = 0; y < nst; ++y)
        if (sys.dist(x, y) < rad) b.push_back(y);
      bs.insert(b);
    }
    return std::vector<std::vector<int>>(bs.begin(), bs.end());
  };
  auto masks_of = [&](const std::vector<std::vector<int>>& blocks) {
    std::vector<uint32_t> m;
    for (const auto& b : blocks) {
      uint32_t x = 0;
      for (int y : b) x |= 1u << y;
      m.push_back(x);
    }
    return m;
  };

  // star dependencies and the assignment position where each star completes
  struct StarDep {
    int d, b;
  };
  std::vector<std::vector<StarDep>> stars((size_t)V);
  std::vector<int> ready((size_t)V);
  for (int a = 0; a < V; ++a) ready[(size_t)a] = a;
  for (const auto& e : rels) {
    stars[(size_t)e.a].push_back({e.d, e.b});
    ready[(size_t)e.a] = std::max(ready[(size_t)e.a], e.b);
  }
  std::vector<std::vector<int>> check_at((size_t)V);
  for (int a = 0; a < V; ++a) check_at[(size_t)ready[(size_t)a]].push_back(a);

  std::vector<int> pat((size_t)V, -1);
  std::function<bool(int, const std::vector<uint32_t>&,
                     const std::vector<std::vector<uint32_t>>&)>
      cover_all = [&](int pos, const std::vector<uint32_t>& vm,
                      const std::vector<std::vector<uint32_t>>& okuv) -> bool {
    if (pos == V) {
      charge(nst * (long long)inner.size());
      for (int z = 0; z < nst; ++z) {
        bool ok = true;
        for (size_t i = 0; i < inner.size() && ok; ++i)
          ok = (okuv[(size_t)pat[(size_t)inner_idx[i]]][(size_t)gapp[i][(size_t)z]] &
                1u) != 0;
        if (ok) return true;
      }
      return false;
    }
    for (int vb = 0; vb < (int)vm.size(); ++vb) {
      charge(1);
      pat[(size_t)pos] = vb;
      bool ok = true;
      for (int a : check_at[(size_t)pos]) {
        // witness for the star at a: a point of the block whose images stay
        // in the assigned blocks
        bool has = false;
        const uint32_t cand = vm[(size_t)pat[(size_t)a]];
        for (int wst = 0; wst < nst && !has; ++wst) {
          if (!((cand >> wst) & 1u)) continue;
          bool all = true;
          for (const auto& dep : stars[(size_t)a])
            if (!((vm[(size_t)pat[(size_t)dep.b]] >>
                   sapp[(size_t)dep.d][(size_t)wst]) &
                  1u)) {
              all = false;
              break;
            }
          has = all;
        }
        if (!has) {
          ok = false;
          break;
        }
      }
      if (ok && !cover_all(pos + 1, vm, okuv)) {
        pat[(size_t)pos] = -1;
        return false;
      }
    }
    pat[(size_t)pos] = -1;
    return true;
  };

  for (double eps : epses) {
    Lemma33Report::Line line;
    line.eps = eps;
    for (double delta : deltas) {
      if (metric_all(0, delta, eps)) {
        line.metric_holds = true;
        line.metric_delta = delta;
        break;
      }
    }

    const auto ub = ball_blocks(eps);
    const auto umask = masks_of(ub);
    line.lebesgue = geometry(sys, Cover::of(sys, ub)).lebesgue;
    std::vector<double> cands{line.lebesgue};
    cands.insert(cands.end(), deltas.begin(), deltas.end());
    std::set<std::vector<std::vector<int>>> seen;
    for (double dc : cands) {
      const auto vb = ball_blocks(dc);
      if (!seen.insert(vb).second) continue;
      const auto vmask = masks_of(vb);
      // okuv[vb][y] = 1 iff some eps-ball block contains the whole vb-block
      // together with y
      std::vector<std::vector<uint32_t>> okuv(
          vmask.size(), std::vector<uint32_t>((size_t)nst, 0));
      for (size_t v = 0; v < vmask.size(); ++v)
        for (int y = 0; y < nst; ++y)
          for (uint32_t um : umask)
            if ((~um & (vmask[v] | (1u << y))) == 0) {
              okuv[v][(size_t)y] = 1;
              break;
            }
      if (cover_all(0, vmask, okuv)) {
        line.cover_holds = true;
        line.cover_delta = dc;
        break;
      }
    }
    rep.all_agree = rep.all_agree && line.metric_holds == line.cover_holds;
    rep.lines.push_back(line);
  }
  return rep;
}

}  // namespace sftlab
