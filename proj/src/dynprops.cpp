#include "sftlab/dynprops.hpp"

#include <algorithm>
#include <climits>
#include <map>
#include <numeric>
#include <sstream>

#include "sftlab/error.hpp"
#include "sftlab/orbit_spaces.hpp"

namespace sftlab {

namespace {

long long lcm_ll(long long a, long long b) {
  long long g = std::gcd(a, b);
  require(a / g <= (1LL << 20) / b + 1, Errc::Internal,
          "tail period product is out of range");
  long long l = a / g * b;
  require(l >= 1 && l <= (1LL << 20), Errc::Internal,
          "combined tail period is out of range");
  return l;
}

std::string join_names(const std::vector<std::string>& names,
                       const std::vector<int>& idx) {
  std::string s = "{";
  for (std::size_t i = 0; i < idx.size(); ++i) {
    if (i) s += ",";
    s += names[idx[i]];
  }
  s += "}";
  return s;
}

// ---------------------------------------------------------------------------
// vertex-set arithmetic on a transfer graph

using VSet = std::vector<char>;

bool any_of(const VSet& s) {
  for (char c : s)
    if (c) return true;
  return false;
}

bool intersects(const VSet& a, const VSet& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] && b[i]) return true;
  return false;
}

// one step forward along edges whose label matches (letter < 0: any letter)
VSet step_fwd(const ZShiftGraph& g, const VSet& s, int letter) {
  VSet t(g.vertex_count(), 0);
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (!s[v]) continue;
    for (auto [a, w] : g.out()[v])
      if (letter < 0 || a == letter) t[w] = 1;
  }
  return t;
}

VSet step_bwd(const ZShiftGraph& g, const VSet& s, int letter) {
  VSet t(g.vertex_count(), 0);
  for (int v = 0; v < g.vertex_count(); ++v)
    for (auto [a, w] : g.out()[v])
      if ((letter < 0 || a == letter) && s[w]) t[v] = 1;
  return t;
}

VSet full_set(const ZShiftGraph& g) { return VSet(g.vertex_count(), 1); }

// end vertices of paths reading the (possibly wildcarded) letter row
VSet run_fwd(const ZShiftGraph& g, const std::vector<int>& sym) {
  VSet s = full_set(g);
  for (int a : sym) {
    s = step_fwd(g, s, a);
    if (!any_of(s)) break;
  }
  return s;
}

// start vertices of such paths
VSet run_bwd(const ZShiftGraph& g, const std::vector<int>& sym) {
  VSet s = full_set(g);
  for (auto it = sym.rbegin(); it != sym.rend(); ++it) {
    s = step_bwd(g, s, *it);
    if (!any_of(s)) break;
  }
  return s;
}

/* Reachability-set recurrence: hits(k) says whether the k-step image of
 * `start` meets `target`.  The subset sequence enters a cycle; transient and
 * period are detected exactly, within a bound quadratic in the vertex
 * count. */
struct TailIter {
  long long transient = 0;
  long long period = 1;
  std::vector<char> hits;  // indices 0 .. transient + period - 1

  bool hit(long long k) const {
    if (k < transient) return hits[(std::size_t)k];
    return hits[(std::size_t)(transient + (k - transient) % period)];
  }
};

template <class Step>
TailIter iterate_tail(VSet start, const VSet& target, long long cap,
                      Step step) {
  TailIter t;
  std::map<VSet, long long> seen;
  VSet cur = std::move(start);
  long long k = 0;
  for (;;) {
    auto it = seen.find(cur);
    if (it != seen.end()) {
      t.transient = it->second;
      t.period = k - it->second;
      t.hits.resize((std::size_t)k);
      for (auto& [s, i] : seen) t.hits[(std::size_t)i] = intersects(s, target);
      return t;
    }
    seen.emplace(cur, k);
    cur = step(cur);
    ++k;
    require(k <= cap, Errc::Internal,
            "reachability tail failed to stabilize within the cycle bound");
  }
}

// ---------------------------------------------------------------------------
// integer patterns

struct ZPat {
  long long lo = 0;
  std::vector<int> sym;  // -1 = unconstrained

  long long hi() const { return lo + (long long)sym.size() - 1; }
};

ZPat to_zpat(const GroupCtx& ctx, const Pattern& p, int alphabet) {
  ZPat z;
  if (p.cells.empty()) {
    z.sym.assign(1, -1);  // the whole space, anchored at the origin
    return z;
  }
  long long lo = LLONG_MAX, hi = LLONG_MIN;
  for (const auto& [g, s] : p.cells) {
    ctx.validate(g);
    long long c = g.data()[0];
    lo = std::min(lo, c);
    hi = std::max(hi, c);
    require(s >= 0 && s < alphabet, Errc::MalformedElement,
            "pattern symbol out of the alphabet range");
  }
  require(hi - lo + 1 <= 4096, Errc::NotApplicable,
          "pattern window is too wide");
  z.lo = lo;
  z.sym.assign((std::size_t)(hi - lo + 1), -1);
  for (const auto& [g, s] : p.cells) z.sym[(std::size_t)(g.data()[0] - lo)] = s;
  return z;
}

/* Joint realizability of U at its window and V shifted by g: merge the two
 * letter rows (conflicts defeat immediately) and run the forward sweep. */
bool joint_feasible(const ZShiftGraph& zg, const ZPat& u, const ZPat& v,
                    long long g) {
  long long lo = std::min(u.lo, v.lo + g);
  long long hi = std::max(u.hi(), v.hi() + g);
  std::vector<int> merged((std::size_t)(hi - lo + 1), -1);
  for (std::size_t i = 0; i < u.sym.size(); ++i)
    if (u.sym[i] >= 0) merged[(std::size_t)(u.lo + (long long)i - lo)] = u.sym[i];
  for (std::size_t i = 0; i < v.sym.size(); ++i) {
    if (v.sym[i] < 0) continue;
    std::size_t at = (std::size_t)(v.lo + g + (long long)i - lo);
    if (merged[at] >= 0 && merged[at] != v.sym[i]) return false;
    merged[at] = v.sym[i];
  }
  return any_of(run_fwd(zg, merged));
}

/* Assemble the eventually-periodic set from the two tail recurrences plus a
 * middle-zone membership test.  Membership at g >= base_r uses the right
 * tail at gap g - base_r; membership at g <= -base_l uses the left tail at
 * gap -g - base_l; anything between goes through `middle`. */
template <class Middle>
HittingSet assemble_z(long long base_r, const TailIter& tr, long long base_l,
                      const TailIter& tl, Middle middle) {
  HittingSet h;
  h.kind = GroupKind::Integers;
  h.exact = true;
  h.period = lcm_ll(tr.period, tl.period);
  long long w = std::max({base_r + tr.transient, base_l + tl.transient, 1LL});
  h.window = w;
  auto member = [&](long long g) {
    if (g >= base_r) return tr.hit(g - base_r);
    if (g <= -base_l) return tl.hit(-g - base_l);
    return middle(g);
  };
  for (long long g = -w; g <= w; ++g)
    if (g != 0 && member(g)) h.members.insert(g);
  for (long long g = w + 1; g <= w + h.period; ++g)
    if (member(g)) h.pos_residues.insert(((g % h.period) + h.period) % h.period);
  for (long long g = -w - h.period; g <= -w - 1; ++g)
    if (member(g)) h.neg_residues.insert(((g % h.period) + h.period) % h.period);
  return h;
}

// ---------------------------------------------------------------------------
// canonical transitivity analysis of a trimmed presentation

// subgraph induced by one strongly connected component, re-trimmed
ZShiftGraph component_graph(const ZShiftGraph& g, const std::vector<int>& ids,
                            int comp) {
  std::vector<int> back(g.vertex_count(), -1);
  std::vector<std::string> names;
  SoficGraph sg;
  for (int v = 0; v < g.vertex_count(); ++v)
    if (ids[v] == comp) {
      back[v] = (int)sg.vertices.size();
      sg.vertices.push_back("v" + std::to_string(v));
    }
  for (int v = 0; v < g.vertex_count(); ++v) {
    if (ids[v] != comp) continue;
    for (auto [a, w] : g.out()[v])
      if (ids[w] == comp) sg.edges.push_back({back[v], back[w], a});
  }
  if (sg.edges.empty()) return ZShiftGraph();
  return ZShiftGraph::from_sofic(g.alphabet_size(), sg);
}

/* Subset determinization seeded with the full vertex set; presents the same
 * shift with deterministic forward transitions, which makes the cycle
 * structure of its recurrent components match the shift itself. */
ZShiftGraph determinize(const ZShiftGraph& g) {
  std::map<VSet, int> id;
  std::vector<VSet> states;
  auto intern = [&](const VSet& s) {
    auto it = id.find(s);
    if (it != id.end()) return it->second;
    int n = (int)states.size();
    require(n < 4096, Errc::UnsupportedPresentation,
            "the presentation is too nondeterministic to canonicalize");
    id.emplace(s, n);
    states.push_back(s);
    return n;
  };
  SoficGraph sg;
  intern(full_set(g));
  sg.vertices.push_back("s0");
  for (int i = 0; i < (int)states.size(); ++i) {
    for (int a = 0; a < g.alphabet_size(); ++a) {
      VSet t = step_fwd(g, states[i], a);
      if (!any_of(t)) continue;
      int j = intern(t);
      if (j == (int)sg.vertices.size())
        sg.vertices.push_back("s" + std::to_string(j));
      sg.edges.push_back({i, j, a});
    }
  }
  ZShiftGraph det = ZShiftGraph::from_sofic(g.alphabet_size(), sg);
  require(zshift_language_equal(g, det), Errc::Internal,
          "determinization changed the language");
  return det;
}

// language-equal strongly connected component, if any
std::optional<ZShiftGraph> full_language_component(const ZShiftGraph& g,
                                                   int* which = nullptr,
                                                   int* total = nullptr) {
  if (g.irreducible()) {
    if (which) *which = 0;
    if (total) *total = 1;
    return g;
  }
  int count = 0;
  std::vector<int> ids = g.scc_ids(&count);
  if (total) *total = count;
  for (int c = 0; c < count; ++c) {
    ZShiftGraph comp = component_graph(g, ids, c);
    if (comp.empty()) continue;
    if (zshift_language_equal(g, comp)) {
      if (which) *which = c;
      return comp;
    }
  }
  return std::nullopt;
}

struct Canon {
  bool transitive = false;
  ZShiftGraph comp;      // language-equal component of the input
  ZShiftGraph det_comp;  // language-equal component of its determinization
  long long per = 0;     // cycle-length gcd of det_comp
  std::string how;
};

Canon analyze(const ZShiftGraph& zg) {
  Canon c;
  int which = 0, total = 0;
  auto comp = full_language_component(zg, &which, &total);
  if (!comp) {
    c.how = "no strongly connected component carries the full language (" +
            std::to_string(total) + " components)";
    return c;
  }
  c.transitive = true;
  c.comp = *comp;
  c.how = total == 1 ? "the trimmed presentation is strongly connected (" +
                           std::to_string(zg.vertex_count()) + " vertices)"
                     : "component " + std::to_string(which) + " of " +
                           std::to_string(total) + " carries the full language";
  ZShiftGraph det = determinize(c.comp);
  auto dc = full_language_component(det);
  require(dc.has_value(), Errc::Internal,
          "the determinized presentation lost its recurrent core");
  c.det_comp = *dc;
  c.per = c.det_comp.period();
  return c;
}

const char* kTotallyCaveat =
    "decided against the finitely generated subgroups nZ, which exhaust the "
    "nontrivial subgroups of the integers";

// first few language words, for witness searches
std::vector<Word> sample_words(const ZShiftGraph& zg, int len, int cap) {
  std::vector<Word> out;
  for (const Word& w : zg.words(len)) {
    out.push_back(w);
    if ((int)out.size() >= cap) break;
  }
  return out;
}

Pattern word_pattern(const Word& w) {
  Pattern p;
  for (std::size_t i = 0; i < w.size(); ++i)
    p.cells[GroupElement::lattice({(long long)i})] = w[(std::size_t)i];
  return p;
}

std::string word_text(const SubshiftPresentation& X, const Word& w) {
  std::string s;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) s += " ";
    s += X.alphabet()[(std::size_t)w[i]];
  }
  return s;
}

/* Search short cylinder pairs for one whose hitting set fails `good`; used
 * to attach concrete witnesses to negative verdicts. */
std::string find_violating_pair(const SubshiftPresentation& X, int maxlen,
                                bool (*good)(const HittingSet&)) {
  const ZShiftGraph& zg = *X.zgraph();
  for (int lu = 1; lu <= maxlen; ++lu)
    for (int lv = 1; lv <= maxlen; ++lv)
      for (const Word& u : sample_words(zg, lu, 8))
        for (const Word& v : sample_words(zg, lv, 8)) {
          HittingSet n = hitting(X, word_pattern(u), word_pattern(v));
          if (!good(n))
            return "N(C(" + word_text(X, u) + " @0), C(" + word_text(X, v) +
                   " @0)) = " + n.to_string();
        }
  return "";
}

bool good_infinite(const HittingSet& h) { return h.infinite_set(); }
bool good_cofinite(const HittingSet& h) { return h.cofinite_set(); }

// any directed cycle, as its label word
Word short_cycle_word(const ZShiftGraph& zg) {
  // walk forward from vertex 0 until a vertex repeats, then cut the loop
  std::vector<int> seen_at(zg.vertex_count(), -1);
  std::vector<int> labels, verts;
  int v = 0;
  for (;;) {
    if (seen_at[v] >= 0) {
      Word w(labels.begin() + seen_at[v], labels.end());
      return w;
    }
    seen_at[v] = (int)labels.size();
    verts.push_back(v);
    labels.push_back(zg.out()[v][0].first);
    v = zg.out()[v][0].second;
  }
}

void guard_subshift(const SubshiftPresentation& X) {
  require(X.ctx().kind() == GroupKind::Integers, Errc::UnsupportedGroup,
          "global decisions run over the integer shift only; higher-rank "
          "actions get window-level language reports instead");
  require(X.z_exact(), Errc::UnsupportedPresentation,
          "an exact transfer graph is required");
  require(X.nonempty(), Errc::NotApplicable,
          "the empty shift has no nonempty open sets to test");
}

}  // namespace

// ---------------------------------------------------------------------------
// HittingSet queries

bool HittingSet::contains(long long g) const {
  require(kind == GroupKind::Integers && exact, Errc::NotApplicable,
          "membership queries need the exact integer form");
  if (g == 0) return false;
  if (g > window) return pos_residues.count(((g % period) + period) % period) > 0;
  if (g < -window) return neg_residues.count(((g % period) + period) % period) > 0;
  return members.count(g) > 0;
}

bool HittingSet::empty_set() const {
  return members.empty() && pos_residues.empty() && neg_residues.empty();
}

bool HittingSet::infinite_set() const {
  return !pos_residues.empty() || !neg_residues.empty();
}

bool HittingSet::cofinite_set() const {
  return (long long)pos_residues.size() == period &&
         (long long)neg_residues.size() == period;
}

bool HittingSet::syndetic_set() const {
  return !pos_residues.empty() && !neg_residues.empty();
}

std::set<long long> HittingSet::complement() const {
  require(cofinite_set(), Errc::NotApplicable,
          "only cofinite sets list their complement");
  std::set<long long> out;
  out.insert(0);
  for (long long g = -window; g <= window; ++g)
    if (g != 0 && !members.count(g)) out.insert(g);
  return out;
}

std::vector<long long> HittingSet::sample(long long lo, long long hi) const {
  std::vector<long long> out;
  for (long long g = lo; g <= hi; ++g)
    if (g != 0 && contains(g)) out.push_back(g);
  return out;
}

std::set<long long> HittingSet::lifted_residues(long long m,
                                                bool positive_side) const {
  require(m % period == 0, Errc::Internal, "lift modulus must be a multiple");
  std::set<long long> out;
  const auto& side = positive_side ? pos_residues : neg_residues;
  for (long long r : side)
    for (long long k = r; k < m; k += period) out.insert(k);
  return out;
}

bool HittingSet::contains_lattice(const std::vector<long long>& coords) const {
  require(kind == GroupKind::Lattice && exact, Errc::NotApplicable,
          "coordinate queries need the exact lattice form");
  require(coords.size() == component_periods.size(), Errc::MalformedElement,
          "coordinate rank mismatch");
  std::vector<long long> red(coords.size());
  bool is_zero = true;
  for (std::size_t i = 0; i < coords.size(); ++i) {
    long long p = component_periods[i];
    red[i] = ((coords[i] % p) + p) % p;
  }
  for (long long c : coords) is_zero &= (c == 0);
  if (is_zero) return false;
  // the reduced element acts identically; zero reduction stands for the
  // identity coset, whose nonzero members act like the identity
  bool red_zero = true;
  for (long long c : red) red_zero &= (c == 0);
  std::vector<long long> probe = red;
  if (red_zero)
    return false ||
           [&] {
             // a full period step in the first coordinate acts trivially
             probe[0] = component_periods[0];
             for (const GroupElement& g : ball_members)
               if (g.data() == probe) return true;
             return false;
           }();
  for (const GroupElement& g : ball_members)
    if (g.data() == red) return true;
  return false;
}

std::string HittingSet::to_string() const {
  std::ostringstream os;
  if (kind == GroupKind::Lattice || kind == GroupKind::Free) {
    os << (truncated ? "ball listing (truncated), radius " : "ball listing, radius ")
       << ball_radius << ": " << ball_members.size() << " members";
    if (!component_periods.empty()) {
      os << "; componentwise periods (";
      for (std::size_t i = 0; i < component_periods.size(); ++i)
        os << (i ? "," : "") << component_periods[i];
      os << ")";
    }
    return os.str();
  }
  if (empty_set()) return "empty";
  if (cofinite_set()) {
    os << "Z \\ {";
    bool first = true;
    for (long long g : complement()) {
      os << (first ? "" : ", ") << g;
      first = false;
    }
    os << "}";
    return os.str();
  }
  if (pos_residues.size() == 1 && neg_residues == pos_residues) {
    long long r = *pos_residues.begin();
    bool clean = true;
    std::vector<long long> missing;
    for (long long g = -window; g <= window; ++g) {
      bool in_class = ((g % period) + period) % period == r && g != 0;
      bool in = members.count(g) > 0;
      if (in && !in_class) clean = false;
      if (!in && in_class) missing.push_back(g);
    }
    if (clean) {
      os << "{ n == " << r << " (mod " << period << ") }";
      if (!missing.empty()) {
        os << " \\ {";
        for (std::size_t i = 0; i < missing.size(); ++i)
          os << (i ? ", " : "") << missing[i];
        os << "}";
      }
      return os.str();
    }
  }
  os << "on [-" << window << ", " << window << "]: {";
  bool first = true;
  for (long long g : members) {
    os << (first ? "" : ", ") << g;
    first = false;
  }
  os << "}; right tail residues {";
  first = true;
  for (long long r : pos_residues) {
    os << (first ? "" : ", ") << r;
    first = false;
  }
  os << "} (mod " << period << "); left tail residues {";
  first = true;
  for (long long r : neg_residues) {
    os << (first ? "" : ", ") << r;
    first = false;
  }
  os << "} (mod " << period << ")";
  return os.str();
}

bool hitting_subset(const HittingSet& a, const HittingSet& b) {
  return hitting_subset_excluding(a, {}, b);
}

bool hitting_subset_excluding(const HittingSet& a,
                              const std::vector<long long>& exceptions,
                              const HittingSet& b) {
  require(a.kind == GroupKind::Integers && b.kind == GroupKind::Integers &&
              a.exact && b.exact,
          Errc::NotApplicable, "set relations need the exact integer form");
  long long w = std::max(a.window, b.window);
  for (long long d : exceptions) w = std::max(w, std::llabs(d));
  long long p = lcm_ll(a.period, b.period);
  for (long long g = -w - p; g <= w + p; ++g) {
    if (g == 0) continue;
    if (std::find(exceptions.begin(), exceptions.end(), g) != exceptions.end())
      continue;
    if (a.contains(g) && !b.contains(g)) return false;
  }
  // beyond w both sets are periodic with period p, and the band above
  // covered one full period on each side
  return true;
}

bool hitting_equal(const HittingSet& a, const HittingSet& b) {
  return hitting_subset(a, b) && hitting_subset(b, a);
}

// ---------------------------------------------------------------------------
// hitting sets

HittingSet hitting(const SubshiftPresentation& X, const Pattern& U,
                   const Pattern& V) {
  guard_subshift(X);
  const ZShiftGraph& zg = *X.zgraph();
  ZPat zu = to_zpat(X.ctx(), U, (int)X.alphabet().size());
  ZPat zv = to_zpat(X.ctx(), V, (int)X.alphabet().size());

  VSet end_u = run_fwd(zg, zu.sym), start_u = run_bwd(zg, zu.sym);
  VSet end_v = run_fwd(zg, zv.sym), start_v = run_bwd(zg, zv.sym);
  require(any_of(end_u), Errc::NotApplicable,
          "the first cylinder is empty in this subshift");
  require(any_of(end_v), Errc::NotApplicable,
          "the second cylinder is empty in this subshift");

  long long cap = 2LL * zg.vertex_count() * zg.vertex_count() + 64;
  auto step = [&](const VSet& s) { return step_fwd(zg, s, -1); };
  TailIter tr = iterate_tail(end_u, start_v, cap, step);
  TailIter tl = iterate_tail(end_v, start_u, cap, step);

  long long base_r = zu.hi() - zv.lo + 1;
  long long base_l = zv.hi() - zu.lo + 1;
  HittingSet h = assemble_z(base_r, tr, base_l, tl, [&](long long g) {
    return joint_feasible(zg, zu, zv, g);
  });
  std::ostringstream os;
  os << "cylinder pair on windows [" << zu.lo << "," << zu.hi() << "] x ["
     << zv.lo << "," << zv.hi() << "]; tails stabilize after "
     << std::max(tr.transient, tl.transient) << " with periods "
     << tr.period << "/" << tl.period;
  h.detail = os.str();
  return h;
}

HittingSet hitting(const FiniteSystem& sys, const std::vector<int>& U,
                   const std::vector<int>& V, int ball_radius) {
  require(!U.empty(), Errc::NotApplicable, "the first state set is empty");
  require(!V.empty(), Errc::NotApplicable, "the second state set is empty");
  int n = sys.size();
  VSet su(n, 0), sv(n, 0);
  for (int x : U) {
    require(x >= 0 && x < n, Errc::MalformedElement, "state index out of range");
    su[(std::size_t)x] = 1;
  }
  for (int x : V) {
    require(x >= 0 && x < n, Errc::MalformedElement, "state index out of range");
    sv[(std::size_t)x] = 1;
  }

  const GroupCtx& ctx = sys.ctx();
  if (ctx.kind() == GroupKind::Integers) {
    GroupElement fwd = ctx.generator(0), bwd = ctx.inv(fwd);
    auto image = [&](const VSet& s, const GroupElement& g) {
      VSet t(n, 0);
      for (int x = 0; x < n; ++x)
        if (s[(std::size_t)x]) t[(std::size_t)sys.apply(g, x)] = 1;
      return t;
    };
    long long cap = 2LL * n * n + 64;
    TailIter tr = iterate_tail(su, sv, cap,
                               [&](const VSet& s) { return image(s, fwd); });
    TailIter tl = iterate_tail(su, sv, cap,
                               [&](const VSet& s) { return image(s, bwd); });
    HittingSet h =
        assemble_z(0, tr, 0, tl, [](long long) { return false; });
    h.detail = "state-set pair; image sets recur with periods " +
               std::to_string(tr.period) + "/" + std::to_string(tl.period);
    return h;
  }

  HittingSet h;
  h.kind = ctx.kind();
  if (ctx.kind() == GroupKind::Lattice) {
    // componentwise generator orders make ball membership exact everywhere
    h.component_periods.assign((std::size_t)ctx.rank(), 1);
    long long need = 0;
    for (int i = 0; i < ctx.rank(); ++i) {
      std::vector<int> img(n);
      for (int x = 0; x < n; ++x) img[(std::size_t)x] = sys.apply(ctx.generator(i), x);
      std::vector<char> done(n, 0);
      long long order = 1;
      for (int x = 0; x < n; ++x) {
        if (done[(std::size_t)x]) continue;
        long long len = 0;
        for (int y = x; !done[(std::size_t)y]; y = img[(std::size_t)y]) {
          done[(std::size_t)y] = 1;
          ++len;
        }
        order = lcm_ll(order, len);
      }
      h.component_periods[(std::size_t)i] = order;
      need += order - 1;
    }
    h.ball_radius = (int)std::max<long long>(ball_radius, need);
    h.exact = true;
  } else {
    h.ball_radius = ball_radius;
    h.truncated = true;
  }
  for (const GroupElement& g : ctx.ball(ctx.generators(), h.ball_radius)) {
    if (ctx.is_identity(g)) continue;
    bool in = false;
    for (int x : U)
      if (sv[(std::size_t)sys.apply(g, x)]) {
        in = true;
        break;
      }
    if (in) h.ball_members.push_back(g);
  }
  h.detail = ctx.kind() == GroupKind::Lattice
                 ? "ball listing with componentwise generator orders"
                 : "truncated ball listing over the free group";
  return h;
}

// ---------------------------------------------------------------------------
// properties of subshifts

const char* property_name(DynProperty p) {
  switch (p) {
    case DynProperty::Transitive: return "transitive";
    case DynProperty::TotallyTransitive: return "totally transitive";
    case DynProperty::WeaklyMixing: return "weakly mixing";
    case DynProperty::Mixing: return "mixing";
    case DynProperty::Minimal: return "minimal";
    case DynProperty::Specification: return "specification";
  }
  return "?";
}

namespace {

PropertyVerdict subshift_minimal(const SubshiftPresentation& X) {
  const ZShiftGraph& zg = *X.zgraph();
  PropertyVerdict v{DynProperty::Minimal, false, "", "", std::nullopt, ""};
  int cap = zg.vertex_count() + 2;
  std::set<Word> cur = zg.words(1);
  for (int k = 1; k <= cap; ++k) {
    std::set<Word> next = zg.words(k + 1);
    if (next.size() == cur.size()) {
      // finitely many points: unique two-sided extensions; the shift acts on
      // the length-k slice as a permutation
      std::map<Word, Word> succ;
      for (const Word& w : next) {
        Word head(w.begin(), w.end() - 1), tail(w.begin() + 1, w.end());
        succ[head] = tail;
      }
      Word start = *cur.begin(), at = start;
      Word orbit_word;
      std::size_t steps = 0;
      do {
        orbit_word.push_back(at[0]);
        at = succ.at(at);
        ++steps;
      } while (at != start && steps <= cur.size());
      if (steps == cur.size()) {
        v.holds = true;
        v.certificate = "the shift is exactly the orbit of (" +
                        word_text(X, orbit_word) + ") with period " +
                        std::to_string(steps);
      } else {
        v.certificate = "the periodic orbit of (" + word_text(X, orbit_word) +
                        ") is a proper closed invariant subset (" +
                        std::to_string(cur.size()) + " points total)";
      }
      v.detail = "language slice counts stabilize at " +
                 std::to_string(cur.size()) + " by length " + std::to_string(k);
      return v;
    }
    cur = std::move(next);
  }
  Word cyc = short_cycle_word(zg);
  require(zshift_accepts_periodic(zg, cyc), Errc::Internal,
          "a graph cycle must give a periodic point");
  v.certificate = "the periodic orbit of (" + word_text(X, cyc) +
                  ") is a proper closed invariant subset";
  v.detail = "language slice counts keep growing through length " +
             std::to_string(cap) + ", so the shift is infinite";
  return v;
}

}  // namespace

SpecGlueResult specification_glue(const SubshiftPresentation& X,
                                  long long radius,
                                  std::vector<SpecFragment> fragments) {
  guard_subshift(X);
  require(radius >= 0, Errc::NotApplicable, "the gap radius must be >= 0");
  require(!fragments.empty(), Errc::NotApplicable, "no fragments to glue");
  const ZShiftGraph& zg = *X.zgraph();
  for (std::size_t i = 0; i < fragments.size(); ++i) {
    require(!fragments[i].word.empty(), Errc::NotApplicable,
            "fragment words must be nonempty");
    require(zg.accepts(fragments[i].word), Errc::NotApplicable,
            "fragment " + std::to_string(i) + " is not a legal word");
  }
  std::sort(fragments.begin(), fragments.end(),
            [](const SpecFragment& a, const SpecFragment& b) { return a.at < b.at; });
  for (std::size_t i = 0; i + 1 < fragments.size(); ++i) {
    long long end_i = fragments[i].at + (long long)fragments[i].word.size() - 1;
    require(fragments[i + 1].at - end_i > radius, Errc::NotApplicable,
            "fragment intervals must keep pairwise distance greater than the "
            "radius");
  }

  SpecGlueResult r;
  r.radius = radius;
  long long lo = fragments.front().at;
  long long hi = fragments.back().at + (long long)fragments.back().word.size() - 1;
  std::vector<int> merged((std::size_t)(hi - lo + 1), -1);
  for (const SpecFragment& f : fragments)
    for (std::size_t j = 0; j < f.word.size(); ++j)
      merged[(std::size_t)(f.at + (long long)j - lo)] = f.word[j];

  // layered forward sweep, keeping every layer for reconstruction
  std::vector<VSet> layers;
  layers.push_back(full_set(zg));
  for (int a : merged) {
    layers.push_back(step_fwd(zg, layers.back(), a));
    if (!any_of(layers.back())) {
      r.ok = false;
      r.detail = "no point carries all fragments at these positions";
      return r;
    }
  }
  // choose an end vertex and walk back, preferring constrained letters
  int v = 0;
  for (int i = 0; i < zg.vertex_count(); ++i)
    if (layers.back()[(std::size_t)i]) {
      v = i;
      break;
    }
  Word glued(merged.size(), -1);
  for (std::size_t pos = merged.size(); pos-- > 0;) {
    const VSet& prev = layers[pos];
    int want = merged[pos];
    bool found = false;
    for (int u = 0; u < zg.vertex_count() && !found; ++u) {
      if (!prev[(std::size_t)u]) continue;
      for (auto [a, w] : zg.out()[u]) {
        if (w != v || (want >= 0 && a != want)) continue;
        glued[pos] = a;
        v = u;
        found = true;
        break;
      }
    }
    require(found, Errc::Internal, "layer reconstruction lost its path");
  }
  for (std::size_t i = 0; i < merged.size(); ++i)
    require(merged[i] < 0 || merged[i] == glued[i], Errc::Internal,
            "the glued word must repeat every fragment symbol");
  r.ok = true;
  r.glued = std::move(glued);
  r.glued_from = lo;
  r.detail = "glued " + std::to_string(fragments.size()) +
             " fragments across gaps greater than " + std::to_string(radius);
  return r;
}

PropertyVerdict check_property(const SubshiftPresentation& X, DynProperty p) {
  guard_subshift(X);
  const ZShiftGraph& zg = *X.zgraph();
  PropertyVerdict v{p, false, "", "", std::nullopt, ""};

  if (p == DynProperty::Minimal) return subshift_minimal(X);

  Canon c = analyze(zg);
  switch (p) {
    case DynProperty::Transitive: {
      v.holds = c.transitive;
      v.certificate = c.how;
      if (!v.holds) {
        std::string w = find_violating_pair(X, 2, good_infinite);
        if (!w.empty()) v.certificate += "; witness " + w;
      }
      v.detail = "transitive iff some strongly connected component of the "
                 "trimmed presentation carries the full language";
      break;
    }
    case DynProperty::TotallyTransitive: {
      v.holds = c.transitive && c.per == 1;
      v.caveat = kTotallyCaveat;
      if (v.holds) {
        v.certificate = "cycle-length gcd 1 on the deterministic core (" +
                        std::to_string(c.det_comp.vertex_count()) +
                        " vertices), so every subgroup nZ is hit";
      } else if (!c.transitive) {
        v.certificate = c.how;
      } else {
        v.certificate = "cycle lengths share gcd " + std::to_string(c.per) +
                        ", so hitting sets meet the subgroup " +
                        std::to_string(c.per) + "Z only along fixed residues";
        std::string w = find_violating_pair(X, 2, good_cofinite);
        if (!w.empty()) v.certificate += "; witness " + w;
      }
      v.detail = "reduces to the cycle-length gcd of the deterministic core";
      break;
    }
    case DynProperty::WeaklyMixing: {
      if (!c.transitive) {
        v.certificate = c.how + "; the pair system cannot be transitive when "
                               "the shift itself is not";
        v.detail = "decided through the pair presentation";
        break;
      }
      ZShiftGraph tensor = ZShiftGraph::product(c.det_comp, c.det_comp);
      int which = 0, total = 0;
      auto comp = full_language_component(tensor, &which, &total);
      v.holds = comp.has_value();
      v.certificate = v.holds
                          ? "a strongly connected component of the pair "
                            "presentation carries the full pair language"
                          : "no component of the pair presentation carries the "
                            "full pair language (" + std::to_string(total) +
                                " components); the diagonal cannot sync phases";
      v.detail = "decided through the pair presentation";
      break;
    }
    case DynProperty::Mixing: {
      v.holds = c.transitive && c.per == 1;
      if (v.holds) {
        long long k = c.det_comp.primitive_index();
        v.certificate = "primitivity index " + std::to_string(k) +
                        ": every vertex pair joins by paths of every length >= " +
                        std::to_string(k);
      } else if (!c.transitive) {
        v.certificate = c.how;
      } else {
        v.certificate = "cycle lengths share gcd " + std::to_string(c.per);
        std::string w = find_violating_pair(X, 2, good_cofinite);
        if (!w.empty()) v.certificate += "; witness " + w;
      }
      v.detail = "mixing iff the deterministic core is primitive";
      break;
    }
    case DynProperty::Specification: {
      bool mixing = c.transitive && c.per == 1;
      if (!mixing) {
        v.certificate = !c.transitive
                            ? c.how
                            : "cycle lengths share gcd " + std::to_string(c.per) +
                                  ", so no finite symmetric interval bounds the "
                                  "gluing gaps";
        if (c.transitive) {
          std::string w = find_violating_pair(X, 2, good_cofinite);
          if (!w.empty()) v.certificate += "; witness " + w;
        }
        v.detail = "specification holds iff mixing";
        break;
      }
      long long k = c.det_comp.primitive_index();
      Word probe = *zg.words(1).begin();
      SpecificationWitness wit;
      wit.radius = k;
      wit.fragments = {{0, probe}, {(long long)probe.size() + k, probe}};
      SpecGlueResult g = specification_glue(X, k, wit.fragments);
      require(g.ok, Errc::Inconsistency,
              "specification gluing failed despite the primitivity-index gap "
              "bound");
      wit.glued = g.glued;
      wit.glued_from = g.glued_from;
      wit.detail = "gap set F = [-" + std::to_string(k) + ", " +
                   std::to_string(k) + "]; " + g.detail;
      v.holds = true;
      v.witness = wit;
      v.certificate = "gap radius " + std::to_string(k) +
                      " (the primitivity index) glues every fragment family";
      v.detail = "specification holds iff mixing";
      break;
    }
    default: break;
  }
  return v;
}

// ---------------------------------------------------------------------------
// properties of finite systems

namespace {

// orbit partition under the subgroup generated by all generators
std::vector<int> orbit_ids(const FiniteSystem& sys) {
  int n = sys.size();
  std::vector<int> id(n, -1);
  int next = 0;
  for (int s = 0; s < n; ++s) {
    if (id[s] >= 0) continue;
    std::vector<int> stack{s};
    id[s] = next;
    while (!stack.empty()) {
      int x = stack.back();
      stack.pop_back();
      for (const GroupElement& g : sys.ctx().generators())
        for (const GroupElement& h : {g, sys.ctx().inv(g)}) {
          int y = sys.apply(h, x);
          if (id[y] < 0) {
            id[y] = next;
            stack.push_back(y);
          }
        }
    }
    ++next;
  }
  return id;
}

FiniteSystem pair_system(const FiniteSystem& sys) {
  int n = sys.size();
  std::vector<std::string> names;
  names.reserve((std::size_t)n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      names.push_back("(" + sys.states()[i] + "," + sys.states()[j] + ")");
  std::vector<std::vector<int>> gens;
  for (const GroupElement& g : sys.ctx().generators()) {
    std::vector<int> img((std::size_t)n * n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        img[(std::size_t)(i * n + j)] = sys.apply(g, i) * n + sys.apply(g, j);
    gens.push_back(std::move(img));
  }
  return FiniteSystem::make(sys.ctx(), std::move(names), std::move(gens));
}

std::vector<long long> divisors(long long p) {
  std::vector<long long> d;
  for (long long i = 1; i <= p; ++i)
    if (p % i == 0) d.push_back(i);
  return d;
}

}  // namespace

PropertyVerdict check_property(const FiniteSystem& sys, DynProperty p) {
  PropertyVerdict v{p, false, "", "", std::nullopt, ""};
  int n = sys.size();
  require(n >= 1, Errc::NotApplicable, "the system has no states");
  bool over_z = sys.ctx().kind() == GroupKind::Integers;

  auto pair_text = [&](int x, int y, const HittingSet& h) {
    return "N(" + sys.states()[(std::size_t)x] + ", {" +
           sys.states()[(std::size_t)y] + "}) = " + h.to_string();
  };

  switch (p) {
    case DynProperty::Transitive:
    case DynProperty::Minimal: {
      // over the integers: infinite (resp. syndetic) hitting sets for every
      // singleton pair; other groups reduce to orbit reachability, where a
      // nonempty hitting set is an entire coset of a finite-index stabilizer
      // and therefore both infinite and syndetic
      if (over_z) {
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y) {
            HittingSet h = hitting(sys, {x}, {y});
            bool ok = p == DynProperty::Transitive ? h.infinite_set()
                                                   : h.syndetic_set();
            if (!ok) {
              v.certificate = "witness " + pair_text(x, y, h);
              v.detail = p == DynProperty::Minimal
                             ? "a non-syndetic pointwise hitting set defeats "
                               "minimality"
                             : "a finite hitting set defeats transitivity";
              return v;
            }
          }
        v.holds = true;
        if (p == DynProperty::Minimal) {
          long long gap = 1;
          for (int x = 0; x < n; ++x)
            for (int y = 0; y < n; ++y) {
              HittingSet h = hitting(sys, {x}, {y});
              long long span = h.window + 2 * h.period, last = -span;
              for (long long g = -span; g <= span; ++g)
                if (h.contains(g)) {
                  gap = std::max(gap, g - last);
                  last = g;
                }
            }
          v.certificate = "every pointwise hitting set has gaps <= " +
                          std::to_string(gap) + ", so F = [0, " +
                          std::to_string(gap) + "] translates it over the group";
        } else {
          v.certificate = "every singleton-pair hitting set is infinite";
        }
      } else {
        std::vector<int> ids = orbit_ids(sys);
        bool one = std::all_of(ids.begin(), ids.end(),
                               [&](int i) { return i == ids[0]; });
        v.holds = one;
        v.certificate = one
                            ? "one generator orbit; every pointwise hitting set "
                              "is a coset of a finite-index stabilizer, hence "
                              "infinite and syndetic"
                            : "the generator action splits the states into " +
                                  std::to_string(1 + *std::max_element(
                                                         ids.begin(), ids.end())) +
                                  " orbits";
      }
      v.detail = "exhaustive over the singleton opens";
      return v;
    }
    case DynProperty::TotallyTransitive: {
      require(over_z, Errc::UnsupportedGroup,
              "total transitivity is decided against the subgroups nZ of the "
              "integer action only");
      v.caveat = kTotallyCaveat;
      for (int x = 0; x < n; ++x)
        for (int y = 0; y < n; ++y) {
          HittingSet h = hitting(sys, {x}, {y});
          for (long long d : divisors(h.period)) {
            bool hit = false;
            for (long long r : h.pos_residues) hit |= (r % d == 0);
            for (long long r : h.neg_residues) hit |= (r % d == 0);
            if (!hit) {
              v.certificate = "witness " + pair_text(x, y, h) +
                              "; no tail residue is divisible by " +
                              std::to_string(d) + ", so the subgroup " +
                              std::to_string(d) + "Z is eventually missed";
              v.detail = "tail residues decide every subgroup nZ at once";
              return v;
            }
          }
        }
      v.holds = true;
      v.certificate = "every singleton-pair tail carries a residue divisible "
                      "by each divisor of its period";
      v.detail = "tail residues decide every subgroup nZ at once";
      return v;
    }
    case DynProperty::WeaklyMixing: {
      PropertyVerdict inner = check_property(pair_system(sys),
                                             DynProperty::Transitive);
      v.holds = inner.holds;
      v.certificate = "pair system: " + inner.certificate;
      v.detail = "decided through the componentwise pair action";
      return v;
    }
    case DynProperty::Mixing: {
      if (over_z) {
        for (int x = 0; x < n; ++x)
          for (int y = 0; y < n; ++y) {
            HittingSet h = hitting(sys, {x}, {y});
            if (!h.cofinite_set()) {
              v.certificate = "witness " + pair_text(x, y, h);
              v.detail = "a non-cofinite hitting set defeats mixing";
              return v;
            }
          }
        v.holds = true;
        v.certificate = "every singleton-pair hitting set is cofinite";
      } else {
        v.holds = n == 1;
        v.certificate =
            n == 1 ? "one state: the only hitting set is the whole group "
                     "minus the identity"
                   : "with " + std::to_string(n) + " states a pointwise "
                     "hitting set omits a stabilizer coset, which is infinite";
      }
      v.detail = "exhaustive over the singleton opens";
      return v;
    }
    case DynProperty::Specification: {
      v.holds = n == 1;
      v.certificate =
          n == 1 ? "one state: every gluing request is satisfied by the "
                   "unique point"
                 : "tracking an invertible action on singleton blocks forces "
                   "the glued point to equal each fragment's point, which "
                   "fails for two distinct states";
      v.detail = "on a finite discrete space specification collapses to the "
                 "one-point case, matching mixing";
      return v;
    }
    default: break;
  }
  return v;
}

std::vector<PropertyRow> property_table(const SubshiftPresentation& X) {
  std::vector<PropertyRow> rows;
  for (DynProperty p :
       {DynProperty::Transitive, DynProperty::TotallyTransitive,
        DynProperty::WeaklyMixing, DynProperty::Mixing, DynProperty::Minimal,
        DynProperty::Specification}) {
    PropertyRow row;
    try {
      row.verdict = check_property(X, p);
      row.decided = true;
    } catch (const Error& e) {
      if (e.code() != Errc::UnsupportedGroup) throw;
      row.verdict.property = p;
      row.verdict.caveat = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<PropertyRow> property_table(const FiniteSystem& sys) {
  std::vector<PropertyRow> rows;
  for (DynProperty p :
       {DynProperty::Transitive, DynProperty::TotallyTransitive,
        DynProperty::WeaklyMixing, DynProperty::Mixing, DynProperty::Minimal,
        DynProperty::Specification}) {
    PropertyRow row;
    try {
      row.verdict = check_property(sys, p);
      row.decided = true;
    } catch (const Error& e) {
      if (e.code() != Errc::UnsupportedGroup) throw;
      row.verdict.property = p;
      row.verdict.caveat = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// ---------------------------------------------------------------------------
// family transitivity

const char* family_name(Family f) {
  switch (f) {
    case Family::Infinite: return "infinite sets";
    case Family::Thick: return "translates of every finite set";
    case Family::Cofinite: return "cofinite sets";
  }
  return "?";
}

namespace {

bool family_member_z(const HittingSet& h, Family f) {
  switch (f) {
    case Family::Infinite: return h.infinite_set();
    case Family::Thick:
      // arbitrarily long runs live in a full tail residue system
      return (long long)h.pos_residues.size() == h.period ||
             (long long)h.neg_residues.size() == h.period;
    case Family::Cofinite: return h.cofinite_set();
  }
  return false;
}

DynProperty family_route(Family f) {
  switch (f) {
    case Family::Infinite: return DynProperty::Transitive;
    case Family::Thick: return DynProperty::WeaklyMixing;
    case Family::Cofinite: return DynProperty::Mixing;
  }
  return DynProperty::Transitive;
}

const char* family_route_note(Family f) {
  switch (f) {
    case Family::Infinite:
      return "infinite hitting sets characterize transitivity";
    case Family::Thick:
      return "thick hitting sets characterize weak mixing over an abelian "
             "group";
    case Family::Cofinite:
      return "cofinite hitting sets characterize mixing";
  }
  return "";
}

}  // namespace

FamilyVerdict family_transitive(const SubshiftPresentation& X, Family f,
                                int sample_length) {
  guard_subshift(X);
  FamilyVerdict fv;
  fv.family = f;
  PropertyVerdict route = check_property(X, family_route(f));
  fv.holds = route.holds;
  const ZShiftGraph& zg = *X.zgraph();
  std::string counter;
  for (int lu = 1; lu <= sample_length; ++lu)
    for (int lv = 1; lv <= sample_length; ++lv)
      for (const Word& u : sample_words(zg, lu, 6))
        for (const Word& w : sample_words(zg, lv, 6)) {
          HittingSet h = hitting(X, word_pattern(u), word_pattern(w));
          bool member = family_member_z(h, f);
          ++fv.pairs_checked;
          require(!fv.holds || member, Errc::Inconsistency,
                  "a sampled cylinder pair contradicts the family decision: "
                  "N(C(" + word_text(X, u) + "), C(" + word_text(X, w) +
                      ")) = " + h.to_string());
          if (!member && counter.empty())
            counter = "N(C(" + word_text(X, u) + " @0), C(" + word_text(X, w) +
                      " @0)) = " + h.to_string() + " leaves the family";
        }
  fv.detail = std::string(family_route_note(f)) + "; " +
              std::to_string(fv.pairs_checked) + " cylinder pairs sampled";
  if (!fv.holds)
    fv.detail += counter.empty() ? "" : "; " + counter;
  return fv;
}

FamilyVerdict family_transitive(const FiniteSystem& sys, Family f) {
  FamilyVerdict fv;
  fv.family = f;
  int n = sys.size();
  if (sys.ctx().kind() != GroupKind::Integers) {
    require(f == Family::Infinite, Errc::UnsupportedGroup,
            "off the integers only the infinite-sets family is decidable "
            "from orbit structure");
    PropertyVerdict route = check_property(sys, DynProperty::Transitive);
    fv.holds = route.holds;
    fv.pairs_checked = n * n;
    fv.detail = std::string(family_route_note(f)) + "; " + route.certificate;
    return fv;
  }
  bool all = true;
  std::string counter;
  for (int x = 0; x < n; ++x)
    for (int y = 0; y < n; ++y) {
      HittingSet h = hitting(sys, {x}, {y});
      bool member = family_member_z(h, f);
      all &= member;
      ++fv.pairs_checked;
      if (!member && counter.empty())
        counter = "N(" + sys.states()[(std::size_t)x] + ", {" +
                  sys.states()[(std::size_t)y] + "}) = " + h.to_string();
    }
  fv.holds = all;
  PropertyVerdict route = check_property(sys, family_route(f));
  require(route.holds == fv.holds, Errc::Inconsistency,
          "the exhaustive family decision disagrees with the matching "
          "property");
  fv.detail = std::string(family_route_note(f)) + "; every singleton pair "
              "checked";
  if (!counter.empty()) fv.detail += "; counterexample " + counter;
  return fv;
}

// ---------------------------------------------------------------------------
// orbit spaces as subshifts

SubshiftPresentation orbit_space_subshift(const FiniteSystem& sys,
                                          const Cover& U) {
  require(sys.ctx().kind() == GroupKind::Integers, Errc::UnsupportedGroup,
          "orbit-space presentations are built over the integer action");
  Cover checked = Cover::of(sys, U.blocks);  // validates coverage and indices
  std::vector<std::string> names;
  names.reserve(checked.blocks.size());
  for (const auto& b : checked.blocks) names.push_back(join_names(sys.states(), b));
  SoficGraph sg;
  for (int x = 0; x < sys.size(); ++x) sg.vertices.push_back(sys.states()[(std::size_t)x]);
  GroupElement gen = sys.ctx().generator(0);
  for (int x = 0; x < sys.size(); ++x) {
    int y = sys.apply(gen, x);
    for (int b = 0; b < (int)checked.blocks.size(); ++b)
      if (std::binary_search(checked.blocks[(std::size_t)b].begin(),
                             checked.blocks[(std::size_t)b].end(), x))
        sg.edges.push_back({x, y, b});
  }
  return SubshiftPresentation::sofic(std::move(names), sg);
}

SubshiftPresentation orbit_space_subshift(
    const SubshiftPresentation& X,
    const std::vector<std::vector<int>>& letter_blocks) {
  guard_subshift(X);
  int asz = (int)X.alphabet().size();
  std::vector<char> covered((std::size_t)asz, 0);
  for (const auto& b : letter_blocks) {
    require(!b.empty(), Errc::NotACover, "letter blocks must be nonempty");
    for (int a : b) {
      require(a >= 0 && a < asz, Errc::NotACover, "letter index out of range");
      covered[(std::size_t)a] = 1;
    }
  }
  for (int a = 0; a < asz; ++a)
    require(covered[(std::size_t)a], Errc::NotACover,
            "letter " + X.alphabet()[(std::size_t)a] + " is not covered");
  std::vector<std::string> names;
  std::vector<std::string> letters = X.alphabet();
  for (const auto& b : letter_blocks) {
    std::vector<int> sorted = b;
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    names.push_back(join_names(letters, sorted));
  }
  const ZShiftGraph& zg = *X.zgraph();
  SoficGraph sg;
  for (int v = 0; v < zg.vertex_count(); ++v)
    sg.vertices.push_back("v" + std::to_string(v));
  for (int v = 0; v < zg.vertex_count(); ++v)
    for (auto [a, w] : zg.out()[v])
      for (int b = 0; b < (int)letter_blocks.size(); ++b)
        if (std::find(letter_blocks[(std::size_t)b].begin(),
                      letter_blocks[(std::size_t)b].end(),
                      a) != letter_blocks[(std::size_t)b].end())
          sg.edges.push_back({v, w, b});
  return SubshiftPresentation::sofic(std::move(names), sg);
}

// ---------------------------------------------------------------------------
// the hitting-set identity battery

namespace {

FiniteSystem level_system(const InverseSystem& T, int l) {
  return FiniteSystem::make(T.ctx, T.levels[(std::size_t)l].names,
                            T.levels[(std::size_t)l].gen_images);
}

// window patterns over a cover that are realized by at least one state,
// together with their witness state sets
struct WindowAtom {
  std::vector<int> blocks;  // per window offset
  std::vector<int> states;  // the realizing states
};

std::vector<WindowAtom> window_atoms(const FiniteSystem& sys, const Cover& C,
                                     const std::vector<long long>& window) {
  std::vector<WindowAtom> out;
  std::vector<std::vector<int>> images(window.size());
  for (std::size_t i = 0; i < window.size(); ++i) {
    GroupElement g = GroupElement::lattice({window[i]});
    images[i].resize((std::size_t)sys.size());
    for (int x = 0; x < sys.size(); ++x)
      images[i][(std::size_t)x] = sys.apply(g, x);
  }
  int nb = (int)C.blocks.size();
  std::vector<int> pick(window.size(), 0);
  for (;;) {
    WindowAtom atom;
    atom.blocks = pick;
    for (int x = 0; x < sys.size(); ++x) {
      bool ok = true;
      for (std::size_t i = 0; i < window.size() && ok; ++i) {
        const auto& blk = C.blocks[(std::size_t)pick[i]];
        ok = std::binary_search(blk.begin(), blk.end(), images[i][(std::size_t)x]);
      }
      if (ok) atom.states.push_back(x);
    }
    if (!atom.states.empty()) out.push_back(std::move(atom));
    std::size_t i = 0;
    while (i < pick.size() && ++pick[i] == nb) pick[i++] = 0;
    if (i == pick.size()) break;
  }
  return out;
}

Pattern atom_pattern(const WindowAtom& atom,
                     const std::vector<long long>& window) {
  Pattern p;
  for (std::size_t i = 0; i < window.size(); ++i)
    p.cells[GroupElement::lattice({window[i]})] = atom.blocks[i];
  return p;
}

}  // namespace

HittingLemmasReport verify_hitting_lemmas(const FiniteSystem& sys,
                                          const std::vector<Cover>& tower_chain,
                                          const Cover& sandwich_cover,
                                          const Cover& partition,
                                          const std::vector<long long>& window,
                                          int chain_level) {
  require(sys.ctx().kind() == GroupKind::Integers, Errc::UnsupportedGroup,
          "the identity battery runs over the integer action");
  require(!window.empty(), Errc::NotApplicable, "the window must be nonempty");
  require(partition.partition, Errc::PartitionRequired,
          "the pointwise identity needs a partition");
  HittingLemmasReport rep;

  // --- 6.1 / 6.2: level hitting sets embed into limit hitting sets --------
  {
    InverseSystem T = tower_of_orbit_spaces(sys, tower_chain);
    validate_tower(T);
    MlReport ml = check_ml(T);
    require(ml.holds, Errc::NotApplicable,
            "the tower must satisfy the stabilization property");
    ThreadSet ts = limit_threads(T);
    require(!ts.threads.empty(), Errc::NotApplicable, "the limit is empty");
    FiniteSystem lim = thread_system(T);
    int tn = (int)ts.threads.size();
    int lam = -1;
    for (int l = 0; l <= T.top() && lam < 0; ++l) {
      std::set<int> seen;
      for (const auto& t : ts.threads) seen.insert(t[(std::size_t)l]);
      if ((int)seen.size() == tn) lam = l;
    }
    require(lam >= 0, Errc::Internal, "threads must separate at some level");

    LemmaCheck c1{"6.1", true, 0, ""};
    LemmaCheck c2{"6.2", true, 0, ""};
    for (int tu = 0; tu < tn; ++tu)
      for (int tv = 0; tv < tn; ++tv) {
        HittingSet nl = hitting(lim, {tu}, {tv});
        int ulam = ts.threads[(std::size_t)tu][(std::size_t)lam];
        int vlam = ts.threads[(std::size_t)tv][(std::size_t)lam];
        int gamma = std::max(lam, ml.eta[(std::size_t)lam]);
        for (int eta = gamma; eta <= T.top(); ++eta) {
          std::vector<int> comp = bonding_composite(T, eta, lam);
          std::vector<int> ue, ve;
          for (int xpt = 0; xpt < T.levels[(std::size_t)eta].size(); ++xpt) {
            if (comp[(std::size_t)xpt] == ulam) ue.push_back(xpt);
            if (comp[(std::size_t)xpt] == vlam) ve.push_back(xpt);
          }
          if (ue.empty() || ve.empty()) {
            c1.holds = false;
            c1.detail = "a pulled-back open came out empty at level " +
                        std::to_string(eta);
            continue;
          }
          HittingSet ne = hitting(level_system(T, eta), ue, ve);
          ++c1.cases;
          if (!hitting_subset(ne, nl)) {
            c1.holds = false;
            c1.detail = "level " + std::to_string(eta) + " pair (" +
                        std::to_string(tu) + "," + std::to_string(tv) +
                        "): " + ne.to_string() + " leaves " + nl.to_string();
          }
        }
        HittingSet np = hitting(level_system(T, lam), {ulam}, {vlam});
        ++c2.cases;
        if (!hitting_subset(np, nl)) {
          c2.holds = false;
          c2.detail = "pointwise pair (" + std::to_string(tu) + "," +
                      std::to_string(tv) + ") escapes the limit set";
        }
      }
    c1.detail = c1.holds ? std::to_string(c1.cases) +
                               " pulled-back pairs stay inside the limit sets"
                         : c1.detail;
    c2.detail = c2.holds ? std::to_string(c2.cases) +
                               " pointwise projections stay inside"
                         : c2.detail;
    rep.checks.push_back(std::move(c1));
    rep.checks.push_back(std::move(c2));
  }

  // --- 6.3 / 6.4: the window-pattern sandwich ------------------------------
  {
    std::vector<long long> diffs;
    for (long long a : window)
      for (long long b : window)
        if (a != b) diffs.push_back(b - a);
    auto run_sandwich = [&](const Cover& C, LemmaCheck& chk, bool demand_eq) {
      SubshiftPresentation O = orbit_space_subshift(sys, C);
      std::vector<WindowAtom> atoms = window_atoms(sys, C, window);
      int strict = 0;
      for (const WindowAtom& A : atoms)
        for (const WindowAtom& B : atoms) {
          HittingSet base = hitting(sys, A.states, B.states);
          HittingSet mid = hitting(O, atom_pattern(A, window),
                                   atom_pattern(B, window));
          ++chk.cases;
          bool upper = hitting_subset(mid, base);
          bool lower = hitting_subset_excluding(base, diffs, mid);
          bool equal = upper && hitting_subset(base, mid);
          if (!upper || !lower || (demand_eq && !equal)) {
            chk.holds = false;
            chk.detail = "pattern pair violates the sandwich: base " +
                         base.to_string() + " vs cylinders " + mid.to_string();
            return 0;
          }
          if (!equal) ++strict;
        }
      return strict;
    };
    LemmaCheck c3{"6.3", true, 0, ""};
    int strict = run_sandwich(sandwich_cover, c3, sandwich_cover.partition);
    if (c3.holds)
      c3.detail = std::to_string(c3.cases) + " pattern pairs sandwiched; " +
                  std::to_string(strict) + " strict (cover" +
                  (sandwich_cover.partition ? ", partition)" : ", overlapping)");
    if (sandwich_cover.partition && strict > 0) c3.holds = false;
    rep.checks.push_back(std::move(c3));

    LemmaCheck c4{"6.4", true, 0, ""};
    int pstrict = run_sandwich(partition, c4, true);
    if (c4.holds)
      c4.detail = std::to_string(c4.cases) +
                  " partition pattern pairs give exact equality";
    (void)pstrict;
    rep.checks.push_back(std::move(c4));
  }

  // --- 6.5: pointwise equality over the partition --------------------------
  {
    LemmaCheck c5{"6.5", true, 0, ""};
    OrbitSpace os = build_orbit_space(sys, partition);
    std::vector<std::string> cn;
    std::vector<std::vector<int>> ci;
    for (int c = 0; c < os.point_count(); ++c)
      cn.push_back(join_names(sys.states(), os.classes().blocks[(std::size_t)c]));
    for (const GroupElement& g : sys.ctx().generators()) {
      std::vector<int> img((std::size_t)os.point_count());
      for (int c = 0; c < os.point_count(); ++c)
        img[(std::size_t)c] = os.shift(g, c);
      ci.push_back(std::move(img));
    }
    FiniteSystem csys = FiniteSystem::make(sys.ctx(), cn, ci);
    std::vector<GroupElement> welems;
    for (long long wpos : window) welems.push_back(GroupElement::lattice({wpos}));
    std::vector<WindowAtom> atoms = window_atoms(sys, partition, window);
    for (int x = 0; x < sys.size(); ++x)
      for (const WindowAtom& B : atoms) {
        std::vector<int> classes;
        for (int c = 0; c < os.point_count(); ++c) {
          Pattern pat = os.pattern_of(c, welems);
          bool match = true;
          for (std::size_t i = 0; i < window.size() && match; ++i)
            match = pat.cells.at(welems[i]) == B.blocks[i];
          if (match) classes.push_back(c);
        }
        require(!classes.empty(), Errc::Internal,
                "a realized pattern must match at least one class");
        HittingSet lhs = hitting(csys, {os.class_of(x)}, classes);
        HittingSet rhs = hitting(sys, {x}, B.states);
        ++c5.cases;
        if (!hitting_equal(lhs, rhs)) {
          c5.holds = false;
          c5.detail = "state " + sys.states()[(std::size_t)x] +
                      ": classes give " + lhs.to_string() + " but points give " +
                      rhs.to_string();
        }
      }
    if (c5.holds)
      c5.detail = std::to_string(c5.cases) +
                  " state/pattern pairs agree pointwise";
    rep.checks.push_back(std::move(c5));
  }

  // --- 6.14: tuple cylinders against block cylinders -----------------------
  {
    require(sys.has_metric(), Errc::NoMetric,
            "the descending chain needs the system metric");
    Chain15 chain = build_chain_15(sys);
    require(chain_level >= 0 && chain_level < (int)chain.oprime.size(),
            Errc::NotApplicable, "chain level out of range");
    const SubshiftPresentation& op = chain.oprime[(std::size_t)chain_level];
    require(op.z_exact() && op.nonempty(), Errc::Internal,
            "the tuple subshift must be exact and nonempty");
    SubshiftPresentation OV =
        orbit_space_subshift(sys, chain.V[(std::size_t)chain_level]);
    int nblocks = (int)chain.V[(std::size_t)chain_level].blocks.size();
    std::vector<int> kappa;
    for (const auto& tup : chain.tuples[(std::size_t)chain_level])
      kappa.push_back(tup.back());

    LemmaCheck c14{"6.14", true, 0, ""};
    ZShiftGraph rec = zshift_recode(*op.zgraph(), kappa, nblocks);
    if (!zshift_language_equal(rec, *OV.zgraph())) {
      c14.holds = false;
      c14.detail = "the last-coordinate recode does not present the level "
                   "orbit space";
    }
    std::vector<GroupElement> welems;
    for (long long wpos : window) welems.push_back(GroupElement::lattice({wpos}));
    LanguageSlice slice = language(op, welems);
    for (const Pattern& P : slice.patterns)
      for (const Pattern& Q : slice.patterns) {
        Pattern kp, kq;
        for (const auto& [g, s] : P.cells) kp.cells[g] = kappa[(std::size_t)s];
        for (const auto& [g, s] : Q.cells) kq.cells[g] = kappa[(std::size_t)s];
        HittingSet lhs = hitting(op, P, Q);
        HittingSet rhs = hitting(OV, kp, kq);
        ++c14.cases;
        if (!hitting_equal(lhs, rhs)) {
          c14.holds = false;
          c14.detail = "a tuple-pattern pair disagrees: " + lhs.to_string() +
                       " vs " + rhs.to_string();
        }
      }
    if (c14.holds)
      c14.detail = std::to_string(c14.cases) +
                   " tuple-pattern pairs match their block projections";
    rep.checks.push_back(std::move(c14));
  }

  rep.all_hold = std::all_of(rep.checks.begin(), rep.checks.end(),
                             [](const LemmaCheck& c) { return c.holds; });
  if (!rep.all_hold) {
    std::string bad;
    for (const LemmaCheck& c : rep.checks)
      if (!c.holds) bad += (bad.empty() ? "" : ", ") + c.name + " (" + c.detail + ")";
    fail(Errc::Inconsistency, "hitting-set identities failed: " + bad);
  }
  rep.detail = std::to_string(rep.checks.size()) +
               " identity groups verified on this instance";
  return rep;
}

// ---------------------------------------------------------------------------
// inheritance reports

namespace {

const DynProperty kAllProps[] = {
    DynProperty::Transitive, DynProperty::TotallyTransitive,
    DynProperty::WeaklyMixing, DynProperty::Mixing, DynProperty::Minimal,
    DynProperty::Specification};

void require_line(InheritanceReport& rep, const InheritanceLine& line,
                  const std::string& where) {
  if (line.hypothesis && !line.conclusion)
    fail(Errc::Inconsistency, std::string(property_name(line.property)) +
                                  " holds on " + where +
                                  " but fails on the derived system");
  rep.lines.push_back(line);
}

void finish_report(InheritanceReport& rep) {
  rep.all_hold = std::all_of(
      rep.lines.begin(), rep.lines.end(),
      [](const InheritanceLine& l) { return !l.hypothesis || l.conclusion; });
}

}  // namespace

InheritanceReport inheritance_report(const InverseSystem& T) {
  require(T.ctx.kind() == GroupKind::Integers, Errc::UnsupportedGroup,
          "inheritance reports run over the integer action");
  validate_tower(T);
  require(!T.levels.empty(), Errc::NotApplicable, "the tower has no levels");
  for (const TowerLevel& lv : T.levels)
    require(lv.size() > 0, Errc::NotApplicable, "a tower level is empty");
  MlReport ml = check_ml(T);
  require(ml.holds, Errc::NotApplicable,
          "the tower must satisfy the stabilization property");
  FiniteSystem lim = thread_system(T);

  InheritanceReport rep;
  for (DynProperty p : kAllProps) {
    InheritanceLine line;
    line.property = p;
    bool all = true;
    for (int l = 0; l <= T.top(); ++l)
      all &= check_property(level_system(T, l), p).holds;
    line.hypothesis = all;
    line.conclusion = check_property(lim, p).holds;
    line.detail = all ? (line.conclusion
                             ? "holds on every level and on the limit"
                             : "holds on every level but not on the limit")
                      : "fails on some level, so nothing is claimed";
    require_line(rep, line, "every tower level");
  }
  finish_report(rep);
  rep.detail = "tower with " + std::to_string(T.levels.size()) +
               " levels against its thread limit";
  return rep;
}

InheritanceReport inheritance_report(const FiniteSystem& sys, const Cover& U) {
  require(sys.ctx().kind() == GroupKind::Integers, Errc::UnsupportedGroup,
          "inheritance reports run over the integer action");
  Cover checked = Cover::of(sys, U.blocks);
  InheritanceReport rep;
  if (checked.partition) {
    OrbitSpace os = build_orbit_space(sys, checked);
    std::vector<std::string> cn;
    std::vector<std::vector<int>> ci;
    for (int c = 0; c < os.point_count(); ++c)
      cn.push_back(join_names(sys.states(), os.classes().blocks[(std::size_t)c]));
    for (const GroupElement& g : sys.ctx().generators()) {
      std::vector<int> img((std::size_t)os.point_count());
      for (int c = 0; c < os.point_count(); ++c)
        img[(std::size_t)c] = os.shift(g, c);
      ci.push_back(std::move(img));
    }
    FiniteSystem osys = FiniteSystem::make(sys.ctx(), cn, ci);
    for (DynProperty p : kAllProps) {
      InheritanceLine line;
      line.property = p;
      line.hypothesis = check_property(sys, p).holds;
      line.conclusion = check_property(osys, p).holds;
      line.detail = "partition orbit space with " +
                    std::to_string(os.point_count()) + " classes";
      require_line(rep, line, "the base system");
    }
    rep.detail = "base system against its partition orbit space";
  } else {
    SubshiftPresentation O = orbit_space_subshift(sys, checked);
    for (DynProperty p : kAllProps) {
      if (p == DynProperty::Minimal || p == DynProperty::Specification)
        continue;  // these transfers need a partition
      InheritanceLine line;
      line.property = p;
      line.hypothesis = check_property(sys, p).holds;
      line.conclusion = check_property(O, p).holds;
      line.detail = "orbit-space shift over an overlapping cover";
      require_line(rep, line, "the base system");
    }
    rep.detail = "base system against its cover orbit space (overlapping "
                 "cover: minimality and specification are not claimed)";
  }
  finish_report(rep);
  return rep;
}

InheritanceReport inheritance_report(
    const SubshiftPresentation& X,
    const std::vector<std::vector<int>>& letter_blocks) {
  guard_subshift(X);
  SubshiftPresentation O = orbit_space_subshift(X, letter_blocks);
  // partition of the alphabet <=> partition of the shift by letter cylinders
  std::vector<int> seen((std::size_t)X.alphabet().size(), 0);
  bool part = true;
  for (const auto& b : letter_blocks)
    for (int a : b) part &= (seen[(std::size_t)a]++ == 0);
  InheritanceReport rep;
  for (DynProperty p : kAllProps) {
    if (!part &&
        (p == DynProperty::Minimal || p == DynProperty::Specification))
      continue;
    InheritanceLine line;
    line.property = p;
    line.hypothesis = check_property(X, p).holds;
    line.conclusion = check_property(O, p).holds;
    line.detail = part ? "letter-partition orbit space"
                       : "letter-cover orbit space";
    require_line(rep, line, "the base shift");
  }
  finish_report(rep);
  rep.detail = part ? "shift against its letter-partition orbit space"
                    : "shift against its letter-cover orbit space (minimality "
                      "and specification are not claimed)";
  return rep;
}

}  // namespace sftlab
