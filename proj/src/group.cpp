#include "sftlab/group.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>
#include <set>
#include <sstream>

namespace sftlab {

GroupElement GroupElement::lattice(std::vector<long long> coords) {
  GroupElement g;
  g.data_.assign(coords.begin(), coords.end());
  g.word_ = false;
  return g;
}

GroupElement GroupElement::word(const std::vector<int>& letters) {
  GroupElement g;
  g.word_ = true;
  for (int l : letters) {
    if (!g.data_.empty() && g.data_.back() == -l)
      g.data_.pop_back();  // cancel s s^-1
    else
      g.data_.push_back(l);
  }
  return g;
}

bool GroupElement::operator<(const GroupElement& o) const {
  if (word_ != o.word_) return word_ < o.word_;
  if (data_.size() != o.data_.size()) return data_.size() < o.data_.size();
  return data_ < o.data_;
}

GroupCtx GroupCtx::integers() { return GroupCtx(GroupKind::Integers, 1); }

GroupCtx GroupCtx::lattice(int d) {
  require(d >= 1 && d <= 8, Errc::UnsupportedGroup, "lattice rank must be 1..8");
  return GroupCtx(GroupKind::Lattice, d);
}

GroupCtx GroupCtx::free_group(int k) {
  require(k >= 1 && k <= 26, Errc::UnsupportedGroup, "free rank must be 1..26");
  return GroupCtx(GroupKind::Free, k);
}

GroupElement GroupCtx::identity() const {
  if (kind_ == GroupKind::Free) return GroupElement::word({});
  return GroupElement::lattice(std::vector<long long>(rank_, 0));
}

GroupElement GroupCtx::generator(int i) const {
  require(i >= 0 && i < rank_, Errc::MalformedElement, "generator index out of range");
  if (kind_ == GroupKind::Free) return GroupElement::word({i + 1});
  std::vector<long long> c(rank_, 0);
  c[i] = 1;
  return GroupElement::lattice(c);
}

std::vector<GroupElement> GroupCtx::generators() const {
  std::vector<GroupElement> v;
  for (int i = 0; i < rank_; ++i) v.push_back(generator(i));
  return v;
}

bool GroupCtx::is_identity(const GroupElement& g) const {
  return g == identity();
}

void GroupCtx::validate(const GroupElement& g) const {
  if (kind_ == GroupKind::Free) {
    require(g.is_word(), Errc::MalformedElement, "expected a free-group word");
    const auto& w = g.data();
    for (std::size_t i = 0; i < w.size(); ++i) {
      long long l = w[i];
      require(l != 0 && std::llabs(l) <= rank_, Errc::MalformedElement,
              "letter out of range");
      require(i == 0 || w[i - 1] != -l, Errc::MalformedElement, "word not reduced");
    }
  } else {
    require(!g.is_word(), Errc::MalformedElement, "expected a lattice element");
    require((int)g.data().size() == rank_, Errc::MalformedElement,
            "coordinate count mismatches the lattice rank");
  }
}

GroupElement GroupCtx::mul(const GroupElement& a, const GroupElement& b) const {
  if (kind_ == GroupKind::Free) {
    std::vector<int> letters;
    for (long long l : a.data()) letters.push_back((int)l);
    for (long long l : b.data()) letters.push_back((int)l);
    return GroupElement::word(letters);
  }
  std::vector<long long> c(rank_);
  for (int i = 0; i < rank_; ++i) c[i] = a.data()[i] + b.data()[i];
  return GroupElement::lattice(c);
}

GroupElement GroupCtx::inv(const GroupElement& a) const {
  if (kind_ == GroupKind::Free) {
    std::vector<int> letters;
    for (auto it = a.data().rbegin(); it != a.data().rend(); ++it)
      letters.push_back((int)-*it);
    return GroupElement::word(letters);
  }
  std::vector<long long> c(rank_);
  for (int i = 0; i < rank_; ++i) c[i] = -a.data()[i];
  return GroupElement::lattice(c);
}

GroupElement GroupCtx::pow(const GroupElement& a, long long n) const {
  if (kind_ != GroupKind::Free) {
    std::vector<long long> c(rank_);
    for (int i = 0; i < rank_; ++i) c[i] = n * a.data()[i];
    return GroupElement::lattice(c);
  }
  GroupElement r = identity();
  GroupElement base = n < 0 ? inv(a) : a;
  for (long long i = 0, m = std::llabs(n); i < m; ++i) r = mul(r, base);
  return r;
}

long long GroupCtx::norm(const GroupElement& g) const {
  if (kind_ == GroupKind::Free) return (long long)g.data().size();
  long long s = 0;
  for (long long c : g.data()) s += std::llabs(c);
  return s;
}

std::vector<GroupElement> GroupCtx::ball(const std::vector<GroupElement>& S,
                                         int radius) const {
  // generator list: s, s^-1 per input, deduplicated, identity dropped
  std::vector<GroupElement> gens;
  auto push = [&](const GroupElement& g) {
    if (is_identity(g)) return;
    if (std::find(gens.begin(), gens.end(), g) == gens.end()) gens.push_back(g);
  };
  for (const auto& s : S) {
    validate(s);
    push(s);
    push(inv(s));
  }
  std::vector<GroupElement> out{identity()};
  std::set<GroupElement> seen{identity()};
  std::vector<GroupElement> frontier{identity()};
  for (int layer = 0; layer < radius; ++layer) {
    std::vector<GroupElement> next;
    for (const auto& u : frontier)
      for (const auto& t : gens) {
        GroupElement v = mul(u, t);
        if (seen.insert(v).second) next.push_back(v);
      }
    out.insert(out.end(), next.begin(), next.end());
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  return out;
}

std::vector<GroupElement> GroupCtx::enumerate(std::size_t n) const {
  int radius = 1;
  std::vector<GroupElement> b = ball(generators(), radius);
  while (b.size() < n) b = ball(generators(), ++radius);
  b.resize(n);
  return b;
}

std::string GroupCtx::to_string(const GroupElement& g) const {
  std::ostringstream os;
  if (kind_ == GroupKind::Integers) {
    os << g.data()[0];
  } else if (kind_ == GroupKind::Lattice) {
    os << '(';
    for (int i = 0; i < rank_; ++i) os << (i ? "," : "") << g.data()[i];
    os << ')';
  } else {
    if (g.data().empty()) return "e";
    for (std::size_t i = 0; i < g.data().size(); ++i) {
      long long l = g.data()[i];
      if (i) os << ' ';
      os << char('a' + (int)std::llabs(l) - 1);
      if (l < 0) os << '\'';
    }
  }
  return os.str();
}

GroupElement GroupCtx::parse(const std::string& text) const {
  std::string t = text;
  // strip outer whitespace
  auto issp = [](char c) { return c == ' ' || c == '\t'; };
  while (!t.empty() && issp(t.front())) t.erase(t.begin());
  while (!t.empty() && issp(t.back())) t.pop_back();
  require(!t.empty(), Errc::MalformedElement, "empty group element literal");

  if (kind_ == GroupKind::Free) {
    if (t == "e" || t == "1") return identity();
    std::vector<int> letters;
    std::istringstream is(t);
    std::string tok;
    while (is >> tok) {
      bool invd = false;
      if (tok.size() >= 2 && tok.back() == '\'') {
        invd = true;
        tok.pop_back();
      }
      require(tok.size() == 1 && tok[0] >= 'a' && tok[0] < 'a' + rank_,
              Errc::MalformedElement, "bad free-group letter '" + tok + "'");
      int l = tok[0] - 'a' + 1;
      letters.push_back(invd ? -l : l);
    }
    return GroupElement::word(letters);
  }

  if (!t.empty() && t.front() == '(') {
    require(t.back() == ')', Errc::MalformedElement, "unbalanced parens in '" + text + "'");
    t = t.substr(1, t.size() - 2);
  }
  std::vector<long long> coords;
  std::string cur;
  for (char c : t) {
    if (c == ',') {
      coords.push_back(0);
      try {
        coords.back() = std::stoll(cur);
      } catch (...) {
        fail(Errc::MalformedElement, "bad coordinate '" + cur + "'");
      }
      cur.clear();
    } else if (!issp(c)) {
      cur += c;
    }
  }
  require(!cur.empty(), Errc::MalformedElement, "bad element literal '" + text + "'");
  try {
    coords.push_back(std::stoll(cur));
  } catch (...) {
    fail(Errc::MalformedElement, "bad coordinate '" + cur + "'");
  }
  require((int)coords.size() == rank_, Errc::MalformedElement,
          "expected " + std::to_string(rank_) + " coordinates in '" + text + "'");
  return GroupElement::lattice(coords);
}

std::string GroupCtx::describe() const {
  switch (kind_) {
    case GroupKind::Integers: return "Z";
    case GroupKind::Lattice: return "Z^" + std::to_string(rank_);
    case GroupKind::Free: return "F_" + std::to_string(rank_);
  }
  return "?";
}

// ---- subgroups ---------------------------------------------------------------

namespace {

long long ext_gcd(long long a, long long b, long long& x, long long& y) {
  if (b == 0) {
    x = a >= 0 ? 1 : -1;
    y = 0;
    return std::llabs(a);
  }
  long long x1, y1;
  long long g = ext_gcd(b, a % b, x1, y1);
  x = y1;
  y = x1 - (a / b) * y1;
  return g;
}

struct UnionFind {
  std::vector<int> p;
  explicit UnionFind(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a) { return p[a] == a ? a : p[a] = find(p[a]); }
  void unite(int a, int b) { p[find(a)] = find(b); }
};

}  // namespace

Subgroup::Subgroup(const GroupCtx& ctx, const std::vector<GroupElement>& gens)
    : ctx_(ctx) {
  if (ctx.kind() != GroupKind::Free) {
    int d = ctx.rank();
    basis_.assign(d, {});
    auto insert = [&](std::vector<long long> v) {
      for (;;) {
        int lead = -1;
        for (int i = 0; i < d; ++i)
          if (v[i] != 0) {
            lead = i;
            break;
          }
        if (lead < 0) return;
        if (basis_[lead].empty()) {
          if (v[lead] < 0)
            for (auto& c : v) c = -c;
          basis_[lead] = v;
          return;
        }
        auto& p = basis_[lead];
        long long a, b;
        long long g = ext_gcd(p[lead], v[lead], a, b);
        std::vector<long long> np(d), nv(d);
        for (int i = 0; i < d; ++i) {
          np[i] = a * p[i] + b * v[i];
          nv[i] = (p[lead] / g) * v[i] - (v[lead] / g) * p[i];
        }
        basis_[lead] = np;
        v = nv;
      }
    };
    for (const auto& g : gens) {
      ctx.validate(g);
      insert(std::vector<long long>(g.data().begin(), g.data().end()));
    }
    return;
  }

  // Free group: Stallings folding.  Add one loop at the base per generator,
  // then merge targets of equally labelled edges until the automaton is
  // deterministic.
  struct E {
    int u, v;
    int l;
  };
  std::vector<E> edges;
  int nv = 1;  // vertex 0 = base
  for (const auto& g : gens) {
    ctx.validate(g);
    const auto& w = g.data();
    if (w.empty()) continue;
    int u = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      int v = (i + 1 == w.size()) ? 0 : nv++;
      edges.push_back({u, v, (int)w[i]});
      u = v;
    }
  }
  UnionFind uf(nv);
  for (bool changed = true; changed;) {
    changed = false;
    std::map<std::pair<int, int>, int> first;  // (vertex, letter) -> target
    for (const auto& e : edges) {
      // treat each edge in both directions
      for (int dir = 0; dir < 2; ++dir) {
        int u = uf.find(dir ? e.v : e.u);
        int v = uf.find(dir ? e.u : e.v);
        int l = dir ? -e.l : e.l;
        auto key = std::make_pair(u, l);
        auto it = first.find(key);
        if (it == first.end()) {
          first[key] = v;
        } else if (uf.find(it->second) != v) {
          uf.unite(it->second, v);
          changed = true;
        }
      }
    }
    if (!changed) {
      adj_.assign(nv, {});
      for (const auto& e : edges) {
        adj_[uf.find(e.u)][e.l] = uf.find(e.v);
        adj_[uf.find(e.v)][-e.l] = uf.find(e.u);
      }
      // relocate base
      base_ = uf.find(0);
    }
  }
}

bool Subgroup::contains(const GroupElement& g) const {
  ctx_.validate(g);
  if (ctx_.kind() != GroupKind::Free) {
    std::vector<long long> v(g.data().begin(), g.data().end());
    int d = ctx_.rank();
    for (int i = 0; i < d; ++i) {
      if (v[i] == 0) continue;
      if (basis_[i].empty()) return false;
      if (v[i] % basis_[i][i] != 0) return false;
      long long q = v[i] / basis_[i][i];
      for (int j = 0; j < d; ++j) v[j] -= q * basis_[i][j];
    }
    return std::all_of(v.begin(), v.end(), [](long long c) { return c == 0; });
  }
  int u = base_;
  for (long long l : g.data()) {
    auto it = adj_[u].find((int)l);
    if (it == adj_[u].end()) return false;
    u = it->second;
  }
  return u == base_;
}

bool Subgroup::is_whole_group() const {
  for (const auto& g : ctx_.generators())
    if (!contains(g)) return false;
  return true;
}

std::optional<long long> Subgroup::index() const {
  if (ctx_.kind() != GroupKind::Free) {
    int d = ctx_.rank();
    long long idx = 1;
    for (int i = 0; i < d; ++i) {
      if (basis_[i].empty()) return std::nullopt;  // not full rank
      idx *= std::llabs(basis_[i][i]);
    }
    return idx;
  }
  // Finite index iff the folded automaton, restricted to the states reachable
  // from the base, has a transition for every signed letter at every state.
  int k = ctx_.rank();
  std::vector<int> live{base_};
  std::vector<char> seen(adj_.size(), 0);
  seen[base_] = 1;
  for (size_t i = 0; i < live.size(); ++i) {
    int u = live[i];
    for (int l = 1; l <= k; ++l) {
      for (int sl : {l, -l}) {
        auto it = adj_[u].find(sl);
        if (it == adj_[u].end()) return std::nullopt;  // missing edge: infinite
        if (!seen[it->second]) {
          seen[it->second] = 1;
          live.push_back(it->second);
        }
      }
    }
  }
  return (long long)live.size();
}

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::MalformedElement: return "malformed-element";
    case Errc::InsufficientWindow: return "insufficient-window";
    case Errc::UnsupportedGroup: return "unsupported-group";
    case Errc::UnsupportedPresentation: return "unsupported-presentation";
    case Errc::NoMetric: return "no-metric";
    case Errc::NotAPermutation: return "NOT_A_PERMUTATION";
    case Errc::NotACover: return "NOT_A_COVER";
    case Errc::PartitionRequired: return "partition-required";
    case Errc::RefinementError: return "refinement-error";
    case Errc::AmbiguousReconstruction: return "ambiguous-reconstruction";
    case Errc::PrecisionError: return "precision-error";
    case Errc::NotApplicable: return "not-applicable";
    case Errc::UnresolvedRef: return "UNRESOLVED_REF";
    case Errc::ParseError: return "parse-error";
    case Errc::Inconsistency: return "inconsistency";
    case Errc::Internal: return "internal-error";
  }
  return "error";
}

}  // namespace sftlab
