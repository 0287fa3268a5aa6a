#include "sftlab/zgraph.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <set>

#include "sftlab/patterns.hpp"

namespace sftlab {

void ZShiftGraph::trim() {
  int n = (int)out_.size();
  std::vector<char> alive(n, 1);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<int> indeg(n, 0), outdeg(n, 0);
    for (int v = 0; v < n; ++v) {
      if (!alive[v]) continue;
      for (auto [a, t] : out_[v])
        if (alive[t]) {
          ++outdeg[v];
          ++indeg[t];
        }
    }
    for (int v = 0; v < n; ++v)
      if (alive[v] && (indeg[v] == 0 || outdeg[v] == 0)) {
        alive[v] = 0;
        changed = true;
      }
  }
  std::vector<int> remap(n, -1);
  int m = 0;
  for (int v = 0; v < n; ++v)
    if (alive[v]) remap[v] = m++;
  std::vector<std::vector<std::pair<int, int>>> nout(m);
  std::vector<Word> nwords(m);
  for (int v = 0; v < n; ++v) {
    if (!alive[v]) continue;
    for (auto [a, t] : out_[v])
      if (alive[t]) nout[remap[v]].push_back({a, remap[t]});
    if (!vertex_word_.empty()) nwords[remap[v]] = vertex_word_[v];
  }
  out_ = std::move(nout);
  vertex_word_ = vertex_word_.empty() ? vertex_word_ : std::move(nwords);
}

ZShiftGraph ZShiftGraph::from_sofic(int alphabet_size, const SoficGraph& g) {
  ZShiftGraph z;
  z.asz_ = alphabet_size;
  z.out_.resize(g.vertices);
  for (const auto& e : g.edges) {
    require(e.from >= 0 && e.from < g.vertices && e.to >= 0 && e.to < g.vertices,
            Errc::ParseError, "sofic edge endpoint out of range");
    require(e.label >= 0 && e.label < alphabet_size, Errc::ParseError,
            "sofic edge label out of range");
    z.out_[e.from].push_back({e.label, e.to});
  }
  z.trim();
  return z;
}

ZShiftGraph ZShiftGraph::from_allowed_words(int alphabet_size, int m,
                                            const std::set<Word>& allowed) {
  require(m >= 2, Errc::Internal, "de Bruijn construction needs m >= 2");
  ZShiftGraph z;
  z.asz_ = alphabet_size;
  std::map<Word, int> block_id;
  auto id_of = [&](const Word& b) {
    auto it = block_id.find(b);
    if (it != block_id.end()) return it->second;
    int id = (int)block_id.size();
    block_id[b] = id;
    z.out_.emplace_back();
    z.vertex_word_.push_back(b);
    return id;
  };
  for (const auto& w : allowed) {
    require((int)w.size() == m, Errc::Internal, "allowed word of wrong length");
    Word pre(w.begin(), w.end() - 1), suf(w.begin() + 1, w.end());
    int u = id_of(pre), v = id_of(suf);
    z.out_[u].push_back({w.back(), v});
  }
  z.trim();
  return z;
}

std::set<Word> ZShiftGraph::words(int len) const {
  std::set<Word> res;
  if (empty()) return res;
  std::map<Word, std::set<int>> cur;
  std::set<int> all;
  for (int v = 0; v < vertex_count(); ++v) all.insert(v);
  cur[{}] = all;
  for (int step = 0; step < len; ++step) {
    std::map<Word, std::set<int>> next;
    for (const auto& [w, vs] : cur)
      for (int v : vs)
        for (auto [a, t] : out_[v]) {
          Word w2 = w;
          w2.push_back(a);
          next[w2].insert(t);
        }
    cur = std::move(next);
  }
  for (const auto& [w, vs] : cur) res.insert(w);
  return res;
}

bool ZShiftGraph::accepts(const Word& w) const {
  if (empty()) return false;
  std::set<int> vs;
  for (int v = 0; v < vertex_count(); ++v) vs.insert(v);
  for (int a : w) {
    std::set<int> next;
    for (int v : vs)
      for (auto [l, t] : out_[v])
        if (l == a) next.insert(t);
    if (next.empty()) return false;
    vs = std::move(next);
  }
  return true;
}

ZShiftGraph::SftResult ZShiftGraph::decide_sft() const {
  SftResult res;
  if (empty()) {
    res.is_sft = true;
    res.m = 0;
    return res;
  }
  int n = vertex_count();
  require(n <= 64, Errc::Internal, "transfer graph too large for the SFT decision");
  const std::uint64_t full = n == 64 ? ~0ull : (1ull << n) - 1;

  // one-letter step matrices, rows indexed by source vertex
  std::vector<std::vector<std::uint64_t>> step(asz_, std::vector<std::uint64_t>(n, 0));
  for (int v = 0; v < n; ++v)
    for (auto [a, t] : out_[v]) step[a][v] |= 1ull << t;

  // all reachable end-sets E(u) with a witness word each
  std::map<std::uint64_t, Word> endsets;
  {
    std::vector<std::uint64_t> queue{full};
    endsets[full] = {};
    while (!queue.empty()) {
      std::uint64_t e = queue.back();
      queue.pop_back();
      for (int a = 0; a < asz_; ++a) {
        std::uint64_t e2 = 0;
        for (int v = 0; v < n; ++v)
          if (e >> v & 1) e2 |= step[a][v];
        if (e2 && !endsets.count(e2)) {
          Word w = endsets[e];
          w.push_back(a);
          endsets[e2] = w;
          queue.push_back(e2);
        }
      }
    }
  }
  // all reachable start-sets S(w), letters prepended
  std::map<std::uint64_t, Word> startsets;
  {
    std::vector<std::uint64_t> queue{full};
    startsets[full] = {};
    while (!queue.empty()) {
      std::uint64_t s = queue.back();
      queue.pop_back();
      for (int a = 0; a < asz_; ++a) {
        std::uint64_t s2 = 0;
        for (int v = 0; v < n; ++v)
          if (step[a][v] & s) s2 |= 1ull << v;
        if (s2 && !startsets.count(s2)) {
          Word w = startsets[s];
          w.insert(w.begin(), a);
          startsets[s2] = w;
          queue.push_back(s2);
        }
      }
    }
  }

  using Rel = std::vector<std::uint64_t>;  // row per source vertex
  auto rel_key = [n](const Rel& r) {
    std::string k;
    k.reserve(n * 8);
    for (auto row : r)
      for (int b = 0; b < 8; ++b) k += char(row >> (8 * b) & 0xff);
    return k;
  };
  std::map<std::string, Word> rels;  // relations of the current length m
  for (int a = 0; a < asz_; ++a) {
    bool nonzero = false;
    for (auto r : step[a]) nonzero |= r != 0;
    if (nonzero) rels[rel_key(step[a])] = {a};
  }
  auto unkey = [n](const std::string& k) {
    Rel r(n, 0);
    for (int v = 0; v < n; ++v)
      for (int b = 0; b < 8; ++b)
        r[v] |= (std::uint64_t)(unsigned char)k[v * 8 + b] << (8 * b);
    return r;
  };

  std::set<std::string> seen_families;
  for (int m = 1;; ++m) {
    // canonical key of the whole family, for cycle detection
    std::string fam;
    for (const auto& [k, w] : rels) fam += k;
    if (!seen_families.insert(fam).second) {
      res.is_sft = false;
      res.tested_up_to = m - 1;
      return res;
    }

    bool ok = true;
    SftResult::Witness bad;
    for (const auto& [k, v] : rels) {
      Rel T = unkey(k);
      for (const auto& [E, u] : endsets) {
        std::uint64_t D = 0;
        for (int p = 0; p < n; ++p)
          if (E >> p & 1) D |= T[p];
        if (!D) continue;  // uv not in L
        for (const auto& [S, w] : startsets) {
          bool vw = false;
          for (int p = 0; p < n && !vw; ++p) vw = (T[p] & S) != 0;
          if (vw && !(D & S)) {
            ok = false;
            bad = {u, v, w};
            break;
          }
        }
        if (!ok) break;
      }
      if (!ok) break;
    }
    if (ok) {
      res.is_sft = true;
      res.m = m;
      res.tested_up_to = m;
      return res;
    }
    res.witnesses.push_back(bad);

    std::map<std::string, Word> next;
    for (const auto& [k, v] : rels) {
      Rel T = unkey(k);
      for (int a = 0; a < asz_; ++a) {
        Rel T2(n, 0);
        bool nonzero = false;
        for (int p = 0; p < n; ++p) {
          std::uint64_t row = 0;
          std::uint64_t src = T[p];
          for (int q = 0; q < n; ++q)
            if (src >> q & 1) row |= step[a][q];
          T2[p] = row;
          nonzero |= row != 0;
        }
        if (!nonzero) continue;
        std::string k2 = rel_key(T2);
        if (!next.count(k2)) {
          Word v2 = v;
          v2.push_back(a);
          next[k2] = v2;
        }
      }
    }
    rels = std::move(next);
  }
}

std::set<Word> ZShiftGraph::minimal_forbidden(int max_len) const {
  std::set<Word> res;
  if (empty()) {
    for (int a = 0; a < asz_; ++a) res.insert({a});
    return res;
  }
  std::set<Word> prev = words(0);
  for (int len = 1; len <= max_len; ++len) {
    std::set<Word> cur = words(len);
    for (const auto& u : prev)
      for (int a = 0; a < asz_; ++a) {
        Word w = u;
        w.push_back(a);
        if (cur.count(w)) continue;
        Word suf(w.begin() + 1, w.end());
        if (prev.count(suf)) res.insert(w);
      }
    prev = std::move(cur);
  }
  return res;
}

std::vector<int> ZShiftGraph::scc_ids(int* count) const {
  int n = vertex_count();
  // Kosaraju
  std::vector<std::vector<int>> fwd(n), bwd(n);
  for (int v = 0; v < n; ++v)
    for (auto [a, t] : out_[v]) {
      fwd[v].push_back(t);
      bwd[t].push_back(v);
    }
  std::vector<int> order;
  std::vector<char> vis(n, 0);
  for (int s = 0; s < n; ++s) {
    if (vis[s]) continue;
    // iterative post-order
    std::vector<std::pair<int, std::size_t>> st{{s, 0}};
    vis[s] = 1;
    while (!st.empty()) {
      auto& [v, i] = st.back();
      if (i < fwd[v].size()) {
        int t = fwd[v][i++];
        if (!vis[t]) {
          vis[t] = 1;
          st.push_back({t, 0});
        }
      } else {
        order.push_back(v);
        st.pop_back();
      }
    }
  }
  std::vector<int> comp(n, -1);
  int c = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] != -1) continue;
    std::vector<int> st{*it};
    comp[*it] = c;
    while (!st.empty()) {
      int v = st.back();
      st.pop_back();
      for (int t : bwd[v])
        if (comp[t] == -1) {
          comp[t] = c;
          st.push_back(t);
        }
    }
    ++c;
  }
  if (count) *count = c;
  return comp;
}

bool ZShiftGraph::irreducible() const {
  if (empty()) return false;
  int c = 0;
  scc_ids(&c);
  return c == 1;
}

long long ZShiftGraph::period() const {
  if (!irreducible()) return 0;
  int n = vertex_count();
  std::vector<long long> level(n, -1);
  std::vector<int> queue{0};
  level[0] = 0;
  long long g = 0;
  for (std::size_t i = 0; i < queue.size(); ++i) {
    int v = queue[i];
    for (auto [a, t] : out_[v]) {
      if (level[t] == -1) {
        level[t] = level[v] + 1;
        queue.push_back(t);
      } else {
        g = std::gcd(g, level[v] + 1 - level[t]);
      }
    }
  }
  return g == 0 ? 1 : std::llabs(g);
}

long long ZShiftGraph::primitive_index() const {
  if (!irreducible() || period() != 1) return -1;
  int n = vertex_count();
  require(n <= 64, Errc::Internal, "graph too large for primitivity index");
  std::vector<std::uint64_t> cur(n, 0), adj(n, 0);
  const std::uint64_t full = n == 64 ? ~0ull : (1ull << n) - 1;
  for (int v = 0; v < n; ++v)
    for (auto [a, t] : out_[v]) adj[v] |= 1ull << t;
  cur = adj;
  long long bound = (long long)(n - 1) * (n - 1) + 1;  // Wielandt
  for (long long t = 1; t <= bound; ++t) {
    bool allfull = true;
    for (int v = 0; v < n; ++v) allfull &= cur[v] == full;
    if (allfull) return t;
    std::vector<std::uint64_t> next(n, 0);
    for (int v = 0; v < n; ++v) {
      std::uint64_t row = 0;
      for (int q = 0; q < n; ++q)
        if (cur[v] >> q & 1) row |= adj[q];
      next[v] = row;
    }
    cur = std::move(next);
  }
  return -1;
}

ZShiftGraph ZShiftGraph::product(const ZShiftGraph& a, const ZShiftGraph& b) {
  require(a.asz_ == b.asz_, Errc::Internal, "product needs a common alphabet");
  ZShiftGraph z;
  z.asz_ = a.asz_;
  int nb = b.vertex_count();
  z.out_.resize((std::size_t)a.vertex_count() * nb);
  for (int u = 0; u < a.vertex_count(); ++u)
    for (int v = 0; v < nb; ++v)
      for (auto [l1, t1] : a.out_[u])
        for (auto [l2, t2] : b.out_[v])
          if (l1 == l2) z.out_[u * nb + v].push_back({l1, t1 * nb + t2});
  z.trim();
  return z;
}

bool ZShiftGraph::connects(int u, int v, long long len) const {
  int n = vertex_count();
  require(u >= 0 && u < n && v >= 0 && v < n, Errc::Internal, "vertex out of range");
  require(n <= 64, Errc::Internal, "graph too large for path queries");
  std::vector<std::uint64_t> adj(n, 0);
  for (int p = 0; p < n; ++p)
    for (auto [a, t] : out_[p]) adj[p] |= 1ull << t;
  // row vector of vertices reachable from u in exactly k steps
  std::uint64_t reach = 1ull << u;
  auto stepf = [&](std::uint64_t r) {
    std::uint64_t nr = 0;
    for (int p = 0; p < n; ++p)
      if (r >> p & 1) nr |= adj[p];
    return nr;
  };
  // len may be large; use cycle detection on the reach-set sequence
  std::map<std::uint64_t, long long> seen;
  long long k = 0;
  while (k < len) {
    auto it = seen.find(reach);
    if (it == seen.end()) {
      seen[reach] = k;
      reach = stepf(reach);
      ++k;
    } else {
      long long mu = it->second, lambda = k - mu;
      long long rem = mu + (len - mu) % lambda;
      // recompute from scratch up to rem
      reach = 1ull << u;
      for (long long i = 0; i < rem; ++i) reach = stepf(reach);
      return (reach >> v & 1) != 0;
    }
  }
  return (reach >> v & 1) != 0;
}

Word ZShiftGraph::path_label(int u, int v, long long len) const {
  require(len >= 0 && len <= 1000000, Errc::Internal, "path length out of range");
  require(connects(u, v, len), Errc::Internal, "no path of requested length");
  // backward DP: mask of vertices that reach v in exactly t steps
  int n = vertex_count();
  std::vector<std::uint64_t> reach(len + 1, 0);
  reach[0] = 1ull << v;
  for (long long t = 1; t <= len; ++t) {
    std::uint64_t m = 0;
    for (int p = 0; p < n; ++p)
      for (auto [a, q] : out_[p])
        if (reach[t - 1] >> q & 1) m |= 1ull << p;
    reach[t] = m;
  }
  Word w;
  int cur = u;
  for (long long t = len; t >= 1; --t) {
    bool advanced = false;
    for (auto [a, q] : out_[cur]) {
      if (reach[t - 1] >> q & 1) {
        w.push_back(a);
        cur = q;
        advanced = true;
        break;
      }
    }
    require(advanced, Errc::Internal, "path reconstruction failed");
  }
  return w;
}

ZShiftGraph zshift_recode(const ZShiftGraph& g, const std::vector<int>& letter_map,
                          int out_alphabet) {
  require((int)letter_map.size() == g.alphabet_size(), Errc::Internal,
          "recode map must cover the whole alphabet");
  for (int m : letter_map)
    require(m >= 0 && m < out_alphabet, Errc::Internal, "recode map image out of range");
  SoficGraph sg;
  sg.vertices = g.vertex_count();
  const auto& out = g.out();
  for (int v = 0; v < (int)out.size(); ++v)
    for (auto [a, q] : out[v]) sg.edges.push_back({v, q, letter_map[a]});
  return ZShiftGraph::from_sofic(out_alphabet, sg);
}

std::optional<Word> zshift_inclusion_gap(const ZShiftGraph& a, const ZShiftGraph& b) {
  if (a.empty()) return std::nullopt;
  if (b.empty()) {
    for (const auto& lst : a.out())
      if (!lst.empty()) return Word{lst.front().first};
    return std::nullopt;  // trimmed nonempty graphs always have an edge
  }
  // For every bi-infinite label sequence of a, some path of b must carry it.
  // Track, for each a-vertex reachable by some finite a-path, the set of
  // b-vertices reachable by a b-path with the same label word.  Since both
  // graphs are trimmed (every vertex lies on bi-infinite paths), the word
  // languages coincide with the factor languages, and L(a) is included in
  // L(b) exactly when no reachable pair (a-vertex, empty b-set) exists.
  // Breadth-first order makes the first gap word found a shortest one.
  int nb = b.vertex_count();
  int mwords = (nb + 63) / 64;
  using Mask = std::vector<std::uint64_t>;
  Mask full(mwords, 0);
  for (int u = 0; u < nb; ++u) full[u >> 6] |= 1ull << (u & 63);
  struct Node {
    int v;
    Mask mask;
    int parent, letter;
  };
  std::vector<Node> nodes;
  std::vector<std::set<Mask>> seen(a.vertex_count());
  std::size_t head = 0;
  for (int v = 0; v < a.vertex_count(); ++v) {
    seen[v].insert(full);
    nodes.push_back({v, full, -1, -1});
  }
  const auto& aout = a.out();
  const auto& bout = b.out();
  std::size_t budget = 1u << 22;
  while (head < nodes.size()) {
    std::size_t id = head++;
    int v = nodes[id].v;
    Mask mask = nodes[id].mask;  // copy: nodes may reallocate below
    for (auto [lab, q] : aout[v]) {
      require(budget-- > 0, Errc::Internal, "inclusion check exceeded state budget");
      Mask next(mwords, 0);
      bool any = false;
      for (int u = 0; u < nb; ++u) {
        if (!(mask[u >> 6] >> (u & 63) & 1)) continue;
        for (auto [bl, bq] : bout[u])
          if (bl == lab) {
            next[bq >> 6] |= 1ull << (bq & 63);
            any = true;
          }
      }
      if (!any) {  // word realizable in a but not in b
        Word w{lab};
        for (std::size_t cur = id; nodes[cur].parent >= 0;
             cur = (std::size_t)nodes[cur].parent)
          w.push_back(nodes[cur].letter);
        std::reverse(w.begin(), w.end());
        return w;
      }
      if (seen[q].insert(next).second) {
        nodes.push_back({q, std::move(next), (int)id, lab});
      }
    }
  }
  return std::nullopt;
}

bool zshift_includes(const ZShiftGraph& a, const ZShiftGraph& b) {
  return !zshift_inclusion_gap(a, b).has_value();
}

bool zshift_language_equal(const ZShiftGraph& a, const ZShiftGraph& b) {
  return zshift_includes(a, b) && zshift_includes(b, a);
}

bool zshift_accepts_periodic(const ZShiftGraph& g, const Word& period) {
  require(!period.empty(), Errc::Internal, "periodic word must be nonempty");
  for (int a : period)
    if (a < 0 || a >= g.alphabet_size()) return false;
  if (g.empty()) return false;
  const int n = g.vertex_count();
  // arcs u -> v whenever some path u -> v reads the period once
  std::vector<std::vector<int>> adj(n);
  for (int u = 0; u < n; ++u) {
    std::set<int> cur{u};
    for (int a : period) {
      std::set<int> nxt;
      for (int v : cur)
        for (auto [lab, t] : g.out()[v])
          if (lab == a) nxt.insert(t);
      cur = std::move(nxt);
      if (cur.empty()) break;
    }
    adj[u].assign(cur.begin(), cur.end());
  }
  /* A cycle of period-arcs unrolls to a bi-infinite presentation path, and a
   * bi-infinite presentation path visits period boundaries infinitely often,
   * so some vertex repeats there and closes a cycle.  Iterative DFS. */
  std::vector<int> color(n, 0);  // 0 new, 1 on stack, 2 done
  for (int s = 0; s < n; ++s) {
    if (color[s]) continue;
    std::vector<std::pair<int, std::size_t>> st{{s, 0}};
    color[s] = 1;
    while (!st.empty()) {
      int u = st.back().first;
      if (st.back().second == adj[u].size()) {
        color[u] = 2;
        st.pop_back();
        continue;
      }
      int v = adj[u][st.back().second++];
      if (color[v] == 1) return true;
      if (color[v] == 0) {
        color[v] = 1;
        st.push_back({v, 0});
      }
    }
  }
  return false;
}

}  // namespace sftlab
