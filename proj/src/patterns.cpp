#include "sftlab/patterns.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sftlab/zgraph.hpp"

namespace sftlab {

Pattern Pattern::on(const std::vector<GroupElement>& window,
                    const std::vector<int>& symbols) {
  require(window.size() == symbols.size(), Errc::Inconsistency,
          "window/symbol count mismatch");
  Pattern p;
  for (std::size_t i = 0; i < window.size(); ++i) {
    auto [it, fresh] = p.cells.insert({window[i], symbols[i]});
    require(fresh || it->second == symbols[i], Errc::Inconsistency,
            "conflicting symbols at one site");
  }
  return p;
}

int Pattern::at(const GroupElement& g) const {
  auto it = cells.find(g);
  require(it != cells.end(), Errc::InsufficientWindow, "site not in pattern window");
  return it->second;
}

std::vector<GroupElement> Pattern::window() const {
  std::vector<GroupElement> w;
  for (const auto& [g, s] : cells) w.push_back(g);
  return w;
}

Pattern Pattern::restrict_to(const std::vector<GroupElement>& sub) const {
  Pattern p;
  for (const auto& g : sub) p.cells[g] = at(g);
  return p;
}

Pattern shift_apply(const Pattern& x, const GroupElement& g, const GroupCtx& ctx) {
  ctx.validate(g);
  Pattern r;
  GroupElement gi = ctx.inv(g);
  for (const auto& [a, sym] : x.cells) r.cells[ctx.mul(a, gi)] = sym;
  return r;
}

namespace {

/* Locally admissible A-patterns: assignments on a padding of A by every
 * forbidden-window translate meeting A, filtered by translate checks, then
 * restricted to A.  Exact only when every locally admissible pattern happens
 * to extend; callers must treat the result as an upper bound. */
std::set<Pattern> local_language(const GroupCtx& ctx, int asz,
                                 const std::vector<GroupElement>& W,
                                 const std::vector<Pattern>& forbidden,
                                 const std::vector<GroupElement>& A) {
  // sorted window = the key order of forbidden-pattern cell maps
  std::vector<GroupElement> sw(W.begin(), W.end());
  std::sort(sw.begin(), sw.end());
  sw.erase(std::unique(sw.begin(), sw.end()), sw.end());

  std::set<GroupElement> anchors;
  for (const auto& a : A)
    for (const auto& w : sw) anchors.insert(ctx.mul(a, ctx.inv(w)));
  std::set<GroupElement> pad(A.begin(), A.end());
  for (const auto& t : anchors)
    for (const auto& w : sw) pad.insert(ctx.mul(t, w));

  std::vector<GroupElement> order(A.begin(), A.end());
  std::sort(order.begin(), order.end());
  order.erase(std::unique(order.begin(), order.end()), order.end());
  std::size_t asize = order.size();
  for (const auto& g : pad)
    if (std::find(order.begin(), order.end(), g) == order.end()) order.push_back(g);

  require(std::pow((double)asz, (double)asize) <= 1 << 20, Errc::Internal,
          "query window too large for local admissibility");

  std::map<GroupElement, std::size_t> pos;
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
  // anchor -> cell positions (in W order); checked when its last cell fills
  struct Anchor {
    std::vector<std::size_t> cells;
    std::size_t last = 0;
  };
  std::vector<Anchor> ancs;
  for (const auto& t : anchors) {
    Anchor an;
    for (const auto& w : sw) {
      std::size_t p = pos.at(ctx.mul(t, w));
      an.cells.push_back(p);
      an.last = std::max(an.last, p);
    }
    ancs.push_back(std::move(an));
  }

  std::vector<int> val(order.size(), -1);
  std::set<Pattern> out;
  auto ok_at = [&](std::size_t i) {
    for (const auto& an : ancs) {
      if (an.last != i) continue;
      for (const auto& f : forbidden) {
        bool match = true;
        std::size_t k = 0;
        for (const auto& [w, sym] : f.cells) {
          (void)w;
          if (val[an.cells[k++]] != sym) {
            match = false;
            break;
          }
        }
        if (match) return false;
      }
    }
    return true;
  };
  std::function<bool(std::size_t)> go = [&](std::size_t i) -> bool {
    if (i == order.size()) {
      Pattern p;
      for (std::size_t k = 0; k < asize; ++k) p.cells[order[k]] = val[k];
      out.insert(p);
      return true;
    }
    bool any = false;
    for (int s = 0; s < asz; ++s) {
      val[i] = s;
      if (ok_at(i)) {
        bool found = go(i + 1);
        any = any || found;
        // past the A prefix we only need existence of one completion
        if (found && i >= asize) {
          val[i] = -1;
          return true;
        }
      }
    }
    val[i] = -1;
    return any;
  };
  go(0);
  return out;
}

bool z_like(const GroupCtx& ctx) {
  return ctx.kind() == GroupKind::Integers ||
         (ctx.kind() == GroupKind::Lattice && ctx.rank() == 1);
}

long long z_coord(const GroupElement& g) { return g.data()[0]; }

}  // namespace

SubshiftPresentation SubshiftPresentation::sft(const GroupCtx& ctx,
                                               std::vector<std::string> alphabet,
                                               std::vector<GroupElement> window,
                                               std::vector<Pattern> forbidden) {
  require(!alphabet.empty(), Errc::Inconsistency, "empty alphabet");
  {
    std::set<std::string> names(alphabet.begin(), alphabet.end());
    require(names.size() == alphabet.size(), Errc::Inconsistency,
            "duplicate alphabet symbol");
  }
  require(!window.empty(), Errc::Inconsistency, "empty window");
  for (const auto& g : window) ctx.validate(g);
  {
    std::vector<GroupElement> dedup;
    for (const auto& g : window)
      if (std::find(dedup.begin(), dedup.end(), g) == dedup.end()) dedup.push_back(g);
    window = std::move(dedup);
  }
  std::set<GroupElement> wset(window.begin(), window.end());
  for (const auto& f : forbidden) {
    require(f.cells.size() == wset.size(), Errc::Inconsistency,
            "forbidden pattern must live exactly on the window");
    for (const auto& [g, sym] : f.cells) {
      require(wset.count(g), Errc::Inconsistency,
              "forbidden pattern site outside the window");
      require(sym >= 0 && sym < (int)alphabet.size(), Errc::Inconsistency,
              "forbidden pattern symbol out of range");
    }
  }
  {
    std::set<Pattern> dedup(forbidden.begin(), forbidden.end());
    forbidden.assign(dedup.begin(), dedup.end());
  }

  SubshiftPresentation X(ctx);
  X.mode_ = Mode::SFT;
  X.alphabet_ = std::move(alphabet);
  X.window_ = std::move(window);
  X.forbidden_ = std::move(forbidden);
  int asz = (int)X.alphabet_.size();

  if (z_like(ctx)) {
    long long lo = z_coord(X.window_[0]), hi = lo;
    for (const auto& g : X.window_) {
      lo = std::min(lo, z_coord(g));
      hi = std::max(hi, z_coord(g));
    }
    int m = (int)(hi - lo + 1);
    int mm = std::max(m, 2);
    require(std::pow((double)asz, (double)mm) <= 1 << 22, Errc::Internal,
            "window span too large for the transfer graph");
    std::set<Word> allowed;
    std::vector<int> word(mm, 0);
    for (;;) {
      bool bad = false;
      for (const auto& f : X.forbidden_) {
        bool match = true;
        for (const auto& [g, sym] : f.cells)
          if (word[z_coord(g) - lo] != sym) {
            match = false;
            break;
          }
        if (match) {
          bad = true;
          break;
        }
      }
      if (!bad) allowed.insert(word);
      int i = mm - 1;
      while (i >= 0 && word[i] == asz - 1) word[i--] = 0;
      if (i < 0) break;
      ++word[i];
    }
    X.zgraph_ = std::make_shared<ZShiftGraph>(
        ZShiftGraph::from_allowed_words(asz, mm, allowed));
    X.nonempty_ = !X.zgraph_->empty();
  } else {
    auto slice = local_language(ctx, asz, X.window_, X.forbidden_, X.window_);
    X.nonempty_ = !slice.empty();
    X.window_level_only_ = true;
  }
  return X;
}

SubshiftPresentation SubshiftPresentation::sofic(std::vector<std::string> alphabet,
                                                 const SoficGraph& graph) {
  require(!alphabet.empty(), Errc::Inconsistency, "empty alphabet");
  SubshiftPresentation X(GroupCtx::integers());
  X.mode_ = Mode::Sofic;
  X.alphabet_ = std::move(alphabet);
  X.zgraph_ = std::make_shared<ZShiftGraph>(
      ZShiftGraph::from_sofic((int)X.alphabet_.size(), graph));
  // store the trimmed graph
  X.graph_.vertices = X.zgraph_->vertex_count();
  X.graph_.edges.clear();
  const auto& out = X.zgraph_->out();
  for (int v = 0; v < (int)out.size(); ++v)
    for (auto [a, t] : out[v]) X.graph_.edges.push_back({v, t, a});
  X.nonempty_ = !X.zgraph_->empty();
  return X;
}

int SubshiftPresentation::symbol(const std::string& name) const {
  for (std::size_t i = 0; i < alphabet_.size(); ++i)
    if (alphabet_[i] == name) return (int)i;
  fail(Errc::UnresolvedRef, "unknown symbol '" + name + "'");
}

LanguageSlice language(const SubshiftPresentation& X,
                       const std::vector<GroupElement>& A) {
  require(!A.empty(), Errc::Inconsistency, "empty query window");
  for (const auto& g : A) X.ctx().validate(g);
  LanguageSlice slice;
  slice.window = A;

  if (X.z_exact()) {
    slice.flag = Exactness::Exact;
    long long lo = z_coord(A[0]), hi = lo;
    for (const auto& g : A) {
      lo = std::min(lo, z_coord(g));
      hi = std::max(hi, z_coord(g));
    }
    int len = (int)(hi - lo + 1);
    for (const auto& w : X.zgraph()->words(len)) {
      Pattern p;
      for (const auto& g : A) p.cells[g] = w[z_coord(g) - lo];
      slice.patterns.insert(p);
    }
    return slice;
  }

  slice.flag = Exactness::LocallyAdmissibleUpperBound;
  slice.patterns = local_language(X.ctx(), (int)X.alphabet().size(), X.window(),
                                  X.forbidden(), A);
  return slice;
}

double DyadicDistance::value() const { return std::ldexp(1.0, -exponent); }

DyadicDistance shift_metric(const Pattern& x, const Pattern& y, const GroupCtx& ctx,
                            int min_precision) {
  std::vector<GroupElement> en;
  for (int n = 0;; ++n) {
    if (n >= (int)en.size()) en = ctx.enumerate(std::max<std::size_t>(16, en.size() * 2));
    const GroupElement& g = en[n];
    if (!x.has(g) || !y.has(g)) {
      require(min_precision < 0 || n > min_precision, Errc::InsufficientWindow,
              "patterns do not cover the requested metric precision");
      return {n, true};
    }
    if (x.at(g) != y.at(g)) return {n, false};
  }
}

SftDecision sofic_is_sft(const SubshiftPresentation& X) {
  require(X.z_exact(), Errc::UnsupportedGroup,
          "SFT decision requires a Z presentation");
  auto r = X.zgraph()->decide_sft();
  SftDecision d;
  d.is_sft = r.is_sft;
  d.tested_up_to = r.tested_up_to;
  if (r.is_sft) {
    d.window = r.m + 1;
    auto lang = X.zgraph()->words(d.window);
    std::vector<int> word(d.window, 0);
    int asz = (int)X.alphabet().size();
    for (;;) {
      if (!lang.count(word)) d.forbidden_words.insert(word);
      int i = d.window - 1;
      while (i >= 0 && word[i] == asz - 1) word[i--] = 0;
      if (i < 0) break;
      ++word[i];
    }
  } else {
    for (const auto& w : r.witnesses) d.witnesses.push_back({w.u, w.v, w.w});
  }
  return d;
}

std::set<std::vector<int>> minimal_forbidden_words(const SubshiftPresentation& X,
                                                   int max_len) {
  require(X.z_exact(), Errc::UnsupportedGroup,
          "forbidden-word enumeration requires a Z presentation");
  return X.zgraph()->minimal_forbidden(max_len);
}

}  // namespace sftlab
