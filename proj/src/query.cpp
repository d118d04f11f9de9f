#include "errortree/query.hpp"

#include <algorithm>
#include <array>
#include <unordered_map>
#include <unordered_set>

#include "errortree/distance.hpp"
#include "errortree/errors.hpp"

namespace errortree {

const char* metric_name(Metric metric) noexcept {
  switch (metric) {
    case Metric::hamming: return "hamming";
    case Metric::edit: return "edit";
    case Metric::wildcard: return "wildcard";
  }
  return "?";
}

Metric parse_metric(std::string_view name) {
  if (name == "hamming") return Metric::hamming;
  if (name == "edit") return Metric::edit;
  if (name == "wildcard") return Metric::wildcard;
  throw ParameterError("unknown metric '" + std::string(name) + "'");
}

PatternWalkSet::PatternWalkSet(const KeyedTree& kst, std::span<const Symbol> pattern, std::uint32_t k)
    : kst_(&kst), pattern_(pattern.begin(), pattern.end()), k_(k) {}

const WalkTrace& PatternWalkSet::trace(std::size_t start) const {
  if (start >= pattern_.size()) throw ParameterError("trace: start beyond the pattern");
  if (traces_.empty()) traces_.resize(pattern_.size());
  auto& slot = traces_[start];
  if (!slot) slot = avnj(*kst_, std::span<const Symbol>(pattern_).subspan(start), k_);
  return *slot;
}

PatternWalkSet prepare_pattern(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k) {
  if (pattern.empty()) throw ParameterError("empty pattern");
  if (index.mode == IndexMode::text && pattern.size() != index.m)
    throw ModeError("pattern length " + std::to_string(pattern.size()) + " differs from the index m = " +
                    std::to_string(index.m));
  PatternWalkSet set(index.kst, pattern, k);
  for (std::size_t i = 0; i < pattern.size(); ++i) set.trace(i);
  return set;
}

namespace {

using Key = std::vector<KeyPart>;
using KeyList = std::vector<Key>;

using StateId = std::array<std::uint32_t, 4>;

struct StateHash {
  std::size_t operator()(const StateId& s) const noexcept {
    std::uint64_t h = 0x9E3779B97F4A7C15ull;
    for (std::uint32_t v : s) h = (h ^ v) * 0x100000001B3ull;
    return static_cast<std::size_t>(h ^ (h >> 29));
  }
};

PartTag placement(EntryTag tag) { return tag == EntryTag::at_node ? PartTag::at_node : PartTag::at_edge; }

class Query {
 public:
  Query(const ErrorTree& et, std::span<const Symbol> pattern, std::uint32_t k, Metric metric, bool all_errors)
      : et_(et),
        kst_(et.kst),
        trie_(et.trie),
        p_(pattern),
        m_(static_cast<std::uint32_t>(pattern.size())),
        k_(k),
        metric_(metric),
        all_errors_(all_errors),
        wanted_lengths_(wanted_lengths()),
        exact_(pattern.size() + 1, kUnknown) {}

  const KeyList& keys(std::uint32_t start, std::uint32_t budget) {
    if (memo_.empty()) memo_.resize((m_ + 1) * (k_ + 1));
    auto& slot = memo_[start * (k_ + 1) + budget];
    if (!slot) {
      KeyList out = metric_ == Metric::edit ? edit_keys(start, budget) : hamming_keys(start, budget);
      std::sort(out.begin(), out.end());
      out.erase(std::unique(out.begin(), out.end()), out.end());
      slot = std::move(out);
    }
    return *slot;
  }

  std::vector<MatchResult> run() {
    if (metric_ == Metric::edit)
      walk_edit();
    else
      walk_hamming();
    return verify();
  }

 private:
  // Length bits a reported sequence may have, for pruning by length masks.
  std::uint64_t wanted_lengths() const {
    if (et_.lengths_below.empty()) return ~std::uint64_t{0};
    if (metric_ != Metric::edit) return length_bit(m_);
    std::uint64_t bits = 0;
    for (std::uint32_t len = m_ > k_ ? m_ - k_ : 1; len <= m_ + k_; ++len) {
      bits |= length_bit(len);
      if (len >= 63) break;  // one bit stands for every longer length
    }
    return bits;
  }

  bool reachable(std::uint32_t u) const {
    return et_.lengths_below.empty() || (et_.lengths_below[u] & wanted_lengths_) != 0;
  }
  bool light_reachable(std::uint32_t u) const {
    return et_.light_lengths.empty() || (et_.light_lengths[u] & wanted_lengths_) != 0;
  }

  bool allowed(std::uint32_t pos) const {
    return metric_ != Metric::wildcard || all_errors_ || p_[pos] == kWildcard;
  }

  // ---- pattern-side keys --------------------------------------------------

  KeyList hamming_keys(std::uint32_t start, std::uint32_t budget) {
    KeyList out;
    if (start == m_) {
      out.push_back({make_part(kst_.key(KeyedTree::root()), PartTag::at_node)});
      return out;
    }
    if (!walks_) walks_.emplace(kst_, p_, k_);
    const WalkTrace& tr = walks_->trace(start);
    const std::uint32_t len = m_ - start;
    // Jumps at positions where no error may be placed cut the trace short.
    std::uint32_t usable = tr.matched_len;
    for (std::uint32_t j : tr.jumps)
      if (!allowed(start + j - 1)) {
        usable = std::min(usable, j - 1);
        break;
      }
    std::uint32_t t = 0;
    std::size_t jumps_before = 0;
    for (const auto& e : tr.entries) {
      if (e.tag == EntryTag::at_edge) {
        t += e.length;
        continue;
      }
      if (t > usable) break;
      while (jumps_before < tr.jumps.size() && tr.jumps[jumps_before] <= t) ++jumps_before;
      if (jumps_before > budget) break;
      const std::uint32_t u = kst_.index_of(e.key);
      if (t < len && kst_.is_branch(u) && allowed(start + t) && jumps_before + 1 <= budget) {
        const KeyPart head = make_part(e.key, PartTag::sub);
        const auto rest_budget = static_cast<std::uint32_t>(budget - jumps_before - 1);
        for (const Key& rest : keys(start + t + 1, rest_budget)) {
          Key key;
          key.reserve(rest.size() + 1);
          key.push_back(head);
          key.insert(key.end(), rest.begin(), rest.end());
          out.push_back(std::move(key));
        }
      }
    }
    if (tr.matched_len == len && usable == len && tr.jumps.size() <= budget) {
      const auto [key, tag] = kst_.locus(tr.end);
      out.push_back({make_part(key, placement(tag))});
    }
    return out;
  }

  struct EditState {
    Point q;
    std::uint32_t i;
    std::uint32_t budget;
  };

  KeyList edit_keys(std::uint32_t start, std::uint32_t budget) {
    KeyList out;
    std::vector<EditState> stack{EditState{Point{KeyedTree::root(), 0}, start, budget}};
    std::unordered_set<StateId, StateHash> seen;
    const bool trailing = et_.mode == IndexMode::dictionary;
    auto push = [&](Point q, std::uint32_t i, std::uint32_t b) {
      if (seen.insert(StateId{q.node, q.remaining, i, b}).second) stack.push_back(EditState{q, i, b});
    };
    auto restart = [&](NodeKey u, PartTag op, std::uint32_t i, std::uint32_t b) {
      for (const Key& rest : keys(i, b)) {
        Key key;
        key.reserve(rest.size() + 1);
        key.push_back(make_part(u, op));
        key.insert(key.end(), rest.begin(), rest.end());
        out.push_back(std::move(key));
      }
    };
    seen.insert(StateId{KeyedTree::root(), 0, start, budget});
    while (!stack.empty()) {
      const EditState s = stack.back();
      stack.pop_back();
      const bool done = s.i == m_;
      if (done) {
        const auto [key, tag] = kst_.locus(s.q);
        out.push_back({make_part(key, placement(tag))});
        if (!trailing) continue;
      }
      const Symbol want = done ? kWildcard : p_[s.i];
      if (s.q.remaining == 0 && kst_.is_branch(s.q.node)) {
        const std::uint32_t u = s.q.node;
        if (!done && want != kWildcard) {
          const std::uint32_t c = kst_.child(u, want);
          if (c != kNoNode) push(kst_.enter(c), s.i + 1, s.budget);
        }
        if (s.budget > 0) {
          const NodeKey uk = kst_.key(u);
          if (!done) {
            restart(uk, PartTag::sub, s.i + 1, s.budget - 1);
            restart(uk, PartTag::ins, s.i + 1, s.budget - 1);
          }
          restart(uk, PartTag::del, s.i, s.budget - 1);
        }
        continue;
      }
      // Edge interior, a single-child node, or the bottom of a leaf.
      Symbol next = kTerminator;
      Point adv = s.q;
      if (s.q.remaining > 0) {
        next = kst_.symbol_at(s.q);
        adv.remaining -= 1;
      } else if (!kst_.node(s.q.node).children.empty()) {
        const auto& only = kst_.node(s.q.node).children.front();
        next = only.first;
        adv = kst_.enter(only.second);
      }
      if (next != kTerminator) {
        if (!done && next == want) push(adv, s.i + 1, s.budget);
        if (s.budget > 0) {
          if (!done && next != want) push(adv, s.i + 1, s.budget - 1);
          push(adv, s.i, s.budget - 1);
        }
      }
      if (s.budget > 0 && !done) push(s.q, s.i + 1, s.budget - 1);
    }
    return out;
  }

  // ---- trie walks -----------------------------------------------------------

  bool has_tables(std::uint32_t u) const {
    const ErrorTable* t = et_.table(TableKind::sub, 1);
    return t && t->has_owner(u);
  }

  // Locus part of the error-free suffix starting at `start`, or kAbsent when it
  // is not spelled in the suffix tree. Equals keys(start, 0) without building
  // a trace.
  KeyPart exact_part(std::uint32_t start) {
    KeyPart& slot = exact_[start];
    if (slot != kUnknown) return slot;
    const auto q = kst_.match(p_.subspan(start));
    if (!q) return slot = kAbsent;
    const auto [key, tag] = kst_.locus(*q);
    return slot = make_part(key, placement(tag));
  }

  void probe(std::uint32_t u, std::uint32_t start, std::uint32_t budget) {
    if (budget == 0) {
      const KeyPart part = exact_part(start);
      const ErrorTable* t = et_.table(TableKind::sub, 1);
      if (part == kAbsent || !t) return;
      for (std::uint32_t leaf : t->lookup(u, std::span<const KeyPart>(&part, 1))) leaves_.push_back(leaf);
      return;
    }
    for (const Key& key : keys(start, budget)) {
      const ErrorTable* t = et_.table(kind_of(key), static_cast<std::uint32_t>(key.size()));
      if (!t) continue;
      for (std::uint32_t leaf : t->lookup(u, key)) leaves_.push_back(leaf);
    }
  }

  void report(Point q) {
    if (et_.mode == IndexMode::text) {
      std::vector<std::uint32_t> stack{q.node};
      while (!stack.empty()) {
        const std::uint32_t u = stack.back();
        stack.pop_back();
        if (trie_.node(u).is_leaf()) leaves_.push_back(u);
        for (const auto& ch : trie_.node(u).children) stack.push_back(ch.second);
      }
      return;
    }
    if (q.remaining > 0) {
      if (trie_.symbol_at(q) == kTerminator) leaves_.push_back(q.node);
      return;
    }
    const std::uint32_t t = trie_.terminator_child(q.node);
    if (t != kNoNode) leaves_.push_back(t);
  }

  bool heavy_usable(std::uint32_t u) const {
    const std::uint32_t h = et_.heavy[u];
    return h != kNoNode && trie_.arena()[trie_.node(h).edge.offset] != kTerminator;
  }

  struct WalkState {
    Point q;
    std::uint32_t i;
    std::uint32_t cost;
  };

  void walk_hamming() {
    std::vector<WalkState> stack;
    stack.reserve(64);
    stack.push_back(WalkState{Point{KeyedTree::root(), 0}, 0, 0});
    while (!stack.empty()) {
      const WalkState s = stack.back();
      stack.pop_back();
      if (s.i == m_) {
        report(s.q);
        continue;
      }
      if (!reachable(s.q.node)) continue;
      const Symbol c = p_[s.i];
      const bool can_err = s.cost < k_ && allowed(s.i);
      if (s.q.remaining == 0) {
        const std::uint32_t u = s.q.node;
        if (trie_.node(u).is_leaf()) continue;
        if (can_err && has_tables(u) && light_reachable(u)) probe(u, s.i + 1, k_ - s.cost - 1);
        const std::uint32_t exact = c == kWildcard ? kNoNode : trie_.child(u, c);
        if (exact != kNoNode) stack.push_back(WalkState{trie_.enter(exact), s.i + 1, s.cost});
        if (can_err && heavy_usable(u) && et_.heavy[u] != exact)
          stack.push_back(WalkState{trie_.enter(et_.heavy[u]), s.i + 1, s.cost + 1});
        continue;
      }
      const Symbol e = trie_.symbol_at(s.q);
      if (e == kTerminator) continue;
      const Point adv{s.q.node, s.q.remaining - 1};
      if (e == c)
        stack.push_back(WalkState{adv, s.i + 1, s.cost});
      else if (can_err)
        stack.push_back(WalkState{adv, s.i + 1, s.cost + 1});
    }
  }

  void walk_edit() {
    std::vector<WalkState> stack;
    std::unordered_map<StateId, std::uint32_t, StateHash> best;
    const bool trailing = et_.mode == IndexMode::dictionary;
    auto push = [&](Point q, std::uint32_t i, std::uint32_t cost) {
      auto [it, fresh] = best.emplace(StateId{q.node, q.remaining, i, 0}, cost);
      if (!fresh) {
        if (it->second <= cost) return;
        it->second = cost;
      }
      stack.push_back(WalkState{q, i, cost});
    };
    push(Point{KeyedTree::root(), 0}, 0, 0);
    while (!stack.empty()) {
      const WalkState s = stack.back();
      stack.pop_back();
      const bool done = s.i == m_;
      if (done) {
        report(s.q);
        if (!trailing) continue;
      }
      if (!reachable(s.q.node)) continue;
      const bool can_err = s.cost < k_;
      const Symbol c = done ? kWildcard : p_[s.i];
      if (s.q.remaining == 0) {
        const std::uint32_t u = s.q.node;
        if (!trie_.node(u).is_leaf()) {
          if (can_err && has_tables(u) && light_reachable(u)) {
            if (!done) probe(u, s.i + 1, k_ - s.cost - 1);
            probe(u, s.i, k_ - s.cost - 1);
          }
          const std::uint32_t exact = done ? kNoNode : trie_.child(u, c);
          if (exact != kNoNode) push(trie_.enter(exact), s.i + 1, s.cost);
          if (can_err && heavy_usable(u)) {
            const std::uint32_t h = et_.heavy[u];
            if (!done && h != exact) push(trie_.enter(h), s.i + 1, s.cost + 1);
            push(trie_.enter(h), s.i, s.cost + 1);
          }
        }
      } else {
        const Symbol e = trie_.symbol_at(s.q);
        if (e != kTerminator) {
          const Point adv{s.q.node, s.q.remaining - 1};
          if (!done && e == c) push(adv, s.i + 1, s.cost);
          if (can_err) {
            if (!done && e != c) push(adv, s.i + 1, s.cost + 1);
            push(adv, s.i, s.cost + 1);
          }
        }
      }
      if (can_err && !done) push(s.q, s.i + 1, s.cost + 1);
    }
  }

  // ---- verification ---------------------------------------------------------

  std::vector<MatchResult> verify() {
    std::sort(leaves_.begin(), leaves_.end());
    leaves_.erase(std::unique(leaves_.begin(), leaves_.end()), leaves_.end());
    std::vector<SuffixRef> refs;
    for (std::uint32_t leaf : leaves_) {
      const auto& labels = trie_.node(leaf).labels;
      refs.insert(refs.end(), labels.begin(), labels.end());
    }
    std::sort(refs.begin(), refs.end());
    refs.erase(std::unique(refs.begin(), refs.end()), refs.end());

    std::size_t wildcards = 0;
    for (Symbol s : p_) wildcards += s == kWildcard;
    const std::size_t wildcard_budget = all_errors_ ? k_ - wildcards : 0;

    const SymbolArena& a = *et_.arena;
    std::vector<MatchResult> out;
    for (const SuffixRef& r : refs) {
      std::span<const Symbol> data;
      std::uint32_t subject = r.sequence;
      if (et_.mode == IndexMode::text) {
        if (r.start > a.length(0)) continue;
        data = a.sequence(0).subspan(r.start - 1);
        subject = r.start;
      } else {
        data = a.sequence(r.sequence);
      }
      std::optional<std::size_t> d;
      switch (metric_) {
        case Metric::hamming:
          if (data.size() >= m_ && (et_.mode == IndexMode::text || data.size() == m_)) {
            d = hamming_distance(data.first(m_), p_);
            if (*d > k_) d.reset();
          }
          break;
        case Metric::wildcard:
          if (data.size() >= m_ && (et_.mode == IndexMode::text || data.size() == m_)) {
            d = wildcard_mismatches(p_, data.first(m_), kWildcard);
            if (*d > wildcard_budget) d.reset();
          }
          break;
        case Metric::edit:
          d = et_.mode == IndexMode::text ? best_prefix_edit_distance(data, p_, k_)
                                          : bounded_edit_distance(data, p_, k_);
          break;
      }
      if (d) out.push_back(MatchResult{subject, static_cast<std::uint32_t>(*d), metric_});
    }
    std::sort(out.begin(), out.end(), [](const MatchResult& x, const MatchResult& y) { return x.subject < y.subject; });
    return out;
  }

  const ErrorTree& et_;
  const KeyedTree& kst_;
  const KeyedTree& trie_;
  std::span<const Symbol> p_;
  std::uint32_t m_;
  std::uint32_t k_;
  Metric metric_;
  bool all_errors_;
  std::uint64_t wanted_lengths_;
  // Traces are only needed for probes that still carry errors.
  std::optional<PatternWalkSet> walks_;
  std::vector<std::optional<KeyList>> memo_;
  static constexpr KeyPart kUnknown = ~KeyPart{0};
  static constexpr KeyPart kAbsent = ~KeyPart{0} - 1;
  std::vector<KeyPart> exact_;
  std::vector<std::uint32_t> leaves_;
};

void check_query(const ErrorTree& et, std::span<const Symbol> pattern, std::uint32_t k, Metric metric) {
  if (pattern.empty()) throw ParameterError("empty pattern");
  if (k > et.k)
    throw CapabilityError("k = " + std::to_string(k) + " exceeds the index budget " + std::to_string(et.k));
  if (metric == Metric::edit && k > 0 && !et.indels)
    throw CapabilityError("index was built without indel tables; rebuild with --metric edit");
  if (et.mode == IndexMode::text && pattern.size() != et.m)
    throw ModeError("pattern length " + std::to_string(pattern.size()) + " differs from the index m = " +
                    std::to_string(et.m));
  const std::size_t sigma = et.alphabet.size();
  std::size_t wildcards = 0;
  for (std::size_t i = 0; i < pattern.size(); ++i) {
    if (pattern[i] == kWildcard && metric == Metric::wildcard) {
      ++wildcards;
      continue;
    }
    if (pattern[i] >= sigma)
      throw InputError("pattern offset " + std::to_string(i + 1) + ": symbol outside the alphabet");
  }
  if (wildcards > k)
    throw ParameterError(std::to_string(wildcards) + " wildcards exceed k = " + std::to_string(k));
}

std::vector<MatchResult> run_query(const ErrorTree& et, Metric metric, std::span<const Symbol> pattern,
                                   std::uint32_t k, bool all_errors) {
  check_query(et, pattern, k, metric);
  Query q(et, pattern, k, metric, all_errors);
  return q.run();
}

void require_text(const ErrorTree& et) {
  if (et.mode != IndexMode::text) throw ModeError("index is not a text index");
}

void require_dictionary(const ErrorTree& et) {
  if (et.mode != IndexMode::dictionary) throw ModeError("index is not a dictionary index");
}

}  // namespace

std::vector<MatchResult> query_hamming(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k) {
  require_dictionary(index);
  return run_query(index, Metric::hamming, pattern, k, false);
}

std::vector<MatchResult> query_edit(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k) {
  require_dictionary(index);
  return run_query(index, Metric::edit, pattern, k, false);
}

std::vector<MatchResult> query_wildcard(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k,
                                        const QueryOptions& options) {
  require_dictionary(index);
  return run_query(index, Metric::wildcard, pattern, k, options.all_errors);
}

std::vector<MatchResult> query_text_hamming(const ErrorTree& index, std::span<const Symbol> pattern,
                                            std::uint32_t k) {
  require_text(index);
  return run_query(index, Metric::hamming, pattern, k, false);
}

std::vector<MatchResult> query_text_edit(const ErrorTree& index, std::span<const Symbol> pattern, std::uint32_t k) {
  require_text(index);
  return run_query(index, Metric::edit, pattern, k, false);
}

std::vector<MatchResult> query_text_wildcard(const ErrorTree& index, std::span<const Symbol> pattern,
                                             std::uint32_t k, const QueryOptions& options) {
  require_text(index);
  return run_query(index, Metric::wildcard, pattern, k, options.all_errors);
}

std::vector<MatchResult> query(const ErrorTree& index, Metric metric, std::span<const Symbol> pattern, std::uint32_t k,
                               const QueryOptions& options) {
  return run_query(index, metric, pattern, k, options.all_errors);
}

std::vector<MatchResult> query_string(const ErrorTree& index, Metric metric, std::string_view pattern, std::uint32_t k,
                                      const QueryOptions& options) {
  const char wildcard = metric == Metric::wildcard ? index.alphabet.wildcard() : '\0';
  const auto encoded = index.alphabet.encode_pattern(pattern, wildcard);
  return query(index, metric, encoded, k, options);
}

std::vector<std::vector<KeyPart>> pattern_keys(const ErrorTree& index, std::span<const Symbol> pattern,
                                               std::uint32_t start, std::uint32_t budget, Metric metric) {
  if (start > pattern.size()) throw ParameterError("pattern_keys: start beyond the pattern");
  Query q(index, pattern, std::max(budget, index.k), metric, true);
  return q.keys(start, budget);
}

}  // namespace errortree
