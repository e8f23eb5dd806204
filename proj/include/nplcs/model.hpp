#pragma once

#include <algorithm>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "nplcs/rational.hpp"

namespace nplcs {

using LocId = std::uint32_t;
using ChanId = std::uint32_t;
using SymId = std::uint32_t;
using RuleId = std::uint32_t;

/// Channel content, head of the queue at the front.
using Word = std::vector<SymId>;

enum class OpKind { Send, Recv, Internal };

struct RuleOp {
    OpKind kind = OpKind::Internal;
    ChanId channel = 0;  // unused for Internal
    SymId message = 0;   // unused for Internal

    static RuleOp send(ChanId c, SymId m) { return {OpKind::Send, c, m}; }
    static RuleOp recv(ChanId c, SymId m) { return {OpKind::Recv, c, m}; }
    static RuleOp internal() { return {OpKind::Internal, 0, 0}; }
    bool is_receive() const { return kind == OpKind::Recv; }
};

struct TransitionRule {
    LocId source = 0;
    LocId target = 0;
    RuleOp op;
};

struct NotEnabledError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct TooLargeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct EmptyRemainderError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UndeclaredSymbolError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Name-level description of a transition rule, before symbol resolution.
struct RuleSpec {
    std::string source;
    std::string target;
    OpKind kind = OpKind::Internal;
    std::string channel;  // empty for Internal
    std::string message;  // empty for Internal
};

struct LcsSpec {
    std::vector<std::string> locations;
    std::vector<std::string> channels;
    std::vector<std::string> messages;
    std::vector<RuleSpec> rules;
};

struct ModelIssue {
    enum class Kind { TerminalLocation, UndeclaredSymbol };
    Kind kind;
    std::string subject;  // location name / offending symbol
    std::string detail;
};

/// A lossy channel system. Locations, channels and messages are interned and
/// ordered lexicographically by name; rules keep their declaration order.
class Lcs {
  public:
    Lcs() = default;

    /// Resolves an LcsSpec. Throws UndeclaredSymbolError if a rule references
    /// an unknown location/channel/message.
    static Lcs build(const LcsSpec& spec) {
        Lcs l;
        l.locations_ = sorted_unique(spec.locations);
        l.channels_ = sorted_unique(spec.channels);
        l.messages_ = sorted_unique(spec.messages);
        for (const RuleSpec& rs : spec.rules) {
            TransitionRule r;
            r.source = l.require_location(rs.source);
            r.target = l.require_location(rs.target);
            if (rs.kind == OpKind::Internal) {
                r.op = RuleOp::internal();
            } else {
                ChanId c = l.require_channel(rs.channel);
                SymId m = l.require_message(rs.message);
                r.op = rs.kind == OpKind::Send ? RuleOp::send(c, m) : RuleOp::recv(c, m);
            }
            l.rules_.push_back(r);
        }
        l.reindex();
        return l;
    }

    const std::vector<std::string>& location_names() const { return locations_; }
    const std::vector<std::string>& channel_names() const { return channels_; }
    const std::vector<std::string>& message_names() const { return messages_; }
    const std::vector<TransitionRule>& rules() const { return rules_; }
    const TransitionRule& rule(RuleId r) const { return rules_.at(r); }

    std::size_t location_count() const { return locations_.size(); }
    std::size_t channel_count() const { return channels_.size(); }
    std::size_t message_count() const { return messages_.size(); }

    const std::string& location_name(LocId q) const { return locations_.at(q); }
    const std::string& channel_name(ChanId c) const { return channels_.at(c); }
    const std::string& message_name(SymId m) const { return messages_.at(m); }

    std::optional<LocId> find_location(const std::string& name) const {
        return find_in(locations_, name);
    }
    std::optional<ChanId> find_channel(const std::string& name) const {
        return find_in(channels_, name);
    }
    std::optional<SymId> find_message(const std::string& name) const {
        return find_in(messages_, name);
    }

    LocId require_location(const std::string& name) const {
        if (auto id = find_location(name)) return *id;
        throw UndeclaredSymbolError("undeclared location: " + name);
    }
    ChanId require_channel(const std::string& name) const {
        if (auto id = find_channel(name)) return *id;
        throw UndeclaredSymbolError("undeclared channel: " + name);
    }
    SymId require_message(const std::string& name) const {
        if (auto id = find_message(name)) return *id;
        throw UndeclaredSymbolError("undeclared message: " + name);
    }

    const std::vector<RuleId>& rules_from(LocId q) const { return by_source_.at(q); }
    const std::vector<RuleId>& rules_into(LocId q) const { return by_target_.at(q); }

    std::set<LocId> all_locations() const {
        std::set<LocId> s;
        for (LocId q = 0; q < locations_.size(); ++q) s.insert(q);
        return s;
    }

  private:
    static std::vector<std::string> sorted_unique(std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }
    static std::optional<std::uint32_t> find_in(const std::vector<std::string>& v,
                                                const std::string& name) {
        auto it = std::lower_bound(v.begin(), v.end(), name);
        if (it == v.end() || *it != name) return std::nullopt;
        return static_cast<std::uint32_t>(it - v.begin());
    }
    void reindex() {
        by_source_.assign(locations_.size(), {});
        by_target_.assign(locations_.size(), {});
        for (RuleId i = 0; i < rules_.size(); ++i) {
            by_source_[rules_[i].source].push_back(i);
            by_target_[rules_[i].target].push_back(i);
        }
    }

    std::vector<std::string> locations_;
    std::vector<std::string> channels_;
    std::vector<std::string> messages_;
    std::vector<TransitionRule> rules_;
    std::vector<std::vector<RuleId>> by_source_;
    std::vector<std::vector<RuleId>> by_target_;
};

/// An LCS with a fault rate: the probabilistic layer.
struct Nplcs {
    Lcs lcs;
    Rat fault_rate;

    Nplcs(Lcs l, Rat tau) : lcs(std::move(l)), fault_rate(std::move(tau)) {
        if (!(fault_rate > 0 && fault_rate < 1))
            throw std::invalid_argument("fault rate must lie strictly between 0 and 1");
    }
};

struct Config {
    LocId location = 0;
    std::vector<Word> contents;  // indexed by channel id, one entry per declared channel

    auto operator<=>(const Config&) const = default;

    static Config at(LocId q, std::size_t channels) {
        Config s;
        s.location = q;
        s.contents.assign(channels, {});
        return s;
    }

    std::size_t total_messages() const {
        std::size_t n = 0;
        for (const Word& w : contents) n += w.size();
        return n;
    }
};

// ---------------------------------------------------------------------------
// Validation

inline std::vector<ModelIssue> validate(const Lcs& lcs) {
    std::vector<ModelIssue> issues;
    for (LocId q = 0; q < lcs.location_count(); ++q) {
        bool has_non_receive = false;
        for (RuleId r : lcs.rules_from(q))
            if (!lcs.rule(r).op.is_receive()) has_non_receive = true;
        if (!has_non_receive)
            issues.push_back({ModelIssue::Kind::TerminalLocation, lcs.location_name(q),
                              "location " + lcs.location_name(q) +
                                  " has no transition rule other than receives"});
    }
    return issues;
}

/// Name-level validation: undeclared symbols in rules plus the terminal-location
/// check on whatever resolves.
inline std::vector<ModelIssue> validate_spec(const LcsSpec& spec) {
    std::vector<ModelIssue> issues;
    auto declared = [](const std::vector<std::string>& v, const std::string& n) {
        return std::find(v.begin(), v.end(), n) != v.end();
    };
    LcsSpec clean = spec;
    clean.rules.clear();
    for (const RuleSpec& r : spec.rules) {
        bool ok = true;
        for (const std::string* n : {&r.source, &r.target})
            if (!declared(spec.locations, *n)) {
                issues.push_back({ModelIssue::Kind::UndeclaredSymbol, *n,
                                  "rule references undeclared location " + *n});
                ok = false;
            }
        if (r.kind != OpKind::Internal) {
            if (!declared(spec.channels, r.channel)) {
                issues.push_back({ModelIssue::Kind::UndeclaredSymbol, r.channel,
                                  "rule references undeclared channel " + r.channel});
                ok = false;
            }
            if (!declared(spec.messages, r.message)) {
                issues.push_back({ModelIssue::Kind::UndeclaredSymbol, r.message,
                                  "rule references undeclared message " + r.message});
                ok = false;
            }
        }
        if (ok) clean.rules.push_back(r);
    }
    for (ModelIssue& i : validate(Lcs::build(clean))) issues.push_back(std::move(i));
    return issues;
}

// ---------------------------------------------------------------------------
// Steps

inline bool rule_enabled(const Lcs& lcs, const Config& s, RuleId r) {
    const TransitionRule& rule = lcs.rule(r);
    if (rule.source != s.location) return false;
    if (rule.op.kind != OpKind::Recv) return true;
    const Word& w = s.contents.at(rule.op.channel);
    return !w.empty() && w.front() == rule.op.message;
}

/// Rules enabled in s, in declaration order.
inline std::vector<RuleId> enabled_rules(const Lcs& lcs, const Config& s) {
    std::vector<RuleId> out;
    for (RuleId r : lcs.rules_from(s.location))
        if (rule_enabled(lcs, s, r)) out.push_back(r);
    return out;
}

inline Config perfect_step(const Lcs& lcs, const Config& s, RuleId r) {
    if (!rule_enabled(lcs, s, r))
        throw NotEnabledError("rule " + std::to_string(r) + " not enabled in configuration");
    const TransitionRule& rule = lcs.rule(r);
    Config t = s;
    t.location = rule.target;
    switch (rule.op.kind) {
        case OpKind::Send:
            t.contents[rule.op.channel].push_back(rule.op.message);
            break;
        case OpKind::Recv:
            t.contents[rule.op.channel].erase(t.contents[rule.op.channel].begin());
            break;
        case OpKind::Internal:
            break;
    }
    return t;
}

// ---------------------------------------------------------------------------
// Subword order and embedding counts

/// True iff u can be obtained from v by deleting letters (order preserved).
inline bool is_subword(const Word& u, const Word& v) {
    std::size_t i = 0;
    for (std::size_t j = 0; j < v.size() && i < u.size(); ++j)
        if (u[i] == v[j]) ++i;
    return i == u.size();
}

/// Componentwise subword order on configurations; requires equal locations.
inline bool config_leq(const Config& a, const Config& b) {
    if (a.location != b.location) return false;
    for (std::size_t c = 0; c < a.contents.size(); ++c)
        if (!is_subword(a.contents[c], b.contents[c])) return false;
    return true;
}

/// Number of index-monotone embeddings of wp into w.
inline unsigned long long count_embeddings(const Word& w, const Word& wp) {
    if (wp.size() > w.size()) return 0;
    // m[j] = #embeddings of wp[0..j) into the processed prefix of w
    std::vector<unsigned long long> m(wp.size() + 1, 0);
    m[0] = 1;
    for (std::size_t i = 0; i < w.size(); ++i)
        for (std::size_t j = std::min(wp.size(), i + 1); j >= 1; --j)
            if (w[i] == wp[j - 1]) m[j] += m[j - 1];
    return m[wp.size()];
}

/// Probability that a channel containing w turns into wp through one round of
/// per-message losses: tau^{|w|-|wp|} (1-tau)^{|wp|} binom(w, wp).
inline Rat p_lost(const Rat& tau, const Word& w, const Word& wp) {
    unsigned long long coeff = count_embeddings(w, wp);
    if (coeff == 0) return Rat(0);
    Rat p = rat_pow(tau, w.size() - wp.size()) * rat_pow(Rat(1) - tau, wp.size());
    return Rat(static_cast<unsigned long>(coeff)) * p;
}

/// Channel-wise product: losses are independent per channel.
inline Rat p_lost(const Rat& tau, const std::vector<Word>& w, const std::vector<Word>& wp) {
    Rat p(1);
    for (std::size_t c = 0; c < w.size(); ++c) {
        p *= p_lost(tau, w[c], wp[c]);
        if (p == 0) return p;
    }
    return p;
}

constexpr std::size_t kDefaultSubwordBound = std::size_t(1) << 16;

/// Number of distinct subwords of w, saturating at cap+1.
inline std::size_t distinct_subword_count(const Word& w, std::size_t cap) {
    // classic distinct-subsequence DP; last[m] holds the count just before the
    // previous occurrence of m was processed
    std::map<SymId, unsigned long long> last;
    unsigned long long total = 1;  // epsilon
    const unsigned long long lim = cap < (1ull << 62) ? cap + 1 : cap;
    for (SymId m : w) {
        unsigned long long prev = total;
        unsigned long long repeat = 0;
        if (auto it = last.find(m); it != last.end()) repeat = it->second;
        unsigned long long fresh = prev - repeat;
        total = prev >= lim || fresh >= lim - prev ? lim : prev + fresh;
        last[m] = prev;
        if (total >= lim) return lim;
    }
    return static_cast<std::size_t>(total);
}

/// All distinct subwords of w (including epsilon and w itself), each exactly
/// once, in prefix-first lexicographic order on symbol ids.
inline std::vector<Word> all_subwords(const Word& w, std::size_t bound = kDefaultSubwordBound) {
    if (distinct_subword_count(w, bound) > bound)
        throw TooLargeError("subword enumeration bound exceeded");
    std::vector<Word> out;
    // canonical leftmost embeddings: extend by the first occurrence of each symbol
    std::vector<SymId> symbols;
    for (SymId m : w)
        if (std::find(symbols.begin(), symbols.end(), m) == symbols.end()) symbols.push_back(m);
    std::sort(symbols.begin(), symbols.end());
    Word prefix;
    auto rec = [&](auto&& self, std::size_t from) -> void {
        out.push_back(prefix);
        for (SymId m : symbols) {
            for (std::size_t i = from; i < w.size(); ++i) {
                if (w[i] == m) {
                    prefix.push_back(m);
                    self(self, i + 1);
                    prefix.pop_back();
                    break;
                }
            }
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return out;
}

struct LossDistribution {
    Word base;
    std::vector<std::pair<Word, Rat>> support;  // distinct subwords with probabilities
};

inline LossDistribution loss_distribution(const Rat& tau, const Word& w,
                                          std::size_t bound = kDefaultSubwordBound) {
    LossDistribution d;
    d.base = w;
    for (Word& sub : all_subwords(w, bound)) {
        Rat p = p_lost(tau, w, sub);
        d.support.emplace_back(std::move(sub), std::move(p));
    }
    return d;
}

/// All lossy successors of s under rule r: the perfect successor and every
/// channel-wise subword of it, deduplicated, in canonical order.
inline std::vector<Config> lossy_successors(const Lcs& lcs, const Config& s, RuleId r,
                                            std::size_t bound = kDefaultSubwordBound) {
    Config perfect = perfect_step(lcs, s, r);
    std::vector<std::vector<Word>> options;
    std::size_t combos = 1;
    for (const Word& w : perfect.contents) {
        options.push_back(all_subwords(w, bound));
        if (combos > bound / options.back().size() + 1) throw TooLargeError("lossy successor bound");
        combos *= options.back().size();
    }
    if (combos > bound) throw TooLargeError("lossy successor bound");
    std::vector<Config> out;
    Config t = Config::at(perfect.location, perfect.contents.size());
    auto rec = [&](auto&& self, std::size_t c) -> void {
        if (c == options.size()) {
            out.push_back(t);
            return;
        }
        for (const Word& choice : options[c]) {
            t.contents[c] = choice;
            self(self, c + 1);
        }
    };
    rec(rec, 0);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Location-removal transform

/// Deletes `remove`, adds a fresh `fail` location with an internal self-loop,
/// and redirects every surviving rule that targeted a removed location to fail.
inline Lcs restrict_with_fail(const Lcs& lcs, const std::set<LocId>& remove) {
    if (remove.size() >= lcs.location_count())
        throw EmptyRemainderError("cannot remove every location");
    std::string fail = "fail";
    while (lcs.find_location(fail) && !remove.count(*lcs.find_location(fail))) fail += "_";

    LcsSpec spec;
    for (LocId q = 0; q < lcs.location_count(); ++q)
        if (!remove.count(q)) spec.locations.push_back(lcs.location_name(q));
    spec.locations.push_back(fail);
    spec.channels = lcs.channel_names();
    spec.messages = lcs.message_names();
    for (const TransitionRule& r : lcs.rules()) {
        if (remove.count(r.source)) continue;
        RuleSpec rs;
        rs.source = lcs.location_name(r.source);
        rs.target = remove.count(r.target) ? fail : lcs.location_name(r.target);
        rs.kind = r.op.kind;
        if (r.op.kind != OpKind::Internal) {
            rs.channel = lcs.channel_name(r.op.channel);
            rs.message = lcs.message_name(r.op.message);
        }
        spec.rules.push_back(rs);
    }
    spec.rules.push_back({fail, fail, OpKind::Internal, "", ""});
    return Lcs::build(spec);
}

// ---------------------------------------------------------------------------
// Location-set helpers shared by the decision procedures

using LocSet = std::set<LocId>;

inline LocSet loc_set(const Lcs& lcs, const std::vector<std::string>& names) {
    LocSet s;
    for (const std::string& n : names) s.insert(lcs.require_location(n));
    return s;
}

inline std::vector<std::string> loc_names(const Lcs& lcs, const LocSet& s) {
    std::vector<std::string> out;
    for (LocId q : s) out.push_back(lcs.location_name(q));
    return out;
}

/// Transfers a location set between systems by name; unknown names are dropped
/// (they correspond to removed locations).
inline LocSet transfer_locs(const Lcs& from, const LocSet& s, const Lcs& to) {
    LocSet out;
    for (LocId q : s)
        if (auto id = to.find_location(from.location_name(q))) out.insert(*id);
    return out;
}

inline LocSet set_union(const LocSet& a, const LocSet& b) {
    LocSet out = a;
    out.insert(b.begin(), b.end());
    return out;
}

inline LocSet set_intersect(const LocSet& a, const LocSet& b) {
    LocSet out;
    for (LocId q : a)
        if (b.count(q)) out.insert(q);
    return out;
}

inline LocSet set_minus(const LocSet& a, const LocSet& b) {
    LocSet out;
    for (LocId q : a)
        if (!b.count(q)) out.insert(q);
    return out;
}

inline LocSet complement(const Lcs& lcs, const LocSet& a) {
    return set_minus(lcs.all_locations(), a);
}

}  // namespace nplcs
