#pragma once

// Independent ground-truth engine for testing. Everything here answers
// qualitative questions on finite MDPs with exact graph algorithms; nothing in
// the verdict path includes this header.

#include <cstdint>
#include <functional>
#include <map>
#include <queue>
#include <random>
#include <variant>
#include <vector>

#include "nplcs/model.hpp"
#include "nplcs/qualitative.hpp"

namespace nplcs {

struct Exceeded {};

struct FiniteMdp {
    std::vector<Config> states;
    std::map<Config, std::uint32_t> index;
    // actions[s] = (rule, [(successor, exact probability)]) per enabled rule
    std::vector<std::vector<std::pair<RuleId, std::vector<std::pair<std::uint32_t, Rat>>>>>
        actions;
};

/// BFS closure under lossy steps; Exceeded once more than `cap` states appear.
inline std::variant<FiniteMdp, Exceeded> explore(const Nplcs& n, const Config& start,
                                                 std::size_t cap) {
    const Lcs& lcs = n.lcs;
    FiniteMdp mdp;
    std::queue<std::uint32_t> work;
    auto intern = [&](const Config& s) -> std::optional<std::uint32_t> {
        if (auto it = mdp.index.find(s); it != mdp.index.end()) return it->second;
        if (mdp.states.size() >= cap) return std::nullopt;
        std::uint32_t id = static_cast<std::uint32_t>(mdp.states.size());
        mdp.states.push_back(s);
        mdp.index.emplace(s, id);
        work.push(id);
        return id;
    };
    if (!intern(start)) return Exceeded{};
    while (!work.empty()) {
        std::uint32_t sid = work.front();
        work.pop();
        Config s = mdp.states[sid];
        std::vector<std::pair<RuleId, std::vector<std::pair<std::uint32_t, Rat>>>> acts;
        for (RuleId r : enabled_rules(lcs, s)) {
            Config perfect = perfect_step(lcs, s, r);
            // per-channel loss distributions, combined multiplicatively
            std::vector<LossDistribution> per_chan;
            for (const Word& w : perfect.contents)
                per_chan.push_back(loss_distribution(n.fault_rate, w));
            std::vector<std::pair<std::uint32_t, Rat>> succ;
            Config t = Config::at(perfect.location, perfect.contents.size());
            bool overflow = false;
            auto rec = [&](auto&& self, std::size_t c, Rat p) -> void {
                if (overflow) return;
                if (c == per_chan.size()) {
                    auto id = intern(t);
                    if (!id) {
                        overflow = true;
                        return;
                    }
                    succ.emplace_back(*id, std::move(p));
                    return;
                }
                for (const auto& [sub, q] : per_chan[c].support) {
                    t.contents[c] = sub;
                    self(self, c + 1, p * q);
                }
            };
            rec(rec, 0, Rat(1));
            if (overflow) return Exceeded{};
            acts.emplace_back(r, std::move(succ));
        }
        mdp.actions.resize(mdp.states.size());
        mdp.actions[sid] = std::move(acts);
    }
    mdp.actions.resize(mdp.states.size());
    return mdp;
}

// ---------------------------------------------------------------------------
// Qualitative analysis works on the transition support only.

struct SupportMdp {
    // act[s][a] = deduplicated successor state list
    std::vector<std::vector<std::vector<std::uint32_t>>> act;
    std::size_t size() const { return act.size(); }
};

inline SupportMdp support_of(const FiniteMdp& mdp) {
    SupportMdp m;
    m.act.resize(mdp.states.size());
    for (std::size_t s = 0; s < mdp.states.size(); ++s)
        for (const auto& [rule, succ] : mdp.actions[s]) {
            std::vector<std::uint32_t> t;
            for (const auto& [id, p] : succ) t.push_back(id);
            std::sort(t.begin(), t.end());
            t.erase(std::unique(t.begin(), t.end()), t.end());
            m.act[s].push_back(std::move(t));
        }
    return m;
}

using StateSet = std::vector<char>;  // indexed by state id

/// exists U with Pr(eventually target) > 0: plain reachability in the support.
inline bool oracle_reach_positive(const SupportMdp& m, std::uint32_t start,
                                  const StateSet& target) {
    std::vector<char> seen(m.size(), 0);
    std::queue<std::uint32_t> q;
    seen[start] = 1;
    q.push(start);
    while (!q.empty()) {
        std::uint32_t s = q.front();
        q.pop();
        if (target[s]) return true;
        for (const auto& a : m.act[s])
            for (std::uint32_t t : a)
                if (!seen[t]) {
                    seen[t] = 1;
                    q.push(t);
                }
    }
    return false;
}

/// States with a strategy reaching `target` almost surely: the standard
/// nu X. mu Y. (T cup {s : exists a, succ(s,a) subseteq X and succ(s,a) n Y != 0}).
inline StateSet oracle_almost_sure_reach_set(const SupportMdp& m, const StateSet& target) {
    StateSet good(m.size(), 1);
    for (;;) {
        // mu Y inside the current X
        StateSet y = target;
        bool grew = true;
        while (grew) {
            grew = false;
            for (std::uint32_t s = 0; s < m.size(); ++s) {
                if (y[s]) continue;
                for (const auto& a : m.act[s]) {
                    bool inside = true, hits = false;
                    for (std::uint32_t t : a) {
                        if (!good[t]) inside = false;
                        if (y[t]) hits = true;
                    }
                    if (inside && hits && !a.empty()) {
                        y[s] = 1;
                        grew = true;
                        break;
                    }
                }
            }
        }
        if (y == good) return good;
        good = y;
    }
}

/// Largest region of non-target states closed under some action: from these a
/// scheduler avoids `target` surely (hence with probability zero of hitting).
inline StateSet oracle_sure_avoid_set(const SupportMdp& m, const StateSet& target) {
    StateSet x(m.size(), 1);
    for (std::uint32_t s = 0; s < m.size(); ++s)
        if (target[s]) x[s] = 0;
    bool changed = true;
    while (changed) {
        changed = false;
        for (std::uint32_t s = 0; s < m.size(); ++s) {
            if (!x[s]) continue;
            bool has = false;
            for (const auto& a : m.act[s]) {
                bool inside = !a.empty();
                for (std::uint32_t t : a)
                    if (!x[t]) inside = false;
                if (inside) {
                    has = true;
                    break;
                }
            }
            if (!has) {
                x[s] = 0;
                changed = true;
            }
        }
    }
    return x;
}

/// exists U with Pr(eventually target) < 1: a target-free path into the sure
/// avoidance region.
inline bool oracle_reach_lt1(const SupportMdp& m, std::uint32_t start, const StateSet& target) {
    StateSet avoid = oracle_sure_avoid_set(m, target);
    if (target[start]) return false;
    std::vector<char> seen(m.size(), 0);
    std::queue<std::uint32_t> q;
    seen[start] = 1;
    q.push(start);
    while (!q.empty()) {
        std::uint32_t s = q.front();
        q.pop();
        if (avoid[s]) return true;
        for (const auto& a : m.act[s])
            for (std::uint32_t t : a)
                if (!seen[t] && !target[t]) {
                    seen[t] = 1;
                    q.push(t);
                }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Maximal end components

namespace detail {

inline std::vector<std::vector<std::uint32_t>> sccs_of(
    const std::vector<std::vector<std::uint32_t>>& adj, const std::vector<std::uint32_t>& nodes) {
    // iterative Tarjan restricted to `nodes`
    std::map<std::uint32_t, std::uint32_t> idx, low;
    std::vector<std::uint32_t> stack;
    std::map<std::uint32_t, char> on_stack;
    std::vector<std::vector<std::uint32_t>> out;
    std::uint32_t counter = 0;
    std::vector<char> in_scope(adj.size(), 0);
    for (std::uint32_t v : nodes) in_scope[v] = 1;

    struct Frame {
        std::uint32_t v;
        std::size_t child;
    };
    for (std::uint32_t root : nodes) {
        if (idx.count(root)) continue;
        std::vector<Frame> frames{{root, 0}};
        idx[root] = low[root] = counter++;
        stack.push_back(root);
        on_stack[root] = 1;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < adj[f.v].size()) {
                std::uint32_t w = adj[f.v][f.child++];
                if (!in_scope[w]) continue;
                if (!idx.count(w)) {
                    idx[w] = low[w] = counter++;
                    stack.push_back(w);
                    on_stack[w] = 1;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.v] = std::min(low[f.v], idx[w]);
                }
            } else {
                if (low[f.v] == idx[f.v]) {
                    std::vector<std::uint32_t> comp;
                    for (;;) {
                        std::uint32_t w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp.push_back(w);
                        if (w == f.v) break;
                    }
                    out.push_back(std::move(comp));
                }
                std::uint32_t v = f.v;
                frames.pop_back();
                if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
            }
        }
    }
    return out;
}

}  // namespace detail

/// Maximal end components of the sub-MDP induced by `scope`: maximal sets that
/// are strongly connected using only actions whose successors stay inside.
inline std::vector<std::vector<std::uint32_t>> oracle_mecs(const SupportMdp& m,
                                                           const StateSet& scope) {
    std::vector<std::vector<std::uint32_t>> result;
    std::vector<std::vector<std::uint32_t>> candidates;
    {
        std::vector<std::uint32_t> all;
        for (std::uint32_t s = 0; s < m.size(); ++s)
            if (scope[s]) all.push_back(s);
        if (all.empty()) return result;
        candidates.push_back(std::move(all));
    }
    while (!candidates.empty()) {
        std::vector<std::uint32_t> cand = std::move(candidates.back());
        candidates.pop_back();
        StateSet in_cand(m.size(), 0);
        for (std::uint32_t s : cand) in_cand[s] = 1;
        // keep only actions staying inside the candidate, drop states with none
        bool changed = true;
        while (changed) {
            changed = false;
            for (std::uint32_t s : cand) {
                if (!in_cand[s]) continue;
                bool has = false;
                for (const auto& a : m.act[s]) {
                    bool inside = !a.empty();
                    for (std::uint32_t t : a)
                        if (!in_cand[t]) inside = false;
                    if (inside) has = true;
                }
                if (!has) {
                    in_cand[s] = 0;
                    changed = true;
                }
            }
        }
        std::vector<std::uint32_t> nodes;
        for (std::uint32_t s : cand)
            if (in_cand[s]) nodes.push_back(s);
        if (nodes.empty()) continue;
        // adjacency through inside-staying actions
        std::vector<std::vector<std::uint32_t>> adj(m.size());
        for (std::uint32_t s : nodes)
            for (const auto& a : m.act[s]) {
                bool inside = !a.empty();
                for (std::uint32_t t : a)
                    if (!in_cand[t]) inside = false;
                if (inside)
                    for (std::uint32_t t : a) adj[s].push_back(t);
            }
        std::vector<std::vector<std::uint32_t>> comps = detail::sccs_of(adj, nodes);
        bool split = comps.size() > 1 || comps[0].size() != nodes.size();
        for (auto& comp : comps) {
            if (comp.size() == 1) {
                // needs a self-staying action to be an end component
                std::uint32_t s = comp[0];
                bool selfok = false;
                for (const auto& a : m.act[s]) {
                    bool inside = !a.empty();
                    for (std::uint32_t t : a)
                        if (t != s) inside = false;
                    if (inside) selfok = true;
                }
                if (!selfok) continue;
                result.push_back(comp);
            } else if (split) {
                candidates.push_back(std::move(comp));
            } else {
                result.push_back(std::move(comp));
            }
        }
    }
    return result;
}

// ---------------------------------------------------------------------------
// Objectives over location sets, lifted to states

inline StateSet lift_locations(const FiniteMdp& mdp, const LocSet& a) {
    StateSet s(mdp.states.size(), 0);
    for (std::size_t i = 0; i < mdp.states.size(); ++i)
        if (a.count(mdp.states[i].location)) s[i] = 1;
    return s;
}

inline StateSet set_or(const StateSet& a, const StateSet& b) {
    StateSet out = a;
    for (std::size_t i = 0; i < b.size(); ++i)
        if (b[i]) out[i] = 1;
    return out;
}

/// States of maximal end components meeting every target set.
inline StateSet oracle_good_buchi_states(const SupportMdp& m,
                                         const std::vector<StateSet>& targets) {
    StateSet w(m.size(), 0);
    StateSet everything(m.size(), 1);
    for (const auto& mec : oracle_mecs(m, everything)) {
        bool good = true;
        for (const StateSet& t : targets) {
            bool meets = false;
            for (std::uint32_t s : mec)
                if (t[s]) meets = true;
            if (!meets) good = false;
        }
        if (good)
            for (std::uint32_t s : mec) w[s] = 1;
    }
    return w;
}

/// States of end components avoiding some target entirely (the complement
/// behavior of a generalized Buechi objective).
inline StateSet oracle_buchi_escape_states(const SupportMdp& m,
                                           const std::vector<StateSet>& targets) {
    StateSet w(m.size(), 0);
    for (const StateSet& t : targets) {
        StateSet scope(m.size(), 0);
        for (std::uint32_t s = 0; s < m.size(); ++s) scope[s] = !t[s];
        for (const auto& mec : oracle_mecs(m, scope))
            for (std::uint32_t s : mec) w[s] = 1;
    }
    return w;
}

inline bool oracle_buchi(const SupportMdp& m, std::uint32_t start,
                         const std::vector<StateSet>& targets, Threshold th) {
    switch (th) {
        case Threshold::One:
            return oracle_almost_sure_reach_set(m, oracle_good_buchi_states(m, targets))[start];
        case Threshold::Positive:
            return oracle_reach_positive(m, start, oracle_good_buchi_states(m, targets));
        case Threshold::Zero:
            return oracle_almost_sure_reach_set(m, oracle_buchi_escape_states(m, targets))[start];
        case Threshold::LessThanOne:
            return oracle_reach_positive(m, start, oracle_buchi_escape_states(m, targets));
    }
    return false;
}

/// States of "winning" sub end components for a Streett condition: every pair
/// is either not touched on the A side or visited on the B side. Recursive
/// decomposition, removing offending A_i states.
inline StateSet oracle_streett_winning_states(
    const SupportMdp& m, const std::vector<std::pair<StateSet, StateSet>>& pairs) {
    StateSet w(m.size(), 0);
    std::vector<StateSet> scopes;
    scopes.emplace_back(m.size(), 1);
    while (!scopes.empty()) {
        StateSet scope = std::move(scopes.back());
        scopes.pop_back();
        for (const auto& mec : oracle_mecs(m, scope)) {
            std::vector<std::size_t> violated;
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                bool meets_a = false, meets_b = false;
                for (std::uint32_t s : mec) {
                    if (pairs[i].first[s]) meets_a = true;
                    if (pairs[i].second[s]) meets_b = true;
                }
                if (meets_a && !meets_b) violated.push_back(i);
            }
            if (violated.empty()) {
                for (std::uint32_t s : mec) w[s] = 1;
            } else {
                StateSet inner(m.size(), 0);
                std::size_t left = 0;
                for (std::uint32_t s : mec) {
                    bool drop = false;
                    for (std::size_t i : violated)
                        if (pairs[i].first[s]) drop = true;
                    if (!drop) {
                        inner[s] = 1;
                        ++left;
                    }
                }
                if (left > 0) scopes.push_back(std::move(inner));
            }
        }
    }
    return w;
}

/// States of end components witnessing the negation of a Streett condition:
/// some pair with A_i visited and B_i avoided entirely.
inline StateSet oracle_streett_rabin_states(
    const SupportMdp& m, const std::vector<std::pair<StateSet, StateSet>>& pairs) {
    StateSet w(m.size(), 0);
    for (const auto& [a, b] : pairs) {
        StateSet scope(m.size(), 0);
        for (std::uint32_t s = 0; s < m.size(); ++s) scope[s] = !b[s];
        for (const auto& mec : oracle_mecs(m, scope)) {
            bool meets_a = false;
            for (std::uint32_t s : mec)
                if (a[s]) meets_a = true;
            if (meets_a)
                for (std::uint32_t s : mec) w[s] = 1;
        }
    }
    return w;
}

inline bool oracle_streett(const SupportMdp& m, std::uint32_t start,
                           const std::vector<std::pair<StateSet, StateSet>>& pairs,
                           Threshold th) {
    switch (th) {
        case Threshold::One:
            return oracle_almost_sure_reach_set(m, oracle_streett_winning_states(m, pairs))[start];
        case Threshold::Positive:
            return oracle_reach_positive(m, start, oracle_streett_winning_states(m, pairs));
        case Threshold::Zero:
            return oracle_almost_sure_reach_set(m, oracle_streett_rabin_states(m, pairs))[start];
        case Threshold::LessThanOne:
            return oracle_reach_positive(m, start, oracle_streett_rabin_states(m, pairs));
    }
    return false;
}

/// Conjunction of eventualities, answered on the product with a visited-set
/// automaton so that it reduces to reachability of the all-visited layer.
inline bool oracle_eventuality(const SupportMdp& m, std::uint32_t start,
                               const std::vector<StateSet>& targets, Threshold th) {
    const std::size_t n = targets.size();
    const std::uint32_t full = (1u << n) - 1;
    auto bits = [&](std::uint32_t s) {
        std::uint32_t b = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (targets[i][s]) b |= 1u << i;
        return b;
    };
    // product state (s, mask) interned on the fly
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> index;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> states;
    SupportMdp prod;
    std::queue<std::uint32_t> work;
    auto intern = [&](std::uint32_t s, std::uint32_t mask) {
        auto key = std::make_pair(s, mask);
        if (auto it = index.find(key); it != index.end()) return it->second;
        std::uint32_t id = static_cast<std::uint32_t>(states.size());
        index.emplace(key, id);
        states.push_back(key);
        work.push(id);
        return id;
    };
    std::uint32_t root = intern(start, bits(start));
    while (!work.empty()) {
        std::uint32_t id = work.front();
        work.pop();
        auto [s, mask] = states[id];
        prod.act.resize(states.size());
        std::vector<std::vector<std::uint32_t>> acts;
        for (const auto& a : m.act[s]) {
            std::vector<std::uint32_t> succ;
            for (std::uint32_t t : a) succ.push_back(intern(t, mask | bits(t)));
            std::sort(succ.begin(), succ.end());
            succ.erase(std::unique(succ.begin(), succ.end()), succ.end());
            acts.push_back(std::move(succ));
        }
        prod.act.resize(states.size());
        prod.act[id] = std::move(acts);
    }
    prod.act.resize(states.size());
    StateSet done(states.size(), 0);
    for (std::uint32_t i = 0; i < states.size(); ++i)
        if (states[i].second == full) done[i] = 1;
    switch (th) {
        case Threshold::One:
            return oracle_almost_sure_reach_set(prod, done)[root];
        case Threshold::Positive:
            return oracle_reach_positive(prod, root, done);
        case Threshold::Zero:
            return oracle_sure_avoid_set(prod, done)[root];
        case Threshold::LessThanOne:
            return oracle_reach_lt1(prod, root, done);
    }
    return false;
}

// ---------------------------------------------------------------------------
// Entry point used by the differential tests

/// Exact qualitative answer on the finite fragment, or nullopt when the
/// reachable space exceeds `cap`. Over finite MDPs, finite-memory and general
/// schedulers achieve the same qualitative objectives, so one answer serves
/// both classes.
inline std::optional<bool> oracle_qualitative(const Nplcs& n, const Config& start,
                                              const Query& query, std::size_t cap = 10000) {
    auto explored = explore(n, start, cap);
    if (std::holds_alternative<Exceeded>(explored)) return std::nullopt;
    const FiniteMdp& mdp = std::get<FiniteMdp>(explored);
    SupportMdp m = support_of(mdp);
    std::uint32_t root = mdp.index.at(start);
    switch (query.kind) {
        case QueryKind::Eventuality: {
            std::vector<StateSet> targets;
            for (const LocSet& a : query.targets) targets.push_back(lift_locations(mdp, a));
            return oracle_eventuality(m, root, targets, query.threshold);
        }
        case QueryKind::Buchi: {
            std::vector<StateSet> targets;
            for (const LocSet& a : query.targets) targets.push_back(lift_locations(mdp, a));
            return oracle_buchi(m, root, targets, query.threshold);
        }
        case QueryKind::Streett: {
            std::vector<std::pair<StateSet, StateSet>> pairs;
            for (const auto& [a, b] : query.pairs)
                pairs.emplace_back(lift_locations(mdp, a), lift_locations(mdp, b));
            return oracle_streett(m, root, pairs, query.threshold);
        }
    }
    return std::nullopt;
}

/// Sound one-sided reachability check: explore with sends blocked once a
/// channel holds `capacity` messages. Any path found is a path of the full
/// system; Unknown carries no information.
enum class BoundedAnswer { Yes, Unknown };

inline BoundedAnswer bounded_positive_reach(const Lcs& lcs, const Config& start, const LocSet& a,
                                            std::size_t capacity, std::size_t cap = 200000) {
    std::set<Config> seen;
    std::queue<Config> q;
    auto push = [&](const Config& s) {
        if (seen.count(s) || seen.size() >= cap) return;
        seen.insert(s);
        q.push(s);
    };
    push(start);
    while (!q.empty()) {
        Config s = q.front();
        q.pop();
        if (a.count(s.location)) return BoundedAnswer::Yes;
        for (RuleId r : enabled_rules(lcs, s)) {
            const TransitionRule& rule = lcs.rule(r);
            if (rule.op.kind == OpKind::Send &&
                s.contents[rule.op.channel].size() >= capacity)
                continue;
            for (const Config& t : lossy_successors(lcs, s, r)) push(t);
        }
    }
    return BoundedAnswer::Unknown;
}

// ---------------------------------------------------------------------------
// Random model generation for differential and algebraic tests

enum class ModelProfile {
    FiniteOnly,    // control flow forms a DAG plus internal/receive self-loops,
                   // so runs send boundedly many messages
    Unrestricted,  // arbitrary shape; reachable space may be infinite
};

inline Lcs random_lcs(std::mt19937& rng, ModelProfile profile, std::size_t max_locations = 6,
                      std::size_t max_messages = 3) {
    std::size_t n = 2 + rng() % (max_locations - 1);
    std::size_t msgs = 1 + rng() % max_messages;
    LcsSpec spec;
    for (std::size_t i = 0; i < n; ++i) spec.locations.push_back("q" + std::to_string(i));
    spec.channels = {"c"};
    for (std::size_t m = 0; m < msgs; ++m) spec.messages.push_back(std::string(1, char('a' + m)));
    for (std::size_t i = 0; i < n; ++i) {
        bool has_non_recv = false;
        std::size_t edges = 1 + rng() % 3;
        for (std::size_t e = 0; e < edges; ++e) {
            RuleSpec r;
            r.source = spec.locations[i];
            unsigned kind = rng() % 3;
            std::size_t j;
            if (profile == ModelProfile::FiniteOnly) {
                if (kind == 0 && i + 1 < n) {
                    j = i + 1 + rng() % (n - i - 1);  // sends go strictly forward
                } else if (kind == 0) {
                    kind = 2;
                    j = i;
                } else {
                    j = i + rng() % (n - i);  // receives and internals: forward or self
                }
            } else {
                j = rng() % n;
            }
            r.target = spec.locations[j];
            if (kind == 0) {
                r.kind = OpKind::Send;
                r.channel = "c";
                r.message = spec.messages[rng() % msgs];
                has_non_recv = true;
            } else if (kind == 1) {
                r.kind = OpKind::Recv;
                r.channel = "c";
                r.message = spec.messages[rng() % msgs];
            } else {
                r.kind = OpKind::Internal;
                has_non_recv = true;
            }
            spec.rules.push_back(r);
        }
        if (!has_non_recv)
            spec.rules.push_back({spec.locations[i], spec.locations[i], OpKind::Internal, "", ""});
    }
    return Lcs::build(spec);
}

inline LocSet random_loc_set(std::mt19937& rng, const Lcs& lcs, bool allow_empty = true) {
    LocSet s;
    for (LocId q = 0; q < lcs.location_count(); ++q)
        if (rng() % 3 == 0) s.insert(q);
    if (!allow_empty && s.empty()) s.insert(LocId(rng() % lcs.location_count()));
    return s;
}

}  // namespace nplcs
