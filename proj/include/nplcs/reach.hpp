#pragma once

#include <cstdlib>
#include <deque>
#include <iostream>
#include <map>
#include <optional>
#include <set>

#include "nplcs/upsets.hpp"

namespace nplcs {

enum class ReachMode { Closed, HalfOpen, Free };

struct ReachQuery {
    UpSet target;
    LocSet allowed;  // the constraint set X; ignored in Free mode
    ReachMode mode = ReachMode::Free;
};

struct SaturationOptions {
    enum class Order { Fifo, Lifo };
    Order order = Order::Fifo;
    std::size_t max_generators = 1'000'000;
    bool record_parents = false;
};

/// Per-generator provenance: the rule fired from this configuration and the
/// intended successor. Seeds carry no parent.
struct ParentEntry {
    std::optional<RuleId> rule;
    std::optional<Config> next;
};

struct SaturationResult {
    UpSet set;
    std::map<Config, ParentEntry> table;  // every generator ever created
    std::size_t rounds = 0;
};

inline bool saturation_trace_enabled() {
    static const bool on = [] {
        const char* v = std::getenv("NPLCS_LOG");
        return v != nullptr && *v != '\0';
    }();
    return on;
}

/// Least fixed point of U |-> U u pre(U) restricted to rules whose source lies
/// in `allowed`. The result is exactly { s : s ->*_[allowed) [[target]] }.
/// Termination is guaranteed by the well-quasi-order; max_generators is a
/// safety valve only.
inline SaturationResult saturate(const Lcs& lcs, const UpSet& target, const LocSet& allowed,
                                 const SaturationOptions& opts = {}) {
    SaturationResult res;
    res.set = UpSet(lcs.channel_count());
    std::deque<Config> work;
    std::size_t created = 0;

    auto add = [&](const Config& g, std::optional<RuleId> rule, const Config* parent) {
        if (res.table.count(g)) return;           // fused: first creation wins
        if (!res.set.insert_minimized(g)) return;  // dominated
        if (++created > opts.max_generators)
            throw TooLargeError("saturation exceeded the generator cap");
        ParentEntry e;
        e.rule = rule;
        if (parent) e.next = *parent;
        res.table.emplace(g, std::move(e));
        work.push_back(g);
    };

    for (const Config& g : target.generators()) add(g, std::nullopt, nullptr);

    std::size_t frontier = work.size();
    std::size_t added_this_round = 0;
    while (!work.empty()) {
        Config g;
        if (opts.order == SaturationOptions::Order::Fifo) {
            g = work.front();
            work.pop_front();
        } else {
            g = work.back();
            work.pop_back();
        }
        if (opts.order == SaturationOptions::Order::Fifo && frontier-- == 0) {
            ++res.rounds;
            if (saturation_trace_enabled())
                std::cerr << "[nplcs] saturation round " << res.rounds << ": +" << added_this_round
                          << " generators\n";
            frontier = work.size();
            added_this_round = 0;
        }
        if (!res.set.is_generator(g)) continue;  // dominated since queued
        std::size_t before = created;
        for (RuleId r : lcs.rules_into(g.location)) {
            if (!allowed.count(lcs.rule(r).source)) continue;
            UpSet pre = pre_rule(lcs, UpSet::from_generators(lcs.channel_count(), {g}), r);
            for (const Config& p : pre.generators()) add(p, r, &g);
        }
        added_this_round += created - before;
    }
    if (!opts.record_parents) res.table.clear();
    return res;
}

/// Backward reachability: the set of configurations that can reach [[target]]
/// while every location strictly before the final one lies in `allowed`.
inline UpSet backward_reach(const Lcs& lcs, const UpSet& target, const LocSet& allowed) {
    return saturate(lcs, target, allowed).set;
}

inline UpSet drop_generators_outside(const UpSet& u, const LocSet& keep) {
    UpSet out(u.channel_count());
    for (const Config& g : u.generators())
        if (keep.count(g.location)) out.insert_minimized(g);
    return out;
}

/// One unconstrained pre step: { s : s -> [[u]] }.
inline UpSet pre_step(const Lcs& lcs, const UpSet& u) {
    UpSet out(lcs.channel_count());
    for (RuleId r = 0; r < lcs.rules().size(); ++r) out = set_union(out, pre_rule(lcs, u, r));
    return out;
}

/// Constrained reachability of [[q.target]] from s.
///   Closed   ([X]): every visited location, endpoints included, lies in X.
///   HalfOpen ([X)): the constraint is waived on the final configuration;
///                   decided via "s = t, or s ->*_[X] s' and s' -> t".
///   Free          : no constraint.
inline bool reaches(const Lcs& lcs, const Config& s, const ReachQuery& q) {
    switch (q.mode) {
        case ReachMode::Free:
            return backward_reach(lcs, q.target, lcs.all_locations()).contains(s);
        case ReachMode::Closed: {
            if (!q.allowed.count(s.location)) return false;
            UpSet seeds = drop_generators_outside(q.target, q.allowed);
            return backward_reach(lcs, seeds, q.allowed).contains(s);
        }
        case ReachMode::HalfOpen: {
            if (q.target.contains(s)) return true;
            if (!q.allowed.count(s.location)) return false;
            UpSet one = drop_generators_outside(pre_step(lcs, q.target), q.allowed);
            return backward_reach(lcs, one, q.allowed).contains(s);
        }
    }
    return false;
}

/// Control-state reachability: (q, eps) ->* some location of A.
inline bool control_reach(const Lcs& lcs, LocId q, const LocSet& a) {
    if (a.count(q)) return true;
    UpSet target = UpSet::from_locations(lcs, a);
    return backward_reach(lcs, target, lcs.all_locations())
        .contains(Config::at(q, lcs.channel_count()));
}

/// (q, eps) ->* (x, eps) for some x in A. Losing every message in the final
/// step makes this coincide with plain control reachability.
inline bool reach_with_empty(const Lcs& lcs, LocId q, const LocSet& a) {
    return control_reach(lcs, q, a);
}

}  // namespace nplcs
