#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "nplcs/reach.hpp"

namespace nplcs {

struct TooManyTargetsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr std::size_t kDefaultTargetBound = 10;

/// Largest X subseteq A such that every x in X has a non-receive rule into X:
/// restrict the control graph to A, delete receive edges, then repeatedly
/// delete nodes without outgoing edges.
inline LocSet safe(const Lcs& lcs, const LocSet& a) {
    LocSet x = a;
    bool changed = true;
    while (changed) {
        changed = false;
        LocSet keep;
        for (LocId q : x) {
            bool has_edge = false;
            for (RuleId r : lcs.rules_from(q)) {
                const TransitionRule& rule = lcs.rule(r);
                if (!rule.op.is_receive() && x.count(rule.target)) {
                    has_edge = true;
                    break;
                }
            }
            if (has_edge) keep.insert(q);
        }
        if (keep != x) {
            x = keep;
            changed = true;
        }
    }
    return x;
}

/// For x in Safe(A), a fixed non-receive rule staying inside Safe(A); the
/// lowest rule index is the canonical choice.
inline std::map<LocId, RuleId> safe_rules(const Lcs& lcs, const LocSet& safe_set) {
    std::map<LocId, RuleId> out;
    for (LocId q : safe_set)
        for (RuleId r : lcs.rules_from(q)) {
            const TransitionRule& rule = lcs.rule(r);
            if (!rule.op.is_receive() && safe_set.count(rule.target)) {
                out.emplace(q, r);
                break;
            }
        }
    return out;
}

/// Largest X such that (x,eps) ->*_[X) A for every x in X, computed as a
/// greatest fixed point. One backward saturation per refinement round answers
/// the constrained reachability question for all locations at once.
inline LocSet prom(const Lcs& lcs, const LocSet& a) {
    if (a.empty()) return {};
    LocSet x = lcs.all_locations();
    for (;;) {
        UpSet reach = backward_reach(lcs, UpSet::from_locations(lcs, a), x);
        LocSet next;
        for (LocId q : x)
            if (reach.contains(Config::at(q, lcs.channel_count()))) next.insert(q);
        if (next == x) return x;
        x = next;
    }
}

/// Locations from which some scheduler achieves all Buechi targets almost
/// surely: greatest fixed point of Y |-> intersect_i Safe(Prom(A_i n Y)).
/// The refinement keeps target visits inside Y, which the plain intersection
/// of Safe(Prom(A_i)) values misses when the targets interact.
inline LocSet almost_sure_buchi(const Lcs& lcs, const std::vector<LocSet>& targets) {
    LocSet y = lcs.all_locations();
    for (;;) {
        LocSet next = y;
        for (const LocSet& a : targets) {
            next = set_intersect(next, safe(lcs, prom(lcs, set_intersect(a, y))));
            if (next.empty()) break;
        }
        if (next == y) return y;
        y = next;
    }
}

/// The nested eventuality sets: X_emptyset = Q and
/// X_I = union_{i in I} Prom(A_i n X_{I \ {i}}), keyed by index bitmask.
inline std::map<std::uint32_t, LocSet> eventuality_sets(
    const Lcs& lcs, const std::vector<LocSet>& targets,
    std::size_t bound = kDefaultTargetBound) {
    const std::size_t n = targets.size();
    if (n > bound) throw TooManyTargetsError("too many eventuality targets");
    std::map<std::uint32_t, LocSet> table;
    table[0] = lcs.all_locations();
    std::vector<std::uint32_t> masks;
    for (std::uint32_t m = 1; m < (1u << n); ++m) masks.push_back(m);
    std::sort(masks.begin(), masks.end(), [](std::uint32_t a, std::uint32_t b) {
        int pa = __builtin_popcount(a), pb = __builtin_popcount(b);
        return pa != pb ? pa < pb : a < b;
    });
    for (std::uint32_t mask : masks) {
        LocSet x;
        for (std::size_t i = 0; i < n; ++i)
            if (mask & (1u << i)) {
                LocSet inner = set_intersect(targets[i], table.at(mask & ~(1u << i)));
                x = set_union(x, prom(lcs, inner));
            }
        table[mask] = std::move(x);
    }
    return table;
}

struct StreettCore {
    LocSet united;                             // C = union of all C_I
    std::map<std::uint32_t, LocSet> per_subset;  // C_I keyed by index bitmask
};

/// Name restrict_with_fail will pick for the fail location.
inline std::string fresh_fail_name(const Lcs& lcs, const LocSet& removed) {
    std::string fail = "fail";
    while (lcs.find_location(fail) && !removed.count(*lcs.find_location(fail))) fail += "_";
    return fail;
}

/// The sets C_I of the finite-memory Streett analysis: on the system with all
/// A_i (i not in I) removed, the locations from which the Buechi targets
/// {B_i}_{i in I} are all achievable almost surely. C_emptyset is the set of
/// locations that can avoid every A_i forever.
inline StreettCore streett_core_sets(const Lcs& lcs,
                                     const std::vector<std::pair<LocSet, LocSet>>& pairs,
                                     std::size_t bound = kDefaultTargetBound) {
    const std::size_t n = pairs.size();
    if (n > bound) throw TooManyTargetsError("too many Streett pairs");
    StreettCore core;
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        LocSet removal;
        for (std::size_t i = 0; i < n; ++i)
            if (!(mask & (1u << i))) removal = set_union(removal, pairs[i].first);
        LocSet c;
        if (removal.size() >= lcs.location_count()) {
            // every location is excluded; nothing can satisfy the avoidance part
        } else {
            Lcs sub = restrict_with_fail(lcs, removal);
            LocId fail_like = sub.require_location(fresh_fail_name(lcs, removal));
            LocSet survivors = sub.all_locations();
            survivors.erase(fail_like);
            if (mask == 0) {
                c = transfer_locs(sub, safe(sub, survivors), lcs);
            } else {
                std::vector<LocSet> subtargets;
                for (std::size_t i = 0; i < n; ++i)
                    if (mask & (1u << i))
                        subtargets.push_back(transfer_locs(lcs, pairs[i].second, sub));
                c = transfer_locs(sub, almost_sure_buchi(sub, subtargets), lcs);
            }
        }
        core.united = set_union(core.united, c);
        core.per_subset[mask] = std::move(c);
    }
    return core;
}

/// The set P of the Streett <1 analysis: on the system with B removed, the
/// locations from which infinitely many A-visits have positive probability
/// under some finite-memory scheduler.
inline LocSet streett_positive_set(const Lcs& lcs, const LocSet& a, const LocSet& b) {
    if (b.size() >= lcs.location_count()) return {};
    Lcs sub = restrict_with_fail(lcs, b);
    LocSet core = almost_sure_buchi(sub, {transfer_locs(lcs, a, sub)});
    LocSet p;
    for (LocId q = 0; q < sub.location_count(); ++q)
        if (control_reach(sub, q, core)) p.insert(q);
    p.erase(sub.require_location(fresh_fail_name(lcs, b)));
    return transfer_locs(sub, p, lcs);
}

}  // namespace nplcs
