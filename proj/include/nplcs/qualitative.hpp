#pragma once

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nplcs/fixpoints.hpp"

namespace nplcs {

enum class QueryKind { Eventuality, Buchi, Streett };
enum class Threshold { One, Zero, LessThanOne, Positive };
enum class SchedClass { All, FiniteMemory };

inline std::string threshold_text(Threshold t) {
    switch (t) {
        case Threshold::One: return "=1";
        case Threshold::Zero: return "=0";
        case Threshold::LessThanOne: return "<1";
        case Threshold::Positive: return ">0";
    }
    return "?";
}

inline std::string sched_class_text(SchedClass c) {
    return c == SchedClass::All ? "all" : "fm";
}

struct Query {
    QueryKind kind = QueryKind::Eventuality;
    Threshold threshold = Threshold::One;
    SchedClass sched_class = SchedClass::All;
    LocId start = 0;  // channels start empty
    std::vector<LocSet> targets;                   // Eventuality / Buchi
    std::vector<std::pair<LocSet, LocSet>> pairs;  // Streett
};

struct Verdict {
    enum class Answer { Yes, No, Undecidable };
    Answer answer = Answer::No;
    std::string citation;
    // named location sets an auditor can replay the membership test against
    std::vector<std::pair<std::string, std::vector<std::string>>> certificate;
    std::vector<std::pair<std::string, std::string>> notes;
    std::optional<std::string> witness_id;

    bool yes() const { return answer == Answer::Yes; }
};

namespace detail {

inline std::string set_text(const Lcs& lcs, const LocSet& s) {
    std::string out = "{";
    bool first = true;
    for (LocId q : s) {
        if (!first) out += ",";
        out += lcs.location_name(q);
        first = false;
    }
    return out + "}";
}

inline void cert_set(Verdict& v, const Lcs& lcs, const std::string& name, const LocSet& s) {
    v.certificate.emplace_back(name, loc_names(lcs, s));
}

inline Verdict answer(bool yes, std::string citation) {
    Verdict v;
    v.answer = yes ? Verdict::Answer::Yes : Verdict::Answer::No;
    v.citation = std::move(citation);
    return v;
}

inline Verdict undecidable(std::string citation) {
    Verdict v;
    v.answer = Verdict::Answer::Undecidable;
    v.citation = std::move(citation);
    return v;
}

/// Product with a visited-subset automaton: locations (p, S) where S collects
/// the target indices seen so far, restricted to control-graph reachable
/// pairs from (q, S0).
struct SubsetProduct {
    Lcs lcs;
    LocId start = 0;
    LocSet completed;  // locations whose subset component is full
};

inline SubsetProduct subset_product(const Lcs& lcs, LocId q, const std::vector<LocSet>& targets) {
    const std::size_t n = targets.size();
    const std::uint32_t full = n == 32 ? ~0u : (1u << n) - 1;
    auto bits = [&](LocId p) {
        std::uint32_t b = 0;
        for (std::size_t i = 0; i < n; ++i)
            if (targets[i].count(p)) b |= 1u << i;
        return b;
    };
    auto name = [&](LocId p, std::uint32_t mask) {
        return lcs.location_name(p) + "#" + std::to_string(mask);
    };
    std::uint32_t start_mask = bits(q);
    std::set<std::pair<LocId, std::uint32_t>> seen{{q, start_mask}};
    std::vector<std::pair<LocId, std::uint32_t>> order{{q, start_mask}};
    LcsSpec spec;
    spec.channels = lcs.channel_names();
    spec.messages = lcs.message_names();
    for (std::size_t i = 0; i < order.size(); ++i) {
        auto [p, mask] = order[i];
        for (RuleId r : lcs.rules_from(p)) {
            const TransitionRule& rule = lcs.rule(r);
            std::uint32_t next = mask | bits(rule.target);
            if (seen.insert({rule.target, next}).second) order.push_back({rule.target, next});
            RuleSpec rs;
            rs.source = name(p, mask);
            rs.target = name(rule.target, next);
            rs.kind = rule.op.kind;
            if (rule.op.kind != OpKind::Internal) {
                rs.channel = lcs.channel_name(rule.op.channel);
                rs.message = lcs.message_name(rule.op.message);
            }
            spec.rules.push_back(rs);
        }
    }
    for (auto [p, mask] : order) spec.locations.push_back(name(p, mask));
    SubsetProduct out{Lcs::build(spec), 0, {}};
    out.start = out.lcs.require_location(name(q, start_mask));
    for (auto [p, mask] : order)
        if (mask == full) out.completed.insert(out.lcs.require_location(name(p, mask)));
    return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Generalized eventuality

/// Pr > 0: control-state reachability on the subset-tracking product.
inline Verdict eventually_pos(const Lcs& lcs, LocId q, const std::vector<LocSet>& targets,
                              std::size_t bound = kDefaultTargetBound) {
    if (targets.size() > bound) throw TooManyTargetsError("too many eventuality targets");
    detail::SubsetProduct prod = detail::subset_product(lcs, q, targets);
    bool yes = !prod.completed.empty() && control_reach(prod.lcs, prod.start, prod.completed);
    Verdict v = detail::answer(yes, "eventuality-positive-product-reachability");
    v.notes.emplace_back("scheduler", "finite-memory suffices; memoryless on the product");
    v.notes.emplace_back("product-locations", std::to_string(prod.lcs.location_count()));
    return v;
}

/// Pr = 0: membership in some Safe(complement of A_i).
inline Verdict eventually_zero(const Lcs& lcs, LocId q, const std::vector<LocSet>& targets) {
    Verdict v = detail::answer(false, "eventuality-zero-safe-union");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        LocSet s = safe(lcs, complement(lcs, targets[i]));
        if (s.count(q)) v.answer = Verdict::Answer::Yes;
        detail::cert_set(v, lcs, "safe_not_a" + std::to_string(i + 1), s);
    }
    v.notes.emplace_back("scheduler", "blind memoryless suffices");
    return v;
}

/// Pr < 1: constrained reachability of Safe(B_i) inside B_i = complement A_i.
inline Verdict eventually_lt1(const Lcs& lcs, LocId q, const std::vector<LocSet>& targets) {
    Verdict v = detail::answer(false, "eventuality-lt1-constrained-safe-reachability");
    Config start = Config::at(q, lcs.channel_count());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        LocSet b = complement(lcs, targets[i]);
        LocSet s = safe(lcs, b);
        ReachQuery rq{UpSet::from_locations(lcs, s), b, ReachMode::Closed};
        if (reaches(lcs, start, rq)) v.answer = Verdict::Answer::Yes;
        detail::cert_set(v, lcs, "safe_b" + std::to_string(i + 1), s);
    }
    v.notes.emplace_back("scheduler", "almost-blind memoryless suffices");
    return v;
}

/// Pr = 1: membership in the nested eventuality set for the full index set.
inline Verdict eventually_as(const Lcs& lcs, LocId q, const std::vector<LocSet>& targets,
                             std::size_t bound = kDefaultTargetBound) {
    auto table = eventuality_sets(lcs, targets, bound);
    const std::uint32_t full = (1u << targets.size()) - 1;
    const LocSet& x = table.at(full);
    Verdict v = detail::answer(x.count(q) != 0, "eventuality-as-nested-prom");
    detail::cert_set(v, lcs, "x_full", x);
    v.notes.emplace_back("scheduler", "finite-memory suffices");
    if (v.yes()) {
        std::string id = "chain:";
        for (std::size_t i = 0; i < targets.size(); ++i)
            id += (i ? ";" : "") + detail::set_text(lcs, targets[i]);
        v.witness_id = id;
    }
    return v;
}

// ---------------------------------------------------------------------------
// Generalized Buechi

/// Pr = 1: membership in the almost-sure repeated-reachability core.
inline Verdict buchi_as(const Lcs& lcs, LocId q, const std::vector<LocSet>& targets) {
    LocSet y = almost_sure_buchi(lcs, targets);
    Verdict v = detail::answer(y.count(q) != 0, "buchi-as-safe-prom-fixpoint");
    detail::cert_set(v, lcs, "core", y);
    v.notes.emplace_back("scheduler", "finite-memory suffices");
    if (v.yes()) {
        std::string id = "roundrobin:";
        for (std::size_t i = 0; i < targets.size(); ++i)
            id += (i ? ";" : "") + detail::set_text(lcs, targets[i]);
        v.witness_id = id;
    }
    return v;
}

/// Pr = 0: almost-sure reachability of the union of Safe(complement A_i).
inline Verdict buchi_zero(const Lcs& lcs, LocId q, const std::vector<LocSet>& targets) {
    LocSet safes;
    Verdict v = detail::answer(false, "buchi-zero-prom-of-safe-union");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        LocSet s = safe(lcs, complement(lcs, targets[i]));
        detail::cert_set(v, lcs, "safe_not_a" + std::to_string(i + 1), s);
        safes = set_union(safes, s);
    }
    LocSet p = prom(lcs, safes);
    if (p.count(q)) v.answer = Verdict::Answer::Yes;
    detail::cert_set(v, lcs, "prom_of_union", p);
    v.notes.emplace_back("scheduler", "almost-blind memoryless suffices");
    return v;
}

/// Pr < 1: plain reachability of some Safe(complement A_i).
inline Verdict buchi_lt1(const Lcs& lcs, LocId q, const std::vector<LocSet>& targets) {
    Verdict v = detail::answer(false, "buchi-lt1-safe-reachability");
    for (std::size_t i = 0; i < targets.size(); ++i) {
        LocSet s = safe(lcs, complement(lcs, targets[i]));
        if (control_reach(lcs, q, s)) v.answer = Verdict::Answer::Yes;
        detail::cert_set(v, lcs, "safe_not_a" + std::to_string(i + 1), s);
    }
    v.notes.emplace_back("scheduler", "almost-blind finite-memory suffices");
    return v;
}

/// Pr > 0: undecidable for unrestricted schedulers; for finite-memory ones,
/// reachability of the almost-sure core with an empty channel.
inline Verdict buchi_pos(const Lcs& lcs, LocId q, const std::vector<LocSet>& targets,
                         SchedClass sched_class) {
    if (sched_class == SchedClass::All)
        return detail::undecidable("buchi-positive-unrestricted-schedulers-undecidable");
    LocSet y = almost_sure_buchi(lcs, targets);
    bool yes = reach_with_empty(lcs, q, y);
    Verdict v = detail::answer(yes, "buchi-positive-fm-core-reachability");
    detail::cert_set(v, lcs, "core", y);
    return v;
}

// ---------------------------------------------------------------------------
// Streett conditions, finite-memory schedulers

inline Verdict streett_fm(const Lcs& lcs, LocId q,
                          const std::vector<std::pair<LocSet, LocSet>>& pairs, Threshold threshold,
                          SchedClass sched_class, std::size_t bound = kDefaultTargetBound) {
    if (sched_class == SchedClass::All)
        return detail::undecidable("streett-unrestricted-schedulers-undecidable");
    if (pairs.size() > bound) throw TooManyTargetsError("too many Streett pairs");
    switch (threshold) {
        case Threshold::LessThanOne: {
            Verdict v = detail::answer(false, "streett-fm-lt1-positive-sets");
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                LocSet p = streett_positive_set(lcs, pairs[i].first, pairs[i].second);
                if (control_reach(lcs, q, p)) v.answer = Verdict::Answer::Yes;
                detail::cert_set(v, lcs, "p" + std::to_string(i + 1), p);
            }
            return v;
        }
        case Threshold::Positive: {
            StreettCore core = streett_core_sets(lcs, pairs, bound);
            Verdict v = detail::answer(control_reach(lcs, q, core.united),
                                       "streett-fm-positive-core-reachability");
            detail::cert_set(v, lcs, "c", core.united);
            return v;
        }
        case Threshold::One: {
            StreettCore core = streett_core_sets(lcs, pairs, bound);
            LocSet p = prom(lcs, core.united);
            Verdict v = detail::answer(p.count(q) != 0, "streett-fm-as-prom-of-core");
            detail::cert_set(v, lcs, "c", core.united);
            detail::cert_set(v, lcs, "prom_c", p);
            return v;
        }
        case Threshold::Zero: {
            // per pair: the almost-sure repeated-A_i set on the system with
            // B_i removed, then almost-sure reachability of their union
            LocSet d;
            Verdict v = detail::answer(false, "streett-fm-zero-union-cores");
            for (std::size_t i = 0; i < pairs.size(); ++i) {
                LocSet di;
                if (pairs[i].second.size() < lcs.location_count()) {
                    Lcs sub = restrict_with_fail(lcs, pairs[i].second);
                    di = transfer_locs(
                        sub, almost_sure_buchi(sub, {transfer_locs(lcs, pairs[i].first, sub)}),
                        lcs);
                }
                detail::cert_set(v, lcs, "d" + std::to_string(i + 1), di);
                d = set_union(d, di);
            }
            LocSet p = prom(lcs, d);
            if (p.count(q)) v.answer = Verdict::Answer::Yes;
            detail::cert_set(v, lcs, "prom_d", p);
            return v;
        }
    }
    return detail::answer(false, "unreachable");
}

// ---------------------------------------------------------------------------
// Dispatch

inline Verdict decide_query(const Lcs& lcs, const Query& query,
                            std::size_t bound = kDefaultTargetBound) {
    Verdict v;
    switch (query.kind) {
        case QueryKind::Eventuality:
            switch (query.threshold) {
                case Threshold::Positive: v = eventually_pos(lcs, query.start, query.targets, bound); break;
                case Threshold::Zero: v = eventually_zero(lcs, query.start, query.targets); break;
                case Threshold::LessThanOne: v = eventually_lt1(lcs, query.start, query.targets); break;
                case Threshold::One: v = eventually_as(lcs, query.start, query.targets, bound); break;
            }
            break;
        case QueryKind::Buchi:
            switch (query.threshold) {
                case Threshold::One: v = buchi_as(lcs, query.start, query.targets); break;
                case Threshold::Zero: v = buchi_zero(lcs, query.start, query.targets); break;
                case Threshold::LessThanOne: v = buchi_lt1(lcs, query.start, query.targets); break;
                case Threshold::Positive:
                    v = buchi_pos(lcs, query.start, query.targets, query.sched_class);
                    break;
            }
            break;
        case QueryKind::Streett:
            v = streett_fm(lcs, query.start, query.pairs, query.threshold, query.sched_class,
                           bound);
            break;
    }
    return v;
}

}  // namespace nplcs
