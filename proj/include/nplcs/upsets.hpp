#pragma once

#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "nplcs/model.hpp"

namespace nplcs {

/// Upward-closed set of configurations, represented by the finite antichain of
/// its minimal elements. Generators are bucketed by location and kept sorted,
/// so equal sets have identical representations.
class UpSet {
  public:
    UpSet() = default;
    explicit UpSet(std::size_t channels) : channels_(channels) {}

    static UpSet from_locations(const Lcs& lcs, const LocSet& a) {
        UpSet u(lcs.channel_count());
        for (LocId q : a) u.buckets_[q] = {std::vector<Word>(lcs.channel_count())};
        return u;
    }

    static UpSet from_generators(std::size_t channels, const std::vector<Config>& gens) {
        UpSet u(channels);
        for (const Config& g : gens) u.insert_minimized(g);
        return u;
    }

    bool empty() const { return buckets_.empty(); }
    std::size_t channel_count() const { return channels_; }

    std::size_t generator_count() const {
        std::size_t n = 0;
        for (const auto& [q, bucket] : buckets_) n += bucket.size();
        return n;
    }

    bool contains(const Config& s) const {
        auto it = buckets_.find(s.location);
        if (it == buckets_.end()) return false;
        for (const std::vector<Word>& g : it->second)
            if (leq(g, s.contents)) return true;
        return false;
    }

    /// Exact antichain membership (not upward-closed membership).
    bool is_generator(const Config& s) const {
        auto it = buckets_.find(s.location);
        if (it == buckets_.end()) return false;
        return std::binary_search(it->second.begin(), it->second.end(), s.contents);
    }

    /// Inserts g unless it is dominated; drops generators g dominates.
    /// Returns true iff g became a generator.
    bool insert_minimized(const Config& g) {
        auto& bucket = buckets_[g.location];
        for (const std::vector<Word>& h : bucket)
            if (leq(h, g.contents)) return false;
        std::erase_if(bucket, [&](const std::vector<Word>& h) { return leq(g.contents, h); });
        bucket.insert(std::lower_bound(bucket.begin(), bucket.end(), g.contents), g.contents);
        return true;
    }

    friend UpSet set_union(const UpSet& a, const UpSet& b) {
        UpSet out = a;
        for (const auto& [q, bucket] : b.buckets_)
            for (const std::vector<Word>& g : bucket) out.insert_minimized({q, g});
        return out;
    }

    bool is_subset_of(const UpSet& other) const {
        for (const auto& [q, bucket] : buckets_)
            for (const std::vector<Word>& g : bucket)
                if (!other.contains({q, g})) return false;
        return true;
    }

    /// Minimized antichains of equal sets coincide, so this is set equality.
    bool operator==(const UpSet& other) const { return buckets_ == other.buckets_; }

    std::vector<Config> generators() const {
        std::vector<Config> out;
        for (const auto& [q, bucket] : buckets_)
            for (const std::vector<Word>& g : bucket) out.push_back({q, g});
        return out;
    }

    std::vector<Config> generators_at(LocId q) const {
        std::vector<Config> out;
        if (auto it = buckets_.find(q); it != buckets_.end())
            for (const std::vector<Word>& g : it->second) out.push_back({q, g});
        return out;
    }

    /// Canonical text form: one line per generator, `loc : c="word"` fields in
    /// channel order, generators sorted.
    std::string to_text(const Lcs& lcs) const {
        std::ostringstream os;
        for (const auto& [q, bucket] : buckets_) {
            for (const std::vector<Word>& g : bucket) {
                os << lcs.location_name(q) << " :";
                for (ChanId c = 0; c < g.size(); ++c) {
                    os << ' ' << lcs.channel_name(c) << "=\"";
                    for (SymId m : g[c]) os << lcs.message_name(m);
                    os << '"';
                }
                os << '\n';
            }
        }
        return os.str();
    }

    /// Antichain sanity check, used by tests and debug assertions.
    bool is_antichain() const {
        for (const auto& [q, bucket] : buckets_)
            for (std::size_t i = 0; i < bucket.size(); ++i)
                for (std::size_t j = 0; j < bucket.size(); ++j)
                    if (i != j && leq(bucket[i], bucket[j])) return false;
        return true;
    }

  private:
    static bool leq(const std::vector<Word>& a, const std::vector<Word>& b) {
        for (std::size_t c = 0; c < a.size(); ++c)
            if (!is_subword(a[c], b[c])) return false;
        return true;
    }

    std::size_t channels_ = 0;
    std::map<LocId, std::vector<std::vector<Word>>> buckets_;
};

/// Minimal generators of { s : s steps to [[u]] via rule r }. Because u is
/// upward closed and losses only shrink words, this coincides with the perfect
/// predecessor of [[u]].
inline UpSet pre_rule(const Lcs& lcs, const UpSet& u, RuleId r) {
    const TransitionRule& rule = lcs.rule(r);
    UpSet out(u.channel_count());
    for (const Config& g : u.generators_at(rule.target)) {
        Config p = g;
        p.location = rule.source;
        if (rule.op.kind == OpKind::Send) {
            Word& v = p.contents[rule.op.channel];
            if (!v.empty() && v.back() == rule.op.message) v.pop_back();
        } else if (rule.op.kind == OpKind::Recv) {
            Word& v = p.contents[rule.op.channel];
            v.insert(v.begin(), rule.op.message);
        }
        out.insert_minimized(p);
    }
    return out;
}

}  // namespace nplcs
