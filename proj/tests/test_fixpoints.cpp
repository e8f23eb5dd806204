#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "helpers.hpp"
#include "nplcs/fixpoints.hpp"
#include "nplcs/fixtures.hpp"
#include "nplcs/oracle.hpp"

using namespace nplcs;
using namespace nplcs::test;

TEST_CASE("safe on run6") {
    Lcs l = run6_fixture().lcs;
    CHECK(safe(l, locs(l, {"1", "2", "3"})) == locs(l, {"1", "2", "3"}));
    CHECK(safe(l, locs(l, {"1", "4"})) == locs(l, {"4"}));
    CHECK(safe(l, {}) == LocSet{});
    CHECK(safe(l, l.all_locations()) == l.all_locations());
}

TEST_CASE("prom on run6 reproduces the appendix values") {
    Lcs l = run6_fixture().lcs;
    CHECK(prom(l, locs(l, {"3"})) == locs(l, {"1", "2", "3"}));
    CHECK(prom(l, locs(l, {"6"})) == locs(l, {"1", "2", "4", "5", "6"}));
    CHECK(prom(l, locs(l, {"3", "6"})) == l.all_locations());
    CHECK(prom(l, {}) == LocSet{});
}

TEST_CASE("safe algebra", "[fuzz]") {
    std::mt19937 rng(10001);
    for (int i = 0; i < 60; ++i) {
        Lcs l = random_lcs(rng, ModelProfile::Unrestricted);
        LocSet a = random_loc_set(rng, l);
        LocSet b = random_loc_set(rng, l);
        LocSet sa = safe(l, a), sb = safe(l, b);
        // contained in the argument, idempotent, monotone
        CHECK(std::includes(a.begin(), a.end(), sa.begin(), sa.end()));
        CHECK(safe(l, sa) == sa);
        LocSet ab = set_union(a, b);
        LocSet sab = safe(l, ab);
        CHECK(std::includes(sab.begin(), sab.end(), sa.begin(), sa.end()));
        // union / intersection inclusions
        LocSet u = set_union(sa, sb);
        CHECK(std::includes(sab.begin(), sab.end(), u.begin(), u.end()));
        LocSet si = safe(l, set_intersect(a, b));
        LocSet cap = set_intersect(sa, sb);
        CHECK(std::includes(cap.begin(), cap.end(), si.begin(), si.end()));
    }
}

TEST_CASE("prom algebra and union distributivity", "[fuzz]") {
    std::mt19937 rng(10002);
    for (int i = 0; i < 60; ++i) {
        Lcs l = random_lcs(rng, ModelProfile::Unrestricted);
        LocSet a = random_loc_set(rng, l);
        LocSet b = random_loc_set(rng, l);
        LocSet pa = prom(l, a), pb = prom(l, b);
        // A subseteq Prom(A); monotone
        CHECK(std::includes(pa.begin(), pa.end(), a.begin(), a.end()));
        LocSet pab = prom(l, set_union(a, b));
        CHECK(std::includes(pab.begin(), pab.end(), pa.begin(), pa.end()));
        // Prom(A u B) = Prom(A) u Prom(B), exactly
        CHECK(pab == set_union(pa, pb));
        // Prom(A n B) subseteq Prom(A) n Prom(B)
        LocSet pi = prom(l, set_intersect(a, b));
        LocSet cap = set_intersect(pa, pb);
        CHECK(std::includes(cap.begin(), cap.end(), pi.begin(), pi.end()));
    }
}

TEST_CASE("behavioral soundness of safe and prom on finite models", "[fuzz]") {
    std::mt19937 rng(10003);
    int models = 0;
    for (int i = 0; i < 60 && models < 20; ++i) {
        Lcs l = random_lcs(rng, ModelProfile::FiniteOnly);
        if (!validate(l).empty()) continue;
        Nplcs n(l, Rat(1, 2));
        LocSet a = random_loc_set(rng, l, /*allow_empty=*/false);
        LocSet safe_set = safe(l, a);
        LocSet prom_set = prom(l, a);
        bool usable = true;
        for (LocId x = 0; x < l.location_count() && usable; ++x) {
            Config start = Config::at(x, l.channel_count());
            auto explored = explore(n, start, 8000);
            if (std::holds_alternative<Exceeded>(explored)) {
                usable = false;
                break;
            }
            const FiniteMdp& mdp = std::get<FiniteMdp>(explored);
            SupportMdp m = support_of(mdp);
            std::uint32_t root = mdp.index.at(start);
            // x in Safe(A) iff some scheduler keeps the run inside A surely
            bool box_a = oracle_sure_avoid_set(m, lift_locations(mdp, complement(l, a)))[root];
            CHECK(safe_set.count(x) == (box_a ? 1u : 0u));
            // x in Prom(A) iff some scheduler reaches A almost surely
            bool diamond_a = oracle_almost_sure_reach_set(m, lift_locations(mdp, a))[root];
            CHECK(prom_set.count(x) == (diamond_a ? 1u : 0u));
        }
        if (usable) ++models;
    }
    CHECK(models >= 20);
}

TEST_CASE("eventuality sets on run6") {
    Lcs l = run6_fixture().lcs;
    SECTION("single target reduces to prom") {
        auto t = eventuality_sets(l, {locs(l, {"3"})});
        CHECK(t.at(0) == l.all_locations());
        CHECK(t.at(1) == locs(l, {"1", "2", "3"}));
    }
    SECTION("two mutually unreachable sinks yield the empty set") {
        auto t = eventuality_sets(l, {locs(l, {"3"}), locs(l, {"6"})});
        CHECK(t.at(1) == locs(l, {"1", "2", "3"}));
        CHECK(t.at(2) == locs(l, {"1", "2", "4", "5", "6"}));
        CHECK(t.at(3).empty());
    }
    SECTION("target bound") {
        std::vector<LocSet> many(11, locs(l, {"3"}));
        CHECK_THROWS_AS(eventuality_sets(l, many), TooManyTargetsError);
    }
}

TEST_CASE("almost-sure buchi core on run6") {
    Lcs l = run6_fixture().lcs;
    CHECK(almost_sure_buchi(l, {locs(l, {"6"})}) == locs(l, {"1", "2", "4", "5", "6"}));
    CHECK(almost_sure_buchi(l, {l.all_locations()}) == l.all_locations());
    CHECK(almost_sure_buchi(l, {locs(l, {"3", "6"})}) == l.all_locations());
    // interacting targets: each is individually promising, but visiting 6
    // forecloses returning to 2, so the refinement empties the core
    CHECK(set_intersect(safe(l, prom(l, locs(l, {"2"}))), safe(l, prom(l, locs(l, {"6"})))) ==
          locs(l, {"1", "2"}));
    CHECK(almost_sure_buchi(l, {locs(l, {"2"}), locs(l, {"6"})}).empty());
}

TEST_CASE("almost-sure buchi refinement agrees with the oracle where the plain intersection does not") {
    LcsSpec spec;
    spec.locations = {"s", "a", "t"};
    spec.channels = {"c"};
    spec.messages = {"m"};
    spec.rules = {{"s", "a", OpKind::Send, "c", "m"},
                  {"a", "s", OpKind::Internal, "", ""},
                  {"a", "t", OpKind::Internal, "", ""},
                  {"t", "t", OpKind::Internal, "", ""}};
    Lcs l = Lcs::build(spec);
    REQUIRE(validate(l).empty());
    LocSet a1 = locs(l, {"a"}), a2 = locs(l, {"t"});
    LocSet naive = set_intersect(safe(l, prom(l, a1)), safe(l, prom(l, a2)));
    CHECK(naive == locs(l, {"a", "s"}));
    CHECK(almost_sure_buchi(l, {a1, a2}).empty());
    Nplcs n(l, Rat(1, 2));
    Config start = Config::at(l.require_location("s"), 1);
    Query q;
    q.kind = QueryKind::Buchi;
    q.threshold = Threshold::One;
    q.targets = {a1, a2};
    auto oracle = oracle_qualitative(n, start, q);
    REQUIRE(oracle.has_value());
    CHECK_FALSE(*oracle);
}

TEST_CASE("streett core sets on run6") {
    Lcs l = run6_fixture().lcs;

    SECTION("pair ({6}, {}) leaves the avoidance component") {
        StreettCore core = streett_core_sets(l, {{locs(l, {"6"}), {}}});
        CHECK(core.per_subset.at(1).empty());  // Buechi target empty
        CHECK(core.per_subset.at(0) == locs(l, {"1", "2", "3", "4", "5"}));
        CHECK(core.united == locs(l, {"1", "2", "3", "4", "5"}));
    }

    SECTION("pair (Q, B) reduces to the Buechi core of B") {
        LocSet b = locs(l, {"6"});
        StreettCore core = streett_core_sets(l, {{l.all_locations(), b}});
        CHECK(core.per_subset.at(0).empty());  // cannot avoid Q
        CHECK(core.united == almost_sure_buchi(l, {b}));
    }

    SECTION("pairs with B_i = Q are trivially satisfiable inside Safe(Q)") {
        StreettCore core = streett_core_sets(
            l, {{locs(l, {"3"}), l.all_locations()}, {locs(l, {"6"}), l.all_locations()}});
        CHECK(core.united == safe(l, l.all_locations()));
    }
}

TEST_CASE("streett positive set on run6") {
    Lcs l = run6_fixture().lcs;
    CHECK(streett_positive_set(l, locs(l, {"6"}), locs(l, {"3"})) ==
          locs(l, {"1", "2", "4", "5", "6"}));
    CHECK(streett_positive_set(l, {}, locs(l, {"3"})).empty());
    // B empty: computed on the system itself plus an unreachable fail
    CHECK(streett_positive_set(l, locs(l, {"6"}), {}) == locs(l, {"1", "2", "4", "5", "6"}));
}

TEST_CASE("gadget is promising for out") {
    Lcs l = gadget_fixture({"a", "b"}).lcs;
    LocSet p = prom(l, locs(l, {"out"}));
    CHECK(p.count(l.require_location("in")));
    CHECK(p == l.all_locations());
}
