/**
 * @file test_kh_pipeline.cpp
 * @brief End-to-end homology: oracle equivalence, the three gate examples, moves, knotification.
 */
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>

#include "khmr/kh_pipeline.hpp"
#include "khmr/twist_factory.hpp"
#include "support.hpp"

using namespace khmr;
using support::cell;
using support::fixture;

namespace {

/// Cells of the two-longitude example: two free cells at h=0, then a period-2 pattern.
BigradedHomology l1_expected(int h_min) {
    BigradedHomology t;
    t[{0, 0}] = cell(1);
    t[{0, -2}] = cell(1);
    for (int m = 1; 1 - 2 * m >= h_min; ++m) {
        t[{1 - 2 * m, 2 - 4 * m}] = cell(1);
        t[{1 - 2 * m, -4 * m}] = cell(0, {2});
        if (-2 * m >= h_min) t[{-2 * m, -2 - 4 * m}] = cell(1);
    }
    return t;
}

/// Cells of the crossingless example from its case formulas.
BigradedHomology l3_expected(int h_min) {
    BigradedHomology t;
    t[{0, -1}] = cell(1);
    for (int k = 0; -2 * k >= h_min; ++k) {
        if (k >= 1) t[{-2 * k, -1 - 4 * k}] = cell(k);
        HomologyCell c = cell(k + 1, std::vector<int>(k, 2));
        t[{-2 * k, -3 - 4 * k}] = c;
        if (-1 - 2 * k >= h_min) {
            t[{-1 - 2 * k, -3 - 4 * k}] = cell(k + 2);
            t[{-1 - 2 * k, -5 - 4 * k}] = cell(k, std::vector<int>(k + 2, 2));
        }
    }
    return support::nonzero(t);
}

/// Homology of L(k) from the cube oracle, moved to the gradings of the finite complex.
BigradedHomology oracle_finite(const MrDiagram& d, int k) {
    std::vector<int> kv(d.r(), k);
    int dh = 0, dq = 0;
    for (auto& g : d.gates) {
        ShiftingData s = gate_shifting_data(g);
        auto [th, tq] = twist_shift(s.n, k);
        dh += th + k * s.n_minus;
        dq += tq + k * s.N;
    }
    return shift_table(support::oracle_table(build_Lk(d, kv)), dh, dq);
}

MrDiagram with_move(const MrDiagram& d, MoveSpec m) { return apply_move(d, m); }

}  // namespace

TEST_CASE("empty diagram and unknot") {
    ChainComplex e = finite_complex(MrDiagram{}, {});
    REQUIRE(e.objects.size() == 1);
    CHECK(e.objects[0].h == 0);
    CHECK(e.objects[0].q == 0);
    BigradedHomology u = classical_homology(load_diagram(fixture("unknot.json")));
    CHECK(u == BigradedHomology{{{0, -1}, cell(1)}, {{0, 1}, cell(1)}});
    CHECK(classical_homology(load_diagram(fixture("unknot_kink.pd"))) == u);
}

TEST_CASE("classical fixtures match the cube oracle") {
    for (auto& f : support::classical_fixtures()) {
        CAPTURE(f);
        MrDiagram d = load_diagram(fixture(f));
        CHECK(support::nonzero(classical_homology(d)) == support::oracle_table(d));
    }
}

TEST_CASE("trefoil homology sits in the standard positions") {
    BigradedHomology t = classical_homology(load_diagram(fixture("3_1.json")));
    BigradedHomology want{{{0, 1}, cell(1)}, {{0, 3}, cell(1)}, {{2, 5}, cell(1)}, {{3, 9}, cell(1)}, {{3, 7}, cell(0, {2})}};
    CHECK(support::nonzero(t) == want);
}

TEST_CASE("finite complexes of gate diagrams equal the shifted homology of L(k)") {
    for (auto f : {"L1.json", "L2.json", "L3.json", "unlink_band.json"}) {
        MrDiagram d = load_diagram(fixture(f));
        for (int k = 1; k <= 2; ++k) {
            CAPTURE(f);
            CAPTURE(k);
            ChainComplex c = finite_complex(d, std::vector<int>(d.r(), k));
            CHECK(check_d_squared(c));
            CHECK(check_gradings(c));
            CHECK(support::nonzero(homology(c)) == oracle_finite(d, k));
        }
    }
}

TEST_CASE("degree floors keep homology exact above the floor") {
    MrDiagram d = load_diagram(fixture("L2.json"));
    BigradedHomology full = support::nonzero(homology(finite_complex(d, {3})));
    for (int floor = -6; floor <= 0; ++floor) {
        BigradedHomology cut = restrict_window(homology(finite_complex(d, {3}, {}, floor)), floor);
        CHECK(cut == restrict_window(full, floor));
    }
}

TEST_CASE("two-longitude example") {
    KhResult r = khovanov_homology(load_diagram(fixture("L1.json")), -4);
    BigradedHomology listed{{{0, 0}, cell(1)},  {{0, -2}, cell(1)},      {{-1, -2}, cell(1)}, {{-2, -6}, cell(1)},
                            {{-3, -6}, cell(1)}, {{-1, -4}, cell(0, {2})}, {{-3, -8}, cell(0, {2})}};
    for (auto& [hq, c] : listed) CHECK(r.table.at(hq) == c);
    CHECK(r.table == l1_expected(-4));
    CHECK(r.eta == std::vector<int>{2});
    CHECK(khovanov_homology(load_diagram(fixture("L1.json")), -6).table == l1_expected(-6));
}

TEST_CASE("knotified Hopf link example") {
    KhResult r = khovanov_homology(load_diagram(fixture("L2.json")), -3);
    BigradedHomology want{{{0, -1}, cell(1)},  {{0, -3}, cell(1)},        {{-1, -3}, cell(1)},
                          {{-2, -5}, cell(1)}, {{-3, -7}, cell(1)},        {{-1, -5}, cell(0, {2})},
                          {{-2, -7}, cell(1, {2})}, {{-3, -9}, cell(1, {2})}};
    CHECK(r.table == want);
    CHECK(r.eta == std::vector<int>{0});
}

TEST_CASE("crossingless example") {
    KhResult r = khovanov_homology(load_diagram(fixture("L3.json")), -5);
    CHECK(r.table == l3_expected(-5));
    CHECK(r.table.at({-4, -11}) == cell(3, {2, 2}));
    CHECK(r.table.at({-5, -11}) == cell(4));
}

TEST_CASE("enlarging the window keeps reported cells") {
    for (auto f : {"L1.json", "L2.json", "L3.json"}) {
        MrDiagram d = load_diagram(fixture(f));
        BigradedHomology prev;
        for (int h = 0; h >= -5; --h) {
            BigradedHomology t = khovanov_homology(d, h).table;
            CHECK(restrict_window(t, h + 1) == prev);
            prev = t;
        }
    }
}

TEST_CASE("odd gates give the flagged zero table") {
    MrDiagram d;
    d.edges = {1, 2, 3};
    Gate g;
    for (int j = 1; j <= 3; ++j) g.strands.push_back({j, j, 1});
    d.gates.push_back(g);
    KhResult r = khovanov_homology(d, -4);
    CHECK(r.odd_intersection);
    CHECK(r.table.empty());
    CHECK(result_to_json(r)["flags"] == nlohmann::json({"odd-intersection"}));
}

TEST_CASE("surgery wraps shift by (eta, 3 eta)") {
    MrDiagram l1 = load_diagram(fixture("L1.json"));
    ShiftReport pos = wrap_shift_check(l1, 0, 1, -4);
    CHECK(pos.ok);
    CHECK(pos.dh == 2);
    CHECK(pos.dq == 6);
    ShiftReport neg = wrap_shift_check(l1, 0, -1, -4);
    CHECK(neg.ok);
    CHECK(neg.dh == -2);
    CHECK(neg.dq == -6);
    for (int s : {1, -1}) {
        ShiftReport z = wrap_shift_check(load_diagram(fixture("L2.json")), 0, s, -3);
        CHECK(z.ok);
        CHECK(z.dh == 0);
        CHECK(z.before == z.after);
    }
}

TEST_CASE("Reidemeister, mirror and finger variants give equal tables") {
    for (auto [f, h_min] : {std::pair{"L1.json", -4}, std::pair{"L2.json", -3}}) {
        MrDiagram d = load_diagram(fixture(f));
        BigradedHomology ref = khovanov_homology(d, h_min).table;
        std::vector<MrDiagram> variants;
        variants.push_back(with_move(d, {MoveSpec::Kind::R1Add, d.edges[0], 0, 0}));
        variants.push_back(with_move(d, {MoveSpec::Kind::R1Add, d.edges.back(), 0, 3}));
        MrDiagram twice = with_move(variants[0], {MoveSpec::Kind::R1Add, variants[0].edges[1], 0, 1});
        variants.push_back(twice);
        for (int a : d.edges)
            for (int b : d.edges) {
                if (a == b || variants.size() >= 6) continue;
                MoveSpec m;
                m.kind = MoveSpec::Kind::R2;
                m.edge = a;
                m.edge2 = b;
                try {
                    variants.push_back(apply_move(d, m));
                } catch (const InvalidInput&) {
                }
            }
        MoveSpec mirror;
        mirror.kind = MoveSpec::Kind::Mirror;
        variants.push_back(apply_move(d, mirror));
        for (int side : {0, 1}) {
            MoveSpec finger;
            finger.kind = MoveSpec::Kind::Finger;
            finger.side = side;
            MrDiagram fd = apply_move(d, finger);
            if (gate_shifting_data(fd.gates[0]).eta == 0) variants.push_back(fd);
        }
        for (auto& v : variants) {
            CAPTURE(serialize(v));
            CHECK(khovanov_homology(v, h_min).table == ref);
        }
    }
}

TEST_CASE("knotification agrees with the direct gate diagram") {
    MrDiagram unlink;
    unlink.edges = {1, 2};
    KhResult a = knotification_homology(unlink, {}, -4);
    KhResult b = khovanov_homology(load_diagram(fixture("unlink_band.json")), -4);
    CHECK(a.table == b.table);
    KhResult h = knotification_homology(load_diagram(fixture("hopf_negative.json")), {}, -3);
    CHECK(h.table == khovanov_homology(load_diagram(fixture("L2.json")), -3).table);
}

TEST_CASE("handle slide between two knotifications of the 3-chain link") {
    MrDiagram chain = load_diagram(fixture("chain3.json"));
    std::map<int, int> first;
    for (auto [e, c] : edge_components(chain))
        if (!first.count(c)) first[c] = e;
    // The middle component (1) links both ends; slide the second band's foot from it to component 0.
    auto p = [](int e) { return EdgePoint{e, 0.5}; };
    KhResult a = knotification_homology(chain, {{p(first[0]), p(first[1])}, {p(first[1]), p(first[2])}}, -3);
    KhResult b = knotification_homology(chain, {{p(first[0]), p(first[1])}, {p(first[0]), p(first[2])}}, -3);
    CHECK_FALSE(a.table.empty());
    CHECK(a.table == b.table);
}

TEST_CASE("stabilization ceiling raises a resource error") {
    PipelineConfig cfg;
    cfg.k_ceiling = 2;
    CHECK_THROWS_AS(khovanov_homology(load_diagram(fixture("L1.json")), -6, cfg), ResourceError);
}

TEST_CASE("twist cache is used and gives the same table") {
    auto root = std::filesystem::temp_directory_path() / "khmr_pipeline_cache_test";
    std::filesystem::remove_all(root);
    PipelineConfig cfg;
    cfg.cache_root = root;
    MrDiagram d = load_diagram(fixture("L1.json"));
    KhResult a = khovanov_homology(d, -4, cfg);
    CHECK(std::filesystem::exists(root / "cache" / "twist" / ("n2_k" + std::to_string(a.k_used[0]) + "_uu.cx")));
    KhResult b = khovanov_homology(d, -4, cfg);
    CHECK(a.table == b.table);
    CHECK(a.table == khovanov_homology(d, -4).table);
    std::filesystem::remove_all(root);
}

TEST_CASE("parallel rounds give the same result") {
    PipelineConfig cfg;
    cfg.jobs = 2;
    MrDiagram d = load_diagram(fixture("L3.json"));
    CHECK(khovanov_homology(d, -3, cfg).table == khovanov_homology(d, -3).table);
}

TEST_CASE("result serialization") {
    KhResult r = khovanov_homology(load_diagram(fixture("L2.json")), -3);
    nlohmann::json j = result_to_json(r);
    CHECK(j["window"]["h_min"] == -3);
    CHECK(j["k_used"] == nlohmann::json({r.k_used[0]}));
    bool found = false;
    for (auto& row : j["rows"])
        if (row["h"] == -2 && row["q"] == -7) {
            CHECK(row["free"] == 1);
            CHECK(row["torsion"] == nlohmann::json({2}));
            found = true;
        }
    CHECK(found);
    std::string tsv = result_to_tsv(r);
    CHECK(tsv.find("h\tq\tfree\ttorsion\n") != std::string::npos);
    CHECK(tsv.find("-2\t-7\t1\t2\n") != std::string::npos);
    CHECK(tsv.find("0\t-1\t1\t-\n") != std::string::npos);
    CHECK(result_to_grid(r).find("Z+Z2") != std::string::npos);
}
