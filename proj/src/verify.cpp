/**
 * @file verify.cpp
 * @brief Self-check suites shared by the command line tool and the acceptance binary.
 */
#include "khmr/verify.hpp"

#include <algorithm>

#include "khmr/decat.hpp"
#include "khmr/twist_factory.hpp"

namespace khmr {

namespace {

MrDiagram load(const std::filesystem::path& dir, const std::string& name) { return load_diagram((dir / name).string()); }

std::string summary(const std::vector<std::string>& mismatches) {
    if (mismatches.empty()) return "";
    std::string s = " (" + mismatches.front();
    if (mismatches.size() > 1) s += ", +" + std::to_string(mismatches.size() - 1) + " more";
    return s + ")";
}

void compare_tables(SuiteReport& rep, const std::string& what, const BigradedHomology& a, const BigradedHomology& b) {
    rep.record(a == b, what + summary(table_differences(a, b)));
}

EdgePoint midpoint(int edge) { return EdgePoint{edge, 0.5}; }

}  // namespace

void SuiteReport::record(bool pass, const std::string& what) {
    ok = ok && pass;
    lines.push_back(std::string(pass ? "PASS " : "FAIL ") + what);
}

std::vector<std::pair<std::string, MrDiagram>> reidemeister_variants(const MrDiagram& d) {
    std::vector<std::pair<std::string, MrDiagram>> out;
    auto r1 = [](int edge, int variant) {
        MoveSpec m;
        m.kind = MoveSpec::Kind::R1Add;
        m.edge = edge;
        m.variant = variant;
        return m;
    };
    out.emplace_back("R1 kink on edge " + std::to_string(d.edges.front()),
                     apply_move(d, r1(d.edges.front(), 0)));
    out.emplace_back("R1 kink (shape 3) on edge " + std::to_string(d.edges.back()),
                     apply_move(d, r1(d.edges.back(), 3)));
    const MrDiagram& once = out.front().second;
    out.emplace_back("two R1 kinks", apply_move(once, r1(once.edges[1], 1)));
    int r2 = 0;
    for (int a : d.edges)
        for (int b : d.edges) {
            if (a == b || r2 >= 2) continue;
            MoveSpec m;
            m.kind = MoveSpec::Kind::R2;
            m.edge = a;
            m.edge2 = b;
            try {
                out.emplace_back("R2 of edge " + std::to_string(a) + " over " + std::to_string(b), apply_move(d, m));
                ++r2;
            } catch (const InvalidInput&) {
            }
        }
    if (d.r() > 0) {
        MoveSpec m;
        m.kind = MoveSpec::Kind::Mirror;
        out.emplace_back("mirror move at gate 0", apply_move(d, m));
    }
    return out;
}

std::vector<std::string> classical_fixture_names(const std::filesystem::path& dir) {
    std::vector<std::string> names;
    for (auto& entry : std::filesystem::directory_iterator(dir)) {
        auto ext = entry.path().extension();
        if (ext != ".json" && ext != ".pd") continue;
        try {
            if (load_diagram(entry.path().string()).r() == 0) names.push_back(entry.path().filename().string());
        } catch (const InvalidInput&) {
        }
    }
    std::sort(names.begin(), names.end());
    return names;
}

SuiteReport verify_twist(int n, int k_max) {
    SuiteReport rep{"twist", true, {}};
    ThroughDegreeReport td = check_through_degree_bounds(n);
    rep.record(td.ok, "through-degree bounds for n=" + std::to_string(n) + summary(td.violations));
    if (n % 2 != 0) {
        rep.lines.push_back("SKIP stabilization is checked for even n only");
        return rep;
    }
    for (int k = 1; k <= k_max; ++k) {
        StabilizationReport s = check_stabilization(n, k);
        rep.record(s.ok, "stabilization n=" + std::to_string(n) + " k=" + std::to_string(k) + " -> " +
                             std::to_string(k + 1) + summary(s.mismatches));
    }
    return rep;
}

SuiteReport verify_invariance(const std::filesystem::path& fixtures, const PipelineConfig& cfg) {
    SuiteReport rep{"invariance", true, {}};
    for (auto [name, h_min] : {std::pair{"L1.json", -4}, std::pair{"L2.json", -3}}) {
        MrDiagram d = load(fixtures, name);
        BigradedHomology ref = khovanov_homology(d, h_min, cfg).table;
        for (auto& [what, v] : reidemeister_variants(d))
            compare_tables(rep, std::string(name) + ": " + what, ref, khovanov_homology(v, h_min, cfg).table);
        if (std::string(name) == "L2.json")
            for (int side : {0, 1}) {
                MoveSpec m;
                m.kind = MoveSpec::Kind::Finger;
                m.side = side;
                compare_tables(rep, std::string(name) + ": finger move on side " + std::to_string(side), ref,
                               khovanov_homology(apply_move(d, m), h_min, cfg).table);
            }
    }
    MrDiagram l1 = load(fixtures, "L1.json");
    for (int sign : {1, -1}) {
        ShiftReport s = wrap_shift_check(l1, 0, sign, -4, cfg);
        rep.record(s.ok && s.dh == 2 * sign && s.dq == 6 * sign,
                   "L1.json: surgery wrap " + std::string(sign > 0 ? "+" : "-") + " shifts by (" +
                       std::to_string(s.dh) + "," + std::to_string(s.dq) + ")" + summary(s.mismatches));
    }
    return rep;
}

SuiteReport verify_skein(const std::filesystem::path& fixtures, const PipelineConfig& cfg) {
    SuiteReport rep{"skein", true, {}};
    for (auto& name : classical_fixture_names(fixtures)) {
        SkeinReport s = skein_consistency(load(fixtures, name), 0, cfg);
        rep.record(s.ok, name + ": Euler series equals the bracket" + summary(s.mismatches));
    }
    auto gate_case = [&](const std::string& what, const MrDiagram& d, int h_min) {
        SkeinReport s = skein_consistency(d, h_min, cfg);
        rep.record(s.ok, what + " on q in [" + std::to_string(s.q_min) + "," + std::to_string(s.q_max) + "]" +
                             summary(s.mismatches));
    };
    gate_case("L2.json", load(fixtures, "L2.json"), -4);
    gate_case("L1.json with one strand reversed", reverse_component(load(fixtures, "L1.json"), 1), -4);
    gate_case("unlink_band.json", load(fixtures, "unlink_band.json"), -4);
    ProjectorReport p = p20_series_check(10);
    rep.record(p.ok, "two-strand infinite twist gives 1/(q+q^-1) to order 10" + summary(p.mismatches));
    return rep;
}

SuiteReport verify_knotify(const std::filesystem::path& fixtures, const PipelineConfig& cfg) {
    SuiteReport rep{"knotify", true, {}};
    compare_tables(rep, "knotified negative Hopf link equals L2.json",
                   khovanov_homology(load(fixtures, "L2.json"), -3, cfg).table,
                   knotification_homology(load(fixtures, "hopf_negative.json"), {}, -3, cfg).table);
    MrDiagram unlink;
    unlink.name = "unlink";
    unlink.edges = {1, 2};
    compare_tables(rep, "knotified 2-component unlink equals unlink_band.json",
                   khovanov_homology(load(fixtures, "unlink_band.json"), -4, cfg).table,
                   knotification_homology(unlink, {}, -4, cfg).table);

    MrDiagram chain = load(fixtures, "chain3.json");
    std::map<int, int> first;
    for (auto [e, c] : edge_components(chain))
        if (!first.count(c)) first[c] = e;
    if (first.size() != 3) {
        rep.record(false, "chain3.json must have three components");
        return rep;
    }
    const auto p0 = midpoint(first[0]), p1 = midpoint(first[1]), p2 = midpoint(first[2]);
    KhResult a = knotification_homology(chain, {{p0, p1}, {p1, p2}}, -3, cfg);
    KhResult b = knotification_homology(chain, {{p0, p1}, {p0, p2}}, -3, cfg);
    KhResult c = knotification_homology(chain, {{p0, p2}, {p1, p2}}, -3, cfg);
    compare_tables(rep, "handle slide of the second band from component 1 to 0", a.table, b.table);
    compare_tables(rep, "handle slide of the first band from component 0 to 1", a.table, c.table);
    return rep;
}

}  // namespace khmr
