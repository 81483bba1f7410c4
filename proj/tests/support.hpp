/**
 * @file support.hpp
 * @brief Shared helpers for tests: fixture paths and adapters to the cube oracle.
 */
#pragma once

#include <string>
#include <vector>

#include "doctest.h"
#include "khmr/chain_engine.hpp"
#include "khmr/diagram_model.hpp"
#include "oracles.hpp"

namespace support {

inline std::string fixture(const std::string& name) { return std::string(KHMR_FIXTURES) + "/" + name; }

inline const std::vector<std::string>& classical_fixtures() {
    static const std::vector<std::string> names = {"unknot.json", "unknot_kink.pd", "trefoil.pd", "3_1.json",
                                                   "4_1.json",    "5_1.json",       "5_2.json",   "6_2.json",
                                                   "6_3.json",    "7_1.json",       "hopf.json",  "hopf_negative.json",
                                                   "T2_4.json",   "borromean.json", "chain3.json"};
    return names;
}

/// Oracle homology of a classical diagram, converted to the engine's table type.
inline khmr::BigradedHomology oracle_table(const khmr::MrDiagram& d) {
    REQUIRE(d.r() == 0);
    std::vector<std::pair<std::array<int, 4>, int>> xs;
    for (auto& x : d.crossings) xs.push_back({x.x, x.sign});
    khmr::BigradedHomology out;
    for (auto& [hq, cell] : oracle::cube_homology(xs, static_cast<int>(d.free_loops().size())))
        if (cell.free > 0 || !cell.torsion.empty()) out[hq] = khmr::HomologyCell{cell.free, cell.torsion};
    return out;
}

/// Drops zero cells so tables compare by content.
inline khmr::BigradedHomology nonzero(const khmr::BigradedHomology& h) {
    khmr::BigradedHomology out;
    for (auto& [hq, cell] : h)
        if (cell.free > 0 || !cell.torsion.empty()) out[hq] = cell;
    return out;
}

inline khmr::HomologyCell cell(int free, std::vector<int> torsion = {}) {
    khmr::HomologyCell c;
    c.free = free;
    for (int t : torsion) c.torsion.push_back(khmr::Int(t));
    return c;
}

}  // namespace support
