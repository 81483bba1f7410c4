/**
 * @file verify.hpp
 * @brief Self-check suites run by the command line tool and the acceptance binary.
 *
 * Each suite records one line per check.  Suites that need example diagrams
 * read them from a fixture directory (L1.json, L2.json, hopf_negative.json,
 * chain3.json, unlink_band.json and the classical links).
 */
#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "khmr/diagram_model.hpp"
#include "khmr/kh_pipeline.hpp"

namespace khmr {

struct SuiteReport {
    std::string name;
    bool ok = true;
    std::vector<std::string> lines;  ///< "PASS ..." or "FAIL ..." per check
    void record(bool pass, const std::string& what);
};

/// Diagrams related to @p d by R1 kinks, R2 pairs and a mirror move at its first gate (if any).
std::vector<std::pair<std::string, MrDiagram>> reidemeister_variants(const MrDiagram& d);

/// File names of the gate-free fixtures in @p dir, sorted.
std::vector<std::string> classical_fixture_names(const std::filesystem::path& dir);

/// Through-degree bounds of one twist on n strands, and stabilization for k = 1..k_max (even n).
SuiteReport verify_twist(int n, int k_max);
/// Move invariance of the two-longitude and knotified Hopf examples, and the wrap shift.
SuiteReport verify_invariance(const std::filesystem::path& fixtures, const PipelineConfig& cfg = {});
/// Euler series against the bracket, and the two-strand projector series to order 10.
SuiteReport verify_skein(const std::filesystem::path& fixtures, const PipelineConfig& cfg = {});
/// Knotification against hand-built gate diagrams, and handle-slide invariance.
SuiteReport verify_knotify(const std::filesystem::path& fixtures, const PipelineConfig& cfg = {});

}  // namespace khmr
