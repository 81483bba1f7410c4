/**
 * @file kh_pipeline.hpp
 * @brief Stabilized Khovanov homology of diagrams with gates.
 *
 * The complex of a diagram is the scan-composition of the signed crossing
 * complexes of L(0) with one renormalized finite twist complex per gate.
 * Homology in degrees h >= h_min is reported once two consecutive twist
 * counts give the same table.
 */
#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "khmr/chain_engine.hpp"
#include "khmr/diagram_model.hpp"

namespace khmr {

struct PipelineConfig {
    int k_ceiling = 12;                               ///< largest twist count tried per gate
    std::optional<std::filesystem::path> cache_root;  ///< twist cache root; none keeps twists in memory
    int jobs = 1;                                     ///< worker cap for independent k-rounds
    EngineLimits limits;
};

/// Called with every complex the pipeline produces (twist pieces, scan steps, results).
using ComplexObserver = std::function<void(const ChainComplex&, const std::string& where)>;
/// Installs a process-wide observer; pass an empty function to remove it.
void set_complex_observer(ComplexObserver observer);

/// Raised when consecutive k-rounds still disagree at the ceiling.
class StabilizationError : public ResourceError {
public:
    StabilizationError(const std::string& what, BigradedHomology a, BigradedHomology b)
        : ResourceError(what), last(std::move(a)), previous(std::move(b)) {}
    BigradedHomology last;
    BigradedHomology previous;
};

struct KhResult {
    std::string name;
    BigradedHomology table;  ///< cells with h >= h_min
    int h_min = 0;
    std::vector<int> k_used;
    std::vector<int> eta;  ///< per gate; the absolute grading is defined up to shifts depending on these
    bool odd_intersection = false;
    std::vector<std::string> flags;
};

bool has_odd_gate(const MrDiagram& d);

/// Closed complex of L(0) with C*(k_i) inserted at gate i.  When @p h_floor is
/// given, pieces are truncated so that homology in degrees >= h_floor is exact.
ChainComplex finite_complex(const MrDiagram& d, const std::vector<int>& k, const PipelineConfig& cfg = {},
                            std::optional<int> h_floor = std::nullopt);

/// Homology of an r=0 diagram.
BigradedHomology classical_homology(const MrDiagram& d);

/// Smallest twist count for which the twist complexes are exact in the window.
int initial_twist_count(const MrDiagram& d, int h_min);

KhResult khovanov_homology(const MrDiagram& d, int h_min, const PipelineConfig& cfg = {});

/// Cells with h >= h_min.
BigradedHomology restrict_window(const BigradedHomology& h, int h_min);
BigradedHomology shift_table(const BigradedHomology& h, int dh, int dq);
/// Human-readable differences between two tables.
std::vector<std::string> table_differences(const BigradedHomology& a, const BigradedHomology& b);

struct ShiftReport {
    bool ok = false;
    int dh = 0;
    int dq = 0;
    BigradedHomology before;
    BigradedHomology after;
    std::vector<std::string> mismatches;
};

/// Applies a surgery wrap and checks that the table moves by (sign*eta, 3*sign*eta).
ShiftReport wrap_shift_check(const MrDiagram& d, int gate, int sign, int h_min, const PipelineConfig& cfg = {});

/// knotify followed by khovanov_homology.
KhResult knotification_homology(const MrDiagram& link, const std::vector<std::pair<EdgePoint, EdgePoint>>& pairs,
                                int h_min, const PipelineConfig& cfg = {});

nlohmann::json result_to_json(const KhResult& r);
std::string result_to_tsv(const KhResult& r);
/// Table laid out with q rows (descending) and h columns (ascending).
std::string result_to_grid(const KhResult& r);

}  // namespace khmr
