/**
 * @file decat.hpp
 * @brief Graded Euler characteristics, the Kauffman bracket and the n=2 projector series.
 *
 * Series are Laurent series in q known only on an explicit window of
 * exponents; coefficients outside it are unknown rather than zero.  The
 * bracket uses <X> = <0-res> - q <1-res> and <O> = q + q^{-1}, renormalized by
 * (-1)^{n-} q^{n+ - 2n-} so that it equals the graded Euler characteristic of
 * Khovanov homology.
 */
#pragma once

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "khmr/diagram_model.hpp"
#include "khmr/kh_pipeline.hpp"

namespace khmr {

struct LaurentWindow {
    static constexpr int unbounded_below = std::numeric_limits<int>::min();
    static constexpr int unbounded_above = std::numeric_limits<int>::max();

    int q_min = unbounded_below;
    int q_max = unbounded_above;
    std::map<int, Int> coeffs;  ///< nonzero coefficients inside the window

    /// Series known at every exponent.
    static LaurentWindow exact(std::map<int, Int> coeffs = {});
    static LaurentWindow monomial(int exponent, Int c = 1);

    bool empty_window() const { return q_min > q_max; }
    bool contains(int q) const { return q >= q_min && q <= q_max; }
    /// Coefficient at @p q; throws if q lies outside the window.
    Int at(int q) const;
    void add(int q, const Int& c);
    /// Same series on the intersection of its window with [lo, hi].
    LaurentWindow restricted(int lo, int hi) const;
    /// Multiplies by (+-1) q^{dq}.
    LaurentWindow shifted(int dq, int sign = 1) const;

    bool operator==(const LaurentWindow&) const = default;
};

LaurentWindow operator+(const LaurentWindow& a, const LaurentWindow& b);
LaurentWindow operator-(const LaurentWindow& a, const LaurentWindow& b);
/// Product; the window shrinks by the spread of the other factor's known terms.
LaurentWindow operator*(const LaurentWindow& a, const LaurentWindow& b);

/// Coefficient-wise differences on the common window.
std::vector<std::string> series_differences(const LaurentWindow& a, const LaurentWindow& b);

/// Sum over cells of (-1)^h free q^q on [q_min, q_max]; torsion does not contribute.
LaurentWindow euler_series(const BigradedHomology& h, int q_min = LaurentWindow::unbounded_below,
                           int q_max = LaurentWindow::unbounded_above);

/// Unnormalized bracket of unoriented crossings X[a,b,c,d] (0-resolution joins a-b and c-d)
/// plus free loops, evaluated by a frontier recursion memoized on connectivity states.
LaurentWindow raw_bracket(const std::vector<std::array<int, 4>>& crossings, int free_loops = 0);

/// Renormalized bracket of a classical diagram.
LaurentWindow kauffman_bracket(const MrDiagram& d);
LaurentWindow kauffman_bracket(const MrDiagram& d, int q_min, int q_max);

struct SkeinReport {
    bool ok = false;
    int q_min = 0;
    int q_max = -1;
    std::vector<int> k;
    LaurentWindow from_homology;
    LaurentWindow from_bracket;
    std::vector<std::string> mismatches;
};

/// Compares the Euler series of the stabilized homology with the shifted bracket
/// of L(k) on the window where both are determined.  Requires every gate to have eta = 0.
SkeinReport skein_consistency(const MrDiagram& d, int h_min, const PipelineConfig& cfg = {},
                              std::optional<std::pair<int, int>> window = std::nullopt);

struct ProjectorReport {
    bool ok = false;
    int order = 0;
    LaurentWindow cup_cap;   ///< coefficient of the cup-cap diagram
    LaurentWindow identity;  ///< coefficient of the identity diagram
    LaurentWindow expected;  ///< q^-1 - q^-3 + ... to the requested order
    std::vector<std::string> mismatches;
};

/// Euler characteristic of the truncated two-strand infinite twist against the
/// expansion of 1/(q + q^{-1}) in powers of q^{-1}.
ProjectorReport p20_series_check(int order);

/// Sorted "exponent<TAB>coefficient" lines.
std::string series_to_tsv(const LaurentWindow& s);
nlohmann::json series_to_json(const LaurentWindow& s);

}  // namespace khmr
