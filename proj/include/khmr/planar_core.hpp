/**
 * @file planar_core.hpp
 * @brief Crossingless matchings (Temperley-Lieb diagrams) and dotted cobordisms between them.
 *
 * Boundary points of a diagram are indexed bottom first (left to right), then
 * top (left to right).  A morphism between two diagrams on the same boundary is
 * stored fully neck-cut: one disk per boundary cycle of source and target glued
 * along the boundary points, each disk carrying at most one dot.  Dots are a
 * bitmask over those cycles.
 */
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace khmr {

using Int = boost::multiprecision::cpp_int;
using Mask = std::uint64_t;

/// Raised when an input violates a structural requirement.
class InvalidInput : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A crossingless matching of boundary points plus a number of free circles.
struct TLDiagram {
    int bottom = 0;
    int top = 0;
    std::vector<int> match;
    int circles = 0;

    int size() const { return bottom + top; }
    auto operator<=>(const TLDiagram&) const = default;
};

TLDiagram identity_diagram(int n);
/// Diagram from explicit pairs of point indices.
TLDiagram make_diagram(int bottom, int top, const std::vector<std::pair<int, int>>& pairs, int circles = 0);
/// Checks that match is an involution without fixed points and that the matching is non-crossing.
bool is_planar(const TLDiagram& d);
/// Position of a point in the counterclockwise order around the rectangle.
int cyclic_position(const TLDiagram& d, int point);
/// Number of arcs joining a bottom point to a top point.
int through_degree(const TLDiagram& d);
/// Vertical composition: @p lower below @p upper (lower.top must equal upper.bottom).
TLDiagram stack(const TLDiagram& lower, const TLDiagram& upper);

struct Decomposition {
    TLDiagram top_half;  ///< d points at its bottom, delta's top points at its top
    int through = 0;
    TLDiagram bottom_half;  ///< delta's bottom points at its bottom, d points at its top
};
/// Splits delta as top_half . id_d . bottom_half with d = through_degree(delta).
Decomposition decompose(const TLDiagram& delta);

std::string to_string(const TLDiagram& d);

/// Boundary cycles of source union target (same boundary size).
struct CycleStructure {
    int alternating = 0;           ///< cycles passing through boundary points
    int source_circles = 0;
    int target_circles = 0;
    std::vector<int> point_cycle;  ///< cycle index of every boundary point

    int total() const { return alternating + source_circles + target_circles; }
    int source_circle(int j) const { return alternating + j; }
    int target_circle(int j) const { return alternating + source_circles + j; }
};
CycleStructure cycle_structure(const TLDiagram& source, const TLDiagram& target);

/// Sparse linear combination of dot masks with integer coefficients (sorted, no zeros).
class LinComb {
public:
    LinComb() = default;
    static LinComb single(Mask m, Int c = 1);

    const std::vector<std::pair<Mask, Int>>& terms() const { return terms_; }
    bool empty() const { return terms_.empty(); }
    std::size_t size() const { return terms_.size(); }

    void add(Mask m, const Int& c);
    void add(const LinComb& other, const Int& scale = 1);
    LinComb scaled(const Int& c) const;
    /// Coefficient of mask m.
    Int coefficient(Mask m) const;
    bool operator==(const LinComb&) const = default;

private:
    std::vector<std::pair<Mask, Int>> terms_;
};

/// Glues disks along seams and reduces the result with the dotted relations
/// (sphere 0, dotted sphere 1, two dots 0, neck cutting with H=0).
class SurfaceBuilder {
public:
    int add_disk(bool dotted);
    void add_seam(int disk_a, int disk_b, bool arc);
    /// Each output cycle is bounded by the component containing rep_disk[i].
    LinComb reduce(const std::vector<int>& rep_disk);

private:
    int find(int x);
    std::vector<int> parent_;
    std::vector<int> dots_;
    std::vector<int> arc_seams_;
    std::vector<std::pair<int, int>> seams_;
};

/// A single dotted cobordism between two diagrams, kept in neck-cut form.
struct Cobordism {
    TLDiagram source;
    TLDiagram target;
    Mask dots = 0;
    Int coefficient = 1;

    struct Component {
        std::vector<int> cycle_points;  ///< boundary points on the cycle (empty for a circle)
        int genus = 0;
        int dots = 0;
    };
    std::vector<Component> components() const;
};

/// A linear combination of cobordisms source -> target.
struct CobordismSum {
    TLDiagram source;
    TLDiagram target;
    LinComb terms;

    bool is_zero() const { return terms.empty(); }
    std::vector<Cobordism> cobordisms() const;
};

/// q-degree of a single term: cycles - boundary/2 - 2*dots.
int degree(const TLDiagram& source, const TLDiagram& target, Mask dots);
CobordismSum identity_cobordism(const TLDiagram& d);
/// Saddle between two diagrams that differ in one pair of arcs.
CobordismSum saddle(const TLDiagram& source, const TLDiagram& target);
/// Vertical composition psi . phi.
CobordismSum compose(const CobordismSum& phi, const CobordismSum& psi);
LinComb compose_terms(const TLDiagram& s, const TLDiagram& y, const TLDiagram& t, const LinComb& phi,
                      const LinComb& psi);

/// A closed surface: genus and number of dots of each component.
struct ClosedComponent {
    int genus = 0;
    int dots = 0;
};
/// Value of a closed dotted surface under the relations (sphere 0, dotted sphere 1, torus 2).
Int evaluate_closed(const std::vector<ClosedComponent>& components);

}  // namespace khmr
