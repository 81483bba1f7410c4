/**
 * @file chain_engine.hpp
 * @brief Bigraded chain complexes over the dotted cobordism category.
 *
 * A complex lives on a labelled boundary: labels[i] names boundary point i of
 * every object diagram.  Tensoring two complexes glues points carrying equal
 * labels.  Differentials are stored as out-going entries per object.
 */
#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "khmr/planar_core.hpp"

namespace khmr {

/// Raised when a configured size limit would be exceeded.
class ResourceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ShiftedObject {
    TLDiagram diagram;
    int h = 0;
    int q = 0;
    auto operator<=>(const ShiftedObject&) const = default;
};

struct ChainComplex {
    std::vector<int> labels;                       ///< boundary label of each point
    std::vector<ShiftedObject> objects;
    std::vector<std::map<int, LinComb>> differential;  ///< differential[src][tgt]

    std::size_t entry_count() const;
    /// Adds an object and returns its index.
    int add_object(ShiftedObject o);
    void add_entry(int src, int tgt, const LinComb& m);
    int min_h() const;
    int max_h() const;
};

/// Limits applied by the engine; zero means unlimited.
struct EngineLimits {
    std::size_t max_objects = 0;
    std::size_t max_entries = 0;
};
void set_engine_limits(EngineLimits limits);
EngineLimits engine_limits();

/// Complex of a single crossing X[a,b,c,d] (counterclockwise labels, a->c under, a incoming).
/// Positive crossings sit in h=0,1 with q=1,2; negative ones in h=-1,0 with q=-2,-1.
ChainComplex crossing_complex(const std::array<int, 4>& labels, int sign);
/// The same cube with the unshifted gradings h=0,1 and q=0,1.
ChainComplex unsigned_crossing_complex(const std::array<int, 4>& labels);
/// One object: a fixed planar matching on the given labels, at (h,q)=(0,0).
ChainComplex matching_complex(const std::vector<int>& labels, const TLDiagram& d);
/// A free circle at (0,0), already delooped.
ChainComplex circle_complex();

/// Tensor product gluing points with equal labels (each shared label appears exactly twice).
ChainComplex tensor(const ChainComplex& a, const ChainComplex& b);
/// Replaces every circle by a pair of shifted copies.
ChainComplex deloop(const ChainComplex& c);
/// Cancels isomorphism entries (equal diagrams, coefficient +-1) by Gaussian elimination.
ChainComplex gaussian_eliminate(const ChainComplex& c);
/// deloop followed by gaussian_eliminate.
ChainComplex simplify(const ChainComplex& c);
/// tensor followed by simplify.
ChainComplex compose_complexes(const ChainComplex& a, const ChainComplex& b);

ChainComplex shift(const ChainComplex& c, int dh, int dq);
/// Drops every object with h <= a.
ChainComplex truncate(const ChainComplex& c, int a);
/// Keeps objects with h >= h_min.
ChainComplex truncate_below(const ChainComplex& c, int h_min);
/// Permutes boundary points so that the labels appear in the given order.
ChainComplex reorder_boundary(const ChainComplex& c, const std::vector<int>& new_labels);
/// Rebuilds every object as a rectangle with @p bottom bottom points (point order unchanged).
ChainComplex as_rectangle(const ChainComplex& c, int bottom);

/// d o d == 0 on every pair of objects.
bool check_d_squared(const ChainComplex& c);
/// Every entry goes from h to h+1 and has degree zero after the shifts.
bool check_gradings(const ChainComplex& c);

struct HomologyCell {
    int free = 0;
    std::vector<Int> torsion;  ///< invariant factors greater than one, ascending
    bool operator==(const HomologyCell&) const = default;
};
using BigradedHomology = std::map<std::pair<int, int>, HomologyCell>;  ///< keyed by (h, q)

/// Homology of a complex whose objects are all empty diagrams.
BigradedHomology homology(const ChainComplex& c);
/// Nonzero invariant factors of an integer matrix (rows x cols, row-major).
std::vector<Int> smith_invariants(std::vector<std::vector<Int>> m);

std::string cell_to_string(const HomologyCell& cell);

nlohmann::json complex_to_json(const ChainComplex& c);
ChainComplex complex_from_json(const nlohmann::json& j);

/// Renumbers cycle masks from the cycle order of (s, t) to that of (s', t'), where
/// s' and t' are s and t with points renamed by perm (old point i becomes perm[i]).
Mask remap_mask(const TLDiagram& s, const TLDiagram& t, const TLDiagram& s2, const TLDiagram& t2,
                const std::vector<int>& perm, Mask m);

}  // namespace khmr
