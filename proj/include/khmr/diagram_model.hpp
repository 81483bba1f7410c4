/**
 * @file diagram_model.hpp
 * @brief Diagrams of links in connected sums of S1 x S2: crossings, gates, moves, knotification.
 *
 * A diagram is a 4-valent/2n-valent planar graph.  Crossings are written
 * X[a,b,c,d]: edge labels counterclockwise, a the incoming under edge, c the
 * outgoing under edge; the crossing is positive when the over strand runs
 * d -> b.  A gate is where the strands of a surgery band cross the cutting
 * sphere; its strands are listed left to right, bottom labels below the cut,
 * top labels above, and its rotation is bottom[0..n-1] then top[n-1..0].
 */
#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "khmr/planar_core.hpp"

namespace khmr {

struct Crossing {
    std::array<int, 4> x{};
    int sign = 1;
    bool operator==(const Crossing&) const = default;
};

struct GateStrand {
    int bottom = 0;
    int top = 0;
    int dir = 1;  ///< +1 runs bottom to top, -1 top to bottom
    bool operator==(const GateStrand&) const = default;
};

struct Gate {
    std::vector<GateStrand> strands;
    int orientation = 1;  ///< orientation of the surgery line relative to "up"
    std::string insert_at;
    int width() const { return static_cast<int>(strands.size()); }
    bool operator==(const Gate&) const = default;
};

struct MrDiagram {
    std::string name;
    std::vector<int> edges;  ///< every edge label, including free loops
    std::vector<Crossing> crossings;
    std::vector<Gate> gates;

    int r() const { return static_cast<int>(gates.size()); }
    std::vector<int> free_loops() const;
    bool operator==(const MrDiagram&) const = default;
};

/// Per-gate quantities of one full twist on the gate's strands.
struct ShiftingData {
    int n = 0;
    int n_plus = 0;
    int n_minus = 0;
    int N = 0;    ///< 2 n_minus - n_plus
    int eta = 0;  ///< orientation * (#up - #down)
    bool operator==(const ShiftingData&) const = default;
};

/// A point on an edge, pos in (0,1) along the edge orientation.
struct EdgePoint {
    int edge = 0;
    double pos = 0.5;
};

struct MoveSpec {
    enum class Kind { R1Add, R1Remove, R2, Finger, Wrap, Mirror };
    Kind kind = Kind::R1Add;
    int edge = 0;        ///< R1Add: edge; R2: over edge; R1Remove: crossing index
    int edge2 = 0;       ///< R2: under edge
    int variant = 0;     ///< R1Add: 0..3 kink shape
    int face = -1;       ///< R2: face index (-1 picks the first face containing both edges)
    int gate = 0;        ///< Finger, Wrap, Mirror
    int side = 0;        ///< Finger: 0 left, 1 right
    int sign = 1;        ///< Wrap: +1 positive, -1 negative; Mirror: exponent below the gate
    int generator = 1;   ///< Mirror: braid generator index (1-based)
};

/// Parses JSON (object) or PD notation ("PD[X[...],...]" or bare X[...] lists).
MrDiagram parse_diagram(const std::string& text);
MrDiagram parse_pd(const std::string& text);
MrDiagram diagram_from_json(const nlohmann::json& j);
nlohmann::json diagram_to_json(const MrDiagram& d);
std::string serialize(const MrDiagram& d);
MrDiagram load_diagram(const std::string& path);

/// Structural checks (labels used twice with one head and one tail, gate strands consistent).
void validate(const MrDiagram& d);
/// Euler characteristic check of the rotation system.
bool is_planar_diagram(const MrDiagram& d);
int component_count(const MrDiagram& d);
/// Link component index of every edge (free loops included).
std::map<int, int> edge_components(const MrDiagram& d);
/// Reverses the orientation of one component (numbered as in edge_components).
MrDiagram reverse_component(const MrDiagram& d, int component);
std::vector<ShiftingData> shifting_data(const MrDiagram& d);
ShiftingData gate_shifting_data(const Gate& g);

/// Signed crossing built from compass positions (0=E,1=NE,...,7=SE) of the incoming ends.
Crossing geometric_crossing(int over_in_pos, int over_in, int over_out, int under_in_pos, int under_in, int under_out);

/// Replaces each gate i by k[i] full twists, producing a classical diagram.
MrDiagram build_Lk(const MrDiagram& d, const std::vector<int>& k);
/// Drops the gates: L(0).
MrDiagram base_link(const MrDiagram& d);

MrDiagram apply_move(const MrDiagram& d, const MoveSpec& m);

/// Connects the components at each pair of points by a band through a new width-2 gate.
MrDiagram knotify(const MrDiagram& d, const std::vector<std::pair<EdgePoint, EdgePoint>>& pairs);

/// Faces of the rotation system as lists of darts (vertex, slot); crossings come first, then gates.
struct Dart {
    int vertex = 0;
    int slot = 0;
    auto operator<=>(const Dart&) const = default;
};
std::vector<std::vector<Dart>> faces(const MrDiagram& d);

/// Classical diagram from a braid word (letters +-i, 1-based) closed up, all strands upward.
MrDiagram braid_closure(int strands, const std::vector<int>& word, const std::string& name = "");

}  // namespace khmr
