/**
 * @file diagram_model.cpp
 * @brief Parsing, validation, planarity, shifting data, moves and knotification.
 */
#include "khmr/diagram_model.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <numeric>
#include <regex>
#include <set>
#include <sstream>

namespace khmr {

namespace {

struct Slot {
    int vertex = -1;
    int slot = -1;
    bool operator==(const Slot&) const = default;
};

struct EdgeEnds {
    Slot tail;
    Slot head;
};

int crossing_count(const MrDiagram& d) { return static_cast<int>(d.crossings.size()); }
int vertex_count(const MrDiagram& d) { return crossing_count(d) + d.r(); }

int vertex_degree(const MrDiagram& d, int v) {
    if (v < crossing_count(d)) return 4;
    return 2 * d.gates[v - crossing_count(d)].width();
}

int slot_label(const MrDiagram& d, Slot s) {
    const int c = crossing_count(d);
    if (s.vertex < c) return d.crossings[s.vertex].x[s.slot];
    const Gate& g = d.gates[s.vertex - c];
    const int n = g.width();
    return s.slot < n ? g.strands[s.slot].bottom : g.strands[2 * n - 1 - s.slot].top;
}

void set_slot_label(MrDiagram& d, Slot s, int label) {
    const int c = crossing_count(d);
    if (s.vertex < c) {
        d.crossings[s.vertex].x[s.slot] = label;
        return;
    }
    Gate& g = d.gates[s.vertex - c];
    const int n = g.width();
    if (s.slot < n)
        g.strands[s.slot].bottom = label;
    else
        g.strands[2 * n - 1 - s.slot].top = label;
}

/// True when the edge at this slot enters the vertex here.
bool slot_is_head(const MrDiagram& d, Slot s) {
    const int c = crossing_count(d);
    if (s.vertex < c) {
        const Crossing& x = d.crossings[s.vertex];
        switch (s.slot) {
            case 0: return true;
            case 2: return false;
            case 3: return x.sign > 0;
            default: return x.sign < 0;
        }
    }
    const Gate& g = d.gates[s.vertex - c];
    const int n = g.width();
    if (s.slot < n) return g.strands[s.slot].dir > 0;
    return g.strands[2 * n - 1 - s.slot].dir < 0;
}

/// Slot through which the strand leaves after entering at head slot s.
int continuation(const MrDiagram& d, Slot s) {
    const int c = crossing_count(d);
    if (s.vertex < c) {
        switch (s.slot) {
            case 0: return 2;
            case 3: return 1;
            case 1: return 3;
            default: throw std::logic_error("continuation from an outgoing slot");
        }
    }
    const int n = d.gates[s.vertex - c].width();
    return 2 * n - 1 - s.slot;
}

std::map<int, EdgeEnds> edge_ends(const MrDiagram& d) {
    std::map<int, EdgeEnds> ends;
    std::map<int, int> tails, heads;
    for (int v = 0; v < vertex_count(d); ++v) {
        for (int s = 0; s < vertex_degree(d, v); ++s) {
            Slot sl{v, s};
            int label = slot_label(d, sl);
            if (slot_is_head(d, sl)) {
                if (heads[label]++) throw InvalidInput("edge " + std::to_string(label) + " enters two vertices");
                ends[label].head = sl;
            } else {
                if (tails[label]++) throw InvalidInput("edge " + std::to_string(label) + " leaves two vertices");
                ends[label].tail = sl;
            }
        }
    }
    for (auto& [label, e] : ends)
        if (e.head.vertex < 0 || e.tail.vertex < 0)
            throw InvalidInput("edge " + std::to_string(label) + " is not oriented consistently");
    return ends;
}

Slot other_end(const std::map<int, EdgeEnds>& ends, const MrDiagram& d, Slot s) {
    const EdgeEnds& e = ends.at(slot_label(d, s));
    return e.head == s ? e.tail : e.head;
}

int fresh_label(const MrDiagram& d) {
    int m = 0;
    for (int e : d.edges) m = std::max(m, e);
    return m + 1;
}

void normalize_edges(MrDiagram& d) {
    std::sort(d.edges.begin(), d.edges.end());
    d.edges.erase(std::unique(d.edges.begin(), d.edges.end()), d.edges.end());
}

void remove_edge(MrDiagram& d, int e) { d.edges.erase(std::remove(d.edges.begin(), d.edges.end(), e), d.edges.end()); }

struct FaceData {
    std::vector<std::vector<Dart>> faces;
    std::map<Dart, int> face_of;
};

FaceData face_data(const MrDiagram& d) {
    FaceData fd;
    auto ends = edge_ends(d);
    for (int v = 0; v < vertex_count(d); ++v) {
        for (int s = 0; s < vertex_degree(d, v); ++s) {
            Dart start{v, s};
            if (fd.face_of.count(start)) continue;
            int id = static_cast<int>(fd.faces.size());
            fd.faces.emplace_back();
            Dart cur = start;
            while (!fd.face_of.count(cur)) {
                fd.face_of[cur] = id;
                fd.faces[id].push_back(cur);
                Slot o = other_end(ends, d, Slot{cur.vertex, cur.slot});
                cur = Dart{o.vertex, (o.slot + 1) % vertex_degree(d, o.vertex)};
            }
        }
    }
    return fd;
}

void insert_braid_letter(MrDiagram& d, std::vector<int>& cur, std::vector<int>& dirs, int letter, int& next) {
    const int i = std::abs(letter);
    const int l = i - 1, r = i;
    const int sw = cur[l], se = cur[r];
    const int nw = next++, ne = next++;
    d.edges.push_back(nw);
    d.edges.push_back(ne);
    // Strand a runs SW-NE, strand b runs SE-NW.
    const int da = dirs[l], db = dirs[r];
    int a_in_pos = da > 0 ? 5 : 1, a_in = da > 0 ? sw : ne, a_out = da > 0 ? ne : sw;
    int b_in_pos = db > 0 ? 7 : 3, b_in = db > 0 ? se : nw, b_out = db > 0 ? nw : se;
    if (letter > 0)
        d.crossings.push_back(geometric_crossing(a_in_pos, a_in, a_out, b_in_pos, b_in, b_out));
    else
        d.crossings.push_back(geometric_crossing(b_in_pos, b_in, b_out, a_in_pos, a_in, a_out));
    cur[l] = nw;
    cur[r] = ne;
    std::swap(dirs[l], dirs[r]);
}

/// Replaces every occurrence of label `from` by `to` in slots.
void rename_label(MrDiagram& d, int from, int to) {
    for (auto& x : d.crossings)
        for (int& l : x.x)
            if (l == from) l = to;
    for (auto& g : d.gates)
        for (auto& s : g.strands) {
            if (s.bottom == from) s.bottom = to;
            if (s.top == from) s.top = to;
        }
    remove_edge(d, from);
}

int parse_dir(const nlohmann::json& j) {
    if (j.is_string()) {
        std::string s = j.get<std::string>();
        if (s == "up") return 1;
        if (s == "down") return -1;
        throw InvalidInput("gate strand dir must be \"up\" or \"down\"");
    }
    int v = j.get<int>();
    if (v != 1 && v != -1) throw InvalidInput("gate strand dir must be +1 or -1");
    return v;
}

}  // namespace

std::vector<int> MrDiagram::free_loops() const {
    std::set<int> used;
    for (auto& x : crossings) used.insert(x.x.begin(), x.x.end());
    for (auto& g : gates)
        for (auto& s : g.strands) {
            used.insert(s.bottom);
            used.insert(s.top);
        }
    std::vector<int> out;
    for (int e : edges)
        if (!used.count(e)) out.push_back(e);
    return out;
}

Crossing geometric_crossing(int over_in_pos, int over_in, int over_out, int under_in_pos, int under_in, int under_out) {
    auto norm = [](int p) { return ((p % 8) + 8) % 8; };
    std::map<int, int> at;  // offset from under_in position -> label
    at[0] = under_in;
    at[4] = under_out;
    at[norm(over_in_pos - under_in_pos)] = over_in;
    at[norm(over_in_pos + 4 - under_in_pos)] = over_out;
    if (at.size() != 4) throw std::logic_error("geometric_crossing: strands do not cross");
    Crossing c;
    int i = 0;
    for (auto& [off, label] : at) c.x[i++] = label;
    int diff = norm(under_in_pos - over_in_pos);
    c.sign = (diff >= 1 && diff <= 3) ? 1 : -1;
    return c;
}

void validate(const MrDiagram& d) {
    std::set<int> declared(d.edges.begin(), d.edges.end());
    if (declared.size() != d.edges.size()) throw InvalidInput("duplicate edge labels");
    for (auto& x : d.crossings)
        if (x.sign != 1 && x.sign != -1) throw InvalidInput("crossing sign must be +1 or -1");
    for (auto& g : d.gates) {
        if (g.strands.empty()) throw InvalidInput("gate without strands");
        if (g.orientation != 1 && g.orientation != -1) throw InvalidInput("gate orientation must be +1 or -1");
        for (auto& s : g.strands)
            if (s.dir != 1 && s.dir != -1) throw InvalidInput("gate strand dir must be +1 or -1");
    }
    auto ends = edge_ends(d);
    for (auto& [label, e] : ends)
        if (!declared.count(label)) throw InvalidInput("edge " + std::to_string(label) + " not declared");
}

std::vector<std::vector<Dart>> faces(const MrDiagram& d) { return face_data(d).faces; }

bool is_planar_diagram(const MrDiagram& d) {
    const int V = vertex_count(d);
    if (V == 0) return true;
    auto ends = edge_ends(d);
    const int E = static_cast<int>(ends.size());
    const int F = static_cast<int>(face_data(d).faces.size());
    std::vector<int> parent(V);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (auto& [label, e] : ends) parent[find(e.head.vertex)] = find(e.tail.vertex);
    int K = 0;
    for (int v = 0; v < V; ++v) K += find(v) == v;
    return V - E + F == 2 * K;
}

int component_count(const MrDiagram& d) {
    auto ends = edge_ends(d);
    std::set<int> seen;
    int comps = static_cast<int>(d.free_loops().size());
    for (auto& [label, e0] : ends) {
        if (seen.count(label)) continue;
        ++comps;
        int cur = label;
        while (!seen.count(cur)) {
            seen.insert(cur);
            Slot h = ends.at(cur).head;
            cur = slot_label(d, Slot{h.vertex, continuation(d, h)});
        }
    }
    return comps;
}

ShiftingData gate_shifting_data(const Gate& g) {
    ShiftingData s;
    s.n = g.width();
    int up = 0, anti = 0;
    for (int j = 0; j < s.n; ++j) {
        up += g.strands[j].dir > 0;
        for (int l = j + 1; l < s.n; ++l) anti += g.strands[j].dir != g.strands[l].dir;
    }
    s.n_minus = 2 * anti;
    s.n_plus = s.n * (s.n - 1) - s.n_minus;
    s.N = 2 * s.n_minus - s.n_plus;
    s.eta = g.orientation * (up - (s.n - up));
    return s;
}

std::vector<ShiftingData> shifting_data(const MrDiagram& d) {
    std::vector<ShiftingData> out;
    for (auto& g : d.gates) out.push_back(gate_shifting_data(g));
    return out;
}

MrDiagram base_link(const MrDiagram& d) { return build_Lk(d, std::vector<int>(d.r(), 0)); }

MrDiagram build_Lk(const MrDiagram& d, const std::vector<int>& k) {
    if (static_cast<int>(k.size()) != d.r()) throw InvalidInput("build_Lk: need one twist count per gate");
    validate(d);
    // Gates stay in `out` while processing so that renames reach the gates not yet replaced.
    MrDiagram out = d;
    int next = fresh_label(d);
    for (int gi = 0; gi < d.r(); ++gi) {
        const int n = out.gates[gi].width();
        std::vector<int> base;
        for (int m = 2; m <= n; ++m) {
            for (int i = m - 1; i >= 1; --i) base.push_back(i);
            for (int i = 1; i <= m - 1; ++i) base.push_back(i);
        }
        std::vector<int> word;
        for (int t = 0; t < std::abs(k[gi]); ++t) {
            if (k[gi] > 0) {
                word.insert(word.end(), base.begin(), base.end());
            } else {
                for (auto it = base.rbegin(); it != base.rend(); ++it) word.push_back(-*it);
            }
        }
        std::vector<int> cur(n), dirs(n);
        for (int j = 0; j < n; ++j) {
            cur[j] = out.gates[gi].strands[j].bottom;
            dirs[j] = out.gates[gi].strands[j].dir;
        }
        for (int letter : word) insert_braid_letter(out, cur, dirs, letter, next);
        // The braid is pure: position j ends on strand j, whose top edge it joins.
        for (int j = 0; j < n; ++j) {
            const int top = out.gates[gi].strands[j].top;
            if (top == cur[j]) continue;
            rename_label(out, top, cur[j]);
            for (int& c : cur)
                if (c == top) c = cur[j];
        }
    }
    out.gates.clear();
    normalize_edges(out);
    return out;
}

MrDiagram braid_closure(int strands, const std::vector<int>& word, const std::string& name) {
    MrDiagram d;
    d.name = name;
    std::vector<int> cur(strands), dirs(strands, 1);
    for (int j = 0; j < strands; ++j) {
        cur[j] = j + 1;
        d.edges.push_back(j + 1);
    }
    int next = strands + 1;
    for (int letter : word) {
        if (letter == 0 || std::abs(letter) >= strands) throw InvalidInput("braid_closure: bad letter");
        insert_braid_letter(d, cur, dirs, letter, next);
    }
    for (int j = 0; j < strands; ++j)
        if (cur[j] != j + 1) rename_label(d, cur[j], j + 1);
    normalize_edges(d);
    return d;
}

MrDiagram diagram_from_json(const nlohmann::json& j) {
    MrDiagram d;
    if (j.contains("name")) d.name = j.at("name").get<std::string>();
    std::set<int> labels;
    for (auto& c : j.value("crossings", nlohmann::json::array())) {
        Crossing x;
        x.sign = c.value("sign", 0);
        if (c.contains("x")) {
            auto v = c.at("x").get<std::vector<int>>();
            if (v.size() != 4) throw InvalidInput("crossing x must have four labels");
            std::copy(v.begin(), v.end(), x.x.begin());
        } else {
            auto over = c.at("over").get<std::vector<int>>();
            auto under = c.at("under").get<std::vector<int>>();
            if (over.size() != 2 || under.size() != 2) throw InvalidInput("crossing over/under need [in,out]");
            if (x.sign == 1)
                x.x = {under[0], over[1], under[1], over[0]};
            else if (x.sign == -1)
                x.x = {under[0], over[0], under[1], over[1]};
        }
        if (x.sign != 1 && x.sign != -1) throw InvalidInput("crossing needs sign +1 or -1");
        labels.insert(x.x.begin(), x.x.end());
        d.crossings.push_back(x);
    }
    for (auto& gj : j.value("gates", nlohmann::json::array())) {
        Gate g;
        g.orientation = gj.value("orientation", 1);
        g.insert_at = gj.value("insert_at", std::string());
        for (auto& s : gj.at("strands")) {
            GateStrand st;
            st.bottom = s.at("bottom").get<int>();
            st.top = s.at("top").get<int>();
            st.dir = parse_dir(s.at("dir"));
            labels.insert(st.bottom);
            labels.insert(st.top);
            g.strands.push_back(st);
        }
        d.gates.push_back(g);
    }
    if (j.contains("edges"))
        d.edges = j.at("edges").get<std::vector<int>>();
    else
        d.edges.assign(labels.begin(), labels.end());
    for (int e : j.value("free_loops", std::vector<int>{}))
        if (std::find(d.edges.begin(), d.edges.end(), e) == d.edges.end()) d.edges.push_back(e);
    normalize_edges(d);
    validate(d);
    return d;
}

nlohmann::json diagram_to_json(const MrDiagram& d) {
    nlohmann::json j;
    if (!d.name.empty()) j["name"] = d.name;
    j["edges"] = d.edges;
    auto& xs = j["crossings"] = nlohmann::json::array();
    for (auto& x : d.crossings) {
        int ui = x.x[0], uo = x.x[2];
        int oi = x.sign > 0 ? x.x[3] : x.x[1];
        int oo = x.sign > 0 ? x.x[1] : x.x[3];
        xs.push_back({{"over", {oi, oo}}, {"under", {ui, uo}}, {"sign", x.sign}});
    }
    auto& gs = j["gates"] = nlohmann::json::array();
    for (auto& g : d.gates) {
        nlohmann::json strands = nlohmann::json::array();
        for (auto& s : g.strands)
            strands.push_back({{"bottom", s.bottom}, {"top", s.top}, {"dir", s.dir > 0 ? "up" : "down"}});
        nlohmann::json gj = {{"strands", strands}, {"orientation", g.orientation}};
        if (!g.insert_at.empty()) gj["insert_at"] = g.insert_at;
        gs.push_back(gj);
    }
    return j;
}

std::string serialize(const MrDiagram& d) { return diagram_to_json(d).dump(2); }

MrDiagram parse_pd(const std::string& text) {
    static const std::regex xre(R"(X\s*\[\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*,\s*(-?\d+)\s*\])");
    MrDiagram d;
    for (auto it = std::sregex_iterator(text.begin(), text.end(), xre); it != std::sregex_iterator(); ++it) {
        Crossing c;
        for (int i = 0; i < 4; ++i) c.x[i] = std::stoi((*it)[i + 1].str());
        c.sign = 0;
        d.crossings.push_back(c);
    }
    if (d.crossings.empty()) throw InvalidInput("no X[...] crossings found");
    // Orientation of over strands: propagate from the under strands, fall back to label order.
    const int nc = crossing_count(d);
    std::map<int, std::vector<std::pair<int, int>>> occ;  // label -> (crossing, slot)
    for (int c = 0; c < nc; ++c)
        for (int s = 0; s < 4; ++s) occ[d.crossings[c].x[s]].push_back({c, s});
    for (auto& [label, v] : occ)
        if (v.size() != 2) throw InvalidInput("PD label " + std::to_string(label) + " does not appear twice");
    // role: +1 head, -1 tail, 0 unknown
    std::map<std::pair<int, int>, int> role;
    for (int c = 0; c < nc; ++c) {
        role[{c, 0}] = 1;
        role[{c, 2}] = -1;
        role[{c, 1}] = role[{c, 3}] = 0;
    }
    auto propagate = [&]() {
        bool changed = true;
        while (changed) {
            changed = false;
            for (auto& [label, v] : occ) {
                int r0 = role[v[0]], r1 = role[v[1]];
                if (r0 && !r1) {
                    role[v[1]] = -r0;
                    changed = true;
                } else if (r1 && !r0) {
                    role[v[0]] = -r1;
                    changed = true;
                }
            }
            for (int c = 0; c < nc; ++c) {
                int r1 = role[{c, 1}], r3 = role[{c, 3}];
                if (r1 && !r3) {
                    role[{c, 3}] = -r1;
                    changed = true;
                } else if (r3 && !r1) {
                    role[{c, 1}] = -r3;
                    changed = true;
                }
            }
        }
    };
    propagate();
    for (int c = 0; c < nc; ++c) {
        if (role[{c, 1}] != 0) continue;
        const auto& x = d.crossings[c].x;
        int i = x[0], j = x[1], k = x[2], l = x[3];
        bool positive = (i == j || k == l || j - l == 1 || l - j > 1);
        role[{c, 3}] = positive ? 1 : -1;
        role[{c, 1}] = -role[{c, 3}];
        propagate();
    }
    for (int c = 0; c < nc; ++c) d.crossings[c].sign = role[{c, 3}] > 0 ? 1 : -1;
    for (auto& [label, v] : occ) d.edges.push_back(label);
    normalize_edges(d);
    validate(d);
    return d;
}

namespace {

MrDiagram parse_unchecked(const std::string& text) {
    auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(text);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(std::string("malformed JSON: ") + e.what());
        }
        try {
            return diagram_from_json(j);
        } catch (const nlohmann::json::exception& e) {
            throw InvalidInput(std::string("bad diagram JSON: ") + e.what());
        }
    }
    return parse_pd(text);
}

}  // namespace

MrDiagram parse_diagram(const std::string& text) {
    MrDiagram d = parse_unchecked(text);
    if (!is_planar_diagram(d)) throw InvalidInput("diagram is not planar (Euler characteristic check failed)");
    return d;
}

MrDiagram load_diagram(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    MrDiagram d = parse_diagram(ss.str());
    if (d.name.empty()) d.name = path;
    return d;
}

namespace {

MrDiagram move_r1_add(const MrDiagram& d0, int e, int variant) {
    MrDiagram d = d0;
    auto ends = edge_ends(d);
    int e1 = fresh_label(d), loop = e1 + 1, e2 = e1 + 2;
    Crossing x;
    switch (variant & 3) {
        case 0: x = {{e1, loop, loop, e2}, -1}; break;
        case 1: x = {{e1, e2, loop, loop}, 1}; break;
        case 2: x = {{loop, e1, e2, loop}, -1}; break;
        default: x = {{loop, loop, e2, e1}, 1}; break;
    }
    auto it = ends.find(e);
    if (it != ends.end()) {
        set_slot_label(d, it->second.tail, e1);
        set_slot_label(d, it->second.head, e2);
        remove_edge(d, e);
    } else {
        if (std::find(d.edges.begin(), d.edges.end(), e) == d.edges.end()) throw InvalidInput("R1: unknown edge");
        remove_edge(d, e);
        e2 = e1;  // kink on a free loop closes onto itself
        for (int& l : x.x)
            if (l == e1 + 2) l = e1;
    }
    d.crossings.push_back(x);
    d.edges.insert(d.edges.end(), {e1, loop});
    if (e2 != e1) d.edges.push_back(e2);
    normalize_edges(d);
    return d;
}

MrDiagram move_r1_remove(const MrDiagram& d0, int ci) {
    if (ci < 0 || ci >= crossing_count(d0)) throw InvalidInput("R1 remove: bad crossing index");
    MrDiagram d = d0;
    const Crossing x = d.crossings[ci];
    int loop_slot = -1;
    for (int s = 0; s < 4; ++s)
        if (x.x[s] == x.x[(s + 1) % 4]) loop_slot = s;
    if (loop_slot < 0) throw InvalidInput("R1 remove: crossing is not a kink");
    const int loop = x.x[loop_slot];
    int e_in = -1, e_out = -1;
    for (int s = 0; s < 4; ++s) {
        if (x.x[s] == loop) continue;
        if (slot_is_head(d, Slot{ci, s}))
            e_in = x.x[s];
        else
            e_out = x.x[s];
    }
    auto ends = edge_ends(d);
    d.crossings.erase(d.crossings.begin() + ci);
    remove_edge(d, loop);
    if (e_in != e_out) {
        // e_out's far end now receives e_in.
        Slot far = ends.at(e_out).head;
        if (far.vertex > ci) --far.vertex;
        set_slot_label(d, far, e_in);
        remove_edge(d, e_out);
    }
    normalize_edges(d);
    return d;
}

MrDiagram move_r2(const MrDiagram& d0, int o, int u, int face_index) {
    if (o == u) throw InvalidInput("R2: edges must differ");
    MrDiagram d = d0;
    auto ends = edge_ends(d);
    FaceData fd = face_data(d);
    auto find_dart = [&](int f, int label) -> std::optional<Dart> {
        for (auto& dt : fd.faces[f])
            if (slot_label(d, Slot{dt.vertex, dt.slot}) == label) return dt;
        return std::nullopt;
    };
    int f = face_index;
    if (f < 0) {
        for (int i = 0; i < static_cast<int>(fd.faces.size()) && f < 0; ++i)
            if (find_dart(i, o) && find_dart(i, u)) f = i;
    }
    if (f < 0 || f >= static_cast<int>(fd.faces.size())) throw InvalidInput("R2: edges share no face");
    auto od = find_dart(f, o), ud = find_dart(f, u);
    if (!od || !ud) throw InvalidInput("R2: edge not on the given face");
    Slot o_start{od->vertex, od->slot}, u_start{ud->vertex, ud->slot};
    Slot o_end = other_end(ends, d, o_start), u_end = other_end(ends, d, u_start);
    const bool along_o = ends.at(o).tail == o_start;
    const bool along_u = ends.at(u).tail == u_start;
    int next = fresh_label(d);
    int o1 = next++, o2 = next++, o3 = next++, u1 = next++, u2 = next++, u3 = next++;
    set_slot_label(d, o_start, o1);
    set_slot_label(d, o_end, o3);
    set_slot_label(d, u_start, u1);
    set_slot_label(d, u_end, u3);
    remove_edge(d, o);
    remove_edge(d, u);
    d.edges.insert(d.edges.end(), {o1, o2, o3, u1, u2, u3});
    const int E = 0, N = 2, W = 4, S = 6;
    // First crossing: o heads south (o1 north, o2 south), u heads west (u2 east, u3 west).
    d.crossings.push_back(geometric_crossing(along_o ? N : S, along_o ? o1 : o2, along_o ? o2 : o1,
                                             along_u ? E : W, along_u ? u2 : u3, along_u ? u3 : u2));
    // Second crossing: o heads north (o2 south, o3 north), u heads west (u1 east, u2 west).
    d.crossings.push_back(geometric_crossing(along_o ? S : N, along_o ? o2 : o3, along_o ? o3 : o2,
                                             along_u ? E : W, along_u ? u1 : u2, along_u ? u2 : u1));
    normalize_edges(d);
    return d;
}

/// The traversal used by finger and wrap moves, keeping the chosen side face on its right.
struct SideTraversal {
    Slot start, end;
    int edge = 0;
    bool along = true;
};

SideTraversal side_traversal(const MrDiagram& d, int gi, int side) {
    auto ends = edge_ends(d);
    const int gv = crossing_count(d) + gi;
    const int n = d.gates[gi].width();
    SideTraversal t;
    if (side == 0) {
        t.end = Slot{gv, 2 * n - 1};
        t.start = other_end(ends, d, t.end);
    } else {
        t.start = Slot{gv, n};
        t.end = other_end(ends, d, t.start);
    }
    t.edge = slot_label(d, t.start);
    t.along = ends.at(t.edge).tail == t.start;
    return t;
}

MrDiagram move_finger(const MrDiagram& d0, int gi, int side) {
    if (gi < 0 || gi >= d0.r()) throw InvalidInput("finger: bad gate index");
    MrDiagram d = d0;
    SideTraversal t = side_traversal(d, gi, side);
    const int e = t.edge;
    const int f = fresh_label(d), cap = f + 1;
    set_slot_label(d, t.end, f);
    d.edges.insert(d.edges.end(), {f, cap});
    GateStrand p1{e, cap, t.along ? 1 : -1};
    GateStrand p2{f, cap, t.along ? -1 : 1};
    auto& strands = d.gates[gi].strands;
    if (side == 0) {
        strands.insert(strands.begin(), {p2, p1});
    } else {
        strands.push_back(p2);
        strands.push_back(p1);
    }
    normalize_edges(d);
    return d;
}

MrDiagram move_wrap(const MrDiagram& d0, int gi, int sign) {
    if (gi < 0 || gi >= d0.r()) throw InvalidInput("wrap: bad gate index");
    if (sign != 1 && sign != -1) throw InvalidInput("wrap: sign must be +1 or -1");
    MrDiagram d = d0;
    SideTraversal t = side_traversal(d, gi, 0);
    const int n = d.gates[gi].width();
    int next = fresh_label(d);
    const int f = next++;
    set_slot_label(d, t.end, f);
    d.edges.push_back(f);
    // Line pieces in traversal order: L[0] = e ... L[2n] = f.
    std::vector<int> L(2 * n + 1);
    L[0] = t.edge;
    L[2 * n] = f;
    for (int i = 1; i < 2 * n; ++i) {
        L[i] = next++;
        d.edges.push_back(L[i]);
    }
    const int eo = t.along ? 1 : -1;
    const int o = d.gates[gi].orientation;
    const bool south_over = sign * o * eo > 0;
    const int E = 0, N = 2, W = 4, S = 6;
    for (int j = 0; j < n; ++j) {
        GateStrand& st = d.gates[gi].strands[j];
        const int x = st.top;
        const int x1 = next++, x2 = next++;
        d.edges.insert(d.edges.end(), {x1, x2});
        st.top = x1;
        const bool up = st.dir > 0;
        // South crossing: strand pieces x1 (south) and x2 (north); line pieces L[j] (west), L[j+1] (east).
        {
            int s_pos = up ? S : N, s_in = up ? x1 : x2, s_out = up ? x2 : x1;
            int l_pos = t.along ? W : E, l_in = t.along ? L[j] : L[j + 1], l_out = t.along ? L[j + 1] : L[j];
            d.crossings.push_back(south_over ? geometric_crossing(l_pos, l_in, l_out, s_pos, s_in, s_out)
                                             : geometric_crossing(s_pos, s_in, s_out, l_pos, l_in, l_out));
        }
        // North crossing: strand pieces x2 (south) and x (north); line pieces L[2n-j] (west), L[2n-1-j] (east).
        {
            int s_pos = up ? S : N, s_in = up ? x2 : x, s_out = up ? x : x2;
            int west = L[2 * n - j], east = L[2 * n - 1 - j];
            int l_pos = t.along ? E : W, l_in = t.along ? east : west, l_out = t.along ? west : east;
            d.crossings.push_back(south_over ? geometric_crossing(s_pos, s_in, s_out, l_pos, l_in, l_out)
                                             : geometric_crossing(l_pos, l_in, l_out, s_pos, s_in, s_out));
        }
    }
    normalize_edges(d);
    return d;
}

MrDiagram move_mirror(const MrDiagram& d0, int gi, int generator, int sign) {
    if (gi < 0 || gi >= d0.r()) throw InvalidInput("mirror: bad gate index");
    MrDiagram d = d0;
    Gate g = d.gates[gi];
    const int n = g.width();
    if (generator < 1 || generator >= n) throw InvalidInput("mirror: generator out of range");
    if (sign != 1 && sign != -1) throw InvalidInput("mirror: sign must be +1 or -1");
    const int l = generator - 1, r = generator;
    int next = fresh_label(d);
    // Below the gate.
    std::vector<int> cur{g.strands[l].bottom, g.strands[r].bottom};
    std::vector<int> dirs{g.strands[l].dir, g.strands[r].dir};
    insert_braid_letter(d, cur, dirs, sign, next);
    const int new_bottom_l = cur[0], new_bottom_r = cur[1];
    // Above the gate, the inverse letter: new labels at the gate, old top labels beyond.
    const int a_l = next++, a_r = next++;
    d.edges.insert(d.edges.end(), {a_l, a_r});
    std::vector<int> cur2{a_l, a_r};
    std::vector<int> dirs2{g.strands[r].dir, g.strands[l].dir};
    insert_braid_letter(d, cur2, dirs2, -sign, next);
    // cur2 now holds the labels leaving upward; join them to the old top edges.
    rename_label(d, cur2[0], g.strands[l].top);
    rename_label(d, cur2[1], g.strands[r].top);
    Gate& gg = d.gates[gi];
    gg.strands[l] = GateStrand{new_bottom_l, a_l, g.strands[r].dir};
    gg.strands[r] = GateStrand{new_bottom_r, a_r, g.strands[l].dir};
    normalize_edges(d);
    return d;
}

}  // namespace

MrDiagram apply_move(const MrDiagram& d, const MoveSpec& m) {
    validate(d);
    MrDiagram out;
    switch (m.kind) {
        case MoveSpec::Kind::R1Add: out = move_r1_add(d, m.edge, m.variant); break;
        case MoveSpec::Kind::R1Remove: out = move_r1_remove(d, m.edge); break;
        case MoveSpec::Kind::R2: out = move_r2(d, m.edge, m.edge2, m.face); break;
        case MoveSpec::Kind::Finger: out = move_finger(d, m.gate, m.side); break;
        case MoveSpec::Kind::Wrap: out = move_wrap(d, m.gate, m.sign); break;
        case MoveSpec::Kind::Mirror: out = move_mirror(d, m.gate, m.generator, m.sign); break;
    }
    out.name = d.name;
    validate(out);
    if (!is_planar_diagram(out)) throw std::logic_error("move produced a non-planar diagram");
    return out;
}

namespace {

struct BandStep {
    int edge;          ///< crossed edge
    bool from_right;   ///< the face before the crossing lies to the right of the edge
};

struct BandRoute {
    bool start_left = false;  ///< first face lies to the left of the P edge
    bool end_left = false;    ///< last face lies to the left of the Q edge
    std::vector<BandStep> steps;
};

BandRoute route_band(const MrDiagram& d, int ep, int eq) {
    BandRoute route;
    if (vertex_count(d) == 0) return route;
    auto ends = edge_ends(d);
    FaceData fd = face_data(d);
    auto right_face = [&](int e) { Slot t = ends.at(e).tail; return fd.face_of.at(Dart{t.vertex, t.slot}); };
    auto left_face = [&](int e) { Slot h = ends.at(e).head; return fd.face_of.at(Dart{h.vertex, h.slot}); };
    const int F = static_cast<int>(fd.faces.size());
    std::vector<int> dist(F, -1), prev_face(F, -1), prev_edge(F, -1);
    std::deque<int> queue;
    for (int f : {right_face(ep), left_face(ep)})
        if (dist[f] < 0) {
            dist[f] = 0;
            queue.push_back(f);
        }
    std::set<int> targets{right_face(eq), left_face(eq)};
    int hit = -1;
    while (!queue.empty()) {
        int f = queue.front();
        queue.pop_front();
        if (targets.count(f)) {
            hit = f;
            break;
        }
        for (auto& dt : fd.faces[f]) {
            int e = slot_label(d, Slot{dt.vertex, dt.slot});
            if (e == ep || e == eq) continue;
            int g = right_face(e) == f ? left_face(e) : right_face(e);
            if (dist[g] >= 0) continue;
            dist[g] = dist[f] + 1;
            prev_face[g] = f;
            prev_edge[g] = e;
            queue.push_back(g);
        }
    }
    if (hit < 0) {
        // P and Q lie in different split pieces; place them side by side in their right faces.
        return route;
    }
    std::vector<int> path{hit};
    while (prev_face[path.back()] >= 0) {
        int f = path.back();
        route.steps.push_back({prev_edge[f], right_face(prev_edge[f]) == prev_face[f]});
        path.push_back(prev_face[f]);
    }
    std::reverse(route.steps.begin(), route.steps.end());
    const int first = path.back();
    route.start_left = left_face(ep) == first && right_face(ep) != first;
    route.end_left = left_face(eq) == hit && right_face(eq) != hit;
    if (right_face(eq) == hit && left_face(eq) == hit) route.end_left = route.start_left;
    return route;
}

struct EdgeSplit {
    int edge;
    double at;
    int first;
    int second;
};

struct BandResult {
    MrDiagram diagram;
    std::vector<EdgeSplit> splits;
};

BandResult add_band(const MrDiagram& d0, EdgePoint p, EdgePoint q, const std::string& tag) {
    const int ep = p.edge, eq = q.edge;
    if (ep == eq) throw InvalidInput("knotify: both band ends lie on edge " + std::to_string(ep));
    for (int e : {ep, eq})
        if (std::find(d0.edges.begin(), d0.edges.end(), e) == d0.edges.end())
            throw InvalidInput("knotify: unknown edge " + std::to_string(e));
    auto ends = edge_ends(d0);
    const bool p_free = !ends.count(ep), q_free = !ends.count(eq);
    BandRoute route;
    if (!p_free && !q_free) route = route_band(d0, ep, eq);
    const int m = static_cast<int>(route.steps.size());
    const bool twist = route.start_left != route.end_left;
    MrDiagram d = d0;
    int next = fresh_label(d);
    // Segments of each band strand from the P end (index 0) to the Q end (last).
    // A leaves P- and reaches Q+; B leaves Q- and reaches P+.
    const int segs = m + 2 + (twist ? 1 : 0);
    std::vector<int> A(segs), B(segs);
    for (int i = 0; i < segs; ++i) {
        A[i] = i == 0 ? ep : next++;
        B[i] = i == segs - 1 ? eq : (i == 0 && p_free ? ep : next++);
    }
    if (q_free) A[segs - 1] = eq;
    for (int i = 0; i < segs; ++i) {
        d.edges.push_back(A[i]);
        d.edges.push_back(B[i]);
    }
    BandResult res;
    res.splits.push_back({ep, p.pos, ep, B[0]});
    res.splits.push_back({eq, q.pos, eq, A[segs - 1]});
    // All relabelling happens before new vertices shift the gate indices.
    if (!p_free) set_slot_label(d, ends.at(ep).head, B[0]);
    if (!q_free) set_slot_label(d, ends.at(eq).head, A[segs - 1]);
    struct Split3 {
        int first, mid, last;
        bool east;
    };
    std::vector<Split3> crossed;
    for (auto& st : route.steps) {
        Split3 s{st.edge, next++, next++, st.from_right};
        set_slot_label(d, ends.at(st.edge).head, s.last);
        d.edges.insert(d.edges.end(), {s.mid, s.last});
        res.splits.push_back({st.edge, 0.5, s.first, s.last});
        crossed.push_back(s);
    }
    // Strand order left to right facing Q: 0 = A (up), 1 = B (down).
    const std::array<int, 2> order = route.start_left ? std::array<int, 2>{0, 1} : std::array<int, 2>{1, 0};
    auto seg = [&](int strand, int i) { return strand == 0 ? A[i] : B[i]; };
    const int E = 0, N = 2, W = 4, S = 6;
    const int SW = 5, NE = 1, SE = 7, NW = 3;
    for (int j = 0; j < m; ++j) {
        const Split3& x = crossed[j];
        for (int k = 0; k < 2; ++k) {
            const int s = order[k];
            // Band piece j+1 lies south of the crossing, piece j+2 north of it.
            const int south = seg(s, j + 1), north = seg(s, j + 2);
            const int o_pos = s == 0 ? S : N, o_in = s == 0 ? south : north, o_out = s == 0 ? north : south;
            // x meets the west band strand first when running east.
            const bool first_met = x.east ? k == 0 : k == 1;
            const int before = first_met ? x.first : x.mid, after = first_met ? x.mid : x.last;
            d.crossings.push_back(geometric_crossing(o_pos, o_in, o_out, x.east ? W : E, before, after));
        }
    }
    if (twist) {
        const int w = order[0], e = order[1];
        const int lo = m + 1, hi = m + 2;
        // w runs SW-NE, e runs SE-NW.
        const int w_pos = w == 0 ? SW : NE, w_in = w == 0 ? seg(w, lo) : seg(w, hi), w_out = w == 0 ? seg(w, hi) : seg(w, lo);
        const int e_pos = e == 0 ? SE : NW, e_in = e == 0 ? seg(e, lo) : seg(e, hi), e_out = e == 0 ? seg(e, hi) : seg(e, lo);
        Crossing c = geometric_crossing(w_pos, w_in, w_out, e_pos, e_in, e_out);
        if (c.sign < 0) c = geometric_crossing(e_pos, e_in, e_out, w_pos, w_in, w_out);
        d.crossings.push_back(c);
    }
    Gate g;
    g.orientation = 1;
    g.insert_at = tag;
    for (int s : order) g.strands.push_back({seg(s, 0), seg(s, 1), s == 0 ? 1 : -1});
    d.gates.push_back(g);
    normalize_edges(d);
    res.diagram = d;
    return res;
}

EdgePoint remap_point(EdgePoint pt, const std::vector<EdgeSplit>& splits) {
    for (auto& s : splits) {
        if (s.edge != pt.edge) continue;
        if (pt.pos < s.at) return {s.first, s.at > 0 ? pt.pos / s.at : 0.5};
        return {s.second, s.at < 1 ? (pt.pos - s.at) / (1 - s.at) : 0.5};
    }
    return pt;
}

/// Chooses band ends joining everything to the component of the smallest edge, shortest routes first.
std::vector<std::pair<EdgePoint, EdgePoint>> automatic_pairs(const MrDiagram& d) {
    std::vector<std::pair<EdgePoint, EdgePoint>> pairs;
    auto comp = edge_components(d);
    if (comp.empty()) return pairs;
    std::set<int> merged{comp.begin()->second};
    auto ends = edge_ends(d);
    std::set<int> all;
    for (auto& [e, c] : comp) all.insert(c);
    while (merged.size() < all.size()) {
        std::optional<std::tuple<int, int, int>> best;  // length, edge in merged, edge outside
        for (auto& [a, ca] : comp) {
            if (!merged.count(ca)) continue;
            for (auto& [b, cb] : comp) {
                if (merged.count(cb)) continue;
                int len = 0;
                if (ends.count(a) && ends.count(b)) {
                    auto r = route_band(d, a, b);
                    len = static_cast<int>(r.steps.size()) + (r.start_left != r.end_left);
                }
                if (!best || len < std::get<0>(*best)) best = std::tuple{len, a, b};
            }
        }
        auto [len, a, b] = *best;
        pairs.push_back({EdgePoint{a, 0.5}, EdgePoint{b, 0.5}});
        merged.insert(comp.at(b));
    }
    return pairs;
}

}  // namespace

std::map<int, int> edge_components(const MrDiagram& d) {
    auto ends = edge_ends(d);
    std::map<int, int> comp;
    int id = 0;
    for (auto& [label, e0] : ends) {
        if (comp.count(label)) continue;
        int cur = label;
        while (!comp.count(cur)) {
            comp[cur] = id;
            Slot h = ends.at(cur).head;
            cur = slot_label(d, Slot{h.vertex, continuation(d, h)});
        }
        ++id;
    }
    for (int e : d.free_loops()) comp[e] = id++;
    return comp;
}

MrDiagram reverse_component(const MrDiagram& d, int component) {
    validate(d);
    auto comp = edge_components(d);
    MrDiagram out = d;
    for (auto& x : out.crossings) {
        const bool under = comp.at(x.x[0]) == component;
        const bool over = comp.at(x.x[1]) == component;
        if (under) x.x = {x.x[2], x.x[3], x.x[0], x.x[1]};
        if (under != over) x.sign = -x.sign;
    }
    for (auto& g : out.gates)
        for (auto& s : g.strands)
            if (comp.at(s.bottom) == component) s.dir = -s.dir;
    validate(out);
    return out;
}

MrDiagram knotify(const MrDiagram& d, const std::vector<std::pair<EdgePoint, EdgePoint>>& pairs_in) {
    validate(d);
    auto pairs = pairs_in.empty() ? automatic_pairs(d) : pairs_in;
    MrDiagram cur = d;
    const int base = d.r();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        BandResult r = add_band(cur, pairs[i].first, pairs[i].second, "band" + std::to_string(base + i));
        cur = std::move(r.diagram);
        for (std::size_t j = i + 1; j < pairs.size(); ++j) {
            pairs[j].first = remap_point(pairs[j].first, r.splits);
            pairs[j].second = remap_point(pairs[j].second, r.splits);
        }
    }
    validate(cur);
    if (!is_planar_diagram(cur)) throw std::logic_error("knotify produced a non-planar diagram");
    return cur;
}

}  // namespace khmr
