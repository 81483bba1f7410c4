/**
 * @file kh_pipeline.cpp
 * @brief Scan composition of crossing and twist pieces, k schedule and result output.
 */
#include "khmr/kh_pipeline.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <tuple>

#include "khmr/twist_factory.hpp"

namespace khmr {

namespace {

std::mutex observer_mutex;
ComplexObserver observer;

void observe(const ChainComplex& c, const std::string& where) {
    std::lock_guard<std::mutex> lock(observer_mutex);
    if (observer) observer(c, where);
}

struct Piece {
    std::vector<int> labels;
    ChainComplex complex;
    int h_max = 0;
    std::string name;
};

ChainComplex unit_complex() {
    ChainComplex c;
    c.add_object({TLDiagram{}, 0, 0});
    return c;
}

std::mutex twist_mutex;
std::map<std::tuple<int, int, std::optional<int>>, ChainComplex> twist_memo;

ChainComplex twist_piece(const Gate& g, int k, std::optional<int> h_floor, const PipelineConfig& cfg) {
    TwistSpec spec;
    spec.n = g.width();
    spec.k = k;
    for (auto& s : g.strands) spec.orientation.push_back(s.dir);
    if (cfg.cache_root) return TwistCache(*cfg.cache_root).get(spec, h_floor);
    const auto key = std::tuple{spec.n, k, h_floor};
    {
        std::lock_guard<std::mutex> lock(twist_mutex);
        auto it = twist_memo.find(key);
        if (it != twist_memo.end()) return it->second;
    }
    ChainComplex c = reduced_twist_complex(spec, h_floor);
    std::lock_guard<std::mutex> lock(twist_mutex);
    twist_memo.emplace(key, c);
    return c;
}

/// Number of boundary points left after gluing the two label lists.
int glued_size(const std::vector<int>& a, const std::vector<int>& b) {
    std::map<int, int> count;
    for (int l : a) ++count[l];
    for (int l : b) ++count[l];
    int n = 0;
    for (auto& [l, c] : count) n += c == 1;
    return n;
}

int shared_count(const std::vector<int>& a, const std::vector<int>& b) {
    int n = 0;
    for (int l : b) n += std::count(a.begin(), a.end(), l) > 0;
    return n;
}

int positive_crossings(const MrDiagram& d) {
    int n = 0;
    for (auto& x : d.crossings) n += x.sign > 0;
    return n;
}

}  // namespace

void set_complex_observer(ComplexObserver obs) {
    std::lock_guard<std::mutex> lock(observer_mutex);
    observer = std::move(obs);
}

bool has_odd_gate(const MrDiagram& d) {
    for (auto& g : d.gates)
        if (g.width() % 2 != 0) return true;
    return false;
}

ChainComplex finite_complex(const MrDiagram& d, const std::vector<int>& k, const PipelineConfig& cfg,
                            std::optional<int> h_floor) {
    validate(d);
    if (static_cast<int>(k.size()) != d.r()) throw InvalidInput("finite_complex: need one twist count per gate");
    if (has_odd_gate(d)) throw InvalidInput("finite_complex: gate with an odd number of strands");
    set_engine_limits(cfg.limits);
    std::vector<Piece> pieces;
    for (std::size_t i = 0; i < d.crossings.size(); ++i) {
        const Crossing& x = d.crossings[i];
        pieces.push_back({{x.x.begin(), x.x.end()}, crossing_complex(x.x, x.sign), x.sign > 0 ? 1 : 0,
                          "crossing " + std::to_string(i)});
    }
    int total_h_max = 0;
    for (auto& p : pieces) total_h_max += p.h_max;
    for (int gi = 0; gi < d.r(); ++gi) {
        const Gate& g = d.gates[gi];
        const int n = g.width();
        // Twist complexes are non-positive in h, so only the crossings bound what lies above them.
        std::optional<int> t_floor;
        if (h_floor) t_floor = *h_floor - 1 - total_h_max;
        ChainComplex t = twist_piece(g, k[gi], t_floor, cfg);
        observe(t, "twist n=" + std::to_string(n) + " k=" + std::to_string(k[gi]));
        for (int j = 0; j < n; ++j) {
            t.labels[j] = g.strands[j].bottom;
            t.labels[n + j] = g.strands[j].top;
        }
        Piece p{t.labels, t, t.objects.empty() ? 0 : t.max_h(), "gate " + std::to_string(gi)};
        pieces.push_back(std::move(p));
    }
    for (int gi = 0; gi < d.r(); ++gi) total_h_max += pieces[d.crossings.size() + gi].h_max;

    ChainComplex acc = unit_complex();
    int rest_h_max = total_h_max;
    std::vector<bool> used(pieces.size(), false);
    for (std::size_t step = 0; step < pieces.size(); ++step) {
        int best = -1, best_size = 0, best_shared = 0;
        for (std::size_t i = 0; i < pieces.size(); ++i) {
            if (used[i]) continue;
            int size = glued_size(acc.labels, pieces[i].labels);
            int shared = shared_count(acc.labels, pieces[i].labels);
            if (best < 0 || size < best_size || (size == best_size && shared > best_shared)) {
                best = static_cast<int>(i);
                best_size = size;
                best_shared = shared;
            }
        }
        used[best] = true;
        Piece& p = pieces[best];
        rest_h_max -= p.h_max;
        ChainComplex piece = p.complex;
        if (h_floor) piece = truncate_below(piece, *h_floor - 1 - (total_h_max - p.h_max));
        acc = compose_complexes(acc, piece);
        // Objects below this degree only affect homology below h_floor.
        if (h_floor) acc = truncate_below(acc, *h_floor - 1 - rest_h_max);
        observe(acc, "scan after " + p.name);
    }
    for (std::size_t i = 0; i < d.free_loops().size(); ++i) {
        acc = compose_complexes(acc, circle_complex());
        if (h_floor) acc = truncate_below(acc, *h_floor - 1);
    }
    if (!acc.labels.empty()) throw std::logic_error("finite_complex: boundary left open");
    observe(acc, "closed complex of " + (d.name.empty() ? std::string("diagram") : d.name));
    return acc;
}

BigradedHomology classical_homology(const MrDiagram& d) {
    if (d.r() != 0) throw InvalidInput("classical_homology: diagram has gates");
    return homology(finite_complex(d, {}));
}

int initial_twist_count(const MrDiagram& d, int h_min) {
    const int top = positive_crossings(d);
    return std::max(1, (1 + top - h_min) / 2 + 1);
}

BigradedHomology restrict_window(const BigradedHomology& h, int h_min) {
    BigradedHomology out;
    for (auto& [hq, cell] : h)
        if (hq.first >= h_min && (cell.free > 0 || !cell.torsion.empty())) out[hq] = cell;
    return out;
}

BigradedHomology shift_table(const BigradedHomology& h, int dh, int dq) {
    BigradedHomology out;
    for (auto& [hq, cell] : h) out[{hq.first + dh, hq.second + dq}] = cell;
    return out;
}

std::vector<std::string> table_differences(const BigradedHomology& a, const BigradedHomology& b) {
    std::vector<std::string> out;
    std::set<std::pair<int, int>> keys;
    for (auto& [k, c] : a) keys.insert(k);
    for (auto& [k, c] : b) keys.insert(k);
    for (auto& key : keys) {
        HomologyCell ca = a.count(key) ? a.at(key) : HomologyCell{};
        HomologyCell cb = b.count(key) ? b.at(key) : HomologyCell{};
        if (ca != cb)
            out.push_back("(" + std::to_string(key.first) + "," + std::to_string(key.second) + "): " +
                          cell_to_string(ca) + " vs " + cell_to_string(cb));
    }
    return out;
}

KhResult khovanov_homology(const MrDiagram& d, int h_min, const PipelineConfig& cfg) {
    validate(d);
    KhResult res;
    res.name = d.name;
    res.h_min = h_min;
    for (auto& s : shifting_data(d)) res.eta.push_back(s.eta);
    if (has_odd_gate(d)) {
        res.odd_intersection = true;
        res.flags.push_back("odd-intersection");
        return res;
    }
    if (d.r() == 0) {
        res.table = restrict_window(homology(finite_complex(d, {}, cfg, h_min)), h_min);
        return res;
    }
    bool eta_zero = std::all_of(res.eta.begin(), res.eta.end(), [](int e) { return e == 0; });
    if (!eta_zero) res.flags.push_back("grading-defined-up-to-eta-shift");
    auto table_for = [&](int k) {
        return restrict_window(homology(finite_complex(d, std::vector<int>(d.r(), k), cfg, h_min)), h_min);
    };
    int k = initial_twist_count(d, h_min);
    if (k + 1 > cfg.k_ceiling)
        throw StabilizationError("twist count " + std::to_string(k + 1) + " exceeds the ceiling", {}, {});
    BigradedHomology a, b;
    if (cfg.jobs > 1) {
        auto fa = std::async(std::launch::async, table_for, k);
        b = table_for(k + 1);
        a = fa.get();
    } else {
        a = table_for(k);
        b = table_for(k + 1);
    }
    while (a != b) {
        if (k + 2 > cfg.k_ceiling)
            throw StabilizationError("tables still differ at k=" + std::to_string(k + 1) + " (ceiling " +
                                         std::to_string(cfg.k_ceiling) + ")",
                                     b, a);
        ++k;
        a = std::move(b);
        b = table_for(k + 1);
    }
    res.table = std::move(a);
    res.k_used.assign(d.r(), k);
    return res;
}

ShiftReport wrap_shift_check(const MrDiagram& d, int gate, int sign, int h_min, const PipelineConfig& cfg) {
    ShiftReport rep;
    if (gate < 0 || gate >= d.r()) throw InvalidInput("wrap_shift_check: bad gate index");
    const int eta = gate_shifting_data(d.gates[gate]).eta;
    rep.dh = sign * eta;
    rep.dq = 3 * sign * eta;
    MoveSpec m;
    m.kind = MoveSpec::Kind::Wrap;
    m.gate = gate;
    m.sign = sign;
    MrDiagram wrapped = apply_move(d, m);
    rep.before = khovanov_homology(d, h_min, cfg).table;
    rep.after = khovanov_homology(wrapped, h_min + rep.dh, cfg).table;
    rep.mismatches = table_differences(shift_table(rep.before, rep.dh, rep.dq), rep.after);
    rep.ok = rep.mismatches.empty();
    return rep;
}

KhResult knotification_homology(const MrDiagram& link, const std::vector<std::pair<EdgePoint, EdgePoint>>& pairs,
                                int h_min, const PipelineConfig& cfg) {
    if (link.r() != 0) throw InvalidInput("knotification_homology: input must be a link in the 3-sphere");
    return khovanov_homology(knotify(link, pairs), h_min, cfg);
}

nlohmann::json result_to_json(const KhResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (auto& [hq, cell] : r.table) {
        nlohmann::json torsion = nlohmann::json::array();
        for (auto& t : cell.torsion) torsion.push_back(t.convert_to<long long>());
        rows.push_back({{"h", hq.first}, {"q", hq.second}, {"free", cell.free}, {"torsion", torsion}});
    }
    int h_max = r.h_min;
    for (auto& [hq, cell] : r.table) h_max = std::max(h_max, hq.first);
    return {{"diagram", r.name},
            {"window", {{"h_min", r.h_min}, {"h_max", h_max}}},
            {"k_used", r.k_used},
            {"eta", r.eta},
            {"odd_intersection", r.odd_intersection},
            {"flags", r.flags},
            {"rows", rows}};
}

std::string result_to_tsv(const KhResult& r) {
    std::ostringstream out;
    out << "# diagram=" << r.name << " h_min=" << r.h_min << " k_used=";
    for (std::size_t i = 0; i < r.k_used.size(); ++i) out << (i ? "," : "") << r.k_used[i];
    for (auto& f : r.flags) out << " " << f;
    out << "\nh\tq\tfree\ttorsion\n";
    for (auto& [hq, cell] : r.table) {
        out << hq.first << '\t' << hq.second << '\t' << cell.free << '\t';
        if (cell.torsion.empty()) out << '-';
        for (std::size_t i = 0; i < cell.torsion.size(); ++i) out << (i ? "," : "") << cell.torsion[i];
        out << '\n';
    }
    return out.str();
}

std::string result_to_grid(const KhResult& r) {
    if (r.table.empty()) return "(zero table)\n";
    int h_lo = r.table.begin()->first.first, h_hi = h_lo, q_lo = r.table.begin()->first.second, q_hi = q_lo;
    for (auto& [hq, cell] : r.table) {
        h_lo = std::min(h_lo, hq.first);
        h_hi = std::max(h_hi, hq.first);
        q_lo = std::min(q_lo, hq.second);
        q_hi = std::max(q_hi, hq.second);
    }
    std::size_t width = 4;
    for (auto& [hq, cell] : r.table) width = std::max(width, cell_to_string(cell).size() + 1);
    std::ostringstream out;
    auto pad = [&](const std::string& s) { out << std::string(width - std::min(width, s.size()), ' ') << s; };
    pad("q\\h");
    for (int h = h_lo; h <= h_hi; ++h) pad(std::to_string(h));
    out << '\n';
    for (int q = q_hi; q >= q_lo; --q) {
        bool any = false;
        for (int h = h_lo; h <= h_hi; ++h) any |= r.table.count({h, q}) > 0;
        if (!any) continue;
        pad(std::to_string(q));
        for (int h = h_lo; h <= h_hi; ++h) {
            auto it = r.table.find({h, q});
            pad(it == r.table.end() ? "." : cell_to_string(it->second));
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace khmr
