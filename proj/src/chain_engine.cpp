/**
 * @file chain_engine.cpp
 * @brief Tensor products, delooping, Gaussian elimination and homology.
 */
#include "khmr/chain_engine.hpp"

#include <algorithm>
#include <bit>
#include <climits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace khmr {

namespace {

EngineLimits g_limits;

void check_limits(std::size_t objects, std::size_t entries) {
    if (g_limits.max_objects && objects > g_limits.max_objects)
        throw ResourceError("object limit exceeded (" + std::to_string(objects) + " objects)");
    if (g_limits.max_entries && entries > g_limits.max_entries)
        throw ResourceError("entry limit exceeded (" + std::to_string(entries) + " entries)");
}

/// Returns +1 or -1 if m is plus or minus the identity between equal diagrams, else 0.
int iso_sign(const ShiftedObject& s, const ShiftedObject& t, const LinComb& m) {
    if (m.size() != 1 || m.terms()[0].first != 0) return 0;
    const Int& v = m.terms()[0].second;
    if (v != 1 && v != -1) return 0;
    if (s.q != t.q || s.diagram != t.diagram || s.diagram.circles != 0) return 0;
    return v == 1 ? 1 : -1;
}

/// How points of two complexes are identified when tensoring.
struct GluePlan {
    int na = 0;
    int nb = 0;
    std::vector<int> partner;    ///< identified position, or -1 for a boundary point
    std::vector<int> out_index;  ///< output point of a boundary position, or -1
    std::vector<int> out_pos;    ///< position of each output point
    std::vector<int> labels;
};

GluePlan make_plan(const std::vector<int>& la, const std::vector<int>& lb) {
    GluePlan p;
    p.na = static_cast<int>(la.size());
    p.nb = static_cast<int>(lb.size());
    const int n = p.na + p.nb;
    std::vector<int> all(la);
    all.insert(all.end(), lb.begin(), lb.end());
    std::map<int, std::vector<int>> where;
    for (int i = 0; i < n; ++i) where[all[i]].push_back(i);
    p.partner.assign(n, -1);
    p.out_index.assign(n, -1);
    for (auto& [label, pos] : where) {
        if (pos.size() > 2) throw InvalidInput("tensor: label " + std::to_string(label) + " used more than twice");
        if (pos.size() == 2) {
            p.partner[pos[0]] = pos[1];
            p.partner[pos[1]] = pos[0];
        }
    }
    for (int i = 0; i < n; ++i) {
        if (p.partner[i] == -1) {
            p.out_index[i] = static_cast<int>(p.out_pos.size());
            p.out_pos.push_back(i);
            p.labels.push_back(all[i]);
        }
    }
    return p;
}

struct Glued {
    TLDiagram diagram;
    std::vector<int> circle_pos;  ///< one position on each closed loop
};

Glued glue(const GluePlan& p, const TLDiagram& a, const TLDiagram& b) {
    const int n = p.na + p.nb;
    auto obj_match = [&](int pos) { return pos < p.na ? a.match[pos] : p.na + b.match[pos - p.na]; };
    Glued g;
    const int m = static_cast<int>(p.out_pos.size());
    g.diagram.bottom = m;
    g.diagram.top = 0;
    g.diagram.match.assign(m, -1);
    g.diagram.circles = a.circles + b.circles;
    std::vector<char> seen(n, 0);
    for (int o = 0; o < m; ++o) {
        if (g.diagram.match[o] != -1) continue;
        int cur = p.out_pos[o];
        for (;;) {
            seen[cur] = 1;
            int nxt = obj_match(cur);
            seen[nxt] = 1;
            if (p.out_index[nxt] >= 0) {
                g.diagram.match[o] = p.out_index[nxt];
                g.diagram.match[p.out_index[nxt]] = o;
                break;
            }
            cur = p.partner[nxt];
        }
    }
    for (int i = 0; i < n; ++i) {
        if (seen[i]) continue;
        g.circle_pos.push_back(i);
        ++g.diagram.circles;
        int cur = i;
        while (!seen[cur]) {
            seen[cur] = 1;
            int nxt = obj_match(cur);
            seen[nxt] = 1;
            cur = p.partner[nxt];
        }
    }
    return g;
}

/// phi (on the A side when a_side, else on the B side) tensored with the identity of the other factor.
LinComb glue_morphism(const GluePlan& p, bool a_side, const TLDiagram& src, const TLDiagram& tgt,
                      const TLDiagram& fixed, const Glued& gs, const Glued& gt, const LinComb& phi) {
    const CycleStructure cs = cycle_structure(src, tgt);
    const CycleStructure out = cycle_structure(gs.diagram, gt.diagram);
    const int nfixed = fixed.size();
    // Strip index for each point of the fixed factor.
    std::vector<int> strip(nfixed, -1);
    int nstrips = 0;
    for (int i = 0; i < nfixed; ++i)
        if (i < fixed.match[i]) strip[i] = strip[fixed.match[i]] = nstrips++;
    const int moving_offset = a_side ? 0 : p.na;
    const int fixed_offset = a_side ? p.na : 0;
    auto piece = [&](int pos) {
        if (pos >= moving_offset && pos < moving_offset + src.size()) return cs.point_cycle[pos - moving_offset];
        return cs.total() + strip[pos - fixed_offset];
    };
    std::vector<int> rep(out.total());
    std::vector<char> done(out.alternating, 0);
    for (int o = 0; o < gs.diagram.size(); ++o) {
        int c = out.point_cycle[o];
        if (!done[c]) {
            done[c] = 1;
            rep[c] = piece(p.out_pos[o]);
        }
    }
    // Circles of the factors themselves are not allowed; glued circles come from closed loops.
    for (int j = 0; j < out.source_circles; ++j) rep[out.source_circle(j)] = piece(gs.circle_pos[j]);
    for (int j = 0; j < out.target_circles; ++j) rep[out.target_circle(j)] = piece(gt.circle_pos[j]);
    LinComb result;
    for (auto& [mask, coeff] : phi.terms()) {
        SurfaceBuilder sb;
        for (int c = 0; c < cs.total(); ++c) sb.add_disk((mask >> c) & 1);
        for (int s = 0; s < nstrips; ++s) sb.add_disk(false);
        for (int i = 0; i < p.na + p.nb; ++i)
            if (p.partner[i] > i) sb.add_seam(piece(i), piece(p.partner[i]), true);
        result.add(sb.reduce(rep), coeff);
    }
    return result;
}

}  // namespace

void set_engine_limits(EngineLimits limits) { g_limits = limits; }
EngineLimits engine_limits() { return g_limits; }

std::size_t ChainComplex::entry_count() const {
    std::size_t n = 0;
    for (auto& row : differential) n += row.size();
    return n;
}

int ChainComplex::add_object(ShiftedObject o) {
    objects.push_back(std::move(o));
    differential.emplace_back();
    return static_cast<int>(objects.size()) - 1;
}

void ChainComplex::add_entry(int src, int tgt, const LinComb& m) {
    if (m.empty()) return;
    auto& row = differential[src];
    auto it = row.find(tgt);
    if (it == row.end()) {
        row.emplace(tgt, m);
    } else {
        it->second.add(m);
        if (it->second.empty()) row.erase(it);
    }
}

int ChainComplex::min_h() const {
    int v = INT_MAX;
    for (auto& o : objects) v = std::min(v, o.h);
    return v;
}

int ChainComplex::max_h() const {
    int v = INT_MIN;
    for (auto& o : objects) v = std::max(v, o.h);
    return v;
}

ChainComplex unsigned_crossing_complex(const std::array<int, 4>& labels) {
    ChainComplex c;
    c.labels.assign(labels.begin(), labels.end());
    int r0 = c.add_object({make_diagram(4, 0, {{0, 1}, {2, 3}}), 0, 0});
    int r1 = c.add_object({make_diagram(4, 0, {{0, 3}, {1, 2}}), 1, 1});
    c.add_entry(r0, r1, LinComb::single(0));
    return c;
}

ChainComplex crossing_complex(const std::array<int, 4>& labels, int sign) {
    if (sign != 1 && sign != -1) throw InvalidInput("crossing sign must be +1 or -1");
    ChainComplex c = unsigned_crossing_complex(labels);
    return sign > 0 ? shift(c, 0, 1) : shift(c, -1, -2);
}

ChainComplex matching_complex(const std::vector<int>& labels, const TLDiagram& d) {
    if (static_cast<int>(labels.size()) != d.size()) throw InvalidInput("matching_complex: size mismatch");
    ChainComplex c;
    c.labels = labels;
    c.add_object({d, 0, 0});
    return c;
}

ChainComplex circle_complex() {
    ChainComplex c;
    TLDiagram d;
    d.circles = 1;
    c.add_object({d, 0, 0});
    return deloop(c);
}

ChainComplex tensor(const ChainComplex& a, const ChainComplex& b) {
    for (auto& o : a.objects)
        if (o.diagram.circles) throw InvalidInput("tensor: left factor has circles");
    for (auto& o : b.objects)
        if (o.diagram.circles) throw InvalidInput("tensor: right factor has circles");
    const GluePlan plan = make_plan(a.labels, b.labels);
    const int na = static_cast<int>(a.objects.size());
    const int nb = static_cast<int>(b.objects.size());
    check_limits(static_cast<std::size_t>(na) * nb, 0);
    ChainComplex out;
    out.labels = plan.labels;
    std::vector<Glued> glued;
    glued.reserve(static_cast<std::size_t>(na) * nb);
    for (int i = 0; i < na; ++i) {
        for (int j = 0; j < nb; ++j) {
            glued.push_back(glue(plan, a.objects[i].diagram, b.objects[j].diagram));
            out.add_object({glued.back().diagram, a.objects[i].h + b.objects[j].h, a.objects[i].q + b.objects[j].q});
        }
    }
    auto idx = [nb](int i, int j) { return i * nb + j; };
    std::size_t entries = 0;
    for (int i = 0; i < na; ++i) {
        for (auto& [i2, phi] : a.differential[i]) {
            for (int j = 0; j < nb; ++j) {
                LinComb m = glue_morphism(plan, true, a.objects[i].diagram, a.objects[i2].diagram,
                                          b.objects[j].diagram, glued[idx(i, j)], glued[idx(i2, j)], phi);
                out.add_entry(idx(i, j), idx(i2, j), m);
                ++entries;
            }
        }
    }
    for (int j = 0; j < nb; ++j) {
        for (auto& [j2, psi] : b.differential[j]) {
            for (int i = 0; i < na; ++i) {
                LinComb m = glue_morphism(plan, false, b.objects[j].diagram, b.objects[j2].diagram,
                                          a.objects[i].diagram, glued[idx(i, j)], glued[idx(i, j2)], psi);
                if (a.objects[i].h % 2 != 0) m = m.scaled(-1);
                out.add_entry(idx(i, j), idx(i, j2), m);
                ++entries;
            }
        }
        check_limits(out.objects.size(), entries);
    }
    return out;
}

ChainComplex deloop(const ChainComplex& c) {
    ChainComplex out;
    out.labels = c.labels;
    const int n = static_cast<int>(c.objects.size());
    std::vector<int> first(n);
    for (int i = 0; i < n; ++i) {
        const auto& o = c.objects[i];
        const int k = o.diagram.circles;
        if (k > 20) throw ResourceError("deloop: too many circles in one object");
        first[i] = static_cast<int>(out.objects.size());
        TLDiagram d = o.diagram;
        d.circles = 0;
        for (int state = 0; state < (1 << k); ++state) {
            int plus = std::popcount(static_cast<unsigned>(state));
            out.add_object({d, o.h, o.q + plus - (k - plus)});
        }
    }
    check_limits(out.objects.size(), 0);
    for (int s = 0; s < n; ++s) {
        for (auto& [t, m] : c.differential[s]) {
            const CycleStructure cs = cycle_structure(c.objects[s].diagram, c.objects[t].diagram);
            const int alt = cs.alternating;
            const int ks = cs.source_circles, kt = cs.target_circles;
            const Mask alt_mask = alt >= 64 ? ~Mask{0} : ((Mask{1} << alt) - 1);
            for (auto& [mask, coeff] : m.terms()) {
                int sigma = static_cast<int>((mask >> alt) & ((Mask{1} << ks) - 1));
                int dotted_t = static_cast<int>((mask >> (alt + ks)) & ((Mask{1} << kt) - 1));
                int tau = (~dotted_t) & ((1 << kt) - 1);
                out.add_entry(first[s] + sigma, first[t] + tau, LinComb::single(mask & alt_mask, coeff));
            }
        }
    }
    return out;
}

ChainComplex gaussian_eliminate(const ChainComplex& c) {
    const int n = static_cast<int>(c.objects.size());
    std::vector<std::map<int, LinComb>> out = c.differential;
    std::vector<std::set<int>> in(n);
    std::set<std::pair<int, int>> cand;
    for (int s = 0; s < n; ++s) {
        for (auto& [t, m] : out[s]) {
            in[t].insert(s);
            if (iso_sign(c.objects[s], c.objects[t], m)) cand.insert({s, t});
        }
    }
    std::vector<char> alive(n, 1);
    std::size_t entries = c.entry_count();
    while (!cand.empty()) {
        auto [x, y] = *cand.begin();
        cand.erase(cand.begin());
        if (!alive[x] || !alive[y]) continue;
        auto it = out[x].find(y);
        if (it == out[x].end()) continue;
        const int u = iso_sign(c.objects[x], c.objects[y], it->second);
        if (!u) continue;
        std::vector<std::pair<int, LinComb>> from_x;
        for (auto& [t, m] : out[x])
            if (t != y) from_x.emplace_back(t, m);
        std::vector<std::pair<int, LinComb>> into_y;
        for (int s : in[y])
            if (s != x) into_y.emplace_back(s, out[s].at(y));
        for (auto& [s, sy] : into_y) {
            for (auto& [t, xt] : from_x) {
                LinComb comp = compose_terms(c.objects[s].diagram, c.objects[y].diagram, c.objects[t].diagram, sy, xt);
                if (comp.empty()) continue;
                auto [eit, inserted] = out[s].try_emplace(t);
                if (inserted) ++entries;
                eit->second.add(comp, Int(-u));
                if (eit->second.empty()) {
                    out[s].erase(eit);
                    in[t].erase(s);
                    --entries;
                } else {
                    in[t].insert(s);
                    if (iso_sign(c.objects[s], c.objects[t], eit->second)) cand.insert({s, t});
                }
            }
        }
        check_limits(0, entries);
        for (int v : {x, y}) {
            for (auto& [t, m] : out[v]) {
                in[t].erase(v);
                --entries;
            }
            out[v].clear();
            for (int s : in[v]) {
                if (out[s].erase(v)) --entries;
            }
            in[v].clear();
            alive[v] = 0;
        }
    }
    ChainComplex res;
    res.labels = c.labels;
    std::vector<int> remap(n, -1);
    for (int i = 0; i < n; ++i)
        if (alive[i]) remap[i] = res.add_object(c.objects[i]);
    for (int s = 0; s < n; ++s) {
        if (!alive[s]) continue;
        for (auto& [t, m] : out[s]) res.differential[remap[s]].emplace(remap[t], std::move(m));
    }
    return res;
}

ChainComplex simplify(const ChainComplex& c) { return gaussian_eliminate(deloop(c)); }

ChainComplex compose_complexes(const ChainComplex& a, const ChainComplex& b) { return simplify(tensor(a, b)); }

ChainComplex shift(const ChainComplex& c, int dh, int dq) {
    ChainComplex out = c;
    for (auto& o : out.objects) {
        o.h += dh;
        o.q += dq;
    }
    return out;
}

namespace {
template <class Keep>
ChainComplex filter_objects(const ChainComplex& c, Keep keep) {
    ChainComplex out;
    out.labels = c.labels;
    std::vector<int> remap(c.objects.size(), -1);
    for (std::size_t i = 0; i < c.objects.size(); ++i)
        if (keep(c.objects[i])) remap[i] = out.add_object(c.objects[i]);
    for (std::size_t s = 0; s < c.objects.size(); ++s) {
        if (remap[s] < 0) continue;
        for (auto& [t, m] : c.differential[s])
            if (remap[t] >= 0) out.differential[remap[s]].emplace(remap[t], m);
    }
    return out;
}
}  // namespace

ChainComplex truncate(const ChainComplex& c, int a) {
    return filter_objects(c, [a](const ShiftedObject& o) { return o.h > a; });
}

ChainComplex truncate_below(const ChainComplex& c, int h_min) {
    return filter_objects(c, [h_min](const ShiftedObject& o) { return o.h >= h_min; });
}

Mask remap_mask(const TLDiagram& s, const TLDiagram& t, const TLDiagram& s2, const TLDiagram& t2,
                const std::vector<int>& perm, Mask m) {
    const CycleStructure a = cycle_structure(s, t);
    const CycleStructure b = cycle_structure(s2, t2);
    std::vector<int> to(a.total());
    for (int p = 0; p < s.size(); ++p) to[a.point_cycle[p]] = b.point_cycle[perm[p]];
    for (int c = a.alternating; c < a.total(); ++c) to[c] = c - a.alternating + b.alternating;
    Mask out = 0;
    for (int c = 0; c < a.total(); ++c)
        if ((m >> c) & 1) out |= Mask{1} << to[c];
    return out;
}

namespace {
TLDiagram rename_points(const TLDiagram& d, const std::vector<int>& perm) {
    TLDiagram out = d;
    for (int i = 0; i < d.size(); ++i) out.match[perm[i]] = perm[d.match[i]];
    return out;
}
}  // namespace

ChainComplex reorder_boundary(const ChainComplex& c, const std::vector<int>& new_labels) {
    const int n = static_cast<int>(c.labels.size());
    if (static_cast<int>(new_labels.size()) != n) throw InvalidInput("reorder_boundary: size mismatch");
    std::map<int, int> where;
    for (int i = 0; i < n; ++i) where[new_labels[i]] = i;
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) {
        auto it = where.find(c.labels[i]);
        if (it == where.end()) throw InvalidInput("reorder_boundary: unknown label");
        perm[i] = it->second;
    }
    ChainComplex out;
    out.labels = new_labels;
    for (auto& o : c.objects) out.add_object({rename_points(o.diagram, perm), o.h, o.q});
    for (std::size_t s = 0; s < c.objects.size(); ++s) {
        for (auto& [t, m] : c.differential[s]) {
            LinComb nm;
            for (auto& [mask, coeff] : m.terms())
                nm.add(remap_mask(c.objects[s].diagram, c.objects[t].diagram, out.objects[s].diagram,
                                  out.objects[t].diagram, perm, mask),
                       coeff);
            out.differential[s].emplace(t, std::move(nm));
        }
    }
    return out;
}

ChainComplex as_rectangle(const ChainComplex& c, int bottom) {
    ChainComplex out = c;
    for (auto& o : out.objects) {
        if (bottom < 0 || bottom > o.diagram.size()) throw InvalidInput("as_rectangle: bad split");
        o.diagram.top = o.diagram.size() - bottom;
        o.diagram.bottom = bottom;
    }
    return out;
}

bool check_d_squared(const ChainComplex& c) {
    const int n = static_cast<int>(c.objects.size());
    for (int s = 0; s < n; ++s) {
        std::map<int, LinComb> acc;
        for (auto& [y, m1] : c.differential[s]) {
            for (auto& [t, m2] : c.differential[y]) {
                acc[t].add(compose_terms(c.objects[s].diagram, c.objects[y].diagram, c.objects[t].diagram, m1, m2));
            }
        }
        for (auto& [t, m] : acc)
            if (!m.empty()) return false;
    }
    return true;
}

bool check_gradings(const ChainComplex& c) {
    for (std::size_t s = 0; s < c.objects.size(); ++s) {
        for (auto& [t, m] : c.differential[s]) {
            const auto& a = c.objects[s];
            const auto& b = c.objects[t];
            if (b.h != a.h + 1) return false;
            for (auto& [mask, coeff] : m.terms())
                if (degree(a.diagram, b.diagram, mask) + b.q - a.q != 0) return false;
        }
    }
    return true;
}

std::vector<Int> smith_invariants(std::vector<std::vector<Int>> m) {
    std::vector<Int> diag;
    const int rows = static_cast<int>(m.size());
    const int cols = rows ? static_cast<int>(m[0].size()) : 0;
    int r0 = 0;
    for (int c0 = 0; r0 < rows && c0 < cols;) {
        // Pivot: smallest nonzero absolute value in the remaining block.
        int pr = -1, pc = -1;
        Int best = 0;
        for (int r = r0; r < rows; ++r)
            for (int c = c0; c < cols; ++c)
                if (m[r][c] != 0 && (pr < 0 || abs(m[r][c]) < best)) {
                    best = abs(m[r][c]);
                    pr = r;
                    pc = c;
                    if (best == 1) goto found;
                }
    found:
        if (pr < 0) break;
        std::swap(m[r0], m[pr]);
        for (int r = 0; r < rows; ++r) std::swap(m[r][c0], m[r][pc]);
        bool clean = true;
        for (int r = r0 + 1; r < rows; ++r) {
            if (m[r][c0] == 0) continue;
            Int f = m[r][c0] / m[r0][c0];
            for (int c = c0; c < cols; ++c) m[r][c] -= f * m[r0][c];
            if (m[r][c0] != 0) clean = false;
        }
        for (int c = c0 + 1; c < cols; ++c) {
            if (m[r0][c] == 0) continue;
            Int f = m[r0][c] / m[r0][c0];
            for (int r = r0; r < rows; ++r) m[r][c] -= f * m[r][c0];
            if (m[r0][c] != 0) clean = false;
        }
        if (!clean) continue;  // a smaller remainder appeared; pivot again
        diag.push_back(abs(m[r0][c0]));
        ++r0;
        ++c0;
    }
    // Turn the diagonal into a divisibility chain.
    for (std::size_t i = 0; i < diag.size(); ++i)
        for (std::size_t j = i + 1; j < diag.size(); ++j) {
            Int g = gcd(diag[i], diag[j]);
            Int l = diag[i] / g * diag[j];
            diag[i] = g;
            diag[j] = l;
        }
    return diag;
}

BigradedHomology homology(const ChainComplex& c) {
    for (auto& o : c.objects)
        if (o.diagram.size() != 0 || o.diagram.circles != 0)
            throw InvalidInput("homology: complex has non-empty objects");
    // Group objects by q, then by h.
    std::map<int, std::map<int, std::vector<int>>> by_q;
    for (std::size_t i = 0; i < c.objects.size(); ++i) by_q[c.objects[i].q][c.objects[i].h].push_back(static_cast<int>(i));
    BigradedHomology out;
    for (auto& [q, by_h] : by_q) {
        std::map<int, std::vector<Int>> inv;  // invariants of d: h -> h+1
        for (auto& [h, srcs] : by_h) {
            auto nxt = by_h.find(h + 1);
            if (nxt == by_h.end()) continue;
            const auto& tgts = nxt->second;
            std::unordered_map<int, int> row_of;
            for (std::size_t r = 0; r < tgts.size(); ++r) row_of[tgts[r]] = static_cast<int>(r);
            std::vector<std::vector<Int>> mat(tgts.size(), std::vector<Int>(srcs.size(), 0));
            for (std::size_t col = 0; col < srcs.size(); ++col)
                for (auto& [t, m] : c.differential[srcs[col]]) {
                    auto it = row_of.find(t);
                    if (it != row_of.end()) mat[it->second][col] += m.coefficient(0);
                }
            inv[h] = smith_invariants(std::move(mat));
        }
        for (auto& [h, objs] : by_h) {
            HomologyCell cell;
            int rank_out = inv.count(h) ? static_cast<int>(inv[h].size()) : 0;
            int rank_in = inv.count(h - 1) ? static_cast<int>(inv[h - 1].size()) : 0;
            cell.free = static_cast<int>(objs.size()) - rank_out - rank_in;
            if (inv.count(h - 1))
                for (auto& d : inv[h - 1])
                    if (d > 1) cell.torsion.push_back(d);
            if (cell.free != 0 || !cell.torsion.empty()) out[{h, q}] = cell;
        }
    }
    return out;
}

std::string cell_to_string(const HomologyCell& cell) {
    std::ostringstream os;
    bool first = true;
    if (cell.free) {
        os << "Z";
        if (cell.free > 1) os << "^" << cell.free;
        first = false;
    }
    std::map<Int, int> tors;
    for (auto& t : cell.torsion) tors[t]++;
    for (auto& [t, k] : tors) {
        if (!first) os << "+";
        os << "Z" << t;
        if (k > 1) os << "^" << k;
        first = false;
    }
    if (first) os << "0";
    return os.str();
}

nlohmann::json complex_to_json(const ChainComplex& c) {
    nlohmann::json j;
    j["labels"] = c.labels;
    auto& objs = j["objects"] = nlohmann::json::array();
    for (auto& o : c.objects)
        objs.push_back({{"h", o.h},
                        {"q", o.q},
                        {"bottom", o.diagram.bottom},
                        {"top", o.diagram.top},
                        {"match", o.diagram.match},
                        {"circles", o.diagram.circles}});
    auto& ents = j["entries"] = nlohmann::json::array();
    for (std::size_t s = 0; s < c.objects.size(); ++s)
        for (auto& [t, m] : c.differential[s]) {
            nlohmann::json terms = nlohmann::json::array();
            for (auto& [mask, coeff] : m.terms()) terms.push_back({{"mask", mask}, {"coeff", coeff.str()}});
            ents.push_back({{"src", s}, {"tgt", t}, {"terms", terms}});
        }
    return j;
}

ChainComplex complex_from_json(const nlohmann::json& j) {
    ChainComplex c;
    c.labels = j.at("labels").get<std::vector<int>>();
    for (auto& o : j.at("objects")) {
        TLDiagram d;
        d.bottom = o.at("bottom").get<int>();
        d.top = o.at("top").get<int>();
        d.match = o.at("match").get<std::vector<int>>();
        d.circles = o.at("circles").get<int>();
        if (static_cast<int>(d.match.size()) != d.size()) throw InvalidInput("complex_from_json: bad object");
        c.add_object({d, o.at("h").get<int>(), o.at("q").get<int>()});
    }
    const int n = static_cast<int>(c.objects.size());
    for (auto& e : j.at("entries")) {
        int s = e.at("src").get<int>(), t = e.at("tgt").get<int>();
        if (s < 0 || s >= n || t < 0 || t >= n) throw InvalidInput("complex_from_json: bad entry");
        LinComb m;
        for (auto& term : e.at("terms")) m.add(term.at("mask").get<Mask>(), Int(term.at("coeff").get<std::string>()));
        c.add_entry(s, t, m);
    }
    return c;
}

}  // namespace khmr
