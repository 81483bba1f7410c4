/**
 * @file oracles.hpp
 * @brief Independent reference computations used by the tests.
 *
 * These do not call the scanning engine: the TQFT evaluates cobordisms as
 * linear maps on tensor powers of Z[X]/X^2, the cube oracle builds the full
 * Khovanov cube of a crossing list and reduces it with dense Smith normal form.
 */
#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <map>
#include <numeric>
#include <set>
#include <utility>
#include <vector>

#include "khmr/planar_core.hpp"

namespace oracle {

using khmr::Int;
using khmr::Mask;
using khmr::TLDiagram;

struct DSU {
    std::vector<int> p;
    explicit DSU(int n) : p(n) { std::iota(p.begin(), p.end(), 0); }
    int find(int x) { return p[x] == x ? x : p[x] = find(p[x]); }
    void unite(int a, int b) { p[find(a)] = find(b); }
};

/// Circles of a closed picture: closure gamma (matching on points) glued to diagram d.
inline int closure_circles(const std::vector<int>& gamma, const TLDiagram& d, std::vector<int>* point_circle = nullptr) {
    const int n = d.size();
    DSU u(n);
    for (int i = 0; i < n; ++i) {
        u.unite(i, gamma[i]);
        u.unite(i, d.match[i]);
    }
    std::map<int, int> id;
    std::vector<int> pc(n);
    for (int i = 0; i < n; ++i) {
        int r = u.find(i);
        if (!id.count(r)) {
            int k = static_cast<int>(id.size());
            id[r] = k;
        }
        pc[i] = id[u.find(i)];
    }
    if (point_circle) *point_circle = pc;
    return static_cast<int>(id.size()) + d.circles;
}

/// Linear map (dense, out x in) over bases of A^{tensor c}, bit 1 meaning X.
using Matrix = std::vector<std::vector<Int>>;

/// TQFT image of the neck-cut cobordism (s -> t, dots) closed off by gamma x I.
inline Matrix tqft_map(const TLDiagram& s, const TLDiagram& t, Mask dots, const std::vector<int>& gamma) {
    const int n = s.size();
    std::vector<int> bpc, tpc;
    const int cb = closure_circles(gamma, s, &bpc);
    const int ct = closure_circles(gamma, t, &tpc);
    // Pieces: one disk per cycle of s union t, then one strip per gamma arc.
    khmr::CycleStructure cs = khmr::cycle_structure(s, t);
    std::vector<int> strip(n, -1);
    int nstrips = 0;
    for (int i = 0; i < n; ++i)
        if (i < gamma[i]) strip[i] = strip[gamma[i]] = nstrips++;
    const int ndisk = cs.total();
    DSU u(ndisk + nstrips);
    int seams = 0;
    for (int i = 0; i < n; ++i) {
        u.unite(cs.point_cycle[i], ndisk + strip[i]);
        ++seams;
    }
    // Boundary circles: bottom circles (gamma with s), top circles (gamma with t).
    std::vector<int> bottom_piece(cb), top_piece(ct);
    int nb_alt = cb - s.circles, nt_alt = ct - t.circles;
    for (int i = 0; i < n; ++i) {
        bottom_piece[bpc[i]] = cs.point_cycle[i];
        top_piece[tpc[i]] = cs.point_cycle[i];
    }
    for (int j = 0; j < s.circles; ++j) bottom_piece[nb_alt + j] = cs.source_circle(j);
    for (int j = 0; j < t.circles; ++j) top_piece[nt_alt + j] = cs.target_circle(j);
    struct Comp {
        int pieces = 0, seams = 0, dots = 0;
        std::vector<int> in, out;
    };
    std::map<int, Comp> comps;
    for (int p = 0; p < ndisk + nstrips; ++p) {
        auto& c = comps[u.find(p)];
        c.pieces++;
        if (p < ndisk && ((dots >> p) & 1)) c.dots++;
    }
    for (int i = 0; i < n; ++i) comps[u.find(cs.point_cycle[i])].seams++;
    for (int b = 0; b < cb; ++b) comps[u.find(bottom_piece[b])].in.push_back(b);
    for (int b = 0; b < ct; ++b) comps[u.find(top_piece[b])].out.push_back(b);
    (void)seams;

    Matrix m(1 << ct, std::vector<Int>(1 << cb, 0));
    for (int x = 0; x < (1 << cb); ++x) {
        std::vector<std::pair<int, Int>> acc{{0, 1}};
        for (auto& [root, c] : comps) {
            const int chi = c.pieces - c.seams;
            const int bnd = static_cast<int>(c.in.size() + c.out.size());
            const int g = (2 - bnd - chi) / 2;
            int xs = 0;
            for (int b : c.in) xs += (x >> b) & 1;
            // m: multiply inputs, then X^dots (2X)^g, then comultiply.
            int e = xs + c.dots + g;
            Int coef = g == 0 ? Int(1) : (g == 1 ? Int(2) : Int(0));
            std::vector<std::pair<int, Int>> local;
            if (e <= 1 && coef != 0) {
                if (c.out.empty()) {
                    if (e == 1) local.emplace_back(0, coef);
                } else if (e == 1) {
                    int y = 0;
                    for (int b : c.out) y |= 1 << b;
                    local.emplace_back(y, coef);
                } else {
                    int all = 0;
                    for (int b : c.out) all |= 1 << b;
                    for (int b : c.out) local.emplace_back(all & ~(1 << b), coef);
                }
            }
            std::vector<std::pair<int, Int>> next;
            for (auto& [y1, k1] : acc)
                for (auto& [y2, k2] : local) next.emplace_back(y1 | y2, k1 * k2);
            acc = std::move(next);
        }
        for (auto& [y, k] : acc) m[y][x] += k;
    }
    return m;
}

inline Matrix tqft_map(const TLDiagram& s, const TLDiagram& t, const khmr::LinComb& l, const std::vector<int>& gamma) {
    Matrix acc;
    for (auto& [mask, c] : l.terms()) {
        Matrix m = tqft_map(s, t, mask, gamma);
        if (acc.empty()) {
            acc = m;
            for (auto& row : acc)
                for (auto& v : row) v *= c;
        } else {
            for (std::size_t i = 0; i < m.size(); ++i)
                for (std::size_t j = 0; j < m[i].size(); ++j) acc[i][j] += c * m[i][j];
        }
    }
    if (acc.empty()) {
        int cb = closure_circles(gamma, s), ct = closure_circles(gamma, t);
        acc.assign(1 << ct, std::vector<Int>(1 << cb, 0));
    }
    return acc;
}

inline Matrix multiply(const Matrix& a, const Matrix& b) {
    Matrix c(a.size(), std::vector<Int>(b.empty() ? 0 : b[0].size(), 0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < b.size(); ++k)
            if (a[i][k] != 0)
                for (std::size_t j = 0; j < b[k].size(); ++j) c[i][j] += a[i][k] * b[k][j];
    return c;
}

/// All planar matchings on n points in index order (points on a circle).
inline void all_matchings(int n, std::vector<std::vector<int>>& out) {
    std::vector<int> m(n, -1);
    auto rec = [&](auto&& self, int first) -> void {
        while (first < n && m[first] != -1) ++first;
        if (first == n) {
            out.push_back(m);
            return;
        }
        for (int j = first + 1; j < n; j += 2) {
            if (m[j] != -1) continue;
            // planar: points strictly between first and j must be matchable among themselves
            bool ok = true;
            for (int k = first + 1; k < j; ++k)
                if (m[k] != -1 && (m[k] < first || m[k] > j)) ok = false;
            if (!ok) continue;
            m[first] = j;
            m[j] = first;
            self(self, first + 1);
            m[first] = m[j] = -1;
        }
    };
    rec(rec, 0);
}

/// All crossingless matchings with a given bottom/top split, as diagrams.
inline std::vector<TLDiagram> all_tl(int bottom, int top) {
    std::vector<std::vector<int>> cyc;
    all_matchings(bottom + top, cyc);
    std::vector<TLDiagram> out;
    for (auto& cm : cyc) {
        TLDiagram d;
        d.bottom = bottom;
        d.top = top;
        d.match.assign(bottom + top, -1);
        // cyclic position -> point index
        auto point_at = [&](int pos) { return pos < bottom ? pos : bottom + (bottom + top - 1 - pos); };
        for (int pos = 0; pos < bottom + top; ++pos) d.match[point_at(pos)] = point_at(cm[pos]);
        out.push_back(d);
    }
    return out;
}

/// Closures gamma as matchings on point indices of a rectangle with the given split.
inline std::vector<std::vector<int>> all_closures(int bottom, int top) {
    std::vector<std::vector<int>> out;
    for (auto& d : all_tl(bottom, top)) out.push_back(d.match);
    return out;
}

/// Nonzero invariant factors of a dense integer matrix (simple textbook Smith form).
inline std::vector<Int> snf(Matrix a) {
    std::vector<Int> diag;
    int rows = static_cast<int>(a.size());
    int cols = rows ? static_cast<int>(a[0].size()) : 0;
    int t = 0;
    while (t < rows && t < cols) {
        int pr = -1, pc = -1;
        for (int i = t; i < rows && pr < 0; ++i)
            for (int j = t; j < cols; ++j)
                if (a[i][j] != 0) {
                    pr = i;
                    pc = j;
                    break;
                }
        if (pr < 0) break;
        std::swap(a[t], a[pr]);
        for (auto& row : a) std::swap(row[t], row[pc]);
        for (;;) {
            bool changed = false;
            for (int i = t + 1; i < rows; ++i) {
                if (a[i][t] == 0) continue;
                if (abs(a[i][t]) < abs(a[t][t])) {
                    std::swap(a[i], a[t]);
                    changed = true;
                }
                Int f = a[i][t] / a[t][t];
                for (int j = t; j < cols; ++j) a[i][j] -= f * a[t][j];
                if (a[i][t] != 0) changed = true;
            }
            for (int j = t + 1; j < cols; ++j) {
                if (a[t][j] == 0) continue;
                if (abs(a[t][j]) < abs(a[t][t])) {
                    for (auto& row : a) std::swap(row[j], row[t]);
                    changed = true;
                }
                Int f = a[t][j] / a[t][t];
                for (int i = t; i < rows; ++i) a[i][j] -= f * a[i][t];
                if (a[t][j] != 0) changed = true;
            }
            if (!changed) break;
        }
        diag.push_back(abs(a[t][t]));
        ++t;
    }
    std::vector<Int> out;
    // Invariant factors by repeated gcd/lcm normalisation.
    for (std::size_t i = 0; i < diag.size(); ++i)
        for (std::size_t j = i + 1; j < diag.size(); ++j) {
            Int g = gcd(diag[i], diag[j]);
            Int l = diag[i] * diag[j] / g;
            diag[i] = g;
            diag[j] = l;
        }
    return diag;
}

/// (h, q) -> (free rank, sorted torsion) for a signed crossing list, via the full cube.
struct CubeCell {
    int free = 0;
    std::vector<Int> torsion;
    bool operator==(const CubeCell&) const = default;
};
using CubeHomology = std::map<std::pair<int, int>, CubeCell>;

/// Crossings X[a,b,c,d] with sign; free_loops adds split unknots.
inline CubeHomology cube_homology(const std::vector<std::pair<std::array<int, 4>, int>>& crossings, int free_loops = 0) {
    const int c = static_cast<int>(crossings.size());
    int npos = 0;
    for (auto& x : crossings) npos += x.second > 0;
    const int nneg = c - npos;
    // Circles of each state by union-find on edge labels.
    std::map<int, int> label_id;
    for (auto& x : crossings)
        for (int l : x.first)
            if (!label_id.count(l)) {
                int k = static_cast<int>(label_id.size());
                label_id[l] = k;
            }
    const int nl = static_cast<int>(label_id.size());
    struct State {
        int circles = 0;
        std::vector<int> edge_circle;
    };
    std::vector<State> states(1 << c);
    for (int s = 0; s < (1 << c); ++s) {
        DSU u(nl);
        for (int i = 0; i < c; ++i) {
            auto& x = crossings[i].first;
            int a = label_id[x[0]], b = label_id[x[1]], cc = label_id[x[2]], d = label_id[x[3]];
            if ((s >> i) & 1) {
                u.unite(a, d);
                u.unite(b, cc);
            } else {
                u.unite(a, b);
                u.unite(cc, d);
            }
        }
        std::map<int, int> id;
        states[s].edge_circle.resize(nl);
        for (int e = 0; e < nl; ++e) {
            int r = u.find(e);
            if (!id.count(r)) {
                int k = static_cast<int>(id.size());
                id[r] = k;
            }
            states[s].edge_circle[e] = id[r];
        }
        states[s].circles = static_cast<int>(id.size()) + free_loops;
    }
    // Generators: (state, labelling) with bit 1 = X. Grading h = |s| - nneg, q = deg + h + npos - 2nneg
    // where deg(1) = +1, deg(X) = -1 per circle.
    std::map<std::pair<int, int>, std::vector<std::pair<int, int>>> gens;  // (h,q) -> list of (state, lab)
    std::map<std::pair<int, int>, int> index;
    for (int s = 0; s < (1 << c); ++s) {
        int k = states[s].circles;
        int h = std::popcount(static_cast<unsigned>(s)) - nneg;
        for (int lab = 0; lab < (1 << k); ++lab) {
            int xs = std::popcount(static_cast<unsigned>(lab));
            int q = (k - xs) - xs + std::popcount(static_cast<unsigned>(s)) + npos - 2 * nneg;
            auto& v = gens[{h, q}];
            index[{s, lab}] = static_cast<int>(v.size());
            v.emplace_back(s, lab);
        }
    }
    // Differential from state s to s + e_i.
    auto image = [&](int s, int lab, int i) {
        std::vector<std::pair<int, Int>> out;
        int t = s | (1 << i);
        auto& x = crossings[i].first;
        int a = label_id[x[0]], cc = label_id[x[2]];
        const auto& S = states[s];
        const auto& T = states[t];
        // The crossing's two 0-arcs lie on circles ca (through a) and cc (through c).
        int sa = S.edge_circle[a], sc = S.edge_circle[cc];
        int ta = T.edge_circle[a], tc = T.edge_circle[cc];
        const int fl = free_loops;
        const int ks = S.circles - fl, kt = T.circles - fl;
        // Map circles untouched by the change.
        std::vector<int> to(S.circles, -1);
        for (int e = 0; e < nl; ++e) {
            int sc0 = S.edge_circle[e];
            if (sc0 != sa && sc0 != sc) to[sc0] = T.edge_circle[e];
        }
        for (int j = 0; j < fl; ++j) to[ks + j] = kt + j;
        int sign = 1;
        for (int j = 0; j < i; ++j)
            if ((s >> j) & 1) sign = -sign;
        int base = 0;
        for (int j = 0; j < S.circles; ++j)
            if (to[j] >= 0 && ((lab >> j) & 1)) base |= 1 << to[j];
        if (sa != sc) {
            // merge
            int xa = (lab >> sa) & 1, xc = (lab >> sc) & 1;
            if (xa + xc == 2) return out;
            int lab2 = base | ((xa + xc) ? (1 << ta) : 0);
            out.emplace_back(lab2, Int(sign));
        } else {
            // split into ta, tc
            int xa = (lab >> sa) & 1;
            if (xa) {
                out.emplace_back(base | (1 << ta) | (1 << tc), Int(sign));
            } else {
                out.emplace_back(base | (1 << ta), Int(sign));
                out.emplace_back(base | (1 << tc), Int(sign));
            }
        }
        return out;
    };
    CubeHomology res;
    std::map<std::pair<int, int>, std::vector<Int>> inv;
    for (auto& [hq, src] : gens) {
        auto it = gens.find({hq.first + 1, hq.second});
        if (it == gens.end()) continue;
        Matrix m(it->second.size(), std::vector<Int>(src.size(), 0));
        for (std::size_t col = 0; col < src.size(); ++col) {
            auto [s, lab] = src[col];
            for (int i = 0; i < c; ++i) {
                if ((s >> i) & 1) continue;
                for (auto& [lab2, k] : image(s, lab, i)) m[index[{s | (1 << i), lab2}]][col] += k;
            }
        }
        inv[hq] = snf(std::move(m));
    }
    for (auto& [hq, src] : gens) {
        CubeCell cell;
        int out_rank = inv.count(hq) ? static_cast<int>(inv[hq].size()) : 0;
        std::pair<int, int> prev{hq.first - 1, hq.second};
        int in_rank = inv.count(prev) ? static_cast<int>(inv[prev].size()) : 0;
        cell.free = static_cast<int>(src.size()) - out_rank - in_rank;
        if (inv.count(prev))
            for (auto& d : inv[prev])
                if (d > 1) cell.torsion.push_back(d);
        if (cell.free || !cell.torsion.empty()) res[hq] = cell;
    }
    return res;
}

}  // namespace oracle
