/**
 * @file decat.cpp
 * @brief Windowed Laurent series, bracket recursion, skein and projector checks.
 */
#include "khmr/decat.hpp"

#include <algorithm>
#include <sstream>

#include "khmr/twist_factory.hpp"

namespace khmr {

namespace {

using Poly = std::map<int, Int>;

bool bounded_below(int q) { return q != LaurentWindow::unbounded_below; }
bool bounded_above(int q) { return q != LaurentWindow::unbounded_above; }

int shift_bound(int q, int dq) {
    if (!bounded_below(q) || !bounded_above(q)) return q;
    return q + dq;
}

bool is_exact(const LaurentWindow& s) { return !bounded_below(s.q_min) && !bounded_above(s.q_max); }

void poly_add(Poly& p, int q, const Int& c) {
    if (c == 0) return;
    Int& slot = p[q];
    slot += c;
    if (slot == 0) p.erase(q);
}

Poly poly_mul(const Poly& a, const Poly& b) {
    Poly out;
    for (auto& [i, x] : a)
        for (auto& [j, y] : b) poly_add(out, i + j, x * y);
    return out;
}

const Poly& loop_value() {
    static const Poly d{{-1, 1}, {1, 1}};
    return d;
}

Poly loop_power(int m) {
    Poly out{{0, 1}};
    for (int i = 0; i < m; ++i) out = poly_mul(out, loop_value());
    return out;
}

/// Partner map of dangling labels: a path of processed arcs runs from the open end of one label to another.
using Frontier = std::map<int, int>;

/// Adds one smoothing arc joining the current ends of labels u and v; returns closed loops.
int join_arc(Frontier& p, int u, int v) {
    auto pu = p.find(u);
    if (pu != p.end() && pu->second == v) {
        p.erase(u);
        p.erase(v);
        return 1;
    }
    if (u == v && pu == p.end()) return 1;
    int a = u, b = v;
    if (pu != p.end()) {
        a = pu->second;
        p.erase(pu);
    }
    auto pv = p.find(v);
    if (pv != p.end()) {
        b = pv->second;
        p.erase(pv);
    }
    p[a] = b;
    p[b] = a;
    return 0;
}

/// Crossing order keeping the frontier small: next is the crossing sharing most labels with those seen.
std::vector<int> scan_order(const std::vector<std::array<int, 4>>& xs) {
    std::vector<int> order;
    std::vector<bool> used(xs.size(), false);
    std::map<int, int> seen;
    for (std::size_t step = 0; step < xs.size(); ++step) {
        int best = -1, best_score = -1;
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (used[i]) continue;
            int score = 0;
            for (int l : xs[i]) score += seen.count(l) ? 1 : 0;
            if (score > best_score) {
                best = static_cast<int>(i);
                best_score = score;
            }
        }
        used[best] = true;
        order.push_back(best);
        for (int l : xs[best]) ++seen[l];
    }
    return order;
}

std::string int_to_string(const Int& c) { return c.str(); }

}  // namespace

LaurentWindow LaurentWindow::exact(std::map<int, Int> coeffs) {
    LaurentWindow s;
    for (auto& [q, c] : coeffs)
        if (c != 0) s.coeffs[q] = c;
    return s;
}

LaurentWindow LaurentWindow::monomial(int exponent, Int c) { return exact({{exponent, std::move(c)}}); }

Int LaurentWindow::at(int q) const {
    if (!contains(q)) throw InvalidInput("series coefficient at q^" + std::to_string(q) + " lies outside the window");
    auto it = coeffs.find(q);
    return it == coeffs.end() ? Int(0) : it->second;
}

void LaurentWindow::add(int q, const Int& c) {
    if (contains(q)) poly_add(coeffs, q, c);
}

LaurentWindow LaurentWindow::restricted(int lo, int hi) const {
    LaurentWindow s;
    s.q_min = std::max(q_min, lo);
    s.q_max = std::min(q_max, hi);
    for (auto& [q, c] : coeffs)
        if (s.contains(q)) s.coeffs[q] = c;
    return s;
}

LaurentWindow LaurentWindow::shifted(int dq, int sign) const {
    LaurentWindow s;
    s.q_min = shift_bound(q_min, dq);
    s.q_max = shift_bound(q_max, dq);
    for (auto& [q, c] : coeffs) s.coeffs[q + dq] = sign < 0 ? Int(-c) : c;
    return s;
}

LaurentWindow operator+(const LaurentWindow& a, const LaurentWindow& b) {
    LaurentWindow s = a.restricted(b.q_min, b.q_max);
    for (auto& [q, c] : b.coeffs) s.add(q, c);
    return s;
}

LaurentWindow operator-(const LaurentWindow& a, const LaurentWindow& b) { return a + b.shifted(0, -1); }

LaurentWindow operator*(const LaurentWindow& a, const LaurentWindow& b) {
    if (!is_exact(a) && !is_exact(b)) throw InvalidInput("product of two windowed series is undetermined");
    if (is_exact(a) && !is_exact(b)) return b * a;
    LaurentWindow s = LaurentWindow::exact(poly_mul(a.coeffs, b.coeffs));
    if (is_exact(a)) return s;
    // b is a polynomial: coefficient q needs a at every q - j for exponents j of b.
    int lo = 0, hi = 0;
    if (!b.coeffs.empty()) {
        lo = b.coeffs.begin()->first;
        hi = b.coeffs.rbegin()->first;
    }
    s.q_min = bounded_below(a.q_min) ? a.q_min + hi : a.q_min;
    s.q_max = bounded_above(a.q_max) ? a.q_max + lo : a.q_max;
    return s.restricted(s.q_min, s.q_max);
}

std::vector<std::string> series_differences(const LaurentWindow& a, const LaurentWindow& b) {
    std::vector<std::string> out;
    const int lo = std::max(a.q_min, b.q_min), hi = std::min(a.q_max, b.q_max);
    std::map<int, bool> exps;
    for (auto& [q, c] : a.coeffs) exps[q] = true;
    for (auto& [q, c] : b.coeffs) exps[q] = true;
    for (auto& [q, unused] : exps) {
        if (q < lo || q > hi) continue;
        Int x = a.at(q), y = b.at(q);
        if (x != y) out.push_back("q^" + std::to_string(q) + ": " + int_to_string(x) + " vs " + int_to_string(y));
    }
    return out;
}

LaurentWindow euler_series(const BigradedHomology& h, int q_min, int q_max) {
    if (q_min > q_max) throw InvalidInput("euler_series: empty window");
    LaurentWindow s;
    s.q_min = q_min;
    s.q_max = q_max;
    for (auto& [hq, cell] : h) s.add(hq.second, hq.first % 2 == 0 ? Int(cell.free) : Int(-cell.free));
    return s;
}

LaurentWindow raw_bracket(const std::vector<std::array<int, 4>>& crossings, int free_loops) {
    std::map<Frontier, Poly> states{{Frontier{}, loop_power(free_loops)}};
    for (int i : scan_order(crossings)) {
        const auto& x = crossings[i];
        std::map<Frontier, Poly> next;
        for (auto& [front, poly] : states)
            for (int r = 0; r < 2; ++r) {
                Frontier f = front;
                int loops = r == 0 ? join_arc(f, x[0], x[1]) : join_arc(f, x[0], x[3]);
                loops += r == 0 ? join_arc(f, x[2], x[3]) : join_arc(f, x[1], x[2]);
                Poly term = poly_mul(poly, loop_power(loops));
                if (r == 1) term = poly_mul(term, Poly{{1, -1}});
                Poly& acc = next[f];
                for (auto& [q, c] : term) poly_add(acc, q, c);
            }
        states = std::move(next);
    }
    Poly total;
    for (auto& [front, poly] : states) {
        if (!front.empty()) throw InvalidInput("raw_bracket: some edge label is used only once");
        for (auto& [q, c] : poly) poly_add(total, q, c);
    }
    return LaurentWindow::exact(total);
}

LaurentWindow kauffman_bracket(const MrDiagram& d) {
    if (d.r() != 0) throw InvalidInput("kauffman_bracket: diagram has gates");
    std::vector<std::array<int, 4>> xs;
    int n_plus = 0, n_minus = 0;
    for (auto& x : d.crossings) {
        xs.push_back(x.x);
        (x.sign > 0 ? n_plus : n_minus) += 1;
    }
    return raw_bracket(xs, static_cast<int>(d.free_loops().size()))
        .shifted(n_plus - 2 * n_minus, n_minus % 2 == 0 ? 1 : -1);
}

LaurentWindow kauffman_bracket(const MrDiagram& d, int q_min, int q_max) {
    return kauffman_bracket(d).restricted(q_min, q_max);
}

SkeinReport skein_consistency(const MrDiagram& d, int h_min, const PipelineConfig& cfg,
                              std::optional<std::pair<int, int>> window) {
    SkeinReport rep;
    if (d.r() == 0) {
        rep.from_homology = euler_series(classical_homology(d));
        rep.from_bracket = kauffman_bracket(d);
        int lo = 0, hi = 0;
        for (const auto* s : {&rep.from_homology, &rep.from_bracket})
            if (!s->coeffs.empty()) {
                lo = std::min(lo, s->coeffs.begin()->first);
                hi = std::max(hi, s->coeffs.rbegin()->first);
            }
        if (window) {
            lo = window->first;
            hi = window->second;
        }
        rep.q_min = lo;
        rep.q_max = hi;
        rep.from_homology = rep.from_homology.restricted(lo, hi);
        rep.from_bracket = rep.from_bracket.restricted(lo, hi);
        rep.mismatches = series_differences(rep.from_homology, rep.from_bracket);
        rep.ok = rep.mismatches.empty();
        return rep;
    }
    for (auto& s : shifting_data(d))
        if (s.eta != 0) throw InvalidInput("skein_consistency: a gate has nonzero algebraic intersection");

    KhResult kh = khovanov_homology(d, h_min, cfg);
    rep.k = kh.k_used;

    // Shifted brackets of L(k) and L(k+1); both equal the Euler series of the finite complexes.
    auto shifted_bracket = [&](const std::vector<int>& k) {
        int dh = 0, dq = 0;
        for (std::size_t i = 0; i < d.gates.size(); ++i) {
            ShiftingData s = gate_shifting_data(d.gates[i]);
            auto [th, tq] = twist_shift(s.n, k[i]);
            dh += th + k[i] * s.n_minus;
            dq += tq + k[i] * s.N;
        }
        return kauffman_bracket(build_Lk(d, k)).shifted(dq, dh % 2 == 0 ? 1 : -1);
    };
    std::vector<int> k1 = rep.k;
    for (int& k : k1) ++k;
    LaurentWindow b0 = shifted_bracket(rep.k), b1 = shifted_bracket(k1);

    // Lowest q at which no degree below h_min contributes, and at which the brackets have stabilized.
    int bottom = 0, hi = 0;
    auto widen = [&](int q) {
        bottom = std::min(bottom, q);
        hi = std::max(hi, q);
    };
    for (auto& [q, c] : b0.coeffs) widen(q);
    for (auto& [q, c] : b1.coeffs) widen(q);
    int lo = bottom;
    for (const auto* k : {&rep.k, &k1})
        for (auto& [hq, cell] : homology(finite_complex(d, *k, cfg))) {
            if (cell.free == 0 && cell.torsion.empty()) continue;
            widen(hq.second);
            if (hq.first < h_min) lo = std::max(lo, hq.second + 1);
        }
    for (int q = hi; q >= lo; --q)
        if (b0.at(q) != b1.at(q)) {
            lo = q + 1;
            break;
        }
    if (window) {
        if (window->first < lo)
            throw InvalidInput("skein_consistency: homology on h >= " + std::to_string(h_min) +
                               " does not determine q^" + std::to_string(window->first));
        lo = window->first;
        hi = std::min(hi, window->second);
    }
    rep.q_min = lo;
    rep.q_max = hi;
    if (lo > hi) {
        rep.mismatches.push_back("no q-window is determined by the computed degrees");
        return rep;
    }
    rep.from_homology = euler_series(kh.table, lo, hi);
    rep.from_bracket = b0.restricted(lo, hi);
    rep.mismatches = series_differences(rep.from_homology, rep.from_bracket);
    rep.ok = rep.mismatches.empty();
    return rep;
}

ProjectorReport p20_series_check(int order) {
    if (order < 1) throw InvalidInput("p20_series_check: order must be positive");
    ProjectorReport rep;
    rep.order = order;
    const int lo = -(2 * order - 1);

    auto coefficient_series = [&](int h_min, LaurentWindow& cup_cap, LaurentWindow& identity) {
        ChainComplex c = truncated_infinite_twist(2, h_min);
        cup_cap = LaurentWindow::exact();
        identity = LaurentWindow::exact();
        for (auto& o : c.objects) {
            Poly term = poly_mul(Poly{{o.q, o.h % 2 == 0 ? 1 : -1}}, loop_power(o.diagram.circles));
            LaurentWindow& target = through_degree(o.diagram) == 2 ? identity : cup_cap;
            for (auto& [q, v] : term) target.add(q, v);
        }
    };
    LaurentWindow cc0, id0, cc1, id1;
    coefficient_series(-2 * order, cc0, id0);
    coefficient_series(-2 * order - 2, cc1, id1);
    int hi = 1;
    for (auto& [q, v] : cc0.coeffs) hi = std::max(hi, q);
    for (auto& [q, v] : id0.coeffs) hi = std::max(hi, q);
    rep.cup_cap = cc0.restricted(lo, hi);
    rep.identity = id0.restricted(lo, hi);

    LaurentWindow expected = LaurentWindow::exact();
    for (int j = 0; j < order; ++j) expected.add(-(2 * j + 1), j % 2 == 0 ? 1 : -1);
    rep.expected = expected.restricted(lo, hi);

    for (auto& m : series_differences(rep.cup_cap, rep.expected)) rep.mismatches.push_back("cup-cap " + m);
    for (auto& m : series_differences(rep.identity, LaurentWindow::exact().restricted(lo, hi)))
        rep.mismatches.push_back("identity " + m);
    for (auto& m : series_differences(rep.cup_cap, cc1.restricted(lo, hi)))
        rep.mismatches.push_back("cup-cap depends on truncation: " + m);
    for (auto& m : series_differences(rep.identity, id1.restricted(lo, hi)))
        rep.mismatches.push_back("identity depends on truncation: " + m);
    rep.ok = rep.mismatches.empty();
    return rep;
}

std::string series_to_tsv(const LaurentWindow& s) {
    std::ostringstream out;
    for (auto& [q, c] : s.coeffs) out << q << '\t' << c << '\n';
    return out.str();
}

nlohmann::json series_to_json(const LaurentWindow& s) {
    nlohmann::json j;
    j["window"] = {{"q_min", bounded_below(s.q_min) ? nlohmann::json(s.q_min) : nlohmann::json(nullptr)},
                   {"q_max", bounded_above(s.q_max) ? nlohmann::json(s.q_max) : nlohmann::json(nullptr)}};
    j["terms"] = nlohmann::json::array();
    for (auto& [q, c] : s.coeffs) {
        nlohmann::json v = c.str().size() < 18 ? nlohmann::json(static_cast<long long>(c)) : nlohmann::json(c.str());
        j["terms"].push_back({{"exponent", q}, {"coefficient", v}});
    }
    return j;
}

}  // namespace khmr
