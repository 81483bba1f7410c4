/**
 * @file planar_core.cpp
 * @brief Temperley-Lieb diagrams, neck-cut cobordisms and their composition.
 */
#include "khmr/planar_core.hpp"

#include <algorithm>
#include <bit>
#include <numeric>
#include <sstream>

namespace khmr {

TLDiagram identity_diagram(int n) {
    TLDiagram d;
    d.bottom = n;
    d.top = n;
    d.match.resize(2 * n);
    for (int i = 0; i < n; ++i) {
        d.match[i] = n + i;
        d.match[n + i] = i;
    }
    return d;
}

TLDiagram make_diagram(int bottom, int top, const std::vector<std::pair<int, int>>& pairs, int circles) {
    TLDiagram d;
    d.bottom = bottom;
    d.top = top;
    d.circles = circles;
    d.match.assign(bottom + top, -1);
    for (auto [a, b] : pairs) {
        if (a < 0 || b < 0 || a >= d.size() || b >= d.size() || a == b || d.match[a] != -1 || d.match[b] != -1)
            throw InvalidInput("make_diagram: bad pair");
        d.match[a] = b;
        d.match[b] = a;
    }
    if (std::find(d.match.begin(), d.match.end(), -1) != d.match.end())
        throw InvalidInput("make_diagram: unmatched point");
    return d;
}

int cyclic_position(const TLDiagram& d, int point) {
    if (point < d.bottom) return point;
    return d.bottom + d.top - 1 - (point - d.bottom);
}

bool is_planar(const TLDiagram& d) {
    const int n = d.size();
    if (static_cast<int>(d.match.size()) != n || d.circles < 0) return false;
    for (int i = 0; i < n; ++i) {
        int j = d.match[i];
        if (j < 0 || j >= n || j == i || d.match[j] != i) return false;
    }
    // Non-crossing: scanning the cyclic order, arcs must nest like parentheses.
    std::vector<int> at(n);
    for (int i = 0; i < n; ++i) at[cyclic_position(d, i)] = i;
    std::vector<int> stack;
    for (int pos = 0; pos < n; ++pos) {
        int p = at[pos];
        int partner_pos = cyclic_position(d, d.match[p]);
        if (partner_pos > pos) {
            stack.push_back(p);
        } else {
            if (stack.empty() || stack.back() != d.match[p]) return false;
            stack.pop_back();
        }
    }
    return true;
}

int through_degree(const TLDiagram& d) {
    int count = 0;
    for (int i = 0; i < d.bottom; ++i)
        if (d.match[i] >= d.bottom) ++count;
    return count;
}

TLDiagram stack(const TLDiagram& lower, const TLDiagram& upper) {
    if (lower.top != upper.bottom) throw InvalidInput("stack: boundary mismatch");
    const int m = lower.top;
    TLDiagram out;
    out.bottom = lower.bottom;
    out.top = upper.top;
    out.circles = lower.circles + upper.circles;
    out.match.assign(out.size(), -1);
    // Walk from an outer point through the middle line until reaching another outer point.
    // Outer points: lower bottom (0..lower.bottom-1) and upper top (upper.bottom..).
    auto walk = [&](bool in_lower, int p) {
        // p is a point index inside the current piece; follow its arc.
        for (;;) {
            if (in_lower) {
                int q = lower.match[p];
                if (q < lower.bottom) return q;  // outer bottom point
                p = q - lower.bottom;            // middle index, continue into upper
                in_lower = false;
            } else {
                int q = upper.match[p];
                if (q >= upper.bottom) return out.bottom + (q - upper.bottom);
                p = lower.bottom + q;
                in_lower = true;
            }
        }
    };
    std::vector<char> seen_mid(m, 0);
    for (int i = 0; i < lower.bottom; ++i) {
        int r = walk(true, i);
        out.match[i] = r;
    }
    for (int j = 0; j < upper.top; ++j) {
        int r = walk(false, upper.bottom + j);
        out.match[out.bottom + j] = r;
    }
    // Middle points visited by arcs reaching the outside.
    auto mark = [&](bool in_lower, int p) {
        for (;;) {
            if (in_lower) {
                int q = lower.match[p];
                if (q < lower.bottom) return;
                int mid = q - lower.bottom;
                if (seen_mid[mid]) return;
                seen_mid[mid] = 1;
                p = mid;
                in_lower = false;
            } else {
                int q = upper.match[p];
                if (q >= upper.bottom) return;
                if (seen_mid[q]) return;
                seen_mid[q] = 1;
                p = lower.bottom + q;
                in_lower = true;
            }
        }
    };
    for (int i = 0; i < lower.bottom; ++i) mark(true, i);
    for (int j = 0; j < upper.top; ++j) mark(false, upper.bottom + j);
    for (int mid = 0; mid < m; ++mid) {
        if (seen_mid[mid]) continue;
        ++out.circles;
        int cur = mid;
        while (!seen_mid[cur]) {
            seen_mid[cur] = 1;
            int a = lower.match[lower.bottom + cur] - lower.bottom;  // lower arc from the middle point
            seen_mid[a] = 1;
            cur = upper.match[a];
        }
    }
    return out;
}

Decomposition decompose(const TLDiagram& delta) {
    if (delta.circles != 0) throw InvalidInput("decompose: diagram has circles");
    if (!is_planar(delta)) throw InvalidInput("decompose: diagram is not planar");
    Decomposition dec;
    const int d = through_degree(delta);
    dec.through = d;
    std::vector<int> bottom_through, top_through;
    for (int i = 0; i < delta.bottom; ++i)
        if (delta.match[i] >= delta.bottom) bottom_through.push_back(i);
    for (int j = delta.bottom; j < delta.size(); ++j)
        if (delta.match[j] < delta.bottom) top_through.push_back(j);

    TLDiagram& b = dec.bottom_half;
    b.bottom = delta.bottom;
    b.top = d;
    b.match.assign(b.size(), -1);
    for (int i = 0; i < delta.bottom; ++i)
        if (delta.match[i] < delta.bottom) b.match[i] = delta.match[i];
    for (int r = 0; r < d; ++r) {
        b.match[bottom_through[r]] = delta.bottom + r;
        b.match[delta.bottom + r] = bottom_through[r];
    }
    TLDiagram& t = dec.top_half;
    t.bottom = d;
    t.top = delta.top;
    t.match.assign(t.size(), -1);
    for (int j = delta.bottom; j < delta.size(); ++j) {
        int pj = delta.match[j];
        if (pj >= delta.bottom) t.match[d + (j - delta.bottom)] = d + (pj - delta.bottom);
    }
    for (int r = 0; r < d; ++r) {
        int tj = d + (top_through[r] - delta.bottom);
        t.match[r] = tj;
        t.match[tj] = r;
    }
    return dec;
}

std::string to_string(const TLDiagram& d) {
    std::ostringstream os;
    os << "TL(" << d.bottom << "," << d.top << "){";
    bool first = true;
    for (int i = 0; i < d.size(); ++i) {
        if (d.match[i] > i) {
            if (!first) os << ' ';
            os << i << '-' << d.match[i];
            first = false;
        }
    }
    os << '}';
    if (d.circles) os << "+" << d.circles << "o";
    return os.str();
}

CycleStructure cycle_structure(const TLDiagram& source, const TLDiagram& target) {
    if (source.size() != target.size()) throw InvalidInput("cycle_structure: boundary mismatch");
    CycleStructure cs;
    const int n = source.size();
    cs.point_cycle.assign(n, -1);
    for (int p = 0; p < n; ++p) {
        if (cs.point_cycle[p] != -1) continue;
        int c = cs.alternating++;
        int cur = p;
        do {
            cs.point_cycle[cur] = c;
            int q = source.match[cur];
            cs.point_cycle[q] = c;
            cur = target.match[q];
        } while (cur != p);
    }
    cs.source_circles = source.circles;
    cs.target_circles = target.circles;
    return cs;
}

LinComb LinComb::single(Mask m, Int c) {
    LinComb l;
    if (c != 0) l.terms_.emplace_back(m, std::move(c));
    return l;
}

void LinComb::add(Mask m, const Int& c) {
    if (c == 0) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const std::pair<Mask, Int>& t, Mask key) { return t.first < key; });
    if (it != terms_.end() && it->first == m) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    } else {
        terms_.insert(it, {m, c});
    }
}

void LinComb::add(const LinComb& other, const Int& scale) {
    if (scale == 0) return;
    std::vector<std::pair<Mask, Int>> merged;
    merged.reserve(terms_.size() + other.terms_.size());
    auto a = terms_.begin();
    auto b = other.terms_.begin();
    while (a != terms_.end() || b != other.terms_.end()) {
        if (b == other.terms_.end() || (a != terms_.end() && a->first < b->first)) {
            merged.push_back(std::move(*a++));
        } else if (a == terms_.end() || b->first < a->first) {
            merged.emplace_back(b->first, b->second * scale);
            ++b;
        } else {
            Int v = a->second + b->second * scale;
            if (v != 0) merged.emplace_back(a->first, std::move(v));
            ++a;
            ++b;
        }
    }
    terms_ = std::move(merged);
}

LinComb LinComb::scaled(const Int& c) const {
    LinComb out;
    if (c == 0) return out;
    out.terms_ = terms_;
    for (auto& t : out.terms_) t.second *= c;
    return out;
}

Int LinComb::coefficient(Mask m) const {
    auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                               [](const std::pair<Mask, Int>& t, Mask key) { return t.first < key; });
    if (it != terms_.end() && it->first == m) return it->second;
    return 0;
}

int SurfaceBuilder::add_disk(bool dotted) {
    int id = static_cast<int>(parent_.size());
    parent_.push_back(id);
    dots_.push_back(dotted ? 1 : 0);
    arc_seams_.push_back(0);
    return id;
}

int SurfaceBuilder::find(int x) {
    while (parent_[x] != x) {
        parent_[x] = parent_[parent_[x]];
        x = parent_[x];
    }
    return x;
}

void SurfaceBuilder::add_seam(int disk_a, int disk_b, bool arc) {
    seams_.emplace_back(disk_a, arc ? 1 : 0);
    int ra = find(disk_a), rb = find(disk_b);
    if (ra != rb) parent_[rb] = ra;
}

LinComb SurfaceBuilder::reduce(const std::vector<int>& rep_disk) {
    const int nd = static_cast<int>(parent_.size());
    std::vector<int> disks(nd, 0), dots(nd, 0), arcs(nd, 0);
    for (int i = 0; i < nd; ++i) {
        int r = find(i);
        disks[r] += 1;
        dots[r] += dots_[i];
    }
    for (auto [a, arc] : seams_) arcs[find(a)] += arc;
    std::vector<std::vector<int>> cycles_of(nd);
    for (int c = 0; c < static_cast<int>(rep_disk.size()); ++c) cycles_of[find(rep_disk[c])].push_back(c);

    std::vector<std::pair<Mask, Int>> acc{{0, 1}};
    for (int r = 0; r < nd; ++r) {
        if (find(r) != r) continue;
        const int chi = disks[r] - arcs[r];
        const int b = static_cast<int>(cycles_of[r].size());
        const int twice_genus = 2 - b - chi;
        if (twice_genus < 0 || twice_genus % 2 != 0) throw std::logic_error("SurfaceBuilder: inconsistent surface");
        const int g = twice_genus / 2;
        const int e = g + dots[r];
        if (e >= 2) return {};
        const Int weight = g == 1 ? Int(2) : Int(1);
        Mask all = 0;
        for (int c : cycles_of[r]) all |= Mask{1} << c;
        std::vector<std::pair<Mask, Int>> local;
        if (b == 0) {
            if (e == 0) return {};
            local.emplace_back(0, weight);
        } else if (e == 1) {
            local.emplace_back(all, weight);
        } else {
            for (int c : cycles_of[r]) local.emplace_back(all & ~(Mask{1} << c), Int(1));
        }
        std::vector<std::pair<Mask, Int>> next;
        next.reserve(acc.size() * local.size());
        for (auto& [m1, c1] : acc)
            for (auto& [m2, c2] : local) next.emplace_back(m1 | m2, c1 * c2);
        acc = std::move(next);
    }
    LinComb out;
    for (auto& [m, c] : acc) out.add(m, c);
    return out;
}

std::vector<Cobordism::Component> Cobordism::components() const {
    CycleStructure cs = cycle_structure(source, target);
    std::vector<Component> out(cs.total());
    for (int p = 0; p < source.size(); ++p) out[cs.point_cycle[p]].cycle_points.push_back(p);
    for (int c = 0; c < cs.total(); ++c) out[c].dots = (dots >> c) & 1;
    return out;
}

std::vector<Cobordism> CobordismSum::cobordisms() const {
    std::vector<Cobordism> out;
    for (auto& [m, c] : terms.terms()) out.push_back(Cobordism{source, target, m, c});
    return out;
}

int degree(const TLDiagram& source, const TLDiagram& target, Mask dots) {
    CycleStructure cs = cycle_structure(source, target);
    return cs.total() - source.size() / 2 - 2 * std::popcount(dots);
}

CobordismSum identity_cobordism(const TLDiagram& d) {
    if (d.circles != 0) {
        // Identity on a circle is the cylinder: neck-cut into (dot on top) + (dot on bottom).
        CycleStructure cs = cycle_structure(d, d);
        LinComb acc = LinComb::single(0);
        for (int j = 0; j < d.circles; ++j) {
            LinComb next;
            Mask s = Mask{1} << cs.source_circle(j);
            Mask t = Mask{1} << cs.target_circle(j);
            for (auto& [m, c] : acc.terms()) {
                next.add(m | s, c);
                next.add(m | t, c);
            }
            acc = std::move(next);
        }
        return {d, d, acc};
    }
    return {d, d, LinComb::single(0)};
}

CobordismSum saddle(const TLDiagram& source, const TLDiagram& target) {
    CycleStructure cs = cycle_structure(source, target);
    if (source.circles != 0 || target.circles != 0 || cs.total() != source.size() / 2 - 1)
        throw InvalidInput("saddle: diagrams do not differ by a single saddle");
    return {source, target, LinComb::single(0)};
}

LinComb compose_terms(const TLDiagram& s, const TLDiagram& y, const TLDiagram& t, const LinComb& phi,
                      const LinComb& psi) {
    const CycleStructure c1 = cycle_structure(s, y);
    const CycleStructure c2 = cycle_structure(y, t);
    const CycleStructure c3 = cycle_structure(s, t);
    LinComb out;
    for (auto& [m1, k1] : phi.terms()) {
        for (auto& [m2, k2] : psi.terms()) {
            SurfaceBuilder sb;
            for (int c = 0; c < c1.total(); ++c) sb.add_disk((m1 >> c) & 1);
            const int off = c1.total();
            for (int c = 0; c < c2.total(); ++c) sb.add_disk((m2 >> c) & 1);
            for (int p = 0; p < y.size(); ++p)
                if (p < y.match[p]) sb.add_seam(c1.point_cycle[p], off + c2.point_cycle[p], true);
            for (int j = 0; j < y.circles; ++j) sb.add_seam(c1.target_circle(j), off + c2.source_circle(j), false);
            std::vector<int> rep(c3.total());
            std::vector<char> done(c3.alternating, 0);
            for (int p = 0; p < s.size(); ++p) {
                int c = c3.point_cycle[p];
                if (!done[c]) {
                    done[c] = 1;
                    rep[c] = c1.point_cycle[p];
                }
            }
            for (int j = 0; j < s.circles; ++j) rep[c3.source_circle(j)] = c1.source_circle(j);
            for (int j = 0; j < t.circles; ++j) rep[c3.target_circle(j)] = off + c2.target_circle(j);
            out.add(sb.reduce(rep), k1 * k2);
        }
    }
    return out;
}

CobordismSum compose(const CobordismSum& phi, const CobordismSum& psi) {
    if (phi.target != psi.source) throw InvalidInput("compose: target of phi differs from source of psi");
    return {phi.source, psi.target, compose_terms(phi.source, phi.target, psi.target, phi.terms, psi.terms)};
}

Int evaluate_closed(const std::vector<ClosedComponent>& components) {
    Int value = 1;
    for (const auto& c : components) {
        if (c.genus < 0 || c.dots < 0) throw InvalidInput("evaluate_closed: negative genus or dots");
        int e = c.genus + c.dots;
        if (e != 1) return 0;
        if (c.genus == 1) value *= 2;
    }
    return value;
}

}  // namespace khmr
