/**
 * @file twist_factory.cpp
 * @brief Full twist complexes, through-degree bounds and stabilization checks.
 */
#include "khmr/twist_factory.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

namespace khmr {

std::string TwistSpec::orientation_string() const {
    std::string s;
    for (int j = 0; j < n; ++j) {
        int o = orientation.empty() ? 1 : orientation.at(j);
        s += o > 0 ? 'u' : 'd';
    }
    return s;
}

std::vector<int> jucys_murphy_word(int m) {
    std::vector<int> w;
    for (int i = m - 1; i >= 1; --i) w.push_back(i);
    for (int i = 1; i <= m - 1; ++i) w.push_back(i);
    return w;
}

std::vector<int> full_twist_word(int n) {
    std::vector<int> w;
    for (int m = 2; m <= n; ++m) {
        auto e = jucys_murphy_word(m);
        w.insert(w.end(), e.begin(), e.end());
    }
    return w;
}

namespace {

std::vector<int> iota_vec(int from, int count) {
    std::vector<int> v(count);
    std::iota(v.begin(), v.end(), from);
    return v;
}

ChainComplex identity_complex(int n) {
    TLDiagram id = identity_diagram(n);
    id.top = 0;
    id.bottom = 2 * n;
    return matching_complex(iota_vec(0, 2 * n), id);
}

}  // namespace

ChainComplex braid_complex(int n, const std::vector<int>& word, std::optional<int> h_floor) {
    if (n < 1) throw InvalidInput("braid_complex: need at least one strand");
    ChainComplex acc = identity_complex(n);
    std::vector<int> cur = iota_vec(n, n);
    int fresh = 2 * n;
    const int len = static_cast<int>(word.size());
    for (int pos = 0; pos < len; ++pos) {
        const int letter = word[pos];
        int i = std::abs(letter);
        if (i < 1 || i >= n) throw InvalidInput("braid_complex: generator out of range");
        int in_l = cur[i - 1], in_r = cur[i];
        int out_l = fresh++, out_r = fresh++;
        std::array<int, 4> x = letter > 0 ? std::array<int, 4>{in_r, out_r, out_l, in_l}
                                          : std::array<int, 4>{in_l, in_r, out_r, out_l};
        acc = compose_complexes(acc, unsigned_crossing_complex(x));
        // Each remaining crossing raises degrees by at most one.
        if (h_floor) acc = truncate_below(acc, *h_floor - (len - pos - 1));
        cur[i - 1] = out_l;
        cur[i] = out_r;
    }
    std::vector<int> order = iota_vec(0, n);
    order.insert(order.end(), cur.begin(), cur.end());
    ChainComplex out = as_rectangle(reorder_boundary(acc, order), n);
    out.labels = iota_vec(0, 2 * n);
    return out;
}

ChainComplex stack_complexes(const ChainComplex& lower, const ChainComplex& upper) {
    const int n = static_cast<int>(lower.labels.size()) / 2;
    if (static_cast<int>(upper.labels.size()) != 2 * n) throw InvalidInput("stack_complexes: size mismatch");
    ChainComplex a = lower, b = upper;
    a.labels = iota_vec(0, n);
    auto mid = iota_vec(2 * n, n);
    a.labels.insert(a.labels.end(), mid.begin(), mid.end());
    b.labels = mid;
    auto top = iota_vec(n, n);
    b.labels.insert(b.labels.end(), top.begin(), top.end());
    ChainComplex c = compose_complexes(a, b);
    ChainComplex out = as_rectangle(reorder_boundary(c, iota_vec(0, 2 * n)), n);
    return out;
}

std::pair<int, int> twist_shift(int n, int k) {
    if (n % 2 != 0) return {0, 0};
    int p = n / 2;
    return {-2 * k * p * p, -2 * k * p * (p + 1)};
}

ChainComplex reduced_twist_complex(const TwistSpec& spec, std::optional<int> h_floor) {
    if (spec.k < 0) throw InvalidInput("reduced_twist_complex: k must be non-negative");
    if (!spec.orientation.empty() && static_cast<int>(spec.orientation.size()) != spec.n)
        throw InvalidInput("reduced_twist_complex: orientation length differs from n");
    std::vector<int> word;
    for (int i = 0; i < spec.k; ++i) {
        auto w = full_twist_word(spec.n);
        word.insert(word.end(), w.begin(), w.end());
    }
    auto [dh, dq] = twist_shift(spec.n, spec.k);
    std::optional<int> floor;
    if (h_floor) floor = *h_floor - dh;
    ChainComplex acc = braid_complex(spec.n, word, floor);
    if (floor) acc = truncate_below(acc, *floor);
    return shift(acc, dh, dq);
}

ThroughDegreeReport check_through_degree_bounds(int n) {
    ThroughDegreeReport rep;
    ChainComplex c = braid_complex(n, full_twist_word(n));
    const int half = n / 2;
    rep.max_h_by_m.assign(half + 1, -1);
    for (auto& o : c.objects) {
        if (o.diagram.circles != 0) {
            rep.ok = false;
            rep.violations.push_back("object with circles at h=" + std::to_string(o.h));
        }
        int th = through_degree(o.diagram);
        int m = (n - th) / 2;
        int bound = 2 * m * (n - m);
        if (o.h > bound) {
            rep.ok = false;
            rep.violations.push_back("through-degree " + std::to_string(th) + " at h=" + std::to_string(o.h) +
                                     " exceeds " + std::to_string(bound));
        }
        rep.max_h_by_m[m] = std::max(rep.max_h_by_m[m], o.h);
    }
    for (int m = 0; m <= half; ++m) {
        if (rep.max_h_by_m[m] != 2 * m * (n - m)) {
            rep.ok = false;
            rep.violations.push_back("bound for m=" + std::to_string(m) + " not attained");
        }
    }
    if (n % 2 == 0) {
        int top = 2 * half * half;
        for (auto& o : c.objects)
            if ((o.h == top || o.h == top - 1) && through_degree(o.diagram) != 0) {
                rep.ok = false;
                rep.violations.push_back("nonzero through-degree at h=" + std::to_string(o.h));
            }
    }
    return rep;
}

namespace {

BigradedHomology close_and_compute(const ChainComplex& twist, const TLDiagram& closure) {
    ChainComplex c = twist;
    const int n2 = static_cast<int>(c.labels.size());
    c.labels = iota_vec(0, n2);
    for (auto& o : c.objects) {
        o.diagram.bottom = n2;
        o.diagram.top = 0;
    }
    return homology(compose_complexes(c, matching_complex(iota_vec(0, n2), closure)));
}

std::map<std::tuple<TLDiagram, int, int>, int> object_multiset(const ChainComplex& c, int above) {
    std::map<std::tuple<TLDiagram, int, int>, int> out;
    for (auto& o : c.objects)
        if (o.h > above) out[{o.diagram, o.h, o.q}]++;
    return out;
}

}  // namespace

BigradedHomology braid_closure_homology(const ChainComplex& twist) {
    const int n = static_cast<int>(twist.labels.size()) / 2;
    std::vector<std::pair<int, int>> pairs;
    for (int j = 0; j < n; ++j) pairs.emplace_back(j, n + j);
    return close_and_compute(twist, make_diagram(2 * n, 0, pairs));
}

BigradedHomology plat_closure_homology(const ChainComplex& twist) {
    const int n = static_cast<int>(twist.labels.size()) / 2;
    if (n % 2 != 0) throw InvalidInput("plat closure needs an even number of strands");
    std::vector<std::pair<int, int>> pairs;
    for (int j = 0; j < n; j += 2) {
        pairs.emplace_back(j, j + 1);
        pairs.emplace_back(n + j, n + j + 1);
    }
    return close_and_compute(twist, make_diagram(2 * n, 0, pairs));
}

StabilizationReport check_stabilization(int n, int k) {
    StabilizationReport rep;
    rep.window_low = -2 * k;
    ChainComplex a = reduced_twist_complex({n, k, {}});
    ChainComplex b = reduced_twist_complex({n, k + 1, {}});
    if (object_multiset(a, rep.window_low) != object_multiset(b, rep.window_low)) {
        rep.objects_agree = false;
        rep.mismatches.push_back("object multisets differ above h=" + std::to_string(rep.window_low));
    }
    auto compare = [&](const BigradedHomology& x, const BigradedHomology& y, const std::string& what) {
        // Truncation perturbs homology only in the lowest kept degree.
        const int low = rep.window_low + 1;
        std::map<std::pair<int, int>, HomologyCell> fx, fy;
        for (auto& [hq, cell] : x)
            if (hq.first > low) fx[hq] = cell;
        for (auto& [hq, cell] : y)
            if (hq.first > low) fy[hq] = cell;
        if (fx != fy) {
            rep.closures_agree = false;
            rep.mismatches.push_back(what + " closure homology differs");
        }
    };
    ChainComplex ta = truncate(a, rep.window_low), tb = truncate(b, rep.window_low);
    compare(braid_closure_homology(ta), braid_closure_homology(tb), "braid");
    if (n % 2 == 0) compare(plat_closure_homology(ta), plat_closure_homology(tb), "plat");
    rep.ok = rep.objects_agree && rep.closures_agree;
    return rep;
}

ChainComplex truncated_infinite_twist(int n, int h_min, int* k_used) {
    if (h_min > 0) h_min = 0;
    const int k0 = (-h_min + 1) / 2 + 1;
    for (int k = k0; k <= k0 + 4; ++k) {
        if (check_stabilization(n, k).ok) {
            if (k_used) *k_used = k;
            return truncate_below(reduced_twist_complex({n, k, {}}), h_min);
        }
    }
    throw ResourceError("truncated_infinite_twist: no stable k found up to " + std::to_string(k0 + 4));
}

std::string engine_version() { return "khmr-engine-1"; }

TwistCache::TwistCache(std::filesystem::path root) : root_(std::move(root)) {}

std::filesystem::path TwistCache::path_for(const TwistSpec& spec) const {
    return root_ / "cache" / "twist" /
           ("n" + std::to_string(spec.n) + "_k" + std::to_string(spec.k) + "_" + spec.orientation_string() + ".cx");
}

std::optional<ChainComplex> TwistCache::load(const TwistSpec& spec, std::optional<int> h_floor) const {
    std::ifstream in(path_for(spec));
    if (!in) return std::nullopt;
    try {
        nlohmann::json j = nlohmann::json::parse(in);
        if (j.at("format") != "khmr-complex" || j.at("version") != 1 || j.at("engine") != engine_version() ||
            j.at("n") != spec.n || j.at("k") != spec.k)
            return std::nullopt;
        const auto& f = j.at("h_floor");
        if (!f.is_null() && (!h_floor || f.get<int>() > *h_floor)) return std::nullopt;
        return complex_from_json(j.at("complex"));
    } catch (const std::exception&) {
        return std::nullopt;
    }
}

void TwistCache::store(const TwistSpec& spec, const ChainComplex& c, std::optional<int> h_floor) const {
    auto path = path_for(spec);
    std::filesystem::create_directories(path.parent_path());
    nlohmann::json j = {{"format", "khmr-complex"},
                        {"version", 1},
                        {"engine", engine_version()},
                        {"n", spec.n},
                        {"k", spec.k},
                        {"orientation", spec.orientation_string()},
                        {"h_floor", h_floor ? nlohmann::json(*h_floor) : nlohmann::json()},
                        {"complex", complex_to_json(c)}};
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp);
        if (!out) throw std::runtime_error("cannot write cache file " + tmp.string());
        out << j.dump();
    }
    std::filesystem::rename(tmp, path);
}

ChainComplex TwistCache::get(const TwistSpec& spec, std::optional<int> h_floor) const {
    if (auto c = load(spec, h_floor)) return *c;
    ChainComplex c = reduced_twist_complex(spec, h_floor);
    store(spec, c, h_floor);
    return c;
}

}  // namespace khmr
