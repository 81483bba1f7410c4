/**
 * @file twist_factory.hpp
 * @brief Reduced complexes of full twists, their stabilization and an on-disk cache.
 *
 * Twist complexes are n-n tangle complexes with bottom points 0..n-1 and top
 * points n..2n-1, both left to right.  Gradings are those of the unsigned cube
 * (a 1-resolution raises h and q by one) shifted by (-2kp^2, -2kp(p+1)) for
 * even n = 2p, which makes them independent of strand orientations.
 */
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "khmr/chain_engine.hpp"

namespace khmr {

struct TwistSpec {
    int n = 2;
    int k = 1;
    std::vector<int> orientation;  ///< +1 up, -1 down per strand; empty means all up
    std::string orientation_string() const;
};

/// Positive braid letters (1-based generator indices) of E_m = s_{m-1}..s_1 s_1..s_{m-1}.
std::vector<int> jucys_murphy_word(int m);
/// Full twist on n strands as the product E_2 E_3 ... E_n.
std::vector<int> full_twist_word(int n);

/// Unsigned-cube complex of a braid word (letters +-i), simplified while scanning.
/// With @p h_floor, objects that can only influence degrees below it are dropped
/// during the scan: the result is then exact in degrees >= h_floor.
ChainComplex braid_complex(int n, const std::vector<int>& word, std::optional<int> h_floor = std::nullopt);
/// Stacks @p upper on top of @p lower (both n-n rectangle complexes) and simplifies.
ChainComplex stack_complexes(const ChainComplex& lower, const ChainComplex& upper);
/// Reduced complex of the k-fold full twist with the orientation-free shift,
/// optionally exact only in (shifted) degrees >= h_floor.
ChainComplex reduced_twist_complex(const TwistSpec& spec, std::optional<int> h_floor = std::nullopt);
/// Shift applied to the unsigned cube of F_n^k.
std::pair<int, int> twist_shift(int n, int k);

struct ThroughDegreeReport {
    bool ok = true;
    std::vector<std::string> violations;
    std::vector<int> max_h_by_m;  ///< largest h attained by through-degree n-2m
};
/// Checks the through-degree bounds on the unshifted reduced complex of one full twist.
ThroughDegreeReport check_through_degree_bounds(int n);

struct StabilizationReport {
    bool ok = true;
    bool objects_agree = true;
    bool closures_agree = true;
    int window_low = 0;  ///< compared degrees are h > window_low
    std::vector<std::string> mismatches;
};
/// Compares C(k) and C(k+1) above degree -2k.
StabilizationReport check_stabilization(int n, int k);

/// Homology of the braid closure (and plat closure for even n) of a twist complex.
BigradedHomology braid_closure_homology(const ChainComplex& twist);
BigradedHomology plat_closure_homology(const ChainComplex& twist);

/// Complex of the infinite twist in degrees h >= h_min, from a verified stable k.
ChainComplex truncated_infinite_twist(int n, int h_min, int* k_used = nullptr);

/// Version tag written into cache files; a mismatch forces recomputation.
std::string engine_version();

/// Twist complexes stored under root/cache/twist/n{n}_k{k}_{orient}.cx.
class TwistCache {
public:
    explicit TwistCache(std::filesystem::path root);
    std::filesystem::path path_for(const TwistSpec& spec) const;
    /// Cached complex if it is exact at least down to @p h_floor (none asks for the full complex).
    std::optional<ChainComplex> load(const TwistSpec& spec, std::optional<int> h_floor = std::nullopt) const;
    void store(const TwistSpec& spec, const ChainComplex& c, std::optional<int> h_floor = std::nullopt) const;
    /// Loads from disk, or computes and stores.
    ChainComplex get(const TwistSpec& spec, std::optional<int> h_floor = std::nullopt) const;

private:
    std::filesystem::path root_;
};

}  // namespace khmr
