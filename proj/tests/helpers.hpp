#ifndef FOURFOLD_TESTS_HELPERS_HPP
#define FOURFOLD_TESTS_HELPERS_HPP

#include <random>
#include <vector>

#include "fourfold/manifold.hpp"

namespace fourfold::testing {

inline std::vector<int> free_nuclei(const ManifoldModel& m)
{
    std::vector<int> out;
    for (const auto& n : m.nuclei)
        if (!n.consumed) out.push_back(n.label);
    return out;
}

/// Random symplectic model built from elliptic blocks by fiber sums and odd
/// log transforms, choosing only nuclei that are actually available.
inline ManifoldModel random_symplectic_model(std::mt19937& rng, int depth)
{
    std::uniform_int_distribution<int> pick(0, 3);
    if (depth <= 0) return make_elliptic(pick(rng) < 3 ? 2 : 4);
    switch (pick(rng)) {
        case 0:
        case 1: {
            ManifoldModel l = random_symplectic_model(rng, depth - 1);
            ManifoldModel r = random_symplectic_model(rng, depth - 1);
            auto lf = free_nuclei(l), rf = free_nuclei(r);
            if (lf.empty() || rf.empty()) return l;
            std::uniform_int_distribution<size_t> li(0, lf.size() - 1), ri(0, rf.size() - 1);
            return fiber_sum(l, r, lf[li(rng)], rf[ri(rng)]);
        }
        case 2: {
            ManifoldModel c = random_symplectic_model(rng, depth - 1);
            auto cf = free_nuclei(c);
            if (cf.empty()) return c;
            std::uniform_int_distribution<size_t> ci(0, cf.size() - 1);
            std::uniform_int_distribution<long long> q(0, 2);
            return log_transform(c, cf[ci(rng)], 2 * q(rng) + 1);
        }
        default:
            return make_elliptic(2);
    }
}

} // namespace fourfold::testing

#endif
