#ifndef FOURFOLD_GF2_HPP
#define FOURFOLD_GF2_HPP

#include <vector>

namespace fourfold::gf2 {

/// Rank over the two-element field by row elimination.
inline int rank(std::vector<std::vector<int>> m)
{
    int rows = static_cast<int>(m.size());
    if (rows == 0) return 0;
    int cols = static_cast<int>(m[0].size());
    int rk = 0;
    for (int c = 0; c < cols && rk < rows; ++c) {
        int pivot = -1;
        for (int r = rk; r < rows; ++r)
            if (m[r][c] & 1) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(m[rk], m[pivot]);
        for (int r = 0; r < rows; ++r)
            if (r != rk && (m[r][c] & 1))
                for (int j = 0; j < cols; ++j) m[r][j] ^= m[rk][j];
        ++rk;
    }
    return rk;
}

inline bool is_lower_unitriangular(const std::vector<std::vector<int>>& m)
{
    for (size_t i = 0; i < m.size(); ++i) {
        if ((m[i][i] & 1) != 1) return false;
        for (size_t j = i + 1; j < m[i].size(); ++j)
            if (m[i][j] & 1) return false;
    }
    return true;
}

} // namespace fourfold::gf2

#endif
