#ifndef FOURFOLD_DATASPACE_HPP
#define FOURFOLD_DATASPACE_HPP

#include <boost/rational.hpp>
#include <map>
#include <string>
#include <vector>

#include "errors.hpp"

namespace fourfold::walls {

// A finite-dimensional affine stand-in for the contractible space of data.
// All geometry is exact rational arithmetic; there are no tolerances here.

using Rat = boost::rational<long long>;
using Point = std::vector<Rat>;

inline Point origin(int dimension) { return Point(static_cast<size_t>(dimension), Rat(0)); }

/// The ambient affine space of data; contractible by construction.
struct DataSpace {
    int dimension = 1;

    void validate() const
    {
        if (dimension < 1) fail(ErrorCode::Precondition, "data space dimension must be >= 1");
    }
    Point basepoint() const { return origin(dimension); }
};

/// L(x) = normal . x + offset
struct AffineFunctional {
    std::vector<Rat> normal;
    Rat offset = Rat(0);
    int sign = +1; // co-orientation convention

    Rat eval(const Point& x) const
    {
        if (x.size() != normal.size())
            fail(ErrorCode::Precondition, "point dimension does not match functional");
        Rat acc = offset;
        for (size_t i = 0; i < normal.size(); ++i) acc += normal[i] * x[i];
        return acc;
    }
};

/// Affine subspace of codimension m, cut out by m independent functionals.
struct Wall {
    std::vector<AffineFunctional> functionals;

    int codim() const { return static_cast<int>(functionals.size()); }
    int dimension() const
    {
        return functionals.empty() ? 0 : static_cast<int>(functionals[0].normal.size());
    }
    void validate() const; // functional independence, defined below
};

struct Simplex {
    std::vector<Point> vertices;
    int dim() const { return static_cast<int>(vertices.size()) - 1; }
};

struct WeightedSimplex {
    long long weight = 0;
    Simplex simplex;
};

/// Integer-weighted formal sum of affine simplices of one dimension.
struct Chain {
    std::vector<WeightedSimplex> simplices;

    int dim() const { return simplices.empty() ? -1 : simplices[0].simplex.dim(); }

    void validate() const
    {
        for (const auto& ws : simplices)
            if (ws.simplex.dim() != dim())
                fail(ErrorCode::Precondition, "mixed simplex dimensions in chain");
    }
};

// ---------------------------------------------------------------------------
// Boundary operator and cycle test.
// ---------------------------------------------------------------------------

inline Chain boundary(const Chain& chain)
{
    Chain out;
    for (const auto& ws : chain.simplices) {
        int j = ws.simplex.dim();
        if (j == 0) continue;
        for (int k = 0; k <= j; ++k) {
            Simplex face;
            for (int t = 0; t <= j; ++t)
                if (t != k) face.vertices.push_back(ws.simplex.vertices[t]);
            long long sign = (k % 2 == 0) ? 1 : -1;
            out.simplices.push_back({ws.weight * sign, std::move(face)});
        }
    }
    return out;
}

namespace detail {

/// Canonical form: vertices sorted, weight adjusted by permutation parity.
/// Simplices with a repeated vertex are degenerate and canonically zero.
inline std::map<std::vector<Point>, long long> canonical_weights(const Chain& chain)
{
    std::map<std::vector<Point>, long long> acc;
    for (const auto& ws : chain.simplices) {
        std::vector<Point> v = ws.simplex.vertices;
        long long parity = 1;
        for (size_t i = 0; i + 1 < v.size(); ++i) // insertion sort, tracking swaps
            for (size_t j = i + 1; j < v.size(); ++j)
                if (v[j] < v[i]) {
                    std::swap(v[i], v[j]);
                    parity = -parity;
                }
        bool degenerate = false;
        for (size_t i = 0; i + 1 < v.size(); ++i)
            if (v[i] == v[i + 1]) degenerate = true;
        if (degenerate) continue;
        acc[v] += parity * ws.weight;
    }
    for (auto it = acc.begin(); it != acc.end();)
        it = it->second == 0 ? acc.erase(it) : std::next(it);
    return acc;
}

} // namespace detail

inline bool is_cycle(const Chain& chain)
{
    return detail::canonical_weights(boundary(chain)).empty();
}

// ---------------------------------------------------------------------------
// Exact signed crossing counts.
// ---------------------------------------------------------------------------

namespace detail {

struct LinearSolve {
    bool consistent = false;
    int rank = 0;
    std::vector<Rat> solution; // valid when rank == unknowns
};

/// Gaussian elimination for A x = b over the rationals.
inline LinearSolve solve(std::vector<std::vector<Rat>> a, std::vector<Rat> b)
{
    int rows = static_cast<int>(a.size());
    int cols = rows ? static_cast<int>(a[0].size()) : 0;
    std::vector<int> pivot_col;
    int rk = 0;
    for (int c = 0; c < cols && rk < rows; ++c) {
        int pivot = -1;
        for (int r = rk; r < rows; ++r)
            if (a[r][c] != Rat(0)) {
                pivot = r;
                break;
            }
        if (pivot < 0) continue;
        std::swap(a[rk], a[pivot]);
        std::swap(b[rk], b[pivot]);
        for (int r = 0; r < rows; ++r) {
            if (r == rk || a[r][c] == Rat(0)) continue;
            Rat factor = a[r][c] / a[rk][c];
            for (int j = c; j < cols; ++j) a[r][j] -= factor * a[rk][j];
            b[r] -= factor * b[rk];
        }
        pivot_col.push_back(c);
        ++rk;
    }
    LinearSolve out;
    out.rank = rk;
    out.consistent = true;
    for (int r = rk; r < rows; ++r)
        if (b[r] != Rat(0)) out.consistent = false;
    if (out.consistent && rk == cols) {
        out.solution.assign(cols, Rat(0));
        for (int i = 0; i < rk; ++i) out.solution[pivot_col[i]] = b[i] / a[i][pivot_col[i]];
    }
    return out;
}

inline Rat det(std::vector<std::vector<Rat>> a)
{
    int n = static_cast<int>(a.size());
    Rat d(1);
    for (int c = 0; c < n; ++c) {
        int pivot = -1;
        for (int r = c; r < n; ++r)
            if (a[r][c] != Rat(0)) {
                pivot = r;
                break;
            }
        if (pivot < 0) return Rat(0);
        if (pivot != c) {
            std::swap(a[pivot], a[c]);
            d = -d;
        }
        d *= a[c][c];
        for (int r = c + 1; r < n; ++r) {
            if (a[r][c] == Rat(0)) continue;
            Rat factor = a[r][c] / a[c][c];
            for (int j = c; j < n; ++j) a[r][j] -= factor * a[c][j];
        }
    }
    return d;
}

/// System L_i(sigma(lambda)) = 0 in barycentric coordinates lambda_1..lambda_j
/// of the given vertex subset. Row i scaled by the wall's sign convention.
inline void wall_system(const Wall& wall, const std::vector<Point>& verts,
                        std::vector<std::vector<Rat>>& a, std::vector<Rat>& b)
{
    int m = wall.codim();
    int j = static_cast<int>(verts.size()) - 1;
    a.assign(m, std::vector<Rat>(j, Rat(0)));
    b.assign(m, Rat(0));
    for (int i = 0; i < m; ++i) {
        const AffineFunctional& L = wall.functionals[i];
        Rat at0 = L.eval(verts[0]);
        for (int t = 1; t <= j; ++t) a[i][t - 1] = Rat(L.sign) * (L.eval(verts[t]) - at0);
        b[i] = Rat(-L.sign) * at0;
    }
}

/// Signed transverse crossings of one simplex of dimension m through a wall
/// of codimension m. Faces of positive codimension must miss the wall.
inline long long simplex_crossings(const Simplex& sx, const Wall& wall)
{
    int m = wall.codim();
    if (sx.dim() != m)
        fail(ErrorCode::Precondition, "simplex dimension does not match wall codimension");

    // Proper faces must miss the wall exactly.
    int nverts = m + 1;
    for (unsigned mask = 1; mask + 1 < (1u << nverts); ++mask) {
        std::vector<Point> face;
        for (int t = 0; t < nverts; ++t)
            if (mask & (1u << t)) face.push_back(sx.vertices[t]);
        if (static_cast<int>(face.size()) == nverts) continue;
        std::vector<std::vector<Rat>> a;
        std::vector<Rat> b;
        wall_system(wall, face, a, b);
        LinearSolve s = solve(a, b);
        if (!s.consistent) continue;
        int unknowns = static_cast<int>(face.size()) - 1;
        if (s.rank < unknowns)
            fail(ErrorCode::NotTransverse, "wall meets a face affine hull non-transversally");
        // Unique solution on the affine hull; reject if inside the closed face.
        Rat total(0);
        bool inside = true;
        for (const Rat& l : s.solution) {
            if (l < Rat(0)) inside = false;
            total += l;
        }
        if (total > Rat(1)) inside = false;
        if (inside) fail(ErrorCode::NotTransverse, "wall touches a simplex face");
    }

    std::vector<std::vector<Rat>> a;
    std::vector<Rat> b;
    wall_system(wall, sx.vertices, a, b);
    Rat d = det(a);
    if (d == Rat(0)) {
        LinearSolve s = solve(a, b);
        if (!s.consistent) return 0; // parallel, no intersection
        fail(ErrorCode::NotTransverse, "wall meets simplex in positive dimension");
    }
    LinearSolve s = solve(a, b);
    Rat total(0);
    for (const Rat& l : s.solution) {
        if (l <= Rat(0)) return 0;
        total += l;
    }
    if (total >= Rat(1)) return 0;
    return d > Rat(0) ? 1 : -1;
}

} // namespace detail

inline void Wall::validate() const
{
    std::vector<std::vector<Rat>> rows;
    std::vector<Rat> rhs;
    for (const auto& L : functionals) {
        rows.push_back(L.normal);
        rhs.push_back(Rat(0));
    }
    detail::LinearSolve s = detail::solve(std::move(rows), std::move(rhs));
    if (s.rank != codim())
        fail(ErrorCode::Precondition, "wall functionals are linearly dependent");
}

/// Weighted sum of signed transverse intersections of an m-chain with a
/// codimension-m wall.
inline long long signed_crossing_count(const Chain& chain, const Wall& wall)
{
    chain.validate();
    wall.validate();
    long long total = 0;
    for (const auto& ws : chain.simplices)
        total += ws.weight * detail::simplex_crossings(ws.simplex, wall);
    return total;
}

// ---------------------------------------------------------------------------
// Bounding chains: the space is affine, every cycle is a cone's boundary.
// ---------------------------------------------------------------------------

inline Chain cone(const Chain& chain, const Point& basepoint)
{
    Chain out;
    for (const auto& ws : chain.simplices) {
        Simplex s;
        s.vertices.push_back(basepoint);
        s.vertices.insert(s.vertices.end(), ws.simplex.vertices.begin(), ws.simplex.vertices.end());
        out.simplices.push_back({ws.weight, std::move(s)});
    }
    return out;
}

inline Chain bounding_chain(const Chain& cycle, const Point& basepoint)
{
    if (!is_cycle(cycle)) fail(ErrorCode::NotACycle, "bounding_chain needs a cycle");
    return cone(cycle, basepoint);
}

/// Count for the cone over a cycle against a wall of codimension dim+1.
/// On transversality failure the basepoint is moved by the deterministic
/// rule: increment the last coordinate by 1 and retry.
inline long long invariant_of_cycle(const Chain& cycle, const Wall& wall,
                                    Point basepoint = {})
{
    if (!is_cycle(cycle)) fail(ErrorCode::NotACycle, "invariant_of_cycle needs a cycle");
    if (cycle.dim() + 1 != wall.codim())
        fail(ErrorCode::Precondition, "wall codimension must be cycle dimension + 1");
    if (basepoint.empty()) basepoint = origin(wall.dimension());
    for (int attempt = 0; attempt < 64; ++attempt) {
        try {
            return signed_crossing_count(cone(cycle, basepoint), wall);
        } catch (const EngineError& e) {
            if (e.code() != ErrorCode::NotTransverse) throw;
            basepoint.back() += Rat(1);
        }
    }
    fail(ErrorCode::NotTransverse, "no transverse cone basepoint found");
}

} // namespace fourfold::walls

#endif
