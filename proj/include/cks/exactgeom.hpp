#pragma once

// Exact rational polytope kernel. Everything here is rational; no floating point.

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "cks/linalg.hpp"
#include "cks/lp.hpp"
#include "cks/rational.hpp"

namespace cks::geom {

/// {alpha : <alpha, normal> >= offset}, normal a primitive integer vector.
struct HalfSpace {
    RatVec normal;
    Rat offset;

    bool contains(const RatVec& a) const { return dot(a, normal) >= offset; }
    bool tight(const RatVec& a) const { return dot(a, normal) == offset; }

    friend bool operator==(const HalfSpace&, const HalfSpace&) = default;
    friend auto operator<=>(const HalfSpace& a, const HalfSpace& b)
    {
        if (auto c = a.normal <=> b.normal; c != 0) return c;
        return a.offset <=> b.offset;
    }
};

/// Rescales (n, c) by a positive factor so that n becomes primitive integer.
inline HalfSpace normalized(const RatVec& n, const Rat& c)
{
    RatVec p = primitive(n);
    std::size_t k = 0;
    while (n[k].is_zero()) ++k;
    Rat factor = p[k] / n[k];  // positive: primitive() keeps orientation
    return {p, c * factor};
}

enum class Extremum { Min, Max };

struct SupportResult {
    Rat value;
    RatVec vertex;
};

class ExactPolytope;
ExactPolytope from_vertices(std::vector<RatVec> pts);

/// Nonempty bounded rational polytope holding both descriptions, cross-validated.
class ExactPolytope {
public:
    std::size_t rank() const { return rank_; }
    /// Dimension of the affine hull.
    std::size_t dim() const { return dim_; }
    bool full_dimensional() const { return dim_ == rank_; }
    const std::vector<RatVec>& vertices() const { return vertices_; }
    const std::vector<HalfSpace>& halfspaces() const { return halfspaces_; }

    bool contains(const RatVec& a) const
    {
        require_same_rank(a, vertices_.front(), "polytope membership");
        for (const auto& h : halfspaces_)
            if (!h.contains(a)) return false;
        return true;
    }

    bool is_lattice() const
    {
        for (const auto& v : vertices_)
            if (!is_integral(v)) return false;
        return true;
    }

    ExactPolytope scaled(const Rat& s) const
    {
        if (s.sign() <= 0) throw Error(ErrorCode::DegenerateInput, "polytope scale must be positive");
        ExactPolytope p = *this;
        for (auto& v : p.vertices_) v = s * v;
        for (auto& h : p.halfspaces_) h.offset *= s;
        return p;
    }

    ExactPolytope translated(const RatVec& t) const
    {
        require_same_rank(t, vertices_.front(), "translation");
        ExactPolytope p = *this;
        for (auto& v : p.vertices_) v = v + t;
        for (auto& h : p.halfspaces_) h.offset += dot(h.normal, t);
        std::sort(p.halfspaces_.begin(), p.halfspaces_.end());
        return p;
    }

    friend bool operator==(const ExactPolytope& a, const ExactPolytope& b)
    {
        return a.vertices_ == b.vertices_;
    }

private:
    friend ExactPolytope from_vertices(std::vector<RatVec> pts);
    std::size_t rank_ = 0, dim_ = 0;
    std::vector<RatVec> vertices_;
    std::vector<HalfSpace> halfspaces_;
};

namespace detail {

inline void sort_unique(std::vector<RatVec>& pts)
{
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
}

/// Affine hull of points: dimension, the coordinates on which projection is injective,
/// and equations (normal, value) cutting it out.
struct AffineHull {
    std::size_t dim = 0;
    std::vector<std::size_t> chart;
    std::vector<std::pair<RatVec, Rat>> equations;
};

inline AffineHull affine_hull(const std::vector<RatVec>& pts)
{
    const std::size_t p = pts.front().size();
    linalg::Matrix d;
    for (std::size_t j = 1; j < pts.size(); ++j) d.push_back(pts[j] - pts[0]);
    AffineHull h;
    if (d.empty()) {
        for (std::size_t i = 0; i < p; ++i) {
            RatVec e = zeros(p);
            e[i] = 1;
            h.equations.emplace_back(e, pts[0][i]);
        }
        return h;
    }
    linalg::Matrix r = d;
    h.chart = linalg::rref(r);
    h.dim = h.chart.size();
    // Orthogonal complement of the direction space.
    linalg::Matrix rows(r.begin(), r.begin() + static_cast<std::ptrdiff_t>(h.dim));
    for (auto& n : linalg::kernel(rows, p)) {
        RatVec pn = primitive(n);
        h.equations.emplace_back(pn, dot(pn, pts[0]));
    }
    return h;
}

inline RatVec project(const RatVec& a, const std::vector<std::size_t>& chart)
{
    RatVec r;
    r.reserve(chart.size());
    for (auto c : chart) r.push_back(a[c]);
    return r;
}

/// Facet inequalities of the convex hull of full-dimensional points in R^d (d >= 1).
inline std::vector<HalfSpace> hull_facets(const std::vector<RatVec>& pts)
{
    const std::size_t d = pts.front().size();
    std::set<HalfSpace> found;
    if (d == 1) {
        auto [lo, hi] = std::minmax_element(pts.begin(), pts.end());
        found.insert({RatVec{Rat(1)}, (*lo)[0]});
        found.insert({RatVec{Rat(-1)}, -(*hi)[0]});
        return {found.begin(), found.end()};
    }
    linalg::for_each_subset(pts.size(), d, [&](const std::vector<std::size_t>& idx) {
        linalg::Matrix rows;
        for (std::size_t j = 1; j < idx.size(); ++j) rows.push_back(pts[idx[j]] - pts[idx[0]]);
        auto ker = linalg::kernel(rows, d);
        if (ker.size() != 1) return;
        const RatVec& n = ker[0];
        Rat c = dot(n, pts[idx[0]]);
        int side = 0;
        for (const auto& q : pts) {
            int s = (dot(n, q) - c).sign();
            if (s == 0) continue;
            if (side == 0) side = s;
            else if (s != side) return;
        }
        if (side == 0) return;
        found.insert(side > 0 ? normalized(n, c) : normalized(-n, -c));
    });
    return {found.begin(), found.end()};
}

/// Vertices among points of a full-dimensional set: points on at least d facets, affinely spanning.
inline std::vector<RatVec> extreme_points(const std::vector<RatVec>& pts,
                                          const std::vector<HalfSpace>& facets)
{
    const std::size_t d = pts.front().size();
    std::vector<RatVec> out;
    for (const auto& q : pts) {
        linalg::Matrix tight;
        for (const auto& h : facets)
            if (h.tight(q)) tight.push_back(h.normal);
        if (tight.size() >= d && linalg::rank(tight) == d) out.push_back(q);
    }
    return out;
}

}  // namespace detail

/// Builds the polytope conv(pts), computing its irredundant half-space description.
inline ExactPolytope from_vertices(std::vector<RatVec> pts)
{
    if (pts.empty()) throw Error(ErrorCode::EmptyRegion, "no points given");
    const std::size_t p = pts.front().size();
    if (p == 0) throw Error(ErrorCode::DimensionMismatch, "rank-0 polytope");
    for (const auto& q : pts)
        if (q.size() != p) throw Error(ErrorCode::DimensionMismatch, "points of mixed rank");
    detail::sort_unique(pts);

    auto hull = detail::affine_hull(pts);
    ExactPolytope poly;
    poly.rank_ = p;
    poly.dim_ = hull.dim;
    std::vector<HalfSpace> hs;
    for (const auto& [n, c] : hull.equations) {
        hs.push_back(normalized(n, c));
        hs.push_back(normalized(-n, -c));
    }
    if (hull.dim == 0) {
        poly.vertices_ = {pts.front()};
    } else {
        std::vector<RatVec> proj;
        for (const auto& q : pts) proj.push_back(detail::project(q, hull.chart));
        auto facets = detail::hull_facets(proj);
        std::set<RatVec> keep;
        for (const auto& v : detail::extreme_points(proj, facets)) keep.insert(v);
        for (const auto& q : pts)
            if (keep.count(detail::project(q, hull.chart))) poly.vertices_.push_back(q);
        for (const auto& f : facets) {
            RatVec n = zeros(p);
            for (std::size_t j = 0; j < hull.chart.size(); ++j) n[hull.chart[j]] = f.normal[j];
            hs.push_back({n, f.offset});
        }
    }
    std::sort(hs.begin(), hs.end());
    hs.erase(std::unique(hs.begin(), hs.end()), hs.end());
    poly.halfspaces_ = std::move(hs);
    return poly;
}

namespace detail {

inline std::vector<RatVec> enumerate_vertices(const std::vector<HalfSpace>& hs, std::size_t p)
{
    std::vector<RatVec> verts;
    linalg::for_each_subset(hs.size(), p, [&](const std::vector<std::size_t>& idx) {
        linalg::Matrix m;
        RatVec b;
        for (auto i : idx) {
            m.push_back(hs[i].normal);
            b.push_back(hs[i].offset);
        }
        auto x = linalg::solve(m, b);
        if (!x) return;
        for (const auto& h : hs)
            if (!h.contains(*x)) return;
        verts.push_back(std::move(*x));
    });
    sort_unique(verts);
    return verts;
}

inline bool feasible(const std::vector<HalfSpace>& hs, std::size_t p)
{
    optim::LinearProgram lp(p);
    for (const auto& h : hs) lp.add(h.normal, optim::Relation::Ge, h.offset);
    return optim::lp_solve(lp, optim::Sense::Min).status != optim::LpStatus::Infeasible;
}

/// True if {y : <n, y> >= 0 for all normals} contains a nonzero vector (normals assumed spanning).
inline bool has_recession_ray(const std::vector<RatVec>& normals, std::size_t p)
{
    bool found = false;
    linalg::for_each_subset(normals.size(), p - 1, [&](const std::vector<std::size_t>& idx) {
        if (found) return;
        linalg::Matrix m;
        for (auto i : idx) m.push_back(normals[i]);
        auto ker = linalg::kernel(m, p);
        if (ker.size() != 1) return;
        for (int s : {1, -1}) {
            RatVec r = Rat(s) * ker[0];
            bool ok = true;
            for (const auto& n : normals)
                if (dot(n, r).sign() < 0) {
                    ok = false;
                    break;
                }
            if (ok) found = true;
        }
    });
    return found;
}

}  // namespace detail

/// Half-space input: {alpha : <alpha, normal> >= offset}; normals need not be primitive.
inline ExactPolytope from_halfspaces(const std::vector<HalfSpace>& input)
{
    if (input.empty()) throw Error(ErrorCode::UnboundedRegion, "no half-spaces given");
    const std::size_t p = input.front().normal.size();
    std::vector<HalfSpace> hs;
    for (const auto& h : input) {
        if (h.normal.size() != p) throw Error(ErrorCode::DimensionMismatch, "half-spaces of mixed rank");
        if (is_zero(h.normal)) {
            if (h.offset.sign() > 0) throw Error(ErrorCode::EmptyRegion, "0 >= positive offset");
            continue;
        }
        hs.push_back(normalized(h.normal, h.offset));
    }
    linalg::Matrix normals;
    for (const auto& h : hs) normals.push_back(h.normal);
    if (normals.empty() || linalg::rank(normals) < p) {
        if (!detail::feasible(hs, p)) throw Error(ErrorCode::EmptyRegion, "constraints are contradictory");
        throw Error(ErrorCode::UnboundedRegion, "region contains a line");
    }
    auto verts = detail::enumerate_vertices(hs, p);
    if (verts.empty()) throw Error(ErrorCode::EmptyRegion, "constraints are contradictory");
    if (detail::has_recession_ray(normals, p))
        throw Error(ErrorCode::UnboundedRegion, "region has a recession direction");
    auto poly = from_vertices(verts);
    if (poly.vertices() != verts)
        throw Error(ErrorCode::Internal, "vertex enumeration and hull disagree");
    return poly;
}

/// Double-description conversion from either representation.
inline ExactPolytope dual_description(const std::vector<RatVec>& vertices) { return from_vertices(vertices); }
inline ExactPolytope dual_description(const std::vector<HalfSpace>& halfspaces)
{
    return from_halfspaces(halfspaces);
}

inline ExactPolytope minkowski_sum(const std::vector<ExactPolytope>& ps)
{
    if (ps.empty()) throw Error(ErrorCode::DimensionMismatch, "empty Minkowski sum");
    ExactPolytope acc = ps.front();
    for (std::size_t i = 1; i < ps.size(); ++i) {
        if (ps[i].rank() != acc.rank())
            throw Error(ErrorCode::DimensionMismatch, "Minkowski summands of different rank");
        std::vector<RatVec> sums;
        for (const auto& a : acc.vertices())
            for (const auto& b : ps[i].vertices()) sums.push_back(a + b);
        acc = from_vertices(std::move(sums));
    }
    return acc;
}

inline SupportResult support_value(const ExactPolytope& p, const RatVec& xi, Extremum mode)
{
    require_same_rank(xi, p.vertices().front(), "support_value");
    const RatVec* best = nullptr;
    Rat bv;
    for (const auto& v : p.vertices()) {
        Rat x = dot(v, xi);
        if (!best || (mode == Extremum::Min ? x < bv : x > bv)) {
            best = &v;
            bv = x;
        }
    }
    return {bv, *best};
}

/// lambda_P(xi) = min over P of <alpha, xi>.
inline Rat support_min(const ExactPolytope& p, const RatVec& xi) { return support_value(p, xi, Extremum::Min).value; }
inline Rat support_max(const ExactPolytope& p, const RatVec& xi) { return support_value(p, xi, Extremum::Max).value; }

namespace detail {

inline mpz_class factorial(std::size_t n)
{
    mpz_class f = 1;
    for (std::size_t i = 2; i <= n; ++i) f *= static_cast<unsigned long>(i);
    return f;
}

// Fan triangulation from the first vertex, recursing over facets that avoid it.
inline void triangulate(const std::vector<RatVec>& pts, const std::vector<std::size_t>& idx,
                        std::vector<std::vector<std::size_t>>& out)
{
    std::vector<RatVec> sub;
    for (auto i : idx) sub.push_back(pts[i]);
    auto hull = affine_hull(sub);
    if (hull.dim == 0) {
        out.push_back({idx.front()});
        return;
    }
    std::vector<RatVec> proj;
    for (const auto& q : sub) proj.push_back(project(q, hull.chart));
    for (const auto& f : hull_facets(proj)) {
        if (f.tight(proj.front())) continue;
        std::vector<std::size_t> face;
        for (std::size_t j = 0; j < idx.size(); ++j)
            if (f.tight(proj[j])) face.push_back(idx[j]);
        std::vector<std::vector<std::size_t>> simplices;
        triangulate(pts, face, simplices);
        for (auto& s : simplices) {
            s.push_back(idx.front());
            out.push_back(std::move(s));
        }
    }
}

struct WeightedSimplices {
    std::vector<std::vector<std::size_t>> simplices;
    std::vector<Rat> volumes;  // volumes in the chart coordinates
    std::vector<RatVec> chart_points;
};

inline WeightedSimplices weighted_triangulation(const ExactPolytope& p)
{
    WeightedSimplices w;
    const auto& verts = p.vertices();
    auto hull = affine_hull(verts);
    for (const auto& v : verts) w.chart_points.push_back(project(v, hull.chart));
    std::vector<std::size_t> all(verts.size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    triangulate(w.chart_points, all, w.simplices);
    const Rat fact(factorial(hull.dim));
    for (const auto& s : w.simplices) {
        linalg::Matrix m;
        for (std::size_t j = 1; j < s.size(); ++j) m.push_back(w.chart_points[s[j]] - w.chart_points[s[0]]);
        w.volumes.push_back(m.empty() ? Rat(1) : abs(linalg::det(m)) / fact);
    }
    return w;
}

}  // namespace detail

/// Ambient Lebesgue volume; lower-dimensional polytopes are rejected.
inline Rat volume(const ExactPolytope& p)
{
    if (!p.full_dimensional())
        throw Error(ErrorCode::DegenerateInput,
                    "ambient volume of a " + std::to_string(p.dim()) + "-dimensional polytope in rank " +
                        std::to_string(p.rank()));
    auto w = detail::weighted_triangulation(p);
    Rat v;
    for (const auto& x : w.volumes) v += x;
    return v;
}

/// Barycenter of the uniform measure on p (within its affine hull).
inline RatVec centroid(const ExactPolytope& p)
{
    if (p.dim() == 0) return p.vertices().front();
    auto w = detail::weighted_triangulation(p);
    RatVec acc = zeros(p.rank());
    Rat total;
    for (std::size_t s = 0; s < w.simplices.size(); ++s) {
        const auto& simplex = w.simplices[s];
        RatVec avg = zeros(p.rank());
        for (auto i : simplex) avg = avg + p.vertices()[i];
        avg = (w.volumes[s] / Rat(static_cast<long>(simplex.size()))) * avg;
        acc = acc + avg;
        total += w.volumes[s];
    }
    return (Rat(1) / total) * acc;
}

/// All lattice points of p in lexicographic order.
inline std::vector<RatVec> lattice_points(const ExactPolytope& p)
{
    const std::size_t n = p.rank();
    std::vector<long long> lo(n), hi(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rat mn = p.vertices().front()[i], mx = mn;
        for (const auto& v : p.vertices()) {
            mn = std::min(mn, v[i]);
            mx = std::max(mx, v[i]);
        }
        lo[i] = Rat(mn.ceil()).to_ll();
        hi[i] = Rat(mx.floor()).to_ll();
        if (lo[i] > hi[i]) return {};
    }
    std::vector<RatVec> out;
    std::vector<long long> cur = lo;
    while (true) {
        RatVec q = to_ratvec(cur);
        if (p.contains(q)) out.push_back(std::move(q));
        std::size_t k = n;
        while (k > 0) {
            --k;
            if (cur[k] < hi[k]) {
                ++cur[k];
                for (std::size_t j = k + 1; j < n; ++j) cur[j] = lo[j];
                break;
            }
            if (k == 0) return out;
        }
    }
}

// ---------------------------------------------------------------------------
// Cones and piecewise-linear functions on the cocharacter space.

/// Full-dimensional pointed polyhedral cone: generators and inequalities <n, eta> >= 0.
struct Cone {
    std::vector<RatVec> generators;
    std::vector<RatVec> facets;

    bool contains(const RatVec& eta) const
    {
        for (const auto& n : facets)
            if (dot(n, eta).sign() < 0) return false;
        return true;
    }
    RatVec interior_point() const
    {
        RatVec s = zeros(generators.front().size());
        for (const auto& g : generators) s = s + g;
        return s;
    }
};

inline std::vector<RatVec> cone_facets(const std::vector<RatVec>& gens, std::size_t p)
{
    std::set<RatVec> out;
    if (p == 1) {
        out.insert(primitive(gens.front()));
        return {out.begin(), out.end()};
    }
    linalg::for_each_subset(gens.size(), p - 1, [&](const std::vector<std::size_t>& idx) {
        linalg::Matrix m;
        for (auto i : idx) m.push_back(gens[i]);
        auto ker = linalg::kernel(m, p);
        if (ker.size() != 1) return;
        int side = 0;
        for (const auto& g : gens) {
            int s = dot(ker[0], g).sign();
            if (s == 0) continue;
            if (side == 0) side = s;
            else if (s != side) return;
        }
        if (side == 0) return;
        out.insert(primitive(Rat(side) * ker[0]));
    });
    return {out.begin(), out.end()};
}

/// Cone spanned by the given generators; nullopt unless full-dimensional and pointed.
inline std::optional<Cone> cone_from_generators(std::vector<RatVec> gens)
{
    if (gens.empty()) return std::nullopt;
    const std::size_t p = gens.front().size();
    for (auto& g : gens) g = primitive(g);
    detail::sort_unique(gens);
    if (linalg::rank(gens) < p) return std::nullopt;
    Cone c;
    c.facets = cone_facets(gens, p);
    // Keep only extreme rays.
    for (const auto& g : gens) {
        linalg::Matrix tight;
        for (const auto& n : c.facets)
            if (dot(n, g).is_zero()) tight.push_back(n);
        if (p == 1 || (!tight.empty() && linalg::rank(tight) == p - 1)) c.generators.push_back(g);
    }
    if (c.facets.empty()) return std::nullopt;
    return c;
}

/// Cone {eta : <n, eta> >= 0 for n in normals}; nullopt unless full-dimensional and pointed.
inline std::optional<Cone> cone_from_inequalities(const std::vector<RatVec>& normals, std::size_t p)
{
    std::set<RatVec> rays;
    linalg::for_each_subset(normals.size(), p - 1, [&](const std::vector<std::size_t>& idx) {
        linalg::Matrix m;
        for (auto i : idx) m.push_back(normals[i]);
        auto ker = linalg::kernel(m, p);
        if (ker.size() != 1) return;
        for (int s : {1, -1}) {
            RatVec r = Rat(s) * ker[0];
            bool ok = true;
            for (const auto& n : normals)
                if (dot(n, r).sign() < 0) {
                    ok = false;
                    break;
                }
            if (ok) rays.insert(primitive(r));
        }
    });
    if (rays.empty()) return std::nullopt;
    std::vector<RatVec> gens(rays.begin(), rays.end());
    for (const auto& r : gens)
        if (rays.count(-r)) return std::nullopt;  // not pointed
    return cone_from_generators(gens);
}

/// Continuous function linear on each cone of a complete fan.
struct PLFunc {
    struct Piece {
        Cone cone;
        RatVec form;
    };
    std::size_t rank = 0;
    std::vector<Piece> pieces;

    const Piece& piece_at(const RatVec& eta) const
    {
        if (eta.size() != rank) throw Error(ErrorCode::DimensionMismatch, "PL function rank mismatch");
        for (const auto& pc : pieces)
            if (pc.cone.contains(eta)) return pc;
        throw Error(ErrorCode::ConeLookupFailure, "no cone contains " + str(eta));
    }

    Rat operator()(const RatVec& eta) const { return dot(piece_at(eta).form, eta); }

    /// Adjacent pieces agree on shared rays.
    bool continuous() const
    {
        for (std::size_t a = 0; a < pieces.size(); ++a)
            for (std::size_t b = a + 1; b < pieces.size(); ++b)
                for (const auto& g : pieces[a].cone.generators)
                    if (pieces[b].cone.contains(g) && dot(pieces[a].form, g) != dot(pieces[b].form, g))
                        return false;
        return true;
    }

    /// Every wall of every cone is met by another cone on the opposite side.
    bool complete() const
    {
        if (pieces.empty()) return false;
        for (std::size_t a = 0; a < pieces.size(); ++a) {
            const auto& ca = pieces[a].cone;
            for (const auto& n : ca.facets) {
                RatVec w = zeros(rank);
                for (const auto& g : ca.generators)
                    if (dot(n, g).is_zero()) w = w + g;
                bool matched = false;
                for (std::size_t b = 0; b < pieces.size() && !matched; ++b) {
                    if (b == a) continue;
                    const auto& cb = pieces[b].cone;
                    if (!cb.contains(w)) continue;
                    for (const auto& m : cb.facets)
                        if (primitive(-n) == m) {
                            matched = true;
                            break;
                        }
                }
                if (!matched) return false;
            }
        }
        return true;
    }
};

/// Two PL functions restated on a common refinement of their fans.
struct RefinedPair {
    std::vector<Cone> cones;
    std::vector<RatVec> first, second;
};

inline RefinedPair common_refinement(const PLFunc& f, const PLFunc& g)
{
    if (f.rank != g.rank) throw Error(ErrorCode::DimensionMismatch, "refinement of PL functions of different rank");
    if (f.rank > 4) throw Error(ErrorCode::RankTooHigh, "fan refinement limited to rank <= 4");
    RefinedPair r;
    for (const auto& a : f.pieces)
        for (const auto& b : g.pieces) {
            std::vector<RatVec> ineq = a.cone.facets;
            ineq.insert(ineq.end(), b.cone.facets.begin(), b.cone.facets.end());
            auto c = cone_from_inequalities(ineq, f.rank);
            if (!c) continue;
            r.cones.push_back(std::move(*c));
            r.first.push_back(a.form);
            r.second.push_back(b.form);
        }
    return r;
}

}  // namespace cks::geom
