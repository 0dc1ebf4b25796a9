#pragma once

#include <optional>
#include <vector>

#include "cks/exactgeom.hpp"
#include "cks/lp.hpp"

namespace cks::optim {

/// One summand of a convex PL objective: zeta -> max_{alpha in vertices} <alpha, zeta> - <b, zeta>,
/// evaluated at zeta = base + xi.
struct PLTerm {
    std::vector<RatVec> vertices;
    RatVec b;
    RatVec base;
};

struct ConvexPLResult {
    Rat value;
    RatVec argmin;  // the displacement xi, lying in the subspace
};

inline Rat evaluate(const std::vector<PLTerm>& terms, const RatVec& xi)
{
    Rat total;
    for (const auto& t : terms) {
        RatVec z = t.base + xi;
        Rat mx = dot(t.vertices.front(), z);
        for (const auto& a : t.vertices) mx = std::max(mx, dot(a, z));
        total += mx - dot(t.b, z);
    }
    return total;
}

/// Minimizes the sum of terms over xi in span(subspace) by an epigraph LP
/// (one auxiliary variable per term). Throws Unbounded if the objective has no minimum.
inline ConvexPLResult minimize_convex_pl(const std::vector<PLTerm>& terms, const std::vector<RatVec>& subspace)
{
    if (terms.empty()) throw Error(ErrorCode::DimensionMismatch, "no terms");
    const std::size_t p = terms.front().b.size();
    for (const auto& t : terms) {
        if (t.b.size() != p || t.base.size() != p || t.vertices.empty())
            throw Error(ErrorCode::DimensionMismatch, "inconsistent PL term");
        for (const auto& v : t.vertices) require_same_rank(v, t.b, "PL term vertex");
    }
    for (const auto& s : subspace) require_same_rank(s, terms.front().b, "subspace generator");
    const std::size_t ny = subspace.size(), k = terms.size();
    LinearProgram lp(ny + k);
    for (std::size_t j = 0; j < k; ++j) lp.objective[ny + j] = 1;
    for (std::size_t a = 0; a < ny; ++a)
        for (const auto& t : terms) lp.objective[a] -= dot(t.b, subspace[a]);
    for (std::size_t j = 0; j < k; ++j)
        for (const auto& v : terms[j].vertices) {
            RatVec row = zeros(ny + k);
            for (std::size_t a = 0; a < ny; ++a) row[a] = -dot(v, subspace[a]);
            row[ny + j] = 1;
            lp.add(std::move(row), Relation::Ge, dot(v, terms[j].base));
        }
    auto res = lp_solve(lp, Sense::Min);
    if (res.status == LpStatus::Unbounded)
        throw Error(ErrorCode::Unbounded, "PL objective unbounded below on the subspace");
    if (res.status == LpStatus::Infeasible)
        throw Error(ErrorCode::OptimizationInfeasible, "epigraph LP infeasible");
    RatVec xi = zeros(p);
    for (std::size_t a = 0; a < ny; ++a) xi = xi + res.point[a] * subspace[a];
    return {evaluate(terms, xi), xi};
}

/// inf numerator/denominator over nonzero eta, both positively homogeneous PL functions.
struct RatioProgram {
    geom::PLFunc numerator;
    geom::PLFunc denominator;
    /// Zero-denominator rays count as +infinity instead of an error (numerator must be >= 0 there).
    bool allow_zero_denominator = false;
};

struct RatioResult {
    std::optional<Rat> value;  // nullopt encodes +infinity
    RatVec witness;            // primitive integer ray attaining the value
    std::vector<RatVec> optimal_rays;
};

/// Exact infimum by per-cone reduction: on each cone of the common refinement both functions are
/// linear, so the infimum over the cone is attained on a generating ray. Among optimal rays the
/// lexicographically least one is the witness.
inline RatioResult minimize_pl_ratio(const RatioProgram& rp)
{
    auto refined = geom::common_refinement(rp.numerator, rp.denominator);
    if (refined.cones.empty()) throw Error(ErrorCode::ConeLookupFailure, "empty common refinement");
    RatioResult out;
    std::set<RatVec> optimal;
    for (std::size_t c = 0; c < refined.cones.size(); ++c) {
        for (const auto& g : refined.cones[c].generators) {
            Rat num = dot(refined.first[c], g), den = dot(refined.second[c], g);
            if (den.sign() <= 0) {
                if (rp.allow_zero_denominator && den.is_zero() && num.sign() >= 0) continue;
                throw Error(ErrorCode::DenominatorVanishes, "denominator " + den.str() + " on ray " + str(g));
            }
            Rat r = num / den;
            if (!out.value || r < *out.value) {
                out.value = r;
                optimal.clear();
            }
            if (r == *out.value) optimal.insert(g);
        }
    }
    out.optimal_rays.assign(optimal.begin(), optimal.end());
    if (!out.optimal_rays.empty()) out.witness = out.optimal_rays.front();
    return out;
}

/// Independent Dinkelbach iteration: t <- A(eta*)/D(eta*) where eta* minimizes A - t D over
/// each cone intersected with the box [-1,1]^p (an LP). Used only as a cross-check oracle.
inline std::optional<Rat> dinkelbach_ratio(const RatioProgram& rp, std::size_t max_iter = 1000)
{
    auto refined = geom::common_refinement(rp.numerator, rp.denominator);
    const std::size_t p = rp.numerator.rank;
    std::optional<Rat> t;
    for (std::size_t c = 0; c < refined.cones.size() && !t; ++c) {
        RatVec x = refined.cones[c].interior_point();
        Rat den = dot(refined.second[c], x);
        if (den.sign() > 0) t = dot(refined.first[c], x) / den;
    }
    if (!t) return std::nullopt;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        Rat best(0);
        std::optional<std::size_t> best_cone;
        RatVec best_eta;
        for (std::size_t c = 0; c < refined.cones.size(); ++c) {
            LinearProgram lp(p);
            lp.objective = refined.first[c] - (*t) * refined.second[c];
            for (const auto& n : refined.cones[c].facets) lp.add(n, Relation::Ge, Rat(0));
            for (std::size_t j = 0; j < p; ++j) {
                RatVec e = zeros(p);
                e[j] = 1;
                lp.add(e, Relation::Le, Rat(1));
                lp.add(e, Relation::Ge, Rat(-1));
            }
            auto res = lp_solve(lp, Sense::Min);
            if (res.status != LpStatus::Optimal) continue;
            if (res.optimum < best) {
                best = res.optimum;
                best_cone = c;
                best_eta = res.point;
            }
        }
        if (!best_cone) return t;
        Rat den = dot(refined.second[*best_cone], best_eta);
        t = dot(refined.first[*best_cone], best_eta) / den;
    }
    throw Error(ErrorCode::Internal, "Dinkelbach did not terminate");
}

}  // namespace cks::optim
