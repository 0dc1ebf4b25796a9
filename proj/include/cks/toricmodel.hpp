#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cks/exactgeom.hpp"
#include "cks/optim.hpp"

namespace cks::toric {

using geom::ExactPolytope;

/// Index of a summand L_i, or kTotal for L = sum L_i = -K_X.
using Summand = std::size_t;
inline constexpr Summand kTotal = SIZE_MAX;

inline std::string summand_name(Summand i) { return i == kTotal ? "total" : std::to_string(i); }

/// Toric log Fano pair (Delta = 0) with a decomposition -K_X = L_1 + ... + L_k.
class ToricFanoModel {
public:
    const std::string& name() const { return name_; }
    std::size_t rank() const { return rank_; }
    std::size_t summands() const { return decomposition_.size(); }
    const std::vector<RatVec>& rays() const { return rays_; }
    const ExactPolytope& anticanonical() const { return anticanonical_; }
    const std::vector<ExactPolytope>& decomposition() const { return decomposition_; }

    const ExactPolytope& polytope(Summand i) const
    {
        if (i == kTotal) return anticanonical_;
        check_index(i);
        return decomposition_[i];
    }

    /// Barycenter of P^{L_i} (cached at build), or of P^L for kTotal.
    const RatVec& barycenter(Summand i) const
    {
        if (i == kTotal) return total_barycenter_;
        check_index(i);
        return barycenters_[i];
    }
    const std::vector<RatVec>& barycenters() const { return barycenters_; }

    /// Smallest m >= 1 with m * P^{L_i} a lattice polytope.
    long long step(Summand i) const
    {
        if (i == kTotal) return 1;
        check_index(i);
        return steps_[i];
    }

    /// Maximal cones of the fan (normal cones of the vertices of P^{-K}).
    const std::vector<geom::Cone>& fan() const { return fan_; }
    const std::vector<RatVec>& fan_vertices() const { return fan_vertices_; }

    /// Copy with a replaced barycenter cache; only meant for fault-injection tests.
    ToricFanoModel with_barycenter_cache(std::vector<RatVec> b) const
    {
        ToricFanoModel m = *this;
        m.barycenters_ = std::move(b);
        return m;
    }

    void check_index(Summand i) const
    {
        if (i != kTotal && i >= decomposition_.size())
            throw Error(ErrorCode::IndexOutOfRange,
                        "summand " + std::to_string(i) + " of " + std::to_string(decomposition_.size()));
    }

private:
    friend ToricFanoModel build_model(std::vector<RatVec>, std::vector<ExactPolytope>, std::string);
    std::string name_;
    std::size_t rank_ = 0;
    std::vector<RatVec> rays_;
    ExactPolytope anticanonical_;
    std::vector<ExactPolytope> decomposition_;
    std::vector<RatVec> barycenters_;
    RatVec total_barycenter_;
    std::vector<long long> steps_;
    std::vector<geom::Cone> fan_;
    std::vector<RatVec> fan_vertices_;
};

inline long long integrality_step(const ExactPolytope& p)
{
    mpz_class l = 1;
    for (const auto& v : p.vertices())
        for (const auto& x : v) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.den().get_mpz_t());
    return Rat(l).to_ll();
}

/// Validates reflexivity and the Minkowski-sum constraint, then builds the fan and caches.
inline ToricFanoModel build_model(std::vector<RatVec> rays, std::vector<ExactPolytope> decomposition,
                                  std::string name = "")
{
    if (rays.empty()) throw Error(ErrorCode::NotReflexive, "no rays");
    const std::size_t p = rays.front().size();
    if (p == 0 || p > 4) throw Error(ErrorCode::RankMismatch, "rank must be between 1 and 4");
    for (const auto& u : rays) {
        if (u.size() != p) throw Error(ErrorCode::RankMismatch, "rays of mixed rank");
        if (!is_primitive_integer(u)) throw Error(ErrorCode::NotReflexive, "ray " + str(u) + " is not primitive");
    }
    if (decomposition.empty()) throw Error(ErrorCode::DecompositionMismatch, "empty decomposition");
    for (const auto& d : decomposition)
        if (d.rank() != p) throw Error(ErrorCode::RankMismatch, "summand polytope rank differs from ray rank");

    std::vector<geom::HalfSpace> hs;
    for (const auto& u : rays) hs.push_back({u, Rat(-1)});
    ExactPolytope anti;
    try {
        anti = geom::from_halfspaces(hs);
    } catch (const Error& e) {
        throw Error(ErrorCode::NotReflexive, std::string("rays do not bound a polytope (") + e.what() + ")");
    }
    if (!anti.is_lattice()) throw Error(ErrorCode::NotReflexive, "anticanonical polytope is not a lattice polytope");
    for (const auto& u : rays) {
        geom::HalfSpace h{u, Rat(-1)};
        if (std::find(anti.halfspaces().begin(), anti.halfspaces().end(), h) == anti.halfspaces().end())
            throw Error(ErrorCode::NotReflexive, "ray " + str(u) + " does not support a facet");
    }
    if (anti.halfspaces().size() != rays.size())
        throw Error(ErrorCode::NotReflexive, "duplicate rays");

    auto sum = geom::minkowski_sum(decomposition);
    if (!(sum == anti))
        throw Error(ErrorCode::DecompositionMismatch, "Minkowski sum of the summands is not the anticanonical polytope");

    ToricFanoModel m;
    m.name_ = std::move(name);
    m.rank_ = p;
    std::sort(rays.begin(), rays.end());
    m.rays_ = std::move(rays);
    m.anticanonical_ = anti;
    for (const auto& d : decomposition) {
        m.barycenters_.push_back(geom::centroid(d));
        m.steps_.push_back(integrality_step(d));
    }
    m.decomposition_ = std::move(decomposition);
    m.total_barycenter_ = geom::centroid(anti);
    for (const auto& v : anti.vertices()) {
        std::vector<RatVec> gens;
        for (const auto& u : m.rays_)
            if (dot(v, u) == Rat(-1)) gens.push_back(u);
        auto cone = geom::cone_from_generators(gens);
        if (!cone) throw Error(ErrorCode::Internal, "degenerate vertex cone at " + str(v));
        m.fan_.push_back(std::move(*cone));
        m.fan_vertices_.push_back(v);
    }
    return m;
}

/// Log discrepancy A(wt_eta) as a PL function: value 1 on each primitive ray, linear on cones.
inline geom::PLFunc log_discrepancy_function(const ToricFanoModel& m)
{
    geom::PLFunc f;
    f.rank = m.rank();
    for (std::size_t c = 0; c < m.fan().size(); ++c) f.pieces.push_back({m.fan()[c], -m.fan_vertices()[c]});
    return f;
}

inline Rat log_discrepancy(const ToricFanoModel& m, const RatVec& eta)
{
    require_same_rank(eta, RatVec(m.rank()), "log_discrepancy");
    for (std::size_t c = 0; c < m.fan().size(); ++c)
        if (m.fan()[c].contains(eta)) return -dot(m.fan_vertices()[c], eta);
    throw Error(ErrorCode::ConeLookupFailure, "no cone contains " + str(eta));
}

/// lambda_{P^{L_i}}(eta) = min over P^{L_i} of <alpha, eta>.
inline Rat lambda(const ToricFanoModel& m, Summand i, const RatVec& eta)
{
    return geom::support_min(m.polytope(i), eta);
}

/// S_{L_i}(wt_eta) = <barycenter, eta> - lambda(eta).
inline Rat s_invariant(const ToricFanoModel& m, Summand i, const RatVec& eta)
{
    return dot(m.barycenter(i), eta) - lambda(m, i, eta);
}

/// T_{L_i}(wt_eta) = max - min of <alpha, eta> over P^{L_i}.
inline Rat t_invariant(const ToricFanoModel& m, Summand i, const RatVec& eta)
{
    return geom::support_max(m.polytope(i), eta) - lambda(m, i, eta);
}

/// theta_xi^{L_i}(wt_eta) = lambda(eta) - lambda(eta + xi).
inline Rat theta_twist(const ToricFanoModel& m, Summand i, const RatVec& eta, const RatVec& xi)
{
    require_same_rank(eta, xi, "theta_twist");
    return lambda(m, i, eta) - lambda(m, i, eta + xi);
}

inline RatVec coupled_barycenter(const ToricFanoModel& m)
{
    RatVec b = zeros(m.rank());
    for (const auto& x : m.barycenters()) b = b + x;
    return b;
}

inline Rat s_sum(const ToricFanoModel& m, const RatVec& eta)
{
    Rat s;
    for (std::size_t i = 0; i < m.summands(); ++i) s += s_invariant(m, i, eta);
    return s;
}

/// sum_i S_{L_i}(wt_eta) as a PL function on the fan of P^{-K}; each lambda_i is linear there
/// because the fan refines every summand's normal fan.
inline geom::PLFunc s_sum_function(const ToricFanoModel& m)
{
    geom::PLFunc f;
    f.rank = m.rank();
    RatVec b = coupled_barycenter(m);
    for (const auto& cone : m.fan()) {
        RatVec form = b;
        RatVec inner = cone.interior_point();
        for (const auto& d : m.decomposition()) form = form - geom::support_value(d, inner, geom::Extremum::Min).vertex;
        f.pieces.push_back({cone, form});
    }
    return f;
}

/// Lattice points of m * P^{L_i} (the characters Lambda_m of the degree-m sections).
inline std::vector<RatVec> section_basis(const ToricFanoModel& model, Summand i, long long m)
{
    if (m < 1) throw Error(ErrorCode::NonIntegralScaling, "degree must be positive");
    auto scaled = model.polytope(i).scaled(Rat(m));
    if (!scaled.is_lattice())
        throw Error(ErrorCode::NonIntegralScaling,
                    std::to_string(m) + " * P^{L_" + summand_name(i) + "} is not a lattice polytope");
    return geom::lattice_points(scaled);
}

// ---------------------------------------------------------------------------
// Monomial ideals and their log canonical thresholds.

/// A monomial ideal sheaf of sections of -K_X, normalized by degree: its Newton region Q is a
/// rational polytope inside P^{-K} and wt_eta(ideal) = lambda_Q(eta) - lambda_P(eta).
/// No region means the zero ideal; Q = P is the unit ideal.
struct MonomialIdeal {
    std::optional<ExactPolytope> region;

    bool is_zero() const { return !region.has_value(); }

    /// Ideal generated by degree-m sections with the given characters, taken to the power 1/m.
    static MonomialIdeal from_generators(const ToricFanoModel& model, long long m, const std::vector<RatVec>& chars)
    {
        if (chars.empty()) return {};
        auto big = model.anticanonical().scaled(Rat(m));
        std::vector<RatVec> pts;
        for (const auto& a : chars) {
            if (!big.contains(a))
                throw Error(ErrorCode::MissingCharacter, str(a) + " is not a degree-" + std::to_string(m) + " character");
            pts.push_back((Rat(1) / Rat(m)) * a);
        }
        return {geom::from_vertices(std::move(pts))};
    }

    /// Valuation ideals {wt_eta0 >= t}, normalized, as a closed-form region.
    static MonomialIdeal valuation_ideal(const ToricFanoModel& model, const RatVec& eta0, const Rat& level)
    {
        const auto& P = model.anticanonical();
        if (cks::is_zero(eta0)) return level.sign() <= 0 ? MonomialIdeal{P} : MonomialIdeal{};
        std::vector<geom::HalfSpace> hs = P.halfspaces();
        hs.push_back({eta0, geom::support_min(P, eta0) + level});
        try {
            return {geom::from_halfspaces(hs)};
        } catch (const Error& e) {
            if (e.code() == ErrorCode::EmptyRegion) return {};
            throw;
        }
    }
};

/// eta -> wt_eta(ideal) as a PL function, refining each fan cone by the Newton-region vertex
/// that attains the minimum.
inline geom::PLFunc ideal_order_function(const ToricFanoModel& model, const MonomialIdeal& ideal)
{
    if (ideal.is_zero()) throw Error(ErrorCode::ZeroIdeal, "zero ideal has no finite order function");
    geom::PLFunc f;
    f.rank = model.rank();
    const auto& q = ideal.region->vertices();
    for (std::size_t c = 0; c < model.fan().size(); ++c) {
        for (std::size_t a = 0; a < q.size(); ++a) {
            std::vector<RatVec> ineq = model.fan()[c].facets;
            for (std::size_t b = 0; b < q.size(); ++b)
                if (b != a) ineq.push_back(q[b] - q[a]);
            std::vector<RatVec> nonzero;
            for (auto& n : ineq)
                if (!is_zero(n)) nonzero.push_back(n);
            auto cone = geom::cone_from_inequalities(nonzero, model.rank());
            if (!cone) continue;
            f.pieces.push_back({std::move(*cone), q[a] - model.fan_vertices()[c]});
        }
    }
    return f;
}

inline const char* kToricLctAssumption =
    "toric-valuation search space: lct of a monomial ideal is computed over toric valuations wt_eta";

struct LctResult {
    std::optional<Rat> value;  // nullopt = +infinity (unit ideal)
    RatVec witness;
    std::vector<std::string> assumptions;
};

/// lct(X; ideal^c) = inf over eta != 0 of A(eta) / (c * wt_eta(ideal)).
inline LctResult monomial_lct(const ToricFanoModel& model, const MonomialIdeal& ideal, const Rat& c = Rat(1))
{
    if (ideal.is_zero()) throw Error(ErrorCode::ZeroIdeal, "lct of the zero ideal");
    if (c.sign() <= 0) throw Error(ErrorCode::DegenerateInput, "lct scale must be positive");
    optim::RatioProgram rp{log_discrepancy_function(model), ideal_order_function(model, ideal), true};
    auto r = optim::minimize_pl_ratio(rp);
    LctResult out;
    out.assumptions.push_back(kToricLctAssumption);
    if (r.value) {
        out.value = *r.value / c;
        out.witness = r.witness;
    }
    return out;
}

}  // namespace cks::toric
