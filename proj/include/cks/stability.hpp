#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "cks/filtalg.hpp"
#include "cks/optim.hpp"
#include "cks/toricmodel.hpp"

namespace cks::stab {

using toric::kTotal;
using toric::ToricFanoModel;
using ModelPtr = std::shared_ptr<const ToricFanoModel>;

enum class Provenance { ClosedForm, Certified, Estimate };

struct Infinity {
    friend bool operator==(Infinity, Infinity) { return true; }
};

inline const char* provenance_name(Provenance p)
{
    switch (p) {
    case Provenance::ClosedForm: return "closed-form";
    case Provenance::Certified: return "optimized-with-certificate";
    case Provenance::Estimate: return "finite-degree-estimate";
    }
    return "?";
}

inline const char* kToricSearchAssumption =
    "toric-valuation search space: thresholds are infima over toric valuations wt_eta only";
inline const char* kLebesgueAssumption = "Duistermaat-Heckman measure of the full torus taken as Lebesgue measure";

/// A reported number: a rational, a vector, a list of vectors or +infinity, with its provenance.
struct Quantity {
    std::variant<Rat, RatVec, std::vector<RatVec>, Infinity> value;
    Provenance provenance = Provenance::ClosedForm;
};

struct StabilityReport {
    std::string model;
    std::string command;
    std::map<std::string, Quantity> values;
    std::map<std::string, bool> verdicts;
    std::map<std::string, RatVec> witnesses;
    std::vector<std::string> assumptions;
    std::map<std::string, std::string> notes;

    void assume(const std::string& a)
    {
        if (std::find(assumptions.begin(), assumptions.end(), a) == assumptions.end()) assumptions.push_back(a);
    }
};

// ---------------------------------------------------------------------------
// Coupled Futaki character and J-norms.

struct CoupledBarycenter {
    std::vector<RatVec> per_summand;
    RatVec total;
    bool vanishes = false;
};

inline CoupledBarycenter coupled_futaki(const ToricFanoModel& m)
{
    CoupledBarycenter c;
    c.per_summand = m.barycenters();
    c.total = zeros(m.rank());
    for (const auto& b : c.per_summand) c.total = c.total + b;
    c.vanishes = is_zero(c.total);
    return c;
}

/// J of the xi-twist of the trivial filtration: max over P^{L_i} of <., xi> minus <barycenter, xi>.
inline Rat j_twist(const ToricFanoModel& m, toric::Summand i, const RatVec& xi)
{
    if (xi.size() != m.rank()) throw Error(ErrorCode::RankMismatch, "twist rank differs from model rank");
    return geom::support_max(m.polytope(i), xi) - dot(m.barycenter(i), xi);
}

struct ReducedJResult {
    Rat value;
    RatVec argmin;  // optimal extra twist, in the span of the subtorus
};

inline std::vector<RatVec> full_lattice(std::size_t p)
{
    std::vector<RatVec> b;
    for (std::size_t j = 0; j < p; ++j) {
        RatVec e = zeros(p);
        e[j] = 1;
        b.push_back(e);
    }
    return b;
}

/// inf over xi in span(subtorus) of sum_i J(F_{i, xi}) where F_i is the twist of wt_{base_i}; the
/// J-norm of a twisted valuation filtration depends only on the twisted direction.
inline ReducedJResult reduced_coupled_j(const ToricFanoModel& m, const std::vector<RatVec>& bases,
                                        const std::vector<RatVec>& subtorus)
{
    if (bases.size() != m.summands()) throw Error(ErrorCode::DimensionMismatch, "one base direction per summand");
    std::vector<optim::PLTerm> terms;
    for (std::size_t i = 0; i < m.summands(); ++i) {
        if (bases[i].size() != m.rank()) throw Error(ErrorCode::RankMismatch, "base twist rank");
        terms.push_back({m.polytope(i).vertices(), m.barycenter(i), bases[i]});
    }
    for (const auto& s : subtorus)
        if (s.size() != m.rank()) throw Error(ErrorCode::RankMismatch, "subtorus generator rank");
    auto r = optim::minimize_convex_pl(terms, subtorus);
    return {r.value, r.argmin};
}

inline ReducedJResult reduced_coupled_j(const ToricFanoModel& m, const RatVec& xi0, const std::vector<RatVec>& subtorus)
{
    return reduced_coupled_j(m, std::vector<RatVec>(m.summands(), xi0), subtorus);
}

/// Family version: every member must carry a closed form.
inline ReducedJResult reduced_coupled_j(const filt::FiltrationFamily& fam, const std::vector<RatVec>& subtorus)
{
    fam.validate();
    std::vector<RatVec> bases;
    for (const auto& f : fam.members) {
        if (!f.closed_form()) throw Error(ErrorCode::UnsupportedDescriptor, "reduced J needs valuation descriptors");
        bases.push_back(f.closed_form()->eta);
    }
    return reduced_coupled_j(fam.model(), bases, subtorus);
}

// ---------------------------------------------------------------------------
// lc slopes and coupled Ding invariants.

struct MuResult {
    std::optional<Rat> value;  // certified point value
    Rat lo;                    // certified lower bound
    Rat hi;                    // upper end: equals value when certified, finite-degree estimate otherwise
    Provenance provenance = Provenance::ClosedForm;
};

/// mu(F; delta) = sup{t : lct(I^{(t)}) >= delta} on the total ring.
inline MuResult mu_slope(const filt::Filtration& f, const Rat& delta)
{
    if (delta.sign() <= 0) throw Error(ErrorCode::DegenerateInput, "slope must be positive");
    const auto& b = f.basis();
    if (b.summand() != kTotal)
        throw Error(ErrorCode::UnsupportedDescriptor, "lc slope is defined on the total ring of -K_X");
    const auto& model = b.model();
    if (f.closed_form()) {
        const auto& [eta, c] = *f.closed_form();
        Rat v = toric::log_discrepancy(model, eta) / delta + c;
        return {v, v, v, Provenance::ClosedForm};
    }
    // Tables: lct(I_.) >= lct(I_m^{1/m}), so every level passing at a finite degree is a lower bound.
    std::optional<Rat> lo, hi;
    for (auto m : f.degrees()) {
        const auto& ws = f.weights(m);
        std::vector<Rat> levels;
        for (const auto& w : ws) levels.push_back(w / Rat(m));
        std::sort(levels.begin(), levels.end());
        levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
        for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
            std::vector<RatVec> gens;
            for (std::size_t j = 0; j < ws.size(); ++j)
                if (ws[j] >= *it * Rat(m)) gens.push_back(b.chars(m)[j]);
            auto ideal = toric::MonomialIdeal::from_generators(model, m, gens);
            auto l = toric::monomial_lct(model, ideal);
            if (!l.value || *l.value >= delta) {
                if (!lo || *lo < *it) lo = *it;
                break;
            }
            if (!hi || *it < *hi) hi = *it;
        }
    }
    if (!lo) throw Error(ErrorCode::UnsupportedDescriptor, "no stored degree certifies a lower bound");
    Rat h = hi ? std::max(*hi, *lo) : *lo;
    return {std::nullopt, *lo, h, Provenance::Estimate};
}

struct DingResult {
    Rat value;
    Rat mu;
    Rat s_sum;
    std::optional<Rat> twisted;  // D of the family twisted by the probe, when requested
};

/// Ding of closed-form members Val{eta_i, C_i}: the sum filtration is closed form only for a common eta.
inline DingResult coupled_ding(const ToricFanoModel& m, const std::vector<filt::ValuationShift>& members,
                               const Rat& delta = Rat(1))
{
    if (members.size() != m.summands()) throw Error(ErrorCode::DimensionMismatch, "one member per summand");
    if (delta.sign() <= 0) throw Error(ErrorCode::DegenerateInput, "slope must be positive");
    const RatVec& eta = members.front().eta;
    Rat shift_total, s_sum;
    for (std::size_t i = 0; i < members.size(); ++i) {
        if (members[i].eta != eta)
            throw Error(ErrorCode::UnsupportedDescriptor, "sum filtration of distinct valuations has no certified slope");
        shift_total += members[i].shift;
        s_sum += toric::s_invariant(m, i, eta) + members[i].shift;
    }
    Rat mu = toric::log_discrepancy(m, eta) / delta + shift_total;
    return {mu - s_sum, mu, s_sum, std::nullopt};
}

inline std::vector<filt::ValuationShift> descriptors(const filt::FiltrationFamily& fam)
{
    fam.validate();
    std::vector<filt::ValuationShift> out;
    for (const auto& f : fam.members) {
        if (!f.closed_form()) throw Error(ErrorCode::UnsupportedDescriptor, "family member without closed form");
        out.push_back(*f.closed_form());
    }
    return out;
}

inline std::vector<filt::ValuationShift> twisted(const ToricFanoModel& m, std::vector<filt::ValuationShift> members,
                                                 const RatVec& xi)
{
    for (std::size_t i = 0; i < members.size(); ++i) {
        members[i].shift -= toric::theta_twist(m, i, members[i].eta, xi);
        members[i].eta = members[i].eta + xi;
    }
    return members;
}

inline DingResult coupled_ding(const filt::FiltrationFamily& fam, const Rat& delta = Rat(1),
                               const std::optional<RatVec>& probe = std::nullopt)
{
    const auto& m = fam.model();
    auto d = descriptors(fam);
    auto r = coupled_ding(m, d, delta);
    if (probe) r.twisted = coupled_ding(m, twisted(m, d, *probe), delta).value;
    return r;
}

struct DingTwist {
    Rat formula;  // D({F_i}) - <b_cp, xi>
    Rat direct;   // D of the twisted family
    bool agree = false;
};

inline DingTwist ding_of_twist(const ToricFanoModel& m, const std::vector<filt::ValuationShift>& members,
                               const RatVec& xi)
{
    Rat base = coupled_ding(m, members).value;
    DingTwist t;
    t.formula = base - dot(coupled_futaki(m).total, xi);
    t.direct = coupled_ding(m, twisted(m, members, xi)).value;
    t.agree = t.formula == t.direct;
    return t;
}

inline DingTwist ding_of_twist(const filt::FiltrationFamily& fam, const RatVec& xi)
{
    return ding_of_twist(fam.model(), descriptors(fam), xi);
}

// ---------------------------------------------------------------------------
// Thresholds.

struct DeltaResult {
    Rat value;
    RatVec witness;
    std::vector<RatVec> optimal_rays;
    std::vector<std::string> assumptions;
};

inline optim::RatioProgram delta_program(const ToricFanoModel& m)
{
    return {toric::log_discrepancy_function(m), toric::s_sum_function(m), false};
}

/// inf over eta != 0 of A(eta) / sum_i S_i(eta).
inline DeltaResult coupled_delta(const ToricFanoModel& m)
{
    auto r = optim::minimize_pl_ratio(delta_program(m));
    if (!r.value) throw Error(ErrorCode::Internal, "threshold program without finite rays");
    return {*r.value, r.witness, r.optimal_rays, {kToricSearchAssumption, kLebesgueAssumption}};
}

struct Verdict {
    bool semistable = false;
    Rat delta;
    CoupledBarycenter futaki;
    /// delta = 1 iff the coupled Futaki character vanishes, delta < 1 otherwise.
    bool dichotomy_holds = false;
    RatVec witness;
};

inline Verdict semistable_verdict(const ToricFanoModel& m)
{
    Verdict v;
    auto d = coupled_delta(m);
    v.delta = d.value;
    v.witness = d.witness;
    v.futaki = coupled_futaki(m);
    v.semistable = d.value >= Rat(1);
    if (v.futaki.vanishes) v.dichotomy_holds = d.value == Rat(1);
    else v.dichotomy_holds = d.value < Rat(1) && dot(v.futaki.total, d.witness).sign() > 0;
    return v;
}

struct Destabilizer {
    RatVec eta;
    filt::FiltrationFamily family;
    Rat ding;
};

/// The wt_eta family at the threshold witness when delta < 1.
inline std::optional<Destabilizer> find_destabilizer(const ModelPtr& m, long long m_max = 12)
{
    auto d = coupled_delta(*m);
    if (d.value >= Rat(1)) return std::nullopt;
    auto bases = filt::make_bases(m, m_max);
    Destabilizer out{d.witness, filt::valuation_family(bases, d.witness), Rat(0)};
    out.ding = coupled_ding(out.family).value;
    return out;
}

struct ReducedDeltaResult {
    std::optional<Rat> value;  // exact value; nullopt with infinite = true means +infinity
    bool infinite = false;
    bool exact = true;
    Rat lower_bound;                 // always certified
    std::optional<RatVec> witness;   // transversal direction eta
    std::optional<RatVec> twist;     // optimal xi when the inner optimum is attained
    bool attained = true;            // false when the inner sup is only a recession limit
    std::vector<std::string> assumptions;
};

namespace detail {

inline void check_subtorus(const std::vector<RatVec>& sub, std::size_t p)
{
    for (const auto& v : sub) {
        if (v.size() != p) throw Error(ErrorCode::RankMismatch, "subtorus generator rank");
        if (!is_integral(v)) throw Error(ErrorCode::DegenerateSubtorus, "subtorus generators must be integral");
    }
    if (linalg::rank(sub) != sub.size()) throw Error(ErrorCode::DegenerateSubtorus, "subtorus generators dependent");
    if (sub.empty() || sub.size() == p) return;
    // Saturation: the gcd of maximal minors is 1.
    mpz_class g = 0;
    linalg::for_each_subset(p, sub.size(), [&](const std::vector<std::size_t>& cols) {
        linalg::Matrix minor;
        for (const auto& v : sub) {
            RatVec r;
            for (auto c : cols) r.push_back(v[c]);
            minor.push_back(r);
        }
        mpz_class d = linalg::det(minor).num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), d.get_mpz_t());
    });
    if (g != 1) throw Error(ErrorCode::DegenerateSubtorus, "subtorus lattice is not saturated");
}

}  // namespace detail

/// delta^Red for the subtorus spanned by `sub`: inf over eta outside its span of sup over its twists.
/// With g = <b_cp, .>/A the ratio A/sum S equals 1/(1+g), so the value is 1/(1 + sup_eta inf_xi g).
inline ReducedDeltaResult reduced_coupled_delta(const ToricFanoModel& m, const std::vector<RatVec>& sub,
                                                bool require_exact = false)
{
    const std::size_t p = m.rank();
    detail::check_subtorus(sub, p);
    ReducedDeltaResult out;
    out.assumptions = {kToricSearchAssumption, kLebesgueAssumption};
    auto plain = coupled_delta(m);
    out.lower_bound = plain.value;
    if (sub.size() == p) {
        out.infinite = true;
        out.assumptions.push_back("no valuation is transversal to the full torus; the infimum is over the empty set");
        return out;
    }
    if (sub.empty()) {
        out.value = plain.value;
        out.witness = plain.witness;
        out.twist = zeros(p);
        return out;
    }
    if (p > 2) {
        if (require_exact) throw Error(ErrorCode::RankTooHigh, "exact reduced threshold needs rank <= 2");
        out.exact = false;
        return out;
    }
    // Rank 2, line V = span(v). Slices w + V and -w + V with w a complement of v.
    const RatVec& v = sub.front();
    RatVec w = zeros(2);
    w[v[0].is_zero() ? 0 : 1] = 1;
    const RatVec b = coupled_futaki(m).total;
    auto g = [&](const RatVec& z) { return dot(b, z) / toric::log_discrepancy(m, z); };
    std::optional<Rat> best;  // sup over sides of inf over the slice
    for (int side : {1, -1}) {
        RatVec base = Rat(side) * w;
        // Breakpoints: base + t v crosses ray u when det(base + t v, u) = 0.
        std::optional<Rat> inf;
        std::optional<Rat> t_at;
        for (const auto& u : m.rays()) {
            Rat a = v[0] * u[1] - v[1] * u[0];
            if (a.is_zero()) continue;
            Rat t = -(base[0] * u[1] - base[1] * u[0]) / a;
            RatVec z = base + t * v;
            if (dot(z, u).sign() <= 0) continue;  // crossing the opposite ray
            Rat val = g(z);
            if (!inf || val < *inf || (val == *inf && t < *t_at)) {
                inf = val;
                t_at = t;
            }
        }
        bool attained = true;
        for (const auto& dir : {v, -v}) {
            Rat lim = g(dir);
            if (!inf || lim < *inf) {
                inf = lim;
                attained = false;
                t_at.reset();
            }
        }
        if (!best || *inf > *best) {
            best = inf;
            out.witness = primitive(base);
            out.attained = attained;
            out.twist = t_at ? std::optional<RatVec>((*t_at) * v) : std::nullopt;
        }
    }
    out.value = Rat(1) / (Rat(1) + *best);
    return out;
}

// ---------------------------------------------------------------------------
// Identity suite.

struct IdentityOutcome {
    std::string name;
    std::size_t checks = 0;
    std::size_t failures = 0;
    std::string first_failure;
    bool skipped = false;
    std::string note;
};

struct SuiteReport {
    std::vector<IdentityOutcome> identities;
    std::size_t passed() const
    {
        std::size_t n = 0;
        for (const auto& i : identities) n += i.checks - i.failures;
        return n;
    }
    std::size_t failed() const
    {
        std::size_t n = 0;
        for (const auto& i : identities) n += i.failures;
        return n;
    }
    bool ok() const { return failed() == 0; }
};

/// Deterministic sampler; uses raw engine output so results do not depend on library distributions.
class Sampler {
public:
    explicit Sampler(std::uint64_t seed) : rng_(seed) {}
    long long integer(long long lo, long long hi)
    {
        return lo + static_cast<long long>(rng_() % static_cast<std::uint64_t>(hi - lo + 1));
    }
    Rat rational(long long bound, long long max_den) { return Rat(integer(-bound, bound), integer(1, max_den)); }
    RatVec vec(std::size_t p, long long bound, long long max_den)
    {
        RatVec r;
        for (std::size_t j = 0; j < p; ++j) r.push_back(rational(bound, max_den));
        return r;
    }
    RatVec int_vec(std::size_t p, long long bound)
    {
        RatVec r;
        for (std::size_t j = 0; j < p; ++j) r.push_back(Rat(integer(-bound, bound)));
        return r;
    }
    RatVec nonzero_vec(std::size_t p, long long bound, long long max_den)
    {
        while (true) {
            auto r = vec(p, bound, max_den);
            if (!is_zero(r)) return r;
        }
    }

private:
    std::mt19937_64 rng_;
};

struct SuiteOptions {
    std::size_t samples = 100;
    std::uint64_t seed = 0;
    long long m_max = 6;
    /// Table identities are costlier; each uses min(samples, table_samples) samples.
    std::size_t table_samples = 100;
};

/// Ratios A/sum S at eta + e xi, their expected limit and the rate constant.
struct LimitTrend {
    std::vector<std::pair<long long, Rat>> ratios;
    Rat limit;  // ratio along xi itself
    Rat kappa;  // |ratio_e - limit| <= kappa / e for e >= e0
    Rat e0;
    bool monotone = true;
    bool within_bound = true;
};

inline LimitTrend limit_trend(const ToricFanoModel& m, const RatVec& eta, const RatVec& xi,
                              const std::vector<long long>& es)
{
    auto ratio = [&](const RatVec& z) { return toric::log_discrepancy(m, z) / toric::s_sum(m, z); };
    LimitTrend t;
    Rat a = toric::log_discrepancy(m, xi), s = toric::s_sum(m, xi);
    t.limit = a / s;
    // A and sum S are convex and degree-1 homogeneous, hence subadditive; perturbing by eta moves
    // them by at most ra, rs.
    Rat ra = std::max(toric::log_discrepancy(m, eta), toric::log_discrepancy(m, -eta));
    Rat rs = std::max(toric::s_sum(m, eta), toric::s_sum(m, -eta));
    t.kappa = Rat(2) * (s * ra + a * rs) / (s * s);
    t.e0 = Rat(2) * rs / s;
    std::optional<Rat> prev;
    for (auto e : es) {
        Rat r = ratio(eta + Rat(e) * xi);
        t.ratios.emplace_back(e, r);
        Rat gap = abs(r - t.limit);
        if (prev && *prev < gap) t.monotone = false;
        prev = gap;
        if (Rat(e) >= t.e0 && gap * Rat(e) > t.kappa) t.within_bound = false;
    }
    return t;
}

namespace detail {

class SuiteRunner {
public:
    SuiteRunner(ModelPtr model, SuiteOptions opt)
        : m_(std::move(model)), opt_(opt), rng_(opt.seed), bases_(filt::make_bases(m_, opt.m_max))
    {
    }

    SuiteReport run()
    {
        const auto& m = *m_;
        const std::size_t p = m.rank(), k = m.summands();
        const RatVec bcp = coupled_futaki(m).total;

        identity("twist_valuation", opt_.table_samples, [&](std::string& why) {
            auto eta = rng_.vec(p, 3, 2), xi = rng_.vec(p, 3, 2);
            auto bset = all_bases();
            for (std::size_t i = 0; i < bset.size(); ++i) {
                auto lhs = filt::twist(filt::toric_valuation(bset[i], eta), xi);
                Summand s = bset[i]->summand();
                auto rhs = filt::shift(filt::toric_valuation(bset[i], eta + xi), -toric::theta_twist(m, s, eta, xi));
                if (!(lhs == rhs) || !(lhs.closed_form() == rhs.closed_form()))
                    return fail(why, "ring " + toric::summand_name(s) + " eta=" + str(eta) + " xi=" + str(xi));
            }
            return true;
        });

        identity("s_twist", opt_.samples, [&](std::string& why) {
            auto eta = rng_.vec(p, 4, 3), xi = rng_.vec(p, 4, 3);
            for (std::size_t i = 0; i < k; ++i) {
                Rat lhs = toric::s_invariant(m, i, eta + xi);
                Rat rhs = toric::s_invariant(m, i, eta) + dot(m.barycenter(i), xi) + toric::theta_twist(m, i, eta, xi);
                if (lhs != rhs) return fail(why, "i=" + std::to_string(i) + " " + lhs.str() + " != " + rhs.str());
            }
            return true;
        });

        identity("a_twist", opt_.samples, [&](std::string& why) {
            auto eta = rng_.vec(p, 4, 3), xi = rng_.vec(p, 4, 3);
            Rat lhs = toric::log_discrepancy(m, eta + xi) - toric::log_discrepancy(m, eta);
            Rat rhs = toric::theta_twist(m, kTotal, eta, xi);
            if (lhs != rhs) return fail(why, lhs.str() + " != " + rhs.str());
            return true;
        });

        identity("barycenter_split_invariance", opt_.samples, [&](std::string& why) {
            RatVec cached = zeros(p), moved = zeros(p), used = zeros(p);
            for (std::size_t i = 0; i < k; ++i) {
                RatVec beta = i + 1 < k ? rng_.vec(p, 3, 3) : -used;
                used = used + beta;
                cached = cached + m.barycenter(i);
                moved = moved + geom::centroid(m.decomposition()[i].translated(beta));
            }
            if (cached != moved) return fail(why, "cached " + str(cached) + " vs translated split " + str(moved));
            return true;
        });

        identity("theta_additivity", opt_.samples, [&](std::string& why) {
            auto eta = rng_.vec(p, 4, 3), xi = rng_.vec(p, 4, 3);
            Rat sum;
            for (std::size_t i = 0; i < k; ++i) sum += toric::theta_twist(m, i, eta, xi);
            Rat total = toric::theta_twist(m, kTotal, eta, xi);
            if (sum != total) return fail(why, sum.str() + " != " + total.str());
            return true;
        });

        identity("a_minus_s_twist", opt_.samples, [&](std::string& why) {
            auto eta = rng_.vec(p, 4, 3), xi = rng_.vec(p, 4, 3);
            Rat lhs = toric::log_discrepancy(m, eta + xi) - toric::s_sum(m, eta + xi);
            Rat rhs = toric::log_discrepancy(m, eta) - toric::s_sum(m, eta) - dot(bcp, xi);
            if (lhs != rhs) return fail(why, lhs.str() + " != " + rhs.str());
            return true;
        });

        identity("ding_twist", opt_.samples, [&](std::string& why) {
            auto eta = rng_.vec(p, 3, 2), xi = rng_.vec(p, 3, 2);
            std::vector<filt::ValuationShift> fam;
            for (std::size_t i = 0; i < k; ++i) fam.push_back({eta, rng_.rational(3, 3)});
            auto t = ding_of_twist(m, fam, xi);
            if (!t.agree) return fail(why, t.formula.str() + " != " + t.direct.str());
            return true;
        });

        identity("sum_lambda_max", opt_.table_samples, [&](std::string& why) {
            auto fam = random_family(false);
            auto sum = filt::sum_filtration(fam, bases_.total);
            auto ns = filt::numerics(sum);
            for (std::size_t d = 0; d < ns.degrees.size(); ++d) {
                Rat parts;
                for (const auto& f : fam.members) parts += filt::numerics(f).degrees[d].t_m;
                if (parts != ns.degrees[d].t_m)
                    return fail(why, "m=" + std::to_string(ns.degrees[d].m) + " " + ns.degrees[d].t_m.str() +
                                         " != " + parts.str());
            }
            return true;
        });

        identity("sum_shift", opt_.table_samples, [&](std::string& why) {
            auto fam = random_family(false);
            filt::FiltrationFamily shifted;
            Rat total;
            for (const auto& f : fam.members) {
                Rat c = rng_.rational(3, 3);
                total += c;
                shifted.members.push_back(filt::shift(f, c));
            }
            auto lhs = filt::sum_filtration(shifted, bases_.total);
            auto rhs = filt::shift(filt::sum_filtration(fam, bases_.total), total);
            if (!(lhs == rhs)) return fail(why, "shift total " + total.str());
            return true;
        });

        identity("sum_twist", opt_.table_samples, [&](std::string& why) {
            auto fam = random_family(false);
            auto xi = rng_.vec(p, 3, 2);
            auto lhs = filt::sum_filtration(filt::twist_family(fam, xi), bases_.total);
            auto rhs = filt::twist(filt::sum_filtration(fam, bases_.total), xi);
            if (!(lhs == rhs)) return fail(why, "xi=" + str(xi));
            return true;
        });

        identity("approx_sum", opt_.table_samples, [&](std::string& why) {
            auto fam = random_family(false);
            long long m0 = bases_.total->degrees().front();
            filt::FiltrationFamily approx;
            for (const auto& f : fam.members) approx.members.push_back(filt::approximate(f, m0));
            auto lhs = filt::sum_filtration(approx, bases_.total);
            auto rhs = filt::approximate(filt::sum_filtration(fam, bases_.total), m0);
            if (!(lhs == rhs)) return fail(why, "m0=" + std::to_string(m0));
            return true;
        });

        identity("base_change_sum", opt_.table_samples, [&](std::string& why) {
            auto fam = random_family(true);
            long long e = rng_.integer(2, 4);
            filt::FiltrationFamily changed;
            for (const auto& f : fam.members) changed.members.push_back(filt::base_change(f, e));
            auto lhs = filt::base_change(filt::sum_filtration(fam, bases_.total), e);
            auto rhs = filt::sum_filtration(changed, bases_.total);
            if (!(lhs == rhs)) return fail(why, "e=" + std::to_string(e));
            return true;
        });

        identity("prepare_e", opt_.table_samples, [&](std::string& why) {
            auto fam = random_family(true);
            auto f = filt::sum_filtration(fam, bases_.total);
            long long e = rng_.integer(2, 4);
            auto xi = rng_.int_vec(p, 3);
            auto scaled = filt::numerics(filt::base_change(f, e));
            auto plain = filt::numerics(f);
            auto a = filt::numerics(filt::twist(filt::base_change(f, e), Rat(e) * xi));
            auto b = filt::numerics(filt::base_change(filt::twist(f, xi), e));
            for (std::size_t d = 0; d < plain.degrees.size(); ++d) {
                if (scaled.degrees[d].s_m != Rat(e) * plain.degrees[d].s_m ||
                    scaled.degrees[d].t_m != Rat(e) * plain.degrees[d].t_m)
                    return fail(why, "scaling at m=" + std::to_string(plain.degrees[d].m));
                if (a.degrees[d].s_m != b.degrees[d].s_m || a.degrees[d].t_m != b.degrees[d].t_m)
                    return fail(why, "twist/base change at m=" + std::to_string(plain.degrees[d].m));
            }
            return true;
        });

        identity("growth_bound", opt_.table_samples, [&](std::string& why) {
            auto fam = random_family(false);
            auto f = filt::sum_filtration(fam, bases_.total);
            auto xi = rng_.nonzero_vec(p, 3, 2);
            std::optional<Rat> e_minus;
            for (auto mm : f.degrees())
                for (const auto& w : f.weights(mm)) {
                    Rat r = w / Rat(mm);
                    if (!e_minus || r < *e_minus) e_minus = r;
                }
            auto tw = filt::numerics(filt::twist(f, xi));
            // dist(0, boundary) * |xi| = min over facets of |xi| / |u|; compare squares exactly.
            for (const auto& d : tw.degrees) {
                Rat gap = d.t_m - *e_minus;
                bool ok = false;
                if (gap.sign() >= 0)
                    for (const auto& u : m.rays())
                        if (gap * gap * norm2(u) >= norm2(xi)) ok = true;
                if (!ok) return fail(why, "m=" + std::to_string(d.m) + " xi=" + str(xi));
            }
            return true;
        });

        // The limit is 1 only when the coupled Futaki character vanishes.
        {
            IdentityOutcome o{"limit_ratio_one", 0, 0, "", false, ""};
            if (!is_zero(bcp)) {
                o.skipped = true;
                o.note = "coupled Futaki character is nonzero";
            } else {
                for (std::size_t s = 0; s < opt_.samples; ++s) {
                    auto eta = rng_.nonzero_vec(p, 3, 2), xi = rng_.nonzero_vec(p, 3, 2);
                    while (hits_origin(eta, xi)) eta = rng_.nonzero_vec(p, 3, 2);
                    auto t = limit_trend(m, eta, xi, {1, 2, 4, 8, 16});
                    ++o.checks;
                    if (t.limit != Rat(1) || !t.monotone || !t.within_bound) {
                        ++o.failures;
                        if (o.first_failure.empty()) o.first_failure = "eta=" + str(eta) + " xi=" + str(xi);
                    }
                }
            }
            report_.identities.push_back(o);
        }

        // One-sided check: below the threshold every valuation family has a twist with D >= 0.
        {
            auto delta = coupled_delta(m).value;
            Rat below = delta - Rat(1, 1000);
            identity("ding_below_threshold", opt_.samples, [&](std::string& why) {
                auto eta = rng_.nonzero_vec(p, 3, 2);
                std::vector<filt::ValuationShift> fam;
                for (std::size_t i = 0; i < k; ++i) fam.push_back({eta, rng_.rational(3, 3)});
                for (const auto& xi : {zeros(p), rng_.vec(p, 3, 2), -eta})
                    if (coupled_ding(m, twisted(m, fam, xi), below).value.sign() >= 0) return true;
                return fail(why, "eta=" + str(eta));
            });
        }
        return report_;
    }

private:
    using Summand = toric::Summand;

    static bool hits_origin(const RatVec& eta, const RatVec& xi)
    {
        for (long long e : {1, 2, 4, 8, 16})
            if (is_zero(eta + Rat(e) * xi)) return true;
        return false;
    }

    static bool fail(std::string& why, std::string msg)
    {
        why = std::move(msg);
        return false;
    }

    template <class Fn>
    void identity(const std::string& name, std::size_t n, Fn&& check)
    {
        IdentityOutcome o{name, 0, 0, "", false, ""};
        for (std::size_t s = 0; s < n; ++s) {
            std::string why;
            ++o.checks;
            if (!check(why)) {
                ++o.failures;
                if (o.first_failure.empty()) o.first_failure = why;
            }
        }
        report_.identities.push_back(std::move(o));
    }

    std::vector<filt::BasisPtr> all_bases() const
    {
        auto b = bases_.summands;
        b.push_back(bases_.total);
        return b;
    }

    /// Valuation filtrations with independent directions and shifts, optionally rounded to integers.
    filt::FiltrationFamily random_family(bool integral)
    {
        filt::FiltrationFamily fam;
        for (const auto& b : bases_.summands) {
            auto f = filt::shift(filt::toric_valuation(b, rng_.vec(m_->rank(), 3, 2)), rng_.rational(2, 3));
            fam.members.push_back(integral ? filt::round_z(f) : f);
        }
        return fam;
    }

    ModelPtr m_;
    SuiteOptions opt_;
    Sampler rng_;
    filt::BasisSet bases_;
    SuiteReport report_;
};

}  // namespace detail

inline SuiteReport identity_suite(const ModelPtr& model, const SuiteOptions& opt = {})
{
    if (opt.samples == 0) throw Error(ErrorCode::DegenerateInput, "sample count must be positive");
    return detail::SuiteRunner(model, opt).run();
}

}  // namespace cks::stab
