#pragma once

// Filtrations on truncated section rings of toric line bundles. Every graded piece R_{m,alpha}
// is at most one-dimensional, so a filtration is a weight w_m(alpha) per character and the
// span-sums of the general theory become maxima over character decompositions.

#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "cks/toricmodel.hpp"

namespace cks::filt {

using toric::kTotal;
using toric::Summand;
using toric::ToricFanoModel;
using IntVec = std::vector<long long>;

inline IntVec to_int(const RatVec& a)
{
    IntVec r;
    r.reserve(a.size());
    for (const auto& x : a) r.push_back(x.to_ll());
    return r;
}

/// Characters Lambda_m of one summand ring (or the total ring) on a fixed degree grid.
class GradedBasis {
public:
    GradedBasis(std::shared_ptr<const ToricFanoModel> model, Summand i, std::vector<long long> degrees)
        : model_(std::move(model)), summand_(i), degrees_(std::move(degrees))
    {
        model_->check_index(i);
        std::sort(degrees_.begin(), degrees_.end());
        degrees_.erase(std::unique(degrees_.begin(), degrees_.end()), degrees_.end());
        if (degrees_.empty()) throw Error(ErrorCode::GridMismatch, "empty degree grid");
        for (auto m : degrees_) {
            Level lv;
            lv.chars = toric::section_basis(*model_, i, m);
            for (std::size_t j = 0; j < lv.chars.size(); ++j) {
                lv.ints.push_back(to_int(lv.chars[j]));
                lv.index.emplace(lv.ints.back(), j);
            }
            levels_.emplace(m, std::move(lv));
        }
    }

    const ToricFanoModel& model() const { return *model_; }
    const std::shared_ptr<const ToricFanoModel>& model_ptr() const { return model_; }
    Summand summand() const { return summand_; }
    const std::vector<long long>& degrees() const { return degrees_; }
    bool has_degree(long long m) const { return levels_.count(m) > 0; }

    const std::vector<RatVec>& chars(long long m) const { return level(m).chars; }
    const std::vector<IntVec>& int_chars(long long m) const { return level(m).ints; }

    std::optional<std::size_t> index_of(long long m, const IntVec& a) const
    {
        const auto& idx = level(m).index;
        auto it = idx.find(a);
        if (it == idx.end()) return std::nullopt;
        return it->second;
    }

    bool same_grid(const GradedBasis& o) const { return degrees_ == o.degrees_ && model_ == o.model_; }

private:
    struct Level {
        std::vector<RatVec> chars;
        std::vector<IntVec> ints;
        std::map<IntVec, std::size_t> index;
    };
    const Level& level(long long m) const
    {
        auto it = levels_.find(m);
        if (it == levels_.end()) throw Error(ErrorCode::GridMismatch, "degree " + std::to_string(m) + " not stored");
        return it->second;
    }
    std::shared_ptr<const ToricFanoModel> model_;
    Summand summand_;
    std::vector<long long> degrees_;
    std::map<long long, Level> levels_;
};

using BasisPtr = std::shared_ptr<const GradedBasis>;

/// Degrees step, 2*step, ... up to m_max where step makes every requested summand integral.
inline std::vector<long long> degree_grid(const ToricFanoModel& model, const std::vector<Summand>& summands,
                                          long long m_max)
{
    long long step = 1;
    for (auto i : summands) step = std::lcm(step, model.step(i));
    std::vector<long long> out;
    for (long long m = step; m <= m_max; m += step) out.push_back(m);
    if (out.empty())
        throw Error(ErrorCode::GridMismatch,
                    "degree cap " + std::to_string(m_max) + " below integrality step " + std::to_string(step));
    return out;
}

inline BasisPtr make_basis(std::shared_ptr<const ToricFanoModel> model, Summand i, std::vector<long long> degrees)
{
    return std::make_shared<const GradedBasis>(std::move(model), i, std::move(degrees));
}

/// Bases for every summand and for the total ring, all on one common grid.
struct BasisSet {
    std::vector<BasisPtr> summands;
    BasisPtr total;
};

inline BasisSet make_bases(std::shared_ptr<const ToricFanoModel> model, long long m_max)
{
    std::vector<Summand> all;
    for (std::size_t i = 0; i < model->summands(); ++i) all.push_back(i);
    auto grid = degree_grid(*model, all, m_max);
    BasisSet out;
    for (auto i : all) out.summands.push_back(make_basis(model, i, grid));
    out.total = make_basis(model, kTotal, grid);
    return out;
}

/// Closed form w_m(alpha) = <alpha, eta> - m * lambda(eta) + C * m, covering the trivial
/// filtration (eta = 0), toric valuations and all their shifts and twists.
struct ValuationShift {
    RatVec eta;
    Rat shift;
    friend bool operator==(const ValuationShift&, const ValuationShift&) = default;
};

enum class Kind { Trivial, ToricValuation, Shifted, Twisted, Sum, Table, Rounded, BaseChange, Approximation };

inline const char* kind_name(Kind k)
{
    switch (k) {
    case Kind::Trivial: return "trivial";
    case Kind::ToricValuation: return "toric_valuation";
    case Kind::Shifted: return "shifted";
    case Kind::Twisted: return "twisted";
    case Kind::Sum: return "sum";
    case Kind::Table: return "table";
    case Kind::Rounded: return "rounded";
    case Kind::BaseChange: return "base_change";
    case Kind::Approximation: return "approximation";
    }
    return "?";
}

class Filtration {
public:
    const GradedBasis& basis() const { return *basis_; }
    const BasisPtr& basis_ptr() const { return basis_; }
    Kind kind() const { return kind_; }
    const std::optional<ValuationShift>& closed_form() const { return closed_; }
    /// Exact lambda_max when known independently of the closed form (sums of valuations).
    const std::optional<Rat>& certified_lambda_max() const { return lambda_max_; }

    /// Degrees with materialized weights (approximations only fill multiples of m0).
    std::vector<long long> degrees() const
    {
        std::vector<long long> d;
        for (const auto& [m, w] : weights_) d.push_back(m);
        return d;
    }
    bool has_degree(long long m) const { return weights_.count(m) > 0; }
    const std::vector<Rat>& weights(long long m) const
    {
        auto it = weights_.find(m);
        if (it == weights_.end()) throw Error(ErrorCode::GridMismatch, "degree " + std::to_string(m) + " undefined");
        return it->second;
    }
    Rat weight(long long m, const RatVec& alpha) const
    {
        auto j = basis_->index_of(m, to_int(alpha));
        if (!j) throw Error(ErrorCode::MissingCharacter, str(alpha) + " not in degree " + std::to_string(m));
        return weights(m)[*j];
    }

    bool is_integer_valued() const
    {
        for (const auto& [m, ws] : weights_)
            for (const auto& w : ws)
                if (!w.is_integer()) return false;
        return true;
    }

    /// Same basis grid and identical weights on all materialized degrees.
    friend bool operator==(const Filtration& a, const Filtration& b)
    {
        return a.basis_->summand() == b.basis_->summand() && a.basis_->same_grid(*b.basis_) && a.weights_ == b.weights_;
    }

    struct Builder;

private:
    friend struct Builder;
    BasisPtr basis_;
    Kind kind_ = Kind::Table;
    std::optional<ValuationShift> closed_;
    std::optional<Rat> lambda_max_;
    std::map<long long, std::vector<Rat>> weights_;
};

struct Filtration::Builder {
    static Filtration make(BasisPtr b, Kind k, std::optional<ValuationShift> cf, std::map<long long, std::vector<Rat>> w,
                           std::optional<Rat> lmax = std::nullopt)
    {
        Filtration f;
        f.basis_ = std::move(b);
        f.kind_ = k;
        f.closed_ = std::move(cf);
        f.weights_ = std::move(w);
        f.lambda_max_ = std::move(lmax);
        return f;
    }
    static std::map<long long, std::vector<Rat>>& weights(Filtration& f) { return f.weights_; }
};

namespace detail {

using Table = std::map<long long, std::vector<Rat>>;

inline Table valuation_table(const GradedBasis& b, const ValuationShift& cf)
{
    Rat lam = toric::lambda(b.model(), b.summand(), cf.eta);
    Table t;
    for (auto m : b.degrees()) {
        auto& ws = t[m];
        for (const auto& a : b.chars(m)) ws.push_back(dot(a, cf.eta) + Rat(m) * (cf.shift - lam));
    }
    return t;
}

template <class Fn>
Filtration map_weights(const Filtration& f, Kind k, std::optional<ValuationShift> cf, Fn&& fn,
                       std::optional<Rat> lmax = std::nullopt)
{
    Table t;
    for (auto m : f.degrees()) {
        const auto& chars = f.basis().chars(m);
        const auto& src = f.weights(m);
        auto& dst = t[m];
        dst.reserve(src.size());
        for (std::size_t j = 0; j < src.size(); ++j) dst.push_back(fn(m, chars[j], src[j]));
    }
    return Filtration::Builder::make(f.basis_ptr(), k, std::move(cf), std::move(t), std::move(lmax));
}

}  // namespace detail

/// Default sample budget for the multiplicativity check on explicit tables.
inline constexpr std::size_t kMultiplicativitySamples = 400;

/// Checks w_{m+m'}(a+a') >= w_m(a) + w_{m'}(a') on deterministic samples; throws NotMultiplicative.
inline void check_multiplicative(const Filtration& f, std::size_t samples = kMultiplicativitySamples,
                                 std::uint64_t seed = 0)
{
    auto deg = f.degrees();
    std::vector<std::pair<long long, long long>> pairs;
    for (auto m : deg)
        for (auto n : deg)
            if (m <= n && f.has_degree(m + n)) pairs.emplace_back(m, n);
    if (pairs.empty()) return;
    std::mt19937_64 rng(seed);
    const auto& b = f.basis();
    for (std::size_t s = 0; s < samples; ++s) {
        auto [m, n] = pairs[s % pairs.size()];
        const auto& cm = b.int_chars(m);
        const auto& cn = b.int_chars(n);
        std::size_t x = rng() % cm.size(), y = rng() % cn.size();
        IntVec sum(cm[x].size());
        for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = cm[x][k] + cn[y][k];
        auto z = b.index_of(m + n, sum);
        if (!z) throw Error(ErrorCode::Internal, "character sum outside the section basis");
        if (f.weights(m + n)[*z] < f.weights(m)[x] + f.weights(n)[y])
            throw Error(ErrorCode::NotMultiplicative,
                        "w_" + std::to_string(m + n) + "(" + str(b.chars(m + n)[*z]) + ") < w_" + std::to_string(m) +
                            "(" + str(b.chars(m)[x]) + ") + w_" + std::to_string(n) + "(" + str(b.chars(n)[y]) + ")");
    }
}

inline Filtration trivial(BasisPtr b)
{
    ValuationShift cf{zeros(b->model().rank()), Rat(0)};
    auto t = detail::valuation_table(*b, cf);
    return Filtration::Builder::make(std::move(b), Kind::Trivial, cf, std::move(t));
}

/// w_m(alpha) = <alpha, eta> - m * lambda(eta).
inline Filtration toric_valuation(BasisPtr b, const RatVec& eta)
{
    require_same_rank(eta, RatVec(b->model().rank()), "toric valuation");
    if (is_zero(eta)) return trivial(std::move(b));
    ValuationShift cf{eta, Rat(0)};
    auto t = detail::valuation_table(*b, cf);
    return Filtration::Builder::make(std::move(b), Kind::ToricValuation, cf, std::move(t));
}

/// Explicit table: degree -> character -> weight. Every basis character of every listed degree must
/// be present; listed degrees must be on the basis grid.
using WeightTable = std::map<long long, std::map<RatVec, Rat>>;

inline Filtration from_table(BasisPtr b, const WeightTable& table, bool check = true)
{
    detail::Table t;
    for (const auto& [m, row] : table) {
        if (!b->has_degree(m)) throw Error(ErrorCode::GridMismatch, "degree " + std::to_string(m) + " not on the grid");
        const auto& chars = b->chars(m);
        if (row.size() != chars.size()) {
            for (const auto& [a, w] : row)
                if (!b->index_of(m, to_int(a)))
                    throw Error(ErrorCode::MissingCharacter, str(a) + " is not a degree-" + std::to_string(m) + " character");
        }
        auto& ws = t[m];
        for (const auto& a : chars) {
            auto it = row.find(a);
            if (it == row.end())
                throw Error(ErrorCode::MissingCharacter,
                            "no weight for " + str(a) + " in degree " + std::to_string(m));
            ws.push_back(it->second);
        }
    }
    if (t.empty()) throw Error(ErrorCode::GridMismatch, "weight table has no degrees");
    auto f = Filtration::Builder::make(std::move(b), Kind::Table, std::nullopt, std::move(t));
    if (check) check_multiplicative(f);
    return f;
}

/// w + C*m.
inline Filtration shift(const Filtration& f, const Rat& c)
{
    std::optional<ValuationShift> cf;
    if (f.closed_form()) cf = ValuationShift{f.closed_form()->eta, f.closed_form()->shift + c};
    std::optional<Rat> lmax;
    if (f.certified_lambda_max()) lmax = *f.certified_lambda_max() + c;
    return detail::map_weights(
        f, Kind::Shifted, cf, [&](long long m, const RatVec&, const Rat& w) { return w + Rat(m) * c; }, lmax);
}

/// w + <alpha, xi>. On a closed form: wt_eta twisted by xi is wt_{eta+xi} shifted by -theta_xi(eta).
inline Filtration twist(const Filtration& f, const RatVec& xi)
{
    if (xi.size() != f.basis().model().rank())
        throw Error(ErrorCode::RankMismatch, "twist of rank " + std::to_string(xi.size()) + " on rank " +
                                                 std::to_string(f.basis().model().rank()) + " model");
    std::optional<ValuationShift> cf;
    if (f.closed_form()) {
        const auto& [eta, c] = *f.closed_form();
        cf = ValuationShift{eta + xi, c - toric::theta_twist(f.basis().model(), f.basis().summand(), eta, xi)};
    }
    return detail::map_weights(f, Kind::Twisted, cf,
                               [&](long long, const RatVec& a, const Rat& w) { return w + dot(a, xi); });
}

/// Z-valued filtration F_Z^x = F^{ceil x}, i.e. weights rounded down.
inline Filtration round_z(const Filtration& f)
{
    if (f.is_integer_valued()) return f;
    return detail::map_weights(f, Kind::Rounded, std::nullopt,
                               [](long long, const RatVec&, const Rat& w) { return Rat(w.floor()); });
}

/// F^{(e),x} = F^{ceil(x/e)}: weights scaled by e.
inline Filtration base_change(const Filtration& f, long long e)
{
    if (e < 1) throw Error(ErrorCode::DegenerateInput, "base change exponent must be positive");
    if (!f.is_integer_valued()) throw Error(ErrorCode::NotIntegerValued, "base change needs integer weights");
    std::optional<ValuationShift> cf;
    if (f.closed_form()) cf = ValuationShift{Rat(e) * f.closed_form()->eta, Rat(e) * f.closed_form()->shift};
    std::optional<Rat> lmax;
    if (f.certified_lambda_max()) lmax = Rat(e) * *f.certified_lambda_max();
    return detail::map_weights(
        f, Kind::BaseChange, cf, [&](long long, const RatVec&, const Rat& w) { return Rat(e) * w; }, lmax);
}

/// k filtrations, one per summand ring, on a common grid.
struct FiltrationFamily {
    std::vector<Filtration> members;

    const ToricFanoModel& model() const { return members.front().basis().model(); }

    void validate() const
    {
        if (members.empty()) throw Error(ErrorCode::GridMismatch, "empty family");
        const auto& first = members.front().basis();
        if (members.size() != first.model().summands())
            throw Error(ErrorCode::GridMismatch, "family size differs from the number of summands");
        for (std::size_t i = 0; i < members.size(); ++i) {
            const auto& b = members[i].basis();
            if (!b.same_grid(first)) throw Error(ErrorCode::GridMismatch, "family members on different grids");
            if (b.summand() != i) throw Error(ErrorCode::GridMismatch, "member " + std::to_string(i) + " on wrong summand");
            if (members[i].degrees() != members.front().degrees())
                throw Error(ErrorCode::GridMismatch, "family members materialize different degrees");
        }
    }
};

inline FiltrationFamily valuation_family(const BasisSet& bases, const RatVec& eta)
{
    FiltrationFamily fam;
    for (const auto& b : bases.summands) fam.members.push_back(toric_valuation(b, eta));
    return fam;
}

inline FiltrationFamily trivial_family(const BasisSet& bases)
{
    FiltrationFamily fam;
    for (const auto& b : bases.summands) fam.members.push_back(trivial(b));
    return fam;
}

inline FiltrationFamily twist_family(const FiltrationFamily& fam, const RatVec& xi)
{
    FiltrationFamily out;
    for (const auto& f : fam.members) out.members.push_back(twist(f, xi));
    return out;
}

namespace detail {

/// Max-plus convolution of weight functions on two character sets into the target basis level.
inline void convolve(const std::vector<IntVec>& ca, const std::vector<Rat>& wa, const std::vector<IntVec>& cb,
                     const std::vector<Rat>& wb, const GradedBasis& target, long long m,
                     std::vector<std::optional<Rat>>& out)
{
    IntVec key;
    for (std::size_t x = 0; x < ca.size(); ++x)
        for (std::size_t y = 0; y < cb.size(); ++y) {
            key.resize(ca[x].size());
            for (std::size_t k = 0; k < key.size(); ++k) key[k] = ca[x][k] + cb[y][k];
            auto z = target.index_of(m, key);
            if (!z) throw Error(ErrorCode::Internal, "decomposition leaves the target basis");
            Rat v = wa[x] + wb[y];
            if (!out[*z] || *out[*z] < v) out[*z] = std::move(v);
        }
}

}  // namespace detail

/// Sum filtration on the total ring: w_m(alpha) = max over alpha = sum alpha_i of sum w^{(i)}_m(alpha_i).
inline Filtration sum_filtration(const FiltrationFamily& fam, BasisPtr total)
{
    fam.validate();
    const auto& first = fam.members.front().basis();
    if (total->summand() != kTotal || total->degrees() != first.degrees() || total->model_ptr() != first.model_ptr())
        throw Error(ErrorCode::GridMismatch, "total basis does not match the family grid");
    detail::Table t;
    for (auto m : fam.members.front().degrees()) {
        // Partial sums live on characters of m * (P_1 + ... + P_j); track them as explicit lists.
        std::vector<IntVec> cur_chars = fam.members[0].basis().int_chars(m);
        std::vector<Rat> cur_w = fam.members[0].weights(m);
        for (std::size_t i = 1; i < fam.members.size(); ++i) {
            const auto& cb = fam.members[i].basis().int_chars(m);
            const auto& wb = fam.members[i].weights(m);
            std::map<IntVec, Rat> acc;
            IntVec key;
            for (std::size_t x = 0; x < cur_chars.size(); ++x)
                for (std::size_t y = 0; y < cb.size(); ++y) {
                    key.resize(cb[y].size());
                    for (std::size_t k = 0; k < key.size(); ++k) key[k] = cur_chars[x][k] + cb[y][k];
                    Rat v = cur_w[x] + wb[y];
                    auto [it, inserted] = acc.try_emplace(key, v);
                    if (!inserted && it->second < v) it->second = std::move(v);
                }
            cur_chars.clear();
            cur_w.clear();
            for (auto& [c, w] : acc) {
                cur_chars.push_back(c);
                cur_w.push_back(std::move(w));
            }
        }
        std::vector<std::optional<Rat>> best(total->chars(m).size());
        for (std::size_t x = 0; x < cur_chars.size(); ++x) {
            auto z = total->index_of(m, cur_chars[x]);
            if (!z) throw Error(ErrorCode::Internal, "summand characters sum outside the total basis");
            best[*z] = cur_w[x];
        }
        auto& ws = t[m];
        for (std::size_t z = 0; z < best.size(); ++z) {
            if (!best[z])
                throw Error(ErrorCode::EmptyDecomposition,
                            str(total->chars(m)[z]) + " in degree " + std::to_string(m) + " has no decomposition");
            ws.push_back(*best[z]);
        }
    }
    std::optional<ValuationShift> cf;
    std::optional<Rat> lmax = Rat(0);
    bool common = true;
    for (const auto& f : fam.members) {
        if (!f.closed_form()) {
            common = false;
            lmax.reset();
            continue;
        }
        if (f.closed_form()->eta != fam.members.front().closed_form().value_or(ValuationShift{}).eta) common = false;
        if (lmax)
            lmax = *lmax + toric::t_invariant(f.basis().model(), f.basis().summand(), f.closed_form()->eta) +
                   f.closed_form()->shift;
    }
    if (common) {
        Rat c;
        for (const auto& f : fam.members) c += f.closed_form()->shift;
        cf = ValuationShift{fam.members.front().closed_form()->eta, c};
        lmax.reset();
    }
    return Filtration::Builder::make(std::move(total), Kind::Sum, cf, std::move(t), lmax);
}

/// Approximating filtration F_(m0): degree m0*s carries the best s-fold product of degree-m0 sections.
/// Degrees that are not multiples of m0 are left undefined.
inline Filtration approximate(const Filtration& f, long long m0)
{
    if (!f.has_degree(m0)) throw Error(ErrorCode::GridMismatch, "degree " + std::to_string(m0) + " not stored");
    const auto& b = f.basis();
    detail::Table t;
    t[m0] = f.weights(m0);
    const auto& c1 = b.int_chars(m0);
    const auto& w1 = f.weights(m0);
    for (long long s = 2; b.has_degree(m0 * s); ++s) {
        long long m = m0 * s, prev = m0 * (s - 1);
        std::vector<std::optional<Rat>> best(b.chars(m).size());
        detail::convolve(b.int_chars(prev), t[prev], c1, w1, b, m, best);
        auto& ws = t[m];
        for (std::size_t z = 0; z < best.size(); ++z) {
            if (!best[z])
                throw Error(ErrorCode::EmptyDecomposition, str(b.chars(m)[z]) + " is not a product of degree-" +
                                                               std::to_string(m0) + " characters");
            ws.push_back(*best[z]);
        }
    }
    return Filtration::Builder::make(f.basis_ptr(), Kind::Approximation, std::nullopt, std::move(t));
}

/// Shifted-trivial detection: w_m(alpha) = C*m everywhere.
inline std::optional<Rat> is_shifted_trivial(const Filtration& f)
{
    std::optional<Rat> c;
    for (auto m : f.degrees())
        for (const auto& w : f.weights(m)) {
            Rat slope = w / Rat(m);
            if (!c) c = slope;
            else if (*c != slope) return std::nullopt;
        }
    return c;
}

// ---------------------------------------------------------------------------
// Numerical invariants.

struct DegreeNumerics {
    long long m;
    Rat t_m;  // max weight / m
    Rat s_m;  // mean weight / m
};

struct Numerics {
    std::vector<DegreeNumerics> degrees;
    std::optional<Rat> lambda_max, s, j;  // certified limits when the descriptor allows
    /// |S_m - S| nonincreasing along the grid (certified S), or S_m monotone (otherwise).
    bool s_monotone = true;
    /// max over stored m of m * |S_m - S| and m * |T_m - lambda_max|.
    std::optional<Rat> s_rate, t_rate;
};

inline Numerics numerics(const Filtration& f)
{
    Numerics out;
    for (auto m : f.degrees()) {
        const auto& ws = f.weights(m);
        Rat mx = ws.front(), total;
        for (const auto& w : ws) {
            if (mx < w) mx = w;
            total += w;
        }
        out.degrees.push_back({m, mx / Rat(m), total / (Rat(m) * Rat(static_cast<long>(ws.size())))});
    }
    const auto& b = f.basis();
    if (f.closed_form()) {
        const auto& [eta, c] = *f.closed_form();
        out.lambda_max = toric::t_invariant(b.model(), b.summand(), eta) + c;
        out.s = toric::s_invariant(b.model(), b.summand(), eta) + c;
        out.j = *out.lambda_max - *out.s;
    } else if (f.certified_lambda_max()) {
        out.lambda_max = f.certified_lambda_max();
    }
    if (out.s) {
        Rat rate, prev_gap(-1);
        for (const auto& d : out.degrees) {
            Rat gap = abs(d.s_m - *out.s);
            rate = std::max(rate, Rat(d.m) * gap);
            if (prev_gap.sign() >= 0 && prev_gap < gap) out.s_monotone = false;
            prev_gap = gap;
        }
        out.s_rate = rate;
    } else {
        int dir = 0;
        for (std::size_t k = 1; k < out.degrees.size(); ++k) {
            int s = (out.degrees[k].s_m <=> out.degrees[k - 1].s_m) < 0 ? -1
                    : out.degrees[k].s_m == out.degrees[k - 1].s_m ? 0 : 1;
            if (s == 0) continue;
            if (dir == 0) dir = s;
            else if (s != dir) out.s_monotone = false;
        }
    }
    if (out.lambda_max) {
        Rat rate;
        for (const auto& d : out.degrees) rate = std::max(rate, Rat(d.m) * abs(d.t_m - *out.lambda_max));
        out.t_rate = rate;
    }
    return out;
}

}  // namespace cks::filt
