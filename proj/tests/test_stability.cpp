#include <catch_amalgamated.hpp>

#include "cks/stability.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace cks;
using namespace cks::stab;
using oracle::v;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("no error thrown");
    return ErrorCode::Internal;
}

const RatVec kB{Rat(1, 12), Rat(1, 12)};

// inf over eta outside span(v) of sup over t of A/sum S at eta + t v, scanning a rational grid of t.
Rat reduced_delta_scan(const oracle::ToricData& d, const RatVec& dir)
{
    RatVec w = dir[0].is_zero() ? v({1, 0}) : v({0, 1});
    std::optional<Rat> inf;
    for (int side : {1, -1}) {
        auto ratio = [&](const RatVec& z) { return d.A(z) / d.S_sum(z); };
        Rat sup = std::max(ratio(dir), ratio(-dir));
        for (long num = -480; num <= 480; ++num) {
            RatVec z = Rat(side) * w + Rat(num, 24) * dir;
            sup = std::max(sup, ratio(z));
        }
        if (!inf || sup < *inf) inf = sup;
    }
    return *inf;
}

}  // namespace

TEST_CASE("coupled Futaki character")
{
    for (const auto* name : {"p1_halves", "p1_unit", "p1_thirds"}) {
        auto c = coupled_futaki(*fixture::load(name));
        CHECK(c.total == v({0}));
        CHECK(c.vanishes);
    }
    auto bl = coupled_futaki(*fixture::load("bl1p2_halves"));
    CHECK(bl.total == kB);
    CHECK_FALSE(bl.vanishes);
    auto trap = coupled_futaki(*fixture::load("bl1p2_h_trapezoid"));
    CHECK(trap.total == (RatVec{Rat(1, 9), Rat(1, 9)}));
    CHECK_FALSE(trap.vanishes);
    for (const auto& name : fixture::kAll)
        CHECK(coupled_futaki(*fixture::load(name)).total == fixture::toric_data(name).b_cp());
}

TEST_CASE("J-norms of twists")
{
    auto p1 = fixture::load("p1_halves");
    CHECK(j_twist(*p1, 0, v({1})) == Rat(1, 2));
    CHECK(j_twist(*p1, 0, v({0})) == Rat(0));
    CHECK(j_twist(*p1, kTotal, v({3})) == Rat(3));
    CHECK(code_of([&] { j_twist(*p1, 0, v({1, 1})); }) == ErrorCode::RankMismatch);

    auto tb = filt::make_basis(p1, kTotal, {1, 2, 4, 8});
    auto n = filt::numerics(filt::twist(filt::trivial(tb), v({3})));
    CHECK(*n.j == Rat(3));
    for (const auto& d : n.degrees) CHECK(d.t_m - d.s_m == Rat(3));

    auto full = reduced_coupled_j(*p1, v({1}), full_lattice(1));
    CHECK(full.value == Rat(0));
    CHECK(full.argmin == v({-1}));
    auto none = reduced_coupled_j(*p1, v({1}), {});
    CHECK(none.value == Rat(1));

    std::mt19937_64 g(51);
    for (const auto& name : fixture::kAll) {
        auto m = fixture::load(name);
        RatVec xi0(m->rank());
        for (auto& x : xi0) x = oracle::random_rat(g, 3, 2);
        auto r = reduced_coupled_j(*m, xi0, full_lattice(m->rank()));
        CHECK(r.value == Rat(0));
        auto bases = filt::make_bases(m, 4 * m->step(0) * (m->summands() > 1 ? m->step(1) : 1));
        CHECK(reduced_coupled_j(filt::valuation_family(bases, xi0), {}).value ==
              reduced_coupled_j(*m, xi0, {}).value);
    }
}

TEST_CASE("lc slopes")
{
    auto p1 = fixture::load("p1_halves");
    auto tb = filt::make_basis(p1, kTotal, {1, 2, 3, 4});
    auto val = filt::toric_valuation(tb, v({1}));
    auto one = mu_slope(val, Rat(1));
    CHECK(*one.value == Rat(1));
    CHECK(one.provenance == Provenance::ClosedForm);
    CHECK(*mu_slope(val, Rat(2)).value == Rat(1, 2));
    CHECK(*mu_slope(filt::shift(val, Rat(1, 3)), Rat(1)).value == Rat(4, 3));
    CHECK(code_of([&] { mu_slope(val, Rat(0)); }) == ErrorCode::DegenerateInput);
    auto sb = filt::make_basis(p1, 0, {2});
    CHECK(code_of([&] { mu_slope(filt::trivial(sb), Rat(1)); }) == ErrorCode::UnsupportedDescriptor);

    // A table reproducing wt_1 shifted by 1/3 certifies the closed-form value as its lower end.
    filt::WeightTable t;
    for (auto m : tb->degrees())
        for (const auto& a : tb->chars(m)) t[m][a] = a[0] + Rat(m) + Rat(m) / Rat(3);
    auto table = mu_slope(filt::from_table(tb, t), Rat(1));
    CHECK_FALSE(table.value);
    CHECK(table.provenance == Provenance::Estimate);
    CHECK(table.lo == Rat(4, 3));
    CHECK(table.lo <= table.hi);

    // Shift covariance of the certified lower end on tables.
    filt::WeightTable t2;
    for (auto m : tb->degrees())
        for (const auto& a : tb->chars(m)) t2[m][a] = a[0] + Rat(m) + Rat(m) * Rat(7, 4);
    CHECK(mu_slope(filt::from_table(tb, t2), Rat(1)).lo == table.lo + Rat(7, 4) - Rat(1, 3));
}

TEST_CASE("coupled Ding invariants")
{
    auto p1 = fixture::load("p1_halves");
    auto pb = filt::make_bases(p1, 4);
    auto fam = filt::valuation_family(pb, v({1}));
    CHECK(coupled_ding(fam).value == Rat(0));
    CHECK(coupled_ding(fam, Rat(2)).value == Rat(-1, 2));

    auto bl = fixture::load("bl1p2_halves");
    auto bb = filt::make_bases(bl, 4);
    auto r = coupled_ding(filt::valuation_family(bb, v({1, 1})));
    CHECK(r.value == Rat(-1, 6));
    CHECK(r.mu == Rat(1));
    CHECK(r.s_sum == Rat(7, 6));

    CHECK(ding_of_twist(filt::trivial_family(pb), v({5})).direct == Rat(0));
    auto tw = ding_of_twist(filt::trivial_family(bb), v({1, 1}));
    CHECK(tw.direct == Rat(-1, 6));
    CHECK(tw.agree);

    std::vector<filt::ValuationShift> mixed{{v({1, 0}), Rat(0)}, {v({0, 1}), Rat(0)}};
    CHECK(code_of([&] { coupled_ding(*bl, mixed); }) == ErrorCode::UnsupportedDescriptor);

    std::mt19937_64 g(52);
    for (const auto& name : fixture::kAll) {
        auto m = fixture::load(name);
        auto d = fixture::toric_data(name);
        for (int s = 0; s < 50; ++s) {
            RatVec eta(m->rank()), xi(m->rank());
            for (auto& x : eta) x = oracle::random_rat(g, 3, 2);
            for (auto& x : xi) x = oracle::random_rat(g, 3, 2);
            std::vector<filt::ValuationShift> members;
            for (std::size_t i = 0; i < m->summands(); ++i) members.push_back({eta, oracle::random_rat(g, 2, 3)});
            CHECK(coupled_ding(*m, members).value == d.A(eta) - d.S_sum(eta));
            auto t = ding_of_twist(*m, members, xi);
            CHECK(t.agree);
            CHECK(t.direct == d.A(eta) - d.S_sum(eta) - oracle::ip(d.b_cp(), xi));
        }
    }
}

TEST_CASE("coupled delta and verdicts")
{
    for (const auto* name : {"p1_halves", "p1_unit", "p1_thirds"}) {
        auto r = coupled_delta(*fixture::load(name));
        CHECK(r.value == Rat(1));
        CHECK(r.optimal_rays.size() == 2);
    }
    CHECK(coupled_delta(*fixture::load("p2")).value == Rat(1));
    CHECK(coupled_delta(*fixture::load("p2_halves")).value == Rat(1));
    auto bl = coupled_delta(*fixture::load("bl1p2_halves"));
    CHECK(bl.value == Rat(6, 7));
    CHECK(bl.witness == v({1, 1}));
    CHECK(std::find(bl.assumptions.begin(), bl.assumptions.end(), std::string(kToricSearchAssumption)) !=
          bl.assumptions.end());

    auto p2 = semistable_verdict(*fixture::load("p2"));
    CHECK(p2.semistable);
    CHECK(p2.futaki.vanishes);
    CHECK(p2.dichotomy_holds);
    auto blv = semistable_verdict(*fixture::load("bl1p2_halves"));
    CHECK_FALSE(blv.semistable);
    CHECK(blv.delta == Rat(6, 7));
    CHECK(blv.futaki.total == kB);
    CHECK(blv.dichotomy_holds);
    auto pp = semistable_verdict(*fixture::load("p1p1_halves"));
    CHECK(pp.semistable);
    CHECK(pp.delta == Rat(1));

    for (const auto& name : fixture::kAll) {
        auto m = fixture::load(name);
        auto d = fixture::toric_data(name);
        std::optional<Rat> best;
        for (const auto& dir : oracle::primitive_directions(m->rank(), 4)) {
            Rat q = d.A(dir) / d.S_sum(dir);
            if (!best || q < *best) best = q;
        }
        CHECK(coupled_delta(*m).value == *best);
        CHECK(semistable_verdict(*m).dichotomy_holds);
    }
}

TEST_CASE("destabilizing families")
{
    auto bl = fixture::load("bl1p2_halves");
    auto d = find_destabilizer(bl, 4);
    REQUIRE(d);
    CHECK(d->eta == v({1, 1}));
    CHECK(d->ding == Rat(-1, 6));
    CHECK(d->family.members.size() == 2);
    CHECK_FALSE(find_destabilizer(fixture::load("p2"), 4));
    for (const auto& name : fixture::kAll) {
        auto m = fixture::load(name);
        if (coupled_futaki(*m).vanishes) CHECK_FALSE(find_destabilizer(m, 4));
    }
    auto trap = find_destabilizer(fixture::load("bl1p2_h_trapezoid"), 4);
    REQUIRE(trap);
    CHECK(trap->ding.sign() < 0);
}

TEST_CASE("reduced delta")
{
    for (const auto& name : fixture::kAll) {
        auto m = fixture::load(name);
        auto full = reduced_coupled_delta(*m, full_lattice(m->rank()));
        CHECK(full.infinite);
        CHECK_FALSE(full.value);
        auto none = reduced_coupled_delta(*m, {});
        CHECK(*none.value == coupled_delta(*m).value);
    }
    auto pp = fixture::load("p1p1_halves");
    CHECK(*reduced_coupled_delta(*pp, {v({1, 0})}).value == Rat(1));

    auto bl = fixture::load("bl1p2_halves");
    auto diag = reduced_coupled_delta(*bl, {v({1, 1})});
    CHECK(*diag.value == Rat(6, 5));
    CHECK_FALSE(diag.attained);
    auto axis = reduced_coupled_delta(*bl, {v({1, 0})});
    CHECK(*axis.value == Rat(24, 23));
    CHECK(axis.lower_bound == Rat(6, 7));

    auto bd = fixture::toric_data("bl1p2_halves");
    for (const auto& dir : {v({1, 1}), v({1, 0}), v({0, 1}), v({1, -1}), v({2, 1})}) {
        auto r = reduced_coupled_delta(*bl, {dir});
        CHECK(*r.value == reduced_delta_scan(bd, dir));
        CHECK(*r.value >= r.lower_bound);
    }
    auto td = fixture::toric_data("bl1p2_h_trapezoid");
    auto tm = fixture::load("bl1p2_h_trapezoid");
    for (const auto& dir : {v({1, 1}), v({1, 0}), v({1, -1})})
        CHECK(*reduced_coupled_delta(*tm, {dir}).value == reduced_delta_scan(td, dir));

    CHECK(code_of([&] { reduced_coupled_delta(*bl, {v({2, 0})}); }) == ErrorCode::DegenerateSubtorus);
    CHECK(code_of([&] { reduced_coupled_delta(*bl, {v({1, 0}), v({2, 0})}); }) == ErrorCode::DegenerateSubtorus);
    CHECK(code_of([&] { reduced_coupled_delta(*bl, {RatVec{Rat(1, 2), Rat(0)}}); }) == ErrorCode::DegenerateSubtorus);
}

TEST_CASE("reduced delta in rank three reports bounds only")
{
    auto cube = std::make_shared<const toric::ToricFanoModel>(toric::build_model(
        {v({1, 0, 0}), v({-1, 0, 0}), v({0, 1, 0}), v({0, -1, 0}), v({0, 0, 1}), v({0, 0, -1})},
        {geom::from_vertices({v({-1, -1, -1}), v({1, -1, -1}), v({-1, 1, -1}), v({-1, -1, 1}), v({1, 1, -1}),
                              v({1, -1, 1}), v({-1, 1, 1}), v({1, 1, 1})})}));
    auto r = reduced_coupled_delta(*cube, {v({1, 0, 0})});
    CHECK_FALSE(r.exact);
    CHECK(r.lower_bound == Rat(1));
    CHECK(code_of([&] { reduced_coupled_delta(*cube, {v({1, 0, 0})}, true); }) == ErrorCode::RankTooHigh);
}

TEST_CASE("identity suite")
{
    for (const auto& name : fixture::kAll) {
        auto rep = identity_suite(fixture::load(name), {20, 7, 6, 10});
        INFO(name);
        for (const auto& id : rep.identities) {
            INFO(id.name << ": " << id.first_failure);
            CHECK(id.failures == 0);
        }
        CHECK(rep.ok());
    }
    auto p1 = identity_suite(fixture::load("p1_halves"), {100, 0, 6, 100});
    CHECK(p1.ok());
    auto bl = identity_suite(fixture::load("bl1p2_halves"), {5, 0, 4, 5});
    auto skipped = std::find_if(bl.identities.begin(), bl.identities.end(),
                                [](const auto& i) { return i.name == "limit_ratio_one"; });
    REQUIRE(skipped != bl.identities.end());
    CHECK(skipped->skipped);

    auto m = fixture::load("bl1p2_halves");
    auto broken = m->barycenters();
    broken[0][0] += Rat(1, 5);
    auto corrupt = std::make_shared<const toric::ToricFanoModel>(m->with_barycenter_cache(broken));
    auto rep = identity_suite(corrupt, {5, 0, 4, 5});
    CHECK_FALSE(rep.ok());
    auto split = std::find_if(rep.identities.begin(), rep.identities.end(),
                              [](const auto& i) { return i.name == "barycenter_split_invariance"; });
    REQUIRE(split != rep.identities.end());
    CHECK(split->failures == split->checks);

    auto a = identity_suite(m, {10, 3, 4, 5}), b = identity_suite(m, {10, 3, 4, 5});
    REQUIRE(a.identities.size() == b.identities.size());
    for (std::size_t i = 0; i < a.identities.size(); ++i) CHECK(a.identities[i].checks == b.identities[i].checks);
    CHECK(code_of([&] { identity_suite(m, {0, 0, 4, 5}); }) == ErrorCode::DegenerateInput);
}

TEST_CASE("ratio trend along twists")
{
    auto bl = fixture::load("bl1p2_halves");
    auto along = limit_trend(*bl, v({0, 0}), v({1, 1}), {1, 16});
    CHECK(along.ratios[1].second == Rat(6, 7));
    auto t = limit_trend(*bl, v({1, 0}), v({1, 1}), {1, 2, 4, 8, 16, 32});
    CHECK(t.limit == Rat(6, 7));
    CHECK(t.monotone);
    CHECK(t.within_bound);
    // Direct closed form 12(1+e)/(13+14e) of the ratio on this line.
    for (const auto& [e, r] : t.ratios) CHECK(r == Rat(12 * (1 + e), 13 + 14 * e));

    auto p2 = fixture::load("p2");
    auto u = limit_trend(*p2, v({1, 0}), v({-1, 2}), {1, 2, 4, 8, 16});
    CHECK(u.limit == Rat(1));
    for (const auto& [e, r] : u.ratios) CHECK(r == Rat(1));
}
