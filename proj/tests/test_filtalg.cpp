#include <catch_amalgamated.hpp>

#include "cks/filtalg.hpp"
#include "cks/io.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace cks;
using namespace cks::filt;
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

RatVec random_vec(std::mt19937_64& g, std::size_t p, long bound, long den)
{
    RatVec r(p);
    for (auto& x : r) x = oracle::random_rat(g, bound, den);
    return r;
}

// w_m(a) = min_j (<a, eta_j> + c_j m): concave and homogeneous, hence multiplicative.
WeightTable concave_table(const GradedBasis& b, std::mt19937_64& g)
{
    std::vector<std::pair<RatVec, Rat>> pieces;
    for (int j = 0; j < 3; ++j) pieces.push_back({random_vec(g, b.model().rank(), 3, 2), oracle::random_rat(g, 3, 3)});
    WeightTable t;
    for (auto m : b.degrees())
        for (const auto& a : b.chars(m)) {
            std::optional<Rat> w;
            for (const auto& [eta, c] : pieces) {
                Rat x = oracle::ip(a, eta) + c * Rat(m);
                if (!w || x < *w) w = x;
            }
            t[m][a] = *w;
        }
    return t;
}

// Sum filtration by enumerating every tuple of summand characters.
std::map<long long, std::map<RatVec, Rat>> sum_oracle(const FiltrationFamily& fam)
{
    std::map<long long, std::map<RatVec, Rat>> out;
    for (auto m : fam.members.front().degrees()) {
        std::vector<std::size_t> idx(fam.members.size(), 0);
        while (true) {
            RatVec a = zeros(fam.model().rank());
            Rat w;
            for (std::size_t i = 0; i < idx.size(); ++i) {
                const auto& chars = fam.members[i].basis().chars(m);
                for (std::size_t k = 0; k < a.size(); ++k) a[k] += chars[idx[i]][k];
                w += fam.members[i].weights(m)[idx[i]];
            }
            auto [it, inserted] = out[m].try_emplace(a, w);
            if (!inserted && it->second < w) it->second = w;
            std::size_t i = 0;
            while (i < idx.size() && ++idx[i] == fam.members[i].basis().chars(m).size()) idx[i++] = 0;
            if (i == idx.size()) break;
        }
    }
    return out;
}

void check_against_oracle(const Filtration& sum, const FiltrationFamily& fam)
{
    auto expect = sum_oracle(fam);
    for (auto m : sum.degrees()) {
        REQUIRE(expect[m].size() == sum.basis().chars(m).size());
        for (const auto& [a, w] : expect[m]) CHECK(sum.weight(m, a) == w);
    }
}

}  // namespace

TEST_CASE("constructing filtrations")
{
    auto p1 = fixture::load("p1_unit");
    auto b1 = make_basis(p1, 1, {1, 2, 3});
    auto triv = trivial(b1);
    for (auto m : triv.degrees())
        for (const auto& w : triv.weights(m)) CHECK(w == Rat(0));
    CHECK(triv.kind() == Kind::Trivial);

    auto val = toric_valuation(b1, v({1}));
    CHECK(val.weights(2) == std::vector<Rat>{Rat(0), Rat(1), Rat(2)});
    CHECK(val.weight(2, v({1})) == Rat(1));
    CHECK(code_of([&] { val.weight(2, v({5})); }) == ErrorCode::MissingCharacter);
    CHECK(code_of([&] { val.weights(7); }) == ErrorCode::GridMismatch);

    auto j = io::parse_text(R"({"kind": "table", "degrees": {"1": {"0": "inf", "1": "0"}}})");
    CHECK(code_of([&] { io::filtration_from(j, make_basis(p1, 1, {1})); }) == ErrorCode::UnboundedWeights);

    WeightTable missing{{1, {{v({0}), Rat(0)}}}};
    CHECK(code_of([&] { from_table(make_basis(p1, 1, {1}), missing); }) == ErrorCode::MissingCharacter);
    WeightTable stray{{1, {{v({0}), Rat(0)}, {v({1}), Rat(0)}, {v({4}), Rat(0)}}}};
    CHECK(code_of([&] { from_table(make_basis(p1, 1, {1}), stray); }) == ErrorCode::MissingCharacter);

    // w_2(2) < w_1(1) + w_1(1) is not multiplicative.
    WeightTable bad;
    bad[1] = {{v({0}), Rat(0)}, {v({1}), Rat(1)}};
    bad[2] = {{v({0}), Rat(0)}, {v({1}), Rat(1)}, {v({2}), Rat(1)}};
    CHECK(code_of([&] { from_table(make_basis(p1, 1, {1, 2}), bad); }) == ErrorCode::NotMultiplicative);

    auto half = fixture::load("p1_halves");
    CHECK(degree_grid(*half, {0, 1}, 7) == std::vector<long long>{2, 4, 6});
    CHECK(code_of([&] { degree_grid(*half, {0}, 1); }) == ErrorCode::GridMismatch);
    CHECK(code_of([&] { make_basis(half, 0, {3}); }) == ErrorCode::NonIntegralScaling);
}

TEST_CASE("shift, twist, rounding and base change")
{
    auto p1 = fixture::load("p1_unit");
    auto b = make_basis(p1, 1, {1, 2, 3});
    auto triv = trivial(b);
    auto lifted = shift(triv, Rat(1));
    for (const auto& w : lifted.weights(3)) CHECK(w == Rat(3));
    auto val = toric_valuation(b, v({1}));
    CHECK(shift(val, Rat(-1, 2)).weight(2, v({1})) == Rat(0));
    CHECK(shift(shift(val, Rat(1, 3)), Rat(1, 4)) == shift(val, Rat(7, 12)));

    auto tw = twist(triv, v({2}));
    CHECK(tw.weights(1) == std::vector<Rat>{Rat(0), Rat(2)});
    CHECK(twist(twist(val, v({3})), v({-3})) == val);
    CHECK(twist(shift(val, Rat(2)), v({5})) == shift(twist(val, v({5})), Rat(2)));
    CHECK(code_of([&] { twist(val, v({1, 1})); }) == ErrorCode::RankMismatch);

    WeightTable t;
    t[1] = {{v({0}), Rat(3, 2)}, {v({1}), Rat(2)}};
    auto rounded = round_z(from_table(make_basis(p1, 1, {1}), t));
    CHECK(rounded.weights(1) == std::vector<Rat>{Rat(1), Rat(2)});
    CHECK(round_z(rounded) == rounded);

    auto bc = base_change(toric_valuation(make_basis(p1, 1, {2}), v({1})), 2);
    CHECK(bc.weights(2) == std::vector<Rat>{Rat(0), Rat(2), Rat(4)});
    CHECK(code_of([&] { base_change(shift(val, Rat(1, 2)), 2); }) == ErrorCode::NotIntegerValued);
}

TEST_CASE("closed forms track the tables")
{
    std::mt19937_64 g(41);
    for (const auto& name : fixture::kAll) {
        auto m = fixture::load(name);
        auto bases = make_bases(m, 4 * m->step(0) * (m->summands() > 1 ? m->step(1) : 1));
        for (int s = 0; s < 10; ++s) {
            RatVec eta = random_vec(g, m->rank(), 3, 1), xi = random_vec(g, m->rank(), 3, 1);
            for (const auto& b : bases.summands) {
                auto f = shift(toric_valuation(b, eta), oracle::random_rat(g, 2, 3));
                auto tw = twist(f, xi);
                REQUIRE(tw.closed_form());
                auto rebuilt = shift(toric_valuation(b, tw.closed_form()->eta), tw.closed_form()->shift);
                CHECK(rebuilt == tw);
                Rat theta = toric::theta_twist(*m, b->summand(), eta, xi);
                CHECK(twist(toric_valuation(b, eta), xi) == shift(toric_valuation(b, eta + xi), -theta));
            }
        }
    }
}

TEST_CASE("rounding moves S_m by less than one over m")
{
    std::mt19937_64 g(42);
    auto m = fixture::load("bl1p2_halves");
    auto bases = make_bases(m, 6);
    for (int s = 0; s < 20; ++s) {
        auto f = from_table(bases.summands[0], concave_table(*bases.summands[0], g));
        RatVec xi = random_vec(g, 2, 2, 2);
        auto a = numerics(twist(round_z(f), xi)), b = numerics(twist(f, xi));
        for (std::size_t k = 0; k < a.degrees.size(); ++k)
            CHECK(abs(a.degrees[k].s_m - b.degrees[k].s_m) <= Rat(1) / Rat(a.degrees[k].m));
    }
}

TEST_CASE("base change scales invariants and commutes with twists")
{
    std::mt19937_64 g(43);
    auto m = fixture::load("p1p1_halves");
    auto bases = make_bases(m, 6);
    for (int s = 0; s < 10; ++s) {
        auto f = round_z(from_table(bases.summands[1], concave_table(*bases.summands[1], g)));
        RatVec xi = random_vec(g, 2, 3, 1);
        auto e = static_cast<long long>(2 + g() % 3);
        auto nf = numerics(f), nb = numerics(base_change(f, e));
        for (std::size_t k = 0; k < nf.degrees.size(); ++k) {
            CHECK(nb.degrees[k].s_m == Rat(e) * nf.degrees[k].s_m);
            CHECK(nb.degrees[k].t_m == Rat(e) * nf.degrees[k].t_m);
        }
        auto lhs = numerics(twist(base_change(f, e), Rat(e) * xi));
        auto rhs = numerics(base_change(round_z(twist(f, xi)), e));
        for (std::size_t k = 0; k < lhs.degrees.size(); ++k) {
            CHECK(lhs.degrees[k].s_m == rhs.degrees[k].s_m);
            CHECK(lhs.degrees[k].t_m == rhs.degrees[k].t_m);
        }
    }
}

TEST_CASE("sum filtrations")
{
    auto p1 = fixture::load("p1_halves");
    auto bases = make_bases(p1, 4);
    auto sum = sum_filtration(valuation_family(bases, v({1})), bases.total);
    CHECK(sum.weight(2, v({2})) == Rat(4));
    CHECK(sum == toric_valuation(bases.total, v({1})));
    REQUIRE(sum.closed_form());
    CHECK(sum.closed_form()->eta == v({1}));

    auto unit = fixture::load("p1_unit");
    auto ub = make_bases(unit, 3);
    auto us = sum_filtration(valuation_family(ub, v({1})), ub.total);
    CHECK(us.weight(1, v({1})) == Rat(2));
    CHECK(sum_filtration(trivial_family(ub), ub.total) == trivial(ub.total));

    FiltrationFamily shifted;
    shifted.members = {shift(trivial(ub.summands[0]), Rat(1, 2)), shift(trivial(ub.summands[1]), Rat(3, 4))};
    auto st = sum_filtration(shifted, ub.total);
    REQUIRE(is_shifted_trivial(st));
    CHECK(*is_shifted_trivial(st) == Rat(5, 4));
    CHECK(*is_shifted_trivial(shift(trivial(ub.total), Rat(5, 2))) == Rat(5, 2));
    CHECK_FALSE(is_shifted_trivial(toric_valuation(ub.summands[1], v({1}))));

    FiltrationFamily empty;
    CHECK(code_of([&] { sum_filtration(empty, ub.total); }) == ErrorCode::GridMismatch);
    CHECK(code_of([&] { sum_filtration(valuation_family(ub, v({1})), bases.total); }) == ErrorCode::GridMismatch);
}

TEST_CASE("sum filtrations match exhaustive decomposition and commute with operations")
{
    std::mt19937_64 g(44);
    for (const auto& name : fixture::kAll) {
        auto m = fixture::load(name);
        auto grid = degree_grid(*m, {0, 1}, m->rank() == 1 ? 12 : 4);
        BasisSet bases;
        for (std::size_t i = 0; i < m->summands(); ++i) bases.summands.push_back(make_basis(m, i, grid));
        bases.total = make_basis(m, toric::kTotal, grid);
        for (int s = 0; s < 4; ++s) {
            FiltrationFamily fam;
            for (const auto& b : bases.summands) fam.members.push_back(from_table(b, concave_table(*b, g)));
            auto sum = sum_filtration(fam, bases.total);
            check_against_oracle(sum, fam);
            for (auto deg : sum.degrees()) {
                Rat tsum;
                for (const auto& f : fam.members) {
                    const auto& ws = f.weights(deg);
                    tsum += *std::max_element(ws.begin(), ws.end());
                }
                const auto& ws = sum.weights(deg);
                CHECK(*std::max_element(ws.begin(), ws.end()) == tsum);
            }
            RatVec xi = random_vec(g, m->rank(), 3, 2);
            CHECK(sum_filtration(twist_family(fam, xi), bases.total) == twist(sum, xi));
            FiltrationFamily sh;
            Rat total;
            for (const auto& f : fam.members) {
                Rat c = oracle::random_rat(g, 3, 4);
                total += c;
                sh.members.push_back(shift(f, c));
            }
            CHECK(sum_filtration(sh, bases.total) == shift(sum, total));
            FiltrationFamily ap;
            for (const auto& f : fam.members) ap.members.push_back(approximate(f, grid.front()));
            CHECK(sum_filtration(ap, bases.total) == approximate(sum, grid.front()));
            FiltrationFamily rounded, rb;
            for (const auto& f : fam.members) {
                rounded.members.push_back(round_z(f));
                rb.members.push_back(base_change(round_z(f), 3));
            }
            CHECK(sum_filtration(rb, bases.total) == base_change(sum_filtration(rounded, bases.total), 3));
        }
        RatVec eta = random_vec(g, m->rank(), 3, 1);
        auto vs = sum_filtration(valuation_family(bases, eta), bases.total);
        check_against_oracle(vs, valuation_family(bases, eta));
        CHECK(vs == toric_valuation(bases.total, eta));
    }
}

TEST_CASE("approximating filtrations")
{
    std::mt19937_64 g(45);
    auto m = fixture::load("bl1p2_halves");
    auto bases = make_bases(m, 8);
    const auto& b = bases.summands[0];
    auto f = from_table(b, concave_table(*b, g));
    auto ap = approximate(f, 2);
    CHECK(ap.weights(2) == f.weights(2));
    CHECK(ap.degrees() == std::vector<long long>{2, 4, 6, 8});
    for (auto deg : ap.degrees())
        for (std::size_t z = 0; z < ap.weights(deg).size(); ++z) CHECK(ap.weights(deg)[z] <= f.weights(deg)[z]);
    auto ap4 = approximate(f, 4);
    CHECK(ap4.degrees() == std::vector<long long>{4, 8});
    CHECK(approximate(trivial(b), 2) == trivial(b));
    auto val = toric_valuation(b, v({2, -1}));
    CHECK(approximate(val, 2) == val);
    CHECK(code_of([&] { approximate(f, 3); }) == ErrorCode::GridMismatch);
}

TEST_CASE("numerical invariants")
{
    auto unit = fixture::load("p1_unit");
    auto b = make_basis(unit, 1, {1, 2, 3, 4, 5});
    auto n = numerics(toric_valuation(b, v({1})));
    for (const auto& d : n.degrees) {
        CHECK(d.s_m == Rat(1, 2));
        CHECK(d.t_m == Rat(1));
    }
    CHECK(*n.s == Rat(1, 2));
    CHECK(*n.lambda_max == Rat(1));
    CHECK(*n.j == Rat(1, 2));
    auto nt = numerics(trivial(b));
    CHECK(*nt.j == Rat(0));
    for (const auto& d : nt.degrees) CHECK((d.s_m == Rat(0) && d.t_m == Rat(0)));

    for (const auto& name : fixture::kAll) {
        auto m = fixture::load(name);
        if (m->rank() != 2) continue;
        auto grid = degree_grid(*m, {toric::kTotal}, 12);
        auto tb = make_basis(m, toric::kTotal, grid);
        for (const auto& xi : {v({1, 0}), v({1, 1}), v({-2, 1})}) {
            auto nx = numerics(twist(trivial(tb), xi));
            CHECK(*nx.lambda_max == geom::support_max(m->anticanonical(), xi));
            CHECK(*nx.s == dot(m->barycenter(toric::kTotal), xi));
            for (const auto& d : nx.degrees) CHECK(d.t_m == *nx.lambda_max);
            // |S_m - S| <= c/m with c the width of P along xi.
            Rat c = geom::support_max(m->anticanonical(), xi) - geom::support_min(m->anticanonical(), xi);
            for (const auto& d : nx.degrees) CHECK(abs(d.s_m - *nx.s) <= c / Rat(d.m));
        }
    }
}
