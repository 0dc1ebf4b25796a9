#pragma once

#include <vector>

#include "cks/rational.hpp"

namespace cks::optim {

enum class Relation { Le, Eq, Ge };
enum class Sense { Min, Max };
enum class LpStatus { Optimal, Infeasible, Unbounded };

inline const char* status_name(LpStatus s)
{
    switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    }
    return "?";
}

struct Constraint {
    RatVec coeffs;
    Relation rel;
    Rat rhs;
};

/// Variables are free unless flagged in `nonneg`.
struct LinearProgram {
    std::size_t num_vars = 0;
    RatVec objective;
    std::vector<Constraint> constraints;
    std::vector<bool> nonneg;

    explicit LinearProgram(std::size_t n = 0) : num_vars(n), objective(zeros(n)), nonneg(n, false) {}

    void add(RatVec coeffs, Relation rel, Rat rhs)
    {
        if (coeffs.size() != num_vars)
            throw Error(ErrorCode::DimensionMismatch, "constraint width does not match variable count");
        constraints.push_back({std::move(coeffs), rel, std::move(rhs)});
    }
};

struct LpResult {
    LpStatus status = LpStatus::Infeasible;
    Rat optimum;
    RatVec point;
};

namespace detail {

class Tableau {
public:
    std::vector<RatVec> rows;  // last entry of each row is the rhs
    std::vector<std::size_t> basis;
    std::vector<bool> allowed;
    std::size_t ncols = 0;

    enum class Outcome { Optimal, Unbounded };

    // Bland's rule: lowest-index entering column, lowest-index leaving basic variable on ties.
    Outcome run(const RatVec& cost)
    {
        while (true) {
            std::size_t enter = ncols;
            for (std::size_t j = 0; j < ncols; ++j) {
                if (!allowed[j] || is_basic(j)) continue;
                if (reduced_cost(cost, j).sign() < 0) {
                    enter = j;
                    break;
                }
            }
            if (enter == ncols) return Outcome::Optimal;
            std::size_t leave = rows.size();
            Rat best;
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (rows[i][enter].sign() <= 0) continue;
                Rat ratio = rows[i][ncols] / rows[i][enter];
                if (leave == rows.size() || ratio < best ||
                    (ratio == best && basis[i] < basis[leave])) {
                    leave = i;
                    best = ratio;
                }
            }
            if (leave == rows.size()) return Outcome::Unbounded;
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t c)
    {
        Rat inv = Rat(1) / rows[r][c];
        for (auto& x : rows[r]) x *= inv;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (i == r || rows[i][c].is_zero()) continue;
            Rat f = rows[i][c];
            for (std::size_t j = 0; j <= ncols; ++j)
                if (!rows[r][j].is_zero()) rows[i][j] -= f * rows[r][j];
        }
        basis[r] = c;
    }

    Rat objective_value(const RatVec& cost) const
    {
        Rat v;
        for (std::size_t i = 0; i < rows.size(); ++i) v += cost[basis[i]] * rows[i][ncols];
        return v;
    }

private:
    bool is_basic(std::size_t j) const
    {
        for (auto b : basis)
            if (b == j) return true;
        return false;
    }

    Rat reduced_cost(const RatVec& cost, std::size_t j) const
    {
        Rat r = cost[j];
        for (std::size_t i = 0; i < rows.size(); ++i)
            if (!rows[i][j].is_zero()) r -= cost[basis[i]] * rows[i][j];
        return r;
    }
};

}  // namespace detail

/// Exact two-phase primal simplex over the rationals.
inline LpResult lp_solve(const LinearProgram& lp, Sense sense)
{
    const std::size_t n = lp.num_vars;
    if (lp.objective.size() != n || lp.nonneg.size() != n)
        throw Error(ErrorCode::DimensionMismatch, "objective width does not match variable count");

    // Column layout: structural (split free vars into +/-), then slack/surplus, then artificials.
    std::vector<std::size_t> pos_col(n), neg_col(n, SIZE_MAX);
    std::size_t nstruct = 0;
    for (std::size_t j = 0; j < n; ++j) {
        pos_col[j] = nstruct++;
        if (!lp.nonneg[j]) neg_col[j] = nstruct++;
    }
    const std::size_t m = lp.constraints.size();
    std::size_t nslack = 0, nart = 0;
    std::vector<Relation> rel(m);
    std::vector<bool> flip(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        rel[i] = lp.constraints[i].rel;
        if (lp.constraints[i].rhs.sign() < 0) {
            flip[i] = true;
            if (rel[i] == Relation::Le) rel[i] = Relation::Ge;
            else if (rel[i] == Relation::Ge) rel[i] = Relation::Le;
        }
        if (rel[i] != Relation::Eq) ++nslack;
        if (rel[i] != Relation::Le) ++nart;
    }
    const std::size_t ncols = nstruct + nslack + nart;
    detail::Tableau t;
    t.ncols = ncols;
    t.allowed.assign(ncols, true);
    std::size_t s = nstruct, a = nstruct + nslack;
    for (std::size_t i = 0; i < m; ++i) {
        RatVec row = zeros(ncols + 1);
        const auto& c = lp.constraints[i];
        Rat sgn = flip[i] ? Rat(-1) : Rat(1);
        for (std::size_t j = 0; j < n; ++j) {
            if (c.coeffs[j].is_zero()) continue;
            row[pos_col[j]] = sgn * c.coeffs[j];
            if (neg_col[j] != SIZE_MAX) row[neg_col[j]] = -(sgn * c.coeffs[j]);
        }
        row[ncols] = sgn * c.rhs;
        std::size_t basic;
        if (rel[i] == Relation::Le) {
            row[s] = 1;
            basic = s++;
        } else if (rel[i] == Relation::Ge) {
            row[s++] = -1;
            row[a] = 1;
            basic = a++;
        } else {
            row[a] = 1;
            basic = a++;
        }
        t.rows.push_back(std::move(row));
        t.basis.push_back(basic);
    }

    const std::size_t first_art = nstruct + nslack;
    if (nart > 0) {
        RatVec phase1 = zeros(ncols);
        for (std::size_t j = first_art; j < ncols; ++j) phase1[j] = 1;
        t.run(phase1);
        if (t.objective_value(phase1).sign() > 0) return {LpStatus::Infeasible, Rat(0), {}};
        // Drive zero-level artificials out of the basis; drop rows that are redundant.
        for (std::size_t i = 0; i < t.rows.size();) {
            if (t.basis[i] < first_art) {
                ++i;
                continue;
            }
            std::size_t col = first_art;
            for (std::size_t j = 0; j < first_art; ++j)
                if (!t.rows[i][j].is_zero()) {
                    col = j;
                    break;
                }
            if (col < first_art) {
                t.pivot(i, col);
                ++i;
            } else {
                t.rows.erase(t.rows.begin() + static_cast<std::ptrdiff_t>(i));
                t.basis.erase(t.basis.begin() + static_cast<std::ptrdiff_t>(i));
            }
        }
        for (std::size_t j = first_art; j < ncols; ++j) t.allowed[j] = false;
    }

    RatVec cost = zeros(ncols);
    for (std::size_t j = 0; j < n; ++j) {
        Rat cj = sense == Sense::Min ? lp.objective[j] : -lp.objective[j];
        cost[pos_col[j]] = cj;
        if (neg_col[j] != SIZE_MAX) cost[neg_col[j]] = -cj;
    }
    if (t.run(cost) == detail::Tableau::Outcome::Unbounded) return {LpStatus::Unbounded, Rat(0), {}};

    RatVec colval = zeros(ncols);
    for (std::size_t i = 0; i < t.rows.size(); ++i) colval[t.basis[i]] = t.rows[i][ncols];
    RatVec x(n);
    for (std::size_t j = 0; j < n; ++j) {
        x[j] = colval[pos_col[j]];
        if (neg_col[j] != SIZE_MAX) x[j] -= colval[neg_col[j]];
    }
    Rat opt = dot(lp.objective, x);
    return {LpStatus::Optimal, opt, x};
}

}  // namespace cks::optim
