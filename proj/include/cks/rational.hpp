#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <type_traits>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "cks/error.hpp"

namespace cks {

/// Exact rational number, always kept in lowest terms with a positive denominator.
class Rat {
    static_assert(sizeof(long) == sizeof(long long), "LP64 assumed");

public:
    Rat() = default;
    Rat(int v) : v_(v) {}
    Rat(long v) : v_(v) {}
    Rat(long long v) : v_(static_cast<long>(v)) {}
    Rat(const mpz_class& v) : v_(v) {}
    Rat(const mpq_class& v) : v_(v) { v_.canonicalize(); }
    Rat(long long num, long long den)
    {
        if (den == 0) throw Error(ErrorCode::ParseError, "zero denominator");
        v_ = mpq_class(mpz_class(static_cast<long>(num)), mpz_class(static_cast<long>(den)));
        v_.canonicalize();
    }

    /// Parses "p/q", "-p/q" or "n". Non-reduced input is reduced.
    static Rat parse(std::string_view text)
    {
        std::string s(text);
        auto bad = [&] { return Error(ErrorCode::ParseError, "not a rational: '" + s + "'"); };
        if (s.empty()) throw bad();
        auto slash = s.find('/');
        auto valid_int = [](const std::string& t) {
            std::size_t i = (!t.empty() && (t[0] == '-' || t[0] == '+')) ? 1 : 0;
            if (i >= t.size()) return false;
            for (; i < t.size(); ++i)
                if (t[i] < '0' || t[i] > '9') return false;
            return true;
        };
        std::string num = s.substr(0, slash);
        std::string den = slash == std::string::npos ? "1" : s.substr(slash + 1);
        if (!valid_int(num) || !valid_int(den) || den[0] == '-' || den[0] == '+') throw bad();
        if (num[0] == '+') num.erase(0, 1);
        mpz_class n(num), d(den);
        if (d == 0) throw bad();
        Rat r;
        r.v_ = mpq_class(n, d);
        r.v_.canonicalize();
        return r;
    }

    mpz_class num() const { return v_.get_num(); }
    mpz_class den() const { return v_.get_den(); }
    const mpq_class& raw() const { return v_; }

    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }
    bool is_zero() const { return sgn(v_) == 0; }

    mpz_class floor() const
    {
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
        return q;
    }
    mpz_class ceil() const
    {
        mpz_class q;
        mpz_cdiv_q(q.get_mpz_t(), v_.get_num_mpz_t(), v_.get_den_mpz_t());
        return q;
    }

    long long to_ll() const
    {
        if (!is_integer() || !v_.get_num().fits_slong_p())
            throw Error(ErrorCode::Internal, "rational " + str() + " is not a machine integer");
        return v_.get_num().get_si();
    }

    /// "p/q" or "n".
    std::string str() const
    {
        if (is_integer()) return v_.get_num().get_str();
        return v_.get_num().get_str() + "/" + v_.get_den().get_str();
    }

    Rat operator-() const { return Rat(mpq_class(-v_)); }
    Rat& operator+=(const Rat& o) { v_ += o.v_; return *this; }
    Rat& operator-=(const Rat& o) { v_ -= o.v_; return *this; }
    Rat& operator*=(const Rat& o) { v_ *= o.v_; return *this; }
    Rat& operator/=(const Rat& o)
    {
        if (o.is_zero()) throw Error(ErrorCode::Internal, "division by zero");
        v_ /= o.v_;
        return *this;
    }
    friend Rat operator+(Rat a, const Rat& b) { return a += b; }
    friend Rat operator-(Rat a, const Rat& b) { return a -= b; }
    friend Rat operator*(Rat a, const Rat& b) { return a *= b; }
    friend Rat operator/(Rat a, const Rat& b) { return a /= b; }

    friend bool operator==(const Rat& a, const Rat& b) { return a.v_ == b.v_; }
    friend std::strong_ordering operator<=>(const Rat& a, const Rat& b)
    {
        int c = cmp(a.v_, b.v_);
        return c < 0 ? std::strong_ordering::less
                     : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
    }

    friend std::ostream& operator<<(std::ostream& os, const Rat& r) { return os << r.str(); }

private:
    mpq_class v_{0};
};

inline Rat abs(const Rat& r) { return r.sign() < 0 ? -r : r; }

using RatVec = std::vector<Rat>;

inline RatVec zeros(std::size_t n) { return RatVec(n, Rat(0)); }

inline void require_same_rank(const RatVec& a, const RatVec& b, const char* what)
{
    if (a.size() != b.size())
        throw Error(ErrorCode::DimensionMismatch,
                    std::string(what) + ": rank " + std::to_string(a.size()) + " vs " +
                        std::to_string(b.size()));
}

inline Rat dot(const RatVec& a, const RatVec& b)
{
    require_same_rank(a, b, "dot");
    Rat s;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline RatVec operator+(const RatVec& a, const RatVec& b)
{
    require_same_rank(a, b, "vector sum");
    RatVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + b[i];
    return r;
}

inline RatVec operator-(const RatVec& a, const RatVec& b)
{
    require_same_rank(a, b, "vector difference");
    RatVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] - b[i];
    return r;
}

inline RatVec operator-(const RatVec& a)
{
    RatVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = -a[i];
    return r;
}

inline RatVec operator*(const Rat& s, const RatVec& a)
{
    RatVec r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = s * a[i];
    return r;
}

inline bool is_zero(const RatVec& a)
{
    for (const auto& x : a)
        if (!x.is_zero()) return false;
    return true;
}

inline bool is_integral(const RatVec& a)
{
    for (const auto& x : a)
        if (!x.is_integer()) return false;
    return true;
}

inline Rat norm2(const RatVec& a) { return dot(a, a); }

/// Scales a nonzero rational vector to the primitive integer vector on the same ray.
inline RatVec primitive(const RatVec& a)
{
    mpz_class l = 1;
    for (const auto& x : a) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), x.den().get_mpz_t());
    mpz_class g = 0;
    std::vector<mpz_class> ints;
    ints.reserve(a.size());
    for (const auto& x : a) {
        mpz_class v = x.num() * (l / x.den());
        ints.push_back(v);
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    }
    if (g == 0) throw Error(ErrorCode::Internal, "primitive() of zero vector");
    RatVec r;
    r.reserve(a.size());
    for (auto& v : ints) r.emplace_back(mpz_class(v / g));
    return r;
}

inline bool is_primitive_integer(const RatVec& a)
{
    if (!is_integral(a) || is_zero(a)) return false;
    mpz_class g = 0;
    for (const auto& x : a) {
        mpz_class v = x.num();
        mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
    }
    return g == 1;
}

inline std::string str(const RatVec& v)
{
    std::string s = "(";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ",";
        s += v[i].str();
    }
    return s + ")";
}

inline RatVec to_ratvec(const std::vector<long long>& v)
{
    RatVec r;
    r.reserve(v.size());
    for (auto x : v) r.emplace_back(x);
    return r;
}

}  // namespace cks

template <>
struct std::hash<cks::Rat> {
    std::size_t operator()(const cks::Rat& r) const noexcept
    {
        return std::hash<std::string>{}(r.str());
    }
};
