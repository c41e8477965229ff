#pragma once

#include "modpoly/field.hpp"

#include <algorithm>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace modpoly {

inline constexpr std::size_t karatsuba_threshold = 32;

template <class F>
class Poly {
public:
    using elem = typename F::elem;

    explicit Poly(const F& f) : f_(f) {}
    Poly(const F& f, std::vector<elem> c) : f_(f), c_(std::move(c)) { trim(); }

    static Poly constant(const F& f, const elem& a) { return Poly(f, {a}); }
    static Poly x(const F& f) { return Poly(f, {f.zero(), f.one()}); }
    static Poly monomial(const F& f, std::size_t n) {
        std::vector<elem> c(n + 1, f.zero());
        c[n] = f.one();
        return Poly(f, std::move(c));
    }
    // X - a
    static Poly linear(const F& f, const elem& a) { return Poly(f, {f.neg(a), f.one()}); }

    const F& field() const { return f_; }
    const std::vector<elem>& coeffs() const { return c_; }
    std::vector<elem>& coeffs_mut() { return c_; }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    elem coeff(std::size_t i) const { return i < c_.size() ? c_[i] : f_.zero(); }
    elem lead() const { return c_.empty() ? f_.zero() : c_.back(); }
    bool is_monic() const { return !c_.empty() && f_.eq(c_.back(), f_.one()); }

    void trim() {
        while (!c_.empty() && f_.is_zero(c_.back())) c_.pop_back();
    }

    elem eval(const elem& x) const {
        elem r = f_.zero();
        for (std::size_t i = c_.size(); i-- > 0;) r = f_.add(f_.mul(r, x), c_[i]);
        return r;
    }

    bool operator==(const Poly& o) const {
        if (!f_.same(o.f_) || c_.size() != o.c_.size()) return false;
        for (std::size_t i = 0; i < c_.size(); ++i)
            if (!f_.eq(c_[i], o.c_[i])) return false;
        return true;
    }
    bool operator!=(const Poly& o) const { return !(*this == o); }

private:
    F f_;
    std::vector<elem> c_;
};

namespace detail {

template <class F>
void check_same(const Poly<F>& a, const Poly<F>& b) {
    if (!a.field().same(b.field())) throw modulus_mismatch();
}

template <class F>
using Vec = std::vector<typename F::elem>;

template <class F>
void add_into(const F& f, Vec<F>& r, std::size_t off, const typename F::elem* a, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) r[off + i] = f.add(r[off + i], a[i]);
}

template <class F>
void schoolbook(const F& f, const typename F::elem* a, std::size_t na, const typename F::elem* b,
                std::size_t nb, typename F::elem* r) {
    if constexpr (std::is_same_v<F, FpBig>) {
        for (std::size_t k = 0; k + 1 < na + nb; ++k) {
            mpz_class acc = 0;
            std::size_t lo = k >= nb ? k - nb + 1 : 0;
            std::size_t hi = std::min(k, na - 1);
            for (std::size_t i = lo; i <= hi; ++i)
                mpz_addmul(acc.get_mpz_t(), a[i].get_mpz_t(), b[k - i].get_mpz_t());
            r[k] = f.add(r[k], f.from_mpz(acc));
        }
    } else {
        for (std::size_t i = 0; i < na; ++i) {
            if (f.is_zero(a[i])) continue;
            for (std::size_t j = 0; j < nb; ++j) r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
        }
    }
}

// r += a*b, with na == nb == n
template <class F>
void karatsuba(const F& f, const typename F::elem* a, const typename F::elem* b, std::size_t n,
               typename F::elem* r) {
    using E = typename F::elem;
    if (n < karatsuba_threshold) {
        schoolbook(f, a, n, b, n, r);
        return;
    }
    std::size_t h = n / 2, u = n - h;
    std::vector<E> low(2 * h - 1, f.zero()), high(2 * u - 1, f.zero()), mid(2 * u - 1, f.zero());
    karatsuba(f, a, b, h, low.data());
    karatsuba(f, a + h, b + h, u, high.data());
    std::vector<E> sa(u), sb(u);
    for (std::size_t i = 0; i < u; ++i) {
        sa[i] = i < h ? f.add(a[i], a[h + i]) : a[h + i];
        sb[i] = i < h ? f.add(b[i], b[h + i]) : b[h + i];
    }
    karatsuba(f, sa.data(), sb.data(), u, mid.data());
    for (std::size_t i = 0; i < low.size(); ++i) mid[i] = f.sub(mid[i], low[i]);
    for (std::size_t i = 0; i < high.size(); ++i) mid[i] = f.sub(mid[i], high[i]);
    for (std::size_t i = 0; i < low.size(); ++i) r[i] = f.add(r[i], low[i]);
    for (std::size_t i = 0; i < mid.size(); ++i) r[h + i] = f.add(r[h + i], mid[i]);
    for (std::size_t i = 0; i < high.size(); ++i) r[2 * h + i] = f.add(r[2 * h + i], high[i]);
}

}  // namespace detail

template <class F>
Poly<F> operator+(const Poly<F>& a, const Poly<F>& b) {
    detail::check_same(a, b);
    const F& f = a.field();
    std::vector<typename F::elem> c(std::max(a.coeffs().size(), b.coeffs().size()), f.zero());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = f.add(a.coeff(i), b.coeff(i));
    return Poly<F>(f, std::move(c));
}

template <class F>
Poly<F> operator-(const Poly<F>& a, const Poly<F>& b) {
    detail::check_same(a, b);
    const F& f = a.field();
    std::vector<typename F::elem> c(std::max(a.coeffs().size(), b.coeffs().size()), f.zero());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = f.sub(a.coeff(i), b.coeff(i));
    return Poly<F>(f, std::move(c));
}

template <class F>
Poly<F> scale(const Poly<F>& a, const typename F::elem& s) {
    const F& f = a.field();
    std::vector<typename F::elem> c(a.coeffs().size());
    for (std::size_t i = 0; i < c.size(); ++i) c[i] = f.mul(a.coeffs()[i], s);
    return Poly<F>(f, std::move(c));
}

template <class F>
Poly<F> operator*(const Poly<F>& a, const Poly<F>& b) {
    detail::check_same(a, b);
    const F& f = a.field();
    if (a.is_zero() || b.is_zero()) return Poly<F>(f);
    std::size_t na = a.coeffs().size(), nb = b.coeffs().size();
    std::vector<typename F::elem> r(na + nb - 1, f.zero());
    const auto* pa = a.coeffs().data();
    const auto* pb = b.coeffs().data();
    if (std::min(na, nb) < karatsuba_threshold) {
        detail::schoolbook(f, pa, na, pb, nb, r.data());
    } else {
        // split the longer operand into blocks of the shorter length
        if (na < nb) {
            std::swap(na, nb);
            std::swap(pa, pb);
        }
        std::vector<typename F::elem> blk(nb, f.zero());
        for (std::size_t off = 0; off < na; off += nb) {
            std::size_t len = std::min(nb, na - off);
            std::fill(blk.begin(), blk.end(), f.zero());
            std::copy(pa + off, pa + off + len, blk.begin());
            std::vector<typename F::elem> tmp(2 * nb - 1, f.zero());
            detail::karatsuba(f, blk.data(), pb, nb, tmp.data());
            for (std::size_t i = 0; i < tmp.size() && off + i < r.size(); ++i)
                r[off + i] = f.add(r[off + i], tmp[i]);
        }
    }
    return Poly<F>(f, std::move(r));
}

template <class F>
Poly<F> sqr(const Poly<F>& a) {
    return a * a;
}

// Returns (quotient, remainder).
template <class F>
std::pair<Poly<F>, Poly<F>> divrem(const Poly<F>& a, const Poly<F>& b) {
    detail::check_same(a, b);
    const F& f = a.field();
    if (b.is_zero()) throw std::domain_error("polynomial division by zero");
    if (a.degree() < b.degree()) return {Poly<F>(f), a};
    auto r = a.coeffs();
    std::size_t db = b.coeffs().size() - 1;
    std::vector<typename F::elem> q(r.size() - db, f.zero());
    auto li = f.inv(b.lead());
    bool monic = f.eq(b.lead(), f.one());
    const auto& bc = b.coeffs();
    for (std::size_t i = q.size(); i-- > 0;) {
        auto c = monic ? r[i + db] : f.mul(r[i + db], li);
        q[i] = c;
        if (f.is_zero(c)) continue;
        for (std::size_t k = 0; k < db; ++k) r[i + k] = f.sub(r[i + k], f.mul(c, bc[k]));
        r[i + db] = f.zero();
    }
    r.resize(db);
    return {Poly<F>(f, std::move(q)), Poly<F>(f, std::move(r))};
}

template <class F>
Poly<F> operator%(const Poly<F>& a, const Poly<F>& b) {
    return divrem(a, b).second;
}

template <class F>
Poly<F> operator/(const Poly<F>& a, const Poly<F>& b) {
    return divrem(a, b).first;
}

template <class F>
Poly<F> make_monic(const Poly<F>& a) {
    if (a.is_zero() || a.is_monic()) return a;
    return scale(a, a.field().inv(a.lead()));
}

template <class F>
Poly<F> gcd(Poly<F> a, Poly<F> b) {
    detail::check_same(a, b);
    while (!b.is_zero()) {
        auto r = a % b;
        a = std::move(b);
        b = std::move(r);
    }
    return make_monic(a);
}

// Extended gcd: returns g monic with g = s*a + t*b; only s is tracked.
template <class F>
std::pair<Poly<F>, Poly<F>> gcd_cofactor(Poly<F> a, Poly<F> b) {
    detail::check_same(a, b);
    const F& f = a.field();
    Poly<F> s0 = Poly<F>::constant(f, f.one()), s1(f);
    while (!b.is_zero()) {
        auto [q, r] = divrem(a, b);
        a = std::move(b);
        b = std::move(r);
        auto s2 = s0 - q * s1;
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    if (a.is_zero()) return {a, s0};
    auto li = f.inv(a.lead());
    return {scale(a, li), scale(s0, li)};
}

// Inverse of a modulo m, or the nontrivial gcd when a is not invertible.
template <class F>
struct InvResult {
    std::optional<Poly<F>> inverse;
    std::optional<Poly<F>> factor;
};

template <class F>
InvResult<F> invmod(const Poly<F>& a, const Poly<F>& m) {
    auto [g, s] = gcd_cofactor(a % m, m);
    if (g.degree() == 0) return {s % m, std::nullopt};
    return {std::nullopt, g};
}

template <class F>
Poly<F> mulmod(const Poly<F>& a, const Poly<F>& b, const Poly<F>& m) {
    return (a * b) % m;
}

template <class F>
Poly<F> powmod(const Poly<F>& base, const mpz_class& e, const Poly<F>& m) {
    const F& f = base.field();
    Poly<F> r = Poly<F>::constant(f, f.one()) % m;
    Poly<F> b = base % m;
    std::size_t n = mpz_sizeinbase(e.get_mpz_t(), 2);
    if (sgn(e) == 0) return r;
    for (std::size_t i = n; i-- > 0;) {
        r = mulmod(r, r, m);
        if (mpz_tstbit(e.get_mpz_t(), i)) r = mulmod(r, b, m);
    }
    return r;
}

template <class F>
Poly<F> derivative(const Poly<F>& a) {
    const F& f = a.field();
    if (a.coeffs().size() <= 1) return Poly<F>(f);
    std::vector<typename F::elem> c(a.coeffs().size() - 1);
    for (std::size_t i = 1; i < a.coeffs().size(); ++i)
        c[i - 1] = f.mul(a.coeffs()[i], f.from_u64(i));
    return Poly<F>(f, std::move(c));
}

// Evaluate an outer polynomial at a polynomial argument modulo m (Horner).
template <class F>
Poly<F> compose_mod(const Poly<F>& outer, const Poly<F>& inner, const Poly<F>& m) {
    const F& f = outer.field();
    Poly<F> r(f);
    const auto& c = outer.coeffs();
    for (std::size_t i = c.size(); i-- > 0;) r = (mulmod(r, inner, m) + Poly<F>::constant(f, c[i]));
    return r % m;
}

template <class F>
Poly<F> from_roots(const F& f, const std::vector<typename F::elem>& roots) {
    if (roots.empty()) return Poly<F>::constant(f, f.one());
    std::vector<Poly<F>> level;
    level.reserve(roots.size());
    for (const auto& r : roots) level.push_back(Poly<F>::linear(f, r));
    while (level.size() > 1) {
        std::vector<Poly<F>> next;
        for (std::size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(level[i] * level[i + 1]);
        if (level.size() % 2) next.push_back(level.back());
        level = std::move(next);
    }
    return level[0];
}

template <class F>
Poly<F> interpolate(const F& f, const std::vector<typename F::elem>& xs,
                    const std::vector<typename F::elem>& ys) {
    using E = typename F::elem;
    if (xs.size() != ys.size()) throw std::invalid_argument("interpolate: size mismatch");
    std::size_t n = xs.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = i + 1; k < n; ++k)
            if (f.eq(xs[i], xs[k])) throw std::invalid_argument("interpolate: duplicate abscissae");
    if (n == 0) return Poly<F>(f);
    Poly<F> m = from_roots(f, xs);
    std::vector<E> acc(n, f.zero());
    std::vector<E> q(n);
    for (std::size_t i = 0; i < n; ++i) {
        // q = m / (X - x_i) by synthetic division
        E carry = f.zero();
        for (std::size_t k = n; k-- > 0;) {
            carry = f.add(m.coeff(k + 1), f.mul(carry, xs[i]));
            q[k] = carry;
        }
        E denom = f.zero();
        for (std::size_t k = n; k-- > 0;) denom = f.add(f.mul(denom, xs[i]), q[k]);
        E w = f.mul(ys[i], f.inv(denom));
        if (f.is_zero(w)) continue;
        for (std::size_t k = 0; k < n; ++k) acc[k] = f.add(acc[k], f.mul(w, q[k]));
    }
    return Poly<F>(f, std::move(acc));
}

namespace detail {

template <class F>
void split_roots(const Poly<F>& g, std::mt19937_64& rng, std::vector<typename F::elem>& out) {
    const F& f = g.field();
    if (g.degree() <= 0) return;
    if (g.degree() == 1) {
        out.push_back(f.neg(f.mul(g.coeff(0), f.inv(g.coeff(1)))));
        return;
    }
    mpz_class half = (mpz_class(f.modulus()) - 1) / 2;
    for (;;) {
        auto a = f.random(rng);
        auto h = powmod(Poly<F>(f, {a, f.one()}), half, g) - Poly<F>::constant(f, f.one());
        auto d = gcd(h, g);
        if (d.degree() > 0 && d.degree() < g.degree()) {
            split_roots(d, rng, out);
            split_roots(g / d, rng, out);
            return;
        }
    }
}

}  // namespace detail

// Distinct roots in the prime field, sorted by canonical value.
template <class F>
std::vector<typename F::elem> roots(const Poly<F>& a, std::uint64_t seed) {
    using E = typename F::elem;
    const F& f = a.field();
    if (a.is_zero()) throw std::invalid_argument("roots of the zero polynomial");
    std::vector<E> out;
    mpz_class p = f.modulus();
    if (a.degree() <= 0) return out;
    if (p < 64 || p <= a.degree()) {
        for (unsigned long x = 0; x < p.get_ui(); ++x) {
            auto e = f.from_u64(x);
            if (f.is_zero(a.eval(e))) out.push_back(e);
        }
        return out;
    }
    auto m = make_monic(a);
    auto xp = powmod(Poly<F>::x(f), p, m);
    auto g = gcd(xp - Poly<F>::x(f), m);
    std::mt19937_64 rng(seed);
    detail::split_roots(g, rng, out);
    std::sort(out.begin(), out.end(), [&](const E& u, const E& v) { return f.to_mpz(u) < f.to_mpz(v); });
    return out;
}

}  // namespace modpoly
