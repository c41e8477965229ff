#pragma once

#include "modpoly/ntheory.hpp"
#include "modpoly/poly.hpp"

#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace modpoly {

template <class F>
struct Curve {
    using elem = typename F::elem;
    F f;
    elem a4, a6;

    Curve(const F& fld, const elem& a, const elem& b) : f(fld), a4(a), a6(b) {}

    elem discriminant() const {  // 4 a4^3 + 27 a6^2
        return f.add(f.mul(f.from_u64(4), f.mul(f.sqr(a4), a4)), f.mul(f.from_u64(27), f.sqr(a6)));
    }
    bool is_singular() const { return f.is_zero(discriminant()); }
    elem rhs(const elem& x) const { return f.add(f.mul(f.add(f.sqr(x), a4), x), a6); }
    elem j_invariant() const {
        auto a3 = f.mul(f.from_u64(4), f.mul(f.sqr(a4), a4));
        return f.mul(f.mul(f.from_u64(1728), a3), f.inv(discriminant()));
    }
    bool operator==(const Curve& o) const { return f.eq(a4, o.a4) && f.eq(a6, o.a6); }
};

template <class F>
struct Point {
    using elem = typename F::elem;
    elem x{}, y{};
    bool inf = true;

    static Point infinity() { return Point(); }
    static Point affine(const elem& x, const elem& y) {
        Point P;
        P.x = x;
        P.y = y;
        P.inf = false;
        return P;
    }
};

template <class F>
bool on_curve(const Curve<F>& E, const Point<F>& P) {
    return P.inf || E.f.eq(E.f.sqr(P.y), E.rhs(P.x));
}

template <class F>
bool point_eq(const Curve<F>& E, const Point<F>& P, const Point<F>& Q) {
    if (P.inf || Q.inf) return P.inf == Q.inf;
    return E.f.eq(P.x, Q.x) && E.f.eq(P.y, Q.y);
}

template <class F>
Point<F> point_neg(const Curve<F>& E, const Point<F>& P) {
    if (P.inf) return P;
    return Point<F>::affine(P.x, E.f.neg(P.y));
}

template <class F>
Point<F> point_add(const Curve<F>& E, const Point<F>& P, const Point<F>& Q) {
    const F& f = E.f;
    if (P.inf) return Q;
    if (Q.inf) return P;
    typename F::elem lam;
    if (f.eq(P.x, Q.x)) {
        if (!f.eq(P.y, Q.y) || f.is_zero(P.y)) return Point<F>::infinity();
        lam = f.mul(f.add(f.mul(f.from_u64(3), f.sqr(P.x)), E.a4), f.inv(f.add(P.y, P.y)));
    } else {
        lam = f.mul(f.sub(Q.y, P.y), f.inv(f.sub(Q.x, P.x)));
    }
    auto x3 = f.sub(f.sub(f.sqr(lam), P.x), Q.x);
    auto y3 = f.sub(f.mul(lam, f.sub(P.x, x3)), P.y);
    return Point<F>::affine(x3, y3);
}

namespace detail {

template <class F>
struct Jac {
    typename F::elem X, Y, Z;  // Z == 0 encodes infinity
};

template <class F>
Jac<F> jac_dbl(const Curve<F>& E, const Jac<F>& P) {
    const F& f = E.f;
    if (f.is_zero(P.Z) || f.is_zero(P.Y)) return {f.one(), f.one(), f.zero()};
    auto XX = f.sqr(P.X), YY = f.sqr(P.Y), YYYY = f.sqr(YY), ZZ = f.sqr(P.Z);
    auto S = f.mul(f.from_u64(4), f.mul(P.X, YY));
    auto M = f.add(f.mul(f.from_u64(3), XX), f.mul(E.a4, f.sqr(ZZ)));
    auto X3 = f.sub(f.sqr(M), f.add(S, S));
    auto Y3 = f.sub(f.mul(M, f.sub(S, X3)), f.mul(f.from_u64(8), YYYY));
    auto Z3 = f.mul(f.add(P.Y, P.Y), P.Z);
    return {X3, Y3, Z3};
}

// P + Q with Q affine
template <class F>
Jac<F> jac_madd(const Curve<F>& E, const Jac<F>& P, const Point<F>& Q) {
    const F& f = E.f;
    if (Q.inf) return P;
    if (f.is_zero(P.Z)) return {Q.x, Q.y, f.one()};
    auto Z1Z1 = f.sqr(P.Z);
    auto U2 = f.mul(Q.x, Z1Z1);
    auto S2 = f.mul(Q.y, f.mul(P.Z, Z1Z1));
    auto H = f.sub(U2, P.X);
    auto r = f.sub(S2, P.Y);
    if (f.is_zero(H)) {
        if (f.is_zero(r)) return jac_dbl(E, Jac<F>{Q.x, Q.y, f.one()});
        return {f.one(), f.one(), f.zero()};
    }
    auto HH = f.sqr(H), HHH = f.mul(HH, H);
    auto V = f.mul(P.X, HH);
    auto X3 = f.sub(f.sub(f.sqr(r), HHH), f.add(V, V));
    auto Y3 = f.sub(f.mul(r, f.sub(V, X3)), f.mul(P.Y, HHH));
    auto Z3 = f.mul(P.Z, H);
    return {X3, Y3, Z3};
}

template <class F>
Point<F> jac_to_affine(const Curve<F>& E, const Jac<F>& P) {
    const F& f = E.f;
    if (f.is_zero(P.Z)) return Point<F>::infinity();
    auto zi = f.inv(P.Z);
    auto zi2 = f.sqr(zi);
    return Point<F>::affine(f.mul(P.X, zi2), f.mul(P.Y, f.mul(zi2, zi)));
}

}  // namespace detail

template <class F>
Point<F> point_mul(const Curve<F>& E, const mpz_class& n, const Point<F>& P) {
    if (P.inf || sgn(n) == 0) return Point<F>::infinity();
    Point<F> base = sgn(n) < 0 ? point_neg(E, P) : P;
    mpz_class m = abs(n);
    const F& f = E.f;
    detail::Jac<F> R{f.one(), f.one(), f.zero()};
    for (std::size_t i = mpz_sizeinbase(m.get_mpz_t(), 2); i-- > 0;) {
        R = detail::jac_dbl(E, R);
        if (mpz_tstbit(m.get_mpz_t(), i)) R = detail::jac_madd(E, R, base);
    }
    return detail::jac_to_affine(E, R);
}

template <class F>
Point<F> random_point(const Curve<F>& E, std::mt19937_64& rng) {
    const F& f = E.f;
    for (;;) {
        auto x = f.random(rng);
        auto s = field_sqrt(f, E.rhs(x));
        if (!s) continue;
        auto y = (rng() & 1) ? f.neg(*s) : *s;
        return Point<F>::affine(x, y);
    }
}

template <class F>
Curve<F> curve_from_j(const F& f, const typename F::elem& j) {
    if (f.is_zero(j)) return Curve<F>(f, f.zero(), f.one());
    auto c1728 = f.from_u64(1728);
    if (f.eq(j, c1728)) return Curve<F>(f, f.one(), f.zero());
    auto k = f.mul(j, f.inv(f.sub(c1728, j)));
    return Curve<F>(f, f.mul(f.from_u64(3), k), f.mul(f.from_u64(2), k));
}

template <class F>
typename F::elem quadratic_nonresidue(const F& f) {
    for (std::uint64_t d = 2;; ++d) {
        auto e = f.from_u64(d);
        if (field_legendre(f, e) == -1) return e;
    }
}

template <class F>
Curve<F> quadratic_twist(const Curve<F>& E) {
    const F& f = E.f;
    auto d = quadratic_nonresidue(f);
    auto d2 = f.sqr(d);
    return Curve<F>(f, f.mul(E.a4, d2), f.mul(E.a6, f.mul(d2, d)));
}

template <class F>
bool order_divides(const Curve<F>& E, const mpz_class& N, int trials, std::mt19937_64& rng) {
    for (int i = 0; i < trials; ++i)
        if (!point_mul(E, N, random_point(E, rng)).inf) return false;
    return true;
}

// Exact group order by summing Legendre symbols; only for small fields.
template <class F>
mpz_class count_points_legendre(const Curve<F>& E) {
    const F& f = E.f;
    mpz_class p = f.modulus();
    if (p > mpz_class(1) << 26) throw std::invalid_argument("field too large for exhaustive counting");
    long long s = 0;
    auto x = f.zero();
    for (unsigned long i = 0; i < p.get_ui(); ++i, x = f.add(x, f.one())) s += field_legendre(f, E.rhs(x));
    return p + 1 + static_cast<long>(s);
}

struct twist_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// E or its quadratic twist, whichever has p + 1 - t points.
template <class F>
Curve<F> select_twist(const Curve<F>& E, const mpz_class& t, std::mt19937_64& rng) {
    mpz_class p = E.f.modulus();
    if (t * t >= 4 * p) throw std::invalid_argument("select_twist: |t| too large");
    mpz_class N = p + 1 - t, Nt = p + 1 + t;
    bool a = order_divides(E, N, 20, rng);
    bool b = order_divides(E, Nt, 20, rng);
    if (a && !b) return E;
    Curve<F> T = quadratic_twist(E);
    if (b && !a) return T;
    if (!a && !b) throw twist_error("select_twist: trace inconsistent with curve");
    if (p < mpz_class(1) << 26) {
        mpz_class n = count_points_legendre(E);
        if (n == N) return E;
        if (n == Nt) return T;
        throw twist_error("select_twist: trace inconsistent with curve");
    }
    throw twist_error("select_twist: ambiguous group order");
}

// A point of exact order ell given the group order N.
template <class F>
Point<F> ell_torsion_point(const Curve<F>& E, unsigned long ell, const mpz_class& N, std::mt19937_64& rng,
                           int max_trials = 200) {
    if (N % ell != 0) throw std::invalid_argument("ell_torsion_point: ell does not divide #E");
    mpz_class m = N;
    while (m % ell == 0) m /= ell;
    for (int t = 0; t < max_trials; ++t) {
        Point<F> Q = point_mul(E, m, random_point(E, rng));
        if (Q.inf) continue;
        for (;;) {
            Point<F> R = point_mul(E, mpz_class(ell), Q);
            if (R.inf) return Q;
            Q = R;
        }
    }
    throw std::runtime_error("ell_torsion_point: exhausted random trials");
}

// Basis of E[ell] when E[ell] is contained in E(F_p); N = #E(F_p).
// Random points are reduced against a point of maximal ell-power order, so the result does not
// depend on the shape of the ell-Sylow subgroup.
template <class F>
std::pair<Point<F>, Point<F>> ell_torsion_basis(const Curve<F>& E, unsigned long ell, const mpz_class& N,
                                                std::mt19937_64& rng, int max_trials = 200) {
    if (N % (ell * ell) != 0) throw std::invalid_argument("ell_torsion_basis: ell^2 does not divide #E");
    mpz_class m = N;
    while (m % ell == 0) m /= ell;
    const mpz_class L(ell);
    auto log_order = [&](Point<F> Q) {
        int e = 0;
        while (!Q.inf) {
            Q = point_mul(E, L, Q);
            ++e;
        }
        return e;
    };
    auto pow_ell = [&](int k) {
        mpz_class r;
        mpz_ui_pow_ui(r.get_mpz_t(), ell, static_cast<unsigned long>(k));
        return r;
    };
    Point<F> Q1;
    int a = 0;
    std::vector<Point<F>> mult;  // i * P1 for i < ell
    auto set_max = [&](const Point<F>& Q, int e) {
        Q1 = Q;
        a = e;
        Point<F> P1 = point_mul(E, pow_ell(a - 1), Q1);
        mult.assign(1, Point<F>::infinity());
        for (unsigned long i = 1; i < ell; ++i) mult.push_back(point_add(E, mult.back(), P1));
    };
    for (int trial = 0; trial < max_trials; ++trial) {
        Point<F> R = point_mul(E, m, random_point(E, rng));
        for (;;) {
            int e = log_order(R);
            if (e == 0) break;
            if (e > a) {
                set_max(R, e);
                break;
            }
            Point<F> S = point_mul(E, pow_ell(e - 1), R);
            unsigned long i = 1;
            while (i < ell && !point_eq(E, mult[i], S)) ++i;
            if (i == ell) return {mult[1], S};
            R = point_add(E, R, point_neg(E, point_mul(E, mpz_class(i) * pow_ell(a - e), Q1)));
        }
    }
    throw std::runtime_error("ell_torsion_basis: exhausted random trials");
}

template <class F>
struct Isogeny {
    using elem = typename F::elem;
    Curve<F> domain, codomain;
    Poly<F> kernel_poly;
    unsigned long degree;
    std::vector<elem> xs, ts, us;  // half-kernel abscissae and Velu weights

    Point<F> operator()(const Point<F>& P) const {
        const F& f = domain.f;
        if (P.inf) return P;
        elem X = P.x, dX = f.one();  // X(x) and X'(x)
        for (std::size_t i = 0; i < xs.size(); ++i) {
            elem d = f.sub(P.x, xs[i]);
            if (f.is_zero(d)) return Point<F>::infinity();
            elem di = f.inv(d), di2 = f.sqr(di), di3 = f.mul(di2, di);
            X = f.add(X, f.add(f.mul(ts[i], di), f.mul(us[i], di2)));
            dX = f.sub(dX, f.add(f.mul(ts[i], di2), f.mul(f.add(us[i], us[i]), di3)));
        }
        return Point<F>::affine(X, f.mul(P.y, dX));
    }
};

// Normalized Velu isogeny with kernel <P>, P of odd prime order ell.
template <class F>
Isogeny<F> velu(const Curve<F>& E, const Point<F>& P, unsigned long ell) {
    const F& f = E.f;
    if (ell < 3 || ell % 2 == 0) throw std::invalid_argument("velu: ell must be an odd prime");
    if (P.inf || !point_mul(E, mpz_class(ell), P).inf) throw std::invalid_argument("velu: point not of order ell");
    Isogeny<F> I{E, E, Poly<F>::constant(f, f.one()), ell, {}, {}, {}};
    auto t = f.zero(), w = f.zero();
    Point<F> Q = P;
    std::vector<typename F::elem> xs;
    for (unsigned long i = 1; i <= (ell - 1) / 2; ++i) {
        if (i > 1) Q = point_add(E, Q, P);
        auto tq = f.add(f.mul(f.from_u64(6), f.sqr(Q.x)), f.add(E.a4, E.a4));
        auto uq = f.mul(f.from_u64(4), f.sqr(Q.y));
        t = f.add(t, tq);
        w = f.add(w, f.add(uq, f.mul(Q.x, tq)));
        I.xs.push_back(Q.x);
        I.ts.push_back(tq);
        I.us.push_back(uq);
    }
    I.codomain = Curve<F>(f, f.sub(E.a4, f.mul(f.from_u64(5), t)), f.sub(E.a6, f.mul(f.from_u64(7), w)));
    I.kernel_poly = from_roots(f, I.xs);
    return I;
}

// Codomain of the normalized isogeny with the given monic kernel polynomial of degree d = (ell-1)/2.
template <class F>
Curve<F> velu_codomain_from_kernel(const Curve<F>& E, const Poly<F>& h) {
    const F& f = E.f;
    int d = h.degree();
    // power sums p1..p3 of the roots via Newton's identities
    std::vector<typename F::elem> e(4, f.zero());
    e[0] = f.one();
    for (int k = 1; k <= 3 && k <= d; ++k) {
        e[k] = h.coeff(d - k);
        if (k % 2) e[k] = f.neg(e[k]);
    }
    auto p1 = e[1];
    auto p2 = f.sub(f.mul(e[1], p1), f.add(e[2], e[2]));
    auto p3 = f.add(f.sub(f.mul(e[1], p2), f.mul(e[2], p1)), f.mul(f.from_u64(3), e[3]));
    auto dd = f.from_u64(static_cast<std::uint64_t>(d));
    auto t = f.add(f.mul(f.from_u64(6), p2), f.mul(f.add(E.a4, E.a4), dd));
    auto w = f.add(f.add(f.mul(f.from_u64(10), p3), f.mul(f.mul(f.from_u64(6), E.a4), p1)),
                   f.mul(f.mul(f.from_u64(4), E.a6), dd));
    return Curve<F>(f, f.sub(E.a4, f.mul(f.from_u64(5), t)), f.sub(E.a6, f.mul(f.from_u64(7), w)));
}

// Normalized isogeny given only its kernel polynomial h: X = N/h^2, Y = y X'.
template <class F>
struct KernelIsogeny {
    Curve<F> domain;
    Poly<F> h, N;

    KernelIsogeny(const Curve<F>& E, const Poly<F>& kernel, unsigned long ell) : domain(E), h(kernel), N(E.f) {
        const F& f = E.f;
        int d = h.degree();
        auto s1 = d >= 1 ? f.neg(h.coeff(d - 1)) : f.zero();
        Poly<F> fx(f, {E.a6, E.a4, f.zero(), f.one()});
        Poly<F> lin(f, {f.neg(f.add(s1, s1)), f.from_u64(ell)});
        Poly<F> t(f, {f.add(E.a4, E.a4), f.zero(), f.from_u64(6)});
        auto h1 = derivative(h), h2 = derivative(h1);
        N = lin * h * h - t * h1 * h + scale(fx * (h1 * h1 - h * h2), f.from_u64(4));
    }

    Point<F> operator()(const Point<F>& P) const {
        const F& f = domain.f;
        if (P.inf) return P;
        auto hv = h.eval(P.x);
        if (f.is_zero(hv)) return Point<F>::infinity();
        auto nv = N.eval(P.x), hi = f.inv(hv), h1v = derivative(h).eval(P.x);
        auto X = f.mul(nv, f.sqr(hi));
        // X' = (N' h - 2 N h') / h^3
        auto dX = f.mul(f.sub(f.mul(derivative(N).eval(P.x), hv), f.mul(f.add(nv, nv), h1v)), f.mul(f.sqr(hi), hi));
        return Point<F>::affine(X, f.mul(P.y, dX));
    }
};

// Division polynomial psi_n for odd n (and the x-part psi_n/(2y) for even n).
template <class F>
Poly<F> division_poly(const Curve<F>& E, unsigned long n) {
    const F& f = E.f;
    auto a = E.a4, b = E.a6;
    auto P = [&](std::vector<typename F::elem> c) { return Poly<F>(f, std::move(c)); };
    std::vector<Poly<F>> g;
    g.push_back(Poly<F>(f));
    g.push_back(P({f.one()}));
    g.push_back(P({f.one()}));
    g.push_back(P({f.neg(f.sqr(a)), f.mul(f.from_u64(12), b), f.mul(f.from_u64(6), a), f.zero(), f.from_u64(3)}));
    auto two = f.from_u64(2);
    g.push_back(scale(P({f.neg(f.add(f.mul(f.from_u64(8), f.sqr(b)), f.mul(f.sqr(a), a))),
                         f.neg(f.mul(f.from_u64(4), f.mul(a, b))), f.neg(f.mul(f.from_u64(5), f.sqr(a))),
                         f.mul(f.from_u64(20), b), f.mul(f.from_u64(5), a), f.zero(), f.one()}),
                      two));
    auto Y4 = scale(P({b, a, f.zero(), f.one()}), f.from_u64(4));
    auto Y42 = Y4 * Y4;
    for (unsigned long k = 5; k <= n; ++k) {
        unsigned long m = k / 2;
        if (k % 2) {
            auto A = g[m + 2] * g[m] * g[m] * g[m];
            auto B = g[m - 1] * g[m + 1] * g[m + 1] * g[m + 1];
            g.push_back(m % 2 == 0 ? Y42 * A - B : A - Y42 * B);
        } else {
            g.push_back(g[m] * (g[m + 2] * g[m - 1] * g[m - 1] - g[m - 2] * g[m + 1] * g[m + 1]));
        }
    }
    return g[n];
}

}  // namespace modpoly
