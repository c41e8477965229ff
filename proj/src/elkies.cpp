#include "modpoly/evaluate.hpp"

namespace modpoly {

namespace {

using E = FpBig::elem;
using Series = std::vector<E>;

Series series_mul(const FpBig& f, const Series& a, const Series& b, std::size_t n) {
    Series r(n, f.zero());
    for (std::size_t i = 0; i < a.size() && i < n; ++i) {
        if (f.is_zero(a[i])) continue;
        for (std::size_t j = 0; j < b.size() && i + j < n; ++j) r[i + j] = f.add(r[i + j], f.mul(a[i], b[j]));
    }
    return r;
}

E inv_int(const FpBig& f, long long k) {
    E x = f.from_int(k);
    if (f.is_zero(x)) throw isogeny_error("characteristic too small for the isogeny series");
    return f.inv(x);
}

// Laurent coefficients c_1..c_n of the Weierstrass function of y^2 = x^3 + A x + B.
Series wp_coeffs(const FpBig& f, const E& A, const E& B, std::size_t n) {
    Series c(n + 1, f.zero());
    if (n >= 1) c[1] = f.neg(f.mul(A, inv_int(f, 5)));
    if (n >= 2) c[2] = f.neg(f.mul(B, inv_int(f, 7)));
    for (std::size_t k = 3; k <= n; ++k) {
        E s = f.zero();
        for (std::size_t h = 1; h <= k - 2; ++h) s = f.add(s, f.mul(c[h], c[k - 1 - h]));
        long long kk = static_cast<long long>(k);
        c[k] = f.mul(f.mul(f.from_int(3), s), inv_int(f, (kk - 2) * (2 * kk + 3)));
    }
    return c;
}

// Coefficients a_1..a_{n-1} of wp_Et - wp_E written as a power series in w = 1/wp_E.
Series isogeny_series(const Curve<FpBig>& Ec, const Curve<FpBig>& Et, std::size_t n) {
    const FpBig& f = Ec.f;
    Series c = wp_coeffs(f, Ec.a4, Ec.a6, n), ct = wp_coeffs(f, Et.a4, Et.a6, n);
    // u = z^2 as a series in w: u = w (1 + sum c_k u^{k+1})
    Series u(n, f.zero());
    if (n > 1) u[1] = f.one();
    for (std::size_t it = 0; it < n; ++it) {
        Series acc(n, f.zero());
        acc[0] = f.one();
        Series up = series_mul(f, u, u, n);  // u^2
        for (std::size_t k = 1; k < n; ++k) {
            for (std::size_t i = 0; i < n; ++i) acc[i] = f.add(acc[i], f.mul(c[k], up[i]));
            up = series_mul(f, up, u, n);
        }
        Series nu(n, f.zero());
        for (std::size_t i = 0; i + 1 < n; ++i) nu[i + 1] = acc[i];
        if (nu == u) break;
        u = std::move(nu);
    }
    Series out(n, f.zero()), up = u;
    for (std::size_t k = 1; k < n; ++k) {
        E d = f.sub(ct[k], c[k]);
        for (std::size_t i = 0; i < n; ++i) out[i] = f.add(out[i], f.mul(d, up[i]));
        up = series_mul(f, up, u, n);
    }
    return out;
}

Poly<FpBig> from_power_sums(const FpBig& f, const Series& s, std::size_t d) {
    // e_k via Newton's identities; h = sum (-1)^k e_k x^{d-k}
    Series e(d + 1, f.zero());
    e[0] = f.one();
    for (std::size_t k = 1; k <= d; ++k) {
        E acc = f.zero();
        for (std::size_t i = 1; i <= k; ++i) {
            E t = f.mul(e[k - i], s[i]);
            acc = (i % 2) ? f.add(acc, t) : f.sub(acc, t);
        }
        e[k] = f.mul(acc, inv_int(f, static_cast<long long>(k)));
    }
    std::vector<E> h(d + 1);
    for (std::size_t k = 0; k <= d; ++k) h[d - k] = (k % 2) ? f.neg(e[k]) : e[k];
    return Poly<FpBig>(f, h);
}

struct CodomainData {
    E jp, jtp, m, mt, kt, E4, Et4;
    Curve<FpBig> codomain;
};

CodomainData codomain_data(const Curve<FpBig>& Ec, long long ell, const mpz_class& jt_in, const mpz_class& PhiX,
                           const mpz_class& PhiY) {
    const FpBig& f = Ec.f;
    const E& A = Ec.a4;
    const E& B = Ec.a6;
    if (f.is_zero(A) || f.is_zero(B)) throw isogeny_error("j(E) is 0 or 1728");
    E j = Ec.j_invariant();
    E jt = f.from_mpz(jt_in);
    E c1728 = f.from_int(1728);
    if (f.is_zero(jt) || f.eq(jt, c1728)) throw isogeny_error("isogenous j-invariant is 0 or 1728");
    E lPY = f.mul(f.from_int(ell), f.from_mpz(PhiY));
    if (f.is_zero(lPY)) throw isogeny_error("Phi_Y(j, jt) vanishes");
    E jp = f.mul(f.mul(f.from_int(18), B), f.mul(f.inv(A), j));
    E jtp = f.neg(f.mul(f.mul(f.from_mpz(PhiX), jp), f.inv(lPY)));
    if (f.is_zero(jtp)) throw isogeny_error("Phi_X(j, jt) vanishes");
    E mt = f.mul(jtp, f.inv(jt));
    E kt = f.mul(jtp, f.inv(f.sub(c1728, jt)));
    E l2 = f.sqr(f.from_int(ell)), l4 = f.sqr(l2), l6 = f.mul(l4, l2);
    E a4 = f.mul(f.mul(l4, f.mul(mt, kt)), inv_int(f, 48));
    E a6 = f.mul(f.mul(l6, f.mul(f.sqr(mt), kt)), inv_int(f, 864));
    Curve<FpBig> Et(f, a4, a6);
    if (Et.is_singular()) throw isogeny_error("singular codomain");
    E m = f.mul(jp, f.inv(j));
    E E4 = f.neg(f.mul(f.from_int(48), A));
    E Et4 = f.neg(f.mul(mt, kt));
    return {jp, jtp, m, mt, kt, E4, Et4, Et};
}

NormalizedIsogeny package(const CodomainData& cd, const Poly<FpBig>& h, const mpz_class& jt) {
    const FpBig& f = cd.codomain.f;
    return {cd.codomain, h, jt, f.to_mpz(cd.jp), f.to_mpz(cd.jtp), f.to_mpz(cd.mt), f.to_mpz(cd.kt)};
}

E eval_at(const FpBig& f, const std::vector<mpz_class>& c, const E& x, int deriv) {
    // deriv-th derivative of sum c_k Y^k at x
    E r = f.zero();
    for (std::size_t k = c.size(); k-- > static_cast<std::size_t>(deriv);) {
        mpz_class w = c[k];
        for (int t = 0; t < deriv; ++t) w *= static_cast<long>(k - t);
        r = f.add(f.mul(r, x), f.from_mpz(w));
    }
    return r;
}

// Connection polynomial of a linearly recurrent sequence.
std::vector<E> berlekamp_massey(const FpBig& f, const Series& s) {
    std::vector<E> C{f.one()}, Bp{f.one()};
    std::size_t L = 0, m = 1;
    E b = f.one();
    for (std::size_t n = 0; n < s.size(); ++n) {
        E d = s[n];
        for (std::size_t i = 1; i <= L && i < C.size(); ++i) d = f.add(d, f.mul(C[i], s[n - i]));
        if (f.is_zero(d)) {
            ++m;
            continue;
        }
        E coef = f.mul(d, f.inv(b));
        std::vector<E> T = C;
        if (C.size() < Bp.size() + m) C.resize(Bp.size() + m, f.zero());
        for (std::size_t i = 0; i < Bp.size(); ++i) C[i + m] = f.sub(C[i + m], f.mul(coef, Bp[i]));
        if (2 * L <= n) {
            L = n + 1 - L;
            Bp = T;
            b = d;
            m = 1;
        } else {
            ++m;
        }
    }
    C.resize(L + 1, f.zero());
    return C;
}

}  // namespace

ModularPartials partials_from_eval(const EvalResult& r, const mpz_class& jt, const mpz_class& q) {
    if (r.phi_x.empty() || r.phi_xx.empty()) throw std::invalid_argument("partials need phi_X and phi_XX");
    FpBig f(q);
    E x = f.from_mpz(jt);
    ModularPartials d;
    d.X = f.to_mpz(eval_at(f, r.phi_x, x, 0));
    d.Y = f.to_mpz(eval_at(f, r.phi, x, 1));
    d.XX = f.to_mpz(eval_at(f, r.phi_xx, x, 0));
    d.XY = f.to_mpz(eval_at(f, r.phi_x, x, 1));
    d.YY = f.to_mpz(eval_at(f, r.phi, x, 2));
    return d;
}

NormalizedIsogeny normalized_isogeny(const Curve<FpBig>& Ec, long long ell, const mpz_class& jt,
                                     const ModularPartials& P) {
    const FpBig& f = Ec.f;
    auto cd = codomain_data(Ec, ell, jt, P.X, P.Y);
    E l = f.from_int(ell);
    // Q = Phi_XX j'^2 + 2 l Phi_XY j' jt' + l^2 Phi_YY jt'^2
    E Q = f.add(f.mul(f.from_mpz(P.XX), f.sqr(cd.jp)),
                f.add(f.mul(f.mul(f.add(l, l), f.from_mpz(P.XY)), f.mul(cd.jp, cd.jtp)),
                      f.mul(f.mul(f.sqr(l), f.from_mpz(P.YY)), f.sqr(cd.jtp))));
    E lPYjtp = f.mul(f.mul(l, f.from_mpz(P.Y)), cd.jtp);
    // E2 - l E2(l tau)
    E bracket = f.mul(f.mul(f.from_int(6), Q), f.inv(lPYjtp));
    bracket = f.sub(bracket, f.mul(f.from_int(4), cd.m));
    bracket = f.sub(bracket, f.mul(f.mul(f.from_int(3), cd.E4), f.inv(cd.m)));
    bracket = f.add(bracket, f.mul(f.mul(f.from_int(4), l), cd.mt));
    bracket = f.add(bracket, f.mul(f.mul(f.mul(f.from_int(3), l), cd.Et4), f.inv(cd.mt)));
    E s1 = f.mul(f.mul(l, bracket), inv_int(f, 24));

    std::size_t d = static_cast<std::size_t>((ell - 1) / 2);
    std::size_t n = static_cast<std::size_t>((ell + 7) / 2);
    Series a = isogeny_series(Ec, cd.codomain, n);
    const E& A = Ec.a4;
    const E& B = Ec.a6;
    Series s(d + 1, f.zero());
    s[0] = f.from_int(static_cast<long long>(d));
    if (d >= 1) s[1] = s1;
    for (std::size_t k = 1; k + 1 <= d; ++k) {
        long long kk = static_cast<long long>(k);
        E r = a[k];
        r = f.sub(r, f.mul(f.mul(f.from_int(4 * kk - 2), A), s[k - 1]));
        if (k >= 2) r = f.sub(r, f.mul(f.mul(f.from_int(4 * (kk - 1)), B), s[k - 2]));
        s[k + 1] = f.mul(r, inv_int(f, 4 * kk + 2));
    }
    return package(cd, from_power_sums(f, s, d), jt);
}

NormalizedIsogeny normalized_isogeny_from_codomain(const Curve<FpBig>& Ec, long long ell, const mpz_class& jt,
                                                   const mpz_class& PhiX, const mpz_class& PhiY) {
    const FpBig& f = Ec.f;
    auto cd = codomain_data(Ec, ell, jt, PhiX, PhiY);
    std::size_t d = static_cast<std::size_t>((ell - 1) / 2);
    std::size_t n = 4 * d + 2;
    Series a = isogeny_series(Ec, cd.codomain, n + 1);
    Series seq(a.begin() + 1, a.begin() + static_cast<long>(n + 1));
    auto C = berlekamp_massey(f, seq);
    if (C.size() != 2 * d + 1) throw isogeny_error("isogeny series has the wrong recurrence length");
    std::vector<E> rev(C.rbegin(), C.rend());
    Poly<FpBig> h2(f, rev);
    h2 = make_monic(h2);
    Poly<FpBig> h = h2 / gcd(h2, derivative(h2));
    if (h.degree() != static_cast<int>(d)) throw isogeny_error("kernel polynomial is not squarefree");
    return package(cd, make_monic(h), jt);
}

}  // namespace modpoly
