#include "modpoly/sea.hpp"

#include "modpoly/ntheory.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <unordered_map>

namespace modpoly {

namespace {

using P = Poly<FpBig>;
using E = FpBig::elem;

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

P curve_poly(const Curve<FpBig>& C) {
    const FpBig& f = C.f;
    return P(f, {C.a6, C.a4, f.zero(), f.one()});
}

mpz_class eval_mod(const std::vector<mpz_class>& c, const mpz_class& x, const mpz_class& q, int deriv) {
    mpz_class r = 0;
    for (std::size_t k = c.size(); k-- > static_cast<std::size_t>(deriv);) {
        mpz_class w = c[k];
        for (int t = 0; t < deriv; ++t) w *= static_cast<long>(k - t);
        r = (r * x + w) % q;
    }
    if (r < 0) r += q;
    return r;
}

std::vector<mpz_class> sorted_roots(const std::vector<mpz_class>& phi, const mpz_class& q, std::uint64_t seed) {
    FpBig f(q);
    std::vector<E> c;
    for (const auto& v : phi) c.push_back(f.from_mpz(v));
    std::vector<mpz_class> out;
    for (const auto& r : roots(P(f, c), seed)) out.push_back(f.to_mpz(r));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

// Points (a(x), y b(x)) over F_q[x]/(h) on y^2 = f(x).
struct RingPoint {
    P a, b;
};

struct Ring {
    const Curve<FpBig>& C;
    const P& h;
    P fx;

    Ring(const Curve<FpBig>& c, const P& hh) : C(c), h(hh), fx(curve_poly(c) % hh) {}

    P mul(const P& x, const P& y) const { return mulmod(x, y, h); }
    P inv(const P& x) const {
        auto r = invmod(x, h);
        if (!r.inverse) throw sea_error("non-invertible element in the eigenvalue search");
        return *r.inverse;
    }
    RingPoint from_slope(const P& s, const RingPoint& p, const P& a2) const {
        P x3 = (mul(fx, mul(s, s)) - p.a - a2) % h;
        P y3 = (mul(s, p.a - x3) - p.b) % h;
        return {x3, y3};
    }
    RingPoint add(const RingPoint& p, const RingPoint& q) const {
        return from_slope(mul(q.b - p.b, inv(q.a - p.a)), p, q.a);
    }
    RingPoint dbl(const RingPoint& p) const {
        const FpBig& f = C.f;
        P num = (scale(mul(p.a, p.a), f.from_int(3)) + P::constant(f, C.a4)) % h;
        P den = scale(mul(p.b, fx), f.from_int(2));
        return from_slope(mul(num, inv(den)), p, p.a);
    }
    RingPoint neg(const RingPoint& p) const { return {p.a, (P(C.f) - p.b) % h}; }
};

std::vector<mpz_class> key(const FpBig& f, const P& a) {
    std::vector<mpz_class> k;
    for (const auto& c : a.coeffs()) k.push_back(f.to_mpz(c));
    return k;
}

bool same(const FpBig& f, const P& a, const P& b) { return key(f, a) == key(f, b); }

std::vector<mpz_class> factor(mpz_class n) {
    std::vector<mpz_class> out;
    for (unsigned long p = 2; p < 1000 && p * p <= n; ++p)
        while (n % p == 0) {
            out.push_back(p);
            n /= p;
        }
    std::vector<mpz_class> stack{n};
    while (!stack.empty()) {
        mpz_class m = stack.back();
        stack.pop_back();
        if (m == 1) continue;
        if (mpz_probab_prime_p(m.get_mpz_t(), 30)) {
            out.push_back(m);
            continue;
        }
        mpz_class d = m;
        for (unsigned long c = 1; d == m; ++c) {
            mpz_class x = 2, y = 2;
            d = 1;
            while (d == 1) {
                x = (x * x + c) % m;
                y = (y * y + c) % m;
                y = (y * y + c) % m;
                mpz_class diff = abs(x - y);
                mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), m.get_mpz_t());
            }
        }
        stack.push_back(d);
        stack.push_back(m / d);
    }
    std::sort(out.begin(), out.end());
    return out;
}

mpz_class point_order(const Curve<FpBig>& C, const Point<FpBig>& pt, mpz_class N) {
    for (const auto& r : factor(N)) {
        if (N % r == 0 && point_mul(C, N / r, pt).inf) N /= r;
    }
    return N;
}

// Some N in [lo, lo + W] with N pt = O.
std::optional<mpz_class> annihilator(const Curve<FpBig>& C, const Point<FpBig>& pt, const mpz_class& lo,
                                     unsigned long W) {
    const FpBig& f = C.f;
    unsigned long m = static_cast<unsigned long>(std::sqrt(static_cast<double>(W))) + 1;
    std::unordered_map<unsigned long, std::pair<unsigned long, Point<FpBig>>> baby;
    Point<FpBig> R = pt;
    for (unsigned long b = 1; b < m; ++b) {
        if (R.inf) break;
        baby.emplace(f.to_mpz(R.x).get_ui(), std::make_pair(b, R));
        R = point_add(C, R, pt);
    }
    Point<FpBig> mP = point_mul(C, mpz_class(m), pt), mneg = point_neg(C, mP);
    Point<FpBig> T = point_neg(C, point_mul(C, lo, pt));
    for (unsigned long g = 0; g * m <= W + m; ++g) {
        std::optional<long long> k;
        if (T.inf) {
            k = static_cast<long long>(g * m);
        } else if (auto it = baby.find(f.to_mpz(T.x).get_ui()); it != baby.end()) {
            long long b = static_cast<long long>(it->second.first);
            k = point_eq(C, it->second.second, T) ? static_cast<long long>(g * m) + b
                                                   : static_cast<long long>(g * m) - b;
        }
        if (k && *k >= 0 && static_cast<unsigned long>(*k) <= W) {
            mpz_class N = lo + static_cast<long>(*k);
            if (point_mul(C, N, pt).inf) return N;
        }
        T = point_add(C, T, mneg);
    }
    return std::nullopt;
}

std::vector<mpz_class> multiples_in(const mpz_class& L, const mpz_class& lo, const mpz_class& hi) {
    std::vector<mpz_class> out;
    mpz_class k = (lo + L - 1) / L;
    for (mpz_class N = k * L; N <= hi && out.size() < 64; N += L) out.push_back(N);
    return out;
}

}  // namespace

const char* trace_kind_name(TraceKind k) {
    switch (k) {
    case TraceKind::Elkies: return "elkies";
    case TraceKind::Atkin: return "atkin";
    case TraceKind::Unusable: return "unusable";
    }
    return "?";
}

int trace_mod_2(const Curve<FpBig>& C) {
    const FpBig& f = C.f;
    P fx = curve_poly(C);
    P xq = powmod(P::x(f), f.modulus(), fx);
    return gcd(xq - P::x(f), fx).degree() > 0 ? 0 : 1;
}

long long frobenius_eigenvalue(const Curve<FpBig>& C, const P& h, long long ell) {
    const FpBig& f = C.f;
    const mpz_class& q = f.modulus();
    Ring R(C, h);
    RingPoint frob{powmod(P::x(f), q, h), powmod(R.fx, (q - 1) / 2, h)};
    RingPoint base{P::x(f) % h, P::constant(f, f.one())};

    long long m = std::min<long long>(static_cast<long long>(std::ceil(std::sqrt(static_cast<double>(ell)))),
                                      (ell - 1) / 2);
    std::vector<RingPoint> baby{base};
    std::map<std::vector<mpz_class>, long long> table{{key(f, base.a), 1}};
    for (long long i = 2; i <= m; ++i) {
        baby.push_back(i == 2 ? R.dbl(base) : R.add(baby.back(), base));
        table.emplace(key(f, baby.back().a), i);
    }
    RingPoint giant = R.neg(baby.back());
    RingPoint cur = frob;
    for (long long j = 0; j * m < ell + m; ++j) {
        auto it = table.find(key(f, cur.a));
        if (it != table.end()) {
            long long i = it->second;
            bool plus = same(f, cur.b, baby[static_cast<std::size_t>(i - 1)].b);
            long long lam = (((j * m + (plus ? i : -i)) % ell) + ell) % ell;
            if (lam == 0) throw sea_error("eigenvalue search returned zero");
            return lam;
        }
        cur = R.add(cur, giant);
    }
    throw sea_error("no Frobenius eigenvalue found");
}

TraceResult trace_mod_ell(const Curve<FpBig>& C, long long ell, const SeaOptions& opt) {
    const FpBig& f = C.f;
    const mpz_class& q = f.modulus();
    if (ell < 3 || ell % 2 == 0 || !is_prime(mpz_class(static_cast<long>(ell))))
        throw std::invalid_argument("trace_mod_ell: ell must be an odd prime");
    if (q == static_cast<long>(ell)) throw std::invalid_argument("trace_mod_ell: ell equals the characteristic");
    TraceResult out;
    out.ell = ell;
    mpz_class j = f.to_mpz(C.j_invariant());
    std::uint64_t seed = splitmix(opt.seed ^ static_cast<std::uint64_t>(ell));

    EvalRequest req;
    req.ell = ell;
    req.q = q;
    req.j = j;
    req.seed = seed;
    req.workers = opt.workers;
    req.select = opt.select;
    bool recon = opt.route == ElkiesRoute::Reconstruction;
    req.algorithm = recon ? Algorithm::Alg2 : Algorithm::Alg1;
    req.want_derivs = !recon;
    EvalResult R = evaluate(req);
    auto rts = sorted_roots(R.phi, q, seed);
    if (rts.empty()) {
        out.kind = TraceKind::Atkin;
        return out;
    }
    for (const auto& jt : rts) {
        try {
            auto iso = [&] {
                if (!recon) return normalized_isogeny(C, ell, jt, partials_from_eval(R, jt, q));
                EvalRequest back = req;
                back.j = jt;
                EvalResult S = evaluate(back);
                mpz_class PhiX = eval_mod(S.phi, j, q, 1);
                mpz_class PhiY = eval_mod(R.phi, jt, q, 1);
                return normalized_isogeny_from_codomain(C, ell, jt, PhiX, PhiY);
            };
            NormalizedIsogeny I = iso();
            long long lam = frobenius_eigenvalue(C, I.kernel, ell);
            mpz_class L(static_cast<long>(ell)), inv;
            mpz_class lm(static_cast<long>(lam));
            mpz_invert(inv.get_mpz_t(), lm.get_mpz_t(), L.get_mpz_t());
            mpz_class t = (lm + (q % L) * inv) % L;
            out.kind = TraceKind::Elkies;
            out.lambda = lam;
            out.t_mod = t.get_si();
            out.jt = jt;
            return out;
        } catch (const isogeny_error&) {
        } catch (const sea_error&) {
        }
    }
    out.kind = TraceKind::Unusable;
    return out;
}

SeaResult sea_count(const Curve<FpBig>& C, const SeaOptions& opt) {
    const FpBig& f = C.f;
    const mpz_class& q = f.modulus();
    if (C.is_singular()) throw std::invalid_argument("sea_count: singular curve");
    SeaResult res;
    bool special = f.is_zero(C.a4) || f.is_zero(C.a6);
    if (q <= 229 || special) {
        res.order = count_points_naive(C);
        res.trace = q + 1 - res.order;
        res.naive = true;
        return res;
    }
    mpz_class bound;
    mpz_sqrt(bound.get_mpz_t(), mpz_class(16 * q).get_mpz_t());  // floor(4 sqrt q)
    mpz_class hasse;
    mpz_sqrt(hasse.get_mpz_t(), mpz_class(4 * q).get_mpz_t());

    mpz_class M = 2, T = trace_mod_2(C);
    std::mt19937_64 rng(splitmix(opt.seed ^ 0x5ea));
    for (long long ell = 3; ell <= opt.max_ell; ell += 2) {
        if (!is_prime(mpz_class(static_cast<long>(ell))) || q == static_cast<long>(ell)) continue;
        TraceResult tr = trace_mod_ell(C, ell, opt);
        res.traces.push_back(tr);
        if (tr.kind != TraceKind::Elkies) continue;
        res.largest_ell = ell;
        mpz_class L(static_cast<long>(ell)), inv;
        mpz_invert(inv.get_mpz_t(), mpz_class(M % L).get_mpz_t(), L.get_mpz_t());
        mpz_class k = ((static_cast<long>(tr.t_mod) - T) % L + L) % L * inv % L;
        T += M * k;
        M *= L;
        if (M <= bound) continue;
        mpz_class t = T % M;
        if (2 * t > M) t -= M;
        if (abs(t) > hasse) continue;
        mpz_class N = q + 1 - t;
        bool ok = true;
        for (int i = 0; i < opt.verify_points && ok; ++i) ok = point_mul(C, N, random_point(C, rng)).inf;
        if (ok) {
            res.order = N;
            res.trace = t;
            return res;
        }
    }
    throw sea_error("sea_count: no consistent trace up to max_ell");
}

mpz_class count_points_sea(const Curve<FpBig>& C, const SeaOptions& opt) { return sea_count(C, opt).order; }

mpz_class count_points_naive(const Curve<FpBig>& C) {
    const FpBig& f = C.f;
    const mpz_class& q = f.modulus();
    if (C.is_singular()) throw std::invalid_argument("count_points_naive: singular curve");
    if (q < (mpz_class(1) << 26)) {
        std::uint64_t p = q.get_ui();
        std::vector<std::uint8_t> sq(p, 0);
        for (std::uint64_t x = 1; 2 * x <= p; ++x) sq[x * x % p] = 1;
        std::uint64_t a = f.to_mpz(C.a4).get_ui(), b = f.to_mpz(C.a6).get_ui();
        long long s = 0;
        for (std::uint64_t x = 0; x < p; ++x) {
            std::uint64_t r = ((x * x % p + a) % p * x + b) % p;
            if (r) s += sq[r] ? 1 : -1;
        }
        return q + 1 + static_cast<long>(s);
    }
    return count_points_bsgs(C);
}

mpz_class count_points_bsgs(const Curve<FpBig>& C, std::uint64_t seed) {
    const FpBig& f = C.f;
    const mpz_class& q = f.modulus();
    if (q >= (mpz_class(1) << 64)) throw std::invalid_argument("count_points_bsgs: field too large");
    mpz_class w;
    mpz_sqrt(w.get_mpz_t(), mpz_class(4 * q).get_mpz_t());
    mpz_class lo = q + 1 - w, hi = q + 1 + w;
    unsigned long W = mpz_class(hi - lo).get_ui();
    Curve<FpBig> tw = quadratic_twist(C);
    std::mt19937_64 rng(splitmix(seed ^ 0xb595));
    mpz_class L = 1, Lt = 1;
    for (int round = 0; round < 40; ++round) {
        for (int side = 0; side < 2; ++side) {
            const Curve<FpBig>& K = side ? tw : C;
            Point<FpBig> pt = random_point(K, rng);
            auto N0 = annihilator(K, pt, lo, W);
            if (!N0) throw sea_error("count_points_bsgs: no annihilator in the Hasse interval");
            mpz_class o = point_order(K, pt, *N0);
            mpz_class& acc = side ? Lt : L;
            mpz_lcm(acc.get_mpz_t(), acc.get_mpz_t(), o.get_mpz_t());
        }
        std::vector<mpz_class> cands;
        for (const auto& N : multiples_in(L, lo, hi))
            if ((2 * q + 2 - N) % Lt == 0) cands.push_back(N);
        if (cands.size() == 1) return cands.front();
    }
    throw sea_error("count_points_bsgs: ambiguous group order");
}

bool has_root(const std::vector<mpz_class>& phi, const mpz_class& q) {
    FpBig f(q);
    std::vector<E> c;
    for (const auto& v : phi) c.push_back(f.from_mpz(v));
    P g(f, c);
    if (g.degree() <= 0) return false;
    P yq = powmod(P::x(f), q, g);
    return gcd(yq - P::x(f), g).degree() > 0;
}

std::vector<bool> elkies_flags(long long ell, const mpz_class& q, const std::vector<mpz_class>& js,
                               const SeaOptions& opt) {
    EvalRequest req;
    req.ell = ell;
    req.q = q;
    req.algorithm = Algorithm::Alg1;
    req.seed = opt.seed;
    req.workers = opt.workers;
    req.select = opt.select;
    auto rs = evaluate_batch(req, js);
    std::vector<bool> out;
    for (const auto& r : rs) out.push_back(has_root(r.phi, q));
    return out;
}

}  // namespace modpoly
