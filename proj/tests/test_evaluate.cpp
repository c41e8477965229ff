#include "doctest.h"
#include "oracle.hpp"

#include "modpoly/crt.hpp"
#include "modpoly/evaluate.hpp"
#include "modpoly/ntheory.hpp"
#include "modpoly/volcano.hpp"

#include <cmath>
#include <random>

using namespace modpoly;

namespace {

EvalRequest request(long long ell, const mpz_class& q, const mpz_class& j, Algorithm a, bool derivs = false) {
    EvalRequest r;
    r.ell = ell;
    r.q = q;
    r.j = j;
    r.algorithm = a;
    r.want_derivs = derivs;
    return r;
}

std::vector<mpz_class> roots_of(const std::vector<mpz_class>& c, const mpz_class& q) {
    FpBig f(q);
    std::vector<FpBig::elem> e;
    for (const auto& v : c) e.push_back(f.from_mpz(v));
    std::vector<mpz_class> out;
    for (const auto& r : roots(Poly<FpBig>(f, e), 1)) out.push_back(f.to_mpz(r));
    std::sort(out.begin(), out.end());
    return out;
}

double log_abs(const mpz_class& x) {
    if (x == 0) return -1e300;
    long e;
    double m = mpz_get_d_2exp(&e, mpz_class(abs(x)).get_mpz_t());
    return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

}  // namespace

TEST_CASE("power_lift") {
    auto L = power_lift(mpz_class(123), mpz_class(1009), 6);
    REQUIRE(L.x.size() == 7);
    CHECK(L.x[0] == 1);
    CHECK(L.x[1] == 123);
    for (std::size_t i = 1; i < L.x.size(); ++i) CHECK(L.x[i] == L.x[i - 1] * 123 % 1009);
    auto N = power_lift(mpz_class(-5), mpz_class(7), 3);
    CHECK(N.x[1] == 2);
}

TEST_CASE("algorithm1 at (5, 1009, 123) with derivatives") {
    auto R = algorithm1(request(5, 1009, 123, Algorithm::Alg1, true));
    CHECK(R.phi == oracle::instantiate(5, 1009, 123, 0));
    CHECK(R.phi_x == oracle::instantiate(5, 1009, 123, 1));
    CHECK(R.phi_xx == oracle::instantiate(5, 1009, 123, 2));
    CHECK(R.phi.size() == 7);
    CHECK(R.phi.back() == 1);
    CHECK(R.algorithm == Algorithm::Alg1);
    CHECK(R.prime_count > 0);
}

TEST_CASE("all algorithms agree with the oracle on small cases") {
    for (auto [ell, q, j] : std::vector<std::tuple<long, long, long>>{{5, 1009, 123}, {5, 7, 3}, {3, 101, 0}, {7, 1728 + 5, 1728}}) {
        if (!is_prime(mpz_class(q))) continue;
        auto want = oracle::instantiate(ell, q, j);
        for (auto a : {Algorithm::Alg1, Algorithm::Alg2, Algorithm::Hybrid}) {
            CAPTURE(ell);
            CAPTURE(q);
            CHECK(evaluate(request(ell, q, j, a)).phi == want);
        }
    }
}

TEST_CASE("oracle grid for ell up to 13") {
    std::mt19937_64 rng(11);
    for (long ell : {3L, 5L, 7L, 11L, 13L}) {
        for (unsigned bits : {30u, 64u, 128u}) {
            mpz_class q = random_prime(bits, rng);
            mpz_class j = random_below(q, rng);
            for (auto a : {Algorithm::Alg1, Algorithm::Alg2, Algorithm::Hybrid}) {
                bool d = a != Algorithm::Alg2;
                auto R = evaluate(request(ell, q, j, a, d));
                CAPTURE(ell);
                CAPTURE(bits);
                CHECK(R.phi == oracle::instantiate(ell, q, j, 0));
                if (d) {
                    CHECK(R.phi_x == oracle::instantiate(ell, q, j, 1));
                    CHECK(R.phi_xx == oracle::instantiate(ell, q, j, 2));
                }
            }
        }
    }
}

TEST_CASE("hybrid matches algorithm1 on random inputs with ell = 7") {
    std::mt19937_64 rng(21);
    for (int i = 0; i < 20; ++i) {
        mpz_class q = random_prime(30 + static_cast<unsigned>(rng() % 60), rng);
        mpz_class j = random_below(q, rng);
        CHECK(hybrid(request(7, q, j, Algorithm::Hybrid)).phi == algorithm1(request(7, q, j, Algorithm::Alg1)).phi);
    }
}

TEST_CASE("prime counts follow the height bounds") {
    mpz_class q("340282366920938463463374607431768211507");
    auto a1 = evaluate(request(7, q, 5, Algorithm::Alg1));
    auto a2 = evaluate(request(7, q, 5, Algorithm::Alg2));
    auto hy = evaluate(request(7, q, 5, Algorithm::Hybrid));
    CHECK(hy.prime_count == a1.prime_count);
    CHECK(hy.prime_count < a2.prime_count);
    CHECK(a2.B > a1.B);
}

TEST_CASE("results do not depend on the worker count") {
    std::mt19937_64 rng(5);
    mpz_class q = random_prime(90, rng), j = random_below(q, rng);
    for (auto a : {Algorithm::Alg1, Algorithm::Alg2, Algorithm::Hybrid}) {
        std::vector<std::vector<mpz_class>> outs;
        for (unsigned w : {1u, 4u, 16u}) {
            auto r = request(11, q, j, a, a != Algorithm::Alg2);
            r.workers = w;
            r.seed = 99;
            auto R = evaluate(r);
            outs.push_back(R.phi);
            if (a != Algorithm::Alg2) outs.back().insert(outs.back().end(), R.phi_xx.begin(), R.phi_xx.end());
        }
        CHECK(outs[0] == outs[1]);
        CHECK(outs[0] == outs[2]);
    }
}

TEST_CASE("batch evaluation matches single evaluation") {
    mpz_class q("1000000007");
    std::vector<mpz_class> js{1, 2, 12345, 999999999, 0};
    for (auto a : {Algorithm::Alg1, Algorithm::Alg2, Algorithm::Hybrid}) {
        auto r = request(5, q, 0, a);
        auto B = evaluate_batch(r, js);
        REQUIRE(B.size() == js.size());
        for (std::size_t i = 0; i < js.size(); ++i) CHECK(B[i].phi == oracle::instantiate(5, q, js[i]));
    }
}

TEST_CASE("invalid requests are rejected") {
    CHECK_THROWS_AS(evaluate(request(4, 1009, 1, Algorithm::Alg1)), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(request(2, 1009, 1, Algorithm::Alg1)), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(request(5, 1001, 1, Algorithm::Alg1)), std::invalid_argument);
    CHECK_THROWS_AS(evaluate(request(5, 1009, 1, Algorithm::Alg2, true)), std::invalid_argument);
    CHECK(parse_algorithm("2") == Algorithm::Alg2);
    CHECK(parse_algorithm("hybrid") == Algorithm::Hybrid);
    CHECK(!parse_algorithm("3"));
}

TEST_CASE("height bound covers the lifted coefficients") {
    std::mt19937_64 rng(3);
    for (long ell : {5L, 7L}) {
        const auto& P = bootstrap_modpoly(static_cast<int>(ell));
        for (int trial = 0; trial < 3; ++trial) {
            mpz_class q = random_prime(40 + 20 * static_cast<unsigned>(trial), rng);
            mpz_class j = random_below(q, rng);
            double B = alg_height_bound(ell, q, BoundKind::Alg1).B;
            auto L = power_lift(j, q, ell + 1);
            auto so = find_suitable_order(ell);
            auto primes = find_suitable_primes(so, B);
            std::vector<mpz_class> ps;
            double logsum = 0;
            for (const auto& pp : primes) {
                ps.push_back(pp.p);
                logsum += log_abs(pp.p);
            }
            CHECK(logsum >= B + std::log(4.0));
            CHECK(logsum - log_abs(primes.back().p) < B + std::log(4.0));
            for (long y = 0; y <= ell + 1; ++y) {
                for (int d = 0; d <= 2; ++d) {
                    mpz_class c = 0;
                    for (long i = d; i <= ell + 1; ++i) {
                        mpz_class w = 1;
                        for (int k = 0; k < d; ++k) w *= i - k;
                        c += P.at(static_cast<int>(i), static_cast<int>(y)) * w * L.x[i - d];
                    }
                    CHECK(log_abs(c) <= B);
                    std::vector<mpz_class> res;
                    for (const auto& p : ps) res.push_back(c % p);
                    CHECK(crt_direct(ps, res) == c);
                }
            }
        }
    }
}

TEST_CASE("roots of phi see j as a root of the reverse evaluation") {
    std::mt19937_64 rng(8);
    int checked = 0;
    for (int trial = 0; trial < 30 && checked < 6; ++trial) {
        mpz_class q = random_prime(40, rng), j = random_below(q, rng);
        long ell = trial % 2 ? 5 : 7;
        auto R = evaluate(request(ell, q, j, Algorithm::Alg1));
        for (const auto& jt : roots_of(R.phi, q)) {
            auto S = evaluate(request(ell, q, jt, Algorithm::Hybrid));
            auto rs = roots_of(S.phi, q);
            CHECK(std::find(rs.begin(), rs.end(), j) != rs.end());
            ++checked;
        }
    }
    CHECK(checked > 0);
}

TEST_CASE("normalized isogenies from the modular partials") {
    std::mt19937_64 rng(17);
    mpz_class q("2305843009213693951");
    FpBig f(q);
    int done = 0;
    for (int trial = 0; trial < 60 && done < 6; ++trial) {
        long ell = std::vector<long>{5, 7, 11}[static_cast<std::size_t>(trial % 3)];
        Curve<FpBig> E(f, f.random(rng), f.random(rng));
        mpz_class j = f.to_mpz(E.j_invariant());
        auto R = evaluate(request(ell, q, j, Algorithm::Alg1, true));
        auto rts = roots_of(R.phi, q);
        if (rts.empty()) continue;
        mpz_class jt = rts.front();
        auto P = partials_from_eval(R, jt, q);
        auto I = normalized_isogeny(E, ell, jt, P);
        CAPTURE(ell);
        CHECK(I.kernel.degree() == (ell - 1) / 2);
        CHECK((division_poly(E, static_cast<unsigned long>(ell)) % I.kernel).degree() < 0);
        CHECK(f.to_mpz(I.codomain.j_invariant()) == jt);
        auto V = velu_codomain_from_kernel(E, I.kernel);
        CHECK(f.eq(V.a4, I.codomain.a4));
        CHECK(f.eq(V.a6, I.codomain.a6));

        // codomain formulas recomputed from the intermediates
        auto l = f.from_int(ell);
        auto mt = f.from_mpz(I.mt), kt = f.from_mpz(I.kt);
        CHECK(f.eq(f.mul(f.from_mpz(I.jtp), f.inv(f.from_mpz(jt))), mt));
        CHECK(f.eq(f.mul(f.from_mpz(I.jtp), f.inv(f.sub(f.from_int(1728), f.from_mpz(jt)))), kt));
        auto l4 = f.sqr(f.sqr(l));
        CHECK(f.eq(f.mul(I.codomain.a4, f.from_int(48)), f.mul(l4, f.mul(mt, kt))));
        CHECK(f.eq(f.mul(I.codomain.a6, f.from_int(864)), f.mul(f.mul(l4, f.sqr(l)), f.mul(f.sqr(mt), kt))));

        auto I2 = normalized_isogeny_from_codomain(E, ell, jt, P.X, P.Y);
        CHECK(I2.kernel.coeffs() == I.kernel.coeffs());

        // dual: normalized isogeny back to (l^4 A, l^6 B)
        auto S = evaluate(request(ell, q, jt, Algorithm::Alg1, true));
        auto J = normalized_isogeny(I.codomain, ell, j, partials_from_eval(S, j, q));
        CHECK(f.eq(J.codomain.a4, f.mul(l4, E.a4)));
        CHECK(f.eq(J.codomain.a6, f.mul(f.mul(l4, f.sqr(l)), E.a6)));
        KernelIsogeny<FpBig> phi(E, I.kernel, static_cast<unsigned long>(ell));
        KernelIsogeny<FpBig> psi(I.codomain, J.kernel, static_cast<unsigned long>(ell));
        for (int k = 0; k < 10; ++k) {
            auto Pt = random_point(E, rng);
            auto Q = phi(Pt);
            CHECK(on_curve(I.codomain, Q));
            auto Rr = psi(Q);
            auto T = point_mul(E, mpz_class(ell), Pt);
            if (T.inf) {
                CHECK(Rr.inf);
                continue;
            }
            auto l2 = f.sqr(l);
            CHECK(f.eq(Rr.x, f.mul(l2, T.x)));
            auto ly = f.mul(f.mul(l2, l), T.y);
            CHECK((f.eq(Rr.y, ly) || f.eq(Rr.y, f.neg(ly))));
        }
        ++done;
    }
    CHECK(done >= 3);
}

TEST_CASE("kernel isogeny map agrees with Velu") {
    FpBig f(mpz_class(10007));
    std::mt19937_64 rng(2);
    int done = 0;
    while (done < 3) {
        Curve<FpBig> E(f, f.random(rng), f.random(rng));
        if (E.is_singular()) continue;
        mpz_class N = count_points_legendre(E);
        if (N % 5 != 0) continue;
        auto V = velu(E, ell_torsion_point(E, 5, N, rng), 5);
        KernelIsogeny<FpBig> M(E, V.kernel_poly, 5);
        for (int k = 0; k < 10; ++k) {
            auto P = random_point(E, rng);
            auto x = V(P), y = M(P);
            CHECK(x.inf == y.inf);
            if (!x.inf) CHECK(point_eq(V.codomain, x, y));
        }
        ++done;
    }
}

TEST_CASE("normalized isogeny rejects degenerate inputs") {
    mpz_class q("1000000007");
    FpBig f(q);
    Curve<FpBig> E0(f, f.zero(), f.one());
    ModularPartials P{1, 1, 0, 0, 0};
    CHECK_THROWS_AS(normalized_isogeny(E0, 5, 7, P), isogeny_error);
    Curve<FpBig> E(f, f.from_u64(2), f.from_u64(3));
    CHECK_THROWS_AS(normalized_isogeny(E, 5, 0, P), isogeny_error);
    CHECK_THROWS_AS(normalized_isogeny(E, 5, 1728, P), isogeny_error);
    ModularPartials Z{1, 0, 0, 0, 0};
    CHECK_THROWS_AS(normalized_isogeny(E, 5, 7, Z), isogeny_error);
    CHECK_THROWS_AS(normalized_isogeny_from_codomain(E, 5, 7, 1, 0), isogeny_error);
}
