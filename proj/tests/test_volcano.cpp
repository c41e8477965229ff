#include <doctest.h>

#include "modpoly/classpoly.hpp"
#include "modpoly/ntheory.hpp"
#include "modpoly/poly.hpp"
#include "modpoly/volcano.hpp"

#include <algorithm>
#include <set>
#include <map>
#include <random>

using namespace modpoly;

namespace {

std::shared_ptr<const VolcanoSetup> setup_for(long long ell) {
    static std::map<long long, std::shared_ptr<const VolcanoSetup>> cache;
    auto it = cache.find(ell);
    if (it != cache.end()) return it->second;
    auto S = make_volcano_setup(find_suitable_order(ell));
    cache[ell] = S;
    return S;
}

std::vector<PrimePackage> first_primes(const VolcanoSetup& S, int n) {
    PrimeScanner sc(S.ell(), S.so.O.D, S.so.v, 1LL << 31);
    std::vector<PrimePackage> out;
    for (int i = 0; i < n; ++i) out.push_back(*sc.next());
    return out;
}

std::uint64_t red(const mpz_class& a, const mpz_class& p) {
    mpz_class r = a % p;
    if (r < 0) r += p;
    return r.get_ui();
}

// Roots of Phi_ell(x, Y) mod p from the bootstrap table, with multiplicity handled by the caller.
Poly<Fp64> oracle_row(const Fp64& f, const BivarIntPoly& P, std::uint64_t x) {
    std::vector<Fp64::elem> c(P.deg + 1, f.zero());
    auto xv = f.from_u64(x);
    auto xp = f.one();
    for (int i = 0; i <= P.deg; ++i) {
        for (int j = 0; j <= P.deg; ++j) c[j] = f.add(c[j], f.mul(f.from_mpz(P.at(i, j)), xp));
        xp = f.mul(xp, xv);
    }
    return Poly<Fp64>(f, c);
}

std::vector<std::uint64_t> canon(const Fp64& f, const std::vector<Fp64::elem>& v) {
    std::vector<std::uint64_t> out;
    for (auto x : v) out.push_back(f.to_u64(x));
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

TEST_CASE("volcano: setup for ell=5") {
    auto S = setup_for(5);
    CHECK(S->so.O.D == -71);
    CHECK(S->kron == 1);
    CHECK(S->children() == 4);
    CHECK(S->siblings() == 2);
    CHECK(S->gamma.order() == 7);
    CHECK(S->b_alpha == 3);
    for (long long e = 0; e < S->so.h_floor; ++e) CHECK(coset_index(S->gamma, Word{e}) == e % S->so.h);
}

TEST_CASE("volcano: surface enumeration at p=1811") {
    auto S = setup_for(5);
    PrimePackage pp{1811, 12, 2, 5, -71};
    VolcanoContext ctx(S, pp, 1);
    auto roots71 = class_poly_roots(QuadOrder::from_disc(-71), 1811);
    REQUIRE(ctx.surface_roots().size() == roots71.size());
    const auto& W = ctx.enumerate_surface();
    CHECK(W.vertices.size() == 7);
    CHECK(W.vertices.front() == roots71.front().get_ui());
    auto sorted = W.vertices;
    std::sort(sorted.begin(), sorted.end());
    CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
    for (auto w : W.vertices) CHECK(ctx.on_surface(w));
    const Fp64& f = ctx.field();
    for (std::size_t k = 0; k < W.vertices.size(); ++k) {
        CHECK(W.siblings[k].size() == 2);
        auto r = roots(oracle_row(f, bootstrap_modpoly(5), W.vertices[k]), 7);
        std::vector<std::uint64_t> on;
        for (auto x : canon(f, r))
            if (ctx.on_surface(x)) on.push_back(x);
        auto sib = W.siblings[k];
        std::sort(sib.begin(), sib.end());
        sib.erase(std::unique(sib.begin(), sib.end()), sib.end());
        CHECK(on == sib);
    }
}

TEST_CASE("volcano: descend and ascend at p=1811") {
    auto S = setup_for(5);
    PrimePackage pp{1811, 12, 2, 5, -71};
    VolcanoContext ctx(S, pp, 2);
    const Fp64& f = ctx.field();
    auto floor_roots = class_poly_roots(QuadOrder::from_disc(-1775), 1811);
    for (auto w : ctx.surface_roots()) {
        auto j = ctx.descend_to_floor(w);
        CHECK_FALSE(ctx.on_surface(j));
        CHECK(std::find(floor_roots.begin(), floor_roots.end(), mpz_class(static_cast<unsigned long>(j))) !=
              floor_roots.end());
        CHECK(f.is_zero(oracle_row(f, bootstrap_modpoly(5), w).eval(f.from_u64(j))));
        CHECK(ctx.ascend_to_surface(j) == w);
    }
    CHECK_THROWS_AS(ctx.descend_to_floor(floor_roots.front().get_ui()), volcano_error);
}

TEST_CASE("volcano: buckets partition the floor by parent") {
    for (long long ell : {3LL, 5LL, 7LL}) {
        auto S = setup_for(ell);
        for (const auto& pp : first_primes(*S, 3)) {
            VolcanoContext ctx(S, pp, 3);
            const Fp64& f = ctx.field();
            auto B = ctx.bucket_structure();
            REQUIRE(static_cast<long long>(B.size()) == ell + 2);
            std::vector<std::uint64_t> parents;
            for (const auto& b : B) {
                CAPTURE(ell);
                CHECK(static_cast<long long>(b.children.size()) == S->children());
                CHECK(static_cast<long long>(b.siblings.size()) == S->siblings());
                parents.push_back(b.parent);
                // the children are exactly the off-surface roots of Phi_ell(parent, Y)
                auto r = canon(f, roots(oracle_row(f, bootstrap_modpoly(static_cast<int>(ell)), b.parent), 11));
                std::vector<std::uint64_t> off;
                for (auto x : r)
                    if (!ctx.on_surface(x)) off.push_back(x);
                auto kids = b.children;
                std::sort(kids.begin(), kids.end());
                CHECK(kids == off);
                for (std::size_t c = 0; c < b.children.size(); ++c) {
                    CHECK(ctx.ascend_to_surface(b.children[c]) == b.parent);
                    CHECK(b.exponents[c] % S->so.h == b.exponents[0] % S->so.h);
                }
            }
            std::sort(parents.begin(), parents.end());
            CHECK(std::adjacent_find(parents.begin(), parents.end()) == parents.end());
        }
    }
}

TEST_CASE("volcano: phi_mod_p matches the bootstrap polynomial") {
    for (long long ell : {3LL, 5LL, 7LL}) {
        auto S = setup_for(ell);
        const auto& Phi = bootstrap_modpoly(static_cast<int>(ell));
        for (const auto& pp : first_primes(*S, 5)) {
            VolcanoContext ctx(S, pp, 4);
            auto M = ctx.phi_mod_p();
            bool same = true, sym = true;
            for (int i = 0; i <= ell + 1; ++i)
                for (int j = 0; j <= ell + 1; ++j) {
                    same = same && M[i][j] == red(Phi.at(i, j), pp.p);
                    sym = sym && M[i][j] == M[j][i];
                }
            CAPTURE(ell);
            CAPTURE(pp.p);
            CHECK(same);
            CHECK(sym);
            CHECK(M[ell + 1][0] == 1);
            CHECK(M[0][ell + 1] == 1);
            for (int i = 1; i <= ell + 1; ++i) CHECK(M[i][ell + 1] == 0);
        }
    }
}

TEST_CASE("volcano: eval_online and eval_powers agree with phi_mod_p") {
    auto S = setup_for(5);
    PrimePackage pp{1811, 12, 2, 5, -71};
    VolcanoContext ctx(S, pp, 5);
    const Fp64& f = ctx.field();
    auto M = ctx.phi_mod_p();
    std::mt19937_64 rng(8);
    auto instantiate = [&](std::uint64_t x) {
        std::vector<std::uint64_t> out(7, 0);
        for (int j = 0; j < 7; ++j) {
            auto acc = f.zero(), xp = f.one();
            for (int i = 0; i < 7; ++i) {
                acc = f.add(acc, f.mul(f.from_u64(M[i][j]), xp));
                xp = f.mul(xp, f.from_u64(x));
            }
            out[j] = f.to_u64(acc);
        }
        return out;
    };
    for (int k = 0; k < 20; ++k) {
        std::uint64_t x = rng() % 1811;
        auto on = ctx.eval_online(x);
        CHECK(on == instantiate(x));
        CHECK(on.back() == 1);
        std::vector<std::uint64_t> xs;
        auto xp = f.one();
        for (int i = 1; i <= 6; ++i) {
            xp = f.mul(xp, f.from_u64(x));
            xs.push_back(f.to_u64(xp));
        }
        CHECK(ctx.eval_powers(xs) == on);
    }
    std::vector<std::uint64_t> col(7);
    for (int j = 0; j < 7; ++j) col[j] = M[0][j];
    CHECK(ctx.eval_powers(std::vector<std::uint64_t>(6, 0)) == col);
    for (int k = 0; k < 5; ++k) {
        std::vector<std::uint64_t> xs;
        for (int i = 0; i < 6; ++i) xs.push_back(rng() % 1811);
        CHECK(ctx.eval_powers(xs).back() == 1);
    }
    CHECK_THROWS(ctx.eval_powers(std::vector<std::uint64_t>(5, 0)));

    const auto& W = ctx.enumerate_surface();
    for (std::size_t k = 0; k < W.vertices.size(); ++k) {
        auto c = ctx.eval_online(W.vertices[k]);
        std::vector<Fp64::elem> ce;
        for (auto v : c) ce.push_back(f.from_u64(v));
        Poly<Fp64> P(f, ce);
        for (auto s : W.siblings[k]) CHECK(f.is_zero(P.eval(f.from_u64(s))));
    }
}

TEST_CASE("volcano: rejects mismatched primes") {
    auto S = setup_for(5);
    PrimePackage bad{1811, 12, 2, 7, -71};
    CHECK_THROWS_AS(VolcanoContext(S, bad), volcano_error);
    PrimePackage nonprime{1813, 12, 2, 5, -71};
    CHECK_THROWS_AS(VolcanoContext(S, nonprime), volcano_error);
}

TEST_CASE("volcano: complete census covers the whole floor") {
    for (long long ell : {5LL, 7LL, 11LL}) {
        auto S = setup_for(ell);
        for (const auto& pp : first_primes(*S, 2)) {
            VolcanoContext ctx(S, pp, 5);
            auto B = ctx.bucket_structure(true);
            REQUIRE(static_cast<long long>(B.size()) == S->so.h);
            std::set<std::uint64_t> parents, floor;
            for (const auto& b : B) {
                CHECK(static_cast<long long>(b.children.size()) == S->children());
                parents.insert(b.parent);
                floor.insert(b.children.begin(), b.children.end());
            }
            const auto& w = ctx.enumerate_surface().vertices;
            CHECK(parents == std::set<std::uint64_t>(w.begin(), w.end()));
            CHECK(static_cast<long long>(floor.size()) == S->so.h_floor);
        }
    }
}
