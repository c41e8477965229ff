#pragma once

#include "modpoly/field.hpp"

#include <optional>
#include <random>

namespace modpoly {

bool is_prime(const mpz_class& n);
bool is_prime_u64(std::uint64_t n);

mpz_class mod_exp(const mpz_class& base, const mpz_class& exp, const mpz_class& m);

std::optional<mpz_class> sqrt_mod(const mpz_class& a, const mpz_class& p);

int kronecker(const mpz_class& a, const mpz_class& n);

// Uniform random prime with exactly `bits` bits.
mpz_class random_prime(unsigned bits, std::mt19937_64& rng);
mpz_class random_below(const mpz_class& n, std::mt19937_64& rng);

// Tonelli-Shanks in an arbitrary prime field.
template <class F>
std::optional<typename F::elem> field_sqrt(const F& f, const typename F::elem& a) {
    using E = typename F::elem;
    if (f.is_zero(a)) return f.zero();
    mpz_class p = f.modulus();
    mpz_class half = (p - 1) / 2;
    if (!f.eq(f.pow(a, half), f.one())) return std::nullopt;
    mpz_class q = p - 1;
    unsigned s = 0;
    while (mpz_even_p(q.get_mpz_t())) {
        q >>= 1;
        ++s;
    }
    if (s == 1) return f.pow(a, mpz_class((p + 1) / 4));
    E z = f.from_u64(2);
    while (f.eq(f.pow(z, half), f.one())) z = f.add(z, f.one());
    E c = f.pow(z, q);
    E r = f.pow(a, mpz_class((q + 1) / 2));
    E t = f.pow(a, q);
    unsigned m = s;
    while (!f.eq(t, f.one())) {
        unsigned i = 0;
        E t2 = t;
        while (!f.eq(t2, f.one())) {
            t2 = f.sqr(t2);
            ++i;
        }
        E b = c;
        for (unsigned k = 0; k + i + 1 < m; ++k) b = f.sqr(b);
        r = f.mul(r, b);
        c = f.sqr(b);
        t = f.mul(t, c);
        m = i;
    }
    return r;
}

template <class F>
int field_legendre(const F& f, const typename F::elem& a) {
    if (f.is_zero(a)) return 0;
    return f.eq(f.pow(a, mpz_class((f.modulus() - 1) / 2)), f.one()) ? 1 : -1;
}

}  // namespace modpoly
