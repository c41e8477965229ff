#include "modpoly/field.hpp"
#include "modpoly/ntheory.hpp"

namespace modpoly {

Modulus::Modulus(const mpz_class& v, bool check_prime) : value_(v) {
    if (v < 3 || mpz_even_p(v.get_mpz_t())) throw std::invalid_argument("modulus must be odd and >= 3");
    if (check_prime) {
        if (!is_prime(v)) throw std::invalid_argument("modulus " + v.get_str() + " is not prime");
        checked_ = true;
    }
}

mpz_class Fp64::u64_to_mpz(std::uint64_t x) {
    mpz_class r;
    mpz_import(r.get_mpz_t(), 1, 1, sizeof(x), 0, 0, &x);
    return r;
}

std::uint64_t Fp64::mpz_to_u64(const mpz_class& x) {
    if (sgn(x) < 0 || mpz_sizeinbase(x.get_mpz_t(), 2) > 64) throw std::out_of_range("value exceeds 64 bits");
    std::uint64_t r = 0;
    mpz_export(&r, nullptr, 1, sizeof(r), 0, 0, x.get_mpz_t());
    return r;
}

Fp64::Fp64(std::uint64_t p) : p_(p) {
    if (p < 3 || p % 2 == 0 || p >> 63) throw std::invalid_argument("Fp64 needs an odd modulus below 2^63");
    std::uint64_t inv = p;  // Newton iteration for p^{-1} mod 2^64
    for (int i = 0; i < 6; ++i) inv *= 2 - p * inv;
    pinv_ = ~inv + 1;
    one_ = (0 - p) % p;
    r2_ = static_cast<std::uint64_t>((static_cast<unsigned __int128>(one_) * one_) % p);
}

Fp64::elem Fp64::from_mpz(const mpz_class& x) const {
    mpz_class r;
    mpz_mod(r.get_mpz_t(), x.get_mpz_t(), u64_to_mpz(p_).get_mpz_t());
    return from_u64(mpz_to_u64(r));
}

Fp64::elem Fp64::inv(elem a) const {
    std::uint64_t x = redc(a);
    if (x == 0) throw not_invertible();
    __int128 r0 = p_, r1 = x, s0 = 0, s1 = 1;
    while (r1 != 0) {
        __int128 q = r0 / r1;
        __int128 t = r0 - q * r1;
        r0 = r1;
        r1 = t;
        t = s0 - q * s1;
        s0 = s1;
        s1 = t;
    }
    if (r0 != 1) throw not_invertible();
    if (s0 < 0) s0 += p_;
    return from_u64(static_cast<std::uint64_t>(s0));
}

Fp64::elem Fp64::pow(elem a, std::uint64_t e) const {
    elem r = one_;
    while (e) {
        if (e & 1) r = mul(r, a);
        a = mul(a, a);
        e >>= 1;
    }
    return r;
}

Fp64::elem Fp64::pow(elem a, const mpz_class& e) const {
    if (sgn(e) < 0) throw std::invalid_argument("negative exponent");
    if (mpz_sizeinbase(e.get_mpz_t(), 2) <= 64) return pow(a, mpz_to_u64(e));
    elem r = one_;
    for (std::size_t i = mpz_sizeinbase(e.get_mpz_t(), 2); i-- > 0;) {
        r = mul(r, r);
        if (mpz_tstbit(e.get_mpz_t(), i)) r = mul(r, a);
    }
    return r;
}

FpBig::elem FpBig::random(std::mt19937_64& rng) const { return random_below(*p_, rng); }

mpz_class random_below(const mpz_class& n, std::mt19937_64& rng) {
    std::size_t words = mpz_sizeinbase(n.get_mpz_t(), 2) / 64 + 2;
    mpz_class r = 0;
    for (std::size_t i = 0; i < words; ++i) {
        r <<= 64;
        r += Fp64::u64_to_mpz(rng());
    }
    return r % n;
}

namespace {

std::uint64_t mulmod64(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

std::uint64_t powmod64(std::uint64_t a, std::uint64_t e, std::uint64_t m) {
    std::uint64_t r = 1 % m;
    a %= m;
    while (e) {
        if (e & 1) r = mulmod64(r, a, m);
        a = mulmod64(a, a, m);
        e >>= 1;
    }
    return r;
}

}  // namespace

bool is_prime_u64(std::uint64_t n) {
    if (n < 2) return false;
    static const std::uint64_t small[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (auto q : small) {
        if (n == q) return true;
        if (n % q == 0) return false;
    }
    std::uint64_t d = n - 1;
    int s = 0;
    while (d % 2 == 0) {
        d /= 2;
        ++s;
    }
    // these bases are deterministic for n < 3.3e24
    for (auto a : small) {
        std::uint64_t x = powmod64(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool comp = true;
        for (int r = 1; r < s; ++r) {
            x = mulmod64(x, x, n);
            if (x == n - 1) {
                comp = false;
                break;
            }
        }
        if (comp) return false;
    }
    return true;
}

bool is_prime(const mpz_class& n) {
    if (sgn(n) <= 0) return false;
    if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) return is_prime_u64(Fp64::mpz_to_u64(n));
    // BPSW plus 64 Miller-Rabin rounds
    return mpz_probab_prime_p(n.get_mpz_t(), 88) > 0;
}

mpz_class mod_exp(const mpz_class& base, const mpz_class& exp, const mpz_class& m) {
    if (m < 2) throw std::invalid_argument("mod_exp: modulus < 2");
    mpz_class r;
    mpz_powm(r.get_mpz_t(), base.get_mpz_t(), exp.get_mpz_t(), m.get_mpz_t());
    return r;
}

std::optional<mpz_class> sqrt_mod(const mpz_class& a, const mpz_class& p) {
    FpBig f(p);
    auto r = field_sqrt(f, f.from_mpz(a));
    if (!r) return std::nullopt;
    return *r;
}

int kronecker(const mpz_class& a, const mpz_class& n) { return mpz_kronecker(a.get_mpz_t(), n.get_mpz_t()); }

mpz_class random_prime(unsigned bits, std::mt19937_64& rng) {
    if (bits < 2) throw std::invalid_argument("random_prime: bits < 2");
    mpz_class lo = mpz_class(1) << (bits - 1);
    for (;;) {
        mpz_class c = lo + random_below(lo, rng);
        if (is_prime(c)) return c;
    }
}

}  // namespace modpoly
