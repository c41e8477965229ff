#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>

namespace modpoly {

class Modulus {
public:
    Modulus() = default;
    explicit Modulus(const mpz_class& v, bool check_prime = true);

    const mpz_class& value() const { return value_; }
    bool primality_checked() const { return checked_; }
    bool fits_u64() const { return value_ < (mpz_class(1) << 63); }
    std::string str() const { return value_.get_str(); }

    bool operator==(const Modulus& o) const { return value_ == o.value_; }

private:
    mpz_class value_{3};
    bool checked_ = false;
};

struct modulus_mismatch : std::invalid_argument {
    modulus_mismatch() : std::invalid_argument("modulus mismatch") {}
};

struct not_invertible : std::domain_error {
    not_invertible() : std::domain_error("element not invertible") {}
};

// Prime field with p < 2^63, elements kept in Montgomery form.
class Fp64 {
public:
    using elem = std::uint64_t;

    explicit Fp64(std::uint64_t p);
    explicit Fp64(const mpz_class& p) : Fp64(mpz_to_u64(p)) {}

    std::uint64_t p() const { return p_; }
    mpz_class modulus() const { return u64_to_mpz(p_); }
    bool same(const Fp64& o) const { return p_ == o.p_; }

    elem zero() const { return 0; }
    elem one() const { return one_; }

    elem from_u64(std::uint64_t x) const { return mul(x % p_, r2_); }
    elem from_int(long long x) const {
        if (x >= 0) return from_u64(static_cast<std::uint64_t>(x));
        return neg(from_u64(static_cast<std::uint64_t>(-(x + 1)) + 1));
    }
    elem from_mpz(const mpz_class& x) const;
    std::uint64_t to_u64(elem a) const { return redc(a); }
    mpz_class to_mpz(elem a) const { return u64_to_mpz(redc(a)); }

    bool is_zero(elem a) const { return a == 0; }
    bool eq(elem a, elem b) const { return a == b; }

    elem add(elem a, elem b) const {
        std::uint64_t s = a + b;
        return s >= p_ ? s - p_ : s;
    }
    elem sub(elem a, elem b) const { return a >= b ? a - b : a + p_ - b; }
    elem neg(elem a) const { return a == 0 ? 0 : p_ - a; }
    elem mul(elem a, elem b) const { return redc(static_cast<unsigned __int128>(a) * b); }
    elem sqr(elem a) const { return mul(a, a); }
    elem inv(elem a) const;
    elem pow(elem a, std::uint64_t e) const;
    elem pow(elem a, const mpz_class& e) const;

    elem random(std::mt19937_64& rng) const { return from_u64(rng()); }

    static mpz_class u64_to_mpz(std::uint64_t x);
    static std::uint64_t mpz_to_u64(const mpz_class& x);

private:
    std::uint64_t redc(unsigned __int128 t) const {
        std::uint64_t m = static_cast<std::uint64_t>(t) * pinv_;
        unsigned __int128 s = (t + static_cast<unsigned __int128>(m) * p_) >> 64;
        std::uint64_t r = static_cast<std::uint64_t>(s);
        return r >= p_ ? r - p_ : r;
    }

    std::uint64_t p_;
    std::uint64_t pinv_;  // -p^{-1} mod 2^64
    std::uint64_t r2_;    // 2^128 mod p
    std::uint64_t one_;   // 2^64 mod p
};

// Prime field of arbitrary size; elements are canonical residues.
class FpBig {
public:
    using elem = mpz_class;

    explicit FpBig(const mpz_class& p) : p_(std::make_shared<const mpz_class>(p)) {}
    explicit FpBig(const Modulus& m) : FpBig(m.value()) {}

    const mpz_class& modulus() const { return *p_; }
    bool same(const FpBig& o) const { return p_ == o.p_ || *p_ == *o.p_; }

    elem zero() const { return 0; }
    elem one() const { return 1; }

    elem from_u64(std::uint64_t x) const { return from_mpz(Fp64::u64_to_mpz(x)); }
    elem from_int(long long x) const { return from_mpz(mpz_class(static_cast<long>(x))); }
    elem from_mpz(const mpz_class& x) const {
        mpz_class r;
        mpz_mod(r.get_mpz_t(), x.get_mpz_t(), p_->get_mpz_t());
        return r;
    }
    const mpz_class& to_mpz(const elem& a) const { return a; }

    bool is_zero(const elem& a) const { return sgn(a) == 0; }
    bool eq(const elem& a, const elem& b) const { return a == b; }

    elem add(const elem& a, const elem& b) const {
        mpz_class s = a + b;
        if (s >= *p_) s -= *p_;
        return s;
    }
    elem sub(const elem& a, const elem& b) const {
        mpz_class s = a - b;
        if (sgn(s) < 0) s += *p_;
        return s;
    }
    elem neg(const elem& a) const { return sgn(a) == 0 ? mpz_class(0) : mpz_class(*p_ - a); }
    elem mul(const elem& a, const elem& b) const {
        mpz_class r;
        mpz_mul(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
        mpz_tdiv_r(r.get_mpz_t(), r.get_mpz_t(), p_->get_mpz_t());
        return r;
    }
    elem sqr(const elem& a) const { return mul(a, a); }
    elem inv(const elem& a) const {
        mpz_class r;
        if (!mpz_invert(r.get_mpz_t(), a.get_mpz_t(), p_->get_mpz_t())) throw not_invertible();
        return r;
    }
    elem pow(const elem& a, const mpz_class& e) const {
        mpz_class r;
        mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p_->get_mpz_t());
        return r;
    }
    elem pow(const elem& a, std::uint64_t e) const { return pow(a, Fp64::u64_to_mpz(e)); }

    elem random(std::mt19937_64& rng) const;

private:
    std::shared_ptr<const mpz_class> p_;
};

}  // namespace modpoly
