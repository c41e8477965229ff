#pragma once

#include <gmpxx.h>

#include <vector>

namespace modpoly {

class CrtContext {
public:
    CrtContext(std::vector<mpz_class> primes, const mpz_class& q);

    std::size_t size() const { return primes_.size(); }
    const mpz_class& prime(std::size_t i) const { return primes_[i]; }
    const std::vector<mpz_class>& primes() const { return primes_; }
    const mpz_class& q() const { return q_; }
    const mpz_class& M() const { return M_; }
    const mpz_class& a(std::size_t i) const { return a_[i]; }
    const mpz_class& aM_mod_q(std::size_t i) const { return aMq_[i]; }
    const mpz_class& M_mod_q() const { return Mq_; }
    unsigned precision() const { return prec_; }

private:
    std::vector<mpz_class> primes_;
    mpz_class q_, M_, Mq_;
    std::vector<mpz_class> a_, aMq_;
    unsigned prec_;
};

class CrtAccumulator {
public:
    CrtAccumulator() = default;
    explicit CrtAccumulator(std::size_t ncoeffs) : modq_(ncoeffs, 0), frac_(ncoeffs, 0) {}

    std::size_t size() const { return modq_.size(); }
    void update(const CrtContext& ctx, std::size_t i, std::size_t k, const mpz_class& c);
    void update(const CrtContext& ctx, std::size_t i, const std::vector<mpz_class>& cs);
    void merge(const CrtAccumulator& o, const CrtContext& ctx);
    mpz_class finalize(const CrtContext& ctx, std::size_t k) const;
    std::vector<mpz_class> finalize(const CrtContext& ctx) const;

private:
    std::vector<mpz_class> modq_;
    std::vector<mpz_class> frac_;
};

inline CrtContext crt_precompute(std::vector<mpz_class> primes, const mpz_class& q) {
    return CrtContext(std::move(primes), q);
}

// Signed value in (-M/2, M/2] congruent to the residues.
mpz_class crt_direct(const std::vector<mpz_class>& primes, const std::vector<mpz_class>& residues);

}  // namespace modpoly
