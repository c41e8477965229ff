#include "modpoly/crt.hpp"

#include <algorithm>
#include <stdexcept>

namespace modpoly {

CrtContext::CrtContext(std::vector<mpz_class> primes, const mpz_class& q) : primes_(std::move(primes)), q_(q) {
    if (primes_.empty()) throw std::invalid_argument("crt: empty prime set");
    auto sorted = primes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw std::invalid_argument("crt: duplicate primes");
    if (std::binary_search(sorted.begin(), sorted.end(), q)) throw std::invalid_argument("crt: q is one of the primes");
    M_ = 1;
    for (const auto& p : primes_) M_ *= p;
    Mq_ = M_ % q_;
    std::size_t n = primes_.size();
    a_.resize(n);
    aMq_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        mpz_class Mi = M_ / primes_[i];
        mpz_class r = Mi % primes_[i];
        if (!mpz_invert(a_[i].get_mpz_t(), r.get_mpz_t(), primes_[i].get_mpz_t()))
            throw std::invalid_argument("crt: moduli not coprime");
        aMq_[i] = a_[i] * Mi % q_;
    }
    unsigned lg = 0;
    while ((std::size_t(1) << lg) < 4 * n) ++lg;
    prec_ = lg + 64;
}

void CrtAccumulator::update(const CrtContext& ctx, std::size_t i, std::size_t k, const mpz_class& c) {
    if (sgn(c) == 0) return;
    modq_[k] += c * ctx.aM_mod_q(i);
    modq_[k] %= ctx.q();
    mpz_class t = c * ctx.a(i);
    t <<= ctx.precision();
    mpz_fdiv_q(t.get_mpz_t(), t.get_mpz_t(), ctx.prime(i).get_mpz_t());
    frac_[k] += t;
}

void CrtAccumulator::update(const CrtContext& ctx, std::size_t i, const std::vector<mpz_class>& cs) {
    if (cs.size() != size()) throw std::invalid_argument("crt: coefficient count mismatch");
    for (std::size_t k = 0; k < cs.size(); ++k) update(ctx, i, k, cs[k]);
}

void CrtAccumulator::merge(const CrtAccumulator& o, const CrtContext& ctx) {
    if (o.size() != size()) throw std::invalid_argument("crt: merge size mismatch");
    for (std::size_t k = 0; k < size(); ++k) {
        modq_[k] = (modq_[k] + o.modq_[k]) % ctx.q();
        frac_[k] += o.frac_[k];
    }
}

mpz_class CrtAccumulator::finalize(const CrtContext& ctx, std::size_t k) const {
    mpz_class half = mpz_class(1) << (ctx.precision() - 1);
    mpz_class r = frac_[k] + half;
    mpz_fdiv_q_2exp(r.get_mpz_t(), r.get_mpz_t(), ctx.precision());
    mpz_class v = modq_[k] - r * ctx.M_mod_q();
    mpz_mod(v.get_mpz_t(), v.get_mpz_t(), ctx.q().get_mpz_t());
    return v;
}

std::vector<mpz_class> CrtAccumulator::finalize(const CrtContext& ctx) const {
    std::vector<mpz_class> out(size());
    for (std::size_t k = 0; k < size(); ++k) out[k] = finalize(ctx, k);
    return out;
}

mpz_class crt_direct(const std::vector<mpz_class>& primes, const std::vector<mpz_class>& residues) {
    if (primes.size() != residues.size()) throw std::invalid_argument("crt_direct: size mismatch");
    mpz_class x = 0, M = 1;
    for (std::size_t i = 0; i < primes.size(); ++i) {
        // x' = x + M * ((r - x) * M^{-1} mod p)
        mpz_class inv, d = residues[i] - x;
        mpz_class Mp = M % primes[i];
        if (!mpz_invert(inv.get_mpz_t(), Mp.get_mpz_t(), primes[i].get_mpz_t()))
            throw std::invalid_argument("crt_direct: moduli not coprime");
        d = d * inv;
        mpz_mod(d.get_mpz_t(), d.get_mpz_t(), primes[i].get_mpz_t());
        x += M * d;
        M *= primes[i];
    }
    if (x > M / 2) x -= M;
    return x;
}

}  // namespace modpoly
