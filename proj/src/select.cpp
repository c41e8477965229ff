#include "modpoly/select.hpp"

#include "modpoly/ntheory.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace modpoly {

const char* bound_kind_name(BoundKind k) {
    switch (k) {
    case BoundKind::PhiHeight: return "phi-height";
    case BoundKind::Alg1: return "alg1";
    case BoundKind::Alg1NoDerivs: return "alg1-no-derivs";
    case BoundKind::Alg2: return "alg2";
    }
    return "?";
}

HeightBound phi_height_bound(long long ell) {
    if (ell < 3) throw std::invalid_argument("phi_height_bound: ell must be >= 3");
    double l = static_cast<double>(ell);
    double b1 = 6 * l * std::log(l) + 18 * l;
    double b = b1;
    if (ell > 3187) b = std::min(b1, 6 * l * std::log(l) + 16 * l + 14 * std::sqrt(l) * std::log(l));
    return {b, BoundKind::PhiHeight};
}

namespace {

double log_mpz(const mpz_class& x) {
    long exp = 0;
    double m = mpz_get_d_2exp(&exp, x.get_mpz_t());
    return std::log(m) + static_cast<double>(exp) * std::log(2.0);
}

}  // namespace

HeightBound alg_height_bound(long long ell, const mpz_class& q, BoundKind which) {
    double phi = phi_height_bound(ell).B;
    double lq = log_mpz(q);
    double l2 = std::log(static_cast<double>(ell + 2));
    switch (which) {
    case BoundKind::PhiHeight: return {phi, which};
    case BoundKind::Alg1: return {phi + lq + 3 * l2, which};
    case BoundKind::Alg1NoDerivs: return {phi + lq + l2, which};
    case BoundKind::Alg2: return {phi + static_cast<double>(ell + 1) * lq + l2, which};
    }
    throw std::invalid_argument("alg_height_bound: unknown kind");
}

long long default_v(long long D) {
    long long r = ((D % 8) + 8) % 8;
    return r == 1 ? 2 : 1;
}

std::set<long long> norm_blacklist(long long ell, const QuadOrder& O, long long v, long long max_norm) {
    std::set<long long> out;
    mpz_class prod = mpz_class(2) * static_cast<long>(ell) * static_cast<long>(O.D) * static_cast<long>(O.u) *
                     static_cast<long>(v);
    for (long long n = 2; n <= max_norm; ++n)
        if (mpz_divisible_ui_p(prod.get_mpz_t(), static_cast<unsigned long>(n))) out.insert(n);
    return out;
}

namespace {

double effective_c1(long long ell, const SelectConfig& cfg) {
    return (cfg.relax_small_ell && ell <= 7) ? std::max(cfg.c1, 4.0) : cfg.c1;
}

std::vector<long long> prime_factors(long long n) {
    std::vector<long long> out;
    n = std::llabs(n);
    for (long long p = 2; p * p <= n; ++p) {
        if (n % p) continue;
        out.push_back(p);
        while (n % p == 0) n /= p;
    }
    if (n > 1) out.push_back(n);
    return out;
}

std::optional<SuitableOrder> build_order(long long ell, const QuadOrder& O, long long h, const SelectConfig& cfg) {
    if (!satisfies_order_conditions(O, h, ell, cfg)) return std::nullopt;
    if (O.D % ell == 0) return std::nullopt;
    SuitableOrder so;
    so.ell = ell;
    so.O = O;
    so.h = h;
    so.v = default_v(O.D);
    so.h_floor = suborder_class_number(O.D, h, ell);
    so.blacklist = norm_blacklist(ell, O, so.v, cfg.max_generator_norm);
    auto alpha = cyclic_presentation(O, h, so.blacklist, cfg.max_generator_norm);
    if (!alpha) return std::nullopt;
    QuadOrder Of = QuadOrder::from_disc(ell * ell * O.D);
    auto beta = cyclic_presentation(Of, so.h_floor, so.blacklist, cfg.max_generator_norm);
    if (!beta) return std::nullopt;
    so.alpha = *alpha;
    so.beta = *beta;
    return so;
}

}  // namespace

bool satisfies_order_conditions(const QuadOrder& O, long long h, long long ell, const SelectConfig& cfg) {
    double l = static_cast<double>(ell);
    double aD = static_cast<double>(std::llabs(O.D));
    double aD0 = static_cast<double>(std::llabs(O.D0));
    double c2sq = cfg.c2 * cfg.c2;
    if (h < ell + 2 || static_cast<double>(h) > effective_c1(ell, cfg) * l) return false;
    if (!(aD0 > 4 && aD0 <= c2sq)) return false;
    if (!(aD >= l * l && aD <= c2sq * l * l)) return false;
    if (std::gcd(O.u, 2 * ell * std::llabs(O.D0)) != 1) return false;
    for (long long q : prime_factors(O.u))
        if (static_cast<double>(q) > std::min(cfg.c2, l)) return false;
    return true;
}

std::optional<SuitableOrder> make_suitable_order(long long ell, long long D, const SelectConfig& cfg) {
    long long r = ((D % 4) + 4) % 4;
    if (D >= 0 || (r != 0 && r != 1)) return std::nullopt;
    QuadOrder O = QuadOrder::from_disc(D);
    return build_order(ell, O, class_number(O), cfg);
}

SuitableOrder find_suitable_order(long long ell, const SelectConfig& cfg) {
    if (ell < 3 || !is_prime_u64(static_cast<std::uint64_t>(ell)))
        throw std::invalid_argument("find_suitable_order: ell must be an odd prime");
    double c2sq = cfg.c2 * cfg.c2;
    long long limit = cfg.disc_scan_limit > 0
                          ? cfg.disc_scan_limit
                          : static_cast<long long>(std::min(c2sq * static_cast<double>(ell * ell), 4e12));
    long long hmax = static_cast<long long>(effective_c1(ell, cfg) * static_cast<double>(ell));
    const long long window = 1 << 14;
    // Class numbers of all |D| in [lo, hi) by counting primitive reduced forms.
    std::vector<long long> count(window);
    for (long long lo = ell * ell; lo <= limit; lo += window) {
        long long hi = std::min(lo + window, limit + 1);
        std::fill(count.begin(), count.end(), 0);
        for (long long a = 1; 3 * a * a <= hi; ++a) {
            for (long long b = -a + 1; b <= a; ++b) {
                long long b2 = b * b;
                long long cmin = std::max(a, (lo + b2 + 4 * a - 1) / (4 * a));
                for (long long c = cmin; 4 * a * c - b2 < hi; ++c) {
                    if (c == a && b < 0) continue;
                    if (std::gcd(std::gcd(a, std::llabs(b)), c) != 1) continue;
                    ++count[4 * a * c - b2 - lo];
                }
            }
        }
        for (long long N = lo; N < hi; ++N) {
            long long h = count[N - lo];
            if (h < ell + 2 || h > hmax) continue;
            if (N % 4 != 0 && N % 4 != 3) continue;
            auto so = build_order(ell, QuadOrder::from_disc(-N), h, cfg);
            if (so) return *so;
        }
    }
    throw selection_error("no suitable order found for ell=" + std::to_string(ell) + " below |D| <= " +
                          std::to_string(limit) + "; loosen c1 or raise the generator norm bound");
}

int omega(long long v) { return static_cast<int>(prime_factors(v).size()); }

bool is_suitable_prime(const PrimePackage& pp) {
    if (pp.ell < 3 || pp.v < 1) return false;
    if (!is_prime(pp.p)) return false;
    if (pp.p % static_cast<unsigned long>(pp.ell) != 1) return false;
    mpz_class rhs = pp.t * pp.t - mpz_class(static_cast<long>(pp.ell * pp.ell * pp.v * pp.v)) * static_cast<long>(pp.D);
    if (4 * pp.p != rhs) return false;
    if (pp.v % pp.ell == 0) return false;
    double lv = std::log(static_cast<double>(pp.v));
    return omega(pp.v) <= 2 * std::log(lv + 3);
}

PrimeScanner::PrimeScanner(long long ell, long long D, long long v, long long t_ceiling)
    : ell_(ell), D_(D), v_(v), t_ceiling_(t_ceiling), t_(2) {
    long long parity = std::llabs(v * ell * D) % 2;
    if (t_ % 2 != parity) t_ += ell;
}

std::optional<PrimePackage> PrimeScanner::next() {
    mpz_class shift = mpz_class(static_cast<long>(ell_ * ell_ * v_ * v_)) * static_cast<long>(-D_);
    while (t_ <= t_ceiling_) {
        mpz_class t = static_cast<long>(t_);
        t_ += 2 * ell_;
        mpz_class p = (t * t + shift) / 4;
        if (!is_prime(p)) continue;
        PrimePackage pp{p, t, v_, ell_, D_};
        if (is_suitable_prime(pp)) return pp;
    }
    return std::nullopt;
}

std::vector<PrimePackage> find_suitable_primes(const SuitableOrder& so, double B, const SelectConfig& cfg,
                                               const std::vector<mpz_class>& exclude) {
    PrimeScanner scan(so.ell, so.O.D, so.v, cfg.t_ceiling);
    std::vector<PrimePackage> out;
    double target = B + std::log(4.0);
    double sum = 0;
    while (sum < target) {
        auto pp = scan.next();
        if (!pp) throw selection_error("prime scan exceeded the t ceiling");
        if (std::find(exclude.begin(), exclude.end(), pp->p) != exclude.end()) continue;
        sum += log_mpz(pp->p);
        out.push_back(std::move(*pp));
    }
    return out;
}

}  // namespace modpoly
