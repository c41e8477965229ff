#pragma once

#include "modpoly/classgroup.hpp"
#include "modpoly/field.hpp"

#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

namespace modpoly {

enum class BoundKind { PhiHeight, Alg1, Alg1NoDerivs, Alg2 };

const char* bound_kind_name(BoundKind k);

struct HeightBound {
    double B = 0;  // natural log
    BoundKind kind = BoundKind::PhiHeight;
};

HeightBound phi_height_bound(long long ell);
HeightBound alg_height_bound(long long ell, const mpz_class& q, BoundKind which);

struct SelectConfig {
    double c1 = 1.5;
    double c2 = 256;
    bool relax_small_ell = true;    // c1 = 4 when ell <= 7
    long long max_generator_norm = 13;
    long long t_ceiling = 1LL << 31;
    long long disc_scan_limit = 0;  // 0: c2^2 ell^2
};

struct selection_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SuitableOrder {
    long long ell = 0;
    QuadOrder O;
    long long h = 0;
    long long h_floor = 0;  // h(O') for the order of index ell
    long long v = 1;
    std::set<long long> blacklist;
    Presentation alpha;  // cl(O), one generator
    Presentation beta;   // cl(O'), one generator
};

long long default_v(long long D);
std::set<long long> norm_blacklist(long long ell, const QuadOrder& O, long long v, long long max_norm);

// Conditions (i)-(v) of the suitability definition, given h = h(O).
bool satisfies_order_conditions(const QuadOrder& O, long long h, long long ell, const SelectConfig& cfg);

// Smallest |D| order meeting (i)-(v) whose class groups cl(O) and cl(O') are both cyclic and
// generated by a single prime form of non-blacklisted norm <= cfg.max_generator_norm.
SuitableOrder find_suitable_order(long long ell, const SelectConfig& cfg = {});

// Builds the same data for a given discriminant, or nullopt if it does not qualify.
std::optional<SuitableOrder> make_suitable_order(long long ell, long long D, const SelectConfig& cfg = {});

struct PrimePackage {
    mpz_class p;
    mpz_class t;
    long long v = 1;
    long long ell = 0;
    long long D = 0;
};

int omega(long long v);
bool is_suitable_prime(const PrimePackage& pp);

// Deterministic scan over t = 2 mod ell with the parity making p integral.
class PrimeScanner {
public:
    PrimeScanner(long long ell, long long D, long long v, long long t_ceiling);
    std::optional<PrimePackage> next();

private:
    long long ell_, D_, v_, t_ceiling_;
    long long t_;
};

// Primes listed in `exclude` are skipped.
std::vector<PrimePackage> find_suitable_primes(const SuitableOrder& so, double B, const SelectConfig& cfg = {},
                                               const std::vector<mpz_class>& exclude = {});

}  // namespace modpoly
