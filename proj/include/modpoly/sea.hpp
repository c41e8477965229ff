#pragma once

#include "modpoly/curves.hpp"
#include "modpoly/evaluate.hpp"
#include "modpoly/field.hpp"

#include <cstdint>
#include <vector>

namespace modpoly {

enum class TraceKind { Elkies, Atkin, Unusable };

const char* trace_kind_name(TraceKind k);

struct TraceResult {
    long long ell = 0;
    TraceKind kind = TraceKind::Atkin;
    long long t_mod = -1;   // t mod ell, Elkies only
    long long lambda = 0;   // Frobenius eigenvalue in [1, ell-1], Elkies only
    mpz_class jt;           // isogenous j-invariant used
};

struct SeaOptions {
    unsigned workers = 1;
    std::uint64_t seed = 0;
    ElkiesRoute route = ElkiesRoute::Derivatives;
    SelectConfig select;
    int verify_points = 10;
    long long max_ell = 1000;
};

struct SeaResult {
    mpz_class order;
    mpz_class trace;
    std::vector<TraceResult> traces;  // odd ell in processing order
    long long largest_ell = 0;        // L(E)
    bool naive = false;               // delegated to count_points_naive
};

struct sea_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// t mod 2 from the rational 2-torsion.
int trace_mod_2(const Curve<FpBig>& E);

TraceResult trace_mod_ell(const Curve<FpBig>& E, long long ell, const SeaOptions& opt = {});

// Frobenius eigenvalue on the kernel of the isogeny with kernel polynomial h.
long long frobenius_eigenvalue(const Curve<FpBig>& E, const Poly<FpBig>& h, long long ell);

SeaResult sea_count(const Curve<FpBig>& E, const SeaOptions& opt = {});
mpz_class count_points_sea(const Curve<FpBig>& E, const SeaOptions& opt = {});

// Legendre sum for q < 2^26, baby-step/giant-step for q < 2^64.
mpz_class count_points_naive(const Curve<FpBig>& E);
mpz_class count_points_bsgs(const Curve<FpBig>& E, std::uint64_t seed = 0);

bool has_root(const std::vector<mpz_class>& phi, const mpz_class& q);

// For each j, whether Phi_ell(j, Y) has a root mod q (one evaluation pass for all j).
std::vector<bool> elkies_flags(long long ell, const mpz_class& q, const std::vector<mpz_class>& js,
                               const SeaOptions& opt = {});

}  // namespace modpoly
