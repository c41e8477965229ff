#pragma once

#include "modpoly/curves.hpp"
#include "modpoly/field.hpp"
#include "modpoly/poly.hpp"
#include "modpoly/select.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace modpoly {

enum class Algorithm { Alg1, Alg2, Hybrid };

const char* algorithm_name(Algorithm a);
std::optional<Algorithm> parse_algorithm(const std::string& s);

struct EvalRequest {
    long long ell = 0;
    mpz_class q;
    mpz_class j;
    bool want_derivs = false;
    Algorithm algorithm = Algorithm::Alg1;
    std::uint64_t seed = 0;
    unsigned workers = 1;
    SelectConfig select;
};

// x_0..x_n with x_i = j^i mod q, each in [0, q-1].
struct PowerLift {
    std::vector<mpz_class> x;
};

PowerLift power_lift(const mpz_class& j, const mpz_class& q, long long n);

struct EvalResult {
    std::vector<mpz_class> phi;     // coefficient of Y^k mod q, k = 0..ell+1
    std::vector<mpz_class> phi_x;   // dPhi/dX (j, Y), when requested
    std::vector<mpz_class> phi_xx;  // d^2Phi/dX^2 (j, Y), when requested
    Algorithm algorithm = Algorithm::Alg1;
    long long D = 0;
    double B = 0;
    std::size_t prime_count = 0;
    std::size_t replaced_primes = 0;
    double seconds = 0;
};

EvalResult algorithm1(const EvalRequest& req);
EvalResult algorithm2(const EvalRequest& req);
EvalResult hybrid(const EvalRequest& req);
EvalResult evaluate(const EvalRequest& req);

// Several j with one order, one prime set and one volcano pass per prime.
std::vector<EvalResult> evaluate_batch(const EvalRequest& req, const std::vector<mpz_class>& js);

// Normalized isogeny data from j = j(E) and a root jt of Phi_ell(j, Y).
struct NormalizedIsogeny {
    Curve<FpBig> codomain;
    Poly<FpBig> kernel;  // h_ell, degree (ell-1)/2
    mpz_class jt, jp, jtp, mt, kt;
};

struct isogeny_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class ElkiesRoute { Derivatives, Reconstruction };

// Phi partials at (j, jt): Phi_X, Phi_Y, Phi_XX, Phi_XY, Phi_YY, all mod q.
struct ModularPartials {
    mpz_class X, Y, XX, XY, YY;
};

// Partials from evaluation results of Phi_ell(j, Y) (with derivatives) at Y = jt.
ModularPartials partials_from_eval(const EvalResult& at_j, const mpz_class& jt, const mpz_class& q);

// Codomain via j-invariant derivatives; kernel via the Laurent-series procedure.
NormalizedIsogeny normalized_isogeny(const Curve<FpBig>& E, long long ell, const mpz_class& jt,
                                     const ModularPartials& d);
// Codomain from Phi_X and Phi_Y only; kernel recovered from (E, codomain) by matching Weierstrass series.
NormalizedIsogeny normalized_isogeny_from_codomain(const Curve<FpBig>& E, long long ell, const mpz_class& jt,
                                                   const mpz_class& PhiX, const mpz_class& PhiY);

}  // namespace modpoly
