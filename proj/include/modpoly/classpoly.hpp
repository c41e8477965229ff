#pragma once

#include "modpoly/classgroup.hpp"
#include "modpoly/field.hpp"
#include "modpoly/poly.hpp"

#include <gmpxx.h>

#include <string>
#include <vector>

namespace modpoly {

struct IntPoly {
    std::vector<mpz_class> coeffs;  // index = degree

    int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

// Coefficient a_ij of X^i Y^j stored row-major, i, j in [0, deg].
struct BivarIntPoly {
    int deg = 0;
    std::vector<mpz_class> a;

    const mpz_class& at(int i, int j) const { return a[static_cast<std::size_t>(i) * (deg + 1) + j]; }
    mpz_class& at(int i, int j) { return a[static_cast<std::size_t>(i) * (deg + 1) + j]; }
    bool is_symmetric() const;
};

// Coefficients of j(q) = sum c_n q^n for n = -1 .. nmax; element k holds c_{k-1}.
std::vector<mpz_class> j_qexpansion(int nmax);

IntPoly hilbert_class_poly(const QuadOrder& O);

// Exact classical modular polynomial for b in {2,3,5,7,11,13}.
const BivarIntPoly& bootstrap_modpoly(int b);
BivarIntPoly compute_bootstrap_modpoly(int b);

// Cache directory for bootstrap polynomials; empty disables the disk cache.
void set_cache_dir(const std::string& dir);
std::string cache_dir();
void write_modpoly_cache(const BivarIntPoly& P, int b, const std::string& path);
BivarIntPoly read_modpoly_cache(int b, const std::string& path);

template <class F>
Poly<F> reduce_poly(const IntPoly& P, const F& f) {
    std::vector<typename F::elem> c;
    c.reserve(P.coeffs.size());
    for (const auto& x : P.coeffs) c.push_back(f.from_mpz(x));
    return Poly<F>(f, std::move(c));
}

// Coefficient matrix of a bivariate integer polynomial reduced into a field.
template <class F>
std::vector<std::vector<typename F::elem>> reduce_bivar(const BivarIntPoly& P, const F& f) {
    std::vector<std::vector<typename F::elem>> m(P.deg + 1);
    for (int i = 0; i <= P.deg; ++i)
        for (int j = 0; j <= P.deg; ++j) m[i].push_back(f.from_mpz(P.at(i, j)));
    return m;
}

std::vector<mpz_class> class_poly_roots(const QuadOrder& O, const mpz_class& p, std::uint64_t seed = 0);

}  // namespace modpoly
