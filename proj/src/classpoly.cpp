#include "modpoly/classpoly.hpp"

#include "modpoly/ntheory.hpp"

#include <mpfr.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace modpoly {

namespace {

class Real {
public:
    explicit Real(mpfr_prec_t prec) { mpfr_init2(v_, prec); mpfr_set_zero(v_, 1); }
    Real(const Real& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Real& operator=(const Real& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    ~Real() { mpfr_clear(v_); }
    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }

private:
    mpfr_t v_;
};

struct Cx {
    Real re, im;
    explicit Cx(mpfr_prec_t prec) : re(prec), im(prec) {}
    mpfr_prec_t prec() const { return mpfr_get_prec(re.get()); }
};

Cx cx_add(const Cx& a, const Cx& b) {
    Cx r(a.prec());
    mpfr_add(r.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_add(r.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    return r;
}

Cx cx_sub(const Cx& a, const Cx& b) {
    Cx r(a.prec());
    mpfr_sub(r.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_sub(r.im.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    return r;
}

Cx cx_mul(const Cx& a, const Cx& b) {
    mpfr_prec_t p = a.prec();
    Cx r(p);
    Real t(p);
    mpfr_mul(r.re.get(), a.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_mul(t.get(), a.im.get(), b.im.get(), MPFR_RNDN);
    mpfr_sub(r.re.get(), r.re.get(), t.get(), MPFR_RNDN);
    mpfr_mul(r.im.get(), a.re.get(), b.im.get(), MPFR_RNDN);
    mpfr_mul(t.get(), a.im.get(), b.re.get(), MPFR_RNDN);
    mpfr_add(r.im.get(), r.im.get(), t.get(), MPFR_RNDN);
    return r;
}

Cx cx_div(const Cx& a, const Cx& b) {
    mpfr_prec_t p = a.prec();
    Real n(p), t(p);
    mpfr_sqr(n.get(), b.re.get(), MPFR_RNDN);
    mpfr_sqr(t.get(), b.im.get(), MPFR_RNDN);
    mpfr_add(n.get(), n.get(), t.get(), MPFR_RNDN);
    Cx conj(p);
    mpfr_set(conj.re.get(), b.re.get(), MPFR_RNDN);
    mpfr_neg(conj.im.get(), b.im.get(), MPFR_RNDN);
    Cx r = cx_mul(a, conj);
    mpfr_div(r.re.get(), r.re.get(), n.get(), MPFR_RNDN);
    mpfr_div(r.im.get(), r.im.get(), n.get(), MPFR_RNDN);
    return r;
}

Cx cx_scale_si(const Cx& a, long s) {
    Cx r(a.prec());
    mpfr_mul_si(r.re.get(), a.re.get(), s, MPFR_RNDN);
    mpfr_mul_si(r.im.get(), a.im.get(), s, MPFR_RNDN);
    return r;
}

Cx cx_one(mpfr_prec_t p) {
    Cx r(p);
    mpfr_set_ui(r.re.get(), 1, MPFR_RNDN);
    return r;
}

// log2 of |a|, or a very negative number for zero
long cx_log2_abs(const Cx& a) {
    long e1 = mpfr_zero_p(a.re.get()) ? LONG_MIN / 2 : mpfr_get_exp(a.re.get());
    long e2 = mpfr_zero_p(a.im.get()) ? LONG_MIN / 2 : mpfr_get_exp(a.im.get());
    return std::max(e1, e2);
}

// Euler product prod (1 - q^n) via the pentagonal number series.
Cx euler_product(const Cx& q) {
    mpfr_prec_t p = q.prec();
    long target = -static_cast<long>(p) - 16;
    Cx sum = cx_one(p);
    Cx q3 = cx_mul(cx_mul(q, q), q);
    Cx step = q;      // q^{3k-2}
    Cx t = cx_one(p); // q^{k(3k-1)/2}
    Cx qk = cx_one(p);
    for (long k = 1;; ++k) {
        if (k > 1) step = cx_mul(step, q3);
        t = cx_mul(t, step);
        qk = cx_mul(qk, q);
        Cx t2 = cx_mul(t, qk);  // q^{k(3k+1)/2}
        Cx pair = cx_add(t, t2);
        sum = (k % 2) ? cx_sub(sum, pair) : cx_add(sum, pair);
        if (cx_log2_abs(t) < target) break;
        if (k > 100000) throw std::runtime_error("eta series did not converge");
    }
    return sum;
}

// j(tau) for tau = x + i y, y > 0
Cx j_invariant(const Real& x, const Real& y) {
    mpfr_prec_t p = mpfr_get_prec(x.get());
    Real pi2(p), r(p), ang(p);
    mpfr_const_pi(pi2.get(), MPFR_RNDN);
    mpfr_mul_ui(pi2.get(), pi2.get(), 2, MPFR_RNDN);
    mpfr_mul(r.get(), pi2.get(), y.get(), MPFR_RNDN);
    mpfr_neg(r.get(), r.get(), MPFR_RNDN);
    mpfr_exp(r.get(), r.get(), MPFR_RNDN);
    mpfr_mul(ang.get(), pi2.get(), x.get(), MPFR_RNDN);
    Cx q(p);
    mpfr_sin_cos(q.im.get(), q.re.get(), ang.get(), MPFR_RNDN);
    mpfr_mul(q.re.get(), q.re.get(), r.get(), MPFR_RNDN);
    mpfr_mul(q.im.get(), q.im.get(), r.get(), MPFR_RNDN);
    Cx ratio = cx_div(euler_product(cx_mul(q, q)), euler_product(q));
    Cx r2 = cx_mul(ratio, ratio);
    Cx r4 = cx_mul(r2, r2);
    Cx r8 = cx_mul(r4, r4);
    Cx r24 = cx_mul(cx_mul(r8, r8), r8);
    Cx f = cx_mul(q, r24);
    Cx g = cx_add(cx_scale_si(f, 256), cx_one(p));
    return cx_div(cx_mul(cx_mul(g, g), g), f);
}

// Round to the nearest integer; returns false when the residual is too large.
bool round_checked(const Cx& c, mpz_class& out, double tol) {
    mpfr_prec_t p = c.prec();
    Real rr(p), diff(p);
    mpfr_rint(rr.get(), c.re.get(), MPFR_RNDN);
    mpfr_get_z(out.get_mpz_t(), rr.get(), MPFR_RNDN);
    mpfr_sub(diff.get(), c.re.get(), rr.get(), MPFR_RNDN);
    if (std::fabs(mpfr_get_d(diff.get(), MPFR_RNDN)) >= tol) return false;
    if (std::fabs(mpfr_get_d(c.im.get(), MPFR_RNDN)) >= tol) return false;
    return true;
}

std::vector<Cx> poly_from_roots(const std::vector<Cx>& roots, mpfr_prec_t p) {
    std::vector<Cx> c{cx_one(p)};
    for (const auto& r : roots) {
        std::vector<Cx> n(c.size() + 1, Cx(p));
        for (std::size_t i = 0; i < c.size(); ++i) {
            n[i + 1] = cx_add(n[i + 1], c[i]);
            n[i] = cx_sub(n[i], cx_mul(c[i], r));
        }
        c = std::move(n);
    }
    return c;
}

std::string& cache_dir_ref() {
    static std::string dir = [] {
        if (const char* e = std::getenv("MODPOLY_CACHE_DIR")) return std::string(e);
        if (const char* x = std::getenv("XDG_CACHE_HOME")) return std::string(x) + "/modpoly";
        if (const char* h = std::getenv("HOME")) return std::string(h) + "/.cache/modpoly";
        return std::string();
    }();
    return dir;
}

std::mutex& cache_mutex() {
    static std::mutex m;
    return m;
}

const char* const phi2_reference[] = {
    "-157464000000000", "8748000000", "-162000", "1",
    "8748000000", "40773375", "1488", "0",
    "-162000", "1488", "-1", "0",
    "1", "0", "0", "0",
};

}  // namespace

bool BivarIntPoly::is_symmetric() const {
    for (int i = 0; i <= deg; ++i)
        for (int j = 0; j < i; ++j)
            if (at(i, j) != at(j, i)) return false;
    return true;
}

std::vector<mpz_class> j_qexpansion(int nmax) {
    int n = nmax + 2;  // terms of q*j
    std::vector<mpz_class> e4(n, 0), del(n, 0);
    e4[0] = 1;
    for (int k = 1; k < n; ++k) {
        mpz_class s = 0;
        for (int d = 1; d <= k; ++d)
            if (k % d == 0) s += mpz_class(d) * d * d;
        e4[k] = 240 * s;
    }
    // prod (1 - q^k)^24
    del[0] = 1;
    for (int k = 1; k < n; ++k)
        for (int rep = 0; rep < 24; ++rep)
            for (int i = n - 1; i >= k; --i) del[i] -= del[i - k];
    auto mul = [n](const std::vector<mpz_class>& a, const std::vector<mpz_class>& b) {
        std::vector<mpz_class> r(n, 0);
        for (int i = 0; i < n; ++i)
            for (int k = 0; i + k < n; ++k) r[i + k] += a[i] * b[k];
        return r;
    };
    auto num = mul(mul(e4, e4), e4);
    std::vector<mpz_class> out(n, 0);
    for (int i = 0; i < n; ++i) {
        mpz_class s = num[i];
        for (int k = 1; k <= i; ++k) s -= del[k] * out[i - k];
        out[i] = s;  // del[0] == 1
    }
    return out;
}

IntPoly hilbert_class_poly(const QuadOrder& O) {
    long long D = O.D;
    if (D >= -4) throw std::invalid_argument("hilbert_class_poly: needs D < -4");
    auto forms = reduced_forms(D);
    double sq = std::sqrt(static_cast<double>(-D));
    double est = 0;
    for (const auto& f : forms) est += M_PI * sq / static_cast<double>(f.a);
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(est / std::log(2.0) * 1.1) + 64 + static_cast<mpfr_prec_t>(forms.size());
    for (int attempt = 0; attempt < 8; ++attempt, prec *= 2) {
        std::vector<Cx> js;
        for (const auto& f : forms) {
            Real x(prec), y(prec);
            mpfr_set_si(x.get(), -f.b, MPFR_RNDN);
            mpfr_div_si(x.get(), x.get(), 2 * f.a, MPFR_RNDN);
            mpfr_set_si(y.get(), -D, MPFR_RNDN);
            mpfr_sqrt(y.get(), y.get(), MPFR_RNDN);
            mpfr_div_si(y.get(), y.get(), 2 * f.a, MPFR_RNDN);
            js.push_back(j_invariant(x, y));
        }
        auto c = poly_from_roots(js, prec);
        IntPoly H;
        bool ok = true;
        for (const auto& z : c) {
            mpz_class v;
            if (!round_checked(z, v, 0.25)) {
                ok = false;
                break;
            }
            H.coeffs.push_back(v);
        }
        if (ok) return H;
    }
    throw std::runtime_error("hilbert_class_poly: precision failure");
}

BivarIntPoly compute_bootstrap_modpoly(int b) {
    if (b != 2 && b != 3 && b != 5 && b != 7 && b != 11 && b != 13)
        throw std::invalid_argument("bootstrap_modpoly: b must be a prime <= 13");
    int n = b + 1;  // degree in each variable
    int samples = n + 1;
    // Height of Phi_b is below 6 b log b + 18 b nats; the samples have |J| ~ e^{2 pi y}
    // and the roots j(b tau) ~ e^{2 pi b y}.
    const double y0 = 1.5;
    double bits = (6 * b * std::log(b) + 18 * b + 2 * M_PI * y0 * (b * n + n)) / std::log(2.0);
    mpfr_prec_t prec = static_cast<mpfr_prec_t>(bits * 1.2) + 128;
    for (int attempt = 0; attempt < 6; ++attempt, prec *= 2) {
        std::vector<Cx> nodes;
        std::vector<std::vector<Cx>> vals;  // vals[m][k] = coefficient of X^k at sample m
        for (int m = 0; m < samples; ++m) {
            Real x(prec), y(prec);
            mpfr_set_si(x.get(), m, MPFR_RNDN);
            mpfr_div_si(x.get(), x.get(), samples, MPFR_RNDN);
            mpfr_set_d(y.get(), y0, MPFR_RNDN);
            nodes.push_back(j_invariant(x, y));
            std::vector<Cx> roots;
            Real xb(prec), yb(prec);
            mpfr_mul_si(xb.get(), x.get(), b, MPFR_RNDN);
            mpfr_mul_si(yb.get(), y.get(), b, MPFR_RNDN);
            roots.push_back(j_invariant(xb, yb));
            for (int k = 0; k < b; ++k) {
                Real xk(prec), yk(prec);
                mpfr_add_si(xk.get(), x.get(), k, MPFR_RNDN);
                mpfr_div_si(xk.get(), xk.get(), b, MPFR_RNDN);
                mpfr_div_si(yk.get(), y.get(), b, MPFR_RNDN);
                roots.push_back(j_invariant(xk, yk));
            }
            vals.push_back(poly_from_roots(roots, prec));
        }
        // Lagrange interpolation in J for each X-coefficient
        std::vector<std::vector<Cx>> basis;  // basis[m] = coefficients of L_m(J)
        for (int m = 0; m < samples; ++m) {
            std::vector<Cx> others;
            Cx denom = cx_one(prec);
            for (int k = 0; k < samples; ++k) {
                if (k == m) continue;
                others.push_back(nodes[k]);
                denom = cx_mul(denom, cx_sub(nodes[m], nodes[k]));
            }
            auto L = poly_from_roots(others, prec);
            for (auto& c : L) c = cx_div(c, denom);
            basis.push_back(std::move(L));
        }
        BivarIntPoly P;
        P.deg = n;
        P.a.assign(static_cast<std::size_t>(n + 1) * (n + 1), 0);
        bool ok = true;
        for (int i = 0; i <= n && ok; ++i) {      // power of X
            for (int j = 0; j <= n && ok; ++j) {  // power of J (= Y)
                Cx acc(prec);
                for (int m = 0; m < samples; ++m) acc = cx_add(acc, cx_mul(vals[m][i], basis[m][j]));
                ok = round_checked(acc, P.at(i, j), 0.01);
            }
        }
        if (ok && P.is_symmetric() && P.at(n, 0) == 1 && P.at(0, n) == 1) return P;
    }
    throw std::runtime_error("bootstrap_modpoly: precision failure");
}

void set_cache_dir(const std::string& dir) {
    std::lock_guard<std::mutex> lk(cache_mutex());
    cache_dir_ref() = dir;
}

std::string cache_dir() {
    std::lock_guard<std::mutex> lk(cache_mutex());
    return cache_dir_ref();
}

void write_modpoly_cache(const BivarIntPoly& P, int b, const std::string& path) {
    std::ofstream out(path + ".tmp");
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "modpoly-bootstrap v1\n";
    out << b << ' ' << P.deg << ' ' << P.a.size() << '\n';
    for (const auto& c : P.a) out << c.get_str() << '\n';
    out.close();
    std::filesystem::rename(path + ".tmp", path);
}

BivarIntPoly read_modpoly_cache(int b, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string magic;
    std::getline(in, magic);
    if (magic != "modpoly-bootstrap v1") throw std::runtime_error("bad cache header in " + path);
    int fb = 0, deg = 0;
    std::size_t count = 0;
    in >> fb >> deg >> count;
    if (fb != b || deg != b + 1 || count != static_cast<std::size_t>(deg + 1) * (deg + 1))
        throw std::runtime_error("cache record mismatch in " + path);
    BivarIntPoly P;
    P.deg = deg;
    P.a.resize(count);
    for (auto& c : P.a) {
        std::string s;
        if (!(in >> s)) throw std::runtime_error("truncated cache " + path);
        c = mpz_class(s);
    }
    if (!P.is_symmetric() || P.at(deg, 0) != 1) throw std::runtime_error("cache failed validation: " + path);
    if (b == 2)
        for (std::size_t k = 0; k < count; ++k)
            if (P.a[k] != mpz_class(phi2_reference[k])) throw std::runtime_error("Phi_2 checksum mismatch");
    return P;
}

const BivarIntPoly& bootstrap_modpoly(int b) {
    static std::mutex m;
    static std::map<int, BivarIntPoly> memo;
    std::lock_guard<std::mutex> lk(m);
    auto it = memo.find(b);
    if (it != memo.end()) return it->second;
    std::string dir = cache_dir();
    std::string path = dir.empty() ? "" : dir + "/phi_" + std::to_string(b) + ".txt";
    if (!path.empty() && std::filesystem::exists(path)) {
        try {
            return memo.emplace(b, read_modpoly_cache(b, path)).first->second;
        } catch (const std::exception&) {
            // fall through and recompute
        }
    }
    BivarIntPoly P = compute_bootstrap_modpoly(b);
    if (!path.empty()) {
        try {
            std::filesystem::create_directories(dir);
            write_modpoly_cache(P, b, path);
        } catch (const std::exception&) {
        }
    }
    return memo.emplace(b, std::move(P)).first->second;
}

std::vector<mpz_class> class_poly_roots(const QuadOrder& O, const mpz_class& p, std::uint64_t seed) {
    FpBig f(p);
    auto H = reduce_poly(hilbert_class_poly(O), f);
    return roots(H, seed);
}

}  // namespace modpoly
