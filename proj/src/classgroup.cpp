#include "modpoly/classgroup.hpp"

#include "modpoly/ntheory.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace modpoly {

namespace {

using i128 = __int128;

long long floor_div(long long a, long long b) {
    long long q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

long long floor_mod(long long a, long long b) { return a - floor_div(a, b) * b; }

// returns g = gcd(a,b) >= 0 and x,y with x*a + y*b = g
long long xgcd(long long a, long long b, long long& x, long long& y) {
    long long x0 = 1, y0 = 0, x1 = 0, y1 = 1;
    while (b != 0) {
        long long q = floor_div(a, b);
        long long t = a - q * b;
        a = b;
        b = t;
        t = x0 - q * x1;
        x0 = x1;
        x1 = t;
        t = y0 - q * y1;
        y0 = y1;
        y1 = t;
    }
    if (a < 0) {
        a = -a;
        x0 = -x0;
        y0 = -y0;
    }
    x = x0;
    y = y0;
    return a;
}

long long c_of(long long a, long long b, long long D) {
    i128 num = static_cast<i128>(b) * b - D;
    i128 den = static_cast<i128>(4) * a;
    if (num % den != 0) throw std::logic_error("form coefficients not integral");
    return static_cast<long long>(num / den);
}

}  // namespace

bool is_fundamental_disc(long long D) {
    auto squarefree = [](long long m) {
        m = std::llabs(m);
        for (long long p = 2; p * p <= m; ++p)
            if (m % (p * p) == 0) return false;
        return true;
    };
    long long r = floor_mod(D, 4);
    if (r == 1) return squarefree(D);
    if (r != 0) return false;
    long long m = D / 4;
    long long rm = floor_mod(m, 4);
    return (rm == 2 || rm == 3) && squarefree(m);
}

QuadOrder QuadOrder::from_disc(long long D) {
    if (D >= 0) throw std::invalid_argument("discriminant must be negative");
    long long r = floor_mod(D, 4);
    if (r != 0 && r != 1) throw std::invalid_argument("not a discriminant: " + std::to_string(D));
    long long m = D, u = 1;
    long long rest = std::llabs(D);
    for (long long p = 3; p * p <= rest; p += 2) {
        while (m % (p * p) == 0) {
            m /= p * p;
            u *= p;
        }
        while (rest % p == 0) rest /= p;
    }
    while (m % 4 == 0 && (floor_mod(m / 4, 4) == 0 || floor_mod(m / 4, 4) == 1)) {
        m /= 4;
        u *= 2;
    }
    QuadOrder O{D, m, u};
    if (!is_fundamental_disc(m)) throw std::logic_error("failed to factor discriminant");
    return O;
}

bool QuadForm::is_reduced() const {
    if (!(std::llabs(b) <= a && a <= c)) return false;
    if ((std::llabs(b) == a || a == c) && b < 0) return false;
    return true;
}

std::string QuadForm::str() const {
    return "(" + std::to_string(a) + "," + std::to_string(b) + "," + std::to_string(c) + ")";
}

QuadForm reduce_form(QuadForm f) {
    long long D = f.disc();
    if (D >= 0 || f.a <= 0) throw std::invalid_argument("reduce_form: needs a positive definite form");
    if (std::gcd(std::gcd(f.a, std::llabs(f.b)), f.c) != 1)
        throw std::invalid_argument("reduce_form: form not primitive");
    for (;;) {
        if (!(-f.a < f.b && f.b <= f.a)) {
            long long two_a = 2 * f.a;
            long long nb = floor_mod(f.b, two_a);
            if (nb > f.a) nb -= two_a;
            f.b = nb;
            f.c = c_of(f.a, f.b, D);
        }
        if (f.a > f.c) {
            f = {f.c, -f.b, f.a};
            continue;
        }
        if (f.a == f.c && f.b < 0) f.b = -f.b;
        return f;
    }
}

QuadForm principal_form(long long D) {
    long long b = floor_mod(D, 2);
    return {1, b, c_of(1, b, D)};
}

QuadForm inverse(const QuadForm& f) { return reduce_form({f.a, -f.b, f.c}); }

QuadForm compose(const QuadForm& f1, const QuadForm& f2) {
    long long D = f1.disc();
    if (f2.disc() != D) throw std::invalid_argument("compose: discriminant mismatch");
    long long a1 = f1.a, b1 = f1.b, a2 = f2.a, b2 = f2.b, c2 = f2.c;
    if (a1 > a2) {
        std::swap(a1, a2);
        std::swap(b1, b2);
        c2 = f1.c;
    }
    long long s = (b1 + b2) / 2, n = b2 - s;
    long long d, y1;
    if (a2 % a1 == 0) {
        y1 = 0;
        d = a1;
    } else {
        long long u, v;
        d = xgcd(a2, a1, u, v);
        y1 = u;
    }
    long long d1, x2, y2;
    if (s % d == 0) {
        y2 = -1;
        x2 = 0;
        d1 = d;
    } else {
        long long yy;
        d1 = xgcd(s, d, x2, yy);
        y2 = -yy;
    }
    long long v1 = a1 / d1, v2 = a2 / d1;
    i128 r = (static_cast<i128>(y1) * y2 % v1 * n - static_cast<i128>(x2) * c2) % v1;
    if (r < 0) r += v1;
    i128 b3 = b2 + static_cast<i128>(2) * v2 * r;
    i128 a3 = static_cast<i128>(v1) * v2;
    // keep b3 small before computing c3
    i128 m = 2 * a3;
    b3 %= m;
    if (b3 < 0) b3 += m;
    i128 c3 = (b3 * b3 - D) / (4 * a3);
    return reduce_form({static_cast<long long>(a3), static_cast<long long>(b3), static_cast<long long>(c3)});
}

QuadForm form_pow(const QuadForm& f, long long n) {
    QuadForm base = n < 0 ? inverse(f) : reduce_form(f);
    n = std::llabs(n);
    QuadForm r = principal_form(f.disc());
    while (n) {
        if (n & 1) r = compose(r, base);
        base = compose(base, base);
        n >>= 1;
    }
    return r;
}

std::vector<QuadForm> reduced_forms(long long D) {
    if (D >= 0) throw std::invalid_argument("reduced_forms: D must be negative");
    std::vector<QuadForm> out;
    long long amax = static_cast<long long>(std::sqrt(static_cast<double>(-D) / 3.0)) + 1;
    for (long long a = 1; a <= amax; ++a) {
        for (long long b = -a + 1; b <= a; ++b) {
            if (floor_mod(b - D, 2) != 0) continue;
            i128 num = static_cast<i128>(b) * b - D;
            if (num % (4 * a) != 0) continue;
            long long c = static_cast<long long>(num / (4 * a));
            if (c < a) continue;
            if (c == a && b < 0) continue;
            if (std::gcd(std::gcd(a, std::llabs(b)), c) != 1) continue;
            out.push_back({a, b, c});
        }
    }
    return out;
}

long long class_number(const QuadOrder& O) { return static_cast<long long>(reduced_forms(O.D).size()); }

std::optional<QuadForm> prime_form(const QuadOrder& O, long long n) {
    if (n < 2) throw std::invalid_argument("prime_form: n must be prime");
    if (O.u % n == 0) throw std::invalid_argument("prime_form: norm divides the conductor");
    long long D = O.D;
    long long four_n = 4 * n;
    long long target = floor_mod(D, four_n);
    for (long long B = 0; B <= n; ++B) {
        if (floor_mod(B - D, 2) != 0) continue;
        if (static_cast<long long>(static_cast<i128>(B) * B % four_n) == target)
            return QuadForm{n, B, c_of(n, B, D)};
    }
    return std::nullopt;
}

long long Presentation::order() const {
    long long r = 1;
    for (auto x : relative_orders) r *= x;
    return r;
}

Word Presentation::normalize(Word w) const {
    w.resize(size(), 0);
    for (std::size_t i = size(); i-- > 0;) {
        long long r = relative_orders[i];
        long long q = floor_div(w[i], r);
        w[i] -= q * r;
        if (q != 0)
            for (std::size_t j = 0; j < i; ++j) w[j] += q * relations[i][j];
    }
    return w;
}

Word Presentation::add(const Word& x, const Word& y) const {
    Word w(size(), 0);
    for (std::size_t i = 0; i < size(); ++i) w[i] = (i < x.size() ? x[i] : 0) + (i < y.size() ? y[i] : 0);
    return normalize(std::move(w));
}

Word Presentation::negate(const Word& x) const {
    Word w(size(), 0);
    for (std::size_t i = 0; i < size() && i < x.size(); ++i) w[i] = -x[i];
    return normalize(std::move(w));
}

Word Presentation::unit(std::size_t i) const {
    Word w(size(), 0);
    w[i] = 1;
    return normalize(std::move(w));
}

long long Presentation::index(const Word& w) const {
    long long idx = 0;
    for (std::size_t i = size(); i-- > 0;) idx = idx * relative_orders[i] + w[i];
    return idx;
}

Word Presentation::word_at(long long idx) const {
    Word w(size(), 0);
    for (std::size_t i = 0; i < size(); ++i) {
        w[i] = idx % relative_orders[i];
        idx /= relative_orders[i];
    }
    return w;
}

QuadForm Presentation::element(const Word& w) const {
    QuadForm r = principal_form(D);
    for (std::size_t i = 0; i < size() && i < w.size(); ++i)
        if (w[i] != 0) r = compose(r, form_pow(generators[i], w[i]));
    return r;
}

namespace {

// Incremental closure used by both presentation builders.
struct Closure {
    FormMap<Word> words;  // element -> word over generators so far
    std::vector<QuadForm> elems;
};

}  // namespace

Presentation build_presentation(const QuadOrder& O, const std::set<long long>& norm_blacklist, long long max_norm) {
    Presentation P;
    P.D = O.D;
    long long h = class_number(O);
    Closure H;
    QuadForm id = principal_form(O.D);
    H.words[id] = {};
    H.elems.push_back(id);
    for (long long n = 2; static_cast<long long>(H.elems.size()) < h; ++n) {
        if (n > max_norm) throw std::runtime_error("class group not generated by prime forms below bound");
        bool prime = true;
        for (long long d = 2; d * d <= n; ++d)
            if (n % d == 0) prime = false;
        if (!prime || norm_blacklist.count(n) || O.u % n == 0) continue;
        auto pf = prime_form(O, n);
        if (!pf) continue;
        QuadForm g = reduce_form(*pf);
        long long r = 1;
        QuadForm x = g;
        while (!H.words.count(x)) {
            x = compose(x, g);
            ++r;
        }
        if (r == 1) continue;
        std::size_t k = P.size();
        Word rel = H.words.at(x);
        rel.resize(k, 0);
        P.generators.push_back(g);
        P.generator_forms.push_back(*pf);
        P.relative_orders.push_back(r);
        P.relations.push_back(rel);
        for (auto& row : P.relations) row.resize(k + 1, 0);
        std::vector<QuadForm> base = H.elems;
        for (auto& kv : H.words) kv.second.resize(k + 1, 0);
        QuadForm gm = g;
        for (long long m = 1; m < r; ++m) {
            for (const auto& e : base) {
                QuadForm y = compose(gm, e);
                Word w = H.words.at(e);
                w[k] = m;
                H.words.emplace(y, std::move(w));
                H.elems.push_back(y);
            }
            gm = compose(gm, g);
        }
    }
    for (auto& row : P.relations) row.resize(P.size(), 0);
    return P;
}

long long suborder_class_number(long long D, long long h, long long ell) {
    return h * (ell - kronecker(mpz_class(static_cast<long>(D)), mpz_class(static_cast<long>(ell))));
}

long long form_order(const QuadForm& g, long long n) {
    QuadForm id = principal_form(g.disc());
    std::vector<long long> primes;
    long long m = n;
    for (long long r = 2; r * r <= m; ++r) {
        if (m % r != 0) continue;
        primes.push_back(r);
        while (m % r == 0) m /= r;
    }
    if (m > 1) primes.push_back(m);
    long long ord = n;
    for (long long r : primes)
        while (ord % r == 0 && form_pow(g, ord / r) == id) ord /= r;
    return ord;
}

std::optional<Presentation> cyclic_presentation(const QuadOrder& O, long long h,
                                                const std::set<long long>& norm_blacklist,
                                                long long max_norm) {
    QuadForm id = principal_form(O.D);
    for (long long n = 2; n <= max_norm; ++n) {
        if (!is_prime_u64(static_cast<std::uint64_t>(n)) || norm_blacklist.count(n) || O.u % n == 0) continue;
        auto pf = prime_form(O, n);
        if (!pf) continue;
        QuadForm g = reduce_form(*pf);
        if (form_pow(g, h) != id || form_order(g, h) != h) continue;
        Presentation P;
        P.D = O.D;
        P.generators = {g};
        P.generator_forms = {*pf};
        P.relative_orders = {h};
        P.relations = {{0}};
        return P;
    }
    return std::nullopt;
}

Presentation quotient_presentation(const Presentation& beta, const std::vector<Word>& subgroup_gens) {
    Presentation G;
    G.D = beta.D;
    // subgroup H as an explicit set
    FormSet Hset;
    QuadForm id = principal_form(beta.D);
    Hset.insert(id);
    std::vector<QuadForm> hgens;
    for (const auto& w : subgroup_gens) hgens.push_back(beta.element(w));
    std::vector<QuadForm> frontier{id};
    while (!frontier.empty()) {
        std::vector<QuadForm> next;
        for (const auto& x : frontier)
            for (const auto& g : hgens) {
                QuadForm y = compose(x, g);
                if (Hset.insert(y).second) next.push_back(y);
            }
        frontier = std::move(next);
    }
    Closure K;
    for (const auto& x : Hset) {
        K.words[x] = {};
        K.elems.push_back(x);
    }
    std::size_t k = beta.size();
    for (std::size_t i = 0; i < k; ++i) {
        QuadForm g = beta.generators[i];
        long long r = 1;
        QuadForm x = g;
        while (!K.words.count(x)) {
            x = compose(x, g);
            ++r;
        }
        Word rel = K.words.at(x);
        rel.resize(k, 0);
        for (std::size_t j = i; j < k; ++j) rel[j] = 0;
        G.generators.push_back(g);
        G.relative_orders.push_back(r);
        G.relations.push_back(rel);
        for (auto& kv : K.words) kv.second.resize(i + 1, 0);
        std::vector<QuadForm> base = K.elems;
        QuadForm gm = g;
        for (long long m = 1; m < r; ++m) {
            for (const auto& e : base) {
                QuadForm y = compose(gm, e);
                Word w = K.words.at(e);
                w[i] = m;
                K.words.emplace(y, std::move(w));
                K.elems.push_back(y);
            }
            gm = compose(gm, g);
        }
    }
    return G;
}

std::vector<Word> enumerate_words(const Presentation& P) {
    std::vector<Word> out;
    long long n = P.order();
    out.reserve(n);
    for (long long i = 0; i < n; ++i) out.push_back(P.word_at(i));
    return out;
}

std::vector<QuadForm> enumerate_presentation(const Presentation& P) {
    std::vector<QuadForm> out;
    long long n = P.order();
    out.reserve(n);
    Word w(P.size(), 0);
    QuadForm cur = principal_form(P.D);
    // prefix[k] = product of g_i^{w_i} over i >= k
    std::vector<QuadForm> prefix(P.size() + 1, cur);
    for (long long i = 0; i < n; ++i) {
        out.push_back(prefix[0]);
        std::size_t j = 0;
        while (j < P.size() && w[j] + 1 == P.relative_orders[j]) {
            w[j] = 0;
            ++j;
        }
        if (j == P.size()) break;
        ++w[j];
        prefix[j] = compose(prefix[j], P.generators[j]);
        for (std::size_t t = j; t-- > 0;) prefix[t] = prefix[t + 1];
    }
    return out;
}

long long coset_index(const Presentation& gamma, const Word& beta_word) {
    return gamma.index(gamma.normalize(beta_word));
}

FormMap<Word> discrete_log_table(const Presentation& P) {
    FormMap<Word> t;
    auto elems = enumerate_presentation(P);
    auto words = enumerate_words(P);
    for (std::size_t i = 0; i < elems.size(); ++i) t.emplace(elems[i], words[i]);
    return t;
}

std::vector<QuadForm> norm_ell2_forms(long long D, long long ell) {
    std::vector<QuadForm> out;
    for (long long B = 0; B < 2 * ell; ++B) {
        if (floor_mod(B - D, 2) != 0) continue;
        long long C = (B * B - D) / 4;
        if (C % ell == 0) continue;
        out.push_back(reduce_form({ell * ell, ell * B, C}));
    }
    return out;
}

}  // namespace modpoly
