#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace modpoly {

struct QuadOrder {
    long long D = 0;
    long long D0 = 0;
    long long u = 1;

    static QuadOrder from_disc(long long D);
};

bool is_fundamental_disc(long long D);

struct QuadForm {
    long long a = 1, b = 1, c = 1;

    long long disc() const { return b * b - 4 * a * c; }
    bool operator==(const QuadForm& o) const { return a == o.a && b == o.b && c == o.c; }
    bool operator!=(const QuadForm& o) const { return !(*this == o); }
    bool operator<(const QuadForm& o) const {
        if (a != o.a) return a < o.a;
        if (b != o.b) return b < o.b;
        return c < o.c;
    }
    bool is_reduced() const;
    std::string str() const;
};

struct QuadFormHash {
    std::size_t operator()(const QuadForm& f) const {
        return std::hash<long long>()(f.a * 1000003LL + f.b) ^ (std::hash<long long>()(f.c) << 1);
    }
};

using FormSet = std::unordered_set<QuadForm, QuadFormHash>;
template <class V>
using FormMap = std::unordered_map<QuadForm, V, QuadFormHash>;

QuadForm reduce_form(QuadForm f);
QuadForm principal_form(long long D);
QuadForm compose(const QuadForm& f, const QuadForm& g);
QuadForm inverse(const QuadForm& f);
QuadForm form_pow(const QuadForm& f, long long n);

std::vector<QuadForm> reduced_forms(long long D);
long long class_number(const QuadOrder& O);

// Prime form (n, B, C) with the least B >= 0 satisfying B^2 = D mod 4n; not necessarily reduced.
// Returns nullopt when n is inert; throws when n divides the conductor.
std::optional<QuadForm> prime_form(const QuadOrder& O, long long n);

using Word = std::vector<long long>;

struct Presentation {
    long long D = 0;
    std::vector<QuadForm> generators;      // reduced classes
    std::vector<QuadForm> generator_forms; // prime forms as produced by prime_form (empty in quotients)
    std::vector<long long> relative_orders;
    // relations[i][j], j < i: g_i^{r_i} = prod_j g_j^{relations[i][j]}
    std::vector<std::vector<long long>> relations;

    std::size_t size() const { return generators.size(); }
    long long order() const;

    Word normalize(Word w) const;
    Word add(const Word& x, const Word& y) const;
    Word negate(const Word& x) const;
    Word unit(std::size_t i) const;
    long long index(const Word& normalized) const;
    Word word_at(long long index) const;
    QuadForm element(const Word& w) const;
};

Presentation build_presentation(const QuadOrder& O, const std::set<long long>& norm_blacklist,
                                long long max_norm = 100000);
Presentation quotient_presentation(const Presentation& beta, const std::vector<Word>& subgroup_gens);
std::vector<Word> enumerate_words(const Presentation& P);
std::vector<QuadForm> enumerate_presentation(const Presentation& P);
long long coset_index(const Presentation& gamma, const Word& beta_word);

// Discrete logarithms: reduced form -> normalized word.
FormMap<Word> discrete_log_table(const Presentation& P);

// h(O') for the order of index ell in O (D < -4, so the unit index is 1).
long long suborder_class_number(long long D, long long h, long long ell);

// Order of a reduced form, given a multiple n of it.
long long form_order(const QuadForm& g, long long n);

// Single-generator presentation of a cyclic class group of known order h, generated by the prime
// form of smallest admissible norm <= max_norm. Returns nullopt if no such generator exists.
std::optional<Presentation> cyclic_presentation(const QuadOrder& O, long long h,
                                                const std::set<long long>& norm_blacklist,
                                                long long max_norm);

// Classes of the norm-ell^2 ideals of the order of discriminant ell^2 D, i.e. generators of the
// kernel of cl(O') -> cl(O).
std::vector<QuadForm> norm_ell2_forms(long long D, long long ell);

}  // namespace modpoly
