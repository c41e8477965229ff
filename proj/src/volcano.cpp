#include "modpoly/volcano.hpp"

#include "modpoly/curves.hpp"
#include "modpoly/ntheory.hpp"
#include "modpoly/poly.hpp"

#include <algorithm>

namespace modpoly {

std::shared_ptr<const VolcanoSetup> make_volcano_setup(const SuitableOrder& so) {
    if (so.alpha.size() != 1 || so.beta.size() != 1)
        throw volcano_error("volcano requires single-generator presentations of cl(O) and cl(O')");
    auto S = std::make_shared<VolcanoSetup>();
    S->so = so;
    long long ell = so.ell, D = so.O.D;
    S->floor_order = QuadOrder::from_disc(ell * ell * D);
    S->kron = kronecker(mpz_class(static_cast<long>(D)), mpz_class(static_cast<long>(ell)));
    if (S->kron == 0) throw volcano_error("ell must not divide D");

    auto beta_log = discrete_log_table(so.beta);
    std::vector<Word> cgens;
    for (const auto& g : norm_ell2_forms(D, ell)) cgens.push_back(beta_log.at(reduce_form(g)));
    S->gamma = quotient_presentation(so.beta, cgens);
    if (S->gamma.order() != so.h) throw volcano_error("cl(O')/C has the wrong order");

    if (S->kron == 1) {
        auto alpha_log = discrete_log_table(so.alpha);
        S->sibling_log = alpha_log.at(reduce_form(*prime_form(so.O, ell))).at(0);
    }
    S->H = hilbert_class_poly(so.O);
    S->b_alpha = static_cast<int>(so.alpha.generator_forms.at(0).a);
    S->b_beta = static_cast<int>(so.beta.generator_forms.at(0).a);
    S->phi_alpha = &bootstrap_modpoly(S->b_alpha);
    S->phi_beta = &bootstrap_modpoly(S->b_beta);
    return S;
}

VolcanoContext::VolcanoContext(std::shared_ptr<const VolcanoSetup> setup, const PrimePackage& pp,
                               std::uint64_t seed)
    : setup_(std::move(setup)), pp_(pp), f_(3), rng_(seed) {
    if (pp_.p >= mpz_class(1) << 63) throw volcano_error("prime too large for word-size arithmetic");
    if (!is_suitable_prime(pp_) || pp_.ell != setup_->ell() || pp_.D != setup_->so.O.D)
        throw volcano_error("prime package does not match the volcano setup");
    f_ = Fp64(pp_.p);
    phi_a_ = reduce_bivar(*setup_->phi_alpha, f_);
    phi_b_ = reduce_bivar(*setup_->phi_beta, f_);
    auto rts = roots(reduce_poly(setup_->H, f_), seed);
    if (static_cast<long long>(rts.size()) != setup_->so.h)
        throw volcano_error("H_O does not split completely mod p");
    for (std::size_t i = 0; i < rts.size(); ++i) {
        surface_sorted_.push_back(f_.to_u64(rts[i]));
        surface_index_.emplace(rts[i], -1);
    }
}

bool VolcanoContext::on_surface(std::uint64_t j) const { return surface_index_.count(f_.from_u64(j)) > 0; }

// The rational root of Phi_b(cur, Y) other than prev; with prev == nullptr, the least rational root.
VolcanoContext::elem VolcanoContext::step(const Matrix& phi, elem cur, const elem* prev) {
    std::size_t n = phi.size();
    std::vector<elem> c(n, f_.zero());
    elem xp = f_.one();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) c[j] = f_.add(c[j], f_.mul(phi[i][j], xp));
        xp = f_.mul(xp, cur);
    }
    Poly<Fp64> g(f_, std::move(c));
    if (!prev) {
        auto r = roots(g, rng_());
        if (r.size() != 2) throw volcano_error("expected two rational neighbors, found " + std::to_string(r.size()));
        return r[0];
    }
    auto [q, rem] = divrem(g, Poly<Fp64>::linear(f_, *prev));
    if (!rem.is_zero()) throw volcano_error("predecessor is not a neighbor");
    auto xp_mod = powmod(Poly<Fp64>::x(f_), pp_.p, q);
    auto d = gcd(xp_mod - Poly<Fp64>::x(f_), q);
    if (d.degree() != 1) throw volcano_error("expected a unique rational successor");
    return f_.neg(f_.mul(d.coeff(0), f_.inv(d.coeff(1))));
}

const SurfaceWalk& VolcanoContext::enumerate_surface() {
    if (walked_) return walk_;
    long long h = setup_->so.h;
    elem w0 = f_.from_u64(surface_sorted_.front());
    walk_elems_ = {w0};
    // First step: least neighbor on the surface.
    {
        std::size_t n = phi_a_.size();
        std::vector<elem> c(n, f_.zero());
        elem xp = f_.one();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) c[j] = f_.add(c[j], f_.mul(phi_a_[i][j], xp));
            xp = f_.mul(xp, w0);
        }
        auto r = roots(Poly<Fp64>(f_, std::move(c)), rng_());
        std::vector<elem> on;
        for (auto x : r)
            if (surface_index_.count(x)) on.push_back(x);
        if (on.empty()) throw volcano_error("surface walk left the surface root set");
        if (h > 1) walk_elems_.push_back(on.front());
        ++stats_.surface_steps;
    }
    while (static_cast<long long>(walk_elems_.size()) < h) {
        elem prev = walk_elems_[walk_elems_.size() - 2];
        elem nxt = step(phi_a_, walk_elems_.back(), &prev);
        ++stats_.surface_steps;
        if (!surface_index_.count(nxt)) throw volcano_error("surface walk left the surface root set");
        walk_elems_.push_back(nxt);
    }
    for (long long k = 0; k < h; ++k) {
        auto& slot = surface_index_.at(walk_elems_[k]);
        if (slot != -1) throw volcano_error("surface walk revisited a vertex");
        slot = k;
    }
    walk_.vertices.clear();
    walk_.siblings.clear();
    for (long long k = 0; k < h; ++k) {
        walk_.vertices.push_back(f_.to_u64(walk_elems_[k]));
        std::vector<std::uint64_t> sib;
        for (auto y : sibling_values(walk_elems_[k])) sib.push_back(f_.to_u64(y));
        walk_.siblings.push_back(std::move(sib));
    }
    walked_ = true;
    return walk_;
}

std::vector<VolcanoContext::elem> VolcanoContext::sibling_values(elem y) {
    if (setup_->kron != 1) return {};
    long long h = setup_->so.h, s = setup_->sibling_log;
    long long k = surface_index_.at(y);
    return {walk_elems_[((k + s) % h + h) % h], walk_elems_[((k - s) % h + h) % h]};
}

std::uint64_t VolcanoContext::descend_to_floor(std::uint64_t w) {
    elem wj = f_.from_u64(w);
    if (!surface_index_.count(wj)) throw volcano_error("descend_to_floor: not a surface vertex");
    unsigned long ell = static_cast<unsigned long>(setup_->ell());
    auto E = select_twist(curve_from_j(f_, wj), pp_.t, rng_);
    mpz_class N = pp_.p + 1 - pp_.t;
    auto [P1, P2] = ell_torsion_basis(E, ell, N, rng_);
    Point<Fp64> K = P2;
    for (unsigned long i = 0; i <= ell; ++i) {
        const Point<Fp64>& gen = i == ell ? P1 : K;
        auto I = velu(E, gen, ell);
        ++stats_.velu_calls;
        elem j = I.codomain.j_invariant();
        if (!surface_index_.count(j)) return f_.to_u64(j);
        K = point_add(E, K, P1);
    }
    throw volcano_error("descend_to_floor: every ell-isogeny stays on the surface");
}

std::uint64_t VolcanoContext::ascend_to_surface(std::uint64_t j) {
    unsigned long ell = static_cast<unsigned long>(setup_->ell());
    auto E = select_twist(curve_from_j(f_, f_.from_u64(j)), pp_.t, rng_);
    mpz_class N = pp_.p + 1 - pp_.t;
    auto P = ell_torsion_point(E, ell, N, rng_);
    auto I = velu(E, P, ell);
    ++stats_.velu_calls;
    elem y = I.codomain.j_invariant();
    if (!surface_index_.count(y)) throw volcano_error("ascend_to_surface: parent not on the surface");
    return f_.to_u64(y);
}

void VolcanoContext::walk_floor(const std::function<void(std::size_t, elem, long long)>& on_child,
                                std::vector<elem>& parents, const std::function<void(std::size_t)>& on_parent,
                                long long nb) {
    enumerate_surface();
    const auto& S = *setup_;
    long long h = S.so.h;
    if (nb <= 0) nb = S.buckets();
    long long last = (S.children() - 1) * h + nb - 1;
    parents.assign(static_cast<std::size_t>(nb), f_.zero());
    std::vector<bool> have(static_cast<std::size_t>(nb), false);
    elem cur = f_.from_u64(descend_to_floor(walk_.vertices.front()));
    elem prev = f_.zero();
    for (long long e = 0;; ++e) {
        long long i = coset_index(S.gamma, Word{e});
        if (i < nb) {
            auto bi = static_cast<std::size_t>(i);
            if (!have[bi]) {
                parents[bi] = f_.from_u64(ascend_to_surface(f_.to_u64(cur)));
                have[bi] = true;
                on_parent(bi);
            }
            on_child(bi, cur, e);
        }
        if (e == last) break;
        elem nxt = step(phi_b_, cur, e == 0 ? nullptr : &prev);
        ++stats_.floor_steps;
        prev = cur;
        cur = nxt;
    }
}

std::vector<Bucket> VolcanoContext::bucket_structure(bool complete) {
    long long nb = complete ? setup_->so.h : setup_->buckets();
    std::vector<Bucket> out(static_cast<std::size_t>(nb));
    std::vector<elem> parents;
    walk_floor(
        [&](std::size_t i, elem j, long long e) {
            out[i].children.push_back(f_.to_u64(j));
            out[i].exponents.push_back(e);
        },
        parents,
        [&](std::size_t i) {
            out[i].parent = f_.to_u64(parents[i]);
            for (auto s : sibling_values(parents[i])) out[i].siblings.push_back(f_.to_u64(s));
        },
        nb);
    return out;
}

std::vector<std::uint64_t> VolcanoContext::interpolate_values(const std::vector<elem>& ys, const std::vector<elem>& zs) {
    auto P = interpolate(f_, ys, zs);
    std::vector<std::uint64_t> out(static_cast<std::size_t>(setup_->buckets()), 0);
    for (std::size_t k = 0; k < P.coeffs().size(); ++k) out[k] = f_.to_u64(P.coeffs()[k]);
    return out;
}

std::vector<std::vector<std::uint64_t>> VolcanoContext::phi_mod_p() {
    std::size_t n = static_cast<std::size_t>(setup_->buckets());
    std::vector<Poly<Fp64>> phi_i(n, Poly<Fp64>::constant(f_, f_.one()));
    std::vector<elem> parents;
    walk_floor([&](std::size_t i, elem j, long long) { phi_i[i] = phi_i[i] * Poly<Fp64>::linear(f_, j); }, parents,
               [&](std::size_t i) {
                   for (auto s : sibling_values(parents[i])) phi_i[i] = phi_i[i] * Poly<Fp64>::linear(f_, s);
               });
    // Lagrange basis on the parents, shared by every X-coefficient.
    Poly<Fp64> m = from_roots(f_, parents);
    std::vector<std::vector<elem>> basis(n, std::vector<elem>(n));
    for (std::size_t i = 0; i < n; ++i) {
        elem carry = f_.zero();
        for (std::size_t k = n; k-- > 0;) {
            carry = f_.add(m.coeff(k + 1), f_.mul(carry, parents[i]));
            basis[i][k] = carry;
        }
        elem d = f_.zero();
        for (std::size_t k = n; k-- > 0;) d = f_.add(f_.mul(d, parents[i]), basis[i][k]);
        elem w = f_.inv(d);
        for (auto& x : basis[i]) x = f_.mul(x, w);
    }
    std::vector<std::vector<std::uint64_t>> out(n, std::vector<std::uint64_t>(n));
    for (std::size_t a = 0; a < n; ++a) {
        std::vector<elem> acc(n, f_.zero());
        for (std::size_t i = 0; i < n; ++i) {
            elem c = phi_i[i].coeff(a);
            if (f_.is_zero(c)) continue;
            for (std::size_t k = 0; k < n; ++k) acc[k] = f_.add(acc[k], f_.mul(c, basis[i][k]));
        }
        for (std::size_t k = 0; k < n; ++k) out[a][k] = f_.to_u64(acc[k]);
    }
    return out;
}

std::vector<std::uint64_t> VolcanoContext::eval_online(std::uint64_t x) { return eval_online_multi({x}).at(0); }

std::vector<std::vector<std::uint64_t>> VolcanoContext::eval_online_multi(const std::vector<std::uint64_t>& xs) {
    std::size_t n = static_cast<std::size_t>(setup_->buckets()), m = xs.size();
    std::vector<elem> xv;
    for (auto x : xs) xv.push_back(f_.from_u64(x));
    std::vector<std::vector<elem>> z(m, std::vector<elem>(n, f_.one()));
    std::vector<elem> parents;
    walk_floor(
        [&](std::size_t i, elem j, long long) {
            for (std::size_t r = 0; r < m; ++r) z[r][i] = f_.mul(z[r][i], f_.sub(xv[r], j));
        },
        parents,
        [&](std::size_t i) {
            for (auto s : sibling_values(parents[i]))
                for (std::size_t r = 0; r < m; ++r) z[r][i] = f_.mul(z[r][i], f_.sub(xv[r], s));
        });
    std::vector<std::vector<std::uint64_t>> out;
    for (std::size_t r = 0; r < m; ++r) out.push_back(interpolate_values(parents, z[r]));
    return out;
}

std::vector<std::uint64_t> VolcanoContext::eval_powers(const std::vector<std::uint64_t>& xs) {
    std::size_t n = static_cast<std::size_t>(setup_->buckets());
    if (xs.size() != n - 1) throw std::invalid_argument("eval_powers: expected ell+1 values");
    std::vector<std::uint64_t> w{1};
    w.insert(w.end(), xs.begin(), xs.end());
    return eval_weighted({w}).at(0);
}

std::vector<std::vector<std::uint64_t>> VolcanoContext::eval_weighted(
    const std::vector<std::vector<std::uint64_t>>& ws) {
    std::size_t n = static_cast<std::size_t>(setup_->buckets()), m = ws.size();
    std::vector<std::vector<elem>> wv(m);
    for (std::size_t r = 0; r < m; ++r) {
        if (ws[r].size() != n) throw std::invalid_argument("eval_weighted: expected ell+2 weights");
        for (auto x : ws[r]) wv[r].push_back(f_.from_u64(x));
    }
    std::size_t kids = static_cast<std::size_t>(setup_->children());
    // phi_i(X) is kept only until bucket i has all of its children.
    std::vector<Poly<Fp64>> phi_i(n, Poly<Fp64>(f_));
    std::vector<std::size_t> seen(n, 0);
    std::vector<std::vector<elem>> z(m, std::vector<elem>(n, f_.zero()));
    std::vector<elem> parents;
    walk_floor(
        [&](std::size_t i, elem j, long long) {
            phi_i[i] = phi_i[i] * Poly<Fp64>::linear(f_, j);
            if (++seen[i] < kids) return;
            const auto& c = phi_i[i].coeffs();
            for (std::size_t r = 0; r < m; ++r) {
                elem acc = f_.zero();
                for (std::size_t k = 0; k < c.size(); ++k) acc = f_.add(acc, f_.mul(c[k], wv[r][k]));
                z[r][i] = acc;
            }
            phi_i[i] = Poly<Fp64>(f_);
        },
        parents,
        [&](std::size_t i) {
            phi_i[i] = Poly<Fp64>::constant(f_, f_.one());
            for (auto s : sibling_values(parents[i])) phi_i[i] = phi_i[i] * Poly<Fp64>::linear(f_, s);
        });
    std::vector<std::vector<std::uint64_t>> out;
    for (std::size_t r = 0; r < m; ++r) out.push_back(interpolate_values(parents, z[r]));
    return out;
}

}  // namespace modpoly
