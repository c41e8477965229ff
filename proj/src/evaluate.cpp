#include "modpoly/evaluate.hpp"

#include "modpoly/crt.hpp"
#include "modpoly/ntheory.hpp"
#include "modpoly/volcano.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <mutex>
#include <thread>

namespace modpoly {

const char* algorithm_name(Algorithm a) {
    switch (a) {
    case Algorithm::Alg1: return "alg1";
    case Algorithm::Alg2: return "alg2";
    case Algorithm::Hybrid: return "hybrid";
    }
    return "?";
}

std::optional<Algorithm> parse_algorithm(const std::string& s) {
    if (s == "alg1" || s == "1") return Algorithm::Alg1;
    if (s == "alg2" || s == "2") return Algorithm::Alg2;
    if (s == "hybrid") return Algorithm::Hybrid;
    return std::nullopt;
}

PowerLift power_lift(const mpz_class& j, const mpz_class& q, long long n) {
    PowerLift L;
    mpz_class jr = j % q;
    if (jr < 0) jr += q;
    mpz_class x = 1 % q;
    for (long long i = 0; i <= n; ++i) {
        L.x.push_back(x);
        x = x * jr % q;
    }
    return L;
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::shared_ptr<const VolcanoSetup> cached_setup(long long ell, const SelectConfig& cfg) {
    static std::mutex mu;
    static std::map<std::tuple<long long, double, double, bool, long long>, std::shared_ptr<const VolcanoSetup>> cache;
    auto key = std::make_tuple(ell, cfg.c1, cfg.c2, cfg.relax_small_ell, cfg.max_generator_norm);
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    auto S = make_volcano_setup(find_suitable_order(ell, cfg));
    cache.emplace(key, S);
    return S;
}

double log_mpz(const mpz_class& x) {
    long e = 0;
    double m = mpz_get_d_2exp(&e, x.get_mpz_t());
    return std::log(m) + static_cast<double>(e) * std::log(2.0);
}

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p) {
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

void validate(const EvalRequest& req) {
    if (req.ell < 3 || !is_prime_u64(static_cast<std::uint64_t>(req.ell)))
        throw std::invalid_argument("ell must be an odd prime");
    if (req.q < 3 || !is_prime(req.q)) throw std::invalid_argument("q must be an odd prime");
    if (req.algorithm == Algorithm::Alg2 && req.want_derivs)
        throw std::invalid_argument("derivatives are only available with alg1 or hybrid");
}

std::vector<EvalResult> run(const EvalRequest& req, const std::vector<mpz_class>& js_in) {
    validate(req);
    auto t0 = std::chrono::steady_clock::now();
    const long long ell = req.ell;
    const std::size_t n = static_cast<std::size_t>(ell + 2);
    const bool derivs = req.want_derivs;
    const std::size_t blocks = derivs ? 3 : 1;
    const std::size_t per_j = n * blocks;
    const std::size_t nj = js_in.size();
    if (nj == 0) return {};

    std::vector<mpz_class> js;
    for (const auto& j : js_in) {
        mpz_class r = j % req.q;
        if (r < 0) r += req.q;
        js.push_back(r);
    }
    std::vector<PowerLift> lifts;
    if (req.algorithm != Algorithm::Alg2)
        for (const auto& j : js) lifts.push_back(power_lift(j, req.q, ell + 1));

    auto S = cached_setup(ell, req.select);
    BoundKind kind = req.algorithm == Algorithm::Alg2 ? BoundKind::Alg2
                     : derivs                         ? BoundKind::Alg1
                                                      : BoundKind::Alg1NoDerivs;
    double B = alg_height_bound(ell, req.q, kind).B;
    std::vector<PrimePackage> primes = find_suitable_primes(S->so, B, req.select, {req.q});
    std::size_t replaced = 0;

    auto per_prime = [&](const PrimePackage& pp) {
        std::uint64_t p = pp.p.get_ui();
        VolcanoContext ctx(S, pp, splitmix(req.seed ^ p));
        std::vector<std::uint64_t> out(per_j * nj, 0);
        auto red = [&](const mpz_class& x) { return mpz_class(x % pp.p).get_ui(); };
        if (req.algorithm == Algorithm::Alg2) {
            std::vector<std::uint64_t> xs;
            for (const auto& j : js) xs.push_back(red(j));
            auto res = ctx.eval_online_multi(xs);
            for (std::size_t r = 0; r < nj; ++r) std::copy(res[r].begin(), res[r].end(), out.begin() + r * per_j);
            return out;
        }
        // weights w[b][i] per j: x_i, i x_{i-1}, i(i-1) x_{i-2}
        std::vector<std::vector<std::uint64_t>> ws;
        for (std::size_t r = 0; r < nj; ++r) {
            std::vector<std::uint64_t> xh;
            for (const auto& x : lifts[r].x) xh.push_back(red(x));
            ws.push_back(xh);
            if (derivs) {
                std::vector<std::uint64_t> w1(n, 0), w2(n, 0);
                for (std::size_t i = 1; i < n; ++i) w1[i] = mulmod(i % p, xh[i - 1], p);
                for (std::size_t i = 2; i < n; ++i) w2[i] = mulmod(i * (i - 1) % p, xh[i - 2], p);
                ws.push_back(w1);
                ws.push_back(w2);
            }
        }
        std::vector<std::vector<std::uint64_t>> res;
        if (req.algorithm == Algorithm::Hybrid) {
            res = ctx.eval_weighted(ws);
        } else {
            auto M = ctx.phi_mod_p();
            for (const auto& w : ws) {
                std::vector<std::uint64_t> c(n, 0);
                for (std::size_t jy = 0; jy < n; ++jy) {
                    unsigned __int128 acc = 0;
                    for (std::size_t i = 0; i < n; ++i) acc = (acc + static_cast<unsigned __int128>(M[i][jy]) * w[i]) % p;
                    c[jy] = static_cast<std::uint64_t>(acc);
                }
                res.push_back(std::move(c));
            }
        }
        for (std::size_t k = 0; k < res.size(); ++k) std::copy(res[k].begin(), res[k].end(), out.begin() + k * n);
        return out;
    };

    for (int round = 0;; ++round) {
        std::vector<mpz_class> plist;
        for (const auto& pp : primes) plist.push_back(pp.p);
        CrtContext crt(plist, req.q);
        unsigned W = std::max(1u, std::min<unsigned>(req.workers, static_cast<unsigned>(primes.size())));
        std::vector<CrtAccumulator> accs(W, CrtAccumulator(per_j * nj));
        std::atomic<std::size_t> next{0};
        std::mutex mu;
        std::vector<std::size_t> failed;
        std::exception_ptr fatal;
        auto worker = [&](unsigned w) {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= primes.size()) return;
                try {
                    auto res = per_prime(primes[i]);
                    std::vector<mpz_class> cs(res.size());
                    for (std::size_t k = 0; k < res.size(); ++k) cs[k] = static_cast<unsigned long>(res[k]);
                    accs[w].update(crt, i, cs);
                } catch (const volcano_error&) {
                    std::lock_guard<std::mutex> lock(mu);
                    failed.push_back(i);
                } catch (const twist_error&) {
                    std::lock_guard<std::mutex> lock(mu);
                    failed.push_back(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!fatal) fatal = std::current_exception();
                    next.store(primes.size());
                    return;
                }
            }
        };
        if (W == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            for (unsigned w = 0; w < W; ++w) pool.emplace_back(worker, w);
            for (auto& t : pool) t.join();
        }
        if (fatal) std::rethrow_exception(fatal);
        if (failed.empty()) {
            for (unsigned w = 1; w < W; ++w) accs[0].merge(accs[w], crt);
            auto vals = accs[0].finalize(crt);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            std::vector<EvalResult> out(nj);
            for (std::size_t r = 0; r < nj; ++r) {
                EvalResult& R = out[r];
                auto base = vals.begin() + static_cast<long>(r * per_j);
                R.phi.assign(base, base + static_cast<long>(n));
                if (derivs) {
                    R.phi_x.assign(base + static_cast<long>(n), base + static_cast<long>(2 * n));
                    R.phi_xx.assign(base + static_cast<long>(2 * n), base + static_cast<long>(3 * n));
                }
                R.algorithm = req.algorithm;
                R.D = S->so.O.D;
                R.B = B;
                R.prime_count = primes.size();
                R.replaced_primes = replaced;
                R.seconds = secs;
            }
            return out;
        }
        if (round >= 4) throw volcano_error("too many primes failed in the volcano computation");
        // Replace failed primes with the next ones from the scan and start over.
        std::sort(failed.begin(), failed.end());
        mpz_class last = primes.back().p;
        std::vector<PrimePackage> kept;
        double sum = 0;
        for (std::size_t i = 0; i < primes.size(); ++i)
            if (!std::binary_search(failed.begin(), failed.end(), i)) {
                kept.push_back(primes[i]);
                sum += log_mpz(primes[i].p);
            }
        replaced += failed.size();
        PrimeScanner scan(ell, S->so.O.D, S->so.v, req.select.t_ceiling);
        while (sum < B + std::log(4.0)) {
            auto pp = scan.next();
            if (!pp) throw selection_error("prime scan exceeded the t ceiling");
            if (pp->p <= last || pp->p == req.q) continue;
            sum += log_mpz(pp->p);
            kept.push_back(*pp);
            last = pp->p;
        }
        primes = std::move(kept);
    }
}

EvalResult run_one(const EvalRequest& req) { return run(req, {req.j}).at(0); }

}  // namespace

EvalResult algorithm1(const EvalRequest& req) {
    EvalRequest r = req;
    r.algorithm = Algorithm::Alg1;
    return run_one(r);
}

EvalResult algorithm2(const EvalRequest& req) {
    EvalRequest r = req;
    r.algorithm = Algorithm::Alg2;
    return run_one(r);
}

EvalResult hybrid(const EvalRequest& req) {
    EvalRequest r = req;
    r.algorithm = Algorithm::Hybrid;
    return run_one(r);
}

EvalResult evaluate(const EvalRequest& req) { return run_one(req); }

std::vector<EvalResult> evaluate_batch(const EvalRequest& req, const std::vector<mpz_class>& js) {
    return run(req, js);
}

}  // namespace modpoly
