#include "modpoly/classpoly.hpp"
#include "modpoly/evaluate.hpp"
#include "modpoly/ntheory.hpp"
#include "modpoly/sea.hpp"
#include "modpoly/select.hpp"
#include "modpoly/volcano.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <iostream>
#include <string>

using namespace modpoly;
using json = nlohmann::ordered_json;

namespace {

struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

mpz_class parse_int(const std::string& s, const char* what) {
    mpz_class v;
    std::string t = s;
    if (!t.empty() && t[0] == '+') t.erase(0, 1);
    if (t.empty() || v.set_str(t, 10) != 0) throw usage_error(std::string("invalid integer for ") + what + ": " + s);
    return v;
}

std::vector<std::string> strings(const std::vector<mpz_class>& v) {
    std::vector<std::string> out;
    for (const auto& x : v) out.push_back(x.get_str());
    return out;
}

std::string joined(const std::vector<mpz_class>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + v[i].get_str();
    return s;
}

struct Common {
    double c1 = 1.5, c2 = 256;
    long long t_ceiling = 1LL << 31;
    unsigned workers = 1;
    std::uint64_t seed = 0;
    std::string cache_dir;
    bool json = false;
    bool verbose = false;

    void add(CLI::App* app) {
        app->add_option("--c1", c1, "suitability constant c1")->envname("MODPOLY_C1");
        app->add_option("--c2", c2, "suitability constant c2")->envname("MODPOLY_C2");
        app->add_option("--t-ceiling", t_ceiling, "trace scan ceiling")->envname("MODPOLY_T_CEILING");
        app->add_option("--workers", workers, "worker threads")->envname("MODPOLY_WORKERS");
        app->add_option("--seed", seed, "random seed")->envname("MODPOLY_SEED");
        app->add_option("--cache-dir", cache_dir, "modular polynomial cache directory")->envname("MODPOLY_CACHE_DIR");
        app->add_flag("--json", json, "JSON output")->envname("MODPOLY_JSON");
        app->add_flag("-v,--verbose", verbose, "diagnostics on stderr")->envname("MODPOLY_VERBOSE");
    }

    SelectConfig select() const {
        if (!(c1 > 1) || !(c2 > 1)) throw usage_error("c1 and c2 must exceed 1");
        if (workers < 1) throw usage_error("workers must be at least 1");
        if (!cache_dir.empty()) set_cache_dir(cache_dir);
        SelectConfig s;
        s.c1 = c1;
        s.c2 = c2;
        s.t_ceiling = t_ceiling;
        return s;
    }
};

void require_odd_prime(const mpz_class& n, const char* what) {
    if (n < 3 || n % 2 == 0 || !is_prime(n)) throw usage_error(std::string(what) + " must be an odd prime");
}

int cmd_eval(const Common& c, const std::string& ell_s, const std::string& q_s, const std::string& j_s,
             const std::string& alg_s, bool derivs) {
    EvalRequest r;
    mpz_class ell = parse_int(ell_s, "--ell");
    require_odd_prime(ell, "ell");
    if (!ell.fits_slong_p() || ell > 1000003) throw usage_error("ell out of range");
    r.ell = ell.get_si();
    r.q = parse_int(q_s, "--q");
    require_odd_prime(r.q, "q");
    r.j = parse_int(j_s, "--j") % r.q;
    if (r.j < 0) r.j += r.q;
    auto a = parse_algorithm(alg_s);
    if (!a) throw usage_error("unknown algorithm: " + alg_s);
    r.algorithm = *a;
    r.want_derivs = derivs;
    if (derivs && r.algorithm == Algorithm::Alg2) throw usage_error("--derivs is not available with --alg 2");
    r.seed = c.seed;
    r.workers = c.workers;
    r.select = c.select();
    EvalResult R = evaluate(r);
    if (c.verbose)
        std::cerr << "algorithm=" << algorithm_name(R.algorithm) << " D=" << R.D << " B=" << R.B
                  << " primes=" << R.prime_count << " replaced=" << R.replaced_primes << " seconds=" << R.seconds
                  << "\n";
    if (c.json) {
        json out;
        out["ell"] = r.ell;
        out["q"] = r.q.get_str();
        out["j"] = r.j.get_str();
        out["algorithm"] = algorithm_name(R.algorithm);
        out["phi"] = strings(R.phi);
        if (derivs) {
            out["phi_x"] = strings(R.phi_x);
            out["phi_xx"] = strings(R.phi_xx);
        }
        out["primes_used"] = R.prime_count;
        out["seed"] = r.seed;
        std::cout << out.dump() << "\n";
    } else {
        std::cout << "phi: " << joined(R.phi) << "\n";
        if (derivs) {
            std::cout << "phi_x: " << joined(R.phi_x) << "\n";
            std::cout << "phi_xx: " << joined(R.phi_xx) << "\n";
        }
    }
    return 0;
}

int cmd_count(const Common& c, const std::string& q_s, const std::string& a_s, const std::string& b_s, bool naive,
              const std::string& route) {
    mpz_class q = parse_int(q_s, "--q");
    if (q < 5 || !is_prime(q)) throw usage_error("q must be a prime greater than 3");
    FpBig f(q);
    mpz_class a = parse_int(a_s, "--a") % q, b = parse_int(b_s, "--b") % q;
    Curve<FpBig> E(f, f.from_mpz(a < 0 ? a + q : a), f.from_mpz(b < 0 ? b + q : b));
    if (E.is_singular()) throw usage_error("singular curve: 4a^3 + 27b^2 = 0 mod q");
    SeaOptions opt;
    opt.seed = c.seed;
    opt.workers = c.workers;
    opt.select = c.select();
    if (route == "recon") opt.route = ElkiesRoute::Reconstruction;
    else if (route != "derivs") throw usage_error("unknown route: " + route);
    SeaResult R;
    if (naive) {
        if (q >= (mpz_class(1) << 64)) throw usage_error("--naive needs q < 2^64");
        R.order = count_points_naive(E);
        R.trace = q + 1 - R.order;
        R.naive = true;
    } else {
        R = sea_count(E, opt);
    }
    if (c.json) {
        json out;
        out["q"] = q.get_str();
        out["a"] = f.to_mpz(E.a4).get_str();
        out["b"] = f.to_mpz(E.a6).get_str();
        out["order"] = R.order.get_str();
        out["trace"] = R.trace.get_str();
        out["method"] = R.naive ? "naive" : "sea";
        json ls = json::array();
        for (const auto& t : R.traces) {
            json e;
            e["ell"] = t.ell;
            e["kind"] = trace_kind_name(t.kind);
            if (t.kind == TraceKind::Elkies) {
                e["t_mod_ell"] = t.t_mod;
                e["lambda"] = t.lambda;
            }
            ls.push_back(e);
        }
        out["primes"] = ls;
        out["largest_elkies_ell"] = R.largest_ell;
        std::cout << out.dump() << "\n";
    } else {
        std::cout << R.order.get_str() << "\n" << "t = " << R.trace.get_str() << "\n";
    }
    return 0;
}

int cmd_volcano(const Common& c, const std::string& ell_s, const std::string& disc_s, const std::string& p_s) {
    mpz_class ell = parse_int(ell_s, "--ell"), D = parse_int(disc_s, "--disc"), p = parse_int(p_s, "--p");
    require_odd_prime(ell, "ell");
    if (!ell.fits_slong_p() || !D.fits_slong_p()) throw usage_error("ell or D out of range");
    SelectConfig cfg = c.select();
    long long l = ell.get_si(), d = D.get_si();
    if (d >= 0 || (((d % 4) + 4) % 4 > 1)) throw usage_error("D must be a negative discriminant");
    auto so = make_suitable_order(l, d, cfg);
    if (!so) throw usage_error("order of discriminant " + D.get_str() + " is not suitable for ell = " + ell.get_str());
    if (!is_prime(p)) throw usage_error("p is not prime");
    if (p % ell != 1) throw usage_error("p is not 1 mod ell");
    if (p >= (mpz_class(1) << 62)) throw usage_error("p exceeds the 62-bit word limit");
    mpz_class vv(static_cast<long>(so->v));
    mpz_class shift = ell * ell * vv * vv * (-D);
    mpz_class t2 = 4 * p - shift, t;
    if (t2 < 0 || !mpz_perfect_square_p(t2.get_mpz_t())) throw usage_error("4p - ell^2 v^2 |D| is not a square");
    mpz_sqrt(t.get_mpz_t(), t2.get_mpz_t());
    if (t % ell != 2 % ell) t = -t;
    PrimePackage pp{p, t, so->v, l, d};
    if (!is_suitable_prime(pp)) throw usage_error("p violates the auxiliary-factor condition on v");

    auto setup = make_volcano_setup(*so);
    VolcanoContext ctx(setup, pp, c.seed);
    const SurfaceWalk& walk = ctx.enumerate_surface();
    auto buckets = ctx.bucket_structure(true);
    json out;
    out["ell"] = l;
    out["disc"] = d;
    out["p"] = p.get_str();
    out["t"] = t.get_str();
    out["v"] = so->v;
    out["class_number"] = so->h;
    out["floor_class_number"] = so->h_floor;
    out["kronecker"] = setup->kron;
    out["surface"] = walk.vertices;
    json verts = json::array();
    long long total = 0;
    for (std::size_t i = 0; i < walk.vertices.size(); ++i) {
        json v;
        v["j"] = walk.vertices[i];
        v["siblings"] = walk.siblings[i];
        std::size_t kids = 0;
        for (const auto& b : buckets)
            if (b.parent == walk.vertices[i]) kids = b.children.size();
        v["children"] = kids;
        verts.push_back(v);
    }
    out["vertices"] = verts;
    json census = json::array();
    for (const auto& b : buckets) {
        census.push_back({{"parent", b.parent}, {"children", b.children.size()}});
        total += static_cast<long long>(b.children.size());
    }
    out["buckets"] = census;
    out["floor_vertices"] = total;
    out["floor_steps"] = ctx.stats().floor_steps;
    std::cout << out.dump(c.json ? -1 : 2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Instantiated modular polynomials and SEA point counting"};
    app.require_subcommand(1);
    Common common;

    auto* ev = app.add_subcommand("eval", "evaluate Phi_ell(j, Y) mod q");
    std::string ell, q, j, alg = "1";
    bool derivs = false;
    ev->add_option("--ell", ell, "odd prime ell")->required()->envname("MODPOLY_ELL");
    ev->add_option("--q", q, "prime modulus")->required()->envname("MODPOLY_Q");
    ev->add_option("--j", j, "j-invariant")->required()->envname("MODPOLY_J");
    ev->add_option("--alg", alg, "1, 2 or hybrid")->envname("MODPOLY_ALG");
    ev->add_flag("--derivs", derivs, "also output phi_X and phi_XX")->envname("MODPOLY_DERIVS");
    common.add(ev);

    auto* ct = app.add_subcommand("count", "count points on y^2 = x^3 + a x + b over F_q");
    std::string cq, ca, cb, route = "derivs";
    bool naive = false;
    ct->add_option("--q", cq, "prime field size")->required()->envname("MODPOLY_Q");
    ct->add_option("--a", ca, "coefficient a")->required()->envname("MODPOLY_A");
    ct->add_option("--b", cb, "coefficient b")->required()->envname("MODPOLY_B");
    ct->add_flag("--naive", naive, "exhaustive or baby-step/giant-step count")->envname("MODPOLY_NAIVE");
    ct->add_option("--route", route, "kernel polynomial route: derivs or recon")->envname("MODPOLY_ROUTE");
    common.add(ct);

    auto* vo = app.add_subcommand("volcano", "dump the volcano structure for (ell, D, p)");
    std::string vl, vd, vp;
    vo->add_option("--ell", vl, "odd prime ell")->required()->envname("MODPOLY_ELL");
    vo->add_option("--disc", vd, "surface discriminant")->required()->envname("MODPOLY_DISC");
    vo->add_option("--p", vp, "suitable prime")->required()->envname("MODPOLY_P");
    common.add(vo);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }
    try {
        if (*ev) return cmd_eval(common, ell, q, j, alg, derivs);
        if (*ct) return cmd_count(common, cq, ca, cb, naive, route);
        if (*vo) return cmd_volcano(common, vl, vd, vp);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
