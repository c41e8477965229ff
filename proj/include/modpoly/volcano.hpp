#pragma once

#include "modpoly/classgroup.hpp"
#include "modpoly/classpoly.hpp"
#include "modpoly/field.hpp"
#include "modpoly/select.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <random>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace modpoly {

struct volcano_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Data shared by every prime for a fixed (ell, O).
struct VolcanoSetup {
    SuitableOrder so;
    QuadOrder floor_order;  // discriminant ell^2 D
    Presentation gamma;     // cl(O') / C
    int kron = 0;           // (D | ell)
    long long sibling_log = 0;  // [l] = alpha^sibling_log when kron = 1
    IntPoly H;              // Hilbert class polynomial of O
    int b_alpha = 0, b_beta = 0;
    const BivarIntPoly* phi_alpha = nullptr;
    const BivarIntPoly* phi_beta = nullptr;

    long long ell() const { return so.ell; }
    long long children() const { return so.ell - kron; }
    long long siblings() const { return 1 + kron; }
    long long buckets() const { return so.ell + 2; }
};

std::shared_ptr<const VolcanoSetup> make_volcano_setup(const SuitableOrder& so);

struct SurfaceWalk {
    std::vector<std::uint64_t> vertices;               // alpha-enumeration from the least root
    std::vector<std::vector<std::uint64_t>> siblings;  // surface ell-neighbors per vertex
};

struct Bucket {
    std::uint64_t parent = 0;
    std::vector<std::uint64_t> siblings;
    std::vector<std::uint64_t> children;  // floor vertices in visiting order
    std::vector<long long> exponents;     // beta exponent of each child relative to the first floor vertex
};

struct WalkStats {
    long long floor_steps = 0;
    long long surface_steps = 0;
    long long velu_calls = 0;
};

// One suitable prime. Values crossing the interface are canonical residues in [0, p).
class VolcanoContext {
public:
    VolcanoContext(std::shared_ptr<const VolcanoSetup> setup, const PrimePackage& pp, std::uint64_t seed = 0);

    const VolcanoSetup& setup() const { return *setup_; }
    const PrimePackage& prime() const { return pp_; }
    const Fp64& field() const { return f_; }
    const std::vector<std::uint64_t>& surface_roots() const { return surface_sorted_; }
    bool on_surface(std::uint64_t j) const;

    const SurfaceWalk& enumerate_surface();
    std::uint64_t descend_to_floor(std::uint64_t w);
    std::uint64_t ascend_to_surface(std::uint64_t j);

    // Buckets 0..ell+1 with their parents and children; complete = one bucket per surface vertex,
    // walking the whole floor.
    std::vector<Bucket> bucket_structure(bool complete = false);

    // Matrix m[i][j] = coefficient of X^i Y^j of Phi_ell mod p.
    std::vector<std::vector<std::uint64_t>> phi_mod_p();
    // Coefficients of Phi_ell(x, Y) mod p.
    std::vector<std::uint64_t> eval_online(std::uint64_t x);
    // Coefficients of sum_ij a_ij x_i Y^j with x_0 = 1; xs holds x_1..x_{ell+1}.
    std::vector<std::uint64_t> eval_powers(const std::vector<std::uint64_t>& xs);

    // One floor walk for several inputs.
    std::vector<std::vector<std::uint64_t>> eval_online_multi(const std::vector<std::uint64_t>& xs);
    // Each weight vector holds w_0..w_{ell+1}; result k is sum_ij a_ij w_i Y^j.
    std::vector<std::vector<std::uint64_t>> eval_weighted(const std::vector<std::vector<std::uint64_t>>& ws);

    const WalkStats& stats() const { return stats_; }

private:
    using elem = Fp64::elem;
    using Matrix = std::vector<std::vector<elem>>;

    elem step(const Matrix& phi, elem cur, const elem* prev);
    void walk_floor(const std::function<void(std::size_t, elem, long long)>& on_child, std::vector<elem>& parents,
                    const std::function<void(std::size_t)>& on_parent, long long nb = 0);
    std::vector<elem> sibling_values(elem y);
    std::vector<std::uint64_t> interpolate_values(const std::vector<elem>& ys, const std::vector<elem>& zs);

    std::shared_ptr<const VolcanoSetup> setup_;
    PrimePackage pp_;
    Fp64 f_;
    std::mt19937_64 rng_;
    Matrix phi_a_, phi_b_;
    std::vector<std::uint64_t> surface_sorted_;
    std::unordered_map<elem, long long> surface_index_;  // Montgomery value -> position in the walk
    SurfaceWalk walk_;
    std::vector<elem> walk_elems_;
    bool walked_ = false;
    WalkStats stats_;
};

}  // namespace modpoly
