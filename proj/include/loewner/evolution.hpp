#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "loewner/disc.hpp"
#include "loewner/herglotz.hpp"
#include "loewner/integrator.hpp"

namespace loewner {

struct MapValue {
    Complex value{0.0};
    Complex derivative{1.0};
};

/// Two-parameter family phi_{s,t} obtained by integrating dw/dt = G(w,t), w(s) = z.
///
/// Trajectories are cached per (s, z, anchor) as checkpoints of the integrator state, so that a
/// later query phi_{s,t'} with t' > t resumes from phi_{s,t}. Copies share the cache; it is
/// guarded by a mutex and may be disabled for bit-reproducible parallel sweeps.
class EvolutionFamily {
public:
    explicit EvolutionFamily(HerglotzField field, IntegratorConfig config = {}, bool cache = true);

    const HerglotzField& field() const { return field_; }
    const IntegratorConfig& config() const { return config_; }

    /// phi_{s,t}(z). Throws DomainError if |z| >= 1 or s > t, ContainmentError, StiffnessError.
    Complex evolve(double s, double t, Complex z) const;
    /// phi_{s,t}(z) and its z-derivative from the variational equation.
    MapValue evolve_with_derivative(double s, double t, Complex z) const;
    /// phi_{s,t}(z) - anchor integrated in the shifted variable with relative error control, so
    /// that difference quotients towards a fixed boundary point keep full relative accuracy.
    MapValue evolve_relative(double s, double t, Complex z, Complex anchor) const;
    /// Preimage of w under phi_{s,t} by Newton iteration seeded at `seed` (default w).
    Complex invert(double s, double t, Complex w, std::optional<Complex> seed = std::nullopt) const;

    /// phi_{s,t}(x) on (0,1) in real arithmetic; uses the complement form 1 - x when declared.
    double evolve_real_slice(double s, double t, double x) const;
    /// 1 - phi_{s,t}(1 - w) for fields with a complement form.
    double evolve_complement(double s, double t, double w) const;

    DiscMap map(double s, double t) const;

    void set_cache_enabled(bool enabled) { cache_enabled_ = enabled; }
    bool cache_enabled() const { return cache_enabled_; }
    void clear_cache() const;
    std::size_t cache_size() const;

private:
    struct Cache;
    template <std::size_t N>
    std::array<Complex, 2> integrate(double s, double t, Complex z, Complex anchor, bool relative) const;
    void check_times(double s, double t) const;

    HerglotzField field_;
    IntegratorConfig config_;
    bool cache_enabled_;
    std::shared_ptr<Cache> cache_;
};

/// max |phi_{s,t}(z) - phi_{u,t}(phi_{s,u}(z))| over grid.
double check_ef2(const EvolutionFamily& fam, double s, double u, double t, std::span<const Complex> grid);

struct Ef3Report {
    std::vector<double> times;
    std::vector<double> increments;  ///< |phi_{s,t_{i+1}}(z) - phi_{s,t_i}(z)|
    std::vector<double> majorant;    ///< increment / dt, a sample of k_{z,T}
    std::vector<double> field_bound; ///< max |G| at the two endpoints of each interval
    double ld_norm = 0.0;            ///< (sum majorant^d dt)^{1/d}, max for d = inf
    bool finite = true;
};

/// Empirical L^d majorant of t -> phi_{s,t}(z); falsifies (never certifies) a declared order.
Ef3Report check_ef3(const EvolutionFamily& fam, double s, Complex z, std::span<const double> times, double d_exponent);

struct BoundaryTrajectory {
    BoundaryPoint sigma0;
    std::vector<double> times;
    std::vector<double> angles;
    std::vector<double> velocities;
};

/// Integrates theta' = v(t) = Re(-i conj(sigma) G(sigma,t)) on the circle, sampled at `times`.
/// Throws TangencyError if |Im(-i conj(sigma) G(sigma,t))| > 1e-8 at a sampled time.
BoundaryTrajectory boundary_trajectory(const HerglotzField& field, const BoundaryPoint& sigma0,
                                       std::span<const double> times, const IntegratorConfig& config = {});

struct SchwarzPickReport {
    double max_ratio = 0.0;  ///< max |phi'(z)|(1 - |z|^2) / (1 - |phi(z)|^2)
    Complex witness{0.0};
    bool violated = false;
};

SchwarzPickReport schwarz_pick_check(const EvolutionFamily& fam, double s, double t, std::span<const Complex> grid);

/// Smallest pairwise distance between images of the grid points.
double univalence_check(const EvolutionFamily& fam, double s, double t, std::span<const Complex> grid);

}  // namespace loewner
