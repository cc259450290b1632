#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "loewner/boundary.hpp"
#include "loewner/evolution.hpp"

namespace loewner {

/// Time-indexed family of maps of the disc, (s, z) -> f_s(z).
using ChainMap = std::function<Complex(double, Complex)>;

/// Finite-horizon Loewner chain f_s := phi_{s,T}, s in [t_begin, T].
class ChainSnapshot {
public:
    ChainSnapshot(EvolutionFamily fam, double horizon);

    double horizon() const { return horizon_; }
    double begin() const { return fam_.field().valid_begin(); }
    const EvolutionFamily& family() const { return fam_; }
    const std::string& field_id() const { return fam_.field().id(); }

    Complex operator()(double s, Complex z) const { return fam_.evolve(s, horizon_, z); }
    MapValue with_derivative(double s, Complex z) const { return fam_.evolve_with_derivative(s, horizon_, z); }
    /// f_s(z) - anchor, accurate near a boundary point fixed by the family.
    Complex increment(double s, Complex z, Complex anchor) const {
        return fam_.evolve_relative(s, horizon_, z, anchor).value;
    }
    /// f_t^{-1}(w) by Newton iteration on the forward map.
    Complex inverse(double t, Complex w) const { return fam_.invert(t, horizon_, w); }

    DiscMap at(double s) const;
    ChainMap as_map() const;

private:
    EvolutionFamily fam_;
    double horizon_;
};

ChainSnapshot chain_from_family(const EvolutionFamily& fam, double horizon);

/// max over grid of |f_t(phi_{s,t}(z)) - f_s(z)|.
double association_residual(const ChainSnapshot& chain, double s, double t, std::span<const Complex> grid);

/// Largest Newton residual of f_t^{-1}(f_s(z)), and whether every preimage lies in the disc.
struct RangeReport {
    double max_residual = 0.0;
    bool all_inside = true;
};
RangeReport range_monotonicity_check(const ChainSnapshot& chain, double s, double t, std::span<const Complex> grid);

/// d f_s(z)/ds + G(z,s) f_s'(z), the s-derivative by central differences of width delta.
/// The chain is re-integrated at rtol 1e-13 so that integrator noise stays below the difference.
Complex pde_residual(const ChainSnapshot& chain, Complex z, double s, double delta = 1e-4);

struct ConditionCReport {
    std::vector<double> times;
    std::vector<Complex> boundary_value;  ///< f_s(sigma)
    std::vector<Complex> derivative;      ///< f_s'(sigma)
    std::vector<bool> conformal;          ///< finite nonzero angular derivative per time
    bool c1 = true;
    bool c2 = true;                       ///< f_s(sigma) = f_{t0}(sigma) within 1e-6
    double c3_max_arg = 0.0;              ///< max |arg(f_t'(sigma)/f_s'(sigma))| over consecutive times
    bool c3 = true;
    double arg_spread = 0.0;              ///< max - min of arg f_s'(sigma)
    std::vector<std::string> notes;
};

ConditionCReport condition_C_check(const ChainSnapshot& chain, const BoundaryPoint& sigma, double t0,
                                   std::span<const double> times, double c3_margin = 0.1);

struct PoleData {
    BoundaryPoint sigma;
    Complex residue{0.0};
    bool converged = false;
    bool simple_pole = false;
    AngularEstimate estimate;
};

/// Angular limit of (z - sigma) f(z); a zero or infinite limit is not a simple pole.
PoleData residue_at_pole(const DiscMap& f, const BoundaryPoint& sigma, const StolzSchedule& schedule);
PoleData residue_at_pole(const DiscMap& f, const BoundaryPoint& sigma);

/// g_t(z) = 1/(F_{l(t)}(z) - w0) with l(t) = T t / (1 + t).
class PoleTransform {
public:
    /// Throws PreconditionError if w0 lies within 0.1 of F_{l(t)}(grid) for one of the test times.
    PoleTransform(ChainMap chain, double horizon, Complex w0, std::span<const Complex> test_grid,
                  std::span<const double> test_times);

    static double reparametrize(double t, double horizon) { return horizon * t / (1.0 + t); }
    double l(double t) const { return reparametrize(t, horizon_); }
    Complex operator()(double t, Complex z) const;
    DiscMap at(double t) const;
    Complex w0() const { return w0_; }

private:
    ChainMap chain_;
    double horizon_;
    Complex w0_;
};

struct PoleRoundTrip {
    double t = 0.0;
    AngularEstimate g_value;       ///< g_t(sigma), expected 0
    AngularEstimate g_derivative;  ///< g_t'(sigma)
    PoleData residue;              ///< Res(F_{l(t)}; sigma)
    Complex product{0.0};          ///< g_t'(sigma) Res(F_{l(t)}; sigma), expected 1
};

PoleRoundTrip pole_round_trip(const PoleTransform& g, const ChainMap& chain, const BoundaryPoint& sigma, double t);

/// Field -z p(z,t) of the radial Loewner equation; requires p(0,t) = 1 at the sampled times.
HerglotzField radial_loewner_field(const CaratheodoryFunction& p, std::span<const double> check_times = {});
/// Solution of dw/dt = -w p(w,t), w(s) = z.
MapValue radial_loewner(const CaratheodoryFunction& p, double s, double t, Complex z,
                        const IntegratorConfig& config = {});

}  // namespace loewner
