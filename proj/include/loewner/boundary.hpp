#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loewner/disc.hpp"
#include "loewner/evolution.hpp"
#include "loewner/extrapolation.hpp"
#include "loewner/herglotz.hpp"

namespace loewner {

/// Map known near a boundary point through its increment: f(z) = anchor + increment(z).
/// Keeps f(z) - f(sigma) free of cancellation when f comes from the shifted integrator.
struct AnchoredMap {
    Complex anchor;
    DiscMap increment;
};

/// phi_{s,t} written around its fixed boundary point sigma.
AnchoredMap anchored_flow(const EvolutionFamily& fam, double s, double t, const BoundaryPoint& sigma);
/// Plain map wrapped as an anchored map with the given boundary value.
AnchoredMap anchored(DiscMap f, Complex value_at_sigma);

AngularEstimate angular_limit(const DiscMap& f, const BoundaryPoint& sigma, const StolzSchedule& schedule,
                              const ExtrapolationOptions& options = {});
AngularEstimate angular_limit(const DiscMap& f, const BoundaryPoint& sigma);

/// Extrapolated (f(z) - f_at_sigma) / (z - sigma) along the schedule.
AngularEstimate angular_derivative(const DiscMap& f, const BoundaryPoint& sigma, Complex f_at_sigma,
                                   const StolzSchedule& schedule, const ExtrapolationOptions& options = {});
AngularEstimate angular_derivative(const AnchoredMap& f, const BoundaryPoint& sigma, const StolzSchedule& schedule,
                                   const ExtrapolationOptions& options = {});

struct DilatationEstimate : AngularEstimate {
    /// Running minimum of the raw quotients (1 - |f(z_k)|)/(1 - |z_k|); liminf diagnostic.
    double running_min = 0.0;
};

/// Boundary dilatation coefficient; an infinite coefficient is a non-converged blow-up.
DilatationEstimate dilatation_coefficient(const DiscMap& f, const BoundaryPoint& sigma, const StolzSchedule& schedule,
                                          const ExtrapolationOptions& options = {});
DilatationEstimate dilatation_coefficient(const AnchoredMap& f, const BoundaryPoint& sigma,
                                          const StolzSchedule& schedule, const ExtrapolationOptions& options = {});

struct InequalityReport {
    double max_violation = -INFINITY;
    Complex witness{0.0};
    bool violated = false;
};

/// max over grid of |omega - f(z)|^2/(1 - |f(z)|^2) - A |sigma - z|^2/(1 - |z|^2).
InequalityReport jwc_inequality_check(const DiscMap& f, const BoundaryPoint& sigma, const BoundaryPoint& omega,
                                      double A, std::span<const Complex> grid, double tolerance = 1e-9);

struct DwLowerBoundReport {
    bool skipped = false;  ///< sigma coincides with tau
    double alpha = 0.0;
    double bound = 0.0;    ///< |1 - conj(tau) f(sigma)|^2 / |1 - conj(tau) sigma|^2
    bool holds = false;
    double gap = 0.0;      ///< alpha - bound
};

/// alpha_f(sigma) >= |1 - conj(tau) f(sigma)|^2 / |1 - conj(tau) sigma|^2 - 1e-6.
DwLowerBoundReport dw_lower_bound_check(const DiscMap& f, Complex tau, const BoundaryPoint& sigma,
                                        const StolzSchedule& schedule);

/// Angular limit of G(z)/(z - sigma); its real part is the dilation of a null point.
AngularEstimate brnp_dilation(const DiscMap& g, const BoundaryPoint& sigma, const StolzSchedule& schedule,
                              const ExtrapolationOptions& options = {});
AngularEstimate brnp_dilation(const HerglotzField& field, double t, const BoundaryPoint& sigma);
/// Converged with |Im| < 1e-6.
bool is_null_point(const AngularEstimate& dilation);

/// Dilation of the field at sigma at time t: declared when available, numeric otherwise.
/// Throws EvaluationError if sigma is not a null point at time t.
double dilation_at(const HerglotzField& field, const BoundaryPoint& sigma, double t);

struct SpectralTrace {
    std::vector<double> times;
    std::vector<double> lambda_direct;
    std::vector<double> lambda_integral;
    std::vector<bool> direct_converged;
    std::vector<bool> integral_converged;
    double discrepancy = 0.0;
    bool complete = true;
    /// Angles of the contact point (moving traces only).
    std::vector<double> angles;
};

struct SpectralOptions {
    StolzSchedule schedule{BoundaryPoint(0.0)};
    ExtrapolationOptions extrapolation{};
    double quadrature_tol = 1e-12;
};

/// Lambda at a fixed boundary regular fixed point by -log|phi'_{t0,t}(sigma)| and by -int lambda.
/// times[0] is the origin of the trace.
SpectralTrace spectral_trace(const EvolutionFamily& fam, const BoundaryPoint& sigma, std::span<const double> times,
                             const SpectralOptions& options = {});

/// Lambda along a moving contact point sigma(t): the integral route integrates -Re G'(sigma(t), t)
/// alongside the trajectory; the direct route takes the angular derivative of phi_{t0,t} at sigma0.
SpectralTrace moving_spectral_trace(const EvolutionFamily& fam, const BoundaryPoint& sigma0,
                                    std::span<const double> times, const SpectralOptions& options = {});

/// Total variation of a sampled function.
double total_variation(std::span<const double> values);

enum class Verdict { regular_fixed, fixed_nonregular, contact_moving, lost_to_interior, withheld };
std::string to_string(Verdict v);

struct ClassificationOptions {
    /// <= 0 selects half of the field's validity window, capped at 1.
    double horizon = 0.0;
    std::vector<int> epsilon_exponents{2, 3, 4, 5, 6};
    double divergence_threshold = 1e6;
    double margin = 1e-3;
    int sweep_k_first = 4;
    int sweep_k_last = 48;
    double spectral_tolerance = 1e-4;
};

struct ClassificationReport {
    Verdict verdict = Verdict::withheld;
    double horizon = 0.0;
    // Dilation integrability near the start of the window.
    bool null_point = false;
    std::vector<double> epsilons;
    std::vector<double> dilation_integrals;
    bool integrable = false;
    double spectral_discrepancy = NAN;
    // Radial sweep at the horizon.
    std::vector<double> sweep_distance;  ///< 1 - x_k
    std::vector<double> sweep_gap;       ///< 1 - |phi(x_k)|
    std::vector<double> sweep_quotient;  ///< (1 - |phi(x_k)|)/(1 - x_k)
    double sup_modulus = NAN;
    double max_quotient = NAN;
    AngularEstimate radial_limit;
    double trajectory_displacement = NAN;
    std::vector<std::string> notes;
};

/// Decision procedure for the boundary behaviour of phi_{t0,t} at sigma (see README).
ClassificationReport classify_boundary_point(const EvolutionFamily& fam, const BoundaryPoint& sigma,
                                             const ClassificationOptions& options = {});

/// max over grid of Re(v(z) G(z,t)) + G'(1,t) u(z) with u, v the Poisson kernel terms.
InequalityReport brnp_pde_inequality_check(const HerglotzField& field, double t, std::span<const Complex> grid,
                                           double tolerance = 1e-9);

struct BvBoundReport {
    double increment = 0.0;  ///< Lambda(t) - Lambda(s)
    double bound = 0.0;      ///< log((1 + |phi_{s,t}(0)|)/(1 - |phi_{s,t}(0)|))
    bool violated = false;
};

BvBoundReport bv_bound_check(const EvolutionFamily& fam, const BoundaryPoint& sigma, double s, double t);

/// Default horizon for classification: half the validity window, capped at 1.
double default_horizon(const HerglotzField& field);

}  // namespace loewner
