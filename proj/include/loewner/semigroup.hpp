#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "loewner/boundary.hpp"
#include "loewner/disc.hpp"
#include "loewner/evolution.hpp"
#include "loewner/herglotz.hpp"

namespace loewner {

/// One-parameter semigroup generated by an autonomous field.
class Semigroup {
public:
    explicit Semigroup(HerglotzField generator, IntegratorConfig config = {});

    const HerglotzField& generator() const { return fam_.field(); }
    const EvolutionFamily& family() const { return fam_; }
    Complex operator()(double t, Complex z) const { return fam_.evolve(0.0, t, z); }
    DiscMap at(double t) const { return fam_.map(0.0, t); }
    /// max over grid of |phi_{s+t}(z) - phi_t(phi_s(z))|.
    double law_residual(double s, double t, std::span<const Complex> grid) const;

private:
    EvolutionFamily fam_;
};

Complex semigroup_flow(const HerglotzField& generator, double t, Complex z, const IntegratorConfig& config = {});

enum class DwCase {
    interior_automorphism,  ///< interior fixed point with |phi'(tau)| = 1
    interior_attracting,    ///< interior fixed point with |phi'(tau)| < 1
    boundary,               ///< boundary point with dilatation <= 1
    inconclusive,
};
std::string to_string(DwCase c);

struct DwResult {
    Complex tau{0.0};
    DwCase kind = DwCase::inconclusive;
    double derivative_modulus = NAN;  ///< |phi'(tau)| for interior points
    double dilatation = NAN;          ///< alpha_phi(tau) for boundary points
    std::size_t iterations = 0;
    std::vector<std::string> notes;
};

/// Denjoy-Wolff point by iteration from {0, +-0.5, +-0.5i}.
DwResult dw_point(const DiscMap& phi, long max_iter = 100000, double tol = 1e-10);

struct ProductFormulaRow {
    int n = 0;
    double error = 0.0;
};

struct ProductFormulaReport {
    Complex reference{0.0};  ///< flow of the field frozen at t0
    std::vector<ProductFormulaRow> rows;
    bool non_increasing = true;  ///< no increase beyond 100 (atol + rtol |reference|) along the sequence
    double final_error = NAN;
};

/// Compares (phi_{t0, t0 + t/n})^{on} (z) with the semigroup of G(., t0) at time t.
ProductFormulaReport product_formula_check(const HerglotzField& field, double t0, double t, std::span<const int> ns,
                                           Complex z, const IntegratorConfig& config = {});

struct SemigroupBrfpReport {
    std::vector<double> times;
    std::vector<double> derivative;  ///< |phi_t'(sigma)|
    std::vector<double> expected;    ///< e^{lambda t}
    double max_error = 0.0;
    bool ok = true;
};

SemigroupBrfpReport semigroup_brfp_check(const HerglotzField& generator, const BoundaryPoint& sigma, double lambda,
                                         std::span<const double> times, double tolerance = 1e-5);

/// l_t = p0^{-1} o (w -> w + i t v0 / t0) o p0; parabolic automorphisms fixing 1.
class ParabolicFamily {
public:
    ParabolicFamily(double v0, double t0);
    MoebiusAutomorphism at(double t) const;
    /// d/dt l_t(z)
    Complex time_derivative(double t, Complex z) const;
    double v0() const { return v0_; }
    double t0() const { return t0_; }

private:
    double v0_;
    double t0_;
};

ParabolicFamily parabolic_translation_family(double v0, double t0);

/// Spectral function prescribed through m_t(z) = (z + x(t))/(1 + x(t) z), x(t) = tanh(D(t)/2).
struct SpectralPrescription {
    TimeFunction lambda;
    /// d Lambda / dt; central differences when empty.
    TimeFunction lambda_prime;
};

/// Conjugated evolution family psi_{s,t} = A_t o phi_{s,t} o A_s^{-1} with
/// A_t = l^{-1} o l_t o m_t at the boundary regular fixed point 1 of a base family.
class EmbeddingResult {
public:
    EmbeddingResult(EvolutionFamily base, SpectralPrescription lambda, double t0, double v0, std::string target_id);

    /// psi_{s,t}(z) by composition with the base family.
    Complex psi(double s, double t, Complex z) const;
    /// Target map phi = phi_{0,t0} o l.
    Complex target(Complex z) const;
    MoebiusAutomorphism conjugator(double t) const;
    /// Family integrated from the induced field dA_t/dt(A_t^{-1} w) + A_t'(A_t^{-1} w) G(A_t^{-1} w, t).
    const EvolutionFamily& induced_family() const { return induced_; }

    double lambda(double t) const;
    double base_lambda(double t) const;
    double t0() const;
    double v0() const;
    const std::string& target_id() const;
    BoundaryPoint sigma() const { return BoundaryPoint(0.0); }

    struct Shared;

private:
    std::shared_ptr<const Shared> d_;
    EvolutionFamily induced_;
};

/// m_t o phi_{s,t} o m_s^{-1} with spectral function Lambda at 1; Lambda(0) must vanish.
EmbeddingResult prescribe_spectral(const EvolutionFamily& fam, const SpectralPrescription& lambda);

/// Embeds phi_{0,t0} o l_{v0} of a gallery family into an evolution family with spectral function
/// Lambda; Lambda(t0) must equal -log phi'(1) within 1e-6.
EmbeddingResult embed_map(const EvolutionFamily& fam, double t0, const SpectralPrescription& lambda, double v0 = 0.0);

struct EmbeddingCheck {
    double target_deviation = 0.0;      ///< max |psi_{0,t0}(z) - phi(z)| over the grid (induced family)
    double composition_deviation = 0.0; ///< max |induced - composed psi_{0,t0}|
    double fixed_point_deviation = 0.0; ///< max |psi_{s,t}(1) - 1|
    double derivative_deviation = 0.0;  ///< max |psi_{s,t}'(1) - e^{Lambda(s) - Lambda(t)}|
    double ef2_residual = 0.0;
};

EmbeddingCheck check_embedding(const EmbeddingResult& emb, std::span<const Complex> grid,
                               std::span<const std::pair<double, double>> pairs);

}  // namespace loewner
