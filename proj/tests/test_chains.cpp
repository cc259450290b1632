#include <doctest.h>

#include <cmath>

#include "loewner/chains.hpp"
#include "loewner/errors.hpp"
#include "oracles.hpp"

using namespace loewner;
using doctest::Approx;

namespace {

const BoundaryPoint one(0.0);

}  // namespace

TEST_CASE("chain snapshot values") {
    const auto chain = chain_from_family(EvolutionFamily(hyperbolic_field(1.0)), 1.0);
    for (const auto& z : oracle::scatter(20, 0.95)) {
        CHECK(std::abs(chain(1.0, z) - z) == 0.0);
        CHECK(std::abs(chain(0.25, z) - oracle::hyperbolic_flow(1.0, 0.75, z)) < 1e-9);
    }
    CHECK(std::abs(chain.inverse(0.5, chain(0.5, Complex(0.2, 0.1))) - Complex(0.2, 0.1)) < 1e-9);
    CHECK(chain.horizon() == 1.0);
}

TEST_CASE("association residual and range monotonicity") {
    const auto grid = disc_grid(50, 0.95);
    const auto g64 = chain_from_family(EvolutionFamily(example64_field(1.0).field()), 0.3);
    for (auto [s, t] : {std::pair{0.0, 0.1}, std::pair{0.05, 0.2}, std::pair{0.1, 0.3}})
        CHECK(association_residual(g64, s, t, grid) < 1e-8);
    const auto rot = chain_from_family(EvolutionFamily(rotation_field()), 1.0);
    CHECK(association_residual(rot, 0.2, 0.7, grid) < 1e-8);
    const auto hyp = chain_from_family(EvolutionFamily(hyperbolic_field(1.0)), 1.0);
    CHECK(association_residual(hyp, 0.0, 0.5, grid) < 1e-8);

    const auto r = range_monotonicity_check(g64, 0.05, 0.2, grid);
    CHECK(r.all_inside);
    CHECK(r.max_residual < 1e-10);
}

TEST_CASE("loewner pde residual") {
    const auto constant = chain_from_family(EvolutionFamily(hyperbolic_field(1.0)), 1.0);
    CHECK(std::abs(pde_residual(constant, Complex(0.0), 0.5)) < 1e-6);
    const auto rot = chain_from_family(EvolutionFamily(rotation_field()), 1.0);
    CHECK(std::abs(pde_residual(rot, Complex(0.4, 0.3), 0.5)) < 1e-8);
    const auto g64 = chain_from_family(EvolutionFamily(example64_field(1.0).field()), 0.3);
    CHECK(std::abs(pde_residual(g64, Complex(0.3, 0.1), 0.15)) < 1e-5);
    for (const auto& z : oracle::scatter(10, 0.9, 99)) CHECK(std::abs(pde_residual(g64, z, 0.12)) < 1e-5);
}

TEST_CASE("boundary conformality, fixed value and argument of the derivative") {
    std::vector<double> times{0.0, 0.2, 0.4, 0.6, 0.8};
    const auto hyp = chain_from_family(EvolutionFamily(hyperbolic_field(1.0)), 1.0);
    const auto h = condition_C_check(hyp, one, 0.0, times);
    CHECK(h.c1);
    CHECK(h.c2);
    CHECK(h.c3);
    CHECK(h.arg_spread < 1e-6);
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(h.derivative[i].real() == Approx(std::exp(-(1.0 - times[i]))).epsilon(1e-7));

    const auto rot = chain_from_family(EvolutionFamily(rotation_field()), 1.0);
    const auto r = condition_C_check(rot, one, 0.0, times);
    CHECK_FALSE(r.c2);
    for (std::size_t i = 0; i < times.size(); ++i)
        CHECK(std::abs(r.boundary_value[i] - std::polar(1.0, 1.0 - times[i])) < 1e-6);

    const std::vector<double> early{0.0, 0.1, 0.2};
    const auto g64 = chain_from_family(EvolutionFamily(example64_field(1.0).field()), 0.3);
    const auto g = condition_C_check(g64, one, 0.0, early);
    CHECK_FALSE(g.c1);
    CHECK_THROWS_AS(condition_C_check(hyp, one, 0.3, times), PreconditionError);
}

TEST_CASE("residues at boundary poles") {
    const auto a = residue_at_pole([](Complex z) { return 1.0 / (1.0 - z); }, one);
    CHECK(a.simple_pole);
    CHECK(std::abs(a.residue + 1.0) < 1e-10);
    const auto b = residue_at_pole([](Complex z) { return (1.0 + z) / (1.0 - z); }, one);
    CHECK(b.simple_pole);
    CHECK(std::abs(b.residue + 2.0) < 1e-8);
    const auto c = residue_at_pole([](Complex z) { return z; }, one);
    CHECK_FALSE(c.simple_pole);
}

TEST_CASE("pole transform") {
    CHECK(PoleTransform::reparametrize(0.0, 2.0) == 0.0);
    CHECK(PoleTransform::reparametrize(1.0, 2.0) == Approx(1.0));
    CHECK(PoleTransform::reparametrize(1e9, 2.0) == Approx(2.0).epsilon(1e-8));

    // Chain with a residue -2 pole at 1 at time T.
    const ChainMap pole = [](double, Complex z) { return (1.0 + z) / (1.0 - z); };
    const auto grid = disc_grid(50, 0.95);
    const std::vector<double> ts{0.5, 1.0};
    const PoleTransform g(pole, 1.0, Complex(-2.0), grid, ts);
    const auto rt = pole_round_trip(g, pole, one, 1.0);
    CHECK(std::abs(rt.g_value.value) < 1e-8);
    CHECK(std::abs(rt.g_derivative.value + 0.5) < 1e-6);
    CHECK(std::abs(rt.product - 1.0) < 1e-6);

    CHECK_THROWS_AS(PoleTransform(pole, 1.0, pole(0.0, grid[7]) + 0.05, grid, ts), PreconditionError);

    // Hyperbolic chain composed with the half-plane map: residue -2 e^{T - s}.
    const auto hyp = chain_from_family(EvolutionFamily(hyperbolic_field(1.0)), 1.0);
    const ChainMap composed = [hyp](double s, Complex z) { return oracle::half_plane(hyp(s, z)); };
    const PoleTransform gh(composed, 1.0, Complex(-2.0), grid, ts);
    for (double t : {0.5, 1.0, 2.0}) {
        const auto r = pole_round_trip(gh, composed, one, t);
        const double s = PoleTransform::reparametrize(t, 1.0);
        CHECK(std::abs(r.residue.residue + 2.0 * std::exp(1.0 - s)) < 1e-6);
        CHECK(std::abs(r.product - 1.0) < 1e-6);
    }
}

TEST_CASE("radial loewner equation") {
    const auto unit = CaratheodoryFunction::constant(1.0);
    const Complex z(0.4, -0.3);
    CHECK(std::abs(radial_loewner(unit, 0.2, 1.0, z).value - std::exp(-0.8) * z) < 1e-10);
    const CaratheodoryFunction pole([](Complex w, double) { return (1.0 + w) / (1.0 - w); });
    const auto origin = radial_loewner(pole, 0.0, 1.0, Complex(0.0));
    CHECK(std::abs(origin.value) == 0.0);
    CHECK(std::abs(origin.derivative - std::exp(-1.0)) < 1e-8);
    const auto off = radial_loewner(pole, 0.3, 0.9, Complex(0.0));
    CHECK(std::abs(off.derivative - std::exp(0.3 - 0.9)) < 1e-8);

    const auto wrong = CaratheodoryFunction::constant(2.0);
    const std::vector<double> ts{0.0, 0.5};
    CHECK_THROWS_AS(radial_loewner_field(wrong, ts), PreconditionError);
    CHECK_NOTHROW(radial_loewner_field(pole, ts));
}
