#include <doctest.h>

#include <cmath>

#include "loewner/errors.hpp"
#include "loewner/semigroup.hpp"
#include "oracles.hpp"

using namespace loewner;
using doctest::Approx;

namespace {

const BoundaryPoint one(0.0);

HerglotzField contraction() {
    return berkson_porta_field([](double) { return Complex(0.0); }, CaratheodoryFunction::constant(1.0), "contraction")
        .frozen(0.0);
}

SpectralPrescription spectral(std::function<double(double)> f, std::function<double(double)> df = {}) {
    SpectralPrescription p{TimeFunction(std::move(f)), {}};
    if (df) p.lambda_prime = TimeFunction(std::move(df));
    return p;
}

}  // namespace

TEST_CASE("semigroup flows and the semigroup law") {
    const Complex z(0.3, 0.4);
    CHECK(std::abs(semigroup_flow(contraction(), 1.5, z) - std::exp(-1.5) * z) < 1e-10);
    CHECK(semigroup_flow(hyperbolic_field(1.0), 1.0, Complex(0.0)).real() == Approx(std::tanh(0.5)).epsilon(1e-10));
    const auto grid = disc_grid(50, 0.95);
    for (const auto& gen : {hyperbolic_field(1.0), rotation_field(), rotated_hyperbolic_field(2.0, 1.0)}) {
        const Semigroup sg(gen);
        CHECK(sg.law_residual(0.3, 0.7, grid) < 1e-8);
        CHECK(sg.law_residual(1.0, 0.5, grid) < 1e-8);
    }
    CHECK_THROWS_AS(Semigroup(example64_field(1.0).field()), PreconditionError);
}

TEST_CASE("denjoy-wolff points") {
    const auto half = dw_point([](Complex z) { return 0.5 * z; });
    CHECK(half.kind == DwCase::interior_attracting);
    CHECK(std::abs(half.tau) < 1e-10);
    CHECK(half.derivative_modulus == Approx(0.5));

    const auto rot = dw_point([](Complex z) { return Complex(0.0, 1.0) * z; });
    CHECK(rot.kind == DwCase::interior_automorphism);
    CHECK(std::abs(rot.tau) < 1e-10);

    const Semigroup hyp(hyperbolic_field(1.0));
    const auto h = dw_point(hyp.at(1.0));
    CHECK(h.kind == DwCase::boundary);
    CHECK(std::abs(h.tau - 1.0) < 1e-6);
    CHECK(h.dilatation <= 1.0 + 1e-6);
    CHECK(h.dilatation == Approx(std::exp(-1.0)).epsilon(1e-6));
    CHECK(to_string(DwCase::boundary) == "boundary");
}

TEST_CASE("product formula") {
    const std::vector<int> ns{1, 2, 4, 8, 16, 32};
    const auto aut = product_formula_check(hyperbolic_field(1.0), 0.1, 0.5, ns, Complex(0.5));
    for (const auto& row : aut.rows) CHECK(row.error < 1e-9);

    const auto g = product_formula_check(example64_field(1.0).field(), 0.1, 0.1, ns, Complex(0.5));
    REQUIRE(g.rows.size() == ns.size());
    CHECK(g.non_increasing);
    // n = 1 is a single step of the family, the worst case of the sequence.
    const EvolutionFamily fam(example64_field(1.0).field());
    CHECK(g.rows[0].error == Approx(std::abs(fam.evolve(0.1, 0.2, Complex(0.5)) - g.reference)).epsilon(1e-9));
    for (const auto& row : g.rows) CHECK(row.error <= g.rows[0].error);
    const double frozen = semigroup_flow(example64_field(1.0).field().frozen(0.1), 0.1, Complex(0.5)).real();
    CHECK(std::abs(g.reference - frozen) < 1e-10);
    CHECK_THROWS_AS(product_formula_check(hyperbolic_field(1.0), 0.0, 0.5, std::vector<int>{0}, Complex(0.5)),
                    PreconditionError);
}

TEST_CASE("semigroup fixed point derivatives") {
    const std::vector<double> times{0.25, 0.5, 1.0};
    const auto a = semigroup_brfp_check(hyperbolic_field(1.0), one, -1.0, times);
    CHECK(a.ok);
    for (std::size_t i = 0; i < times.size(); ++i) CHECK(a.derivative[i] == Approx(std::exp(-times[i])).epsilon(1e-5));
    const auto b = semigroup_brfp_check(hyperbolic_field(1.0), BoundaryPoint(M_PI), 1.0, times);
    CHECK(b.ok);
    for (std::size_t i = 0; i < times.size(); ++i) CHECK(b.derivative[i] == Approx(std::exp(times[i])).epsilon(1e-5));
    const auto c = semigroup_brfp_check(pinned_field(one, TimeFunction::constant(0.0)).frozen(0.0), one, 0.0, times);
    CHECK(c.ok);
    CHECK(c.max_error < 1e-8);
    CHECK_FALSE(semigroup_brfp_check(hyperbolic_field(1.0), one, -2.0, times).ok);
}

TEST_CASE("parabolic translation family") {
    const ParabolicFamily flat(0.0, 1.0);
    const ParabolicFamily p(0.7, 1.0);
    for (const auto& z : oracle::scatter(10, 0.9)) {
        CHECK(std::abs(flat.at(0.6)(z) - z) < 1e-15);
        CHECK(std::abs(p.at(0.0)(z) - z) < 1e-15);
        const Complex moved = oracle::from_half_plane(oracle::half_plane(z) + Complex(0.0, 0.7 * 0.6));
        CHECK(std::abs(p.at(0.6)(z) - moved) < 1e-13);
    }
    const auto l = p.at(0.5);
    CHECK(std::abs(l(Complex(1.0 - 1e-12)) - 1.0) < 1e-6);
    CHECK(std::abs(boundary_derivative_of_automorphism(l, one) - 1.0) < 1e-8);
    const Complex z(0.2, 0.3);
    const double h = 1e-6;
    const Complex fd = (p.at(0.5 + h)(z) - p.at(0.5 - h)(z)) / (2 * h);
    CHECK(std::abs(p.time_derivative(0.5, z) - fd) < 1e-8);
    CHECK_THROWS_AS(ParabolicFamily(1.0, 0.0), PreconditionError);
}

TEST_CASE("prescribed spectral functions") {
    const auto grid = disc_grid(30, 0.9);
    const EvolutionFamily hyp(hyperbolic_field(1.0));
    // Prescribing the family's own spectral function is the identity conjugation.
    const auto same = prescribe_spectral(hyp, spectral([](double t) { return t; }, [](double) { return 1.0; }));
    for (const auto& z : grid) CHECK(std::abs(same.psi(0.2, 0.9, z) - hyp.evolve(0.2, 0.9, z)) < 1e-12);

    const EvolutionFamily zero(pinned_field(one, TimeFunction::constant(0.0)));
    const double ln2 = std::log(2.0);
    const auto third = prescribe_spectral(zero, spectral([ln2](double t) { return ln2 * t; }));
    CHECK(third.conjugator(1.0)(Complex(0.0)).real() == Approx(1.0 / 3.0).epsilon(1e-8));
    CHECK(std::abs(third.conjugator(0.0)(Complex(0.3)) - 0.3) < 1e-12);

    const auto twice = prescribe_spectral(hyp, spectral([](double t) { return 2.0 * t; }, [](double) { return 2.0; }));
    const std::vector<std::pair<double, double>> pairs{{0.0, 0.5}, {0.2, 0.9}};
    const auto chk = check_embedding(twice, grid, pairs);
    CHECK(chk.fixed_point_deviation < 1e-5);
    CHECK(chk.derivative_deviation < 1e-5);
    CHECK(twice.lambda(0.5) == Approx(1.0));

    CHECK_THROWS_AS(prescribe_spectral(hyp, spectral([](double t) { return t + 1.0; })), PreconditionError);
}

TEST_CASE("embedding a gallery map") {
    const auto grid = disc_grid(30, 0.9);
    const std::vector<std::pair<double, double>> pairs{{0.0, 1.0}, {0.25, 0.75}};
    const EvolutionFamily hyp(hyperbolic_field(1.0));
    const auto own = embed_map(hyp, 1.0, spectral([](double t) { return t; }, [](double) { return 1.0; }));
    for (const auto& z : grid) CHECK(std::abs(own.psi(0.0, 1.0, z) - hyp.evolve(0.0, 1.0, z)) < 1e-10);

    const auto sq = embed_map(hyp, 1.0, spectral([](double t) { return t * t; }, [](double t) { return 2.0 * t; }), 0.4);
    const auto chk = check_embedding(sq, grid, pairs);
    CHECK(chk.target_deviation < 1e-7);
    CHECK(chk.fixed_point_deviation < 1e-5);
    CHECK(chk.derivative_deviation < 1e-5);
    CHECK(chk.ef2_residual < 1e-7);
    for (const auto& z : grid) {
        const Complex expected = hyp.evolve(0.0, 1.0, ParabolicFamily(0.4, 1.0).at(1.0)(z));
        CHECK(std::abs(sq.target(z) - expected) < 1e-12);
    }

    CHECK_THROWS_AS(embed_map(hyp, 1.0, spectral([](double t) { return 2.0 * t; })), PreconditionError);
}
