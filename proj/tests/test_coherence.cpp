#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mzbell/catalog.hpp"
#include "mzbell/coherence.hpp"
#include "mzbell/errors.hpp"
#include "oracle.hpp"

using namespace mzbell;

namespace {

const Complex I{0.0, 1.0};

void check_moments(const CoherenceMoments& got, const oracle::Moments& want, double tol) {
    CHECK(std::abs(got.m12 - want.m12) < tol);
    CHECK(std::abs(got.anom - want.anom) < tol);
    CHECK(std::abs(got.n1 - want.n1) < tol);
    CHECK(std::abs(got.n2 - want.n2) < tol);
    CHECK(std::abs(got.n1n2 - want.n1n2) < tol);
}

// w (split photon) + (1 - w) (incoherent 50/50): balanced with |g1| = w.
QuantumState dephased_split_photon(double w) {
    const std::vector<WeightedState> mix{{w, split_single_photon()}, {1.0 - w, incoherent_anticorrelated(0.5)}};
    return make_mixed(mix);
}

}  // namespace

TEST_CASE("moments of the named states") {
    auto split = compute_moments(split_single_photon());
    check_moments(split, oracle::moments(split_single_photon().to_density(), {1, 1}), 1e-15);
    CHECK(std::abs(split.m12 - I / 2.0) < 1e-15);
    CHECK(std::abs(split.anom) < 1e-15);
    CHECK(split.n1 == doctest::Approx(0.5));
    CHECK(split.n2 == doctest::Approx(0.5));
    CHECK(std::abs(split.n1n2) < 1e-15);

    auto vac = compute_moments(vacuum(ModeSystem({2, 2})));
    CHECK(std::abs(vac.m12) == 0.0);
    CHECK(vac.n1 == 0.0);
    CHECK(vac.n1n2 == 0.0);

    auto ones = compute_moments(tensor(number_state(1, 1), number_state(1, 1)));
    CHECK(std::abs(ones.m12) < 1e-15);
    CHECK(ones.n1 == doctest::Approx(1.0));
    CHECK(ones.n2 == doctest::Approx(1.0));
    CHECK(ones.n1n2 == doctest::Approx(1.0));

    CHECK_THROWS_AS(compute_moments(number_state(1, 1)), InvalidInput);
    CHECK_THROWS_AS(compute_moments(split_single_photon(), 1, 1), InvalidInput);
}

TEST_CASE("moments match dense operators on random states") {
    std::mt19937_64 rng(17);
    const std::vector<int> cutoffs{3, 2, 1};
    ModeSystem sys(cutoffs);
    const auto dim = static_cast<Eigen::Index>(sys.dimension());
    for (int trial = 0; trial < 5; ++trial) {
        auto pure = make_pure(sys, oracle::random_vector(rng, dim));
        check_moments(compute_moments(pure, 0, 2), oracle::moments(pure.to_density(), cutoffs, 0, 2), 1e-12);
        auto mixed = make_density(sys, oracle::random_density(rng, dim, 4));
        check_moments(compute_moments(mixed, 2, 1), oracle::moments(mixed.density(), cutoffs, 2, 1), 1e-12);
    }
}

TEST_CASE("g1, g2 and the Titulaer-Glauber margin") {
    auto split = compute_moments(split_single_photon());
    CHECK(std::abs(std::abs(g1(split)) - 1.0) < 1e-12);
    CHECK(std::abs(g2(split)) < 1e-12);
    CHECK(titulaer_glauber_margin(split) == doctest::Approx(-1.0));

    auto incoherent = compute_moments(incoherent_anticorrelated(0.5));
    CHECK(std::abs(g1(incoherent)) == 0.0);
    CHECK(g2(incoherent) == 0.0);

    for (Complex alpha : {Complex{0.3, 0.0}, Complex{0.8, -0.4}, Complex{1.5, 0.2}}) {
        auto coh = split_coherent(alpha);
        const auto m = compute_moments(coh);
        check_moments(m, oracle::moments(coh.to_density(), coh.system().cutoffs()), 1e-12);
        CHECK(std::abs(std::abs(g1(m)) - 1.0) < 1e-10);
        CHECK(std::abs(g2(m) - 1.0) < 1e-10);
        CHECK(std::abs(titulaer_glauber_margin(m)) < 1e-10);
    }

    auto thermal = compute_moments(split_thermal(1.0));
    CHECK(std::abs(std::abs(g1(thermal)) - 1.0) < 1e-10);
    CHECK(std::abs(g2(thermal) - 2.0) < 1e-8);
    CHECK(std::abs(titulaer_glauber_margin(thermal) - 1.0) < 1e-8);

    CHECK_THROWS_AS(g1(compute_moments(vacuum(ModeSystem({1, 1})))), DegenerateState);
    CHECK_THROWS_AS(g2(compute_moments(incoherent_anticorrelated(1.0))), DegenerateState);
}

TEST_CASE("Cauchy-Schwarz bound and phase invariance of g2") {
    std::mt19937_64 rng(99);
    ModeSystem sys({3, 3});
    for (int trial = 0; trial < 50; ++trial) {
        auto rho = make_density(sys, oracle::random_density(rng, 16, 1 + trial % 4));
        const auto m = compute_moments(rho);
        CHECK(std::abs(g1(m)) <= 1.0 + 1e-10);
        CHECK(g2(m) >= -1e-10);
        auto shifted = apply_phase(apply_phase(rho, 0, 0.3 * trial), 1, -1.1);
        CHECK(std::abs(g2(compute_moments(shifted)) - g2(m)) < 1e-12);
        CHECK(std::abs(std::abs(g1(compute_moments(shifted))) - std::abs(g1(m))) < 1e-12);
    }
}

TEST_CASE("fringe scan examples") {
    const std::vector<double> three{0.0, std::numbers::pi / 2, std::numbers::pi};
    for (const auto& r : fringe_scan(split_single_photon(), three))
        CHECK(std::abs(r.intensity_c + r.intensity_d - 1.0) < 1e-12);

    const auto grid = phase_grid(64);
    const auto flat = fringe_scan(incoherent_anticorrelated(0.5), grid);
    for (const auto& r : flat) {
        CHECK(std::abs(r.intensity_c - flat.front().intensity_c) < 1e-12);
        CHECK(std::abs(r.intensity_d - flat.front().intensity_d) < 1e-12);
    }

    const auto split = fringe_scan(split_single_photon(), grid);
    double min_c = 1.0;
    for (const auto& r : split) min_c = std::min(min_c, r.intensity_c);
    CHECK(std::abs(min_c) < 1e-10);
    for (const auto& r : split) CHECK(std::abs(r.coincidence) < 1e-12);
}

TEST_CASE("fringe scan matches the dense interferometer") {
    std::mt19937_64 rng(4);
    const std::vector<int> small{2, 1};
    auto rho = make_density(ModeSystem(small), oracle::random_density(rng, 6, 2));
    // recombination needs room for every photon in either output
    const std::vector<int> big{3, 3};
    const oracle::Matrix padded = embed(rho, big).density();
    const oracle::Matrix u = oracle::beamsplitter(big, 0, 1);
    const oracle::Matrix c = oracle::lower(big, 0);
    const oracle::Matrix d = oracle::lower(big, 1);

    const auto grid = phase_grid(16);
    const auto records = fringe_scan(rho, grid);
    double total = records.front().intensity_c + records.front().intensity_d;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const oracle::Matrix p = oracle::phase(big, 0, grid[k]);
        const oracle::Matrix out = u * p * padded * p.adjoint() * u.adjoint();
        CHECK(std::abs(records[k].intensity_c - oracle::expect(out, c.adjoint() * c).real()) < 1e-12);
        CHECK(std::abs(records[k].intensity_d - oracle::expect(out, d.adjoint() * d).real()) < 1e-12);
        CHECK(std::abs(records[k].coincidence - oracle::expect(out, c.adjoint() * d.adjoint() * d * c).real()) <
              1e-12);
        CHECK(records[k].intensity_c >= -1e-12);
        CHECK(std::abs(records[k].intensity_c + records[k].intensity_d - total) < 1e-10);
    }
}

TEST_CASE("visibility fit") {
    const auto grid = phase_grid(64);
    CHECK(std::abs(visibility(fringe_scan(split_single_photon(), grid)).visibility - 1.0) < 1e-9);
    CHECK(std::abs(visibility(fringe_scan(incoherent_anticorrelated(0.5), grid)).visibility) < 1e-12);

    auto measured_like = dephased_split_photon(0.98);
    const auto m = compute_moments(measured_like);
    CHECK(std::abs(std::abs(g1(m)) - 0.98) < 1e-12);
    CHECK(std::abs(visibility(fringe_scan(measured_like, grid)).visibility - 0.98) < 1e-6);
    CHECK(std::abs(visibility_analytic(m) - 0.98) < 1e-12);

    // unbalanced channels: the fit follows 2|m12| / (n1 + n2), not |g1|
    auto tilted = make_pure(ModeSystem({1, 1}), Vector{{0.0, std::sqrt(0.2) * I, std::sqrt(0.8), 0.0}});
    const auto mt = compute_moments(tilted);
    CHECK(std::abs(visibility(fringe_scan(tilted, grid)).visibility - visibility_analytic(mt)) < 1e-10);
    CHECK(visibility_analytic(mt) == doctest::Approx(0.8));

    const std::vector<FringeRecord> two(2);
    CHECK_THROWS_AS(visibility(two), InvalidInput);
    const std::vector<double> half{0.0, 0.5, 1.0, 1.5};
    CHECK_THROWS_AS(visibility(fringe_scan(split_single_photon(), half)), InvalidInput);
    CHECK_THROWS_AS(visibility(fringe_scan(vacuum(ModeSystem({1, 1})), grid)), InvalidInput);
    CHECK_THROWS_AS(phase_grid(0), InvalidInput);
}

TEST_CASE("classical catalog respects the Titulaer-Glauber bound") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        const Complex a1 = std::polar(0.1 + unit(rng), 2 * std::numbers::pi * unit(rng));
        const Complex a2 = std::polar(0.1 + unit(rng), 2 * std::numbers::pi * unit(rng));
        const std::vector<WeightedState> mix{{0.3, split_coherent(a1)}, {0.7, split_coherent(a2)}};
        CHECK(titulaer_glauber_margin(compute_moments(mix_states(mix))) >= -1e-10);
        CHECK(titulaer_glauber_margin(compute_moments(split_thermal(0.05 + 0.5 * unit(rng)))) >= -1e-10);
    }
}
