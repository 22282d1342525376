#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "ctqt/sim.hpp"

using namespace ctqt;

namespace {

const double kRoot2 = std::sqrt(2.0);

std::array<Complex, 4> h_gate() {
    return {Complex(1 / kRoot2, 0), Complex(1 / kRoot2, 0), Complex(1 / kRoot2, 0),
            Complex(-1 / kRoot2, 0)};
}

std::array<Complex, 16> cnot_gate() {
    std::array<Complex, 16> g{};
    g[0] = g[5] = g[11] = g[14] = 1.0;
    return g;
}

bool close(Complex a, Complex b, double tol = 1e-12) { return std::abs(a - b) < tol; }

}  // namespace

TEST_CASE("register invariants") {
    Register reg({2, 3, 2}, {"a", "b", "c"});
    CHECK(reg.total_dim() == 12);
    CHECK(reg.stride(0) == 6);  // big-endian: site 0 most significant
    CHECK(reg.stride(2) == 1);
    CHECK(reg.site_of("b") == 1);
    CHECK_THROWS_AS(Register({2, 2}, {"x", "x"}), BadDimension);
    CHECK_THROWS_AS(Register({1}, {"x"}), BadDimension);
    CHECK_THROWS_AS(Register(std::vector<int>(23, 2),
                             [] {
                                 std::vector<std::string> l;
                                 for (int i = 0; i < 23; ++i) l.push_back("q" + std::to_string(i));
                                 return l;
                             }()),
                    CapExceeded);
}

TEST_CASE("init_product_state") {
    Register two({2, 2}, {"a", "b"});
    StateVector zeros = init_product_state(
        two, {{{0}, {1.0, 0.0}}, {{1}, {1.0, 0.0}}});
    CHECK(close(zeros.amps()[0], 1.0));
    for (int i = 1; i < 4; ++i) CHECK(close(zeros.amps()[static_cast<std::size_t>(i)], 0.0));

    Register qutrit({3}, {"d"});
    StateVector third = init_product_state(qutrit, {{{0}, {0.0, 0.0, 1.0}}});
    CHECK(close(third.amps()[2], 1.0));

    Register one({2}, {"q"});
    BasisSpec h = BasisSpec::hadamard();
    StateVector tilde = init_product_state(one, {{{0}, {h.entry(0, 0), h.entry(1, 0)}}});
    CHECK(close(tilde.amps()[0], 1 / kRoot2));
    CHECK(close(tilde.amps()[1], 1 / kRoot2));

    CHECK_THROWS_AS(init_product_state(two, {{{0}, {1.0, 0.0}}}), BadDimension);
}

TEST_CASE("hadamard then cnot makes an EPR pair") {
    Register reg({2, 2}, {"a", "b"});
    StateVector st(reg);
    apply_single(st, 0, h_gate());
    apply_two(st, 0, 1, cnot_gate());
    CHECK(close(st.amps()[0], 1 / kRoot2));
    CHECK(close(st.amps()[3], 1 / kRoot2));
    CHECK(close(st.amps()[1], 0.0));
    CHECK(close(st.amps()[2], 0.0));
}

TEST_CASE("identity gate leaves the state unchanged") {
    Register reg({2, 2}, {"a", "b"});
    StateVector st(reg);
    apply_single(st, 0, h_gate());
    std::vector<Complex> before(st.amps().begin(), st.amps().end());
    std::array<Complex, 4> id{Complex(1, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0)};
    apply_single(st, 1, id);
    for (std::size_t i = 0; i < before.size(); ++i) CHECK(close(st.amps()[i], before[i]));
}

TEST_CASE("two-site diagonal phase acts only on the marked indices") {
    // diag[1, w, w, 1] with c=1, p=2 so w = -1; |11> keeps amplitude 1
    Register reg({2, 2}, {"a", "b"});
    StateVector st(reg);
    std::array<Complex, 4> x{Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0)};
    apply_single(st, 0, x);
    apply_single(st, 1, x);
    std::array<Complex, 4> d{Complex(1, 0), Complex(-1, 0), Complex(-1, 0), Complex(1, 0)};
    apply_two_diag(st, 0, 1, d);
    CHECK(close(st.amps()[3], 1.0));

    StateVector mid(reg);
    apply_single(mid, 1, x);  // |01>
    apply_two_diag(mid, 0, 1, d);
    CHECK(close(mid.amps()[1], -1.0));
}

TEST_CASE("gate errors") {
    Register reg({2, 2}, {"a", "b"});
    StateVector st(reg);
    std::array<Complex, 4> bad{Complex(1, 0), Complex(1, 0), Complex(0, 0), Complex(1, 0)};
    CHECK_THROWS_AS(apply_single(st, 0, bad), NonUnitary);
    CHECK_THROWS_AS(apply_two(st, 1, 1, cnot_gate()), SiteCollision);
    std::array<Complex, 4> big{Complex(2, 0), Complex(0, 0), Complex(0, 0), Complex(1, 0)};
    CHECK_THROWS_AS(apply_two_diag(st, 0, 1, big), NonUnitary);
}

TEST_CASE("norm preservation under random circuits") {
    RngStream rng(5);
    Register reg({2, 2, 2, 2}, {"a", "b", "c", "d"});
    StateVector st(reg);
    for (int step = 0; step < 100; ++step) {
        int site = static_cast<int>(rng.uniform_int(4));
        apply_single(st, site, BasisSpec::haar(rng).u);
        CHECK(std::abs(st.norm2() - 1.0) < 1e-12);
    }
}

TEST_CASE("gate locality: disjoint gates commute") {
    RngStream rng(6);
    Register reg({2, 2, 2}, {"a", "b", "c"});
    BasisSpec u1 = BasisSpec::haar(rng), u2 = BasisSpec::haar(rng);
    StateVector st(reg);
    apply_single(st, 0, BasisSpec::haar(rng).u);

    StateVector ab = st, ba = st;
    apply_single(ab, 0, u1.u);
    apply_single(ab, 2, u2.u);
    apply_single(ba, 2, u2.u);
    apply_single(ba, 0, u1.u);
    for (std::size_t i = 0; i < ab.amps().size(); ++i)
        CHECK(close(ab.amps()[i], ba.amps()[i]));
}

TEST_CASE("bell identity reconstructs the computational basis") {
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            std::array<Complex, 4> acc{};
            for (int i = 0; i < 2; ++i) {
                auto b = bell_vector(i, x ^ y);
                double sign = (x == 1 && i == 1) ? -1.0 : 1.0;
                for (int t = 0; t < 4; ++t)
                    acc[static_cast<std::size_t>(t)] += sign / kRoot2 * b[static_cast<std::size_t>(t)];
            }
            for (int t = 0; t < 4; ++t)
                CHECK(close(acc[static_cast<std::size_t>(t)], t == 2 * x + y ? 1.0 : 0.0));
        }
}

TEST_CASE("bell_project on known states") {
    RngStream rng(7);
    Register reg({2, 2}, {"a", "b"});

    StateVector epr(reg);
    apply_single(epr, 0, h_gate());
    apply_two(epr, 0, 1, cnot_gate());
    auto [outcome, rec] = bell_project(epr, 0, 1, rng);
    CHECK(outcome.i == 0);
    CHECK(outcome.j == 0);
    CHECK(rec.distribution[0] == doctest::Approx(1.0).epsilon(1e-12));

    StateVector zz(reg);  // |00> = (|B00> + |B10>)/sqrt 2
    auto [o2, rec2] = bell_project(zz, 0, 1, rng);
    CHECK(rec2.distribution[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rec2.distribution[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(rec2.distribution[1] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(o2.j == 0);

    Register mixed({2, 3}, {"a", "d"});
    StateVector bad(mixed);
    CHECK_THROWS_AS(bell_project(bad, 0, 1, rng), NotQubit);
}

TEST_CASE("teleportation identity: all four Bell outcomes equally likely") {
    RngStream rng(8);
    Register reg({2, 2, 2}, {"in", "a", "b"});
    BasisSpec psi = BasisSpec::haar(rng);
    StateVector st = init_product_state(
        reg, {{{0}, {psi.entry(0, 0), psi.entry(1, 0)}}, {{1}, {1.0, 0.0}}, {{2}, {1.0, 0.0}}});
    apply_single(st, 1, h_gate());
    apply_two(st, 1, 2, cnot_gate());
    auto [o, rec] = bell_project(st, 0, 1, rng);
    for (double q : rec.distribution) CHECK(q == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("measure_site in private bases") {
    RngStream rng(9);
    Register reg({2}, {"q"});

    StateVector plus(reg);
    apply_single(plus, 0, h_gate());
    MeasurementRecord rec = measure_site(plus, 0, BasisSpec::computational().plus_minus(), rng);
    CHECK(rec.outcome == 0);
    CHECK(rec.distribution[0] == doctest::Approx(1.0).epsilon(1e-12));

    BasisSpec tilde = BasisSpec::haar(rng);
    StateVector zero_t =
        init_product_state(reg, {{{0}, {tilde.entry(0, 0), tilde.entry(1, 0)}}});
    MeasurementRecord rec2 = measure_site(zero_t, 0, tilde, rng);
    CHECK(rec2.outcome == 0);
    CHECK(rec2.distribution[0] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("single kappa factor: P(minus-tilde) = sin^2(pi c / p)") {
    RngStream rng(10);
    for (std::int64_t p : {2, 3, 5}) {
        for (std::int64_t c = 0; c < p; ++c) {
            for (int y = 0; y < 2; ++y) {
                BasisSpec tilde = BasisSpec::haar(rng);
                double phi = 2.0 * M_PI * static_cast<double>(c) / static_cast<double>(p);
                Complex a0 = std::polar(1.0 / kRoot2, phi * y);
                Complex a1 = std::polar(1.0 / kRoot2, phi * (1 - y));
                Register reg({2}, {"c"});
                StateVector st = init_product_state(
                    reg, {{{0},
                           {a0 * tilde.entry(0, 0) + a1 * tilde.entry(0, 1),
                            a0 * tilde.entry(1, 0) + a1 * tilde.entry(1, 1)}}});
                auto dist = outcome_distribution(st, 0, tilde.plus_minus());
                double want = std::sin(M_PI * static_cast<double>(c) / static_cast<double>(p));
                want *= want;
                CHECK(dist[1] == doctest::Approx(want).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("outcome_distribution") {
    Register reg({2}, {"q"});
    StateVector zero(reg);
    auto dist = outcome_distribution(zero, 0);
    CHECK(dist[0] == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(dist[1] == doctest::Approx(0.0).epsilon(1e-12));

    Register three({2, 2, 2}, {"a", "b", "c"});
    StateVector ghz(three);
    apply_single(ghz, 0, h_gate());
    apply_two(ghz, 0, 1, cnot_gate());
    apply_two(ghz, 1, 2, cnot_gate());
    auto xdist = outcome_distribution(ghz, 1, BasisSpec::computational().plus_minus());
    CHECK(xdist[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(xdist[1] == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("fidelity") {
    RngStream rng(11);
    Register reg({2}, {"q"});
    StateVector zero(reg);
    StateVector one(reg);
    std::array<Complex, 4> x{Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0)};
    apply_single(one, 0, x);
    StateVector plus(reg);
    apply_single(plus, 0, h_gate());

    CHECK(fidelity(zero, zero) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fidelity(zero, one) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fidelity(zero, plus) == doctest::Approx(0.5).epsilon(1e-12));

    Register other({2, 2}, {"a", "b"});
    StateVector pair(other);
    CHECK_THROWS_AS(fidelity(zero, pair), ShapeMismatch);
}

TEST_CASE("fidelity_on_sites traces out the rest") {
    Register reg({2, 2}, {"keep", "rest"});
    // product |+> (x) |1>: reduced state on site 0 is |+> exactly
    StateVector st(reg);
    apply_single(st, 0, h_gate());
    std::array<Complex, 4> x{Complex(0, 0), Complex(1, 0), Complex(1, 0), Complex(0, 0)};
    apply_single(st, 1, x);
    std::vector<Complex> plus{Complex(1 / kRoot2, 0), Complex(1 / kRoot2, 0)};
    CHECK(fidelity_on_sites(st, {0}, plus) == doctest::Approx(1.0).epsilon(1e-12));

    // maximally entangled: overlap with any pure state is 1/2
    StateVector epr(reg);
    apply_single(epr, 0, h_gate());
    apply_two(epr, 0, 1, cnot_gate());
    CHECK(fidelity_on_sites(epr, {0}, plus) == doctest::Approx(0.5).epsilon(1e-12));

    // global phase on the target is irrelevant
    std::vector<Complex> rotated{Complex(0, 1 / kRoot2), Complex(0, 1 / kRoot2)};
    CHECK(fidelity_on_sites(st, {0}, rotated) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("measurement collapse renormalizes and is seed-deterministic") {
    Register reg({2, 2}, {"a", "b"});
    for (int rep = 0; rep < 3; ++rep) {
        RngStream rng(42);
        StateVector st(reg);
        apply_single(st, 0, h_gate());
        apply_two(st, 0, 1, cnot_gate());
        MeasurementRecord rec = measure_site_computational(st, 0, rng);
        CHECK(std::abs(st.norm2() - 1.0) < 1e-12);
        // EPR pair: the partner collapses with the measured qubit
        auto partner = outcome_distribution(st, 1);
        CHECK(partner[static_cast<std::size_t>(rec.outcome)] ==
              doctest::Approx(1.0).epsilon(1e-12));
        static int first = -1;
        if (first == -1) first = rec.outcome;
        CHECK(rec.outcome == first);
    }
}

TEST_CASE("basis specs are unitary") {
    RngStream rng(13);
    for (int i = 0; i < 50; ++i) CHECK(BasisSpec::haar(rng).is_unitary());
    CHECK(BasisSpec::hadamard().is_unitary());
    BasisSpec pm = BasisSpec::haar(rng).plus_minus();
    CHECK(pm.is_unitary());
}
