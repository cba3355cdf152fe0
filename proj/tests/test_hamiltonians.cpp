#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ionscope/errors.hpp"
#include "ionscope/hamiltonians.hpp"
#include "oracles.hpp"

using namespace ionscope;

namespace {
const Complex I_(0.0, 1.0);
}

TEST_SUITE("hamiltonians") {

TEST_CASE("displacement element ground state and eta=0") {
    CHECK(std::abs(displacement_element(0, 0, 0.5) - std::exp(-0.125)) < 1e-15);
    for (int n = 0; n < 6; ++n)
        for (int m = 0; m < 6; ++m)
            CHECK(displacement_element(n, m, 0.0) ==
                  (n == m ? Complex(1.0) : Complex(0.0)));
}

TEST_CASE("displacement element vs matrix-exponential oracle") {
    CHECK(std::abs(displacement_element(3, 5, 0.7) -
                   oracles::displacement_matrix_exp(3, 5, 0.7)) < 1e-13);
    for (double eta : {0.1, 0.5, 0.95})
        for (int n : {0, 1, 4, 9})
            for (int m : {0, 2, 7, 12})
                CHECK(std::abs(displacement_element(n, m, eta) -
                               oracles::displacement_matrix_exp(n, m, eta)) <
                      1e-12);
}

TEST_CASE("displacement element magnitude and symmetry") {
    for (double eta : {0.1, 0.5, 0.95, 1.5})
        for (int n = 0; n <= 30; n += 3)
            for (int m = 0; m <= 30; m += 4) {
                const Complex d = displacement_element(n, m, eta);
                CHECK(std::abs(d) <= 1.0 + 1e-14);
                CHECK(std::abs(d - displacement_element(m, n, eta)) < 1e-15);
            }
}

TEST_CASE("vertical effective Rabi frequency") {
    CHECK(std::abs(effective_rabi_vertical(2.0, 0.5, 0) -
                   2.0 * std::exp(-0.125)) < 1e-14);
    for (int n : {0, 1, 5, 17})
        CHECK(std::abs(effective_rabi_vertical(0.7, 0.0, n) - 0.7) < 1e-15);

    // closed form Omega e^{-eta^2/2} L_4(eta^2)
    const double eta = 0.5;
    const Complex expected =
        std::exp(-eta * eta / 2.0) * std::assoc_laguerre(4, 0, eta * eta);
    CHECK(std::abs(effective_rabi_vertical(1.0, eta, 4) - expected) < 1e-14);
    CHECK(std::abs(effective_rabi_vertical(1.0, eta, 4) -
                   oracles::displacement_matrix_exp(4, 4, eta)) < 1e-12);
}

TEST_CASE("diagonal effective Rabi frequency") {
    const double eta = 0.5;
    CHECK(std::abs(effective_rabi_diagonal(1.0, eta, 0) -
                   (-I_ * eta * std::exp(-eta * eta / 2.0))) < 1e-15);
    for (int n : {0, 2, 9})
        CHECK(std::abs(effective_rabi_diagonal(1.0, 0.0, n)) == 0.0);
    CHECK(std::abs(effective_rabi_diagonal(1.0, eta, 3) -
                   oracles::displacement_matrix_exp(3, 4, eta)) < 1e-12);
}

TEST_CASE("binomial sums match Laguerre closed forms, n <= 40") {
    for (double eta : {0.1, 0.5, 0.95}) {
        const double x = eta * eta;
        const double envelope = std::exp(-x / 2.0);
        for (int n = 0; n <= 40; ++n) {
            const Complex vert_closed = envelope * std::assoc_laguerre(n, 0, x);
            CHECK(std::abs(effective_rabi_vertical(1.0, eta, n) -
                           vert_closed) < 1e-12);
            const Complex diag_closed = -I_ * envelope * eta *
                                        std::assoc_laguerre(n, 1, x) /
                                        std::sqrt(n + 1.0);
            CHECK(std::abs(effective_rabi_diagonal(1.0, eta, n) -
                           diag_closed) < 1e-12);
        }
    }
}

TEST_CASE("effective coupling per wave configuration") {
    const double eta = 0.5, omega = 0.8;
    for (int n : {0, 3, 7}) {
        const Complex trav_v = effective_coupling(PulseKind::vertical,
                                                  Wave::travelling, omega, eta,
                                                  n);
        const Complex anti =
            effective_coupling(PulseKind::vertical, Wave::standing_antinode,
                               omega, eta, n);
        CHECK(std::abs(trav_v - anti) < 1e-14); // diagonal elements are real

        const Complex trav_d = effective_coupling(PulseKind::diagonal,
                                                  Wave::travelling, omega, eta,
                                                  n);
        const Complex node = effective_coupling(PulseKind::diagonal,
                                                Wave::standing_node, omega,
                                                eta, n);
        CHECK(std::abs(std::abs(trav_d) - std::abs(node)) < 1e-14);
        CHECK(std::abs(node.imag()) < 1e-15); // sin element is real
    }
    CHECK_THROWS_AS(effective_coupling(PulseKind::vertical,
                                       Wave::standing_node, 1.0, 0.5, 0),
                    ValidationError);
}

TEST_CASE("full Hamiltonian zero drive and hermiticity") {
    const TrapParams trap{1.0, 0.5};
    const JointSpace space = make_joint_space(10);
    const LaserPulse off = make_vertical_pulse(0.0, 0.3, 1.0);
    CHECK(full_hamiltonian(2.7, off, trap, space).cwiseAbs().maxCoeff() == 0.0);

    for (double t : {0.0, 0.37, 5.11}) {
        const LaserPulse v = make_vertical_pulse(0.2, 1.1, 1.0);
        const LaserPulse d = make_diagonal_pulse(0.2, -0.4, 1.0, trap);
        for (const LaserPulse& pulse : {v, d}) {
            const OperatorMatrix h = full_hamiltonian(t, pulse, trap, space);
            CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
        }
    }
}

TEST_CASE("full Hamiltonian block structure at t = 0") {
    const TrapParams trap{1.0, 0.5};
    const JointSpace space = make_joint_space(16);
    const double omega = 0.3;
    const LaserPulse pulse = make_vertical_pulse(omega, 0.0, 1.0);
    const OperatorMatrix h = full_hamiltonian(0.0, pulse, trap, space);
    for (int n = 0; n <= 4; ++n) {
        const Complex expected =
            0.5 * omega * displacement_element(n, n, trap.eta);
        CHECK(std::abs(h(space.flatten(Level::e, n),
                         space.flatten(Level::g, n)) -
                       expected) < 1e-12);
    }
}

TEST_CASE("full Hamiltonian is periodic in the trap period") {
    const TrapParams trap{1.0, 0.5};
    const JointSpace space = make_joint_space(8);
    const double period = 2.0 * std::numbers::pi / trap.nu;
    const LaserPulse v = make_vertical_pulse(0.25, 0.9, 1.0);
    const LaserPulse d = make_diagonal_pulse(0.25, 0.9, 1.0, trap);
    for (const LaserPulse& pulse : {v, d}) {
        const OperatorMatrix h1 = full_hamiltonian(0.83, pulse, trap, space);
        const OperatorMatrix h2 =
            full_hamiltonian(0.83 + period, pulse, trap, space);
        CHECK((h1 - h2).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("standing wave selection rules") {
    const TrapParams trap{1.0, 0.6};
    const JointSpace space = make_joint_space(10);
    const LaserPulse anti =
        make_vertical_pulse(0.3, 0.2, 1.0, Wave::standing_antinode);
    const OperatorMatrix ha = full_hamiltonian(0.41, anti, trap, space);
    const LaserPulse node =
        make_diagonal_pulse(0.3, 0.2, 1.0, trap, Wave::standing_node);
    const OperatorMatrix hn = full_hamiltonian(0.41, node, trap, space);
    for (int n = 0; n <= 9; ++n) {
        // cos is even in the quadrature: no coupling to odd neighbours
        CHECK(std::abs(ha(space.flatten(Level::e, n + 1),
                          space.flatten(Level::g, n))) < 1e-13);
        // sin is odd: no carrier coupling
        CHECK(std::abs(hn(space.flatten(Level::e, n),
                          space.flatten(Level::g, n))) < 1e-13);
    }
}

TEST_CASE("approximate Hamiltonian blocks") {
    const TrapParams trap{1.0, 1e-8};
    const JointSpace space = make_joint_space(6);
    const double omega = 0.4;
    const LaserPulse v = make_vertical_pulse(omega, 0.0, 1.0);
    const OperatorMatrix hv = approx_hamiltonian(v, trap, space);
    for (int n = 0; n <= 6; ++n) // eta -> 0: every pair couples at Omega/2
        CHECK(std::abs(hv(space.flatten(Level::e, n),
                          space.flatten(Level::g, n)) -
                       0.5 * omega) < 1e-8);

    const TrapParams trap2{1.0, 0.5};
    const LaserPulse d = make_diagonal_pulse(omega, 0.7, 1.0, trap2);
    const OperatorMatrix hd = approx_hamiltonian(d, trap2, space);
    // top phonon level couples to nothing above the truncation
    const int etop = space.flatten(Level::e, 6);
    for (int col = 0; col < space.dim(); ++col)
        if (col != etop)
            CHECK(std::abs(hd(etop, col)) == 0.0);

    // each occupied 2x2 block has eigenvalues +-|coupling|/2
    for (int n = 0; n < 6; ++n) {
        Eigen::Matrix2cd block;
        const int ie = space.flatten(Level::e, n);
        const int ig = space.flatten(Level::g, n + 1);
        block << hd(ie, ie), hd(ie, ig), hd(ig, ie), hd(ig, ig);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> eig(block);
        const double mag = std::abs(effective_coupling(
            PulseKind::diagonal, Wave::travelling, omega, trap2.eta, n));
        CHECK(std::abs(eig.eigenvalues()(0) + 0.5 * mag) < 1e-14);
        CHECK(std::abs(eig.eigenvalues()(1) - 0.5 * mag) < 1e-14);
    }
}

TEST_CASE("pulse validation") {
    const TrapParams trap{1.0, 0.5};
    LaserPulse bad = make_vertical_pulse(0.1, 0.0, 1.0);
    bad.delta = -1.0;
    CHECK_THROWS_AS(bad.validate(trap), ValidationError);
    CHECK_THROWS_AS(
        make_vertical_pulse(0.1, 0.0, 1.0, Wave::standing_node).validate(trap),
        ValidationError);
    CHECK_THROWS_AS(make_diagonal_pulse(0.1, 0.0, 1.0, trap,
                                        Wave::standing_antinode)
                        .validate(trap),
                    ValidationError);
    CHECK_THROWS_AS((TrapParams{0.0, 0.5}).validate(), ValidationError);
    CHECK_THROWS_AS((TrapParams{1.0, -0.1}).validate(), ValidationError);
}

} // TEST_SUITE
