#include "ionscope/hamiltonians.hpp"

#include <cmath>

#include "ionscope/errors.hpp"

namespace ionscope {

namespace {

const Complex kI(0.0, 1.0);

// Generalized Laguerre L_n^(alpha)(x), forward three-term recurrence.
long double laguerre(int n, int alpha, long double x) {
    long double lm1 = 1.0L;
    if (n == 0)
        return lm1;
    long double l = 1.0L + alpha - x;
    for (int k = 1; k < n; ++k) {
        const long double lp1 =
            ((2.0L * k + 1.0L + alpha - x) * l - (k + alpha) * lm1) / (k + 1.0L);
        lm1 = l;
        l = lp1;
    }
    return l;
}

} // namespace

void TrapParams::validate() const {
    if (!(nu > 0.0))
        throw ValidationError("TrapParams: nu must be positive");
    if (!(eta > 0.0) || !(eta < 2.0))
        throw ValidationError("TrapParams: eta must lie in (0, 2)");
}

std::string to_string(Wave w) {
    switch (w) {
    case Wave::travelling: return "travelling";
    case Wave::standing_antinode: return "standing_antinode";
    case Wave::standing_node: return "standing_node";
    }
    return "?";
}

std::string to_string(PulseKind k) {
    return k == PulseKind::vertical ? "vertical" : "diagonal";
}

void LaserPulse::validate(const TrapParams& trap) const {
    if (duration < 0.0)
        throw ValidationError("LaserPulse: negative duration");
    if (kind == PulseKind::vertical) {
        if (delta != 0.0)
            throw ValidationError("LaserPulse: vertical pulse requires delta = 0");
        if (wave == Wave::standing_node)
            throw ValidationError("LaserPulse: vertical pulse cannot sit at a node");
    } else {
        if (delta != -trap.nu)
            throw ValidationError("LaserPulse: diagonal pulse requires delta = -nu");
        if (wave == Wave::standing_antinode)
            throw ValidationError("LaserPulse: diagonal pulse cannot sit at an antinode");
    }
}

LaserPulse make_vertical_pulse(double omega, double phi, double duration,
                               Wave wave) {
    return LaserPulse{omega, 0.0, phi, duration, wave, PulseKind::vertical};
}

LaserPulse make_diagonal_pulse(double omega, double phi, double duration,
                               const TrapParams& trap, Wave wave) {
    return LaserPulse{omega, -trap.nu, phi, duration, wave, PulseKind::diagonal};
}

Complex displacement_element(int n, int m, double eta) {
    if (n < 0 || m < 0)
        throw ValidationError("displacement_element: negative Fock index");
    const int lo = std::min(n, m);
    const int hi = std::max(n, m);
    const int d = hi - lo;
    if (eta == 0.0)
        return d == 0 ? Complex(1.0) : Complex(0.0);
    // <n|e^{-i eta x}|m> = (-i)^d eta^d sqrt(lo!/hi!) e^{-eta^2/2} L_lo^d(eta^2)
    long double prefac = std::exp(-static_cast<long double>(eta) * eta / 2.0L);
    for (int j = lo + 1; j <= hi; ++j)
        prefac *= eta / std::sqrt(static_cast<long double>(j));
    const long double value =
        prefac * laguerre(lo, d, static_cast<long double>(eta) * eta);
    Complex phase(1.0, 0.0);
    switch (d % 4) {
    case 0: phase = {1.0, 0.0}; break;
    case 1: phase = {0.0, -1.0}; break;
    case 2: phase = {-1.0, 0.0}; break;
    case 3: phase = {0.0, 1.0}; break;
    }
    return phase * static_cast<double>(value);
}

Complex effective_rabi_vertical(double omega, double eta, int n) {
    if (n < 0)
        throw ValidationError("effective_rabi_vertical: negative Fock index");
    // Omega_n = Omega sum_k C(n,k) (-eta^2)^k e^{-eta^2/2} / k!
    const long double x = static_cast<long double>(eta) * eta;
    long double sum = 0.0L;
    long double binom = 1.0L; // C(n, k)
    long double powk = 1.0L;  // (-x)^k / k!
    for (int k = 0; k <= n; ++k) {
        sum += binom * powk;
        binom = binom * (n - k) / (k + 1.0L);
        powk *= -x / (k + 1.0L);
    }
    return omega * static_cast<double>(sum * std::exp(-x / 2.0L));
}

Complex effective_rabi_diagonal(double omega, double eta, int n) {
    if (n < 0)
        throw ValidationError("effective_rabi_diagonal: negative Fock index");
    // Omega'_n = -i Omega sum_k C(n+1,k+1) (-1)^k eta^{2k+1} e^{-eta^2/2}
    //            / (sqrt(n+1) k!)
    const long double x = static_cast<long double>(eta) * eta;
    long double sum = 0.0L;
    long double binom = n + 1.0L;     // C(n+1, k+1)
    long double powk = eta;           // (-1)^k eta^{2k+1} / k!
    for (int k = 0; k <= n; ++k) {
        sum += binom * powk;
        binom = binom * (n - k) / (k + 2.0L);
        powk *= -x / (k + 1.0L);
    }
    sum *= std::exp(-x / 2.0L) / std::sqrt(static_cast<long double>(n) + 1.0L);
    return -kI * omega * static_cast<double>(sum);
}

Complex effective_coupling(PulseKind kind, Wave wave, double omega, double eta,
                           int n) {
    if (kind == PulseKind::vertical) {
        const Complex d = displacement_element(n, n, eta);
        switch (wave) {
        case Wave::travelling: return omega * d;
        case Wave::standing_antinode: return omega * Complex(d.real(), 0.0);
        case Wave::standing_node:
            throw ValidationError("effective_coupling: vertical pulse at a node");
        }
    } else {
        const Complex d = displacement_element(n, n + 1, eta);
        switch (wave) {
        case Wave::travelling: return omega * d;
        case Wave::standing_node: return omega * (kI * d); // -Im part, real
        case Wave::standing_antinode:
            throw ValidationError("effective_coupling: diagonal pulse at an antinode");
        }
    }
    return {};
}

OperatorMatrix wave_operator(Wave wave, double eta, int phonon_dim) {
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(phonon_dim, phonon_dim);
    for (int n = 1; n < phonon_dim; ++n) {
        const double c = std::sqrt(static_cast<double>(n));
        x(n - 1, n) = c;
        x(n, n - 1) = c;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x);
    const Eigen::VectorXd lambda = eig.eigenvalues();
    const Eigen::MatrixXd v = eig.eigenvectors();
    Eigen::VectorXcd f(phonon_dim);
    for (int i = 0; i < phonon_dim; ++i) {
        const double a = eta * lambda(i);
        switch (wave) {
        case Wave::travelling: f(i) = std::exp(-kI * a); break;
        case Wave::standing_antinode: f(i) = std::cos(a); break;
        case Wave::standing_node: f(i) = std::sin(a); break;
        }
    }
    return v.cast<Complex>() * f.asDiagonal() * v.transpose().cast<Complex>();
}

OperatorMatrix full_hamiltonian(double t, const LaserPulse& pulse,
                                const TrapParams& trap,
                                const JointSpace& space) {
    pulse.validate(trap);
    const int p = space.phonon_dim();
    const OperatorMatrix w0 = wave_operator(pulse.wave, trap.eta, p);
    Eigen::VectorXcd dphase(p);
    for (int n = 0; n < p; ++n)
        dphase(n) = std::exp(kI * (trap.nu * n * t));
    // W(t) = D(t) W0 D(t)† with D(t) = diag(e^{i nu n t})
    const OperatorMatrix wt =
        dphase.asDiagonal() * w0 * dphase.conjugate().asDiagonal();
    const Complex c =
        0.5 * pulse.omega * std::exp(-kI * (pulse.phi + pulse.delta * t));
    OperatorMatrix h = OperatorMatrix::Zero(space.dim(), space.dim());
    h.block(p, 0, p, p) = c * wt;            // sigma+ part, e <- g
    h.block(0, p, p, p) = (c * wt).adjoint();
    return h;
}

OperatorMatrix approx_hamiltonian(const LaserPulse& pulse,
                                  const TrapParams& trap,
                                  const JointSpace& space) {
    pulse.validate(trap);
    const int p = space.phonon_dim();
    const Complex lphase = std::exp(-kI * pulse.phi);
    OperatorMatrix h = OperatorMatrix::Zero(space.dim(), space.dim());
    if (pulse.kind == PulseKind::vertical) {
        for (int n = 0; n < p; ++n) {
            const Complex a = 0.5 * lphase *
                effective_coupling(pulse.kind, pulse.wave, pulse.omega,
                                   trap.eta, n);
            h(space.flatten(Level::e, n), space.flatten(Level::g, n)) = a;
            h(space.flatten(Level::g, n), space.flatten(Level::e, n)) =
                std::conj(a);
        }
    } else {
        for (int n = 0; n + 1 < p; ++n) {
            const Complex a = 0.5 * lphase *
                effective_coupling(pulse.kind, pulse.wave, pulse.omega,
                                   trap.eta, n);
            h(space.flatten(Level::e, n), space.flatten(Level::g, n + 1)) = a;
            h(space.flatten(Level::g, n + 1), space.flatten(Level::e, n)) =
                std::conj(a);
        }
    }
    return h;
}

} // namespace ionscope
