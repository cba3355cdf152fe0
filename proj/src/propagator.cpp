#include "ionscope/propagator.hpp"

#include <cmath>
#include <sstream>

#include "ionscope/errors.hpp"

namespace ionscope {

namespace {

const Complex kI(0.0, 1.0);

JointSpace space_for(const StateVector& state) {
    if (state.size() < 2 || state.size() % 2 != 0)
        throw ValidationError("state dimension is not a joint-space dimension");
    return JointSpace{static_cast<int>(state.size()) / 2 - 1};
}

// Diagonal of sigma_z/2 on joint-space layout (g block then e block).
Eigen::VectorXd sigma_z_half_diag(const JointSpace& space) {
    const int p = space.phonon_dim();
    Eigen::VectorXd d(space.dim());
    d.head(p).setConstant(-0.5);
    d.tail(p).setConstant(0.5);
    return d;
}

Eigen::VectorXd number_diag(const JointSpace& space) {
    const int p = space.phonon_dim();
    Eigen::VectorXd d(space.dim());
    for (int n = 0; n < p; ++n) {
        d(n) = n;
        d(p + n) = n;
    }
    return d;
}

// Generator of the frame the pulse Hamiltonian is static in:
// S = nu n - (delta/2) sigma_z.
Eigen::VectorXd natural_frame_diag(const LaserPulse& pulse,
                                   const TrapParams& trap,
                                   const JointSpace& space) {
    return trap.nu * number_diag(space) -
           pulse.delta * sigma_z_half_diag(space);
}

Eigen::VectorXd frame_diag(Frame frame, const TrapParams& trap,
                           const JointSpace& space) {
    switch (frame) {
    case Frame::lab: return Eigen::VectorXd::Zero(space.dim());
    case Frame::rfv: return trap.nu * number_diag(space);
    case Frame::rfd:
        return trap.nu * (number_diag(space) + sigma_z_half_diag(space));
    }
    return Eigen::VectorXd::Zero(space.dim());
}

Eigen::VectorXcd phase_of(const Eigen::VectorXd& gen, double t) {
    return (kI * t * gen.array()).exp().matrix();
}

// Fixed-step RK4 on the frame-transformed Schrodinger equation. `gen_frame`
// is the integration frame generator S_f; the pulse enters through its
// static coupling block and the residual rotation R = S_pulse - S_f.
StateVector rk4_pass(const StateVector& psi0, const LaserPulse& pulse,
                     const TrapParams& trap, const JointSpace& space,
                     const Eigen::VectorXd& gen_frame, double t_start,
                     long steps, double h) {
    const int p = space.phonon_dim();
    const OperatorMatrix w0 = wave_operator(pulse.wave, trap.eta, p);
    const OperatorMatrix w0adj = w0.adjoint();
    const Eigen::VectorXd residual =
        natural_frame_diag(pulse, trap, space) - gen_frame;
    const Complex cg = 0.5 * pulse.omega * std::exp(-kI * pulse.phi);

    // Stage phases advance in half-step increments; recomputed from scratch
    // periodically to stop modulus drift.
    const Eigen::VectorXcd half_inc = phase_of(residual, 0.5 * h);
    Eigen::VectorXcd phase = phase_of(residual, t_start);
    long half_index = 0;
    constexpr long kRefreshEvery = 8192;

    StateVector phi = phase_of(gen_frame, -t_start).cwiseProduct(psi0);

    auto rhs = [&](const Eigen::VectorXcd& ph, const StateVector& y,
                   StateVector& dy) {
        // u = e^{-iRt} y ; w = H0 u ; dy = -i (S_f y + e^{iRt} w)
        const Eigen::VectorXcd u = ph.conjugate().cwiseProduct(y);
        StateVector w(space.dim());
        w.tail(p).noalias() = cg * (w0 * u.head(p));
        w.head(p).noalias() = std::conj(cg) * (w0adj * u.tail(p));
        dy = -kI * ((gen_frame.array() * y.array()).matrix() +
                    ph.cwiseProduct(w));
    };

    StateVector k1(space.dim()), k2(space.dim()), k3(space.dim()),
        k4(space.dim()), tmp(space.dim());
    Eigen::VectorXcd phase_mid(space.dim()), phase_end(space.dim());

    for (long s = 0; s < steps; ++s) {
        if (half_index % kRefreshEvery == 0)
            phase = phase_of(residual, t_start + 0.5 * h * half_index);
        phase_mid = phase.cwiseProduct(half_inc);
        phase_end = phase_mid.cwiseProduct(half_inc);

        rhs(phase, phi, k1);
        tmp = phi + (0.5 * h) * k1;
        rhs(phase_mid, tmp, k2);
        tmp = phi + (0.5 * h) * k2;
        rhs(phase_mid, tmp, k3);
        tmp = phi + h * k3;
        rhs(phase_end, tmp, k4);
        phi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        phase = phase_end;
        half_index += 2;
    }

    const double t_end = t_start + steps * h;
    return phase_of(gen_frame, t_end).cwiseProduct(phi);
}

StateVector evolve_rk4(const StateVector& state, const LaserPulse& pulse,
                       const TrapParams& trap, const JointSpace& space,
                       const IntegratorConfig& cfg, double t_start,
                       EvolveDiagnostics* diag) {
    const Eigen::VectorXd gen_frame = frame_diag(cfg.frame, trap, space);
    const Eigen::VectorXd residual =
        natural_frame_diag(pulse, trap, space) - gen_frame;
    const double rate = 0.5 * std::abs(pulse.omega) + std::abs(pulse.delta) +
                        trap.nu + residual.cwiseAbs().maxCoeff() +
                        gen_frame.cwiseAbs().maxCoeff();
    const double h0 = cfg.step_scale / rate;
    const long steps = std::max<long>(1, static_cast<long>(
                           std::ceil(pulse.duration / h0)));
    if (steps > (1L << 40)) {
        std::ostringstream msg;
        msg << "evolve_full(rk4): " << steps
            << " steps required; duration too long for this tolerance";
        throw ConvergenceError(msg.str());
    }
    const double h = pulse.duration / static_cast<double>(steps);

    const StateVector fine =
        rk4_pass(state, pulse, trap, space, gen_frame, t_start, 2 * steps,
                 0.5 * h);
    double err = 0.0;
    if (std::isfinite(cfg.rtol)) {
        const StateVector coarse =
            rk4_pass(state, pulse, trap, space, gen_frame, t_start, steps, h);
        err = (fine - coarse).norm() / 15.0;
        if (err > cfg.rtol) {
            std::ostringstream msg;
            msg << "evolve_full(rk4): Richardson error estimate " << err
                << " exceeds rtol " << cfg.rtol << " at " << steps
                << " steps; shrink step_scale or shorten the pulse";
            throw ConvergenceError(msg.str());
        }
    }
    if (diag) {
        diag->richardson_error = err;
        diag->steps = steps;
        diag->norm_drift = std::abs(fine.norm() - state.norm());
    }
    return fine;
}

} // namespace

void IntegratorConfig::validate() const {
    if (!(step_scale > 0.0) || step_scale > 0.5)
        throw ValidationError("IntegratorConfig: step_scale must be in (0, 0.5]");
    if (!(rtol > 0.0))
        throw ValidationError("IntegratorConfig: rtol must be positive");
}

PulseKernel::PulseKernel(PulseKind kind, Wave wave, double omega,
                         const TrapParams& trap, const JointSpace& space)
    : space_(space) {
    const LaserPulse proto =
        kind == PulseKind::vertical
            ? make_vertical_pulse(omega, 0.0, 0.0, wave)
            : make_diagonal_pulse(omega, 0.0, 0.0, trap, wave);
    proto.validate(trap);
    frame_gen_ = natural_frame_diag(proto, trap, space_);
    sigma_half_ = sigma_z_half_diag(space_);

    const int p = space_.phonon_dim();
    const OperatorMatrix w0 = wave_operator(wave, trap.eta, p);
    OperatorMatrix h = OperatorMatrix::Zero(space_.dim(), space_.dim());
    h.block(p, 0, p, p) = (0.5 * omega) * w0;
    h.block(0, p, p, p) = ((0.5 * omega) * w0).adjoint();
    h += frame_gen_.cast<Complex>().asDiagonal();

    Eigen::SelfAdjointEigenSolver<OperatorMatrix> eig(h);
    vecs_ = eig.eigenvectors();
    vals_ = eig.eigenvalues();
}

StateVector PulseKernel::apply(const StateVector& psi, double phi,
                               double duration, double t_start) const {
    if (psi.size() != space_.dim())
        throw ValidationError("PulseKernel::apply: dimension mismatch");
    // psi(t0+T) = e^{iS(t0+T)} P(phi) V e^{-i Lambda T} V† P(phi)† e^{-iS t0} psi
    // with P(phi) = e^{-i phi sigma_z / 2}.
    Eigen::VectorXcd v =
        phase_of(frame_gen_, -t_start).cwiseProduct(psi);
    v = phase_of(sigma_half_, phi).cwiseProduct(v); // P†
    Eigen::VectorXcd y = vecs_.adjoint() * v;
    y = (-kI * duration * vals_.array()).exp().matrix().cwiseProduct(y);
    v.noalias() = vecs_ * y;
    v = phase_of(sigma_half_, -phi).cwiseProduct(v); // P
    return phase_of(frame_gen_, t_start + duration).cwiseProduct(v);
}

StateVector evolve_full(const StateVector& state, const LaserPulse& pulse,
                        const TrapParams& trap, const IntegratorConfig& cfg,
                        double t_start, EvolveDiagnostics* diag) {
    trap.validate();
    pulse.validate(trap);
    cfg.validate();
    const JointSpace space = space_for(state);
    if (pulse.duration == 0.0) {
        if (diag) *diag = {};
        return state;
    }
    if (cfg.method == Method::rk4)
        return evolve_rk4(state, pulse, trap, space, cfg, t_start, diag);
    const PulseKernel kernel(pulse.kind, pulse.wave, pulse.omega, trap, space);
    StateVector out = kernel.apply(state, pulse.phi, pulse.duration, t_start);
    if (diag) {
        *diag = {};
        diag->norm_drift = std::abs(out.norm() - state.norm());
    }
    return out;
}

StateVector evolve_ideal(const StateVector& state, const LaserPulse& pulse,
                         const TrapParams& trap) {
    trap.validate();
    pulse.validate(trap);
    const JointSpace space = space_for(state);
    const int p = space.phonon_dim();
    StateVector out = state;
    const Complex lphase = std::exp(-kI * pulse.phi);
    const bool vertical = pulse.kind == PulseKind::vertical;
    const int pairs = vertical ? p : p - 1;
    for (int n = 0; n < pairs; ++n) {
        const Complex a = effective_coupling(pulse.kind, pulse.wave,
                                             pulse.omega, trap.eta, n);
        const double mag = std::abs(a);
        if (mag == 0.0)
            continue;
        const double theta = 0.5 * mag * pulse.duration;
        const Complex u = (a / mag) * lphase;
        const int ie = space.flatten(Level::e, n);
        const int ig = space.flatten(Level::g, vertical ? n : n + 1);
        const Complex ae = out(ie);
        const Complex ag = out(ig);
        const double c = std::cos(theta);
        const double s = std::sin(theta);
        out(ie) = c * ae - kI * u * s * ag;
        out(ig) = -kI * std::conj(u) * s * ae + c * ag;
    }
    return out;
}

} // namespace ionscope
