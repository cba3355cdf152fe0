#include "ionscope/observables.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "ionscope/errors.hpp"

namespace ionscope {

namespace {

const Complex kI(0.0, 1.0);

// Weight of the coherent-state tail above the truncation; Poisson mass above N.
double truncation_loss(double abs_alpha, int N) {
    const double mean = abs_alpha * abs_alpha;
    double term = std::exp(-mean);
    double kept = term;
    for (int n = 1; n <= N; ++n) {
        term *= mean / n;
        kept += term;
    }
    return 1.0 - kept;
}

std::vector<Complex> renormalized(std::vector<Complex> c) {
    double norm2 = 0.0;
    for (const Complex& v : c)
        norm2 += std::norm(v);
    const double inv = 1.0 / std::sqrt(norm2);
    for (Complex& v : c)
        v *= inv;
    return c;
}

} // namespace

ObservableBasis phase_basis(int N) {
    if (N < 0)
        throw ValidationError("phase_basis: N must be >= 0");
    ObservableBasis basis;
    basis.N = N;
    const double step = 2.0 * std::numbers::pi / (N + 1);
    const double amp = 1.0 / std::sqrt(static_cast<double>(N + 1));
    for (int k = 0; k <= N; ++k) {
        const double phi_k = step * k;
        basis.eigenvalues.push_back(phi_k);
        StateVector v(N + 1);
        for (int n = 0; n <= N; ++n)
            v(n) = amp * std::exp(kI * (phi_k * n));
        basis.eigenstates.push_back(std::move(v));
    }
    return basis;
}

ObservableBasis position_basis(int N) {
    if (N < 1)
        throw ValidationError("position_basis: N must be >= 1");
    Eigen::MatrixXd x = Eigen::MatrixXd::Zero(N + 1, N + 1);
    for (int n = 1; n <= N; ++n) {
        const double c = std::sqrt(static_cast<double>(n));
        x(n - 1, n) = c;
        x(n, n - 1) = c;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(x);
    ObservableBasis basis;
    basis.N = N;
    for (int k = 0; k <= N; ++k) {
        basis.eigenvalues.push_back(eig.eigenvalues()(k));
        Eigen::VectorXd v = eig.eigenvectors().col(k);
        // canonical sign: largest-magnitude component positive
        int imax = 0;
        for (int i = 1; i <= N; ++i)
            if (std::abs(v(i)) > std::abs(v(imax)))
                imax = i;
        if (v(imax) < 0.0)
            v = -v;
        basis.eigenstates.push_back(v.cast<Complex>());
    }
    return basis;
}

std::vector<Complex> coherent_coeffs(Complex alpha, int N) {
    if (N < 0)
        throw ValidationError("coherent_coeffs: N must be >= 0");
    const double loss = truncation_loss(std::abs(alpha), N);
    if (loss > 1e-6) {
        std::ostringstream msg;
        msg << "coherent_coeffs: truncation at N = " << N << " loses " << loss
            << " of the population for |alpha| = " << std::abs(alpha)
            << "; raise N";
        throw ValidationError(msg.str());
    }
    std::vector<Complex> c(N + 1);
    Complex term = 1.0; // alpha^n / sqrt(n!)
    c[0] = term;
    for (int n = 1; n <= N; ++n) {
        term *= alpha / std::sqrt(static_cast<double>(n));
        c[n] = term;
    }
    return renormalized(std::move(c));
}

std::vector<Complex> cat_coeffs(Complex alpha, int N) {
    if (N < 0)
        throw ValidationError("cat_coeffs: N must be >= 0");
    const double loss = truncation_loss(std::abs(alpha), N);
    if (loss > 1e-6)
        throw ValidationError("cat_coeffs: truncation too aggressive for alpha");
    std::vector<Complex> c(N + 1);
    Complex plus = 1.0, minus = 1.0;
    c[0] = plus + minus;
    for (int n = 1; n <= N; ++n) {
        const double root = std::sqrt(static_cast<double>(n));
        plus *= alpha / root;
        minus *= -alpha / root;
        c[n] = plus + minus;
    }
    return renormalized(std::move(c));
}

std::vector<Complex> phase_state_coeffs(int N, double phi) {
    if (N < 0)
        throw ValidationError("phase_state_coeffs: N must be >= 0");
    std::vector<Complex> c(N + 1);
    const double amp = 1.0 / std::sqrt(static_cast<double>(N + 1));
    for (int n = 0; n <= N; ++n)
        c[n] = amp * std::exp(kI * (phi * n));
    return c;
}

std::vector<double> born_distribution(const StateVector& state,
                                      const ObservableBasis& basis) {
    if (state.size() != basis.dim())
        throw ValidationError("born_distribution: dimension mismatch");
    std::vector<double> p(basis.dim());
    for (int k = 0; k < basis.dim(); ++k)
        p[k] = std::norm(inner_product(basis.eigenstates[k], state));
    return p;
}

std::string StateRecipe::label() const {
    std::ostringstream s;
    switch (kind) {
    case Kind::coefficients:
        s << "coefficients:N=" << coefficients.size() - 1;
        break;
    case Kind::phase_state:
        s << "phase_state:N=" << N << ":phi=" << phi;
        break;
    case Kind::coherent:
        s << "coherent:N=" << N << ":alpha=" << alpha.real();
        if (alpha.imag() != 0.0)
            s << "+" << alpha.imag() << "i";
        break;
    case Kind::cat:
        s << "cat:N=" << N << ":alpha=" << alpha.real();
        if (alpha.imag() != 0.0)
            s << "+" << alpha.imag() << "i";
        break;
    }
    return s.str();
}

std::vector<Complex> realize(const StateRecipe& recipe) {
    switch (recipe.kind) {
    case StateRecipe::Kind::coefficients: {
        if (recipe.coefficients.empty())
            throw ValidationError("recipe: empty coefficient list");
        double norm2 = 0.0;
        for (const Complex& c : recipe.coefficients)
            norm2 += std::norm(c);
        if (std::abs(norm2 - 1.0) > 1e-12)
            throw ValidationError("recipe: coefficients are not normalized");
        return recipe.coefficients;
    }
    case StateRecipe::Kind::phase_state:
        return phase_state_coeffs(recipe.N, recipe.phi);
    case StateRecipe::Kind::coherent:
        return coherent_coeffs(recipe.alpha, recipe.N);
    case StateRecipe::Kind::cat:
        return cat_coeffs(recipe.alpha, recipe.N);
    }
    throw ValidationError("recipe: unknown kind");
}

std::string basis_to_json(const ObservableBasis& basis, const std::string& name) {
    nlohmann::json j;
    j["schema"] = "ionscope.basis/1";
    j["basis"] = name;
    j["N"] = basis.N;
    j["eigenvalues"] = basis.eigenvalues;
    auto states = nlohmann::json::array();
    for (const StateVector& v : basis.eigenstates) {
        auto coeffs = nlohmann::json::array();
        for (int n = 0; n < v.size(); ++n)
            coeffs.push_back({v(n).real(), v(n).imag()});
        states.push_back(std::move(coeffs));
    }
    j["eigenstates"] = std::move(states);
    return j.dump(2);
}

} // namespace ionscope
