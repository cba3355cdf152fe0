#include "ionscope/hilbert.hpp"

#include <cmath>

#include "ionscope/errors.hpp"

namespace ionscope {

JointSpace make_joint_space(int n_max) {
    if (n_max < 0)
        throw ValidationError("make_joint_space: n_max must be >= 0");
    return JointSpace{n_max};
}

OperatorMatrix annihilation(int dim) {
    OperatorMatrix a = OperatorMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n)
        a(n - 1, n) = std::sqrt(static_cast<double>(n));
    return a;
}

OperatorMatrix position_quadrature(int dim) {
    OperatorMatrix x = OperatorMatrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        const double c = std::sqrt(static_cast<double>(n));
        x(n - 1, n) = c;
        x(n, n - 1) = c;
    }
    return x;
}

Complex inner_product(const StateVector& a, const StateVector& b) {
    if (a.size() != b.size())
        throw ValidationError("inner_product: dimension mismatch");
    return a.dot(b); // Eigen's dot conjugates the first argument
}

StateVector apply(const OperatorMatrix& m, const StateVector& v) {
    if (m.cols() != v.size())
        throw ValidationError("apply: dimension mismatch");
    return m * v;
}

void normalize(StateVector& v) {
    const double n = v.norm();
    if (n < kEmptyBranchTol)
        throw ValidationError("normalize: zero vector");
    v /= n;
}

ProjectionResult project_and_normalize(const StateVector& v,
                                       const OperatorMatrix& p) {
    if (p.rows() != v.size() || p.cols() != v.size())
        throw ValidationError("project_and_normalize: dimension mismatch");
    StateVector pv = p * v;
    const double prob = pv.squaredNorm();
    ProjectionResult result;
    result.prob = prob;
    if (prob >= kEmptyBranchTol) {
        pv /= std::sqrt(prob);
        result.post = std::move(pv);
    }
    return result;
}

StateVector embed_ground(const Eigen::VectorXcd& coeffs, const JointSpace& space) {
    if (coeffs.size() > space.phonon_dim())
        throw ValidationError("embed_ground: coefficients exceed phonon cutoff");
    StateVector psi = StateVector::Zero(space.dim());
    psi.head(coeffs.size()) = coeffs;
    return psi;
}

} // namespace ionscope
