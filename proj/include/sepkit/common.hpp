#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace sepkit {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Thrown on violated preconditions: dimension mismatches, malformed input,
// out-of-range parameters. Expected case splits (flattening refusals,
// out-of-case analysis inputs) are returned as data, not thrown.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

namespace tol {
inline constexpr double feasibility = 1e-9;   // LP feasibility / witness residual
inline constexpr double rank = 1e-9;          // eigenvalue cutoff on unit-trace reductions
inline constexpr double stabilizer = 1e-10;   // ||S psi - psi||
inline constexpr double singular = 1e-10;     // relative smallest singular value
inline constexpr double completeness = 1e-10; // || sum K^dag K - 1 ||_max
inline constexpr double collinearity = 1e-8;  // branch classification slack
}  // namespace tol

inline double max_abs(const Matrix& m) {
    if (m.size() == 0) return 0.0;
    return m.cwiseAbs().maxCoeff();
}

inline bool is_hermitian(const Matrix& m, double eps = 1e-10) {
    if (m.rows() != m.cols()) return false;
    return max_abs(m - m.adjoint()) < eps;
}

inline Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

}  // namespace sepkit
