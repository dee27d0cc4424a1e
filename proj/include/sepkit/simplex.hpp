#pragma once

#include <vector>

#include "sepkit/common.hpp"

namespace sepkit::lp {

enum class Status { Feasible, Infeasible, IterationLimit };

struct Result {
    Status status = Status::IterationLimit;
    std::vector<double> x;       // x >= 0 with A x = b when feasible
    std::vector<double> farkas;  // y with y^T A >= 0 and b^T y < 0 when infeasible
    double objective = 0.0;      // phase-1 optimum (residual infeasibility)
    int iterations = 0;
};

// Decides existence of x >= 0 with A x = b. Phase-1 simplex over artificial
// variables, Bland's rule throughout, so cycling cannot occur. Rows are
// rescaled to unit inf-norm before pivoting; the Farkas vector is mapped back
// to the caller's row scaling.
inline Result feasible_point(const RealMatrix& A_in, const RealVector& b_in, double feas_tol = 1e-9) {
    if (A_in.rows() != b_in.size()) throw Error("feasible_point: row count mismatch");
    const long m_in = A_in.rows();
    const long n = A_in.cols();
    const double pivot_tol = 1e-11;

    Result res;

    // scale rows; drop rows that are identically zero, certify rows with a
    // zero coefficient vector but nonzero right side immediately
    std::vector<long> rows;
    std::vector<double> scale, flip;
    for (long i = 0; i < m_in; ++i) {
        double amax = (n > 0) ? A_in.row(i).cwiseAbs().maxCoeff() : 0.0;
        if (amax < 1e-14) {
            if (std::abs(b_in[i]) > feas_tol) {
                res.status = Status::Infeasible;
                res.farkas.assign(m_in, 0.0);
                res.farkas[i] = -(b_in[i] > 0 ? 1.0 : -1.0);
                res.objective = std::abs(b_in[i]);
                return res;
            }
            continue;
        }
        rows.push_back(i);
        scale.push_back(amax);
        flip.push_back(b_in[i] / amax < 0 ? -1.0 : 1.0);
    }

    const long m = static_cast<long>(rows.size());
    if (m == 0) {
        res.status = Status::Feasible;
        res.x.assign(n, 0.0);
        return res;
    }

    RealMatrix T(m, n + m + 1);  // columns: vars, artificials, rhs
    for (long r = 0; r < m; ++r) {
        double f = flip[r] / scale[r];
        T.row(r).head(n) = f * A_in.row(rows[r]);
        T.row(r).segment(n, m).setZero();
        T(r, n + r) = 1.0;
        T(r, n + m) = f * b_in[rows[r]];
    }

    std::vector<long> basis(m);
    for (long r = 0; r < m; ++r) basis[r] = n + r;

    // phase-1 objective row: minimize the sum of artificials
    RealVector obj = RealVector::Zero(n + m + 1);
    for (long r = 0; r < m; ++r) obj -= T.row(r);
    for (long r = 0; r < m; ++r) obj[n + r] += 1.0;  // cost 1 on each artificial

    const int max_iter = 200000;
    int it = 0;
    for (; it < max_iter; ++it) {
        long enter = -1;
        for (long j = 0; j < n + m; ++j)
            if (obj[j] < -pivot_tol) {
                enter = j;
                break;
            }
        if (enter < 0) break;

        long leave = -1;
        double best_ratio = 0.0;
        for (long r = 0; r < m; ++r) {
            double a = T(r, enter);
            if (a > pivot_tol) {
                double ratio = T(r, n + m) / a;
                if (leave < 0 || ratio < best_ratio - 1e-15 ||
                    (std::abs(ratio - best_ratio) <= 1e-15 && basis[r] < basis[leave])) {
                    leave = r;
                    best_ratio = ratio;
                }
            }
        }
        if (leave < 0) throw Error("feasible_point: phase-1 objective unbounded below");

        double piv = T(leave, enter);
        T.row(leave) /= piv;
        for (long r = 0; r < m; ++r)
            if (r != leave && std::abs(T(r, enter)) > 1e-300) T.row(r) -= T(r, enter) * T.row(leave);
        obj -= obj[enter] * T.row(leave).transpose();
        basis[leave] = enter;
    }
    res.iterations = it;
    if (it >= max_iter) {
        res.status = Status::IterationLimit;
        return res;
    }

    double z = -obj[n + m];  // phase-1 optimum
    res.objective = z;
    if (z < feas_tol) {
        res.status = Status::Feasible;
        res.x.assign(n, 0.0);
        for (long r = 0; r < m; ++r)
            if (basis[r] < n) res.x[basis[r]] = std::max(0.0, T(r, n + m));
        return res;
    }

    // optimal dual of phase 1: y_r = 1 - reduced cost of artificial r, taken
    // against the scaled system; satisfies y^T A' <= 0, y^T b' = z > 0.
    // Negating and undoing the row scaling gives the advertised convention.
    res.status = Status::Infeasible;
    res.farkas.assign(m_in, 0.0);
    for (long r = 0; r < m; ++r) {
        double y = 1.0 - obj[n + r];
        res.farkas[rows[r]] = -y * flip[r] / scale[r];
    }
    return res;
}

}  // namespace sepkit::lp
