#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "sepkit/common.hpp"

namespace sepkit {

inline long total_dim(const std::vector<int>& dims) {
    if (dims.empty()) throw Error("dims must be nonempty");
    long d = 1;
    for (int di : dims) {
        if (di < 2) throw Error("every local dimension must be >= 2");
        d *= di;
        if (d > (1L << 14)) throw Error("total dimension exceeds 2^14");
    }
    return d;
}

// Pure state on an ordered list of sites. Site 1 is the most significant
// factor of the global index (standard Kronecker order).
struct PureState {
    std::vector<int> dims;
    Vector amps;

    PureState(std::vector<int> dims_, Vector amps_)
        : dims(std::move(dims_)), amps(std::move(amps_)) {
        long d = total_dim(dims);
        if (amps.size() != d) throw Error("amplitude length does not match dims");
        if (!amps.allFinite()) throw Error("amplitudes must be finite");
    }

    int sites() const { return static_cast<int>(dims.size()); }
    long dim() const { return amps.size(); }
    double norm() const { return amps.norm(); }
    bool is_normalized(double eps = 1e-9) const { return std::abs(norm() - 1.0) < eps; }

    PureState normalized() const {
        double n = norm();
        if (n < 1e-300) throw Error("cannot normalize the zero state");
        return PureState(dims, amps / n);
    }
};

// Elementwise product operator acting one factor per site.
struct LocalOperator {
    std::vector<Matrix> factors;

    explicit LocalOperator(std::vector<Matrix> factors_) : factors(std::move(factors_)) {
        if (factors.empty()) throw Error("local operator needs at least one factor");
        for (const Matrix& f : factors) {
            if (f.rows() != f.cols() || f.rows() < 2) throw Error("factors must be square, dim >= 2");
            if (!f.allFinite()) throw Error("factor entries must be finite");
        }
    }

    static LocalOperator identity(const std::vector<int>& dims) {
        total_dim(dims);
        std::vector<Matrix> fs;
        fs.reserve(dims.size());
        for (int d : dims) fs.push_back(Matrix::Identity(d, d));
        return LocalOperator(std::move(fs));
    }

    int sites() const { return static_cast<int>(factors.size()); }

    std::vector<int> dims() const {
        std::vector<int> ds;
        ds.reserve(factors.size());
        for (const Matrix& f : factors) ds.push_back(static_cast<int>(f.rows()));
        return ds;
    }

    LocalOperator adjoint() const {
        std::vector<Matrix> fs;
        fs.reserve(factors.size());
        for (const Matrix& f : factors) fs.push_back(f.adjoint());
        return LocalOperator(std::move(fs));
    }

    // this after rhs, factor by factor
    LocalOperator compose(const LocalOperator& rhs) const {
        if (sites() != rhs.sites()) throw Error("compose: site count mismatch");
        std::vector<Matrix> fs;
        fs.reserve(factors.size());
        for (int i = 0; i < sites(); ++i) {
            if (factors[i].cols() != rhs.factors[i].rows()) throw Error("compose: factor dim mismatch");
            fs.push_back(factors[i] * rhs.factors[i]);
        }
        return LocalOperator(std::move(fs));
    }

    LocalOperator scaled(Complex c) const {
        std::vector<Matrix> fs = factors;
        fs[0] *= c;
        return LocalOperator(std::move(fs));
    }
};

struct DensityMatrix {
    Matrix entries;
    long dim() const { return entries.rows(); }
    double trace_real() const { return entries.trace().real(); }
};

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < a.rows(); ++i)
        for (long j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

inline Matrix global_matrix(const LocalOperator& op) {
    Matrix m = op.factors[0];
    for (int i = 1; i < op.sites(); ++i) m = kron(m, op.factors[i]);
    return m;
}

// Applies one factor per site by mode products; never forms the full
// Kronecker matrix.
inline PureState apply_local(const LocalOperator& op, const PureState& state) {
    if (op.sites() != state.sites()) throw Error("apply_local: site count mismatch");
    Vector cur = state.amps;
    long left = 1;
    long right = state.dim();
    for (int s = 0; s < state.sites(); ++s) {
        long d = state.dims[s];
        const Matrix& m = op.factors[s];
        if (m.rows() != d) throw Error("apply_local: factor dim mismatch at site " + std::to_string(s + 1));
        right /= d;
        Vector next = Vector::Zero(cur.size());
        for (long l = 0; l < left; ++l)
            for (long r = 0; r < d; ++r) {
                long out_base = (l * d + r) * right;
                for (long c = 0; c < d; ++c) {
                    Complex mc = m(r, c);
                    if (mc == Complex(0.0)) continue;
                    long in_base = (l * d + c) * right;
                    for (long rr = 0; rr < right; ++rr) next[out_base + rr] += mc * cur[in_base + rr];
                }
            }
        cur.swap(next);
        left *= d;
    }
    return PureState(state.dims, std::move(cur));
}

// Reduction of |psi><psi| to keep_sites (1-based, strictly increasing output
// order regardless of input order).
inline DensityMatrix partial_trace(const PureState& state, std::vector<int> keep_sites) {
    int n = state.sites();
    if (keep_sites.empty()) throw Error("partial_trace: keep at least one site");
    std::sort(keep_sites.begin(), keep_sites.end());
    keep_sites.erase(std::unique(keep_sites.begin(), keep_sites.end()), keep_sites.end());
    for (int s : keep_sites)
        if (s < 1 || s > n) throw Error("partial_trace: site index out of range");

    std::vector<bool> keep(n, false);
    for (int s : keep_sites) keep[s - 1] = true;

    long kdim = 1, rdim = 1;
    for (int i = 0; i < n; ++i) (keep[i] ? kdim : rdim) *= state.dims[i];

    // global index -> (kept digits radix value, traced digits radix value)
    long d = state.dim();
    std::vector<long> kidx(d), ridx(d);
    for (long a = 0; a < d; ++a) {
        long rem = a, k = 0, r = 0;
        long stride = d;
        for (int i = 0; i < n; ++i) {
            stride /= state.dims[i];
            long digit = rem / stride;
            rem %= stride;
            if (keep[i]) k = k * state.dims[i] + digit;
            else r = r * state.dims[i] + digit;
        }
        kidx[a] = k;
        ridx[a] = r;
    }

    Matrix rho = Matrix::Zero(kdim, kdim);
    std::vector<Vector> slices(rdim, Vector::Zero(kdim));
    for (long a = 0; a < d; ++a) slices[ridx[a]][kidx[a]] = state.amps[a];
    for (long r = 0; r < rdim; ++r) rho.noalias() += slices[r] * slices[r].adjoint();
    return DensityMatrix{std::move(rho)};
}

// Ranks of the single-site reductions, each normalized to unit trace first.
inline std::vector<int> reduced_ranks(const PureState& state, double eps = tol::rank) {
    if (state.norm() < 1e-300) throw Error("reduced_ranks: zero state");
    std::vector<int> ranks;
    ranks.reserve(state.sites());
    for (int s = 1; s <= state.sites(); ++s) {
        DensityMatrix rho = partial_trace(state, {s});
        Matrix m = rho.entries / rho.trace_real();
        Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
        int rank = 0;
        for (long i = 0; i < es.eigenvalues().size(); ++i)
            if (es.eigenvalues()[i] > eps) ++rank;
        ranks.push_back(rank);
    }
    return ranks;
}

inline bool is_fully_entangled(const PureState& state, double eps = tol::rank) {
    std::vector<int> ranks = reduced_ranks(state, eps);
    for (int i = 0; i < state.sites(); ++i)
        if (ranks[i] < state.dims[i]) return false;
    return true;
}

}  // namespace sepkit
