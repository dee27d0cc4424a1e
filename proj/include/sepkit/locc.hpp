#pragma once

#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "sepkit/ring_examples.hpp"
#include "sepkit/tensor.hpp"

namespace sepkit {

// One measurement round. ops act at `site`; corrections (optional, one list
// of per-site unitaries per outcome) are applied after the outcome is known.
// children, when nonempty, holds one continuation per outcome; a node with
// empty ops is a terminator for that outcome.
struct LoccNode {
    int site = 1;
    std::vector<Matrix> ops;
    std::vector<std::vector<Matrix>> corrections;
    std::vector<LoccNode> children;

    bool is_leaf_marker() const { return ops.empty(); }
};

struct LoccProtocol {
    std::vector<int> dims;
    std::optional<LoccNode> root;
};

struct LoccBranch {
    std::string path;  // outcome indices joined by '.'
    double prob = 0.0;
    PureState state;      // normalized when prob > 0, the zero vector otherwise
    LocalOperator kraus;  // accumulated product operator
};

namespace detail {
inline void validate_round(const LoccNode& node, const std::vector<int>& dims, const std::string& path) {
    int n = static_cast<int>(dims.size());
    if (node.site < 1 || node.site > n)
        throw Error("protocol round '" + path + "': site out of range");
    long d = dims[node.site - 1];
    if (node.ops.empty()) throw Error("protocol round '" + path + "': no measurement operators");
    Matrix acc = Matrix::Zero(d, d);
    for (const Matrix& m : node.ops) {
        if (m.rows() != d || m.cols() != d)
            throw Error("protocol round '" + path + "': operator shape mismatch");
        acc += m.adjoint() * m;
    }
    if (max_abs(acc - Matrix::Identity(d, d)) > tol::completeness)
        throw Error("protocol round '" + path + "': measurement is not complete");
    if (!node.corrections.empty() && node.corrections.size() != node.ops.size())
        throw Error("protocol round '" + path + "': corrections do not match outcomes");
    for (const auto& corr : node.corrections) {
        if (corr.size() != static_cast<size_t>(n))
            throw Error("protocol round '" + path + "': correction needs one unitary per site");
        for (int s = 0; s < n; ++s) {
            const Matrix& u = corr[s];
            if (u.rows() != dims[s] || u.cols() != dims[s])
                throw Error("protocol round '" + path + "': correction shape mismatch");
            if (max_abs(u.adjoint() * u - Matrix::Identity(dims[s], dims[s])) > tol::completeness)
                throw Error("protocol round '" + path + "': correction is not unitary");
        }
    }
    if (!node.children.empty() && node.children.size() != node.ops.size())
        throw Error("protocol round '" + path + "': children do not match outcomes");
}

inline LocalOperator round_operator(const LoccNode& node, const std::vector<int>& dims, size_t outcome) {
    std::vector<Matrix> fs;
    fs.reserve(dims.size());
    for (size_t s = 0; s < dims.size(); ++s)
        fs.push_back(static_cast<int>(s) == node.site - 1 ? node.ops[outcome]
                                                          : Matrix::Identity(dims[s], dims[s]));
    LocalOperator step{std::move(fs)};
    if (!node.corrections.empty()) step = LocalOperator{node.corrections[outcome]}.compose(step);
    return step;
}

template <typename Visit>
inline void walk_protocol(const LoccNode& node, const std::vector<int>& dims, const LocalOperator& acc,
                          const std::string& path, Visit&& visit) {
    if (node.is_leaf_marker()) {
        visit(acc, path);
        return;
    }
    validate_round(node, dims, path);
    for (size_t k = 0; k < node.ops.size(); ++k) {
        LocalOperator next = round_operator(node, dims, k).compose(acc);
        std::string next_path = path.empty() ? std::to_string(k) : path + "." + std::to_string(k);
        if (!node.children.empty() && !node.children[k].is_leaf_marker())
            walk_protocol(node.children[k], dims, next, next_path, visit);
        else
            visit(next, next_path);
    }
}
}  // namespace detail

inline std::vector<LoccBranch> run_protocol(const LoccProtocol& proto, const PureState& initial) {
    if (proto.dims != initial.dims) throw Error("run_protocol: dims mismatch");
    PureState psi = initial.normalized();
    std::vector<LoccBranch> out;
    auto emit = [&](const LocalOperator& kraus, const std::string& path) {
        Vector v = apply_local(kraus, psi).amps;
        double p = v.squaredNorm();
        PureState st(psi.dims, p > 1e-24 ? Vector(v / std::sqrt(p)) : Vector(Vector::Zero(v.size())));
        out.push_back(LoccBranch{path, p, std::move(st), kraus});
    };
    if (!proto.root) {
        emit(LocalOperator::identity(proto.dims), "");
        return out;
    }
    detail::walk_protocol(*proto.root, proto.dims, LocalOperator::identity(proto.dims), "", emit);
    double total = 0.0;
    for (const LoccBranch& b : out) total += b.prob;
    if (std::abs(total - 1.0) > 1e-9) throw Error("run_protocol: branch probabilities do not sum to 1");
    return out;
}

struct SingularBranchReport {
    int singular_sites = 0;
    bool case_applies = false;  // exactly one singular factor
    std::vector<double> factor_min_ratios;
    double branch_norm = 0.0;
    std::vector<int> ranks;
    bool rank_deficient = false;
};

// On a fully entangled state, one singular factor yields a branch that still
// has positive norm but a strictly rank-deficient reduction at that site.
inline SingularBranchReport singular_branch_analysis(const LocalOperator& op, const PureState& state) {
    if (op.dims() != state.dims) throw Error("singular_branch_analysis: dims mismatch");
    if (!is_fully_entangled(state)) throw Error("singular_branch_analysis: state is not fully entangled");
    PureState psi = state.normalized();
    SingularBranchReport rep;
    for (const Matrix& f : op.factors) {
        double ratio = min_singular_ratio(f);
        rep.factor_min_ratios.push_back(ratio);
        if (ratio <= tol::singular) ++rep.singular_sites;
    }
    rep.case_applies = rep.singular_sites == 1;
    Vector v = apply_local(op, psi).amps;
    rep.branch_norm = v.norm();
    if (rep.branch_norm > 1e-12) {
        PureState branch(psi.dims, v / rep.branch_norm);
        rep.ranks = reduced_ranks(branch);
        for (int s = 0; s < branch.sites(); ++s)
            if (rep.ranks[s] < branch.dims[s]) rep.rank_deficient = true;
    }
    return rep;
}

struct FlattenResult {
    std::optional<SepMap> map;
    double completeness = 0.0;
    std::string refusal;  // nonempty when the protocol was rejected

    bool refused() const { return !refusal.empty(); }
};

// Collapses a protocol whose measurement operators are all invertible into a
// one-shot separable map. Any singular operator aborts the flattening: those
// rounds leave the regular regime this reduction covers.
inline FlattenResult regular_protocol_to_sep1(const LoccProtocol& proto) {
    FlattenResult res;
    if (proto.dims.empty()) throw Error("regular_protocol_to_sep1: protocol has no dims");
    total_dim(proto.dims);
    SepMap map;
    if (proto.root) {
        std::string refusal;
        std::function<void(const LoccNode&, const std::string&)> scan = [&](const LoccNode& node,
                                                                            const std::string& path) {
            if (node.is_leaf_marker() || !refusal.empty()) return;
            detail::validate_round(node, proto.dims, path);
            for (size_t k = 0; k < node.ops.size(); ++k) {
                double ratio = min_singular_ratio(node.ops[k]);
                if (ratio <= tol::singular) {
                    refusal = "singular measurement operator at round '" + (path.empty() ? "root" : path) +
                              "', outcome " + std::to_string(k) + " (min singular ratio " +
                              std::to_string(ratio) + ")";
                    return;
                }
            }
            if (node.children.empty()) return;
            for (size_t k = 0; k < node.children.size(); ++k)
                scan(node.children[k], path.empty() ? std::to_string(k) : path + "." + std::to_string(k));
        };
        scan(*proto.root, "");
        if (!refusal.empty()) {
            res.refusal = std::move(refusal);
            return res;
        }
        auto collect = [&](const LocalOperator& kraus, const std::string& path) {
            map.kraus.push_back(kraus);
            map.labels.push_back(path.empty() ? "id" : path);
        };
        detail::walk_protocol(*proto.root, proto.dims, LocalOperator::identity(proto.dims), "", collect);
    } else {
        map.kraus.push_back(LocalOperator::identity(proto.dims));
        map.labels.push_back("id");
    }
    res.completeness = completeness_residual(map);
    res.map = std::move(map);
    return res;
}

inline Matrix random_unitary(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
    Eigen::HouseholderQR<Matrix> qr(m);
    Matrix q = qr.householderQ();
    Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int i = 0; i < d; ++i) {
        Complex di = r(i, i);
        q.col(i) *= di / std::abs(di);
    }
    return q;
}

inline PureState random_fully_entangled_state(const std::vector<int>& dims, std::mt19937_64& rng) {
    long d = total_dim(dims);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int attempt = 0; attempt < 64; ++attempt) {
        Vector v(d);
        for (long i = 0; i < d; ++i) v[i] = Complex(gauss(rng), gauss(rng));
        PureState psi(dims, v);
        psi = psi.normalized();
        if (is_fully_entangled(psi)) return psi;
    }
    throw Error("random_fully_entangled_state: rejection sampling failed");
}

// Invertible factors everywhere except `site` (1-based), which gets exactly
// one vanishing singular value.
inline LocalOperator random_one_site_singular_operator(const std::vector<int>& dims, int site,
                                                       std::mt19937_64& rng) {
    int n = static_cast<int>(dims.size());
    if (site < 1 || site > n) throw Error("random_one_site_singular_operator: site out of range");
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.5, 1.5);
    auto gaussian_matrix = [&](int d) {
        Matrix m(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m(i, j) = Complex(gauss(rng), gauss(rng));
        return m;
    };
    std::vector<Matrix> fs;
    for (int s = 1; s <= n; ++s) {
        int d = dims[s - 1];
        if (s == site) {
            Matrix u = random_unitary(d, rng), v = random_unitary(d, rng);
            RealVector sv(d);
            for (int i = 0; i + 1 < d; ++i) sv[i] = unif(rng);
            sv[d - 1] = 0.0;
            fs.push_back(u * sv.asDiagonal() * v.adjoint());
        } else {
            Matrix m = gaussian_matrix(d);
            while (min_singular_ratio(m) < 1e-3) m = gaussian_matrix(d);
            fs.push_back(m);
        }
    }
    return LocalOperator(std::move(fs));
}

}  // namespace sepkit
