#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sepkit/feasibility.hpp"
#include "sepkit/pauli.hpp"
#include "sepkit/tensor.hpp"

namespace sepkit {

// One separable map given by product Kraus operators.
struct SepMap {
    std::vector<LocalOperator> kraus;
    std::vector<std::string> labels;
};

inline Matrix apply_map(const SepMap& map, const Matrix& rho) {
    if (map.kraus.empty()) throw Error("apply_map: empty map");
    Matrix out = Matrix::Zero(rho.rows(), rho.cols());
    for (const LocalOperator& k : map.kraus) {
        Matrix kg = global_matrix(k);
        if (kg.rows() != rho.rows()) throw Error("apply_map: Kraus shape mismatch");
        out += kg * rho * kg.adjoint();
    }
    return out;
}

inline double completeness_residual(const SepMap& map) {
    if (map.kraus.empty()) throw Error("completeness_residual: empty map");
    long d = 1;
    for (int di : map.kraus[0].dims()) d *= di;
    Matrix acc = Matrix::Zero(d, d);
    for (const LocalOperator& k : map.kraus) {
        Matrix kg = global_matrix(k);
        acc += kg.adjoint() * kg;
    }
    return max_abs(acc - Matrix::Identity(d, d));
}

namespace detail {
inline Matrix pauli_matrix(Pauli p) { return PauliString(0, {p}).matrix(); }

inline Matrix half_plus(double a, Pauli p) {
    return 0.5 * Matrix::Identity(2, 2) + a * pauli_matrix(p);
}

inline Matrix rank_one_projector(Pauli p, int sign) {
    return 0.5 * (Matrix::Identity(2, 2) + double(sign) * pauli_matrix(p));
}

inline Matrix principal_sqrt(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(hermitize(m));
    for (long i = 0; i < es.eigenvalues().size(); ++i)
        if (es.eigenvalues()[i] < -1e-12) throw Error("principal_sqrt: matrix not PSD");
    RealVector roots = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * roots.asDiagonal() * es.eigenvectors().adjoint();
}
}  // namespace detail

// h with h^dag h = (1/2 + a Z) x (1/2 + a X) x (1/2 + a Z) x (1/2) x ... on n
// qubit sites, taking principal square roots factor by factor.
inline LocalOperator ring_example_h(int n, double a) {
    if (n < 3) throw Error("ring_example_h needs n >= 3");
    if (!(a > 0.0 && a < 0.5)) throw Error("ring_example_h needs a in (0, 1/2)");
    std::vector<Matrix> fs;
    fs.push_back(detail::principal_sqrt(detail::half_plus(a, Pauli::Z)));
    fs.push_back(detail::principal_sqrt(detail::half_plus(a, Pauli::X)));
    fs.push_back(detail::principal_sqrt(detail::half_plus(a, Pauli::Z)));
    for (int i = 3; i < n; ++i) fs.push_back((1.0 / std::sqrt(2.0)) * Matrix::Identity(2, 2));
    return LocalOperator(std::move(fs));
}

// The four product projectors with Z, X, Z eigenvalue signs multiplying to -1
// on sites 1..3 and identity elsewhere. They annihilate the ring state, whose
// Z1 X2 Z3 correlator is +1.
inline std::vector<LocalOperator> ring_example_projectors(int n) {
    if (n < 3) throw Error("ring_example_projectors needs n >= 3");
    const int signs[4][3] = {{+1, +1, -1}, {+1, -1, +1}, {-1, +1, +1}, {-1, -1, -1}};
    std::vector<LocalOperator> out;
    for (const auto& s : signs) {
        std::vector<Matrix> fs;
        fs.push_back(detail::rank_one_projector(Pauli::Z, s[0]));
        fs.push_back(detail::rank_one_projector(Pauli::X, s[1]));
        fs.push_back(detail::rank_one_projector(Pauli::Z, s[2]));
        for (int i = 3; i < n; ++i) fs.push_back(Matrix::Identity(2, 2));
        out.push_back(LocalOperator(std::move(fs)));
    }
    return out;
}

struct ExampleInstance {
    double a = 0.0;
    PureState psi;
    LocalOperator h;  // the source side g is the identity
    SepMap map;
    PauliGroup group;
};

namespace detail {
inline ExampleInstance build_ring_example(int n, double a) {
    const double a3 = a * a * a;
    const double denom = 0.125 + a3;
    // the two printed coefficient conventions: the 5-site map carries an
    // extra factor 2 on the projector branches and no 1/2 on the plain ones
    const double lead = (n == 5) ? 2.0 : 1.0;
    const double tail = (n == 5) ? 1.0 : 0.5;
    if (n != 3 && n != 5) throw Error("ring example defined for n = 3 and n = 5");

    Graph ring = Graph::ring(n);
    PureState psi = graph_state(ring);
    LocalOperator h = ring_example_h(n, a);
    std::vector<LocalOperator> q = ring_example_projectors(n);

    double c1 = lead * std::sqrt(2 * a3 / ((0.5 + a) * (0.5 + a) * (0.5 - a) * denom));
    double c4 = lead * std::sqrt(2 * a3 / (std::pow(0.5 - a, 3) * denom));
    double c5 = tail * std::sqrt(1.0 / denom);

    std::vector<PauliString> gens = ring_stabilizer_generators(n);
    LocalOperator a1 = gens[0].local_operator();
    LocalOperator a3op = gens[2].local_operator();

    SepMap map;
    for (int j = 0; j < 4; ++j) {
        double c = (j == 3) ? c4 : c1;
        map.kraus.push_back(h.compose(q[j]).scaled(c));
        map.labels.push_back("M" + std::to_string(j + 1));
    }
    LocalOperator m5 = LocalOperator(h).scaled(c5);
    map.kraus.push_back(m5);
    map.kraus.push_back(m5.compose(a1));
    map.kraus.push_back(m5.compose(a3op));
    map.kraus.push_back(m5.compose(a1.compose(a3op)));
    for (int j = 5; j <= 8; ++j) map.labels.push_back("M" + std::to_string(j));

    return ExampleInstance{a, std::move(psi), std::move(h), std::move(map), generate_group(gens)};
}
}  // namespace detail

inline ExampleInstance build_five_qubit_example(double a) { return detail::build_ring_example(5, a); }
inline ExampleInstance build_three_qubit_example(double a) { return detail::build_ring_example(3, a); }

enum class BranchClass { ReachesFinal, Annihilates, Other };

inline std::string to_string(BranchClass c) {
    switch (c) {
        case BranchClass::ReachesFinal: return "reaches-final";
        case BranchClass::Annihilates: return "annihilates";
        default: return "other";
    }
}

struct BranchInfo {
    std::string label;
    double prob = 0.0;
    BranchClass cls = BranchClass::Other;
    double norm = 0.0;  // ||K psi|| before renormalization
};

struct MapVerdict {
    bool deterministic = false;
    double completeness = 0.0;
    double prob_sum = 0.0;        // over branches reaching the final state
    double action_residual = 0.0; // || map(|psi><psi|) - |phi><phi| ||_max
    std::vector<BranchInfo> branches;
};

// Checks that the map takes |initial> to |final> deterministically: every
// branch either lands on the final ray or annihilates, and the surviving
// probabilities sum to 1.
inline MapVerdict verify_sep_map(const SepMap& map, const PureState& initial, const PureState& final_state,
                                 double eps = tol::completeness) {
    if (map.kraus.empty()) throw Error("verify_sep_map: empty map");
    PureState psi = initial.normalized();
    PureState phi = final_state.normalized();
    MapVerdict v;
    v.completeness = completeness_residual(map);
    for (size_t k = 0; k < map.kraus.size(); ++k) {
        BranchInfo info;
        info.label = k < map.labels.size() ? map.labels[k] : "K" + std::to_string(k + 1);
        Vector out = apply_local(map.kraus[k], psi).amps;
        info.norm = out.norm();
        info.prob = info.norm * info.norm;
        if (info.norm < 1e-8) {
            info.cls = BranchClass::Annihilates;
        } else if (std::abs(phi.amps.dot(out)) > (1.0 - tol::collinearity) * info.norm) {
            info.cls = BranchClass::ReachesFinal;
            v.prob_sum += info.prob;
        } else {
            info.cls = BranchClass::Other;
        }
        v.branches.push_back(std::move(info));
    }
    Matrix rho_out = apply_map(map, psi.amps * psi.amps.adjoint());
    v.action_residual = max_abs(rho_out - phi.amps * phi.amps.adjoint());
    bool no_other = true;
    for (const BranchInfo& b : v.branches)
        if (b.cls == BranchClass::Other) no_other = false;
    v.deterministic = no_other && v.completeness < eps && std::abs(v.prob_sum - 1.0) < 1e-9 &&
                      v.action_residual < std::max(eps, 1e-10);
    return v;
}

// Conversion question the example map answers: identity |psi> to h |psi>,
// with the Pauli stabilizer group as the symmetry list.
inline ConversionInstance instance_from_example(const ExampleInstance& ex, bool symmetries_complete) {
    std::vector<LocalOperator> syms;
    syms.reserve(ex.group.elements.size());
    for (const PauliString& p : ex.group.elements) syms.push_back(p.local_operator());
    return ConversionInstance{ex.psi, LocalOperator::identity(ex.psi.dims), ex.h, std::move(syms),
                              symmetries_complete};
}

// The mixture and annihilators certifying the map: weight 1/4 on each of
// 1, A1, A3, A1 A3 and the four projector branches as annihilators.
inline SepWitness witness_from_example(const ExampleInstance& ex) {
    std::vector<PauliString> gens = ring_stabilizer_generators(ex.psi.sites());
    std::vector<PauliString> picks = {PauliString::identity(ex.psi.sites()), gens[0], gens[2],
                                      gens[0] * gens[2]};
    SepWitness w;
    for (const PauliString& p : picks) {
        auto it = std::lower_bound(ex.group.elements.begin(), ex.group.elements.end(), p);
        if (it == ex.group.elements.end() || !(*it == p)) throw Error("witness_from_example: symmetry missing");
        w.syms.push_back(static_cast<int>(it - ex.group.elements.begin()));
        w.probs.push_back(0.25);
    }
    for (int j = 0; j < 4; ++j) w.annihilators.push_back(ex.map.kraus[j]);
    return w;
}

}  // namespace sepkit
