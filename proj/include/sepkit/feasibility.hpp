#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sepkit/pauli.hpp"
#include "sepkit/simplex.hpp"
#include "sepkit/tensor.hpp"

namespace sepkit {

inline double min_singular_ratio(const Matrix& m) {
    Eigen::JacobiSVD<Matrix> svd(m);
    double smax = svd.singularValues()[0];
    if (smax < 1e-300) return 0.0;
    return svd.singularValues()[svd.singularValues().size() - 1] / smax;
}

inline bool is_regular(const LocalOperator& op, double eps = 1e-12) {
    for (const Matrix& f : op.factors)
        if (min_singular_ratio(f) <= eps) return false;
    return true;
}

// One conversion question: can g|psi> be mapped to h|psi>? The symmetry list
// enumerates local operators fixing |psi>; symmetries_complete asserts the
// list is all of them, which is what licenses a hard Infeasible verdict.
struct ConversionInstance {
    PureState psi;
    LocalOperator g;
    LocalOperator h;
    std::vector<LocalOperator> symmetries;
    bool symmetries_complete = false;

    void validate() const {
        const std::vector<int>& d = psi.dims;
        if (g.dims() != d || h.dims() != d) throw Error("instance: g or h factor shape mismatch");
        if (psi.norm() < 1e-300) throw Error("instance: zero state");
        if (symmetries.empty()) throw Error("instance: symmetry list is empty");
        if (!is_regular(g) || !is_regular(h)) throw Error("instance: g and h must have invertible factors");
        PureState unit = psi.normalized();
        bool has_identity = false;
        for (size_t k = 0; k < symmetries.size(); ++k) {
            const LocalOperator& s = symmetries[k];
            if (s.dims() != d) throw Error("instance: symmetry factor shape mismatch");
            PureState moved = apply_local(s, unit);
            if ((moved.amps - unit.amps).norm() > tol::stabilizer)
                throw Error("instance: symmetry " + std::to_string(k) + " does not fix the state");
            if (max_abs(global_matrix(s) - Matrix::Identity(unit.dim(), unit.dim())) < 1e-10)
                has_identity = true;
        }
        if (!has_identity) throw Error("instance: symmetry list must contain the identity");
    }
};

// r = ||h psi||^2 / ||g psi||^2 on the normalized state
inline double norm_ratio(const ConversionInstance& inst) {
    PureState unit = inst.psi.normalized();
    double gn = apply_local(inst.g, unit).amps.squaredNorm();
    double hn = apply_local(inst.h, unit).amps.squaredNorm();
    if (gn < 1e-300) throw Error("norm_ratio: g annihilates the state");
    return hn / gn;
}

struct SepWitness {
    std::vector<double> probs;
    std::vector<int> syms;  // indices into ConversionInstance::symmetries
    std::vector<LocalOperator> annihilators;
};

enum class Verdict { Feasible, Infeasible, Inconclusive };

inline std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::Feasible: return "Feasible";
        case Verdict::Infeasible: return "Infeasible";
        default: return "Inconclusive";
    }
}

struct Obstruction {
    PauliString pauli;
    Complex value;  // tr(P^dag H) - r tr(P^dag G)
};

struct FeasibilityReport {
    Verdict verdict = Verdict::Inconclusive;
    std::optional<SepWitness> witness;
    double residual = 0.0;
    std::vector<Obstruction> obstruction;
    std::vector<double> farkas;
    double farkas_row_min = 0.0;  // min entry of y^T A, rechecked
    double farkas_rhs = 0.0;      // y^T b, rechecked
    double annihilator_weight = 0.0;
    double r = 0.0;
    std::string note;
};

namespace detail {
// real equality rows for sum_k p_k M_k = B over Hermitian matrices: the real
// part of the upper triangle including the diagonal, then the imaginary part
// of the strict upper triangle, row-major in both passes
inline void hermitian_rows(const std::vector<Matrix>& ms, const Matrix& b, RealMatrix& A, RealVector& rhs) {
    long d = b.rows();
    long rows = d * d;
    long cols = static_cast<long>(ms.size());
    A.resize(rows + 1, cols);
    rhs.resize(rows + 1);
    long r = 0;
    for (long i = 0; i < d; ++i)
        for (long j = i; j < d; ++j, ++r) {
            for (long k = 0; k < cols; ++k) A(r, k) = ms[k](i, j).real();
            rhs[r] = b(i, j).real();
        }
    for (long i = 0; i < d; ++i)
        for (long j = i + 1; j < d; ++j, ++r) {
            for (long k = 0; k < cols; ++k) A(r, k) = ms[k](i, j).imag();
            rhs[r] = b(i, j).imag();
        }
    A.row(rows).setOnes();
    rhs[rows] = 1.0;
}
}  // namespace detail

// SEP1 decision: feasibility of p >= 0, sum p = 1,
// sum_k p_k S_k^dag H S_k = r G over the instance's symmetry list.
inline FeasibilityReport sep1_feasible(const ConversionInstance& inst, double eps = tol::feasibility) {
    inst.validate();
    FeasibilityReport rep;
    rep.r = norm_ratio(inst);

    Matrix G = hermitize(global_matrix(inst.g).adjoint() * global_matrix(inst.g));
    Matrix H = hermitize(global_matrix(inst.h).adjoint() * global_matrix(inst.h));
    Matrix target = rep.r * G;

    std::vector<Matrix> cols;
    cols.reserve(inst.symmetries.size());
    for (const LocalOperator& s : inst.symmetries) {
        Matrix sg = global_matrix(s);
        cols.push_back(hermitize(sg.adjoint() * H * sg));
    }

    RealMatrix A;
    RealVector b;
    detail::hermitian_rows(cols, target, A, b);

    lp::Result lp = lp::feasible_point(A, b, eps);
    if (lp.status == lp::Status::IterationLimit) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "simplex iteration limit reached";
        return rep;
    }
    if (lp.status == lp::Status::Feasible) {
        Matrix mix = Matrix::Zero(target.rows(), target.cols());
        SepWitness w;
        for (size_t k = 0; k < cols.size(); ++k) {
            mix += lp.x[k] * cols[k];
            if (lp.x[k] > 1e-12) {
                w.probs.push_back(lp.x[k]);
                w.syms.push_back(static_cast<int>(k));
            }
        }
        rep.residual = max_abs(mix - target);
        rep.witness = std::move(w);
        rep.verdict = rep.residual < 10 * eps ? Verdict::Feasible : Verdict::Inconclusive;
        if (rep.verdict != Verdict::Feasible) rep.note = "LP point failed the independent residual recheck";
        return rep;
    }

    rep.farkas = lp.farkas;
    RealVector y = Eigen::Map<const RealVector>(lp.farkas.data(), static_cast<long>(lp.farkas.size()));
    RealVector yA = A.transpose() * y;
    rep.farkas_row_min = yA.minCoeff();
    rep.farkas_rhs = b.dot(y);
    if (rep.farkas_row_min < -1e-8 || rep.farkas_rhs >= 0) {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "Farkas certificate failed the independent recheck";
        return rep;
    }
    if (inst.symmetries_complete) {
        rep.verdict = Verdict::Infeasible;
    } else {
        rep.verdict = Verdict::Inconclusive;
        rep.note = "no mixture over the given symmetries works, but the list is not declared complete";
    }
    return rep;
}

// Verifies a claimed witness for (1/r) sum_k p_k S_k^dag H S_k
//   + g^dag (sum_q N_q^dag N_q) g = G.
inline FeasibilityReport sep_witness_check(const ConversionInstance& inst, const SepWitness& w,
                                           double eps = tol::feasibility) {
    inst.validate();
    if (w.probs.size() != w.syms.size()) throw Error("witness: probs and syms must align");
    double psum = 0.0;
    for (size_t k = 0; k < w.probs.size(); ++k) {
        if (w.syms[k] < 0 || w.syms[k] >= static_cast<int>(inst.symmetries.size()))
            throw Error("witness: symmetry index out of range");
        if (w.probs[k] < -1e-9) throw Error("witness: negative probability");
        psum += w.probs[k];
    }
    if (std::abs(psum - 1.0) > 1e-6) throw Error("witness: probabilities do not sum to 1");

    FeasibilityReport rep;
    rep.r = norm_ratio(inst);

    Matrix gg = global_matrix(inst.g);
    Matrix G = hermitize(gg.adjoint() * gg);
    Matrix hg = global_matrix(inst.h);
    Matrix H = hermitize(hg.adjoint() * hg);

    Matrix lhs = Matrix::Zero(G.rows(), G.cols());
    for (size_t k = 0; k < w.probs.size(); ++k) {
        Matrix sg = global_matrix(inst.symmetries[w.syms[k]]);
        lhs += (w.probs[k] / rep.r) * (sg.adjoint() * H * sg);
    }

    PureState unit = inst.psi.normalized();
    Vector gpsi = apply_local(inst.g, unit).amps;
    double gnorm = gpsi.norm();
    bool annihilators_ok = true;
    Matrix nsum = Matrix::Zero(G.rows(), G.cols());
    for (size_t q = 0; q < w.annihilators.size(); ++q) {
        const LocalOperator& nq = w.annihilators[q];
        if (nq.dims() != inst.psi.dims) throw Error("witness: annihilator shape mismatch");
        Matrix ng = global_matrix(nq);
        nsum += ng.adjoint() * ng;
        double kill = (ng * gpsi).norm() / gnorm;
        double singular = 1.0;
        for (const Matrix& f : nq.factors) singular = std::min(singular, min_singular_ratio(f));
        if (kill > tol::stabilizer || singular > tol::singular) {
            annihilators_ok = false;
            rep.note = "annihilator " + std::to_string(q) +
                       (kill > tol::stabilizer ? " does not annihilate g|psi>" : " has no singular factor");
        }
    }
    rep.annihilator_weight = (gg.adjoint() * nsum * gg).trace().real();
    lhs += gg.adjoint() * nsum * gg;

    rep.residual = max_abs(hermitize(lhs) - G);
    rep.verdict = (rep.residual < eps && annihilators_ok) ? Verdict::Feasible : Verdict::Infeasible;
    return rep;
}

// For an abelian Pauli symmetry group, conjugation by any member fixes every
// member, so tr(T^dag H) = r tr(T^dag G) is necessary for any mixture. Each
// violating T is returned with its defect.
inline std::vector<Obstruction> pauli_trace_obstruction(const Matrix& H, const PauliGroup& group, double r,
                                                        const Matrix& G, double eps = 1e-9) {
    if (H.rows() != H.cols() || G.rows() != G.cols() || H.rows() != G.rows())
        throw Error("pauli_trace_obstruction: shape mismatch");
    long d = 1L << group.n;
    if (H.rows() != d) throw Error("pauli_trace_obstruction: group site count does not match matrices");
    for (size_t i = 0; i < group.elements.size(); ++i)
        for (size_t j = i + 1; j < group.elements.size(); ++j)
            if (!group.elements[i].commutes_with(group.elements[j]))
                throw Error("pauli_trace_obstruction: group is not abelian");
    std::vector<Obstruction> out;
    for (const PauliString& t : group.elements) {
        Matrix tm = t.matrix();
        Complex v = (tm.adjoint() * H).trace() - r * (tm.adjoint() * G).trace();
        if (std::abs(v) > eps) out.push_back({t, v});
    }
    return out;
}

struct MonotoneReport {
    double trace_g = 0.0;  // tr G / ||g psi||^2
    double trace_h = 0.0;  // tr H / ||h psi||^2
    double scale_g = 0.0;
    double scale_h = 0.0;
    bool monotone_ok = false;   // trace_g >= trace_h, necessary for SEP
    bool equality_case = false; // traces equal: SEP possible only via SEP1
};

// Gram-trace necessary condition for unitary stabilizers. Refuses instances
// whose symmetry list is not unitary.
inline MonotoneReport trace_monotone_check(const ConversionInstance& inst, double eps = 1e-9) {
    inst.validate();
    for (size_t k = 0; k < inst.symmetries.size(); ++k) {
        Matrix sg = global_matrix(inst.symmetries[k]);
        if (max_abs(sg.adjoint() * sg - Matrix::Identity(sg.rows(), sg.cols())) > 1e-8)
            throw Error("trace_monotone_check: symmetry " + std::to_string(k) + " is not unitary");
    }
    PureState unit = inst.psi.normalized();
    MonotoneReport rep;
    rep.scale_g = apply_local(inst.g, unit).amps.squaredNorm();
    rep.scale_h = apply_local(inst.h, unit).amps.squaredNorm();
    if (rep.scale_g < 1e-300 || rep.scale_h < 1e-300) throw Error("trace_monotone_check: g or h annihilates the state");
    Matrix gg = global_matrix(inst.g);
    Matrix hg = global_matrix(inst.h);
    rep.trace_g = (gg.adjoint() * gg).trace().real() / rep.scale_g;
    rep.trace_h = (hg.adjoint() * hg).trace().real() / rep.scale_h;
    rep.monotone_ok = rep.trace_g >= rep.trace_h - eps;
    rep.equality_case = std::abs(rep.trace_g - rep.trace_h) < eps;
    return rep;
}

}  // namespace sepkit
