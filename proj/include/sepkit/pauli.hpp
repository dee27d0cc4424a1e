#pragma once

#include <array>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "sepkit/tensor.hpp"

namespace sepkit {

enum class Pauli : uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

namespace detail {
// product of single-qubit letters: letter and extra power of i
inline constexpr std::array<std::array<uint8_t, 4>, 4> mul_letter = {{
    {0, 1, 2, 3},
    {1, 0, 3, 2},
    {2, 3, 0, 1},
    {3, 2, 1, 0},
}};
inline constexpr std::array<std::array<uint8_t, 4>, 4> mul_phase = {{
    {0, 0, 0, 0},
    {0, 0, 1, 3},
    {0, 3, 0, 1},
    {0, 1, 3, 0},
}};
inline const char* letter_chars = "IXYZ";
}  // namespace detail

// Tensor product of single-qubit Pauli letters with a global phase i^phase_pow.
// Multiplication is exact integer arithmetic.
struct PauliString {
    int phase_pow = 0;  // exponent of i, mod 4
    std::vector<Pauli> letters;

    PauliString() = default;
    PauliString(int phase, std::vector<Pauli> ls) : phase_pow(((phase % 4) + 4) % 4), letters(std::move(ls)) {
        if (letters.empty()) throw Error("pauli string needs at least one site");
    }

    static PauliString identity(int n) {
        if (n < 1) throw Error("pauli identity needs n >= 1");
        return PauliString(0, std::vector<Pauli>(n, Pauli::I));
    }

    int sites() const { return static_cast<int>(letters.size()); }

    Complex phase() const {
        switch (phase_pow) {
            case 0: return {1, 0};
            case 1: return {0, 1};
            case 2: return {-1, 0};
            default: return {0, -1};
        }
    }

    PauliString operator*(const PauliString& rhs) const {
        if (sites() != rhs.sites()) throw Error("pauli product: site count mismatch");
        PauliString out;
        out.letters.resize(letters.size());
        int pp = phase_pow + rhs.phase_pow;
        for (int i = 0; i < sites(); ++i) {
            auto a = static_cast<uint8_t>(letters[i]);
            auto b = static_cast<uint8_t>(rhs.letters[i]);
            out.letters[i] = static_cast<Pauli>(detail::mul_letter[a][b]);
            pp += detail::mul_phase[a][b];
        }
        out.phase_pow = pp % 4;
        return out;
    }

    bool commutes_with(const PauliString& rhs) const {
        if (sites() != rhs.sites()) throw Error("commutes_with: site count mismatch");
        int anti = 0;
        for (int i = 0; i < sites(); ++i) {
            auto a = letters[i], b = rhs.letters[i];
            if (a != Pauli::I && b != Pauli::I && a != b) ++anti;
        }
        return anti % 2 == 0;
    }

    PauliString adjoint() const {
        // letters are Hermitian; only the phase conjugates
        PauliString out = *this;
        out.phase_pow = (4 - phase_pow) % 4;
        return out;
    }

    std::string str() const {
        static const char* prefix[4] = {"+", "+i", "-", "-i"};
        std::string s = prefix[phase_pow];
        for (Pauli p : letters) s += detail::letter_chars[static_cast<int>(p)];
        return s;
    }

    static PauliString parse(std::string_view text) {
        size_t pos = 0;
        int pp = 0;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            if (text[pos] == '-') pp = 2;
            ++pos;
        }
        if (pos < text.size() && text[pos] == 'i') {
            pp += 1;
            ++pos;
        }
        if (pos >= text.size()) throw Error("pauli parse: no letters in '" + std::string(text) + "'");
        std::vector<Pauli> ls;
        for (; pos < text.size(); ++pos) {
            switch (text[pos]) {
                case 'I': ls.push_back(Pauli::I); break;
                case 'X': ls.push_back(Pauli::X); break;
                case 'Y': ls.push_back(Pauli::Y); break;
                case 'Z': ls.push_back(Pauli::Z); break;
                default: throw Error(std::string("pauli parse: bad letter '") + text[pos] + "'");
            }
        }
        return PauliString(pp, std::move(ls));
    }

    Matrix matrix() const {
        static const Matrix one = (Matrix(2, 2) << 1, 0, 0, 1).finished();
        static const Matrix px = (Matrix(2, 2) << 0, 1, 1, 0).finished();
        static const Matrix py = (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
        static const Matrix pz = (Matrix(2, 2) << 1, 0, 0, -1).finished();
        const Matrix* table[4] = {&one, &px, &py, &pz};
        Matrix m = *table[static_cast<int>(letters[0])];
        for (int i = 1; i < sites(); ++i) m = kron(m, *table[static_cast<int>(letters[i])]);
        return phase() * m;
    }

    LocalOperator local_operator() const {
        std::vector<Matrix> fs;
        fs.reserve(letters.size());
        for (Pauli p : letters) fs.push_back(PauliString(0, {p}).matrix());
        return LocalOperator(std::move(fs)).scaled(phase());
    }

    friend bool operator==(const PauliString& a, const PauliString& b) {
        return a.phase_pow == b.phase_pow && a.letters == b.letters;
    }
    friend bool operator<(const PauliString& a, const PauliString& b) {
        if (a.letters != b.letters) return a.letters < b.letters;
        return a.phase_pow < b.phase_pow;
    }
};

inline void require_qubits(const std::vector<int>& dims) {
    for (int d : dims)
        if (d != 2) throw Error("operation requires qubit sites");
}

// P|psi> by bit arithmetic; site 1 is the most significant bit.
inline PureState apply_pauli(const PauliString& p, const PureState& state) {
    require_qubits(state.dims);
    int n = state.sites();
    if (p.sites() != n) throw Error("apply_pauli: site count mismatch");
    long d = state.dim();
    Vector out = Vector::Zero(d);
    static const Complex iph[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
    for (long a = 0; a < d; ++a) {
        if (state.amps[a] == Complex(0.0)) continue;
        long b = a;
        int pp = p.phase_pow;
        for (int s = 0; s < n; ++s) {
            long bit = (a >> (n - 1 - s)) & 1;
            switch (p.letters[s]) {
                case Pauli::I: break;
                case Pauli::X: b ^= 1L << (n - 1 - s); break;
                case Pauli::Y:
                    b ^= 1L << (n - 1 - s);
                    pp = (pp + 1 + 2 * static_cast<int>(bit)) % 4;
                    break;
                case Pauli::Z: pp = (pp + 2 * static_cast<int>(bit)) % 4; break;
            }
        }
        out[b] += iph[pp] * state.amps[a];
    }
    return PureState(state.dims, std::move(out));
}

struct Graph {
    int n = 0;
    std::vector<std::pair<int, int>> edges;  // 1-based, stored with i < j

    Graph(int n_, std::vector<std::pair<int, int>> edges_) : n(n_) {
        if (n < 1) throw Error("graph needs n >= 1");
        std::set<std::pair<int, int>> seen;
        for (auto [i, j] : edges_) {
            if (i == j) throw Error("graph has a self loop");
            if (i > j) std::swap(i, j);
            if (i < 1 || j > n) throw Error("graph edge out of range");
            if (!seen.insert({i, j}).second) throw Error("graph has a duplicate edge");
        }
        edges.assign(seen.begin(), seen.end());
    }

    static Graph ring(int n) {
        if (n < 3) throw Error("ring graph needs n >= 3");
        std::vector<std::pair<int, int>> es;
        for (int i = 1; i < n; ++i) es.push_back({i, i + 1});
        es.push_back({1, n});
        return Graph(n, std::move(es));
    }

    std::vector<int> neighbors(int v) const {
        std::vector<int> out;
        for (auto [i, j] : edges) {
            if (i == v) out.push_back(j);
            if (j == v) out.push_back(i);
        }
        std::sort(out.begin(), out.end());
        return out;
    }
};

// |G> = prod_{(i,j) in E} CZ_ij |+>^n, so <x|G> = 2^{-n/2} (-1)^{#edges inside x}
inline PureState graph_state(const Graph& g) {
    long d = 1L << g.n;
    double scale = std::pow(2.0, -0.5 * g.n);
    Vector amps(d);
    for (long a = 0; a < d; ++a) {
        int sign = 0;
        for (auto [i, j] : g.edges) {
            long bi = (a >> (g.n - i)) & 1;
            long bj = (a >> (g.n - j)) & 1;
            sign ^= static_cast<int>(bi & bj);
        }
        amps[a] = sign ? -scale : scale;
    }
    return PureState(std::vector<int>(g.n, 2), std::move(amps));
}

// K_v = X_v prod_{w ~ v} Z_w
inline std::vector<PauliString> graph_stabilizer_generators(const Graph& g) {
    std::vector<PauliString> gens;
    gens.reserve(g.n);
    for (int v = 1; v <= g.n; ++v) {
        std::vector<Pauli> ls(g.n, Pauli::I);
        ls[v - 1] = Pauli::X;
        for (int w : g.neighbors(v)) ls[w - 1] = Pauli::Z;
        gens.push_back(PauliString(0, std::move(ls)));
    }
    return gens;
}

// A_i = Z_{i-1} X_i Z_{i+1}, indices cyclic
inline std::vector<PauliString> ring_stabilizer_generators(int n) {
    return graph_stabilizer_generators(Graph::ring(n));
}

struct PauliGroup {
    int n = 0;
    std::vector<PauliString> elements;  // sorted

    bool contains(const PauliString& p) const {
        return std::binary_search(elements.begin(), elements.end(), p);
    }
    size_t size() const { return elements.size(); }
};

// Multiplicative closure of the generators. Generators must commute pairwise.
inline PauliGroup generate_group(const std::vector<PauliString>& gens, int n_sites = -1) {
    int n = n_sites;
    if (!gens.empty()) n = gens[0].sites();
    if (n < 1) throw Error("generate_group: empty generator list needs explicit site count");
    for (size_t i = 0; i < gens.size(); ++i) {
        if (gens[i].sites() != n) throw Error("generate_group: mixed site counts");
        for (size_t j = i + 1; j < gens.size(); ++j)
            if (!gens[i].commutes_with(gens[j]))
                throw Error("generate_group: generators " + gens[i].str() + " and " + gens[j].str() +
                            " do not commute");
    }
    std::set<PauliString> closed;
    closed.insert(PauliString::identity(n));
    std::vector<PauliString> frontier(closed.begin(), closed.end());
    while (!frontier.empty()) {
        std::vector<PauliString> next;
        for (const PauliString& e : frontier)
            for (const PauliString& g : gens) {
                PauliString p = e * g;
                if (closed.insert(p).second) next.push_back(p);
            }
        frontier.swap(next);
        if (closed.size() > (1u << 20)) throw Error("generate_group: closure too large");
    }
    PauliGroup out;
    out.n = n;
    out.elements.assign(closed.begin(), closed.end());
    return out;
}

struct PauliCoefficient {
    std::string pauli;  // 3-letter string, no phase prefix
    Complex value;      // tr(rho P) / 2^3
};

// Extracts the Pauli expansions of the reductions to sites {1,2,3} and
// {1,2,5}; flags whether the Z X Z and X Z Z terms are present. Those two
// terms pin every site of a local symmetry's factors on a 5-site state of
// this shape.
struct ConstraintReport {
    std::vector<PauliCoefficient> rho123;  // nonzero coefficients only
    std::vector<PauliCoefficient> rho125;
    Complex coeff_zxz_123{0, 0};
    Complex coeff_xzz_125{0, 0};
    bool constrained = false;
};

inline ConstraintReport local_unitary_constraint_check(const PureState& state,
                                                       const std::vector<PauliString>& gens,
                                                       double eps = 1e-12) {
    require_qubits(state.dims);
    if (state.sites() != 5) throw Error("constraint check expects a 5-site qubit state");
    PureState psi = state.normalized();
    for (const PauliString& g : gens)
        if ((apply_pauli(g, psi).amps - psi.amps).norm() > tol::stabilizer)
            throw Error("constraint check: generator " + g.str() + " does not stabilize the state");

    ConstraintReport rep;
    auto expand = [&](const std::vector<int>& sites, std::vector<PauliCoefficient>& out,
                      const char* target, Complex& target_val) {
        Matrix rho = partial_trace(psi, sites).entries;
        std::vector<Pauli> ls(3, Pauli::I);
        for (int code = 0; code < 64; ++code) {
            ls[0] = static_cast<Pauli>((code >> 4) & 3);
            ls[1] = static_cast<Pauli>((code >> 2) & 3);
            ls[2] = static_cast<Pauli>(code & 3);
            PauliString p(0, ls);
            Complex c = (rho * p.matrix()).trace() / 8.0;
            std::string name(p.str().substr(1));
            if (name == target) target_val = c;
            if (std::abs(c) > eps) out.push_back({name, c});
        }
    };
    expand({1, 2, 3}, rep.rho123, "ZXZ", rep.coeff_zxz_123);
    expand({1, 2, 5}, rep.rho125, "XZZ", rep.coeff_xzz_125);
    rep.constrained = std::abs(rep.coeff_zxz_123) > eps && std::abs(rep.coeff_xzz_125) > eps;
    return rep;
}

struct OrthogonalityReport {
    std::vector<double> overlaps;  // |<psi| Z^k |psi>| for k = 1 .. 2^n - 1
    double max_overlap = 0.0;
    bool all_orthogonal = false;
};

// Z^k runs over all nonzero Z patterns; Z^k|psi> orthogonal to |psi> for all
// k means the computational-basis diagonal of rho is flat.
inline OrthogonalityReport zk_orthogonality_check(const PureState& state, double eps = 1e-12) {
    require_qubits(state.dims);
    int n = state.sites();
    if (n > 10) throw Error("zk check limited to n <= 10");
    PureState psi = state.normalized();
    OrthogonalityReport rep;
    long d = psi.dim();
    for (long k = 1; k < d; ++k) {
        Complex ov = 0.0;
        for (long a = 0; a < d; ++a) {
            int par = __builtin_parityl(a & k);
            ov += std::conj(psi.amps[a]) * (par ? -psi.amps[a] : psi.amps[a]);
        }
        rep.overlaps.push_back(std::abs(ov));
    }
    rep.max_overlap = *std::max_element(rep.overlaps.begin(), rep.overlaps.end());
    rep.all_orthogonal = rep.max_overlap < eps;
    return rep;
}

// Enumerates all 4 * 4^n phased Pauli strings and keeps those fixing the
// state. Exponential; guarded to n <= 5.
inline std::vector<PauliString> pauli_symmetry_filter(const PureState& state, double eps = tol::stabilizer) {
    require_qubits(state.dims);
    int n = state.sites();
    if (n > 5) throw Error("pauli_symmetry_filter limited to n <= 5");
    PureState psi = state.normalized();
    std::vector<PauliString> hits;
    long combos = 1L << (2 * n);
    for (long code = 0; code < combos; ++code) {
        std::vector<Pauli> ls(n);
        long c = code;
        for (int s = n - 1; s >= 0; --s) {
            ls[s] = static_cast<Pauli>(c & 3);
            c >>= 2;
        }
        PauliString base(0, ls);
        PureState moved = apply_pauli(base, psi);
        for (int pp = 0; pp < 4; ++pp) {
            static const Complex iph[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
            if ((iph[pp] * moved.amps - psi.amps).norm() < eps)
                hits.push_back(PauliString(pp, ls));
        }
    }
    std::sort(hits.begin(), hits.end());
    return hits;
}

}  // namespace sepkit
