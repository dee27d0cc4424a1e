#pragma once

#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "sepkit/feasibility.hpp"
#include "sepkit/locc.hpp"
#include "sepkit/pauli.hpp"
#include "sepkit/ring_examples.hpp"
#include "sepkit/tensor.hpp"

namespace sepkit::io {

using json = nlohmann::ordered_json;

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw Error("bad JSON in '" + path + "': " + e.what());
    }
}

inline json complex_json(const Complex& c) { return json::array({c.real(), c.imag()}); }

inline Complex complex_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2) throw Error("complex entries are [re, im] pairs");
    return Complex(j[0].get<double>(), j[1].get<double>());
}

inline json matrix_json(const Matrix& m) {
    json rows = json::array();
    for (long i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (long j = 0; j < m.cols(); ++j) row.push_back(complex_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline Matrix matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty()) throw Error("matrix must be a nonempty array of rows");
    long rows = static_cast<long>(j.size());
    long cols = static_cast<long>(j[0].size());
    Matrix m(rows, cols);
    for (long i = 0; i < rows; ++i) {
        if (static_cast<long>(j[i].size()) != cols) throw Error("matrix rows have uneven length");
        for (long c = 0; c < cols; ++c) m(i, c) = complex_from_json(j[i][c]);
    }
    return m;
}

inline json state_json(const PureState& s) {
    json amps = json::array();
    for (long i = 0; i < s.dim(); ++i) amps.push_back(complex_json(s.amps[i]));
    return json{{"dims", s.dims}, {"amps", std::move(amps)}};
}

inline PureState state_from_json(const json& j) {
    if (!j.contains("dims") || !j.contains("amps")) throw Error("state needs 'dims' and 'amps'");
    std::vector<int> dims = j["dims"].get<std::vector<int>>();
    const json& ja = j["amps"];
    Vector v(static_cast<long>(ja.size()));
    for (long i = 0; i < v.size(); ++i) v[i] = complex_from_json(ja[i]);
    return PureState(std::move(dims), std::move(v));
}

inline json operator_json(const LocalOperator& op) {
    json fs = json::array();
    for (const Matrix& f : op.factors) fs.push_back(matrix_json(f));
    return json{{"factors", std::move(fs)}};
}

inline LocalOperator operator_from_json(const json& j) {
    if (!j.contains("factors")) throw Error("operator needs 'factors'");
    std::vector<Matrix> fs;
    for (const json& f : j["factors"]) fs.push_back(matrix_from_json(f));
    return LocalOperator(std::move(fs));
}

inline json graph_json(const Graph& g) {
    json es = json::array();
    for (auto [i, j] : g.edges) es.push_back(json::array({i, j}));
    return json{{"n", g.n}, {"edges", std::move(es)}};
}

inline Graph graph_from_json(const json& j) {
    if (!j.contains("n") || !j.contains("edges")) throw Error("graph needs 'n' and 'edges'");
    std::vector<std::pair<int, int>> edges;
    for (const json& e : j["edges"]) {
        if (!e.is_array() || e.size() != 2) throw Error("graph edges are [i, j] pairs");
        edges.push_back({e[0].get<int>(), e[1].get<int>()});
    }
    return Graph(j["n"].get<int>(), std::move(edges));
}

inline json witness_json(const SepWitness& w) {
    json anns = json::array();
    for (const LocalOperator& n : w.annihilators) anns.push_back(operator_json(n));
    return json{{"probs", w.probs}, {"syms", w.syms}, {"annihilators", std::move(anns)}};
}

inline SepWitness witness_from_json(const json& j) {
    SepWitness w;
    if (!j.contains("probs") || !j.contains("syms")) throw Error("witness needs 'probs' and 'syms'");
    w.probs = j["probs"].get<std::vector<double>>();
    w.syms = j["syms"].get<std::vector<int>>();
    if (j.contains("annihilators"))
        for (const json& a : j["annihilators"]) w.annihilators.push_back(operator_from_json(a));
    return w;
}

inline json node_json(const LoccNode& node) {
    if (node.is_leaf_marker()) return nullptr;
    json ops = json::array();
    for (const Matrix& m : node.ops) ops.push_back(matrix_json(m));
    json out{{"site", node.site}, {"ops", std::move(ops)}};
    if (!node.corrections.empty()) {
        json cs = json::array();
        for (const auto& corr : node.corrections) {
            json one = json::array();
            for (const Matrix& u : corr) one.push_back(matrix_json(u));
            cs.push_back(std::move(one));
        }
        out["corrections"] = std::move(cs);
    }
    if (!node.children.empty()) {
        json ch = json::array();
        for (const LoccNode& c : node.children) ch.push_back(node_json(c));
        out["children"] = std::move(ch);
    }
    return out;
}

inline LoccNode node_from_json(const json& j) {
    LoccNode node;
    if (j.is_null() || (j.is_object() && j.empty())) return node;  // leaf marker
    if (!j.contains("site") || !j.contains("ops")) throw Error("protocol node needs 'site' and 'ops'");
    node.site = j["site"].get<int>();
    for (const json& m : j["ops"]) node.ops.push_back(matrix_from_json(m));
    if (j.contains("corrections") && !j["corrections"].is_null())
        for (const json& corr : j["corrections"]) {
            std::vector<Matrix> one;
            for (const json& u : corr) one.push_back(matrix_from_json(u));
            node.corrections.push_back(std::move(one));
        }
    if (j.contains("children") && !j["children"].is_null())
        for (const json& c : j["children"]) node.children.push_back(node_from_json(c));
    return node;
}

inline json protocol_json(const LoccProtocol& p) {
    return json{{"dims", p.dims}, {"root", p.root ? node_json(*p.root) : json(nullptr)}};
}

inline LoccProtocol protocol_from_json(const json& j) {
    if (!j.contains("dims")) throw Error("protocol needs 'dims'");
    LoccProtocol p;
    p.dims = j["dims"].get<std::vector<int>>();
    total_dim(p.dims);
    if (j.contains("root") && !j["root"].is_null()) {
        LoccNode root = node_from_json(j["root"]);
        if (!root.is_leaf_marker()) p.root = std::move(root);
    }
    return p;
}

// Conversion instance files. psi is inline amplitudes or a graph; h is an
// explicit operator or the built-in "ring-zxz" family, whose strength can be
// overridden from the command line; symmetries are explicit operators or
// "pauli-stabilizer", meaning the closure of the graph's generators.
struct LoadedInstance {
    ConversionInstance inst;
    std::optional<PauliGroup> group;  // present when symmetries came from a Pauli description
    std::optional<double> a;          // family strength actually used
};

inline LoadedInstance instance_from_json(const json& j, std::optional<double> a_override = std::nullopt) {
    if (!j.contains("psi")) throw Error("instance needs 'psi'");
    std::optional<Graph> graph;
    std::optional<PureState> psi;
    if (j["psi"].is_object() && j["psi"].contains("graph")) {
        graph = graph_from_json(j["psi"]["graph"]);
        psi = graph_state(*graph);
    } else {
        psi = state_from_json(j["psi"]);
    }

    auto op_or_identity = [&](const char* key) {
        if (!j.contains(key) || (j[key].is_string() && j[key] == "identity"))
            return LocalOperator::identity(psi->dims);
        return operator_from_json(j[key]);
    };
    LocalOperator g = op_or_identity("g");

    std::optional<double> a_used;
    std::optional<LocalOperator> h;
    if (j.contains("h") && j["h"].is_object() && j["h"].contains("family")) {
        std::string family = j["h"]["family"].get<std::string>();
        if (family != "ring-zxz") throw Error("unknown h family '" + family + "'");
        if (a_override)
            a_used = *a_override;
        else if (j["h"].contains("a"))
            a_used = j["h"]["a"].get<double>();
        else
            throw Error("family h needs 'a' (or --a)");
        h = ring_example_h(psi->sites(), *a_used);
    } else {
        if (a_override) throw Error("--a applies only to instances whose h is a family");
        h = op_or_identity("h");
    }

    std::vector<LocalOperator> syms;
    std::optional<PauliGroup> group;
    if (j.contains("symmetries") && j["symmetries"].is_string()) {
        if (j["symmetries"] != "pauli-stabilizer")
            throw Error("unknown symmetry description '" + j["symmetries"].get<std::string>() + "'");
        if (!graph) throw Error("'pauli-stabilizer' symmetries need a graph-described psi");
        group = generate_group(graph_stabilizer_generators(*graph));
        for (const PauliString& p : group->elements) syms.push_back(p.local_operator());
    } else if (j.contains("symmetries")) {
        for (const json& s : j["symmetries"]) syms.push_back(operator_from_json(s));
    } else {
        throw Error("instance needs 'symmetries'");
    }

    bool complete = j.value("symmetries_complete", false);
    LoadedInstance out{ConversionInstance{std::move(*psi), std::move(g), std::move(*h), std::move(syms), complete},
                       std::move(group), a_used};
    return out;
}

inline json obstruction_json(const std::vector<Obstruction>& obs) {
    json arr = json::array();
    for (const Obstruction& o : obs) arr.push_back(json::array({o.pauli.str(), complex_json(o.value)}));
    return arr;
}

inline json report_json(const FeasibilityReport& rep) {
    json out;
    out["verdict"] = to_string(rep.verdict);
    out["r"] = rep.r;
    out["residual"] = rep.residual;
    out["witness"] = rep.witness ? witness_json(*rep.witness) : json(nullptr);
    out["obstruction"] = obstruction_json(rep.obstruction);
    out["farkas"] = rep.farkas;
    if (!rep.farkas.empty()) {
        out["farkas_row_min"] = rep.farkas_row_min;
        out["farkas_rhs"] = rep.farkas_rhs;
    }
    out["annihilator_weight"] = rep.annihilator_weight;
    if (!rep.note.empty()) out["note"] = rep.note;
    return out;
}

inline json monotone_json(const MonotoneReport& rep) {
    return json{{"trace_g", rep.trace_g},           {"trace_h", rep.trace_h},
                {"scale_g", rep.scale_g},           {"scale_h", rep.scale_h},
                {"monotone_ok", rep.monotone_ok},   {"equality_case", rep.equality_case}};
}

inline json map_verdict_json(const MapVerdict& v) {
    json branches = json::array();
    for (const BranchInfo& b : v.branches)
        branches.push_back(json{{"label", b.label},
                                {"prob", b.prob},
                                {"class", to_string(b.cls)},
                                {"branch_norm", b.norm}});
    return json{{"deterministic", v.deterministic},
                {"completeness_residual", v.completeness},
                {"prob_sum", v.prob_sum},
                {"action_residual", v.action_residual},
                {"branches", std::move(branches)}};
}

inline json singular_report_json(const SingularBranchReport& rep) {
    return json{{"singular_sites", rep.singular_sites},
                {"case_applies", rep.case_applies},
                {"factor_min_ratios", rep.factor_min_ratios},
                {"branch_norm", rep.branch_norm},
                {"ranks", rep.ranks},
                {"rank_deficient", rep.rank_deficient}};
}

}  // namespace sepkit::io
