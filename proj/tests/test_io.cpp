#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sepkit/io.hpp"

using namespace sepkit;
using io::json;

namespace {

Matrix random_matrix(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

}  // namespace

TEST_CASE("scalar and matrix round-trips are exact") {
    std::mt19937_64 rng(61);
    Complex c(0.1234567890123456, -9.87654321e-7);
    REQUIRE(io::complex_from_json(io::complex_json(c)) == c);

    Matrix m = random_matrix(3, 2, rng);
    Matrix back = io::matrix_from_json(io::matrix_json(m));
    REQUIRE(back.rows() == 3);
    REQUIRE(back.cols() == 2);
    REQUIRE(back == m);

    REQUIRE_THROWS_AS(io::complex_from_json(json::array({1.0})), Error);
    REQUIRE_THROWS_AS(io::matrix_from_json(json::array()), Error);
    json ragged = json::array({json::array({io::complex_json(c)}), json::array()});
    REQUIRE_THROWS_AS(io::matrix_from_json(ragged), Error);
}

TEST_CASE("state, operator, and graph round-trips") {
    std::mt19937_64 rng(62);
    PureState psi = random_fully_entangled_state({2, 3, 2}, rng);
    PureState back = io::state_from_json(io::state_json(psi));
    REQUIRE(back.dims == psi.dims);
    REQUIRE(back.amps == psi.amps);
    REQUIRE_THROWS_AS(io::state_from_json(json{{"dims", {2, 2}}}), Error);

    LocalOperator op({random_matrix(2, 2, rng), random_matrix(3, 3, rng)});
    LocalOperator op_back = io::operator_from_json(io::operator_json(op));
    REQUIRE(op_back.factors.size() == 2);
    REQUIRE(op_back.factors[0] == op.factors[0]);
    REQUIRE(op_back.factors[1] == op.factors[1]);
    REQUIRE_THROWS_AS(io::operator_from_json(json::object()), Error);

    Graph ring = Graph::ring(5);
    Graph g_back = io::graph_from_json(io::graph_json(ring));
    REQUIRE(g_back.n == 5);
    REQUIRE(g_back.edges == ring.edges);
    REQUIRE_THROWS_AS(io::graph_from_json(json{{"n", 3}}), Error);
}

TEST_CASE("witness round-trip keeps annihilators optional") {
    SepWitness w;
    w.probs = {0.25, 0.75};
    w.syms = {0, 3};
    w.annihilators.push_back(LocalOperator::identity({2, 2}));
    SepWitness back = io::witness_from_json(io::witness_json(w));
    REQUIRE(back.probs == w.probs);
    REQUIRE(back.syms == w.syms);
    REQUIRE(back.annihilators.size() == 1);

    json bare{{"probs", {1.0}}, {"syms", {0}}};
    REQUIRE(io::witness_from_json(bare).annihilators.empty());
    REQUIRE_THROWS_AS(io::witness_from_json(json{{"probs", {1.0}}}), Error);
}

TEST_CASE("protocol round-trip preserves the tree") {
    std::mt19937_64 rng(63);
    LoccProtocol proto;
    proto.dims = {2, 2};
    LoccNode root;
    root.site = 1;
    Matrix u = random_unitary(2, rng);
    root.ops = {0.5 * Matrix::Identity(2, 2), (std::sqrt(3.0) / 2.0) * Matrix::Identity(2, 2)};
    root.corrections = {{u, u}, {u.adjoint(), u.adjoint()}};
    LoccNode leaf;
    root.children = {leaf, leaf};
    proto.root = root;

    LoccProtocol back = io::protocol_from_json(io::protocol_json(proto));
    REQUIRE(back.dims == proto.dims);
    REQUIRE(back.root.has_value());
    REQUIRE(back.root->site == 1);
    REQUIRE(back.root->ops[0] == root.ops[0]);
    REQUIRE(back.root->corrections[1][0] == u.adjoint());
    REQUIRE(back.root->children.size() == 2);
    REQUIRE(back.root->children[0].is_leaf_marker());

    LoccProtocol empty;
    empty.dims = {2, 2, 2};
    LoccProtocol empty_back = io::protocol_from_json(io::protocol_json(empty));
    REQUIRE_FALSE(empty_back.root.has_value());
    REQUIRE_THROWS_AS(io::protocol_from_json(json::object()), Error);
}

TEST_CASE("instances load from graphs, families, and inline pieces") {
    json j;
    j["psi"] = {{"graph", io::graph_json(Graph::ring(3))}};
    j["g"] = "identity";
    j["h"] = {{"family", "ring-zxz"}, {"a", 0.25}};
    j["symmetries"] = "pauli-stabilizer";
    j["symmetries_complete"] = true;

    io::LoadedInstance loaded = io::instance_from_json(j);
    REQUIRE(loaded.inst.psi.sites() == 3);
    REQUIRE(loaded.inst.symmetries.size() == 8);
    REQUIRE(loaded.inst.symmetries_complete);
    REQUIRE(loaded.group.has_value());
    REQUIRE(loaded.a == 0.25);
    loaded.inst.validate();

    SECTION("--a overrides the family strength") {
        io::LoadedInstance other = io::instance_from_json(j, 0.1);
        REQUIRE(other.a == 0.1);
        Matrix hh = other.inst.h.factors[1].adjoint() * other.inst.h.factors[1];
        REQUIRE(std::abs(hh(0, 1).real() - 0.1) < 1e-14);
    }
    SECTION("family h without a strength is rejected") {
        j["h"] = {{"family", "ring-zxz"}};
        REQUIRE_THROWS_AS(io::instance_from_json(j), Error);
        REQUIRE(io::instance_from_json(j, 0.3).a == 0.3);
    }
    SECTION("unknown families are rejected") {
        j["h"] = {{"family", "chain-xx"}, {"a", 0.2}};
        REQUIRE_THROWS_AS(io::instance_from_json(j), Error);
    }
    SECTION("--a on an explicit h is rejected") {
        j["h"] = io::operator_json(LocalOperator::identity({2, 2, 2}));
        REQUIRE_THROWS_AS(io::instance_from_json(j, 0.25), Error);
    }
}

TEST_CASE("instance loading validates its inputs") {
    PureState psi = graph_state(Graph::ring(3));
    json j;
    j["psi"] = io::state_json(psi);
    j["symmetries"] = json::array({io::operator_json(LocalOperator::identity({2, 2, 2}))});

    io::LoadedInstance loaded = io::instance_from_json(j);
    REQUIRE_FALSE(loaded.inst.symmetries_complete);  // default
    REQUIRE_FALSE(loaded.group.has_value());
    REQUIRE_FALSE(loaded.a.has_value());
    REQUIRE(loaded.inst.h.factors[0] == Matrix::Identity(2, 2));

    SECTION("pauli-stabilizer symmetries need a graph psi") {
        j["symmetries"] = "pauli-stabilizer";
        REQUIRE_THROWS_AS(io::instance_from_json(j), Error);
    }
    SECTION("missing pieces are reported") {
        j.erase("symmetries");
        REQUIRE_THROWS_AS(io::instance_from_json(j), Error);
        REQUIRE_THROWS_AS(io::instance_from_json(json{{"g", "identity"}}), Error);
    }
    SECTION("unknown symmetry descriptions are rejected") {
        j["symmetries"] = "clifford";
        REQUIRE_THROWS_AS(io::instance_from_json(j), Error);
    }
}

TEST_CASE("report serialization is deterministic") {
    Graph ring = Graph::ring(3);
    PauliGroup group = generate_group(ring_stabilizer_generators(3));
    std::vector<LocalOperator> syms;
    for (const PauliString& p : group.elements) syms.push_back(p.local_operator());
    ConversionInstance inst{graph_state(ring), LocalOperator::identity({2, 2, 2}), ring_example_h(3, 0.25),
                            std::move(syms), true};

    FeasibilityReport rep = sep1_feasible(inst);
    REQUIRE(rep.verdict == Verdict::Infeasible);
    std::string once = io::report_json(rep).dump();
    std::string twice = io::report_json(rep).dump();
    REQUIRE(once == twice);
    REQUIRE(once.find("\"verdict\"") < once.find("\"r\""));
    REQUIRE(once.find("\"r\"") < once.find("\"residual\""));
    REQUIRE(once.find("\"farkas_row_min\"") != std::string::npos);

    json obs = io::obstruction_json(pauli_trace_obstruction(
        global_matrix(inst.h).adjoint() * global_matrix(inst.h), group, rep.r, Matrix::Identity(8, 8)));
    REQUIRE(obs.size() == 2);
    REQUIRE(obs[0][0] == "+III");
}

TEST_CASE("load_json reports unreadable and malformed files") {
    REQUIRE_THROWS_AS(io::load_json("/nonexistent/path.json"), Error);
    std::string path = "malformed_test_tmp.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    REQUIRE_THROWS_AS(io::load_json(path), Error);
    std::remove(path.c_str());
}
