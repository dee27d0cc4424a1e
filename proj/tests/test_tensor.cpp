#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sepkit/tensor.hpp"

using namespace sepkit;

namespace {

Matrix random_matrix(int r, int c, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = Complex(g(rng), g(rng));
    return m;
}

Vector random_vector(long d, std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Vector v(d);
    for (long i = 0; i < d; ++i) v[i] = Complex(g(rng), g(rng));
    return v;
}

// oracle: entrywise definition of the Kronecker product
Matrix kron_oracle(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (long i = 0; i < out.rows(); ++i)
        for (long j = 0; j < out.cols(); ++j)
            out(i, j) = a(i / b.rows(), j / b.cols()) * b(i % b.rows(), j % b.cols());
    return out;
}

PureState ghz3() {
    Vector v = Vector::Zero(8);
    v[0] = v[7] = 1.0 / std::sqrt(2.0);
    return PureState({2, 2, 2}, v);
}

}  // namespace

TEST_CASE("kron matches the entrywise definition") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 20; ++t) {
        Matrix a = random_matrix(2 + t % 3, 2 + (t / 3) % 3, rng);
        Matrix b = random_matrix(2 + (t / 2) % 2, 3, rng);
        REQUIRE(max_abs(kron(a, b) - kron_oracle(a, b)) < 1e-15);
    }
}

TEST_CASE("kron is associative and respects identities") {
    std::mt19937_64 rng(12);
    Matrix a = random_matrix(2, 2, rng), b = random_matrix(3, 3, rng), c = random_matrix(2, 2, rng);
    REQUIRE(max_abs(kron(kron(a, b), c) - kron(a, kron(b, c))) < 1e-13);
    REQUIRE(max_abs(kron(Matrix::Identity(2, 2), b) - kron_oracle(Matrix::Identity(2, 2), b)) == 0.0);
    REQUIRE(max_abs(kron(a, b) * kron(a.inverse(), b.inverse()) - Matrix::Identity(6, 6)) < 1e-12);
}

TEST_CASE("apply_local agrees with the full Kronecker matrix") {
    std::mt19937_64 rng(13);
    std::vector<int> dims{2, 3, 2};
    for (int t = 0; t < 25; ++t) {
        std::vector<Matrix> fs;
        for (int d : dims) fs.push_back(random_matrix(d, d, rng));
        LocalOperator op(fs);
        PureState psi(dims, random_vector(12, rng));
        Vector expect = global_matrix(op) * psi.amps;
        REQUIRE((apply_local(op, psi).amps - expect).norm() < 1e-12);
    }
}

TEST_CASE("apply_local composes and fixes states under the identity") {
    std::mt19937_64 rng(14);
    std::vector<int> dims{2, 2, 3};
    PureState psi(dims, random_vector(12, rng));
    REQUIRE((apply_local(LocalOperator::identity(dims), psi).amps - psi.amps).norm() == 0.0);

    std::vector<Matrix> f1, f2;
    for (int d : dims) {
        f1.push_back(random_matrix(d, d, rng));
        f2.push_back(random_matrix(d, d, rng));
    }
    LocalOperator op1(f1), op2(f2);
    Vector two_steps = apply_local(op2, apply_local(op1, psi)).amps;
    Vector one_step = apply_local(op2.compose(op1), psi).amps;
    REQUIRE((two_steps - one_step).norm() < 1e-11);
}

TEST_CASE("apply_local rejects mismatched shapes") {
    std::mt19937_64 rng(18);
    PureState psi({2, 2}, random_vector(4, rng));
    REQUIRE_THROWS_AS(apply_local(LocalOperator::identity({2, 2, 2}), psi), Error);
    REQUIRE_THROWS_AS(apply_local(LocalOperator::identity({2, 3}), psi), Error);
}

TEST_CASE("partial_trace on simple states") {
    SECTION("|00> reduces to |0><0|") {
        Vector v = Vector::Zero(4);
        v[0] = 1.0;
        PureState psi({2, 2}, v);
        Matrix rho = partial_trace(psi, {1}).entries;
        Matrix expect = Matrix::Zero(2, 2);
        expect(0, 0) = 1.0;
        REQUIRE(max_abs(rho - expect) < 1e-15);
    }
    SECTION("Bell pair reduces to the maximally mixed state") {
        Vector v = Vector::Zero(4);
        v[0] = v[3] = 1.0 / std::sqrt(2.0);
        PureState bell({2, 2}, v);
        for (int site : {1, 2}) {
            Matrix rho = partial_trace(bell, {site}).entries;
            REQUIRE(max_abs(rho - 0.5 * Matrix::Identity(2, 2)) < 1e-15);
        }
    }
}

TEST_CASE("partial_trace matches an explicit contraction oracle") {
    std::mt19937_64 rng(15);
    std::vector<int> dims{2, 3, 2};
    PureState psi(dims, random_vector(12, rng));

    // keep sites 1 and 3, trace site 2: rho[(i,k),(i',k')] = sum_j a[ijk] conj(a[i'jk'])
    Matrix oracle = Matrix::Zero(4, 4);
    auto idx = [&](long i, long j, long k) { return (i * 3 + j) * 2 + k; };
    for (long i = 0; i < 2; ++i)
        for (long k = 0; k < 2; ++k)
            for (long ip = 0; ip < 2; ++ip)
                for (long kp = 0; kp < 2; ++kp)
                    for (long j = 0; j < 3; ++j)
                        oracle(i * 2 + k, ip * 2 + kp) +=
                            psi.amps[idx(i, j, k)] * std::conj(psi.amps[idx(ip, j, kp)]);
    Matrix got = partial_trace(psi, {1, 3}).entries;
    REQUIRE(max_abs(got - oracle) < 1e-13);
    REQUIRE(max_abs(got - partial_trace(psi, {3, 1}).entries) == 0.0);
}

TEST_CASE("partial_trace outputs are Hermitian PSD with trace ||psi||^2") {
    std::mt19937_64 rng(16);
    std::vector<int> dims{2, 2, 2, 2};
    for (int t = 0; t < 10; ++t) {
        PureState psi(dims, random_vector(16, rng));
        DensityMatrix rho = partial_trace(psi, {2, 4});
        REQUIRE(is_hermitian(rho.entries, 1e-12));
        REQUIRE(std::abs(rho.trace_real() - psi.amps.squaredNorm()) < 1e-12);
        Eigen::SelfAdjointEigenSolver<Matrix> es(rho.entries);
        REQUIRE(es.eigenvalues().minCoeff() > -1e-12);
    }
}

TEST_CASE("partial_trace validates its arguments") {
    PureState psi = ghz3();
    REQUIRE_THROWS_AS(partial_trace(psi, {}), Error);
    REQUIRE_THROWS_AS(partial_trace(psi, {0}), Error);
    REQUIRE_THROWS_AS(partial_trace(psi, {4}), Error);
}

TEST_CASE("reduced ranks and full entanglement") {
    SECTION("GHZ is fully entangled") {
        REQUIRE(reduced_ranks(ghz3()) == std::vector<int>{2, 2, 2});
        REQUIRE(is_fully_entangled(ghz3()));
    }
    SECTION("product states have rank-1 reductions") {
        Vector v = Vector::Zero(8);
        v[3] = 1.0;  // |011>
        PureState psi({2, 2, 2}, v);
        REQUIRE(reduced_ranks(psi) == std::vector<int>{1, 1, 1});
        REQUIRE_FALSE(is_fully_entangled(psi));
    }
    SECTION("|0> x Bell fails only at the product site") {
        Vector v = Vector::Zero(8);
        v[0] = v[3] = 1.0 / std::sqrt(2.0);  // |0>(|00>+|11>)
        PureState psi({2, 2, 2}, v);
        REQUIRE(reduced_ranks(psi) == std::vector<int>{1, 2, 2});
        REQUIRE_FALSE(is_fully_entangled(psi));
    }
}

TEST_CASE("reduced ranks are invariant under local unitaries") {
    std::mt19937_64 rng(17);
    PureState psi = ghz3();
    for (int t = 0; t < 10; ++t) {
        std::vector<Matrix> fs;
        for (int s = 0; s < 3; ++s) {
            Matrix m = random_matrix(2, 2, rng);
            Eigen::HouseholderQR<Matrix> qr(m);
            fs.push_back(Matrix(qr.householderQ()));
        }
        PureState moved = apply_local(LocalOperator(fs), psi);
        REQUIRE(reduced_ranks(moved) == reduced_ranks(psi));
    }
}

TEST_CASE("state constructors validate") {
    REQUIRE_THROWS_AS(PureState({2, 2}, Vector::Zero(3)), Error);
    REQUIRE_THROWS_AS(PureState({}, Vector::Zero(1)), Error);
    REQUIRE_THROWS_AS(PureState({1, 2}, Vector::Zero(2)), Error);
    REQUIRE_THROWS_AS(PureState({2, 2}, Vector::Zero(4)).normalized(), Error);
    REQUIRE_THROWS_AS(reduced_ranks(PureState({2, 2}, Vector::Zero(4))), Error);
    Vector bad(2);
    bad << Complex(std::nan(""), 0), Complex(0, 0);
    REQUIRE_THROWS_AS(PureState({2}, bad), Error);
}
