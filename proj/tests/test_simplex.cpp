#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "sepkit/simplex.hpp"

using namespace sepkit;

namespace {

void require_valid_solution(const lp::Result& res, const RealMatrix& A, const RealVector& b) {
    REQUIRE(res.status == lp::Status::Feasible);
    RealVector x = Eigen::Map<const RealVector>(res.x.data(), static_cast<long>(res.x.size()));
    for (double xi : res.x) REQUIRE(xi >= -1e-12);
    REQUIRE((A * x - b).cwiseAbs().maxCoeff() < 1e-8);
}

void require_valid_farkas(const lp::Result& res, const RealMatrix& A, const RealVector& b) {
    REQUIRE(res.status == lp::Status::Infeasible);
    REQUIRE(res.farkas.size() == static_cast<size_t>(A.rows()));
    RealVector y = Eigen::Map<const RealVector>(res.farkas.data(), static_cast<long>(res.farkas.size()));
    REQUIRE((A.transpose() * y).minCoeff() > -1e-9);
    REQUIRE(b.dot(y) < 0.0);
}

}  // namespace

TEST_CASE("one-row systems") {
    RealMatrix A(1, 2);
    A << 1, 1;
    RealVector b(1);
    b << 1;
    require_valid_solution(lp::feasible_point(A, b), A, b);

    b << -1;  // x1 + x2 = -1 has no nonnegative solution
    require_valid_farkas(lp::feasible_point(A, b), A, b);
}

TEST_CASE("unique interior solution is found") {
    RealMatrix A(2, 2);
    A << 1, 1, 1, -1;
    RealVector b(2);
    b << 1, 0.2;  // x = (0.6, 0.4)
    lp::Result res = lp::feasible_point(A, b);
    require_valid_solution(res, A, b);
    REQUIRE(std::abs(res.x[0] - 0.6) < 1e-9);
    REQUIRE(std::abs(res.x[1] - 0.4) < 1e-9);
}

TEST_CASE("inconsistent pair is certified infeasible") {
    RealMatrix A(2, 2);
    A << 1, -1, 1, 1;
    RealVector b(2);
    b << 3, 1;  // forces x2 = -1
    require_valid_farkas(lp::feasible_point(A, b), A, b);
}

TEST_CASE("zero rows are dropped or certified") {
    RealMatrix A(2, 2);
    A << 0, 0, 1, 1;
    RealVector b(2);
    b << 0, 1;
    require_valid_solution(lp::feasible_point(A, b), A, b);

    b << 0.5, 1;  // 0 = 0.5 is impossible
    require_valid_farkas(lp::feasible_point(A, b), A, b);
}

TEST_CASE("duplicated consistent rows stay feasible, contradictory ones do not") {
    RealMatrix A(3, 2);
    A << 1, 2, 1, 2, 1, 0;
    RealVector b(3);
    b << 2, 2, 1;
    require_valid_solution(lp::feasible_point(A, b), A, b);

    b << 2, 3, 1;  // same left side, different right sides
    require_valid_farkas(lp::feasible_point(A, b), A, b);
}

TEST_CASE("constructed-feasible random systems always solve") {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int t = 0; t < 50; ++t) {
        int m = 4 + t % 5, n = m + 3 + t % 4;
        RealMatrix A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = gauss(rng);
        RealVector xstar(n);
        for (int j = 0; j < n; ++j) xstar[j] = unif(rng);
        RealVector b = A * xstar;
        require_valid_solution(lp::feasible_point(A, b), A, b);
    }
}

TEST_CASE("cone-separated random systems are certified infeasible") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> pos(0.1, 2.0);
    for (int t = 0; t < 30; ++t) {
        int m = 3 + t % 3, n = 5;
        RealMatrix A(m, n);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j < n; ++j) A(i, j) = pos(rng);
        RealVector b(m);
        for (int i = 0; i < m; ++i) b[i] = pos(rng);
        b[t % m] = -pos(rng);  // a nonnegative combination cannot reach below zero
        require_valid_farkas(lp::feasible_point(A, b), A, b);
    }
}

TEST_CASE("shape mismatches throw") {
    RealMatrix A(2, 2);
    A.setOnes();
    RealVector b(3);
    b.setOnes();
    REQUIRE_THROWS_AS(lp::feasible_point(A, b), Error);
}
