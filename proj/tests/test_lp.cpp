#include "kvwb/lp.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace kvwb;

namespace {

// Optimal value by enumerating every basic feasible solution.
std::optional<Rational> brute_force_min(const QMatrix& a, const QVector& b, const QVector& c) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    std::optional<Rational> best;
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
        std::vector<int> cols;
        for (int j = 0; j < n; ++j)
            if (mask & (1u << j)) cols.push_back(j);
        if (static_cast<int>(cols.size()) > m) continue;
        QMatrix sub(m, static_cast<Eigen::Index>(cols.size()));
        for (size_t k = 0; k < cols.size(); ++k) sub.col(static_cast<Eigen::Index>(k)) = a.col(cols[k]);
        if (rank(sub) != sub.cols()) continue;
        auto x = solve(sub, b);
        if (!x) continue;
        bool feasible = true;
        Rational value = 0;
        for (size_t k = 0; k < cols.size(); ++k) {
            feasible = feasible && (*x)(static_cast<Eigen::Index>(k)) >= 0;
            value += c(cols[k]) * (*x)(static_cast<Eigen::Index>(k));
        }
        if (feasible && (!best || value < *best)) best = value;
    }
    return best;
}

}  // namespace

TEST_CASE("simplex optimum matches basic-solution enumeration on bounded random LPs") {
    std::mt19937_64 rng(3);
    int feasible = 0;
    int infeasible = 0;
    for (int trial = 0; trial < 80; ++trial) {
        const int m = 1 + static_cast<int>(rng() % 3);
        const int n = m + 1 + static_cast<int>(rng() % 3);
        QMatrix a(m, n);
        QVector b(m), c(n);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) = static_cast<long>(rng() % 7) - 3;
            b(i) = static_cast<long>(rng() % 7) - 3;
        }
        // Bound the feasible region: add a row sum(x) + s = 5 through the last column.
        a.conservativeResize(m + 1, n);
        for (int j = 0; j < n; ++j) a(m, j) = 1;
        b.conservativeResize(m + 1);
        b(m) = 5;
        for (int j = 0; j < n; ++j) c(j) = static_cast<long>(rng() % 9) - 4;

        const auto expected = brute_force_min(a, b, c);
        const auto result = solve_standard_lp(a, b, c);
        if (expected) {
            ++feasible;
            REQUIRE(result.status == LpStatus::Optimal);
            CHECK(result.objective == *expected);
            CHECK(QVector(a * result.x) == b);
            for (int j = 0; j < n; ++j) CHECK(result.x(j) >= 0);
        } else {
            ++infeasible;
            REQUIRE(result.status == LpStatus::Infeasible);
            const QVector yta = a.transpose() * result.farkas;
            for (int j = 0; j < n; ++j) CHECK(yta(j) >= 0);
            CHECK(result.farkas.dot(b) < 0);
        }
    }
    CHECK(feasible > 10);
    CHECK(infeasible > 5);
}

TEST_CASE("unbounded problems are reported") {
    QMatrix a(1, 2);
    a << 1, -1;
    QVector b(1), c(2);
    b << 0;
    c << -1, 0;
    CHECK(solve_standard_lp(a, b, c).status == LpStatus::Unbounded);
}

TEST_CASE("LinearProgram handles free variables and mixed senses") {
    // max x + y  s.t.  x - y <= 1,  x + 2y <= 4,  y >= -3,  x free.
    LinearProgram lp;
    const int x = lp.add_variable(true);
    const int y = lp.add_variable(true);
    lp.add_constraint({{x, 1}, {y, -1}}, Sense::LessEqual, 1);
    lp.add_constraint({{x, 1}, {y, 2}}, Sense::LessEqual, 4);
    lp.add_constraint({{y, 1}}, Sense::GreaterEqual, -3);
    lp.set_objective({{x, 1}, {y, 1}}, true);
    const auto sol = lp.solve();
    REQUIRE(sol.status == LpStatus::Optimal);
    CHECK(sol.values(x) == 2);
    CHECK(sol.values(y) == 1);
    CHECK(sol.objective == 3);
}

TEST_CASE("equality with negative right-hand side keeps a valid Farkas sign") {
    // x1 + x2 = -1 with x >= 0 is infeasible.
    QMatrix a(1, 2);
    a << 1, 1;
    QVector b(1);
    b << -1;
    const auto r = find_feasible_point(a, b);
    REQUIRE(r.status == LpStatus::Infeasible);
    CHECK(QVector(a.transpose() * r.farkas)(0) >= 0);
    CHECK(r.farkas.dot(b) < 0);
}
