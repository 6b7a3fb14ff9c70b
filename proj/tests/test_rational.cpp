#include "kvwb/rational.hpp"

#include <catch_amalgamated.hpp>

#include <Eigen/Eigenvalues>
#include <random>

using namespace kvwb;

namespace {

QMatrix random_matrix(std::mt19937_64& rng, int rows, int cols, int spread) {
    QMatrix m(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) m(i, j) = static_cast<long>(rng() % (2 * spread + 1)) - spread;
    return m;
}

}  // namespace

TEST_CASE("parse_rational accepts fractions, integers and decimals exactly") {
    CHECK(parse_rational("3/6") == Rational(1, 2));
    CHECK(parse_rational("-7") == Rational(-7));
    CHECK(parse_rational("0.25") == Rational(1, 4));
    CHECK(parse_rational("-1.5e-3") == Rational(-3, 2000));
    CHECK(parse_rational("2E2") == Rational(200));
    CHECK(parse_rational("007.50") == Rational(15, 2));
    CHECK_THROWS_AS(parse_rational("1/0"), ParseError);
    CHECK_THROWS_AS(parse_rational("abc"), ParseError);
    CHECK_THROWS_AS(parse_rational(""), ParseError);
}

TEST_CASE("decimal doubles convert through their shortest representation") {
    CHECK(rational_from_decimal_double(0.1) == Rational(1, 10));
    CHECK(rational_from_double(0.5) == Rational(1, 2));
    CHECK(rational_from_double(0.1) != Rational(1, 10));
    CHECK(format_double(0.1) == "0.10000000000000001");
    CHECK(to_string(Rational(-6, 4)) == "-3/2");
}

TEST_CASE("nullspace and rank satisfy rank-nullity on random matrices") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const int rows = 1 + static_cast<int>(rng() % 5);
        const int cols = 1 + static_cast<int>(rng() % 6);
        QMatrix a = random_matrix(rng, rows, cols, 2);
        if (trial % 3 == 0 && rows > 1) a.row(rows - 1) = a.row(0) + a.row(rows - 2);
        const QMatrix n = nullspace(a);
        CHECK(rank(a) + n.cols() == cols);
        CHECK(is_zero(QVector((a * n).reshaped())));
        if (n.cols() > 0) CHECK(rank(n) == n.cols());
    }
}

TEST_CASE("inverse, solve and determinant agree") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 5);
        const QMatrix a = random_matrix(rng, n, n, 3);
        const auto inv = inverse(a);
        CHECK(inv.has_value() == (determinant(a) != 0));
        if (inv) {
            CHECK(QMatrix(a * *inv) == identity_matrix(n));
            const QVector b = random_matrix(rng, n, 1, 3).col(0);
            const auto x = solve(a, b);
            REQUIRE(x);
            CHECK(QVector(a * *x) == b);
        }
    }
}

TEST_CASE("exact positive definiteness matches float eigenvalues") {
    std::mt19937_64 rng(13);
    int positives = 0;
    for (int trial = 0; trial < 60; ++trial) {
        const int n = 1 + static_cast<int>(rng() % 4);
        const QMatrix c = random_matrix(rng, n, n, 2);
        QMatrix s = QMatrix(c.transpose() * c);
        s -= identity_matrix(n) * Rational(static_cast<long>(rng() % 4));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(to_double(s));
        const double floor = eig.eigenvalues().minCoeff();
        if (std::abs(floor) < 1e-9) continue;
        CHECK(is_positive_definite(s) == (floor > 0));
        positives += floor > 0;
    }
    CHECK(positives > 0);
}

TEST_CASE("independent_columns picks the first spanning columns") {
    QMatrix a(2, 4);
    a << 1, 2, 0, 1,
         0, 0, 1, 1;
    CHECK(independent_columns(a) == std::vector<Eigen::Index>{0, 2});
}

TEST_CASE("primitive scales to coprime integers with the same direction") {
    QVector v(3);
    v << Rational(2, 3), Rational(-4, 9), 0;
    QVector p = primitive(v);
    CHECK(p(0) == 3);
    CHECK(p(1) == -2);
    CHECK(p(2) == 0);
}
