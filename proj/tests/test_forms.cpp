#include "kvwb/builtins.hpp"
#include "kvwb/forms.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace kvwb;

namespace {

struct Built {
    Model model;
    OrderUnitSpace space;
    LinearGroup group;
};

Built build(const std::string& name) {
    Built b{builtin_model(name), {}, {}};
    b.space = build_effect_space(b.model);
    b.group = linear_group(b.model, b.space);
    return b;
}

QVector flat(const QMatrix& m) {
    return QVector(m.reshaped());
}

// True when every matrix in `forms` lies in the span of `basis` and vice versa.
bool same_span(const std::vector<QMatrix>& forms, const std::vector<QMatrix>& basis) {
    const Eigen::Index n = forms.empty() ? 0 : forms.front().size();
    QMatrix a(n, static_cast<Eigen::Index>(forms.size()));
    QMatrix b(n, static_cast<Eigen::Index>(basis.size()));
    for (size_t i = 0; i < forms.size(); ++i) a.col(static_cast<Eigen::Index>(i)) = flat(forms[i]);
    for (size_t i = 0; i < basis.size(); ++i) b.col(static_cast<Eigen::Index>(i)) = flat(basis[i]);
    QMatrix both(n, a.cols() + b.cols());
    both << a, b;
    return rank(a) == rank(both) && rank(b) == rank(both);
}

}  // namespace

TEST_CASE("invariant forms of the trit under S3 are spanned by identity and all-ones") {
    const auto t = build("classical:3");
    const auto forms = invariant_symmetric_forms(t.group.generators, 3);
    CHECK(forms.size() == 2);
    CHECK(same_span(forms, {identity_matrix(3), QMatrix::Constant(3, 3, Rational(1))}));
}

TEST_CASE("trivial group leaves every symmetric form invariant") {
    for (int d = 1; d <= 4; ++d) CHECK(invariant_symmetric_forms({}, d).size() == static_cast<size_t>(d * (d + 1) / 2));
}

TEST_CASE("squit under D4 has a one-dimensional invariant form space on u-perp") {
    const auto s = build("squit");
    const auto irr = is_irreducible(s.space, s.group);
    CHECK(irr.form_space_dim == 1);
    CHECK(irr.irreducible);
}

TEST_CASE("irreducibility verdicts") {
    for (const std::string name : {"classical:2", "classical:3", "classical:4", "classical:5", "squit", "qubit:real",
                                   "qubit:complex", "qutrit:complex"}) {
        const auto b = build(name);
        INFO(name);
        CHECK(is_irreducible(b.space, b.group).irreducible);
    }
    const auto sum = build("bitsum");
    const auto r = is_irreducible(sum.space, sum.group);
    CHECK_FALSE(r.irreducible);
    CHECK(r.form_space_dim == 3);
}

TEST_CASE("group averaging") {
    const auto t = build("classical:3");
    CHECK(average_form(identity_matrix(3), t.group) == identity_matrix(3));
    QMatrix d = zero_matrix(3, 3);
    d(0, 0) = 1;
    d(1, 1) = 2;
    d(2, 2) = 3;
    // Oracle: the six permutation matrices of S3, averaged by hand.
    QMatrix expected = zero_matrix(3, 3);
    std::vector<int> p = {0, 1, 2};
    do {
        QMatrix pm = zero_matrix(3, 3);
        for (int i = 0; i < 3; ++i) pm(p[static_cast<size_t>(i)], i) = 1;
        expected += pm.transpose() * d * pm;
    } while (std::next_permutation(p.begin(), p.end()));
    expected /= Rational(6);
    const QMatrix avg = average_form(d, t.group);
    CHECK(avg == expected);
    CHECK(avg == QMatrix(identity_matrix(3) * Rational(2)));
    CHECK(average_form(avg, t.group) == avg);

    LinearGroup trivial;
    trivial.elements = std::vector<QMatrix>{identity_matrix(3)};
    CHECK(average_form(d, trivial) == d);

    // Generator-only groups project onto the invariant forms.
    const auto q = build("qubit:complex");
    QMatrix b0 = identity_matrix(4);
    b0(2, 2) = 5;
    const QMatrix proj = average_form(b0, q.group);
    CHECK(check_unitarity(q.group.generators, proj));
    CHECK(average_form(proj, q.group) == proj);
}

TEST_CASE("orthogonalizing SPIN forms") {
    SECTION("classical n-bit gives delta/n") {
        for (int n = 2; n <= 5; ++n) {
            const auto b = build("classical:" + std::to_string(n));
            const auto r = find_orthogonalizing_spin_form(b.model, b.space, b.group);
            CHECK(r.solution_space_dim == 1);
            REQUIRE(r.form);
            CHECK(r.form->matrix == QMatrix(identity_matrix(n) / Rational(n)));
        }
    }
    SECTION("complex qubit gives tr(ab)/2") {
        const auto b = build("qubit:complex");
        const auto r = find_orthogonalizing_spin_form(b.model, b.space, b.group);
        CHECK(r.solution_space_dim == 1);
        REQUIRE(r.form);
        // Oracle: tr(ab)/2 evaluated directly on matrices for every basis pair.
        const auto& ops = *b.space.operators;
        for (int i = 0; i < 4; ++i) {
            for (int j = 0; j < 4; ++j) {
                QVector ei = zero_vector(4), ej = zero_vector(4);
                ei(i) = 1;
                ej(j) = 1;
                const Rational direct = (ops.matrix(ei) * ops.matrix(ej)).trace_re() / 2;
                CHECK(evaluate(r.form->matrix, ei, ej) == direct);
            }
        }
    }
    SECTION("squit gives u(x)u + a(x)a + b(x)b") {
        const auto b = build("squit");
        const auto r = find_orthogonalizing_spin_form(b.model, b.space, b.group);
        CHECK(r.solution_space_dim == 1);
        REQUIRE(r.form);
        const QVector& u = b.space.unit;
        const QVector a = b.space.outcome_vector(0) - b.space.outcome_vector(1);
        const QVector c = b.space.outcome_vector(2) - b.space.outcome_vector(3);
        const QMatrix& f = r.form->matrix;
        CHECK(evaluate(f, u, u) == 1);
        CHECK(evaluate(f, a, a) == 1);
        CHECK(evaluate(f, c, c) == 1);
        CHECK(evaluate(f, u, a) == 0);
        CHECK(evaluate(f, u, c) == 0);
        CHECK(evaluate(f, a, c) == 0);
        CHECK(*r.form->flags.positive_definite);
    }
}

TEST_CASE("returned SPIN forms satisfy every flag independently") {
    for (const auto& name : builtin_names()) {
        const auto b = build(name);
        const auto r = find_orthogonalizing_spin_form(b.model, b.space, b.group);
        INFO(name);
        if (!r.form) continue;
        const QMatrix& f = r.form->matrix;
        CHECK(is_symmetric(f));
        CHECK(evaluate(f, b.space.unit, b.space.unit) == 1);
        for (const auto& x : b.space.cone_generators)
            for (const auto& y : b.space.cone_generators) CHECK(evaluate(f, x, y) >= 0);
        for (const auto& [x, y] : distinguishable_pairs(b.model.testspace))
            CHECK(evaluate(f, b.space.outcome_vector(x), b.space.outcome_vector(y)) == 0);
        for (const auto& m : b.group.generators) CHECK(QMatrix(m.transpose() * f * m) == f);
    }
}

TEST_CASE("uniqueness report") {
    const auto s = build("squit");
    const auto r = check_spin_uniqueness(s.model, s.space, s.group);
    CHECK(r.verdict == "confirmed");
    CHECK(r.eigenvalue_floor > 0);
    const auto q = build("qubit:complex");
    const auto rq = check_spin_uniqueness(q.model, q.space, q.group);
    CHECK(rq.verdict == "confirmed");
    CHECK(rq.eigenvalue_floor > 0);
    const auto sum = build("bitsum");
    CHECK(check_spin_uniqueness(sum.model, sum.space, sum.group).verdict == "hypothesis not met");
}

TEST_CASE("invariance on generators extends to words in the generators") {
    std::mt19937_64 rng(17);
    for (const std::string name : {"squit", "classical:4", "qubit:complex"}) {
        const auto b = build(name);
        const auto r = find_orthogonalizing_spin_form(b.model, b.space, b.group);
        REQUIRE(r.form);
        for (int trial = 0; trial < 10; ++trial) {
            QMatrix word = identity_matrix(b.space.dim);
            const int length = 1 + static_cast<int>(rng() % 6);
            for (int k = 0; k < length; ++k) word = word * b.group.generators[rng() % b.group.generators.size()];
            CHECK(QMatrix(word.transpose() * r.form->matrix * word) == r.form->matrix);
        }
    }
}

TEST_CASE("u-perp does not depend on the invariant inner product") {
    for (const std::string name : {"classical:4", "squit"}) {
        const auto b = build(name);
        std::mt19937_64 rng(5);
        QMatrix c(b.space.dim, b.space.dim);
        for (Eigen::Index i = 0; i < c.size(); ++i) c(i) = static_cast<long>(rng() % 5) - 2;
        const QMatrix pd = QMatrix(c.transpose() * c) + identity_matrix(b.space.dim);
        const QMatrix b1 = average_form(identity_matrix(b.space.dim), b.group);
        const QMatrix b2 = average_form(pd, b.group);
        REQUIRE(is_positive_definite(b2));
        const QMatrix p1 = unit_perp_basis(b.space.unit, b1);
        const QMatrix p2 = unit_perp_basis(b.space.unit, b2);
        QMatrix stacked(b.space.dim, p1.cols() + p2.cols());
        stacked << p1, p2;
        CHECK(rank(stacked) == b.space.dim - 1);
    }
}

TEST_CASE("unitarity") {
    const auto t = build("classical:3");
    CHECK(check_unitarity(t.group.generators, identity_matrix(3)));
    const auto q = build("qubit:complex");
    CHECK(check_unitarity(q.group.generators, QMatrix(q.space.operators->trace_form() / Rational(2))));
    QMatrix shear(2, 2);
    shear << 1, 1, 0, 1;
    CHECK_FALSE(check_unitarity({shear}, identity_matrix(2)));
    CHECK_THROWS_AS(check_unitarity({shear}, zero_matrix(2, 2)), Error);
}
