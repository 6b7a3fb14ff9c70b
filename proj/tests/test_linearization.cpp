#include "kvwb/builtins.hpp"
#include "kvwb/cones.hpp"
#include "kvwb/linearization.hpp"

#include <catch_amalgamated.hpp>

using namespace kvwb;

namespace {

QVector vec(std::initializer_list<Rational> xs) {
    QVector v(static_cast<Eigen::Index>(xs.size()));
    Eigen::Index i = 0;
    for (const auto& x : xs) v(i++) = x;
    return v;
}

}  // namespace

TEST_CASE("classical trit effect space is the orthant") {
    const auto e = build_effect_space(classical_model(3));
    CHECK(e.dim == 3);
    CHECK(e.unit == vec({1, 1, 1}));
    REQUIRE(e.cone_generators.size() == 3);
    CHECK(e.cone_generators[0] == vec({1, 0, 0}));
    CHECK(e.cone_generators[1] == vec({0, 1, 0}));
    CHECK(e.cone_generators[2] == vec({0, 0, 1}));
}

TEST_CASE("squit effect space coordinates are probabilities on basis states") {
    const Model m = squit_model();
    const auto e = build_effect_space(m);
    CHECK(e.dim == 3);
    CHECK(e.basis_states == std::vector<int>{0, 1, 2});
    // Vertices (p,q) = (1,1), (1,0), (0,1) evaluate x0 to 1, 1, 0.
    CHECK(e.outcome_vector(0) == vec({1, 1, 0}));
    CHECK(e.outcome_vector(3) == vec({0, 1, 0}));
    // In the frame a = x0 - x1: x0 = (u + a) / 2.
    const QVector a = e.outcome_vector(0) - e.outcome_vector(1);
    CHECK(e.outcome_vector(0) == QVector((e.unit + a) / Rational(2)));
    CHECK(e.identifications.empty());
}

TEST_CASE("qubit effect space is the Hermitian 2x2 matrices") {
    const Model m = quantum_model(Field::Complex, 2);
    const auto e = build_effect_space(m);
    CHECK(e.dim == 4);
    REQUIRE(e.operators);
    CHECK(e.operators->matrix(e.unit) == CMatrix::identity(2));
    const auto& q = m.quantum();
    for (int x = 0; x < m.testspace.size(); ++x) CHECK(e.operators->matrix(e.outcome_vector(x)) == q.projectors[static_cast<size_t>(x)]);
}

TEST_CASE("qutrit frame sample spans the Hermitian 3x3 matrices") {
    const auto e = build_effect_space(quantum_model(Field::Complex, 3));
    CHECK(e.dim == 9);
    CHECK(rank(e.outcome_vectors) == 9);
}

TEST_CASE("unit consistency holds on every test of every built-in") {
    for (const auto& name : builtin_names()) {
        const Model m = builtin_model(name);
        const auto e = build_effect_space(m);
        INFO(name);
        for (const auto& t : m.testspace.tests) {
            QVector sum = zero_vector(e.dim);
            for (int x : t) sum += e.outcome_vector(x);
            CHECK(sum == e.unit);
        }
        CHECK(rank(e.outcome_vectors) == e.dim);
    }
}

TEST_CASE("states give functionals that are positive on generators and one on the unit") {
    for (const auto& name : builtin_names()) {
        const Model m = builtin_model(name);
        const auto e = build_effect_space(m);
        INFO(name);
        std::vector<QVector> functionals;
        if (m.is_quantum()) {
            const auto& q = m.quantum();
            for (const auto& p : random_pure_projectors(q.field, q.dim, 5, 99)) functionals.push_back(functional_of_density(e, p));
            const CMatrix mixed = Rational(1, q.dim) * CMatrix::identity(q.dim);
            functionals.push_back(functional_of_density(e, mixed));
        } else {
            for (Eigen::Index v = 0; v < e.state_functionals.cols(); ++v) functionals.push_back(e.state_functionals.col(v));
            // The functional of vertex v reproduces its probabilities.
            for (size_t v = 0; v < m.polytope().extreme.size(); ++v)
                for (int x = 0; x < m.testspace.size(); ++x)
                    CHECK(functionals[v].dot(e.outcome_vector(x)) == m.polytope().extreme[v](x));
        }
        for (const auto& f : functionals) {
            CHECK(f.dot(e.unit) == 1);
            for (const auto& g : e.cone_generators) CHECK(f.dot(g) >= 0);
        }
    }
}

TEST_CASE("quantum state functionals pair as tr(rho P)") {
    const Model m = quantum_model(Field::Complex, 2);
    const auto e = build_effect_space(m);
    const auto rho = random_pure_projectors(Field::Complex, 2, 1, 5).front();
    for (int x = 0; x < m.testspace.size(); ++x) {
        const Rational direct = (rho * m.quantum().projectors[static_cast<size_t>(x)]).trace_re();
        CHECK(functional_of_density(e, rho).dot(e.outcome_vector(x)) == direct);
    }
}

TEST_CASE("cone membership examples") {
    const auto trit = build_effect_space(classical_model(3));
    CHECK(cone_membership(trit, zero_vector(3)));
    CHECK_FALSE(cone_membership(trit, vec({1, -1, 0})));
    CHECK(cone_membership(trit, vec({1, 2, 0})));
    CHECK_THROWS_AS(cone_membership(trit, vec({1, 2})), DimensionMismatch);

    const auto qubit = build_effect_space(quantum_model(Field::Complex, 2));
    CMatrix d = CMatrix::zero(2);
    d.re(0, 0) = Rational(7, 10);
    d.re(1, 1) = Rational(3, 10);
    CHECK(cone_membership(qubit, vector_of_operator(qubit, d)));
    d.re(1, 1) = Rational(-3, 10);
    CHECK_FALSE(cone_membership(qubit, vector_of_operator(qubit, d)));
}

TEST_CASE("linearized morphisms") {
    SECTION("identity") {
        const Model m = squit_model();
        const auto e = build_effect_space(m);
        Morphism id{identity_permutation(4), m.group.permutations};
        CHECK(linearize_morphism(id, e, e) == identity_matrix(3));
        CHECK(validate_morphism(m, m, id).ok());
    }
    SECTION("classical 4 -> 2 collapse sums collapsed coordinates") {
        const Model four = classical_model(4);
        const Model two = classical_model(2);
        const Morphism collapse{{0, 0, 1, 1}, {}};
        QMatrix expected(2, 4);
        expected << 1, 1, 0, 0,
                    0, 0, 1, 1;
        CHECK(linearize_morphism(collapse, build_effect_space(four), build_effect_space(two)) == expected);
        CHECK(validate_morphism(four, two, collapse).ok());
    }
    SECTION("inconsistent extension names a witness") {
        const Model squit = squit_model();
        const Model bit = classical_model(2);
        const Morphism bad{{0, 0, 0, 1}, {}};
        try {
            linearize_morphism(bad, build_effect_space(squit), build_effect_space(bit));
            FAIL("expected InconsistentExtension");
        } catch (const InconsistentExtension& err) {
            CHECK(err.source_outcome >= 0);
            CHECK(err.target_outcome == bad.outcome_map[static_cast<size_t>(err.source_outcome)]);
        }
    }
    SECTION("equivariance violations are reported") {
        const Model m = squit_model();
        Morphism f{identity_permutation(4), {identity_permutation(4), identity_permutation(4)}};
        CHECK(validate_morphism(m, m, f).has("not-equivariant"));
    }
}

TEST_CASE("automorphisms linearize to a representation that permutes generators") {
    for (const std::string name : {"squit", "classical:4", "bitsum"}) {
        const Model m = builtin_model(name);
        const auto e = build_effect_space(m);
        const auto elements = enumerate_group(m.group.permutations, m.testspace.size(), 1000);
        INFO(name);
        for (const auto& g : elements) {
            const QMatrix mg = linearize_permutation(e, g);
            CHECK(QVector(mg * e.unit) == e.unit);
            CHECK(determinant(mg) != 0);
            CHECK(same_rays(e.cone_generators, [&] {
                std::vector<QVector> moved;
                for (const auto& v : e.cone_generators) moved.push_back(mg * v);
                return moved;
            }()));
            for (const auto& h : elements)
                CHECK(linearize_permutation(e, compose(g, h)) == QMatrix(mg * linearize_permutation(e, h)));
        }
    }
}
