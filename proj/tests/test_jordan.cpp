#include "kvwb/builtins.hpp"
#include "kvwb/forms.hpp"
#include "kvwb/jordan.hpp"

#include <catch_amalgamated.hpp>

#include <random>

using namespace kvwb;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::VectorXd random_element(std::mt19937_64& rng, int dim) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v(i) = u(rng);
    return v;
}

std::vector<JordanAlgebra> catalog() {
    std::vector<JordanAlgebra> out;
    for (int n = 1; n <= 4; ++n) out.push_back(real_symmetric(n));
    for (int n = 1; n <= 3; ++n) out.push_back(complex_hermitian(n));
    out.push_back(quaternion_hermitian(2));
    for (int n = 1; n <= 6; ++n) out.push_back(spin_factor(n));
    return out;
}

struct Setup {
    Model model;
    OrderUnitSpace space;
    LinearGroup group;
    QMatrix form;
};

Setup setup(const std::string& name) {
    Setup s{builtin_model(name), {}, {}, {}};
    s.space = build_effect_space(s.model);
    s.group = linear_group(s.model, s.space);
    const auto spin = find_orthogonalizing_spin_form(s.model, s.space, s.group);
    REQUIRE(spin.form);
    s.form = spin.form->matrix;
    return s;
}

// (AB + BA)/2 computed on the Hermitian matrices behind the coordinates.
QVector symmetrized_product(const OperatorBasis& ops, const QVector& a, const QVector& b) {
    const CMatrix ma = ops.matrix(a), mb = ops.matrix(b);
    return ops.coordinates(Rational(1, 2) * (ma * mb + mb * ma));
}

QVector unit_vector(int dim, int i) {
    QVector e = zero_vector(dim);
    e(i) = 1;
    return e;
}

}  // namespace

TEST_CASE("catalog algebras are exact Jordan algebras", "[jordan]") {
    for (const auto& j : catalog()) {
        INFO(j.name());
        REQUIRE(j.is_exact());
        const auto c = check_jordan_identity(j);
        CHECK(c.commutative);
        CHECK(c.unital);
        CHECK(c.exact_identity == true);
        CHECK(c.residual <= 1e-12);
        CHECK(is_positive_definite(exact_trace_form(j)));
    }
    CHECK(real_symmetric(3).dim == 6);
    CHECK(complex_hermitian(3).dim == 9);
    CHECK(quaternion_hermitian(2).dim == 6);
    CHECK(quaternion_hermitian(3).dim == 15);
    CHECK(spin_factor(4).dim == 5);
    CHECK(direct_sum({real_symmetric(1), spin_factor(2)}).dim == 4);
}

TEST_CASE("products on small examples", "[jordan]") {
    const auto rs2 = real_symmetric(2);
    // Coordinates: diag entries, then the off-diagonal unit.
    QVector d10(3);
    d10 << Rational(1), Rational(0), Rational(0);
    CHECK(jordan_product(rs2, d10, d10) == d10);

    const auto sf2 = spin_factor(2);
    QVector e1(3), unit_component(3);
    e1 << Rational(1), Rational(0), Rational(0);
    unit_component << Rational(0), Rational(0), Rational(1);
    CHECK(jordan_product(sf2, e1, e1) == unit_component);

    std::mt19937_64 rng(3);
    for (const auto& j : catalog()) {
        const Eigen::VectorXd a = random_element(rng, j.dim);
        CHECK((jordan_product(j, j.unit, a) - a).norm() <= 1e-12);
        const Eigen::VectorXd b = random_element(rng, j.dim);
        CHECK((jordan_product(j, a, b) - jordan_product(j, b, a)).norm() <= 1e-12);
    }
}

TEST_CASE("quadratic representation", "[jordan]") {
    for (const auto& j : catalog()) CHECK((quadratic_rep(j, j.unit) - Eigen::MatrixXd::Identity(j.dim, j.dim)).norm() <= 1e-12);
    const auto rs2 = real_symmetric(2);
    Eigen::VectorXd a(3), expected(3);
    a << 2, 1, 0;
    expected << 4, 1, 0;
    CHECK((quadratic_rep(rs2, a) * rs2.unit - expected).norm() <= 1e-12);

    // P(a) x = a x a against explicit matrices.
    Eigen::VectorXd b(3), x(3);
    b << 1, -2, 0.5;
    x << 0.3, 0.7, -1.1;
    Eigen::Matrix2d mb, mx;
    mb << 1, 0.5, 0.5, -2;
    mx << 0.3, -1.1, -1.1, 0.7;
    const Eigen::Matrix2d out = mb * mx * mb;
    const Eigen::VectorXd got = quadratic_rep(rs2, b) * x;
    CHECK_THAT(got(0), WithinAbs(out(0, 0), 1e-12));
    CHECK_THAT(got(1), WithinAbs(out(1, 1), 1e-12));
    CHECK_THAT(got(2), WithinAbs(out(0, 1), 1e-12));
}

TEST_CASE("cone of squares membership", "[jordan]") {
    for (const auto& j : catalog()) CHECK(cone_of_squares_membership(j, j.unit));
    Eigen::VectorXd d(3);
    d << 1, -1, 0;
    CHECK_FALSE(cone_of_squares_membership(real_symmetric(2), d));
    Eigen::VectorXd inside(4), outside(4);
    inside << 0.6, 0, 0, 1;
    outside << 1.2, 0, 0, 1;
    CHECK(cone_of_squares_membership(spin_factor(3), inside));
    CHECK_FALSE(cone_of_squares_membership(spin_factor(3), outside));
    const auto sum = direct_sum({spin_factor(2), real_symmetric(1)});
    Eigen::VectorXd mixed(4);
    mixed << 0.5, 0, 1, -0.1;
    CHECK_FALSE(cone_of_squares_membership(sum, mixed));
    mixed(3) = 0.1;
    CHECK(cone_of_squares_membership(sum, mixed));
}

TEST_CASE("spectral decompositions rebuild the element", "[jordan][property]") {
    std::mt19937_64 rng(11);
    auto all = catalog();
    all.push_back(direct_sum({real_symmetric(2), spin_factor(3)}));
    for (const auto& j : all) {
        INFO(j.name());
        for (int s = 0; s < 5; ++s) {
            const Eigen::VectorXd a = random_element(rng, j.dim);
            const auto sd = spectral_decomposition(j, a);
            REQUIRE(sd.ok);
            Eigen::VectorXd rebuilt = Eigen::VectorXd::Zero(j.dim), total = Eigen::VectorXd::Zero(j.dim);
            for (size_t i = 0; i < sd.eigenvalues.size(); ++i) {
                rebuilt += sd.eigenvalues[i] * sd.idempotents[i];
                total += sd.idempotents[i];
                const auto& c = sd.idempotents[i];
                CHECK((jordan_product(j, c, c) - c).norm() <= 1e-9);
            }
            CHECK((rebuilt - a).norm() <= 1e-9);
            CHECK((total - j.unit).norm() <= 1e-9);
        }
    }
}

TEST_CASE("catalog cones are symmetric", "[jordan]") {
    for (const auto& j : catalog()) {
        INFO(j.name());
        const auto r = verify_symmetric_cone(j, 50, 42);
        CHECK(r.identity_gate);
        CHECK(r.self_dual);
        CHECK(r.homogeneous);
        CHECK(r.max_sqrt_error <= 1e-9);
        CHECK(r.formally_real);
        CHECK(r.pass);
        CHECK(r.failure.empty());
    }
}

TEST_CASE("corrupted product fails the identity gate first", "[jordan]") {
    auto j = real_symmetric(2);
    j.exact_structure[0](2, 2) += 1;
    j.structure[0](2, 2) += 1;
    const auto r = verify_symmetric_cone(j, 50, 42);
    CHECK_FALSE(r.identity_gate);
    CHECK_FALSE(r.pass);
    CHECK(r.failure == "Jordan identity gate");
    CHECK(r.min_pairing == 0);
    CHECK(r.max_sqrt_error == 0);
}

TEST_CASE("power associativity and trace-form associativity", "[jordan][property]") {
    std::mt19937_64 rng(5);
    for (const auto& j : catalog()) {
        INFO(j.name());
        for (int s = 0; s < 10; ++s) {
            const Eigen::VectorXd a = random_element(rng, j.dim);
            const Eigen::VectorXd a2 = jordan_product(j, a, a);
            CHECK((jordan_product(j, a, jordan_product(j, a, a2)) - jordan_product(j, a2, a2)).norm() <= 1e-8);
        }
        const QMatrix b = exact_trace_form(j);
        for (int x = 0; x < j.dim; ++x) {
            for (int y = 0; y < j.dim; ++y) {
                for (int z = 0; z < j.dim; ++z) {
                    const QVector ex = unit_vector(j.dim, x), ey = unit_vector(j.dim, y), ez = unit_vector(j.dim, z);
                    CHECK(evaluate(b, jordan_product(j, ex, ey), ez) == evaluate(b, ey, jordan_product(j, ex, ez)));
                }
            }
        }
    }
}

TEST_CASE("recovery on the classical trit is the componentwise product", "[jordan][recovery]") {
    const auto s = setup("classical:3");
    const auto r = recover_jordan_product(recovery_problem(s.space, s.group, s.form));
    REQUIRE(r.status == "recovered");
    CHECK(r.linear_solution_dim == 0);
    CHECK(r.exact);
    CHECK(r.imposed_constraints.back() == "outcome idempotence");
    CHECK(r.unique);
    CHECK(r.runs.size() == 8);
    CHECK(r.self_dual_verified);
    CHECK(r.trace_form_pd);
    const auto& j = *r.algebra;
    // Outcome vectors are the coordinate idempotents of the trit.
    for (int x = 0; x < 3; ++x) {
        for (int y = 0; y < 3; ++y) {
            const QVector vx = s.space.outcome_vector(x), vy = s.space.outcome_vector(y);
            QVector expected = zero_vector(vx.size());
            for (Eigen::Index i = 0; i < vx.size(); ++i) expected(i) = vx(i) * vy(i);
            CHECK(jordan_product(j, vx, vy) == (x == y ? vx : expected));
        }
    }
    const auto id = identify_algebra(j);
    CHECK(id.rank == 3);
    CHECK(id.candidates == std::vector<std::string>{"R + R + R"});
}

TEST_CASE("recovery on the qubit is the symmetrized matrix product", "[jordan][recovery]") {
    const auto s = setup("qubit:complex");
    auto problem = recovery_problem(s.space, s.group, s.form);
    CHECK(problem.sharp_outcomes.size() == 6);
    // Without the idempotence rows, so that x o x = x below is a consequence.
    problem.impose_outcome_idempotence = false;
    const auto r = recover_jordan_product(problem);
    REQUIRE(r.status == "recovered");
    CHECK(r.linear_solution_dim == 0);
    CHECK(r.unique);
    CHECK(r.seed_spread <= 1e-8);
    CHECK(r.residual <= 1e-8);
    const auto& j = *r.algebra;
    const auto& ops = *s.space.operators;
    for (int a = 0; a < s.space.dim; ++a) {
        for (int b = 0; b < s.space.dim; ++b) {
            const QVector ea = unit_vector(s.space.dim, a), eb = unit_vector(s.space.dim, b);
            const Eigen::VectorXd oracle = to_double(symmetrized_product(ops, ea, eb));
            CHECK((jordan_product(j, to_double(ea), to_double(eb)) - oracle).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
    for (int x = 0; x < s.space.outcome_count(); ++x) {
        const Eigen::VectorXd v = to_double(s.space.outcome_vector(x));
        CHECK((jordan_product(j, v, v) - v).cwiseAbs().maxCoeff() <= 1e-8);
    }
    const auto id = identify_algebra(j);
    CHECK(id.rank == 2);
    CHECK(id.candidates == std::vector<std::string>{"ComplexHerm(2) = SpinFactor(3)"});
}

TEST_CASE("trit recovery without idempotence has several Jordan solutions", "[jordan][recovery]") {
    // One free parameter remains; the Jordan identity leaves R^3 and a spin
    // factor among its roots, so seeds disagree or fail the cone checks.
    const auto s = setup("classical:3");
    auto problem = recovery_problem(s.space, s.group, s.form);
    problem.impose_outcome_idempotence = false;
    const auto r = recover_jordan_product(problem);
    CHECK(r.linear_solution_dim == 1);
    CHECK_FALSE((r.status == "recovered" && r.unique));
}

TEST_CASE("recovery commutes with a random isometry", "[jordan][recovery]") {
    const auto s = setup("qubit:real");
    const auto base = recovery_problem(s.space, s.group, s.form);
    const QMatrix t = random_form_isometry(s.form, 2024);
    REQUIRE(QMatrix(t.transpose() * s.form * t) == s.form);
    const QMatrix tinv = *inverse(t);
    const auto r = recover_jordan_product(transport_problem(base, t));
    REQUIRE(r.status == "recovered");
    CHECK(r.unique);
    for (const auto& run : r.runs) CHECK(run.converged);
    const auto& ops = *s.space.operators;
    const int d = s.space.dim;
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            const QVector ea = unit_vector(d, a), eb = unit_vector(d, b);
            const QVector oracle = t * symmetrized_product(ops, tinv * ea, tinv * eb);
            CHECK((jordan_product(*r.algebra, to_double(ea), to_double(eb)) - to_double(oracle)).cwiseAbs().maxCoeff() <= 1e-8);
        }
    }
    CHECK(identify_algebra(*r.algebra).candidates == std::vector<std::string>{"RealSym(2) = SpinFactor(2)"});
}

TEST_CASE("recovery rejects a cone that is not self-dual", "[jordan][recovery]") {
    const auto s = setup("squit");
    const auto r = recover_jordan_product(recovery_problem(s.space, s.group, s.form));
    CHECK(r.status == "hypotheses not met");
    CHECK_FALSE(r.algebra);
    CHECK_FALSE(r.self_dual_verified);
}

TEST_CASE("identification from dimension and rank", "[jordan]") {
    CHECK(simple_candidates(4, 2) == std::vector<std::string>{"ComplexHerm(2) = SpinFactor(3)"});
    CHECK(simple_candidates(6, 3) == std::vector<std::string>{"RealSym(3)"});
    CHECK(simple_candidates(15, 3) == std::vector<std::string>{"QuatHerm(3)"});
    CHECK(simple_candidates(7, 2) == std::vector<std::string>{"SpinFactor(6)"});

    const auto three = identify_algebra(direct_sum({real_symmetric(1), real_symmetric(1), real_symmetric(1)}));
    CHECK(three.rank == 3);
    CHECK(three.candidates == std::vector<std::string>{"R + R + R"});
    CHECK(identify_algebra(real_symmetric(3)).candidates == std::vector<std::string>{"RealSym(3)"});
    CHECK(identify_algebra(complex_hermitian(2)).candidates == std::vector<std::string>{"ComplexHerm(2) = SpinFactor(3)"});
    CHECK(identify_algebra(spin_factor(3)).candidates == std::vector<std::string>{"ComplexHerm(2) = SpinFactor(3)"});
    CHECK(identify_algebra(quaternion_hermitian(2)).candidates == std::vector<std::string>{"QuatHerm(2) = SpinFactor(5)"});
    const auto mixed = identify_algebra(direct_sum({real_symmetric(1), real_symmetric(3)}));
    CHECK(mixed.rank == 4);
    CHECK(mixed.candidates == std::vector<std::string>{"RealSym(3) + R"});
}
