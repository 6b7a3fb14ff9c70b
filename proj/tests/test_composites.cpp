#include "kvwb/builtins.hpp"
#include "kvwb/composites.hpp"

#include <catch_amalgamated.hpp>

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

State basis_state(int n, int i) {
    State s = zero_vector(n);
    s(i) = 1;
    return s;
}

}  // namespace

TEST_CASE("product states are rank one with the factors as marginals", "[composites]") {
    const Model trit = classical_model(3);
    const Model squit = squit_model();
    State a(3);
    a << Rational(1, 2), Rational(1, 3), Rational(1, 6);
    const State b = squit.polytope().extreme[1];
    const auto w = product_state(a, b);
    CHECK(rank(w.table) == 1);
    CHECK(validate_bipartite(trit, squit, w).ok());
    CHECK(marginal_a(w, squit) == a);
    CHECK(marginal_b(w, trit) == b);
    CHECK(conditional(w, 0).values == QVector(b / 2));
}

TEST_CASE("bipartite validation reports broken tables", "[composites]") {
    const Model bit = classical_model(2);
    BipartiteState w{zero_matrix(2, 2)};
    w.table(0, 0) = Rational(3, 2);
    w.table(1, 1) = Rational(-1, 2);
    const auto r = validate_bipartite(bit, bit, w);
    CHECK(r.has("negative-entry"));
    CHECK(r.has("conditional-not-in-cone"));

    BipartiteState half{zero_matrix(2, 2)};
    half.table(0, 0) = Rational(1, 2);
    CHECK(validate_bipartite(bit, bit, half).has("product-normalization violated"));
}

TEST_CASE("classical conjugate is the uniform diagonal table", "[composites]") {
    for (int n = 2; n <= 5; ++n) {
        const auto b = build("classical:" + std::to_string(n));
        const auto gamma = conjugation_map(b.model);
        CHECK(gamma == identity_permutation(n));
        const auto search = find_conjugate_state(b.model, b.space, b.group, gamma, true);
        REQUIRE(search.eta);
        CHECK(search.free_parameters == 0);
        const QMatrix oracle = identity_matrix(n) / Rational(n);
        CHECK(search.eta->table == oracle);
        CHECK(is_isomorphism_state(b.space, b.space, *search.eta).verdict);

        const auto spin = spin_form_from_conjugate(b.model, b.space, b.group, Conjugate{gamma, *search.eta});
        CHECK_FALSE(spin.averaged);
        CHECK(spin.symmetric);
        CHECK(*spin.form.flags.orthogonalizing);
        CHECK(*spin.form.flags.positive_definite);
    }
}

TEST_CASE("product states of a bit are not isomorphism states", "[composites]") {
    const auto b = build("classical:2");
    const auto w = product_state(basis_state(2, 0), basis_state(2, 1));
    const auto check = is_isomorphism_state(b.space, b.space, w);
    CHECK_FALSE(check.invertible);
    CHECK_FALSE(check.verdict);
    CHECK(check.method == "exact");
}

TEST_CASE("maximally entangled qubit state", "[composites][quantum]") {
    const auto b = build("qubit:complex");
    const auto gamma = conjugation_map(b.model);
    const auto& ts = b.model.testspace;
    // conj swaps y+ and y- and fixes the real frames.
    CHECK(ts.outcomes[static_cast<size_t>(gamma[static_cast<size_t>(ts.index_of("y+"))])] == "y-");
    CHECK(gamma[static_cast<size_t>(ts.index_of("x-"))] == ts.index_of("x-"));

    const auto eta = maximally_entangled(b.model);
    for (int x = 0; x < ts.size(); ++x) CHECK(eta.table(x, gamma[static_cast<size_t>(x)]) == Rational(1, 2));
    CHECK(validate_bipartite(b.model, b.model, eta).ok());
    CHECK(is_isomorphism_state(b.space, b.space, eta).verdict);

    // eta(x, gamma y) = tr(P_x P_y) / 2, computed from the projectors.
    const auto spin = spin_form_from_conjugate(b.model, b.space, b.group, Conjugate{gamma, eta});
    CHECK_FALSE(spin.averaged);
    const auto& p = b.model.quantum().projectors;
    for (int x = 0; x < ts.size(); ++x)
        for (int y = 0; y < ts.size(); ++y)
            CHECK(evaluate(spin.form.matrix, b.space.outcome_vector(x), b.space.outcome_vector(y)) ==
                  (p[static_cast<size_t>(x)] * p[static_cast<size_t>(y)]).trace_re() / 2);
    CHECK(*spin.form.flags.positive_definite);
    CHECK(*spin.form.flags.invariant);
}

TEST_CASE("invariant conjugate search recovers the maximally entangled state", "[composites][quantum]") {
    for (const std::string name : {"qubit:real", "qubit:complex"}) {
        const auto b = build(name);
        const auto gamma = conjugation_map(b.model);
        const auto search = find_conjugate_state(b.model, b.space, b.group, gamma, true);
        REQUIRE(search.eta);
        CHECK(search.method == "sampled+analytic");
        CHECK(search.eta->table == maximally_entangled(b.model).table);
    }
}

TEST_CASE("purification witness has marginal S^2 / tr(S^2)", "[composites][quantum]") {
    const auto b = build("qutrit:complex");
    QMatrix re = zero_matrix(3, 3);
    QMatrix im = zero_matrix(3, 3);
    re(0, 0) = 1;
    re(1, 1) = 2;
    re(2, 2) = 3;
    re(0, 1) = re(1, 0) = 1;
    im(0, 2) = 1;
    im(2, 0) = -1;
    const CMatrix s(re, im);
    REQUIRE(s.is_hermitian());
    const auto w = purification_witness(b.model, s);
    const CMatrix s2 = s * s;
    const Rational norm = s2.trace_re();
    const auto m = marginal_a(w, b.model);
    const auto& p = b.model.quantum().projectors;
    for (int x = 0; x < b.model.testspace.size(); ++x) CHECK(m(x) == (s2 * p[static_cast<size_t>(x)]).trace_re() / norm);
    CHECK(validate_bipartite(b.model, b.model, w).ok());
    CHECK(is_isomorphism_state(b.space, b.space, w).verdict);
}

TEST_CASE("table_form rejects tables that are not bilinear", "[composites][quantum]") {
    const auto b = build("qubit:real");
    auto w = maximally_entangled(b.model);
    REQUIRE(table_form(b.space, b.space, w) == table_form(b.space, b.space, w));
    // z+ + z- = x+ + x- forces the row sums over each frame to agree.
    w.table(b.model.testspace.index_of("x+"), 0) += Rational(1, 10);
    CHECK_THROWS_AS(table_form(b.space, b.space, w), InconsistentExtension);
    const QMatrix hat = omega_hat(b.space, b.space, maximally_entangled(b.model));
    CHECK(hat == QMatrix(table_form(b.space, b.space, maximally_entangled(b.model)).transpose()));
}

TEST_CASE("squit admits an invariant conjugate that is not an isomorphism state", "[composites]") {
    const auto b = build("squit");
    const auto gamma = conjugation_map(b.model);
    const auto search = find_conjugate_state(b.model, b.space, b.group, gamma, true);
    REQUIRE(search.eta);
    CHECK(validate_bipartite(b.model, b.model, *search.eta).ok());
    for (int x = 0; x < 4; ++x) CHECK(search.eta->table(x, x) == Rational(1, 2));
    CHECK_FALSE(is_isomorphism_state(b.space, b.space, *search.eta).verdict);
    const auto spin = spin_form_from_conjugate(b.model, b.space, b.group, Conjugate{gamma, *search.eta});
    CHECK(spin.symmetric);
    CHECK(*spin.form.flags.orthogonalizing);
}

TEST_CASE("classical diagonal witnesses cover every sampled state", "[composites][homogeneity]") {
    const auto b = build("classical:3");
    const auto gamma = conjugation_map(b.model);
    std::vector<State> samples;
    State bary(3);
    bary << Rational(1, 3), Rational(1, 3), Rational(1, 3);
    State skew(3);
    skew << Rational(1, 2), Rational(1, 3), Rational(1, 6);
    samples = {bary, skew};
    std::vector<BipartiteState> witnesses;
    for (const auto& s : samples) {
        const auto w = diagonal_witness(b.model, b.space, gamma, s);
        REQUIRE(w);
        // The diagonal table diag(s) is the unique maximizer.
        CHECK(w->table == QMatrix(s.asDiagonal()));
        witnesses.push_back(*w);
    }
    const auto report = homogeneity_report(b.model, b.space, witnesses, samples);
    CHECK(report.all_covered);
    CHECK(report.covering_witness == std::vector<int>{0, 1});
}

TEST_CASE("boundary states of a bit are not covered", "[composites][homogeneity]") {
    const auto b = build("classical:2");
    const auto gamma = conjugation_map(b.model);
    const State edge = basis_state(2, 0);
    const auto w = diagonal_witness(b.model, b.space, gamma, edge);
    REQUIRE(w);
    const auto report = homogeneity_report(b.model, b.space, {*w}, {edge});
    CHECK_FALSE(report.witnesses[0].verdict);
    CHECK_FALSE(report.all_covered);
    CHECK(report.verdict == "uncovered samples: 0");
}

TEST_CASE("squit barycenter witness is not an isomorphism state", "[composites][homogeneity]") {
    const auto b = build("squit");
    const auto gamma = conjugation_map(b.model);
    State bary(4);
    bary << Rational(1, 2), Rational(1, 2), Rational(1, 2), Rational(1, 2);
    const auto w = diagonal_witness(b.model, b.space, gamma, bary);
    REQUIRE(w);
    CHECK(validate_bipartite(b.model, b.model, *w).ok());
    CHECK(marginal_a(*w, b.model) == bary);
    CHECK_FALSE(homogeneity_report(b.model, b.space, {*w}, {bary}).all_covered);
}
