#include "kvwb/builtins.hpp"
#include "kvwb/image.hpp"
#include "kvwb/lp.hpp"

#include <catch_amalgamated.hpp>

using namespace kvwb;

namespace {

// Four classical outcomes with the order-8 group preserving the pairing {0,1},{2,3}.
Model paired_four() {
    Model m = classical_model(4);
    m.name = "classical:4/paired";
    m.group.permutations = {{1, 0, 2, 3}, {2, 3, 0, 1}};
    return m;
}

ImageMap pair_collapse() {
    ImageMap f;
    f.outcome_map = {0, 0, 1, 1};
    f.target_outcomes = {"y0", "y1"};
    return f;
}

// alpha is a convex combination of the vertices of m.
bool in_state_space(const Model& m, const State& alpha) {
    const auto& v = m.polytope().extreme;
    QMatrix a(alpha.size() + 1, static_cast<Eigen::Index>(v.size()));
    QVector b(alpha.size() + 1);
    for (size_t k = 0; k < v.size(); ++k) {
        a.col(static_cast<Eigen::Index>(k)).head(alpha.size()) = v[k];
        a(alpha.size(), static_cast<Eigen::Index>(k)) = 1;
    }
    b.head(alpha.size()) = alpha;
    b(alpha.size()) = 1;
    return find_feasible_point(a, b).status == LpStatus::Optimal;
}

}  // namespace

TEST_CASE("identity map returns the model", "[image]") {
    const Model squit = squit_model();
    ImageMap f;
    f.outcome_map = {0, 1, 2, 3};
    f.target_outcomes = squit.testspace.outcomes;
    const Model img = image_model(squit, f);
    const auto iso = find_model_isomorphism(img, squit);
    REQUIRE(iso);
    CHECK(*iso == identity_permutation(4));
    CHECK(img.polytope().extreme.size() == 4);
}

TEST_CASE("pairwise collapse of four classical outcomes is the bit", "[image]") {
    const Model four = paired_four();
    const Model img = image_model(four, pair_collapse());
    CHECK(img.testspace.tests == std::vector<std::vector<int>>{{0, 1}});
    CHECK(find_model_isomorphism(img, classical_model(2)).has_value());
    CHECK(img.group.permutations == std::vector<Permutation>{{1, 0}});
    // Pullbacks of the two vertices are (1/2,1/2,0,0) and (0,0,1/2,1/2).
    const QMatrix l = pullback_matrix(four, pair_collapse());
    for (const auto& beta : img.polytope().extreme) {
        const State alpha = l * beta;
        CHECK(alpha.sum() == 1);
        CHECK(in_state_space(four, alpha));
    }
}

TEST_CASE("collapse that breaks the symmetry is rejected", "[image]") {
    CHECK_THROWS_AS(image_model(classical_model(4), pair_collapse()), ModelError);
    ImageMap bad = pair_collapse();
    bad.target_outcomes.push_back("y2");
    CHECK_THROWS_AS(image_model(paired_four(), bad), ModelError);
}

TEST_CASE("pullback must be defined consistently across tests", "[image]") {
    // a lies in {a,b} and {a,c}; merging a with b doubles a's weight in one test only.
    Model m;
    m.testspace.outcomes = {"a", "b", "c"};
    m.testspace.tests = {{0, 1}, {0, 2}};
    State s1(3), s2(3);
    s1 << Rational(1), Rational(0), Rational(0);
    s2 << Rational(0), Rational(1), Rational(1);
    m.states = PolytopeStates{{s1, s2}};
    REQUIRE(validate_model(m).ok());
    ImageMap f;
    f.outcome_map = {0, 0, 1};
    f.target_outcomes = {"p", "q"};
    CHECK_THROWS_AS(pullback_matrix(m, f), ModelError);
}

TEST_CASE("bit sum collapses to a bit", "[image]") {
    const Model img = image_model(bit_sum_model(), pair_collapse());
    CHECK(find_model_isomorphism(img, classical_model(2)).has_value());
}

TEST_CASE("image closure of small classical catalogs", "[image]") {
    const auto closed = check_image_closure({classical_model(2), paired_four()}, pair_collapse());
    CHECK(closed.closed);
    CHECK(closed.source == 1);
    CHECK(closed.match == 0);
    const auto open = check_image_closure({paired_four()}, pair_collapse());
    CHECK_FALSE(open.closed);
    CHECK_FALSE(open.match);
}

TEST_CASE("image vertices pull back into the source state space", "[image][property]") {
    // Every block-invariant partition of the paired model and of the squit.
    const std::vector<std::pair<Model, std::vector<int>>> cases = {
        {paired_four(), {0, 0, 1, 1}}, {paired_four(), {0, 1, 2, 3}}, {paired_four(), {0, 0, 0, 0}},
        {squit_model(), {0, 1, 2, 3}}, {squit_model(), {0, 0, 1, 1}}, {squit_model(), {0, 0, 0, 0}},
        {bit_sum_model(), {0, 1, 2, 2}}};
    for (const auto& [m, blocks] : cases) {
        const ImageMap f = partition_map(blocks);
        const Model img = image_model(m, f);
        const QMatrix l = pullback_matrix(m, f);
        for (const auto& beta : img.polytope().extreme) {
            CHECK(in_state_space(m, l * beta));
            for (const auto& t : img.testspace.tests) {
                Rational s = 0;
                for (int y : t) s += beta(y);
                CHECK(s == 1);
            }
        }
    }
}

TEST_CASE("collapsing every test gives a trivial image", "[image]") {
    const Model img = image_model(squit_model(), partition_map({0, 0, 1, 1}));
    CHECK(is_trivial_model(img));
    CHECK(img.polytope().extreme.size() == 1);
    CHECK(check_image_closure({squit_model()}, partition_map({0, 0, 1, 1})).trivial);
    CHECK(is_trivial_model(unit_model()));
}

TEST_CASE("two-level quantum models have no non-trivial images", "[image][quantum]") {
    const auto complex_search = search_quantum_images(builtin_model("qubit:complex"));
    CHECK(complex_search.partitions_checked == 203);  // Bell number B6
    CHECK(complex_search.nontrivial.empty());
    CHECK(complex_search.relabellings == 1);
    CHECK(complex_search.trivial >= 1);

    const auto real_search = search_quantum_images(builtin_model("qubit:real"));
    CHECK(real_search.partitions_checked == 15);  // B4
    CHECK(real_search.nontrivial.empty());

    CHECK_THROWS_AS(search_quantum_images(builtin_model("qutrit:complex")), ModelError);
}

TEST_CASE("quantum images under admissible maps", "[image][quantum]") {
    const Model qubit = builtin_model("qubit:complex");
    // z+ and z- alone is not a union of overlap classes.
    CHECK_THROWS_AS(image_model(qubit, partition_map({0, 0, 1, 2, 3, 4})), ModelError);
    // Antipodal identification collapses every test.
    const Model antipodal = image_model(qubit, partition_map({0, 0, 1, 1, 2, 2}));
    CHECK(is_trivial_model(antipodal));
    const auto closure = check_image_closure({qubit}, partition_map({0, 1, 2, 3, 4, 5}));
    CHECK(closure.closed);
    CHECK(closure.match == 0);
}
