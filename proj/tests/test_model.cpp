#include "kvwb/builtins.hpp"
#include "kvwb/model.hpp"

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <numeric>

using namespace kvwb;

namespace {

// All permutations of the outcomes that map tests onto tests and permute the
// listed extreme states (brute force over n!).
std::vector<Permutation> automorphisms(const Model& m) {
    const int n = m.testspace.size();
    const auto tests = m.testspace.test_set();
    const auto& extreme = m.polytope().extreme;
    std::vector<Permutation> out;
    Permutation p(static_cast<size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    do {
        bool ok = true;
        for (const auto& t : tests) {
            std::vector<int> img;
            for (int x : t) img.push_back(p[static_cast<size_t>(x)]);
            std::sort(img.begin(), img.end());
            ok = ok && tests.count(img);
        }
        for (const auto& s : extreme) {
            State moved(n);
            for (int x = 0; x < n; ++x) moved(p[static_cast<size_t>(x)]) = s(x);
            ok = ok && std::find(extreme.begin(), extreme.end(), moved) != extreme.end();
        }
        if (ok) out.push_back(p);
    } while (std::next_permutation(p.begin(), p.end()));
    return out;
}

}  // namespace

TEST_CASE("built-in models are valid") {
    for (const auto& name : builtin_names()) {
        INFO(name);
        CHECK(validate_model(builtin_model(name)).ok());
    }
}

TEST_CASE("squit vertices are normalized on both tests") {
    const Model m = squit_model();
    // Hand check: (p, 1-p, q, 1-q) sums to one on {x0,x1} and {y0,y1}.
    for (const auto& s : m.polytope().extreme) {
        CHECK(s(0) + s(1) == 1);
        CHECK(s(2) + s(3) == 1);
    }
    CHECK(validate_model(m).ok());
}

TEST_CASE("a state summing to 0.9 is reported") {
    Model m = classical_model(3);
    State bad(3);
    bad << Rational(1, 2), Rational(3, 10), Rational(1, 10);
    std::get<PolytopeStates>(m.states).extreme.push_back(bad);
    const auto report = validate_model(m);
    CHECK_FALSE(report.ok());
    CHECK(report.has("state-normalization violated"));
}

TEST_CASE("structural violations are reported") {
    SECTION("tests of different sizes") {
        Model m = classical_model(3);
        m.testspace.tests.push_back({0, 1});
        CHECK(validate_model(m).has("rank-nonuniform"));
        CHECK_THROWS_AS(m.rank(), ModelError);
    }
    SECTION("generator that breaks tests") {
        Model m = squit_model();
        m.group.permutations.push_back({1, 2, 0, 3});
        CHECK(validate_model(m).has("generator-breaks-tests"));
    }
    SECTION("generator that moves states out of the list") {
        Model m = squit_model();
        std::get<PolytopeStates>(m.states).extreme.pop_back();
        CHECK(validate_model(m).has("state-space-not-invariant"));
    }
    SECTION("uncovered outcome and duplicate id") {
        Model m = classical_model(2);
        m.testspace.outcomes.push_back("x0");
        const auto report = validate_model(m);
        CHECK(report.has("duplicate-outcome"));
        CHECK(report.has("uncovered-outcome"));
    }
    SECTION("enumeration cap") {
        Model m = classical_model(5);
        m.group.cap = 10;
        CHECK(validate_model(m).has("group-cap-exceeded"));
        CHECK_THROWS_AS(enumerate_group(m.group.permutations, 5, 10), CapExceeded);
    }
    SECTION("non-frame quantum test") {
        Model m = quantum_model(Field::Complex, 2);
        auto& q = std::get<QuantumStates>(m.states);
        q.projectors[1] = q.projectors[2];
        CHECK(validate_model(m).has("test-not-frame"));
    }
}

TEST_CASE("distinguishability is symmetric and irreflexive") {
    const Model trit = classical_model(3);
    CHECK(distinguishable(trit, "x0", "x1"));
    const Model squit = squit_model();
    CHECK_FALSE(distinguishable(squit, "x0", "y0"));
    CHECK(distinguishable(squit, "x0", "x1"));
    CHECK_THROWS_AS(distinguishable(squit, "x0", "zz"), UnknownOutcome);
    for (const auto& name : builtin_names()) {
        const Model m = builtin_model(name);
        for (int x = 0; x < m.testspace.size(); ++x) {
            CHECK_FALSE(distinguishable(m.testspace, x, x));
            for (int y = 0; y < m.testspace.size(); ++y)
                CHECK(distinguishable(m.testspace, x, y) == distinguishable(m.testspace, y, x));
        }
    }
}

TEST_CASE("bi-symmetry of classical models with the full symmetric group") {
    for (int n = 2; n <= 5; ++n) {
        const auto r = check_bisymmetry(classical_model(n));
        CHECK(*r.pure_state_transitive);
        CHECK(*r.test_transitive);
        CHECK(*r.pair_transitive);
        CHECK(*r.fully_bisymmetric);
        long factorial = 1;
        for (int k = 2; k <= n; ++k) factorial *= k;
        CHECK(*r.group_order == static_cast<size_t>(factorial));
    }
}

TEST_CASE("squit with the dihedral group is bi-symmetric") {
    const Model m = squit_model();
    const auto r = check_bisymmetry(m);
    CHECK(*r.pure_state_transitive);
    CHECK(*r.test_transitive);
    CHECK(*r.pair_transitive);
    CHECK(*r.outcome_orbits == 1);
    // The generated group is the whole automorphism group of the square model.
    CHECK(*r.group_order == automorphisms(m).size());
    CHECK(*r.group_order == 8);
}

TEST_CASE("cyclic group on a trit is not fully bi-symmetric") {
    Model m = classical_model(3);
    m.group.permutations = {{1, 2, 0}};
    const auto r = check_bisymmetry(m);
    CHECK(*r.group_order == 3);
    CHECK_FALSE(*r.fully_bisymmetric);
    CHECK(*r.pure_state_transitive);
}

TEST_CASE("bit sum has two outcome orbits") {
    const auto r = check_bisymmetry(bit_sum_model());
    CHECK(*r.outcome_orbits == 2);
    CHECK_FALSE(*r.pure_state_transitive);
}

TEST_CASE("quantum bi-symmetry uses the analytic rule") {
    const auto r = check_bisymmetry(quantum_model(Field::Complex, 2));
    CHECK(r.method == "analytic");
    CHECK(*r.fully_bisymmetric);
}

TEST_CASE("orbits do not depend on generator order") {
    const Model m = squit_model();
    auto gens = m.group.permutations;
    const auto a = outcome_orbits(gens, 4);
    std::reverse(gens.begin(), gens.end());
    CHECK(outcome_orbits(gens, 4) == a);
    const auto e1 = enumerate_group(m.group.permutations, 4, 100);
    const auto e2 = enumerate_group(gens, 4, 100);
    CHECK(std::set<Permutation>(e1.begin(), e1.end()) == std::set<Permutation>(e2.begin(), e2.end()));
}

TEST_CASE("generators and their inverses map tests to tests") {
    for (const auto& name : builtin_names()) {
        const Model m = builtin_model(name);
        const auto tests = m.testspace.test_set();
        for (const auto& g : m.group.permutations) {
            for (const auto& h : {g, inverse(g)}) {
                for (const auto& t : tests) {
                    std::vector<int> img;
                    for (int x : t) img.push_back(h[static_cast<size_t>(x)]);
                    std::sort(img.begin(), img.end());
                    CHECK(tests.count(img) == 1);
                }
            }
        }
    }
}

TEST_CASE("sharpness") {
    CHECK(is_sharp(classical_model(3)));
    CHECK(is_sharp(quantum_model(Field::Complex, 2)));
    const Model squit = squit_model();
    CHECK_FALSE(is_sharp(squit));
    // Both (p,q) = (1,1) and (1,0) give x0 probability one.
    CHECK(certainty_face(squit, 0) == std::vector<int>{0, 1});
}
