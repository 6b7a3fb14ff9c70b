#pragma once

// Finite probabilistic models: test spaces, states, symmetry groups and the
// checks that only need the combinatorial/probabilistic data.

#include "kvwb/hermitian.hpp"
#include "kvwb/rational.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace kvwb {

class ModelError : public Error {
public:
    using Error::Error;
};

class UnknownOutcome : public Error {
public:
    using Error::Error;
};

class CapExceeded : public Error {
public:
    using Error::Error;
};

inline constexpr std::size_t kDefaultEnumerationCap = 1'000'000;

/// Outcomes are opaque string ids; everything internal works with indices.
struct TestSpace {
    std::vector<std::string> outcomes;
    std::vector<std::vector<int>> tests;

    int size() const { return static_cast<int>(outcomes.size()); }
    int index_of(const std::string& id) const;
    /// Common test size, or nullopt when tests differ in size.
    std::optional<int> uniform_rank() const;
    std::set<std::vector<int>> test_set() const;  // tests as sorted index lists
};

/// Probability of each outcome, indexed like TestSpace::outcomes.
using State = QVector;

/// A bijection of outcome indices: g[x] is the image of x.
using Permutation = std::vector<int>;

Permutation compose(const Permutation& g, const Permutation& h);  // g after h
Permutation inverse(const Permutation& g);
Permutation identity_permutation(int n);

/// (g alpha)(x) = alpha(g^{-1} x).
State act(const Permutation& g, const State& alpha);

enum class GroupKind { FinitePermutation, TopologicalGenerators };

struct SymmetryGroup {
    GroupKind kind = GroupKind::FinitePermutation;
    std::vector<Permutation> permutations;  // FinitePermutation
    std::vector<CMatrix> unitaries;         // quantum models, acting by conjugation
    std::vector<QMatrix> linear_actions;    // generator matrices on effect coordinates
    std::uint64_t seed = 0;                 // seed that produced random generators, if any
    std::size_t cap = kDefaultEnumerationCap;
};

/// Closure of the generators under composition; throws CapExceeded.
std::vector<Permutation> enumerate_group(const std::vector<Permutation>& generators, int degree,
                                         std::size_t cap);

struct PolytopeStates {
    std::vector<State> extreme;
};

/// The full quantum state space of a real or complex Hilbert space; the
/// model's outcomes are a finite sample of rank-one projectors.
struct QuantumStates {
    Field field = Field::Complex;
    int dim = 2;
    std::vector<CMatrix> projectors;  // one per outcome
};

using StateSpace = std::variant<PolytopeStates, QuantumStates>;

struct Model {
    std::string name;
    TestSpace testspace;
    StateSpace states;
    SymmetryGroup group;

    bool is_quantum() const { return std::holds_alternative<QuantumStates>(states); }
    const PolytopeStates& polytope() const;
    const QuantumStates& quantum() const;

    /// Common test size; throws ModelError for non-uniform test spaces.
    int rank() const;
};

struct Violation {
    std::string code;
    std::string detail;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
    bool has(const std::string& code) const;
};

ValidationReport validate_model(const Model& m);

/// Throws ModelError listing the violations if the model is invalid.
void require_valid(const Model& m);

bool distinguishable(const TestSpace& ts, int x, int y);
bool distinguishable(const Model& m, const std::string& x, const std::string& y);

/// Ordered pairs (x, y) with x != y in a common test.
std::vector<std::pair<int, int>> distinguishable_pairs(const TestSpace& ts);

struct BisymmetryReport {
    std::optional<bool> pure_state_transitive;
    std::optional<bool> test_transitive;
    std::optional<bool> pair_transitive;
    std::optional<bool> fully_bisymmetric;
    std::optional<std::size_t> group_order;
    std::optional<int> outcome_orbits;
    std::string method;  // "enumeration" or "analytic"
};

BisymmetryReport check_bisymmetry(const Model& m);

/// Orbits of the generators on outcomes, each sorted, in order of first element.
std::vector<std::vector<int>> outcome_orbits(const std::vector<Permutation>& generators, int degree);

bool is_sharp(const Model& m);

/// Extreme states assigning probability one to outcome x (polytope backend).
std::vector<int> certainty_face(const Model& m, int x);

}  // namespace kvwb
