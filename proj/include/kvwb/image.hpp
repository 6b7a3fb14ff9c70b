#pragma once

// Images of models under surjective outcome maps, image-closure of a
// catalog, and the search for images of two-level quantum models.

#include "kvwb/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kvwb {

/// Surjective outcome map phi: X -> Y onto a target test space.
struct ImageMap {
    std::vector<int> outcome_map;             // phi(x) as an index into target_outcomes
    std::vector<std::string> target_outcomes;
    /// Target tests; default phi(A). Each must lie in phi(A).
    std::optional<std::vector<std::vector<int>>> target_tests;
    /// psi(g_i) per permutation generator; default: the induced permutations.
    std::optional<std::vector<Permutation>> group_images;
};

/// phi merging outcomes that share a block index: block b becomes outcome "b<index>".
ImageMap partition_map(const std::vector<int>& block_of);

/// Pullback of a target state. Outcomes merged within a test share the
/// target probability equally: phi*(beta)(x) = beta(phi x) / c(x), c(x) the
/// number of outcomes of x's tests mapped to phi x. Throws ModelError when
/// c(x) differs between the tests containing x.
QMatrix pullback_matrix(const Model& m, const ImageMap& f);

/// True when every test is a single outcome: the state space is one point
/// and the model is a copy of the unit model.
bool is_trivial_model(const Model& m);

/// The model with one outcome, one test and one state.
Model unit_model();

/// The image (Y, B, Gamma, H), Gamma = {beta in Omega(Y,B) : phi* beta in Omega}.
/// Polytope models: Gamma by vertex enumeration. Quantum models: only
/// relabellings and trivial maps have images. Throws ModelError for
/// non-surjective or non-equivariant maps and for an empty Gamma.
Model image_model(const Model& m, const ImageMap& f);

/// Outcome relabelling carrying tests to tests and states to states.
/// Polytope: vertex sets compared exactly. Quantum: same field, dimension
/// and overlap matrix tr(P_x P_y).
std::optional<Permutation> find_model_isomorphism(const Model& a, const Model& b);

struct ImageClosureResult {
    bool closed = false;
    int source = -1;                 // catalog index the map was applied to
    std::optional<int> match;        // catalog index isomorphic to the image
    bool trivial = false;            // the image is a copy of the unit model
    std::string detail;
};

/// Applies f to the first catalog member it is valid for; true iff the image
/// is trivial or isomorphic to a catalog member.
ImageClosureResult check_image_closure(const std::vector<Model>& catalog, const ImageMap& f);

struct QuantumImageSearch {
    long partitions_checked = 0;
    long admissible = 0;   // partitions invariant under the group
    long relabellings = 0; // discrete partition
    long trivial = 0;      // every test collapsed to one outcome
    std::vector<std::vector<int>> nontrivial;  // block_of vectors
};

/// Exhaustive over set partitions of the outcome sample of a quantum model
/// with Hilbert dimension 2. A partition is admissible when it is constant
/// on orbits of outcome pairs; in dimension 2 two pairs of pure states lie
/// in one orbit iff their overlaps tr(P_x P_y) agree.
QuantumImageSearch search_quantum_images(const Model& m);

}  // namespace kvwb
