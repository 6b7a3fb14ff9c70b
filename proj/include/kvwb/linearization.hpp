#pragma once

// The order-unit space E(A) spanned by the outcome evaluation functionals,
// with its outcome-generated cone and linearized morphisms.

#include "kvwb/hermitian.hpp"
#include "kvwb/model.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace kvwb {

enum class Backend { Polytope, Quantum };

struct OrderUnitSpace {
    Backend backend = Backend::Polytope;
    int dim = 0;
    /// Polytope: indices of the extreme states used as coordinates.
    std::vector<int> basis_states;
    /// Column x is the vector of outcome x.
    QMatrix outcome_vectors;
    /// Distinct outcome vectors, in order of first occurrence.
    std::vector<QVector> cone_generators;
    /// generator_outcome[k]: first outcome whose vector is cone_generators[k].
    std::vector<int> generator_outcome;
    /// (x, y): outcome x has the same vector as the earlier outcome y.
    std::vector<std::pair<int, int>> identifications;
    QVector unit;
    /// Polytope: column j is the functional of extreme state j (pairing by dot product).
    QMatrix state_functionals;
    /// Quantum: the operator basis behind the coordinates.
    std::optional<OperatorBasis> operators;

    QVector outcome_vector(int x) const { return outcome_vectors.col(x); }
    int outcome_count() const { return static_cast<int>(outcome_vectors.cols()); }
};

OrderUnitSpace build_effect_space(const Model& m);

/// Quantum backend: coordinates of a Hermitian matrix / functional of a density matrix.
QVector vector_of_operator(const OrderUnitSpace& e, const CMatrix& hermitian);
QVector functional_of_density(const OrderUnitSpace& e, const CMatrix& rho);

/// Matrix of a generator acting on E(A) (x-hat -> (g x)-hat, or the
/// conjugation action for unitaries), one per generator of the model's group.
std::vector<QMatrix> group_actions(const Model& m, const OrderUnitSpace& e);

/// Matrix of the permutation g on E(A); throws if g is not linearizable.
QMatrix linearize_permutation(const OrderUnitSpace& e, const Permutation& g);

struct Morphism {
    std::vector<int> outcome_map;            // phi: outcome of A -> outcome of B
    std::vector<Permutation> group_map;      // psi(g_i) for each generator of A
};

/// Raised when no linear map sends every outcome vector to its image.
class InconsistentExtension : public Error {
public:
    InconsistentExtension(const std::string& what, int source, int target)
        : Error(what), source_outcome(source), target_outcome(target) {}
    int source_outcome;
    int target_outcome;
};

/// Matrix M (dim_B x dim_A) with M x-hat = phi(x)-hat for every outcome x.
QMatrix linearize_morphism(const Morphism& f, const OrderUnitSpace& ea, const OrderUnitSpace& eb);

/// Checks that phi maps tests onto tests and that psi is equivariant on generators.
ValidationReport validate_morphism(const Model& a, const Model& b, const Morphism& f);

}  // namespace kvwb
