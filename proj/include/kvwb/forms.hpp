#pragma once

// Invariant symmetric bilinear forms on E(A): invariant-form spaces,
// irreducibility, group averaging, orthogonalizing SPIN forms and the
// unitarity check for group generators.

#include "kvwb/cones.hpp"
#include "kvwb/linearization.hpp"
#include "kvwb/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kvwb {

/// The symmetry group as matrices on E(A). `elements` is filled when the
/// group is a finite permutation group (enumerated within its cap).
struct LinearGroup {
    std::vector<QMatrix> generators;
    std::optional<std::vector<QMatrix>> elements;
};

LinearGroup linear_group(const Model& m, const OrderUnitSpace& e);

struct FormFlags {
    std::optional<bool> positive_on_cone;
    std::optional<bool> invariant;
    std::optional<bool> normalized;
    std::optional<bool> orthogonalizing;
    std::optional<bool> positive_definite;
};

struct BilinearForm {
    QMatrix matrix;
    FormFlags flags;
};

Rational evaluate(const QMatrix& form, const QVector& a, const QVector& b);

enum class Subspace { Full, UnitPerp };

/// Columns span u-perp = {a : B(a, u) = 0}.
QMatrix unit_perp_basis(const QVector& unit, const QMatrix& form);

/// Basis (RREF order) of the symmetric forms B with M^T B M = B for every
/// generator. For UnitPerp the forms live on the coordinates of
/// unit_perp_basis(u, reference) and the reference must be invariant and PD.
std::vector<QMatrix> invariant_symmetric_forms(const std::vector<QMatrix>& generators, int dim);
std::vector<QMatrix> invariant_symmetric_forms(const OrderUnitSpace& e, const LinearGroup& g, Subspace subspace,
                                               const QMatrix& reference);

/// Group average of b0: exact mean over the enumerated group, or the
/// Frobenius-nearest invariant form for generator-only groups.
QMatrix average_form(const QMatrix& b0, const LinearGroup& g);

struct IrreducibilityReport {
    bool irreducible = false;
    int form_space_dim = 0;  // invariant symmetric forms on u-perp
    QMatrix reference_form;  // the PD invariant form used to define u-perp
};

/// Throws Error when no positive-definite invariant form can be built.
IrreducibilityReport is_irreducible(const OrderUnitSpace& e, const LinearGroup& g);

struct SpinFormResult {
    std::optional<BilinearForm> form;
    int solution_space_dim = 0;  // homogeneous solutions before normalization
};

/// Symmetric, invariant, zero on distinguishable pairs, B(u,u) = 1 and
/// non-negative on cone-generator pairs.
SpinFormResult find_orthogonalizing_spin_form(const Model& m, const OrderUnitSpace& e, const LinearGroup& g);

/// Fills every flag of `form` by direct checks.
FormFlags check_form_flags(const QMatrix& form, const Model& m, const OrderUnitSpace& e, const LinearGroup& g);

struct UniquenessReport {
    bool irreducible = false;
    int solution_space_dim = 0;
    bool form_found = false;
    std::optional<bool> positive_definite;
    double eigenvalue_floor = 0;  // smallest eigenvalue of the form (float)
    std::string verdict;          // "confirmed", "hypothesis not met" or "violated"
    std::optional<BilinearForm> form;
};

/// Irreducible => at most one orthogonalizing SPIN form, and it is an inner product.
UniquenessReport check_spin_uniqueness(const Model& m, const OrderUnitSpace& e, const LinearGroup& g);

/// M^T B M == B for every generator; throws Error if B is singular.
bool check_unitarity(const std::vector<QMatrix>& generators, const QMatrix& form);

}  // namespace kvwb
