#pragma once

// Bipartite states as joint probability tables, the induced map
// omega-hat : E(A) -> E(B)*, conjugate states and the forms they induce.

#include "kvwb/cones.hpp"
#include "kvwb/forms.hpp"
#include "kvwb/linearization.hpp"
#include "kvwb/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kvwb {

/// table(x, y) = omega(x, y) for outcome x of A and y of B.
struct BipartiteState {
    QMatrix table;
};

BipartiteState product_state(const State& a, const State& b);

/// Product-test normalization and conditional membership on both sides.
ValidationReport validate_bipartite(const Model& a, const Model& b, const BipartiteState& w);

struct Conditional {
    QVector values;  // unnormalized omega(x, .)
    bool zero_mass = false;
};

Conditional conditional(const BipartiteState& w, int x);

/// Marginal on A, summing over the first test of B.
State marginal_a(const BipartiteState& w, const Model& b);
State marginal_b(const BipartiteState& w, const Model& a);

/// W with omega(x, y) = x-hat^T W y-hat; throws InconsistentExtension (with
/// the offending pair) when the table does not respect linear dependencies.
QMatrix table_form(const OrderUnitSpace& ea, const OrderUnitSpace& eb, const BipartiteState& w);

/// The table of x-hat^T W y-hat over all outcome pairs.
BipartiteState table_of_form(const OrderUnitSpace& ea, const OrderUnitSpace& eb, const QMatrix& w);

/// omega-hat as a dim_B x dim_A matrix: a -> the functional W^T a on E(B).
QMatrix omega_hat(const OrderUnitSpace& ea, const OrderUnitSpace& eb, const BipartiteState& w);

struct IsomorphismCheck {
    bool verdict = false;
    bool invertible = false;
    bool positive = false;
    bool inverse_positive = false;
    std::string method;  // "exact" or "sampled+analytic"
};

IsomorphismCheck is_isomorphism_state(const OrderUnitSpace& ea, const OrderUnitSpace& eb, const BipartiteState& w);

/// The outcome bijection of the canonical conjugate: identity for polytope
/// models, complex conjugation of projectors for quantum models.
Permutation conjugation_map(const Model& m);

/// Quantum: eta(x, y) = tr(P_x conj(P_y)) / n, the table of the maximally
/// entangled vector sum_i e_i (x) conj(e_i) / sqrt(n).
BipartiteState maximally_entangled(const Model& m);

/// Quantum: table of (S (x) 1)|psi> with |psi> maximally entangled, scaled to
/// a state: tr(S P_x S conj(P_y)) / tr(S^2). Its marginal on A is S^2 / tr(S^2).
BipartiteState purification_witness(const Model& m, const CMatrix& s);

struct Conjugate {
    Permutation gamma;
    BipartiteState eta;
};

struct ConjugateSearch {
    std::optional<BipartiteState> eta;
    QMatrix form;  // W with eta(x, y) = x-hat^T W y-hat
    int free_parameters = 0;  // dimension of the affine solution set of the equalities
    int cutting_rounds = 0;   // quantum: PSD cuts added
    std::string method;       // "exact" or "sampled+analytic"
};

/// Exact LP search for eta with eta(x, gamma x) = 1/n, normalization,
/// non-negativity and conditional membership; optionally
/// eta(gx, gamma(gy)) = eta(x, gamma(y)) for every generator g.
ConjugateSearch find_conjugate_state(const Model& m, const OrderUnitSpace& e, const LinearGroup& g,
                                     const Permutation& gamma, bool require_invariance, std::uint64_t seed = 42);

struct ConjugateForm {
    BilinearForm form;
    bool averaged = false;  // eta was not invariant and the form was group-averaged
    bool symmetric = false;
};

/// B(x, y) = eta(x, gamma(y)), extended linearly; flags filled by direct checks.
ConjugateForm spin_form_from_conjugate(const Model& m, const OrderUnitSpace& e, const LinearGroup& g,
                                       const Conjugate& c);

struct HomogeneityReport {
    std::vector<IsomorphismCheck> witnesses;
    std::vector<bool> covered;       // per sample
    std::vector<int> covering_witness;  // index, or -1
    bool all_covered = false;
    std::string verdict;
};

/// Which sample states are marginals of verified isomorphism-state witnesses.
/// Polytope samples must match exactly; quantum samples within `tol`.
HomogeneityReport homogeneity_report(const Model& m, const OrderUnitSpace& e, const std::vector<BipartiteState>& witnesses,
                                     const std::vector<State>& samples, double tol = 1e-9);

/// Polytope: a witness with marginal `sample` maximizing the mass on the
/// diagonal (x, gamma x); nullopt if the LP is infeasible.
std::optional<BipartiteState> diagonal_witness(const Model& m, const OrderUnitSpace& e, const Permutation& gamma,
                                               const State& sample);

}  // namespace kvwb
