#pragma once

// Euclidean Jordan algebras: a catalog of the simple kinds and direct sums,
// cone-of-squares checks, and recovery of a Jordan product from a self-dual
// cone with an invariant inner product.

#include "kvwb/cones.hpp"
#include "kvwb/forms.hpp"

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace kvwb {

enum class JordanKind { RealSym, ComplexHerm, QuatHerm, SpinFactor, DirectSum, Recovered };

std::string to_string(JordanKind k);

/// (a o b)_k = a^T structure[k] b. Catalog algebras also carry exact
/// rational structure constants and, for the matrix kinds, the basis as
/// complex matrices (quaternion entries as 2x2 complex blocks).
struct JordanAlgebra {
    JordanKind kind = JordanKind::Recovered;
    int n = 0;  // matrix size, or the vector dimension of a spin factor
    int dim = 0;
    std::vector<Eigen::MatrixXd> structure;
    Eigen::VectorXd unit;
    std::vector<QMatrix> exact_structure;  // empty when only float data exist
    QVector exact_unit;
    std::vector<Eigen::MatrixXcd> matrix_basis;
    std::vector<double> basis_norms;  // Re tr(l_k^2) for matrix kinds
    std::vector<JordanAlgebra> summands;

    bool is_exact() const { return !exact_structure.empty(); }
    std::string name() const;
};

JordanAlgebra real_symmetric(int n);
JordanAlgebra complex_hermitian(int n);
JordanAlgebra quaternion_hermitian(int n);
/// Coordinates (x_1..x_n, s): (x,s) o (y,t) = (t y + s x, <x,y> + s t).
JordanAlgebra spin_factor(int n);
JordanAlgebra direct_sum(const std::vector<JordanAlgebra>& parts);
/// "RealSym(3)", "SpinFactor(4)", "R", and sums such as "R + ComplexHerm(2)".
/// Throws ParseError for unknown names.
JordanAlgebra catalog_algebra(const std::string& name);
/// Recovered or hand-made algebra from float structure constants.
JordanAlgebra algebra_from_structure(std::vector<Eigen::MatrixXd> structure, Eigen::VectorXd unit);
/// Exact variant; float data are derived.
JordanAlgebra algebra_from_exact_structure(std::vector<QMatrix> structure, QVector unit);

Eigen::VectorXd jordan_product(const JordanAlgebra& j, const Eigen::VectorXd& a, const Eigen::VectorXd& b);
QVector jordan_product(const JordanAlgebra& j, const QVector& a, const QVector& b);

/// L_a with L_a b = a o b.
Eigen::MatrixXd left_multiplication(const JordanAlgebra& j, const Eigen::VectorXd& a);

/// P(a) = 2 L_a^2 - L_{a^2}.
Eigen::MatrixXd quadratic_rep(const JordanAlgebra& j, const Eigen::VectorXd& a);

/// tr(L_{a o b}), positive definite exactly when the algebra is formally real.
Eigen::MatrixXd trace_form(const JordanAlgebra& j);
QMatrix exact_trace_form(const JordanAlgebra& j);

struct SpectralDecomposition {
    bool ok = false;
    std::string error;
    std::vector<double> eigenvalues;                // ascending
    std::vector<Eigen::VectorXd> idempotents;       // one per eigenvalue, summing to the unit
};

/// Matrix kinds: Hermitian eigensolver on the matrix form; spin factors in
/// closed form; direct sums blockwise; other algebras from the minimal
/// polynomial of a (Krylov on powers, roots of the companion matrix).
SpectralDecomposition spectral_decomposition(const JordanAlgebra& j, const Eigen::VectorXd& a);

/// sum_i sqrt(max(lambda_i, 0)) c_i; eigenvalues below -1e-12 are an error.
std::optional<Eigen::VectorXd> jordan_sqrt(const JordanAlgebra& j, const Eigen::VectorXd& a);

bool cone_of_squares_membership(const JordanAlgebra& j, const Eigen::VectorXd& a, double tol = 1e-9);

struct IdentityCheck {
    bool commutative = false;
    bool unital = false;
    std::optional<bool> exact_identity;  // rational check on basis elements and pair sums
    double residual = 0;                 // worst |a^2 o (b o a) - (a^2 o b) o a| on float samples
    bool passed(double tol = 1e-8) const;
};

IdentityCheck check_jordan_identity(const JordanAlgebra& j, int sample_count = 20, std::uint64_t seed = 42);

struct SymmetricConeReport {
    IdentityCheck identity;
    bool identity_gate = false;
    bool self_dual = false;
    double min_pairing = 0;           // worst pairing of cone samples and primitive idempotents
    bool homogeneous = false;
    double max_sqrt_error = 0;        // max |P(w^{1/2}) e - w|
    bool cone_preserved = false;      // P(w^{1/2}) maps cone samples into the cone
    bool formally_real = false;
    double trace_form_floor = 0;
    int samples = 0;
    std::uint64_t seed = 0;
    bool pass = false;
    std::string failure;
};

SymmetricConeReport verify_symmetric_cone(const JordanAlgebra& j, int sample_count = 50, std::uint64_t seed = 42);

struct RecoveryProblem {
    QMatrix form;
    QVector unit;
    std::vector<QMatrix> generators;
    Cone cone;
    bool impose_equivariance = true;
    /// Outcome vectors on extreme rays of the cone with B(x, x) = B(x, u). An
    /// associative B forces these to be idempotents, a linear condition.
    std::vector<QVector> sharp_outcomes;
    bool impose_outcome_idempotence = true;
    std::uint64_t seed = 42;
    int newton_seeds = 8;
};

RecoveryProblem recovery_problem(const OrderUnitSpace& e, const LinearGroup& g, const QMatrix& form);

/// The problem for the cone t K: unit t u, generators t M t^{-1}; t must be
/// an isometry of the form.
RecoveryProblem transport_problem(const RecoveryProblem& p, const QMatrix& t);

/// Cayley transform (1 - K)(1 + K)^{-1} with K = B^{-1} S, S antisymmetric
/// with small integer entries from `seed`: an exact rational isometry of B.
QMatrix random_form_isometry(const QMatrix& form, std::uint64_t seed);

struct NewtonRun {
    std::uint64_t seed = 0;
    bool converged = false;
    double residual = 0;
    int iterations = 0;
};

struct RecoveryResult {
    std::optional<JordanAlgebra> algebra;
    std::string status;  // "recovered", "hypotheses not met", "no formally real solution", "linear system inconsistent"
    int linear_solution_dim = 0;
    bool exact = false;   // the linear stage alone fixed the product, in exact arithmetic
    double residual = 0;
    bool unique = false;  // every accepted seed reached the same tensor
    double seed_spread = 0;
    std::vector<NewtonRun> runs;
    bool self_dual_verified = false;
    bool squares_in_cone = false;
    bool trace_form_pd = false;
    std::vector<std::string> imposed_constraints;
};

RecoveryResult recover_jordan_product(const RecoveryProblem& p);

struct Identification {
    int rank = 0;
    std::vector<std::pair<int, int>> simple_components;  // (dim, rank) per simple ideal
    std::vector<std::string> candidates;  // isomorphic names joined by " = "
};

/// Candidates from the center decomposition and (dim, rank) of each simple ideal.
Identification identify_algebra(const JordanAlgebra& j);

/// Names of the simple algebras with the given (dim, rank); isomorphic
/// descriptions are joined by " = " into one entry.
std::vector<std::string> simple_candidates(int dim, int rank);

}  // namespace kvwb
