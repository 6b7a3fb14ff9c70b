#pragma once

// Convex cones in coordinates: finitely generated (polyhedral) cones handled
// exactly, and positive semidefinite cones handled by a sample of extreme
// rays plus the analytic eigenvalue rule.

#include "kvwb/hermitian.hpp"
#include "kvwb/linearization.hpp"

#include <optional>
#include <string>
#include <vector>

namespace kvwb {

enum class ConeKind { Polyhedral, Psd };

struct Cone {
    ConeKind kind = ConeKind::Polyhedral;
    int dim = 0;
    /// Polyhedral: the generators (primitive, deduplicated). Psd: sampled extreme rays.
    std::vector<QVector> generators;

    /// Psd only: the operator basis, and the map from cone coordinates to
    /// operator-basis coordinates (identity unless the cone was transported).
    std::optional<OperatorBasis> operators;
    QMatrix to_operator;
    QMatrix from_operator;

    CMatrix operator_of(const QVector& v) const;
};

/// Polyhedral cone generated by `generators`; zero vectors are dropped and
/// positive multiples merged.
Cone polyhedral_cone(int dim, const std::vector<QVector>& generators);

/// PSD cone in operator-basis coordinates with the given sample of rays.
Cone psd_cone(const OperatorBasis& ops, std::vector<QVector> sample_rays);

/// PSD cone in coordinates v = transform^{-1} (operator coordinates).
Cone transported_psd_cone(const OperatorBasis& ops, const QMatrix& transform, std::vector<QVector> sample_rays);

/// The outcome-generated cone of E(A). Quantum spaces get the outcome
/// projectors plus pseudo-random rank-one projectors up to `sample_count` rays.
Cone effect_cone(const OrderUnitSpace& e, int sample_count = 20, std::uint64_t seed = 42);

/// Primitive integer representative of the ray through v (v != 0).
QVector normalize_ray(const QVector& v);

/// Same set of rays up to positive scaling and order.
bool same_rays(const std::vector<QVector>& a, const std::vector<QVector>& b);

struct MembershipCertificate {
    bool member = false;
    QVector coefficients;  // member: v = sum coefficients[i] * generators[i], coefficients >= 0
    QVector separator;     // non-member: separator . g >= 0 for all generators, separator . v < 0
    std::string method;    // "exact" or "analytic"
    double eigenvalue_floor = 0;  // Psd: smallest eigenvalue seen
};

MembershipCertificate membership(const Cone& k, const QVector& v, double tol = 1e-9);

/// Re-checks a polyhedral certificate by substitution.
bool verify_membership(const std::vector<QVector>& generators, const QVector& v, const MembershipCertificate& cert);

bool cone_membership(const OrderUnitSpace& e, const QVector& v, double tol = 1e-9);

/// Generators of {v : B(v, g) >= 0 for every generator g of K}, by double
/// description. The result lists extreme rays then +/- a basis of the lineality space.
Cone dual_cone(const Cone& k, const QMatrix& form);

/// Generators of {v : a_i . v >= 0 for every row a_i}.
std::vector<QVector> cone_from_inequalities(const QMatrix& rows, int dim);

/// Generators not in the cone of the others (extreme rays for pointed cones).
std::vector<QVector> irredundant_generators(const std::vector<QVector>& generators);

/// Membership of functional f (paired by dot product) in the dual of a PSD cone.
bool psd_dual_membership(const Cone& k, const QVector& functional, double tol);

struct DualityCertificate {
    bool verdict = false;
    std::string method;  // "exact" or "sampled+analytic"
    std::vector<QVector> cone_rays;
    std::vector<QVector> dual_rays;
    std::vector<MembershipCertificate> cone_in_dual;  // one per cone ray
    std::vector<MembershipCertificate> dual_in_cone;  // one per dual ray
    /// Psd: smallest pairing among sampled rays, and whether the form is a
    /// positive multiple of the trace form in the cone's coordinates.
    double min_sample_pairing = 0;
    std::optional<bool> form_is_trace_multiple;
};

DualityCertificate is_self_dual(const Cone& k, const QMatrix& form, double tol = 1e-9);

/// Re-checks every certificate embedded in a polyhedral duality certificate.
bool verify_duality_certificate(const DualityCertificate& cert);

struct WeakDualityResult {
    std::optional<bool> verdict;  // nullopt: unknown (cap exceeded or unsupported cone)
    QMatrix map;                  // invertible T with T K = K*
    std::vector<int> bijection;   // ray i of K -> ray bijection[i] of K*
    QVector scales;               // T r_i = scales[i] * d_{bijection[i]}
    std::string reason;
};

inline constexpr int kWeakSelfDualityRayCap = 12;

WeakDualityResult is_weakly_self_dual(const Cone& k, const QMatrix& form, int ray_cap = kWeakSelfDualityRayCap);

struct PositivityResult {
    bool verdict = false;
    std::string method;  // "exact" or "sampled+analytic"
    std::optional<int> failing_generator;
};

PositivityResult is_positive_map(const QMatrix& map, const Cone& source, const Cone& target, double tol = 1e-9);

PositivityResult is_order_isomorphism(const QMatrix& map, const Cone& source, const Cone& target, double tol = 1e-9);

}  // namespace kvwb
