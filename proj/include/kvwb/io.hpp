#pragma once

// JSON for models, bipartite tables, forms, cones, certificates and Jordan
// algebras. Rationals are strings "p/q"; floats are 17-digit decimal strings.

#include "kvwb/composites.hpp"
#include "kvwb/cones.hpp"
#include "kvwb/forms.hpp"
#include "kvwb/jordan.hpp"
#include "kvwb/model.hpp"

#include <json.hpp>

#include <cstdint>
#include <string>

namespace kvwb {

using Json = nlohmann::ordered_json;

Json to_json(const Rational& q);
/// Accepts "p/q", decimal strings and JSON numbers (read as their shortest decimal).
Rational rational_from_json(const Json& j);

Json to_json(const QVector& v);
Json to_json(const QMatrix& m);
QVector qvector_from_json(const Json& j);
QMatrix qmatrix_from_json(const Json& j);

Json decimal_json(double x);
Json decimal_json(const Eigen::VectorXd& v);
Json decimal_json(const Eigen::MatrixXd& m);
double double_from_json(const Json& j);
Eigen::VectorXd dvector_from_json(const Json& j);
Eigen::MatrixXd dmatrix_from_json(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

/// Model schema: outcomes, tests (by id), states {kind: polytope, extreme:
/// [{id: p}]} or {kind: quantum, field, dim}, group {kind: permutation,
/// generators: [{id: id}], cap}. Quantum models are built on the default
/// frame sample; `seed` drives their unitary generators.
Model model_from_json(const Json& j, std::uint64_t seed = 42);
Json model_to_json(const Model& m);
/// Path to a JSON model file; throws ParseError when unreadable.
Model load_model(const std::string& path, std::uint64_t seed = 42);

Json to_json(const ValidationReport& r);
Json to_json(const BisymmetryReport& r);
Json to_json(const FormFlags& f);
Json to_json(const BilinearForm& f);
/// {"matrix": [[...]]}, a bare matrix, or any object with such a "form" field.
QMatrix form_from_json(const Json& j);

/// Sparse table: [["x", "y", "p/q"], ...] over the non-zero entries.
Json bipartite_to_json(const Model& a, const Model& b, const BipartiteState& w);
BipartiteState bipartite_from_json(const Json& j, const Model& a, const Model& b);

Json to_json(const Cone& k);
Json to_json(const MembershipCertificate& c);
MembershipCertificate membership_from_json(const Json& j);
Json to_json(const DualityCertificate& c);
DualityCertificate duality_from_json(const Json& j);
Json to_json(const WeakDualityResult& r);
Json to_json(const IsomorphismCheck& c);
Json to_json(const HomogeneityReport& r);

/// {dim, unit, product, ...}: product[i][j] = e_i o e_j, exact when available.
Json to_json(const JordanAlgebra& j);
JordanAlgebra algebra_from_json(const Json& j);
Json to_json(const IdentityCheck& c);
Json to_json(const SymmetricConeReport& r);
Json to_json(const RecoveryResult& r);
Json to_json(const Identification& id);

}  // namespace kvwb
