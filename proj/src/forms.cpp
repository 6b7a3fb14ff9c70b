#include "kvwb/forms.hpp"

#include "kvwb/lp.hpp"

#include <Eigen/Eigenvalues>

namespace kvwb {

namespace {

// Unknowns are the entries B(k,l), k <= l, in row-major order.
int sym_index(int k, int l, int dim) {
    if (k > l) std::swap(k, l);
    return k * dim - k * (k - 1) / 2 + (l - k);
}

int sym_count(int dim) {
    return dim * (dim + 1) / 2;
}

// Coefficients of a^T B b as a linear function of the unknowns.
QVector sym_row(const QVector& a, const QVector& b, int dim) {
    QVector row = zero_vector(sym_count(dim));
    for (int k = 0; k < dim; ++k) {
        if (a(k) == 0 && b(k) == 0) continue;
        for (int l = k; l < dim; ++l) {
            if (k == l) row(sym_index(k, k, dim)) += a(k) * b(k);
            else row(sym_index(k, l, dim)) += a(k) * b(l) + a(l) * b(k);
        }
    }
    return row;
}

QMatrix form_from_unknowns(const QVector& s, int dim) {
    QMatrix b(dim, dim);
    for (int k = 0; k < dim; ++k)
        for (int l = 0; l < dim; ++l) b(k, l) = s(sym_index(k, l, dim));
    return b;
}

void append_invariance_rows(std::vector<QVector>& rows, const std::vector<QMatrix>& generators, int dim) {
    for (const auto& m : generators) {
        for (int i = 0; i < dim; ++i) {
            for (int j = i; j < dim; ++j) {
                QVector row = sym_row(m.col(i), m.col(j), dim);
                row(sym_index(i, j, dim)) -= 1;
                if (!is_zero(row)) rows.push_back(std::move(row));
            }
        }
    }
}

std::vector<QMatrix> solve_forms(const std::vector<QVector>& rows, int dim) {
    const int n = sym_count(dim);
    QMatrix a = zero_matrix(std::max<Eigen::Index>(1, static_cast<Eigen::Index>(rows.size())), n);
    for (size_t i = 0; i < rows.size(); ++i) a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
    const QMatrix null = nullspace(a);
    std::vector<QMatrix> out;
    for (Eigen::Index c = 0; c < null.cols(); ++c) out.push_back(form_from_unknowns(null.col(c), dim));
    return out;
}

Rational frobenius(const QMatrix& a, const QMatrix& b) {
    return a.cwiseProduct(b).sum();
}

}  // namespace

LinearGroup linear_group(const Model& m, const OrderUnitSpace& e) {
    LinearGroup g;
    g.generators = group_actions(m, e);
    if (m.group.kind == GroupKind::FinitePermutation && !m.is_quantum()) {
        std::vector<QMatrix> elements;
        for (const auto& p : enumerate_group(m.group.permutations, m.testspace.size(), m.group.cap))
            elements.push_back(linearize_permutation(e, p));
        g.elements = std::move(elements);
    }
    return g;
}

Rational evaluate(const QMatrix& form, const QVector& a, const QVector& b) {
    return a.dot(form * b);
}

QMatrix unit_perp_basis(const QVector& unit, const QMatrix& form) {
    return nullspace(QMatrix((form * unit).transpose()));
}

std::vector<QMatrix> invariant_symmetric_forms(const std::vector<QMatrix>& generators, int dim) {
    std::vector<QVector> rows;
    append_invariance_rows(rows, generators, dim);
    return solve_forms(rows, dim);
}

std::vector<QMatrix> invariant_symmetric_forms(const OrderUnitSpace& e, const LinearGroup& g, Subspace subspace,
                                               const QMatrix& reference) {
    if (subspace == Subspace::Full) return invariant_symmetric_forms(g.generators, e.dim);
    const QMatrix p = unit_perp_basis(e.unit, reference);
    if (p.cols() == 0) return {};
    const QMatrix left = *inverse(QMatrix(p.transpose() * p)) * p.transpose();
    std::vector<QMatrix> restricted;
    for (const auto& m : g.generators) {
        const QMatrix mp = m * p;
        const QMatrix r = left * mp;
        if (QMatrix(p * r) != mp) throw Error("u-perp is not invariant under the group (reference form not invariant)");
        restricted.push_back(r);
    }
    return invariant_symmetric_forms(restricted, static_cast<int>(p.cols()));
}

QMatrix average_form(const QMatrix& b0, const LinearGroup& g) {
    if (g.elements) {
        QMatrix sum = zero_matrix(b0.rows(), b0.cols());
        for (const auto& m : *g.elements) sum += m.transpose() * b0 * m;
        return sum / Rational(static_cast<long>(g.elements->size()));
    }
    const auto basis = invariant_symmetric_forms(g.generators, static_cast<int>(b0.rows()));
    const auto k = static_cast<Eigen::Index>(basis.size());
    if (k == 0) return zero_matrix(b0.rows(), b0.cols());
    QMatrix gram(k, k);
    QVector rhs(k);
    for (Eigen::Index i = 0; i < k; ++i) {
        rhs(i) = frobenius(basis[static_cast<size_t>(i)], b0);
        for (Eigen::Index j = 0; j < k; ++j) gram(i, j) = frobenius(basis[static_cast<size_t>(i)], basis[static_cast<size_t>(j)]);
    }
    const QVector t = *solve(gram, rhs);
    QMatrix out = zero_matrix(b0.rows(), b0.cols());
    for (Eigen::Index i = 0; i < k; ++i) out += t(i) * basis[static_cast<size_t>(i)];
    return out;
}

IrreducibilityReport is_irreducible(const OrderUnitSpace& e, const LinearGroup& g) {
    IrreducibilityReport r;
    r.reference_form = average_form(identity_matrix(e.dim), g);
    if (!is_positive_definite(r.reference_form))
        throw Error("no positive-definite invariant form: the generators do not preserve any inner product");
    const auto forms = invariant_symmetric_forms(e, g, Subspace::UnitPerp, r.reference_form);
    r.form_space_dim = static_cast<int>(forms.size());
    r.irreducible = r.form_space_dim == 1;
    return r;
}

FormFlags check_form_flags(const QMatrix& form, const Model& m, const OrderUnitSpace& e, const LinearGroup& g) {
    FormFlags f;
    f.invariant = true;
    for (const auto& a : g.generators)
        if (QMatrix(a.transpose() * form * a) != form) f.invariant = false;
    f.normalized = evaluate(form, e.unit, e.unit) == 1;
    f.orthogonalizing = true;
    for (const auto& [x, y] : distinguishable_pairs(m.testspace))
        if (evaluate(form, e.outcome_vector(x), e.outcome_vector(y)) != 0) f.orthogonalizing = false;
    f.positive_on_cone = true;
    for (const auto& a : e.cone_generators)
        for (const auto& b : e.cone_generators)
            if (evaluate(form, a, b) < 0) f.positive_on_cone = false;
    f.positive_definite = is_positive_definite(form);
    return f;
}

SpinFormResult find_orthogonalizing_spin_form(const Model& m, const OrderUnitSpace& e, const LinearGroup& g) {
    const int dim = e.dim;
    std::vector<QVector> rows;
    append_invariance_rows(rows, g.generators, dim);
    for (const auto& [x, y] : distinguishable_pairs(m.testspace)) {
        if (x > y) continue;
        QVector row = sym_row(e.outcome_vector(x), e.outcome_vector(y), dim);
        if (!is_zero(row)) rows.push_back(std::move(row));
    }
    const auto basis = solve_forms(rows, dim);
    SpinFormResult res;
    res.solution_space_dim = static_cast<int>(basis.size());
    if (basis.empty()) return res;

    // Normalization and positivity on cone-generator pairs, as an LP in the
    // coefficients of the homogeneous solutions.
    const auto& gens = e.cone_generators;
    LinearProgram lp;
    const int k = static_cast<int>(basis.size());
    lp.add_variables(k, true);
    LinearExpr norm;
    for (int i = 0; i < k; ++i) norm.emplace_back(i, evaluate(basis[static_cast<size_t>(i)], e.unit, e.unit));
    lp.add_constraint(norm, Sense::Equal, 1);
    for (size_t a = 0; a < gens.size(); ++a) {
        for (size_t b = a; b < gens.size(); ++b) {
            LinearExpr terms;
            for (int i = 0; i < k; ++i) {
                const Rational v = evaluate(basis[static_cast<size_t>(i)], gens[a], gens[b]);
                if (v != 0) terms.emplace_back(i, v);
            }
            if (!terms.empty()) lp.add_constraint(std::move(terms), Sense::GreaterEqual, 0);
        }
    }
    const auto sol = lp.solve();
    if (sol.status != LpStatus::Optimal) return res;
    QMatrix b = zero_matrix(dim, dim);
    for (int i = 0; i < k; ++i) b += sol.values(i) * basis[static_cast<size_t>(i)];
    res.form = BilinearForm{b, check_form_flags(b, m, e, g)};
    return res;
}

UniquenessReport check_spin_uniqueness(const Model& m, const OrderUnitSpace& e, const LinearGroup& g) {
    UniquenessReport r;
    try {
        r.irreducible = is_irreducible(e, g).irreducible;
    } catch (const Error&) {
        r.irreducible = false;
    }
    auto spin = find_orthogonalizing_spin_form(m, e, g);
    r.solution_space_dim = spin.solution_space_dim;
    r.form_found = spin.form.has_value();
    if (spin.form) {
        r.positive_definite = spin.form->flags.positive_definite;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_double(spin.form->matrix), Eigen::EigenvaluesOnly);
        r.eigenvalue_floor = solver.eigenvalues().minCoeff();
    }
    r.form = std::move(spin.form);
    if (!r.irreducible) r.verdict = "hypothesis not met";
    else if (r.solution_space_dim <= 1 && (!r.form_found || *r.positive_definite)) r.verdict = "confirmed";
    else r.verdict = "violated";
    return r;
}

bool check_unitarity(const std::vector<QMatrix>& generators, const QMatrix& form) {
    if (determinant(form) == 0) throw Error("check_unitarity: the form is singular");
    for (const auto& m : generators)
        if (QMatrix(m.transpose() * form * m) != form) return false;
    return true;
}

}  // namespace kvwb
