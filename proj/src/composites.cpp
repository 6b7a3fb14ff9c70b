#include "kvwb/composites.hpp"

#include "kvwb/lp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace kvwb {

BipartiteState product_state(const State& a, const State& b) {
    return BipartiteState{QMatrix(a * b.transpose())};
}

Conditional conditional(const BipartiteState& w, int x) {
    if (x < 0 || x >= w.table.rows()) throw UnknownOutcome("outcome index out of range");
    Conditional c;
    c.values = w.table.row(x).transpose();
    c.zero_mass = is_zero(c.values);
    return c;
}

State marginal_a(const BipartiteState& w, const Model& b) {
    State m = zero_vector(w.table.rows());
    for (int y : b.testspace.tests.front()) m += w.table.col(y);
    return m;
}

State marginal_b(const BipartiteState& w, const Model& a) {
    State m = zero_vector(w.table.cols());
    for (int x : a.testspace.tests.front()) m += w.table.row(x).transpose();
    return m;
}

namespace {

// Is `probs` (a function on outcomes) in the cone generated by the states?
bool in_state_cone(const Model& m, const OrderUnitSpace& e, const QVector& probs, double tol) {
    if (!m.is_quantum()) {
        const auto& extreme = m.polytope().extreme;
        QMatrix v(probs.size(), static_cast<Eigen::Index>(extreme.size()));
        for (size_t k = 0; k < extreme.size(); ++k) v.col(static_cast<Eigen::Index>(k)) = extreme[k];
        return find_feasible_point(v, probs).status == LpStatus::Optimal;
    }
    auto f = solve(QMatrix(e.outcome_vectors.transpose()), probs);
    if (!f) return false;
    const Eigen::MatrixXcd op = e.operators->operator_of_functional(*f).to_complex();
    if (op.norm() == 0) return true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff() >= -tol * op.norm();
}

QMatrix square_of_columns(const QMatrix& vectors, const std::vector<Eigen::Index>& cols) {
    QMatrix s(vectors.rows(), static_cast<Eigen::Index>(cols.size()));
    for (size_t i = 0; i < cols.size(); ++i) s.col(static_cast<Eigen::Index>(i)) = vectors.col(cols[i]);
    return s;
}

}  // namespace

ValidationReport validate_bipartite(const Model& a, const Model& b, const BipartiteState& w) {
    ValidationReport report;
    if (w.table.rows() != a.testspace.size() || w.table.cols() != b.testspace.size()) {
        report.violations.push_back({"table-shape", "table does not match the two outcome sets"});
        return report;
    }
    for (Eigen::Index i = 0; i < w.table.size(); ++i) {
        if (w.table(i) < 0) {
            report.violations.push_back({"negative-entry", "table has a negative entry"});
            break;
        }
    }
    for (size_t s = 0; s < a.testspace.tests.size(); ++s) {
        for (size_t t = 0; t < b.testspace.tests.size(); ++t) {
            Rational sum = 0;
            for (int x : a.testspace.tests[s])
                for (int y : b.testspace.tests[t]) sum += w.table(x, y);
            if (sum != 1)
                report.violations.push_back({"product-normalization violated", "tests " + std::to_string(s) + " x " +
                                                                                   std::to_string(t) + " sum to " + to_string(sum)});
        }
    }
    const auto ea = build_effect_space(a);
    const auto eb = build_effect_space(b);
    for (Eigen::Index x = 0; x < w.table.rows(); ++x)
        if (!in_state_cone(b, eb, w.table.row(x).transpose(), 1e-9))
            report.violations.push_back({"conditional-not-in-cone", "conditional on '" + a.testspace.outcomes[static_cast<size_t>(x)] + "'"});
    for (Eigen::Index y = 0; y < w.table.cols(); ++y)
        if (!in_state_cone(a, ea, w.table.col(y), 1e-9))
            report.violations.push_back({"conditional-not-in-cone", "conditional on '" + b.testspace.outcomes[static_cast<size_t>(y)] + "'"});
    return report;
}

QMatrix table_form(const OrderUnitSpace& ea, const OrderUnitSpace& eb, const BipartiteState& w) {
    if (w.table.rows() != ea.outcome_count() || w.table.cols() != eb.outcome_count())
        throw DimensionMismatch("table does not match the effect spaces");
    const auto sa = independent_columns(ea.outcome_vectors);
    const auto sb = independent_columns(eb.outcome_vectors);
    const QMatrix xa = square_of_columns(ea.outcome_vectors, sa);
    const QMatrix xb = square_of_columns(eb.outcome_vectors, sb);
    QMatrix t(static_cast<Eigen::Index>(sa.size()), static_cast<Eigen::Index>(sb.size()));
    for (size_t i = 0; i < sa.size(); ++i)
        for (size_t j = 0; j < sb.size(); ++j) t(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = w.table(sa[i], sb[j]);
    const QMatrix form = QMatrix(inverse(xa)->transpose()) * t * *inverse(xb);
    const QMatrix reproduced = ea.outcome_vectors.transpose() * form * eb.outcome_vectors;
    for (Eigen::Index x = 0; x < reproduced.rows(); ++x)
        for (Eigen::Index y = 0; y < reproduced.cols(); ++y)
            if (reproduced(x, y) != w.table(x, y))
                throw InconsistentExtension("table is not bilinear in the outcome vectors at (" + std::to_string(x) + ", " +
                                                std::to_string(y) + ")",
                                            static_cast<int>(x), static_cast<int>(y));
    return form;
}

BipartiteState table_of_form(const OrderUnitSpace& ea, const OrderUnitSpace& eb, const QMatrix& w) {
    return BipartiteState{QMatrix(ea.outcome_vectors.transpose() * w * eb.outcome_vectors)};
}

QMatrix omega_hat(const OrderUnitSpace& ea, const OrderUnitSpace& eb, const BipartiteState& w) {
    return table_form(ea, eb, w).transpose();
}

IsomorphismCheck is_isomorphism_state(const OrderUnitSpace& ea, const OrderUnitSpace& eb, const BipartiteState& w) {
    IsomorphismCheck r;
    const QMatrix hat = omega_hat(ea, eb, w);
    const Cone ka = effect_cone(ea);
    const Cone kb_dual = dual_cone(effect_cone(eb), identity_matrix(eb.dim));
    r.method = ka.kind == ConeKind::Polyhedral && kb_dual.kind == ConeKind::Polyhedral ? "exact" : "sampled+analytic";
    const auto inv = hat.rows() == hat.cols() ? inverse(hat) : std::nullopt;
    r.invertible = inv.has_value();
    r.positive = is_positive_map(hat, ka, kb_dual).verdict;
    if (inv) r.inverse_positive = is_positive_map(*inv, kb_dual, ka).verdict;
    r.verdict = r.invertible && r.positive && r.inverse_positive;
    return r;
}

Permutation conjugation_map(const Model& m) {
    const int n = m.testspace.size();
    if (!m.is_quantum()) return identity_permutation(n);
    const auto& p = m.quantum().projectors;
    Permutation gamma(static_cast<size_t>(n), -1);
    for (int x = 0; x < n; ++x) {
        const CMatrix c = p[static_cast<size_t>(x)].conjugate();
        for (int y = 0; y < n; ++y) {
            if (p[static_cast<size_t>(y)] == c) {
                gamma[static_cast<size_t>(x)] = y;
                break;
            }
        }
        if (gamma[static_cast<size_t>(x)] < 0)
            throw ModelError(m.name + ": outcome '" + m.testspace.outcomes[static_cast<size_t>(x)] +
                             "' has no complex-conjugate outcome in the sample");
    }
    return gamma;
}

BipartiteState maximally_entangled(const Model& m) {
    const auto& q = m.quantum();
    return purification_witness(m, CMatrix::identity(q.dim));
}

BipartiteState purification_witness(const Model& m, const CMatrix& s) {
    const auto& p = m.quantum().projectors;
    const int n = m.testspace.size();
    const Rational norm = (s * s).trace_re();
    QMatrix table(n, n);
    for (int x = 0; x < n; ++x) {
        const CMatrix left = s * p[static_cast<size_t>(x)] * s;
        for (int y = 0; y < n; ++y) table(x, y) = (left * p[static_cast<size_t>(y)].conjugate()).trace_re() / norm;
    }
    return BipartiteState{table};
}

namespace {

struct AffineSolution {
    QMatrix particular;             // d x d
    std::vector<QMatrix> directions;
};

std::optional<AffineSolution> solve_equalities(const std::vector<QVector>& rows, const std::vector<Rational>& rhs, int d) {
    const int n = d * d;
    QMatrix a = zero_matrix(std::max<Eigen::Index>(1, static_cast<Eigen::Index>(rows.size())), n);
    QVector b = zero_vector(a.rows());
    for (size_t i = 0; i < rows.size(); ++i) {
        a.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
        b(static_cast<Eigen::Index>(i)) = rhs[i];
    }
    const auto x = solve(a, b);
    if (!x) return std::nullopt;
    AffineSolution s;
    s.particular = x->reshaped<Eigen::RowMajor>(d, d);
    const QMatrix null = nullspace(a);
    for (Eigen::Index c = 0; c < null.cols(); ++c) s.directions.push_back(QVector(null.col(c)).reshaped<Eigen::RowMajor>(d, d));
    return s;
}

// Coefficients of a^T W b in the row-major entries of W.
QVector bilinear_row(const QVector& a, const QVector& b) {
    const auto d = a.size();
    QVector row(d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) row(i * d + j) = a(i) * b(j);
    return row;
}

QVector rational_eigenvector(const Eigen::VectorXcd& v, const OperatorBasis& ops, const OrderUnitSpace& e) {
    // Round to a Gaussian-integer vector; the projector onto it is exact.
    const double scale = 1e6 / v.cwiseAbs().maxCoeff();
    GaussVector g;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const long re = std::lround(v(i).real() * scale);
        const long im = ops.field() == Field::Complex ? std::lround(v(i).imag() * scale) : 0;
        g.emplace_back(re, im);
    }
    return vector_of_operator(e, projector(g));
}

}  // namespace

ConjugateSearch find_conjugate_state(const Model& m, const OrderUnitSpace& e, const LinearGroup& g,
                                     const Permutation& gamma, bool require_invariance, std::uint64_t seed) {
    const int n = m.rank();
    const int d = e.dim;
    {
        const auto tests = m.testspace.test_set();
        for (const auto& t : tests) {
            std::vector<int> img;
            for (int x : t) img.push_back(gamma[static_cast<size_t>(x)]);
            std::sort(img.begin(), img.end());
            if (!tests.count(img)) throw ModelError("conjugation map does not send tests to tests");
        }
    }
    const QMatrix gam = linearize_permutation(e, gamma);

    std::vector<QVector> rows;
    std::vector<Rational> rhs;
    rows.push_back(bilinear_row(e.unit, e.unit));
    rhs.emplace_back(1);
    for (int x = 0; x < m.testspace.size(); ++x) {
        rows.push_back(bilinear_row(e.outcome_vector(x), e.outcome_vector(gamma[static_cast<size_t>(x)])));
        rhs.emplace_back(1, n);
    }
    // The diagonal exhausts the mass of every product test T x gamma(T), so
    // eta(x, gamma y) = 0 for x != y in a common test.
    std::vector<std::pair<int, int>> zero_pairs;
    for (const auto& t : m.testspace.tests)
        for (int x : t)
            for (int y : t)
                if (x != y) zero_pairs.emplace_back(x, gamma[static_cast<size_t>(y)]);
    for (const auto& [x, y] : zero_pairs) {
        rows.push_back(bilinear_row(e.outcome_vector(x), e.outcome_vector(y)));
        rhs.emplace_back(0);
    }
    if (m.is_quantum()) {
        // A PSD conditional F with tr(F P) = 0 satisfies F P = 0 exactly.
        const auto& ops = *e.operators;
        const auto& p = m.quantum().projectors;
        std::vector<CMatrix> dual_basis;
        for (int k = 0; k < d; ++k) {
            QVector ek = zero_vector(d);
            ek(k) = 1;
            dual_basis.push_back(ops.operator_of_functional(ek));
        }
        auto add_annihilation = [&](const QVector& fixed, bool fixed_on_left, const CMatrix& proj) {
            // F = sum_j (sum_i fixed_i W_ij) L_j   (fixed on the left)
            // F = sum_i (sum_j W_ij fixed_j) L_i   (fixed on the right)
            std::vector<CMatrix> products;
            for (const auto& l : dual_basis) products.push_back(l * proj);
            const Eigen::Index h = proj.dim();
            for (Eigen::Index r = 0; r < h; ++r) {
                for (Eigen::Index c = 0; c < h; ++c) {
                    for (const bool imag : {false, true}) {
                        QVector row = zero_vector(d * d);
                        for (int i = 0; i < d; ++i) {
                            for (int j = 0; j < d; ++j) {
                                const CMatrix& lp = products[static_cast<size_t>(fixed_on_left ? j : i)];
                                const Rational& entry = imag ? lp.im(r, c) : lp.re(r, c);
                                if (entry != 0) row(i * d + j) += (fixed_on_left ? fixed(i) : fixed(j)) * entry;
                            }
                        }
                        if (!is_zero(row)) {
                            rows.push_back(std::move(row));
                            rhs.emplace_back(0);
                        }
                    }
                }
            }
        };
        for (const auto& [x, y] : zero_pairs) {
            add_annihilation(e.outcome_vector(x), true, p[static_cast<size_t>(y)]);
            add_annihilation(e.outcome_vector(y), false, p[static_cast<size_t>(x)]);
        }
    }
    if (require_invariance) {
        // M^T W (Gamma M) - W Gamma = 0, entry (p, q).
        for (const auto& mg : g.generators) {
            const QMatrix gm = gam * mg;
            for (int p = 0; p < d; ++p) {
                for (int q = 0; q < d; ++q) {
                    QVector row = bilinear_row(mg.col(p), gm.col(q));
                    for (int j = 0; j < d; ++j) row(p * d + j) -= gam(j, q);
                    if (!is_zero(row)) {
                        rows.push_back(std::move(row));
                        rhs.emplace_back(0);
                    }
                }
            }
        }
    }

    ConjugateSearch res;
    const auto affine = solve_equalities(rows, rhs, d);
    res.method = m.is_quantum() ? "sampled+analytic" : "exact";
    if (!affine) return res;
    res.free_parameters = static_cast<int>(affine->directions.size());
    const int k = res.free_parameters;

    std::vector<QVector> probes = e.cone_generators;
    if (m.is_quantum()) {
        const auto& q = m.quantum();
        for (const auto& p : random_pure_projectors(q.field, q.dim, 6, seed)) probes.push_back(vector_of_operator(e, p));
    }
    const std::vector<QVector>& outcomes = e.cone_generators;

    for (int round = 0; round <= 20; ++round) {
        LinearProgram lp;
        lp.add_variables(k, true);
        auto add_pair = [&](const QVector& a, const QVector& b) {
            LinearExpr terms;
            for (int i = 0; i < k; ++i) {
                const Rational c = a.dot(affine->directions[static_cast<size_t>(i)] * b);
                if (c != 0) terms.emplace_back(i, c);
            }
            const Rational base = a.dot(affine->particular * b);
            lp.add_constraint(std::move(terms), Sense::GreaterEqual, -base);
        };
        for (const auto& a : outcomes) {
            for (const auto& b : probes) {
                add_pair(a, b);
                add_pair(b, a);
            }
        }
        if (!m.is_quantum()) {
            // Conditionals on either side lie in the cone over the state polytope:
            // W^T a = sum_v mu_v f_v and W a = sum_v nu_v f_v with mu, nu >= 0.
            const QMatrix& f = e.state_functionals;
            for (const auto& a : outcomes) {
                for (const bool transpose : {true, false}) {
                    const int mu = lp.add_variables(static_cast<int>(f.cols()));
                    for (int i = 0; i < d; ++i) {
                        LinearExpr terms;
                        for (int t = 0; t < k; ++t) {
                            const auto& dir = affine->directions[static_cast<size_t>(t)];
                            const Rational c = transpose ? QVector(dir.transpose() * a)(i) : QVector(dir * a)(i);
                            if (c != 0) terms.emplace_back(t, c);
                        }
                        for (Eigen::Index v = 0; v < f.cols(); ++v)
                            if (f(i, v) != 0) terms.emplace_back(mu + static_cast<int>(v), -f(i, v));
                        const Rational base = transpose ? QVector(affine->particular.transpose() * a)(i)
                                                        : QVector(affine->particular * a)(i);
                        lp.add_constraint(std::move(terms), Sense::Equal, -base);
                    }
                }
            }
        }
        const auto sol = lp.solve();
        if (sol.status != LpStatus::Optimal) return res;
        QMatrix w = affine->particular;
        for (int i = 0; i < k; ++i) w += sol.values(i) * affine->directions[static_cast<size_t>(i)];

        if (m.is_quantum()) {
            // Analytic check: every conditional functional must be PSD.
            bool added = false;
            for (const auto& a : outcomes) {
                for (const QVector& fn : {QVector(w.transpose() * a), QVector(w * a)}) {
                    const Eigen::MatrixXcd op = e.operators->operator_of_functional(fn).to_complex();
                    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(op);
                    if (solver.eigenvalues()(0) < -1e-12 * std::max(1.0, op.norm())) {
                        probes.push_back(rational_eigenvector(solver.eigenvectors().col(0), *e.operators, e));
                        added = true;
                    }
                }
            }
            if (added) {
                if (k == 0) return res;
                res.cutting_rounds = round + 1;
                continue;
            }
        }
        res.form = w;
        res.eta = table_of_form(e, e, w);
        return res;
    }
    return res;
}

ConjugateForm spin_form_from_conjugate(const Model& m, const OrderUnitSpace& e, const LinearGroup& g, const Conjugate& c) {
    ConjugateForm out;
    const QMatrix w = table_form(e, e, c.eta);
    QMatrix b = w * linearize_permutation(e, c.gamma);
    bool invariant = true;
    for (const auto& mg : g.generators)
        if (QMatrix(mg.transpose() * b * mg) != b) invariant = false;
    if (!invariant) {
        b = average_form(b, g);
        out.averaged = true;
    }
    out.symmetric = is_symmetric(b);
    out.form.matrix = b;
    out.form.flags = check_form_flags(b, m, e, g);
    return out;
}

HomogeneityReport homogeneity_report(const Model& m, const OrderUnitSpace& e, const std::vector<BipartiteState>& witnesses,
                                     const std::vector<State>& samples, double tol) {
    HomogeneityReport r;
    std::vector<State> marginals;
    for (const auto& w : witnesses) {
        r.witnesses.push_back(is_isomorphism_state(e, e, w));
        marginals.push_back(marginal_a(w, m));
    }
    std::vector<int> uncovered;
    for (size_t s = 0; s < samples.size(); ++s) {
        int found = -1;
        for (size_t w = 0; w < witnesses.size() && found < 0; ++w) {
            if (!r.witnesses[w].verdict) continue;
            bool match;
            if (m.is_quantum()) match = (to_double(QVector(marginals[w] - samples[s]))).cwiseAbs().maxCoeff() <= tol;
            else match = marginals[w] == samples[s];
            if (match) found = static_cast<int>(w);
        }
        r.covered.push_back(found >= 0);
        r.covering_witness.push_back(found);
        if (found < 0) uncovered.push_back(static_cast<int>(s));
    }
    r.all_covered = uncovered.empty() && !samples.empty();
    if (r.all_covered) {
        r.verdict = "homogeneity hypothesis verified on samples";
    } else {
        r.verdict = "uncovered samples:";
        for (int s : uncovered) r.verdict += " " + std::to_string(s);
    }
    return r;
}

std::optional<BipartiteState> diagonal_witness(const Model& m, const OrderUnitSpace& e, const Permutation& gamma,
                                               const State& sample) {
    const int d = e.dim;
    const auto fa = solve(QMatrix(e.outcome_vectors.transpose()), sample);
    if (!fa) return std::nullopt;
    LinearProgram lp;
    lp.add_variables(d * d, true);
    auto w_terms = [&](const QVector& a, const QVector& b) {
        LinearExpr terms;
        const QVector row = bilinear_row(a, b);
        for (int i = 0; i < d * d; ++i)
            if (row(i) != 0) terms.emplace_back(i, row(i));
        return terms;
    };
    // Marginal: W u = f_sample.
    for (int i = 0; i < d; ++i) {
        QVector ei = zero_vector(d);
        ei(i) = 1;
        lp.add_constraint(w_terms(ei, e.unit), Sense::Equal, (*fa)(i));
    }
    for (const auto& a : e.cone_generators)
        for (const auto& b : e.cone_generators) lp.add_constraint(w_terms(a, b), Sense::GreaterEqual, 0);
    const QMatrix& f = e.state_functionals;
    for (const auto& a : e.cone_generators) {
        for (const bool transpose : {true, false}) {
            const int mu = lp.add_variables(static_cast<int>(f.cols()));
            for (int i = 0; i < d; ++i) {
                QVector ei = zero_vector(d);
                ei(i) = 1;
                LinearExpr terms = transpose ? w_terms(a, ei) : w_terms(ei, a);
                for (Eigen::Index v = 0; v < f.cols(); ++v)
                    if (f(i, v) != 0) terms.emplace_back(mu + static_cast<int>(v), -f(i, v));
                lp.add_constraint(std::move(terms), Sense::Equal, 0);
            }
        }
    }
    LinearExpr objective;
    for (int x = 0; x < m.testspace.size(); ++x) {
        auto t = w_terms(e.outcome_vector(x), e.outcome_vector(gamma[static_cast<size_t>(x)]));
        objective.insert(objective.end(), t.begin(), t.end());
    }
    lp.set_objective(objective, true);
    const auto sol = lp.solve();
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    const QMatrix w = QVector(sol.values.head(d * d)).reshaped<Eigen::RowMajor>(d, d);
    return table_of_form(e, e, w);
}

}  // namespace kvwb
