#include "kvwb/linearization.hpp"

#include "kvwb/lp.hpp"

#include <algorithm>
#include <set>

namespace kvwb {

namespace {

void collect_generators(OrderUnitSpace& e) {
    for (int x = 0; x < e.outcome_count(); ++x) {
        QVector v = e.outcome_vector(x);
        auto it = std::find(e.cone_generators.begin(), e.cone_generators.end(), v);
        if (it == e.cone_generators.end()) {
            e.cone_generators.push_back(std::move(v));
            e.generator_outcome.push_back(x);
        } else {
            const auto k = static_cast<size_t>(it - e.cone_generators.begin());
            e.identifications.emplace_back(x, e.generator_outcome[k]);
        }
    }
}

OrderUnitSpace build_polytope(const Model& m) {
    const auto& extreme = m.polytope().extreme;
    const int n = m.testspace.size();
    QMatrix probs(n, static_cast<Eigen::Index>(extreme.size()));
    for (size_t v = 0; v < extreme.size(); ++v) probs.col(static_cast<Eigen::Index>(v)) = extreme[v];

    OrderUnitSpace e;
    e.backend = Backend::Polytope;
    const auto cols = independent_columns(probs);
    e.dim = static_cast<int>(cols.size());
    QMatrix basis(n, e.dim);
    for (int k = 0; k < e.dim; ++k) {
        e.basis_states.push_back(static_cast<int>(cols[static_cast<size_t>(k)]));
        basis.col(k) = probs.col(cols[static_cast<size_t>(k)]);
    }
    e.outcome_vectors = basis.transpose();
    e.unit = QVector::Constant(e.dim, Rational(1));
    e.state_functionals = zero_matrix(e.dim, probs.cols());
    for (Eigen::Index v = 0; v < probs.cols(); ++v) {
        auto c = solve(basis, probs.col(v));
        if (!c) throw Error("internal: extreme state outside the span of the basis states");
        e.state_functionals.col(v) = *c;
    }
    collect_generators(e);
    return e;
}

OrderUnitSpace build_quantum(const Model& m) {
    const auto& q = m.quantum();
    OrderUnitSpace e;
    e.backend = Backend::Quantum;
    e.operators.emplace(q.field, q.dim);
    const OperatorBasis& ops = *e.operators;
    e.dim = ops.size();
    e.outcome_vectors = zero_matrix(e.dim, m.testspace.size());
    for (int x = 0; x < m.testspace.size(); ++x)
        e.outcome_vectors.col(x) = ops.coordinates(q.projectors[static_cast<size_t>(x)]);
    if (rank(e.outcome_vectors) != e.dim)
        throw ModelError(m.name + ": the sampled projectors do not span the Hermitian matrices");
    e.unit = ops.coordinates(CMatrix::identity(q.dim));
    collect_generators(e);
    return e;
}

/// M with M * source.col(x) = target.col(x) for all x.
QMatrix solve_extension(const QMatrix& source, const QMatrix& target) {
    const auto cols = independent_columns(source);
    const auto k = static_cast<Eigen::Index>(cols.size());
    QMatrix xs(source.rows(), k);
    QMatrix ys(target.rows(), k);
    for (Eigen::Index i = 0; i < k; ++i) {
        xs.col(i) = source.col(cols[static_cast<size_t>(i)]);
        ys.col(i) = target.col(cols[static_cast<size_t>(i)]);
    }
    // Full column rank: use the left inverse (xs^T xs)^{-1} xs^T.
    auto gram_inv = inverse(QMatrix(xs.transpose() * xs));
    if (!gram_inv) throw Error("internal: independent columns produced a singular Gram matrix");
    QMatrix m = ys * (*gram_inv) * xs.transpose();
    for (Eigen::Index x = 0; x < source.cols(); ++x) {
        if (QVector(m * source.col(x)) != QVector(target.col(x)))
            throw InconsistentExtension("no linear map extends the outcome assignment (outcome " +
                                            std::to_string(x) + ")",
                                        static_cast<int>(x), -1);
    }
    return m;
}

}  // namespace

OrderUnitSpace build_effect_space(const Model& m) {
    require_valid(m);
    return m.is_quantum() ? build_quantum(m) : build_polytope(m);
}

QVector vector_of_operator(const OrderUnitSpace& e, const CMatrix& hermitian) {
    if (!e.operators) throw Error("vector_of_operator needs a quantum effect space");
    return e.operators->coordinates(hermitian);
}

QVector functional_of_density(const OrderUnitSpace& e, const CMatrix& rho) {
    if (!e.operators) throw Error("functional_of_density needs a quantum effect space");
    return e.operators->functional_of_operator(rho);
}

QMatrix linearize_permutation(const OrderUnitSpace& e, const Permutation& g) {
    if (static_cast<int>(g.size()) != e.outcome_count()) throw DimensionMismatch("permutation has the wrong degree");
    QMatrix target(e.dim, e.outcome_count());
    for (int x = 0; x < e.outcome_count(); ++x) target.col(x) = e.outcome_vector(g[static_cast<size_t>(x)]);
    return solve_extension(e.outcome_vectors, target);
}

std::vector<QMatrix> group_actions(const Model& m, const OrderUnitSpace& e) {
    std::vector<QMatrix> out;
    for (const auto& g : m.group.permutations) out.push_back(linearize_permutation(e, g));
    if (e.operators)
        for (const auto& u : m.group.unitaries) out.push_back(e.operators->conjugation_action(u));
    for (const auto& a : m.group.linear_actions) {
        if (a.rows() != e.dim || a.cols() != e.dim) throw DimensionMismatch("linear generator has the wrong size");
        out.push_back(a);
    }
    return out;
}

QMatrix linearize_morphism(const Morphism& f, const OrderUnitSpace& ea, const OrderUnitSpace& eb) {
    if (static_cast<int>(f.outcome_map.size()) != ea.outcome_count())
        throw DimensionMismatch("outcome map does not cover the source outcomes");
    QMatrix target(eb.dim, ea.outcome_count());
    for (int x = 0; x < ea.outcome_count(); ++x) {
        const int y = f.outcome_map[static_cast<size_t>(x)];
        if (y < 0 || y >= eb.outcome_count()) throw UnknownOutcome("outcome map leaves the target outcomes");
        target.col(x) = eb.outcome_vector(y);
    }
    try {
        return solve_extension(ea.outcome_vectors, target);
    } catch (const InconsistentExtension& err) {
        const int x = err.source_outcome;
        throw InconsistentExtension(err.what(), x, f.outcome_map[static_cast<size_t>(x)]);
    }
}

ValidationReport validate_morphism(const Model& a, const Model& b, const Morphism& f) {
    ValidationReport report;
    const int na = a.testspace.size();
    const int nb = b.testspace.size();
    if (static_cast<int>(f.outcome_map.size()) != na) {
        report.violations.push_back({"outcome-map-size", "outcome map must assign every source outcome"});
        return report;
    }
    for (int y : f.outcome_map) {
        if (y < 0 || y >= nb) {
            report.violations.push_back({"outcome-map-range", "outcome map leaves the target outcomes"});
            return report;
        }
    }
    const auto target_tests = b.testspace.test_set();
    for (size_t t = 0; t < a.testspace.tests.size(); ++t) {
        std::set<int> img;
        for (int x : a.testspace.tests[t]) img.insert(f.outcome_map[static_cast<size_t>(x)]);
        if (!target_tests.count(std::vector<int>(img.begin(), img.end())))
            report.violations.push_back({"test-not-mapped-to-test", "image of test " + std::to_string(t) + " is not a test"});
    }
    if (!f.group_map.empty()) {
        if (f.group_map.size() != a.group.permutations.size()) {
            report.violations.push_back({"group-map-size", "one target element is needed per source generator"});
        } else {
            for (size_t k = 0; k < f.group_map.size(); ++k) {
                const auto& g = a.group.permutations[k];
                const auto& h = f.group_map[k];
                if (static_cast<int>(h.size()) != nb) {
                    report.violations.push_back({"group-map-degree", "target element " + std::to_string(k) + " has the wrong degree"});
                    continue;
                }
                for (int x = 0; x < na; ++x) {
                    if (f.outcome_map[static_cast<size_t>(g[static_cast<size_t>(x)])] !=
                        h[static_cast<size_t>(f.outcome_map[static_cast<size_t>(x)])]) {
                        report.violations.push_back({"not-equivariant", "phi(g x) != psi(g) phi(x) for generator " + std::to_string(k)});
                        break;
                    }
                }
            }
        }
    }
    return report;
}

}  // namespace kvwb
