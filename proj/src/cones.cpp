#include "kvwb/cones.hpp"

#include "kvwb/lp.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

namespace kvwb {

CMatrix Cone::operator_of(const QVector& v) const {
    if (!operators) throw Error("operator_of needs a PSD cone");
    return operators->matrix(QVector(to_operator * v));
}

QVector normalize_ray(const QVector& v) {
    return primitive(v);
}

Cone polyhedral_cone(int dim, const std::vector<QVector>& generators) {
    Cone k;
    k.kind = ConeKind::Polyhedral;
    k.dim = dim;
    std::set<std::vector<std::string>> seen;
    for (const auto& g : generators) {
        if (g.size() != dim) throw DimensionMismatch("cone generator has the wrong dimension");
        if (is_zero(g)) continue;
        QVector r = normalize_ray(g);
        if (seen.insert(to_strings(r)).second) k.generators.push_back(std::move(r));
    }
    return k;
}

Cone transported_psd_cone(const OperatorBasis& ops, const QMatrix& transform, std::vector<QVector> sample_rays) {
    auto inv = inverse(transform);
    if (!inv) throw Error("PSD cone transform must be invertible");
    Cone k;
    k.kind = ConeKind::Psd;
    k.dim = ops.size();
    k.operators.emplace(ops);
    k.to_operator = transform;
    k.from_operator = *inv;
    k.generators = std::move(sample_rays);
    return k;
}

Cone psd_cone(const OperatorBasis& ops, std::vector<QVector> sample_rays) {
    return transported_psd_cone(ops, identity_matrix(ops.size()), std::move(sample_rays));
}

Cone effect_cone(const OrderUnitSpace& e, int sample_count, std::uint64_t seed) {
    if (e.backend == Backend::Polytope) return polyhedral_cone(e.dim, e.cone_generators);
    std::vector<QVector> rays = e.cone_generators;
    const int extra = sample_count - static_cast<int>(rays.size());
    if (extra > 0) {
        for (const auto& p : random_pure_projectors(e.operators->field(), e.operators->hilbert_dim(), extra, seed))
            rays.push_back(e.operators->coordinates(p));
    }
    return psd_cone(*e.operators, std::move(rays));
}

bool same_rays(const std::vector<QVector>& a, const std::vector<QVector>& b) {
    std::set<std::vector<std::string>> sa, sb;
    for (const auto& v : a) sa.insert(to_strings(normalize_ray(v)));
    for (const auto& v : b) sb.insert(to_strings(normalize_ray(v)));
    return sa == sb;
}

namespace {

QMatrix columns(const std::vector<QVector>& vs, int dim) {
    QMatrix m(dim, static_cast<Eigen::Index>(vs.size()));
    for (size_t i = 0; i < vs.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = vs[i];
    return m;
}

MembershipCertificate polyhedral_membership(const std::vector<QVector>& generators, int dim, const QVector& v) {
    MembershipCertificate cert;
    cert.method = "exact";
    if (generators.empty()) {
        cert.member = is_zero(v);
        if (cert.member) cert.coefficients = QVector(0);
        else cert.separator = -v;
        return cert;
    }
    auto r = find_feasible_point(columns(generators, dim), v);
    if (r.status == LpStatus::Optimal) {
        cert.member = true;
        cert.coefficients = r.x;
    } else {
        cert.member = false;
        cert.separator = r.farkas;
    }
    return cert;
}

double relative_floor(const CMatrix& m) {
    const Eigen::MatrixXcd c = m.to_complex();
    const double scale = c.norm();
    if (scale == 0) return 0;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(c, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff() / scale;
}

}  // namespace

MembershipCertificate membership(const Cone& k, const QVector& v, double tol) {
    if (v.size() != k.dim) throw DimensionMismatch("vector has the wrong dimension for this cone");
    if (k.kind == ConeKind::Polyhedral) return polyhedral_membership(k.generators, k.dim, v);
    MembershipCertificate cert;
    cert.method = "analytic";
    cert.eigenvalue_floor = relative_floor(k.operator_of(v));
    cert.member = cert.eigenvalue_floor >= -tol;
    return cert;
}

bool verify_membership(const std::vector<QVector>& generators, const QVector& v, const MembershipCertificate& cert) {
    if (cert.member) {
        if (cert.coefficients.size() != static_cast<Eigen::Index>(generators.size())) return false;
        QVector sum = zero_vector(v.size());
        for (size_t i = 0; i < generators.size(); ++i) {
            const Rational& c = cert.coefficients(static_cast<Eigen::Index>(i));
            if (c < 0) return false;
            sum += c * generators[i];
        }
        return sum == v;
    }
    if (cert.separator.size() != v.size()) return false;
    for (const auto& g : generators)
        if (cert.separator.dot(g) < 0) return false;
    return cert.separator.dot(v) < 0;
}

bool cone_membership(const OrderUnitSpace& e, const QVector& v, double tol) {
    if (v.size() != e.dim) throw DimensionMismatch("vector has the wrong dimension for this effect space");
    return membership(effect_cone(e, 0), v, tol).member;
}

bool psd_dual_membership(const Cone& k, const QVector& functional, double tol) {
    const QVector f_op = k.from_operator.transpose() * functional;
    return relative_floor(k.operators->operator_of_functional(f_op)) >= -tol;
}

std::vector<QVector> cone_from_inequalities(const QMatrix& rows, int dim) {
    std::vector<QVector> out;
    const QMatrix lineality = nullspace(rows.rows() == 0 ? zero_matrix(1, dim) : rows);
    const auto row_basis = independent_columns(QMatrix(rows.transpose()));
    const auto r = static_cast<Eigen::Index>(row_basis.size());
    if (r > 0) {
        // Pointed part: w = R z with R spanning the row space; A R has full column rank.
        QMatrix basis(dim, r);
        for (Eigen::Index i = 0; i < r; ++i) basis.col(i) = rows.row(row_basis[static_cast<size_t>(i)]).transpose();
        const QMatrix ar = rows * basis;
        const auto start = independent_columns(QMatrix(ar.transpose()));
        QMatrix square(r, r);
        for (Eigen::Index i = 0; i < r; ++i) square.row(i) = ar.row(start[static_cast<size_t>(i)]);
        const QMatrix inv = *inverse(square);

        std::vector<QVector> rays;
        for (Eigen::Index i = 0; i < r; ++i) rays.push_back(normalize_ray(inv.col(i)));
        std::vector<Eigen::Index> processed(start.begin(), start.end());
        std::vector<bool> done(static_cast<size_t>(ar.rows()), false);
        for (auto s : start) done[static_cast<size_t>(s)] = true;

        auto adjacent = [&](const QVector& p, const QVector& q) {
            std::vector<Eigen::Index> active;
            for (auto j : processed)
                if (ar.row(j).dot(p) == 0 && ar.row(j).dot(q) == 0) active.push_back(j);
            if (static_cast<Eigen::Index>(active.size()) < r - 2) return false;
            QMatrix z(static_cast<Eigen::Index>(active.size()), r);
            for (size_t i = 0; i < active.size(); ++i) z.row(static_cast<Eigen::Index>(i)) = ar.row(active[i]);
            return rank(z) == r - 2;
        };

        for (Eigen::Index i = 0; i < ar.rows(); ++i) {
            if (done[static_cast<size_t>(i)]) continue;
            const auto a = ar.row(i);
            std::vector<QVector> pos, zero, neg;
            for (auto& ray : rays) {
                const Rational s = a.dot(ray);
                if (s > 0) pos.push_back(ray);
                else if (s < 0) neg.push_back(ray);
                else zero.push_back(ray);
            }
            std::vector<QVector> next = pos;
            next.insert(next.end(), zero.begin(), zero.end());
            for (const auto& p : pos) {
                for (const auto& q : neg) {
                    if (!adjacent(p, q)) continue;
                    const QVector combo = a.dot(p) * q - a.dot(q) * p;
                    next.push_back(normalize_ray(combo));
                }
            }
            rays = std::move(next);
            processed.push_back(i);
        }
        for (const auto& z : rays) out.push_back(normalize_ray(QVector(basis * z)));
        std::sort(out.begin(), out.end(), lex_less);
    }
    for (Eigen::Index j = 0; j < lineality.cols(); ++j) {
        out.push_back(normalize_ray(lineality.col(j)));
        out.push_back(normalize_ray(QVector(-lineality.col(j))));
    }
    return out;
}

Cone dual_cone(const Cone& k, const QMatrix& form) {
    if (form.rows() != k.dim || form.cols() != k.dim) throw DimensionMismatch("form has the wrong size for this cone");
    if (determinant(form) == 0) throw Error("dual_cone: the form is degenerate");
    if (k.kind == ConeKind::Psd) {
        // v is in the dual iff the functional B v is non-negative on PSD
        // matrices, i.e. its operator D^{-1} F^T B v is PSD.
        const OperatorBasis& ops = *k.operators;
        QMatrix d_inv = zero_matrix(k.dim, k.dim);
        for (int i = 0; i < k.dim; ++i) d_inv(i, i) = Rational(1) / ops.norms()(i);
        const QMatrix transform = d_inv * k.from_operator.transpose() * form;
        auto back = inverse(transform);
        std::vector<QVector> rays;
        for (const auto& g : k.generators) rays.push_back(*back * k.to_operator * g);
        return transported_psd_cone(ops, transform, std::move(rays));
    }
    std::vector<QVector> gens = k.generators;
    std::sort(gens.begin(), gens.end(), lex_less);
    QMatrix rows(static_cast<Eigen::Index>(gens.size()), k.dim);
    for (size_t i = 0; i < gens.size(); ++i) rows.row(static_cast<Eigen::Index>(i)) = (form * gens[i]).transpose();
    return polyhedral_cone(k.dim, cone_from_inequalities(rows, k.dim));
}

std::vector<QVector> irredundant_generators(const std::vector<QVector>& generators) {
    std::vector<QVector> kept = generators;
    for (size_t i = 0; i < kept.size();) {
        std::vector<QVector> others;
        for (size_t j = 0; j < kept.size(); ++j)
            if (j != i) others.push_back(kept[j]);
        const int dim = static_cast<int>(kept[i].size());
        if (!others.empty() && polyhedral_membership(others, dim, kept[i]).member)
            kept.erase(kept.begin() + static_cast<long>(i));
        else
            ++i;
    }
    return kept;
}

DualityCertificate is_self_dual(const Cone& k, const QMatrix& form, double tol) {
    DualityCertificate cert;
    const Cone dual = dual_cone(k, form);
    if (k.kind == ConeKind::Polyhedral) {
        cert.method = "exact";
        cert.cone_rays = irredundant_generators(k.generators);
        cert.dual_rays = dual.generators;
        cert.verdict = true;
        for (const auto& r : cert.cone_rays) {
            cert.cone_in_dual.push_back(polyhedral_membership(cert.dual_rays, k.dim, r));
            cert.verdict = cert.verdict && cert.cone_in_dual.back().member;
        }
        for (const auto& d : cert.dual_rays) {
            cert.dual_in_cone.push_back(polyhedral_membership(cert.cone_rays, k.dim, d));
            cert.verdict = cert.verdict && cert.dual_in_cone.back().member;
        }
        return cert;
    }
    cert.method = "sampled+analytic";
    cert.cone_rays = k.generators;
    cert.dual_rays = dual.generators;
    double floor = INFINITY;
    bool samples_ok = true;
    for (size_t i = 0; i < k.generators.size(); ++i) {
        const Eigen::VectorXd gi = to_double(k.generators[i]);
        const Eigen::VectorXd bgi = to_double(QVector(form * k.generators[i]));
        for (size_t j = 0; j < k.generators.size(); ++j) {
            const double scale = gi.norm() * to_double(k.generators[j]).norm();
            floor = std::min(floor, bgi.dot(to_double(k.generators[j])) / (scale > 0 ? scale : 1));
        }
        MembershipCertificate c;
        c.method = "analytic";
        c.member = psd_dual_membership(k, QVector(form * k.generators[i]), tol);
        samples_ok = samples_ok && c.member;
        cert.cone_in_dual.push_back(c);
    }
    for (const auto& d : cert.dual_rays) {
        cert.dual_in_cone.push_back(membership(k, d, tol));
        samples_ok = samples_ok && cert.dual_in_cone.back().member;
    }
    cert.min_sample_pairing = k.generators.empty() ? 0 : floor;
    samples_ok = samples_ok && cert.min_sample_pairing >= -tol;

    // Analytic closure: the PSD cone is self-dual exactly under positive
    // multiples of the trace form.
    const QMatrix pulled = k.to_operator.transpose() * k.operators->trace_form() * k.to_operator;
    const Rational ratio = form(0, 0) / pulled(0, 0);
    cert.form_is_trace_multiple = ratio > 0 && QMatrix(pulled * ratio) == form;
    cert.verdict = samples_ok && *cert.form_is_trace_multiple;
    return cert;
}

bool verify_duality_certificate(const DualityCertificate& cert) {
    if (cert.method != "exact") return true;
    if (cert.cone_in_dual.size() != cert.cone_rays.size() || cert.dual_in_cone.size() != cert.dual_rays.size())
        return false;
    bool all = true;
    for (size_t i = 0; i < cert.cone_rays.size(); ++i) {
        if (!verify_membership(cert.dual_rays, cert.cone_rays[i], cert.cone_in_dual[i])) return false;
        all = all && cert.cone_in_dual[i].member;
    }
    for (size_t i = 0; i < cert.dual_rays.size(); ++i) {
        if (!verify_membership(cert.cone_rays, cert.dual_rays[i], cert.dual_in_cone[i])) return false;
        all = all && cert.dual_in_cone[i].member;
    }
    return all == cert.verdict;
}

namespace {

// adj[i][j]: rays i and j span a 2-face; facets given as functionals.
std::vector<std::vector<bool>> adjacency(const std::vector<QVector>& rays, const std::vector<QVector>& facets, int dim) {
    const size_t m = rays.size();
    std::vector<std::vector<bool>> adj(m, std::vector<bool>(m, false));
    for (size_t i = 0; i < m; ++i) {
        for (size_t j = i + 1; j < m; ++j) {
            std::vector<QVector> active;
            for (const auto& f : facets)
                if (f.dot(rays[i]) == 0 && f.dot(rays[j]) == 0) active.push_back(f);
            bool a = dim == 2;
            if (!active.empty()) a = rank(QMatrix(columns(active, dim).transpose())) == dim - 2;
            adj[i][j] = adj[j][i] = a;
        }
    }
    return adj;
}

std::optional<std::pair<QMatrix, QVector>> solve_ray_map(const std::vector<QVector>& rays, const std::vector<QVector>& targets,
                                                         const std::vector<int>& sigma, int dim) {
    const QMatrix r = columns(rays, dim);
    const auto basis = independent_columns(r);
    QMatrix rs(dim, dim);
    for (int s = 0; s < dim; ++s) rs.col(s) = r.col(basis[static_cast<size_t>(s)]);
    const QMatrix rs_inv = *inverse(rs);
    const int m = static_cast<int>(rays.size());

    // T = [c_s d_sigma(s)] R_S^{-1}; remaining rays give linear equations in c.
    LinearProgram lp;
    lp.add_variables(m);
    for (int i = 0; i < m; ++i) lp.add_constraint({{i, Rational(1)}}, Sense::GreaterEqual, 1);
    std::vector<bool> in_basis(static_cast<size_t>(m), false);
    for (auto b : basis) in_basis[static_cast<size_t>(b)] = true;
    for (int j = 0; j < m; ++j) {
        if (in_basis[static_cast<size_t>(j)]) continue;
        const QVector a = rs_inv * rays[static_cast<size_t>(j)];
        for (int row = 0; row < dim; ++row) {
            LinearExpr terms;
            for (int s = 0; s < dim; ++s) {
                const Rational coef = a(s) * targets[static_cast<size_t>(sigma[static_cast<size_t>(basis[static_cast<size_t>(s)])])](row);
                if (coef != 0) terms.emplace_back(static_cast<int>(basis[static_cast<size_t>(s)]), coef);
            }
            const Rational own = targets[static_cast<size_t>(sigma[static_cast<size_t>(j)])](row);
            if (own != 0) terms.emplace_back(j, -own);
            if (!terms.empty()) lp.add_constraint(std::move(terms), Sense::Equal, 0);
        }
    }
    const auto sol = lp.solve();
    if (sol.status != LpStatus::Optimal) return std::nullopt;
    QMatrix images(dim, dim);
    for (int s = 0; s < dim; ++s) {
        const int b = static_cast<int>(basis[static_cast<size_t>(s)]);
        images.col(s) = sol.values(b) * targets[static_cast<size_t>(sigma[static_cast<size_t>(b)])];
    }
    QMatrix t = images * rs_inv;
    if (determinant(t) == 0) return std::nullopt;
    return std::make_pair(t, sol.values);
}

}  // namespace

WeakDualityResult is_weakly_self_dual(const Cone& k, const QMatrix& form, int ray_cap) {
    WeakDualityResult res;
    if (k.kind != ConeKind::Polyhedral) {
        res.reason = "weak self-duality search needs a polyhedral cone";
        return res;
    }
    const int dim = k.dim;
    const auto rays = irredundant_generators(k.generators);
    const Cone dual = dual_cone(k, form);
    const auto& targets = dual.generators;
    if (rank(columns(rays, dim)) != dim || rank(columns(targets, dim)) != dim) {
        res.reason = "cone is not pointed and full-dimensional";
        return res;
    }
    if (static_cast<int>(rays.size()) > ray_cap) {
        res.reason = "extreme-ray count " + std::to_string(rays.size()) + " exceeds the cap " + std::to_string(ray_cap);
        return res;
    }
    if (rays.size() != targets.size()) {
        res.verdict = false;
        res.reason = "the cone and its dual have different numbers of extreme rays";
        return res;
    }
    std::vector<QVector> cone_facets, dual_facets;
    for (const auto& d : targets) cone_facets.push_back(form * d);
    for (const auto& r : rays) dual_facets.push_back(form * r);
    const auto adj_k = adjacency(rays, cone_facets, dim);
    const auto adj_d = adjacency(targets, dual_facets, dim);
    const int m = static_cast<int>(rays.size());
    auto degree = [](const std::vector<std::vector<bool>>& adj, int i) {
        return std::count(adj[static_cast<size_t>(i)].begin(), adj[static_cast<size_t>(i)].end(), true);
    };

    std::vector<int> sigma(static_cast<size_t>(m), -1);
    std::vector<bool> used(static_cast<size_t>(m), false);
    std::function<bool(int)> search = [&](int i) -> bool {
        if (i == m) {
            auto sol = solve_ray_map(rays, targets, sigma, dim);
            if (!sol) return false;
            res.map = sol->first;
            res.scales = sol->second;
            res.bijection = sigma;
            return true;
        }
        for (int j = 0; j < m; ++j) {
            if (used[static_cast<size_t>(j)] || degree(adj_k, i) != degree(adj_d, j)) continue;
            bool ok = true;
            for (int p = 0; p < i && ok; ++p)
                ok = adj_k[static_cast<size_t>(i)][static_cast<size_t>(p)] ==
                     adj_d[static_cast<size_t>(j)][static_cast<size_t>(sigma[static_cast<size_t>(p)])];
            if (!ok) continue;
            sigma[static_cast<size_t>(i)] = j;
            used[static_cast<size_t>(j)] = true;
            if (search(i + 1)) return true;
            used[static_cast<size_t>(j)] = false;
        }
        sigma[static_cast<size_t>(i)] = -1;
        return false;
    };
    res.verdict = search(0);
    res.reason = *res.verdict ? "explicit order-isomorphism found" : "no ray bijection extends to a linear map";
    return res;
}

PositivityResult is_positive_map(const QMatrix& map, const Cone& source, const Cone& target, double tol) {
    if (map.cols() != source.dim || map.rows() != target.dim) throw DimensionMismatch("map does not fit the cones");
    PositivityResult res;
    const bool exact = source.kind == ConeKind::Polyhedral && target.kind == ConeKind::Polyhedral;
    res.method = exact ? "exact" : "sampled+analytic";
    res.verdict = true;
    for (size_t i = 0; i < source.generators.size(); ++i) {
        if (!membership(target, QVector(map * source.generators[i]), tol).member) {
            res.verdict = false;
            res.failing_generator = static_cast<int>(i);
            break;
        }
    }
    return res;
}

PositivityResult is_order_isomorphism(const QMatrix& map, const Cone& source, const Cone& target, double tol) {
    PositivityResult res;
    auto inv = map.rows() == map.cols() ? inverse(map) : std::nullopt;
    if (!inv) {
        res.method = "exact";
        return res;
    }
    res = is_positive_map(map, source, target, tol);
    if (!res.verdict) return res;
    auto back = is_positive_map(*inv, target, source, tol);
    if (!back.verdict) return back;
    return res;
}

}  // namespace kvwb
