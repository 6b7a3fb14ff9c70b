#include "kvwb/jordan.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <random>

namespace kvwb {

std::string to_string(JordanKind k) {
    switch (k) {
        case JordanKind::RealSym: return "RealSym";
        case JordanKind::ComplexHerm: return "ComplexHerm";
        case JordanKind::QuatHerm: return "QuatHerm";
        case JordanKind::SpinFactor: return "SpinFactor";
        case JordanKind::DirectSum: return "DirectSum";
        case JordanKind::Recovered: return "Recovered";
    }
    return "?";
}

std::string JordanAlgebra::name() const {
    if (kind == JordanKind::Recovered) return "Recovered(" + std::to_string(dim) + ")";
    if (kind != JordanKind::DirectSum) return to_string(kind) + "(" + std::to_string(n) + ")";
    std::string s;
    for (const auto& p : summands) s += (s.empty() ? "" : " + ") + p.name();
    return s;
}

namespace {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

std::vector<Mat> to_double(const std::vector<QMatrix>& s) {
    std::vector<Mat> out;
    for (const auto& m : s) out.push_back(kvwb::to_double(m));
    return out;
}

// Structure constants of the symmetrized product on a Re-tr-orthogonal basis.
JordanAlgebra matrix_algebra(JordanKind kind, int n, const std::vector<CMatrix>& basis, const QVector& unit) {
    JordanAlgebra j;
    j.kind = kind;
    j.n = n;
    j.dim = static_cast<int>(basis.size());
    std::vector<Rational> norms;
    for (const auto& l : basis) norms.push_back((l * l).trace_re());
    j.exact_structure.assign(basis.size(), zero_matrix(j.dim, j.dim));
    for (int a = 0; a < j.dim; ++a) {
        for (int b = a; b < j.dim; ++b) {
            const CMatrix p = basis[static_cast<size_t>(a)] * basis[static_cast<size_t>(b)];
            const CMatrix s = Rational(1, 2) * (p + p.adjoint());
            for (int k = 0; k < j.dim; ++k) {
                const Rational c = (s * basis[static_cast<size_t>(k)]).trace_re() / norms[static_cast<size_t>(k)];
                j.exact_structure[static_cast<size_t>(k)](a, b) = c;
                j.exact_structure[static_cast<size_t>(k)](b, a) = c;
            }
        }
    }
    j.structure = to_double(j.exact_structure);
    j.exact_unit = unit;
    j.unit = kvwb::to_double(unit);
    for (size_t k = 0; k < basis.size(); ++k) {
        j.matrix_basis.push_back(basis[k].to_complex());
        j.basis_norms.push_back(kvwb::to_double(norms[k]));
    }
    return j;
}

CMatrix unit_matrix(int size, int r, int c, Rational re, Rational im) {
    CMatrix m = CMatrix::zero(size);
    m.re(r, c) = re;
    m.im(r, c) = im;
    return m;
}

// Basis of Hermitian n x n matrices over R, C: diagonal units, then for each
// i < j the symmetric unit and (complex) the antisymmetric imaginary unit.
JordanAlgebra field_hermitian(JordanKind kind, int n, bool complex) {
    std::vector<CMatrix> basis;
    QVector unit = zero_vector(0);
    std::vector<Rational> u;
    for (int i = 0; i < n; ++i) {
        basis.push_back(unit_matrix(n, i, i, 1, 0));
        u.emplace_back(1);
    }
    for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            basis.push_back(unit_matrix(n, i, k, 1, 0) + unit_matrix(n, k, i, 1, 0));
            u.emplace_back(0);
            if (complex) {
                basis.push_back(unit_matrix(n, i, k, 0, 1) + unit_matrix(n, k, i, 0, -1));
                u.emplace_back(0);
            }
        }
    }
    unit.resize(static_cast<Eigen::Index>(u.size()));
    for (size_t i = 0; i < u.size(); ++i) unit(static_cast<Eigen::Index>(i)) = u[i];
    return matrix_algebra(kind, n, basis, unit);
}

}  // namespace

JordanAlgebra real_symmetric(int n) {
    if (n < 1) throw Error("RealSym(n) needs n >= 1");
    return field_hermitian(JordanKind::RealSym, n, false);
}

JordanAlgebra complex_hermitian(int n) {
    if (n < 1) throw Error("ComplexHerm(n) needs n >= 1");
    return field_hermitian(JordanKind::ComplexHerm, n, true);
}

JordanAlgebra quaternion_hermitian(int n) {
    if (n < 1) throw Error("QuatHerm(n) needs n >= 1");
    // Quaternion a + bi + cj + dk as the complex 2x2 block [[a+bi, c+di], [-c+di, a-bi]].
    const int size = 2 * n;
    auto block = [&](int r, int c, int unit_index) {
        CMatrix m = CMatrix::zero(size);
        const int r0 = 2 * r, c0 = 2 * c;
        switch (unit_index) {
            case 0: m.re(r0, c0) = 1; m.re(r0 + 1, c0 + 1) = 1; break;
            case 1: m.im(r0, c0) = 1; m.im(r0 + 1, c0 + 1) = -1; break;
            case 2: m.re(r0, c0 + 1) = 1; m.re(r0 + 1, c0) = -1; break;
            default: m.im(r0, c0 + 1) = 1; m.im(r0 + 1, c0) = 1; break;
        }
        return m;
    };
    std::vector<CMatrix> basis;
    std::vector<Rational> u;
    for (int i = 0; i < n; ++i) {
        basis.push_back(block(i, i, 0));
        u.emplace_back(1);
    }
    for (int i = 0; i < n; ++i) {
        for (int k = i + 1; k < n; ++k) {
            for (int q = 0; q < 4; ++q) {
                const CMatrix b = block(i, k, q);
                basis.push_back(b + b.adjoint());
                u.emplace_back(0);
            }
        }
    }
    QVector unit(static_cast<Eigen::Index>(u.size()));
    for (size_t i = 0; i < u.size(); ++i) unit(static_cast<Eigen::Index>(i)) = u[i];
    return matrix_algebra(JordanKind::QuatHerm, n, basis, unit);
}

JordanAlgebra spin_factor(int n) {
    if (n < 1) throw Error("SpinFactor(n) needs n >= 1");
    const int d = n + 1;
    std::vector<QMatrix> c(static_cast<size_t>(d), zero_matrix(d, d));
    for (int k = 0; k < n; ++k) {
        c[static_cast<size_t>(k)](k, n) = 1;
        c[static_cast<size_t>(k)](n, k) = 1;
        c[static_cast<size_t>(n)](k, k) = 1;
    }
    c[static_cast<size_t>(n)](n, n) = 1;
    QVector unit = zero_vector(d);
    unit(n) = 1;
    JordanAlgebra j = algebra_from_exact_structure(std::move(c), unit);
    j.kind = JordanKind::SpinFactor;
    j.n = n;
    return j;
}

JordanAlgebra direct_sum(const std::vector<JordanAlgebra>& parts) {
    if (parts.empty()) throw Error("direct sum of no algebras");
    int d = 0;
    bool exact = true;
    for (const auto& p : parts) {
        d += p.dim;
        exact = exact && p.is_exact();
    }
    JordanAlgebra j;
    j.kind = JordanKind::DirectSum;
    j.dim = d;
    j.summands = parts;
    j.structure.assign(static_cast<size_t>(d), Mat::Zero(d, d));
    j.unit = Vec::Zero(d);
    if (exact) {
        j.exact_structure.assign(static_cast<size_t>(d), zero_matrix(d, d));
        j.exact_unit = zero_vector(d);
    }
    int off = 0;
    for (const auto& p : parts) {
        for (int k = 0; k < p.dim; ++k) {
            j.structure[static_cast<size_t>(off + k)].block(off, off, p.dim, p.dim) = p.structure[static_cast<size_t>(k)];
            if (exact) j.exact_structure[static_cast<size_t>(off + k)].block(off, off, p.dim, p.dim) = p.exact_structure[static_cast<size_t>(k)];
        }
        j.unit.segment(off, p.dim) = p.unit;
        if (exact) j.exact_unit.segment(off, p.dim) = p.exact_unit;
        off += p.dim;
    }
    return j;
}

JordanAlgebra catalog_algebra(const std::string& name) {
    std::vector<JordanAlgebra> parts;
    size_t start = 0;
    while (start <= name.size()) {
        const size_t plus = name.find('+', start);
        std::string term = name.substr(start, plus == std::string::npos ? std::string::npos : plus - start);
        term.erase(0, term.find_first_not_of(' '));
        term.erase(term.find_last_not_of(' ') + 1);
        if (term == "R") {
            parts.push_back(real_symmetric(1));
        } else {
            const size_t open = term.find('(');
            if (open == std::string::npos || term.back() != ')') throw ParseError("unknown algebra '" + term + "'");
            const std::string kind = term.substr(0, open);
            int n = 0;
            try {
                n = std::stoi(term.substr(open + 1, term.size() - open - 2));
            } catch (const std::exception&) {
                throw ParseError("bad size in '" + term + "'");
            }
            if (n < 1) throw ParseError("bad size in '" + term + "'");
            if (kind == "RealSym") parts.push_back(real_symmetric(n));
            else if (kind == "ComplexHerm") parts.push_back(complex_hermitian(n));
            else if (kind == "QuatHerm") parts.push_back(quaternion_hermitian(n));
            else if (kind == "SpinFactor") parts.push_back(spin_factor(n));
            else throw ParseError("unknown algebra kind '" + kind + "'");
        }
        if (plus == std::string::npos) break;
        start = plus + 1;
    }
    return parts.size() == 1 ? parts.front() : direct_sum(parts);
}

JordanAlgebra algebra_from_structure(std::vector<Eigen::MatrixXd> structure, Eigen::VectorXd unit) {
    JordanAlgebra j;
    j.dim = static_cast<int>(structure.size());
    j.n = j.dim;
    j.structure = std::move(structure);
    j.unit = std::move(unit);
    return j;
}

JordanAlgebra algebra_from_exact_structure(std::vector<QMatrix> structure, QVector unit) {
    JordanAlgebra j = algebra_from_structure(to_double(structure), kvwb::to_double(unit));
    j.exact_structure = std::move(structure);
    j.exact_unit = std::move(unit);
    return j;
}

Eigen::VectorXd jordan_product(const JordanAlgebra& j, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    Vec out(j.dim);
    for (int k = 0; k < j.dim; ++k) out(k) = a.dot(j.structure[static_cast<size_t>(k)] * b);
    return out;
}

QVector jordan_product(const JordanAlgebra& j, const QVector& a, const QVector& b) {
    if (!j.is_exact()) throw Error("exact product requested for an algebra without rational structure constants");
    QVector out(j.dim);
    for (int k = 0; k < j.dim; ++k) out(k) = a.dot(j.exact_structure[static_cast<size_t>(k)] * b);
    return out;
}

Eigen::MatrixXd left_multiplication(const JordanAlgebra& j, const Eigen::VectorXd& a) {
    Mat l(j.dim, j.dim);
    for (int k = 0; k < j.dim; ++k) l.row(k) = a.transpose() * j.structure[static_cast<size_t>(k)];
    return l;
}

Eigen::MatrixXd quadratic_rep(const JordanAlgebra& j, const Eigen::VectorXd& a) {
    const Mat l = left_multiplication(j, a);
    return 2 * l * l - left_multiplication(j, jordan_product(j, a, a));
}

Eigen::MatrixXd trace_form(const JordanAlgebra& j) {
    // tr L_{a o b} = sum_k (a o b)_k tau_k with tau_k = tr L_{e_k}.
    Vec tau(j.dim);
    for (int k = 0; k < j.dim; ++k) {
        double t = 0;
        for (int i = 0; i < j.dim; ++i) t += j.structure[static_cast<size_t>(i)](k, i);
        tau(k) = t;
    }
    Mat b = Mat::Zero(j.dim, j.dim);
    for (int k = 0; k < j.dim; ++k) b += tau(k) * j.structure[static_cast<size_t>(k)];
    return b;
}

QMatrix exact_trace_form(const JordanAlgebra& j) {
    if (!j.is_exact()) throw Error("exact trace form requested for a float algebra");
    QMatrix b = zero_matrix(j.dim, j.dim);
    for (int k = 0; k < j.dim; ++k) {
        Rational t = 0;
        for (int i = 0; i < j.dim; ++i) t += j.exact_structure[static_cast<size_t>(i)](k, i);
        if (t != 0) b += t * j.exact_structure[static_cast<size_t>(k)];
    }
    return b;
}

namespace {

SpectralDecomposition matrix_spectral(const JordanAlgebra& j, const Vec& a) {
    const auto size = j.matrix_basis.front().rows();
    Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(size, size);
    for (int k = 0; k < j.dim; ++k) h += a(k) * j.matrix_basis[static_cast<size_t>(k)];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    SpectralDecomposition s;
    if (solver.info() != Eigen::Success) {
        s.error = "Hermitian eigensolver did not converge";
        return s;
    }
    const int step = j.kind == JordanKind::QuatHerm ? 2 : 1;
    for (Eigen::Index i = 0; i < size; i += step) {
        Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(size, size);
        for (int t = 0; t < step; ++t) p += solver.eigenvectors().col(i + t) * solver.eigenvectors().col(i + t).adjoint();
        Vec c(j.dim);
        for (int k = 0; k < j.dim; ++k)
            c(k) = (p * j.matrix_basis[static_cast<size_t>(k)]).trace().real() / j.basis_norms[static_cast<size_t>(k)];
        double lambda = 0;
        for (int t = 0; t < step; ++t) lambda += solver.eigenvalues()(i + t);
        s.eigenvalues.push_back(lambda / step);
        s.idempotents.push_back(c);
    }
    s.ok = true;
    return s;
}

SpectralDecomposition spin_spectral(const JordanAlgebra& j, const Vec& a) {
    const int n = j.n;
    const Vec x = a.head(n);
    const double s0 = a(n);
    double r = x.norm();
    Vec dir = Vec::Zero(n);
    if (r > 0) dir = x / r;
    else dir(0) = 1;
    SpectralDecomposition s;
    for (const double sign : {-1.0, 1.0}) {
        Vec c(n + 1);
        c.head(n) = sign * dir / 2;
        c(n) = 0.5;
        s.eigenvalues.push_back(s0 + sign * r);
        s.idempotents.push_back(c);
    }
    s.ok = true;
    return s;
}

// Powers p_0 = unit, p_k = a o p_{k-1} until p_m depends on the earlier ones.
struct MinimalPolynomial {
    bool ok = false;
    std::vector<Vec> powers;       // p_0 .. p_{m-1}
    Eigen::VectorXd coefficients;  // p_m = sum_i coefficients(i) p_i
};

MinimalPolynomial minimal_polynomial(const JordanAlgebra& j, const Vec& a, const Vec& unit) {
    MinimalPolynomial mp;
    mp.powers.push_back(unit);
    for (int m = 1; m <= j.dim + 1; ++m) {
        const Vec next = jordan_product(j, a, mp.powers.back());
        Mat k(j.dim, static_cast<Eigen::Index>(mp.powers.size()));
        for (size_t i = 0; i < mp.powers.size(); ++i) k.col(static_cast<Eigen::Index>(i)) = mp.powers[i];
        const Vec coeff = k.colPivHouseholderQr().solve(next);
        const double scale = std::max({next.norm(), mp.powers.back().norm(), 1e-300});
        if ((k * coeff - next).norm() <= 1e-9 * scale) {
            mp.coefficients = coeff;
            mp.ok = true;
            return mp;
        }
        mp.powers.push_back(next);
    }
    return mp;
}

SpectralDecomposition krylov_spectral(const JordanAlgebra& j, const Vec& a, const Vec& unit) {
    SpectralDecomposition s;
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    const Vec as = a / scale;
    const auto mp = minimal_polynomial(j, as, unit);
    if (!mp.ok) {
        s.error = "minimal polynomial not found (powers did not become dependent)";
        return s;
    }
    const auto m = static_cast<Eigen::Index>(mp.powers.size());
    std::vector<double> roots;
    if (m == 1) {
        roots.push_back(mp.coefficients(0));
    } else {
        Mat companion = Mat::Zero(m, m);
        for (Eigen::Index i = 1; i < m; ++i) companion(i, i - 1) = 1;
        companion.col(m - 1) = mp.coefficients;
        Eigen::EigenSolver<Mat> solver(companion, false);
        if (solver.info() != Eigen::Success) {
            s.error = "companion eigensolver did not converge";
            return s;
        }
        for (Eigen::Index i = 0; i < m; ++i) {
            const auto z = solver.eigenvalues()(i);
            if (std::abs(z.imag()) > 1e-6 * std::max(1.0, std::abs(z))) {
                s.error = "minimal polynomial has non-real roots";
                return s;
            }
            roots.push_back(z.real());
        }
    }
    std::sort(roots.begin(), roots.end());
    for (size_t i = 0; i < roots.size(); ++i) {
        // Lagrange polynomial l_i(x) = prod_{k != i} (x - r_k) / (r_i - r_k), coefficients low to high.
        std::vector<double> poly{1.0};
        for (size_t k = 0; k < roots.size(); ++k) {
            if (k == i) continue;
            const double denom = roots[i] - roots[k];
            if (std::abs(denom) < 1e-12) {
                s.error = "repeated root in the minimal polynomial";
                return s;
            }
            std::vector<double> next(poly.size() + 1, 0.0);
            for (size_t t = 0; t < poly.size(); ++t) {
                next[t + 1] += poly[t] / denom;
                next[t] -= roots[k] * poly[t] / denom;
            }
            poly = std::move(next);
        }
        Vec c = Vec::Zero(j.dim);
        for (size_t t = 0; t < poly.size(); ++t) c += poly[t] * mp.powers[t];
        s.eigenvalues.push_back(roots[i] * scale);
        s.idempotents.push_back(c);
    }
    s.ok = true;
    return s;
}

}  // namespace

SpectralDecomposition spectral_decomposition(const JordanAlgebra& j, const Eigen::VectorXd& a) {
    switch (j.kind) {
        case JordanKind::RealSym:
        case JordanKind::ComplexHerm:
        case JordanKind::QuatHerm: return matrix_spectral(j, a);
        case JordanKind::SpinFactor: return spin_spectral(j, a);
        case JordanKind::DirectSum: {
            SpectralDecomposition out;
            std::vector<std::pair<double, Vec>> parts;
            int off = 0;
            for (const auto& p : j.summands) {
                const auto s = spectral_decomposition(p, a.segment(off, p.dim));
                if (!s.ok) return s;
                for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
                    Vec c = Vec::Zero(j.dim);
                    c.segment(off, p.dim) = s.idempotents[i];
                    parts.emplace_back(s.eigenvalues[i], c);
                }
                off += p.dim;
            }
            std::stable_sort(parts.begin(), parts.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            for (auto& [l, c] : parts) {
                out.eigenvalues.push_back(l);
                out.idempotents.push_back(std::move(c));
            }
            out.ok = true;
            return out;
        }
        case JordanKind::Recovered: return krylov_spectral(j, a, j.unit);
    }
    return {};
}

std::optional<Eigen::VectorXd> jordan_sqrt(const JordanAlgebra& j, const Eigen::VectorXd& a) {
    const auto s = spectral_decomposition(j, a);
    if (!s.ok) return std::nullopt;
    Vec r = Vec::Zero(j.dim);
    for (size_t i = 0; i < s.eigenvalues.size(); ++i) {
        if (s.eigenvalues[i] < -1e-12) return std::nullopt;
        r += std::sqrt(std::max(s.eigenvalues[i], 0.0)) * s.idempotents[i];
    }
    return r;
}

bool cone_of_squares_membership(const JordanAlgebra& j, const Eigen::VectorXd& a, double tol) {
    const auto s = spectral_decomposition(j, a);
    if (!s.ok) throw Error("spectral decomposition failed: " + s.error);
    return s.eigenvalues.front() >= -tol;
}

bool IdentityCheck::passed(double tol) const {
    return commutative && unital && exact_identity.value_or(true) && residual <= tol;
}

namespace {

Vec random_vector(std::mt19937_64& rng, int dim) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vec v(dim);
    for (int i = 0; i < dim; ++i) v(i) = u(rng);
    return v;
}

// a^2 o (b o a) - (a^2 o b) o a
Vec identity_defect(const JordanAlgebra& j, const Vec& a, const Vec& b) {
    const Vec a2 = jordan_product(j, a, a);
    return jordan_product(j, a2, jordan_product(j, b, a)) - jordan_product(j, jordan_product(j, a2, b), a);
}

}  // namespace

IdentityCheck check_jordan_identity(const JordanAlgebra& j, int sample_count, std::uint64_t seed) {
    IdentityCheck c;
    const int d = j.dim;
    if (j.is_exact()) {
        c.commutative = std::all_of(j.exact_structure.begin(), j.exact_structure.end(), [](const QMatrix& m) { return is_symmetric(m); });
        QMatrix lu(d, d);
        for (int k = 0; k < d; ++k) lu.row(k) = j.exact_unit.transpose() * j.exact_structure[static_cast<size_t>(k)];
        c.unital = lu == identity_matrix(d);
        // Basis elements and pairwise sums against basis elements.
        std::vector<QVector> as;
        for (int i = 0; i < d; ++i) {
            QVector e = zero_vector(d);
            e(i) = 1;
            as.push_back(e);
        }
        for (int i = 0; i < d; ++i)
            for (int k = i + 1; k < d; ++k) as.push_back(as[static_cast<size_t>(i)] + as[static_cast<size_t>(k)]);
        bool ok = true;
        for (const auto& a : as) {
            const QVector a2 = jordan_product(j, a, a);
            for (int i = 0; i < d && ok; ++i) {
                const QVector& b = as[static_cast<size_t>(i)];
                if (jordan_product(j, a2, jordan_product(j, b, a)) != jordan_product(j, jordan_product(j, a2, b), a)) ok = false;
            }
            if (!ok) break;
        }
        c.exact_identity = ok;
    } else {
        double worst = 0, scale = 0;
        for (const auto& m : j.structure) {
            worst = std::max(worst, (m - m.transpose()).cwiseAbs().maxCoeff());
            scale = std::max(scale, m.cwiseAbs().maxCoeff());
        }
        c.commutative = worst <= 1e-10 * std::max(scale, 1.0);
        c.unital = (left_multiplication(j, j.unit) - Mat::Identity(d, d)).cwiseAbs().maxCoeff() <= 1e-10;
    }
    std::mt19937_64 rng(seed);
    for (int s = 0; s < sample_count; ++s) {
        const Vec a = random_vector(rng, d);
        const Vec b = random_vector(rng, d);
        const double r = identity_defect(j, a, b).norm() / (std::pow(a.norm(), 3) * b.norm());
        c.residual = std::max(c.residual, r);
    }
    return c;
}

SymmetricConeReport verify_symmetric_cone(const JordanAlgebra& j, int sample_count, std::uint64_t seed) {
    SymmetricConeReport r;
    r.samples = sample_count;
    r.seed = seed;
    r.identity = check_jordan_identity(j, 20, seed);
    r.identity_gate = r.identity.passed();
    if (!r.identity_gate) {
        r.failure = "Jordan identity gate";
        return r;
    }
    const Mat b = trace_form(j);
    {
        Eigen::SelfAdjointEigenSolver<Mat> solver(b, Eigen::EigenvaluesOnly);
        r.trace_form_floor = solver.eigenvalues()(0);
        r.formally_real = j.is_exact() ? is_positive_definite(exact_trace_form(j)) : r.trace_form_floor > 1e-12;
    }
    std::mt19937_64 rng(seed);
    const int d = j.dim;
    auto normalized_pairing = [&](const Vec& x, const Vec& y) {
        return x.dot(b * y) / std::sqrt(x.dot(b * x) * y.dot(b * y));
    };

    // Self-duality: cone samples pair non-negatively with each other and with
    // primitive idempotents; an element pairing non-negatively with its own
    // spectral idempotents lies in the cone.
    std::vector<Vec> squares, idempotents;
    bool spectral_ok = true;
    for (int s = 0; s < sample_count; ++s) {
        const Vec a = random_vector(rng, d);
        squares.push_back(jordan_product(j, a, a));
        const auto sd = spectral_decomposition(j, a);
        if (!sd.ok) {
            spectral_ok = false;
            r.failure = "spectral decomposition: " + sd.error;
            break;
        }
        idempotents.push_back(sd.idempotents.front());
    }
    r.min_pairing = 1;
    bool dual_consistent = spectral_ok;
    for (size_t s = 0; s < squares.size(); ++s) {
        for (size_t t = 0; t < squares.size(); ++t) r.min_pairing = std::min(r.min_pairing, normalized_pairing(squares[s], squares[t]));
        for (const auto& c : idempotents) r.min_pairing = std::min(r.min_pairing, normalized_pairing(squares[s], c));
    }
    for (int s = 0; s < sample_count && dual_consistent; ++s) {
        const Vec y = random_vector(rng, d);
        const auto sd = spectral_decomposition(j, y);
        if (!sd.ok) {
            dual_consistent = false;
            break;
        }
        double worst = 1;
        for (const auto& c : sd.idempotents) worst = std::min(worst, normalized_pairing(y, c));
        if ((worst >= -1e-9) != cone_of_squares_membership(j, y, 1e-9 * y.norm())) dual_consistent = false;
    }
    r.self_dual = dual_consistent && r.min_pairing >= -1e-9;

    // Homogeneity: P(w^{1/2}) maps e to w and keeps the cone samples in the cone.
    r.homogeneous = spectral_ok;
    r.cone_preserved = spectral_ok;
    for (int s = 0; s < sample_count && spectral_ok; ++s) {
        const Vec a = random_vector(rng, d);
        const Vec w = jordan_product(j, a, a) + 0.1 * j.unit;
        const auto root = jordan_sqrt(j, w);
        if (!root) {
            r.homogeneous = false;
            r.failure = "square root of an interior element failed";
            break;
        }
        const Mat p = quadratic_rep(j, *root);
        r.max_sqrt_error = std::max(r.max_sqrt_error, (p * j.unit - w).cwiseAbs().maxCoeff());
        for (size_t t = 0; t < 3 && t < squares.size(); ++t) {
            const Vec moved = p * squares[t];
            if (!cone_of_squares_membership(j, moved, 1e-9 * std::max(1.0, moved.norm()))) r.cone_preserved = false;
        }
    }
    if (r.max_sqrt_error > 1e-9) r.homogeneous = false;
    r.homogeneous = r.homogeneous && r.cone_preserved;
    r.pass = r.identity_gate && r.self_dual && r.homogeneous && r.formally_real;
    if (!r.pass && r.failure.empty()) {
        if (!r.self_dual) r.failure = "self-duality";
        else if (!r.homogeneous) r.failure = "homogeneity";
        else r.failure = "formal reality";
    }
    return r;
}

// ---------------------------------------------------------------------------
// Recovery

RecoveryProblem recovery_problem(const OrderUnitSpace& e, const LinearGroup& g, const QMatrix& form) {
    RecoveryProblem p;
    p.form = form;
    p.unit = e.unit;
    p.generators = g.generators;
    p.cone = effect_cone(e);
    std::vector<QVector> extreme;
    if (p.cone.kind == ConeKind::Polyhedral)
        for (const auto& g : irredundant_generators(p.cone.generators)) extreme.push_back(normalize_ray(g));
    for (const auto& v : e.cone_generators) {
        if (evaluate(form, v, v) != evaluate(form, v, e.unit)) continue;
        bool on_extreme_ray = false;
        if (p.cone.kind == ConeKind::Polyhedral) {
            on_extreme_ray = std::find(extreme.begin(), extreme.end(), normalize_ray(v)) != extreme.end();
        } else {
            const CMatrix op = p.cone.operator_of(v);
            on_extreme_ray = op * op == op && op.trace_re() == 1;
        }
        if (on_extreme_ray) p.sharp_outcomes.push_back(v);
    }
    return p;
}

RecoveryProblem transport_problem(const RecoveryProblem& p, const QMatrix& t) {
    const auto inv = inverse(t);
    if (!inv) throw Error("transport map must be invertible");
    if (QMatrix(t.transpose() * p.form * t) != p.form) throw Error("transport map is not an isometry of the form");
    RecoveryProblem q = p;
    q.unit = t * p.unit;
    q.generators.clear();
    for (const auto& m : p.generators) q.generators.push_back(t * m * *inv);
    q.sharp_outcomes.clear();
    for (const auto& v : p.sharp_outcomes) q.sharp_outcomes.push_back(t * v);
    std::vector<QVector> rays;
    for (const auto& r : p.cone.generators) rays.push_back(t * r);
    if (p.cone.kind == ConeKind::Polyhedral) {
        q.cone = polyhedral_cone(p.cone.dim, rays);
    } else {
        q.cone = transported_psd_cone(*p.cone.operators, QMatrix(p.cone.to_operator * *inv), rays);
    }
    return q;
}

QMatrix random_form_isometry(const QMatrix& form, std::uint64_t seed) {
    const auto d = form.rows();
    std::mt19937_64 rng(seed);
    QMatrix s = zero_matrix(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index k = i + 1; k < d; ++k) {
            const long v = static_cast<long>(rng() % 5) - 2;
            s(i, k) = Rational(v, 3);
            s(k, i) = Rational(-v, 3);
        }
    }
    const auto binv = inverse(form);
    if (!binv) throw Error("random_form_isometry: singular form");
    const QMatrix k = *binv * s;
    const QMatrix id = identity_matrix(d);
    const auto plus = inverse(QMatrix(id + k));
    if (!plus) throw Error("random_form_isometry: 1 + K is singular");
    return (id - k) * *plus;
}

namespace {

int sym_index(int i, int k, int d) {
    if (i > k) std::swap(i, k);
    return i * d - i * (i - 1) / 2 + (k - i);
}

struct LinearSystem {
    std::vector<std::vector<std::pair<int, Rational>>> rows;
    std::vector<Rational> rhs;
    int unknowns = 0;
};

LinearSystem product_constraints(const RecoveryProblem& p, int d) {
    LinearSystem sys;
    const int pairs = d * (d + 1) / 2;
    sys.unknowns = d * pairs;
    auto var = [&](int k, int i, int j) { return k * pairs + sym_index(i, j, d); };
    auto push = [&](std::map<int, Rational>& acc, Rational rhs) {
        std::vector<std::pair<int, Rational>> row;
        for (auto& [v, c] : acc)
            if (c != 0) row.emplace_back(v, c);
        if (row.empty() && rhs == 0) return;
        sys.rows.push_back(std::move(row));
        sys.rhs.push_back(std::move(rhs));
    };
    // Unit: sum_i u_i C_k(i, j) = delta_kj.
    for (int k = 0; k < d; ++k) {
        for (int jj = 0; jj < d; ++jj) {
            std::map<int, Rational> acc;
            for (int i = 0; i < d; ++i)
                if (p.unit(i) != 0) acc[var(k, i, jj)] += p.unit(i);
            push(acc, k == jj ? Rational(1) : Rational(0));
        }
    }
    // Form associativity: B(a o b, c) = B(b, a o c).
    for (int a = 0; a < d; ++a) {
        for (int b = 0; b < d; ++b) {
            for (int c = b + 1; c < d; ++c) {
                std::map<int, Rational> acc;
                for (int k = 0; k < d; ++k) {
                    if (p.form(k, c) != 0) acc[var(k, a, b)] += p.form(k, c);
                    if (p.form(b, k) != 0) acc[var(k, a, c)] -= p.form(b, k);
                }
                push(acc, 0);
            }
        }
    }
    // Equivariance: M (a o b) = (M a) o (M b).
    if (p.impose_equivariance) {
        for (const auto& m : p.generators) {
            for (int a = 0; a < d; ++a) {
                for (int b = a; b < d; ++b) {
                    for (int l = 0; l < d; ++l) {
                        std::map<int, Rational> acc;
                        for (int k = 0; k < d; ++k)
                            if (m(l, k) != 0) acc[var(k, a, b)] += m(l, k);
                        for (int i = 0; i < d; ++i) {
                            if (m(i, a) == 0) continue;
                            for (int jj = 0; jj < d; ++jj)
                                if (m(jj, b) != 0) acc[var(l, i, jj)] -= m(i, a) * m(jj, b);
                        }
                        push(acc, 0);
                    }
                }
            }
        }
    }
    // Idempotence: sum_ij x_i x_j C_k(i, j) = x_k.
    if (p.impose_outcome_idempotence) {
        for (const auto& x : p.sharp_outcomes) {
            for (int k = 0; k < d; ++k) {
                std::map<int, Rational> acc;
                for (int i = 0; i < d; ++i) {
                    if (x(i) == 0) continue;
                    for (int jj = 0; jj < d; ++jj)
                        if (x(jj) != 0) acc[var(k, i, jj)] += x(i) * x(jj);
                }
                push(acc, x(k));
            }
        }
    }
    return sys;
}

std::vector<Mat> structure_from_unknowns(const Vec& x, int d) {
    std::vector<Mat> s(static_cast<size_t>(d), Mat(d, d));
    const int pairs = d * (d + 1) / 2;
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int jj = 0; jj < d; ++jj) s[static_cast<size_t>(k)](i, jj) = x(k * pairs + sym_index(i, jj, d));
    return s;
}

std::vector<QMatrix> structure_from_unknowns(const QVector& x, int d) {
    std::vector<QMatrix> s(static_cast<size_t>(d), QMatrix(d, d));
    const int pairs = d * (d + 1) / 2;
    for (int k = 0; k < d; ++k)
        for (int i = 0; i < d; ++i)
            for (int jj = 0; jj < d; ++jj) s[static_cast<size_t>(k)](i, jj) = x(k * pairs + sym_index(i, jj, d));
    return s;
}

constexpr int kExactUnknownLimit = 120;

// Product of structure tensor `c` on a, b.
Vec apply(const std::vector<Mat>& c, const Vec& a, const Vec& b) {
    Vec out(static_cast<Eigen::Index>(c.size()));
    for (size_t k = 0; k < c.size(); ++k) out(static_cast<Eigen::Index>(k)) = a.dot(c[k] * b);
    return out;
}

struct JordanResidual {
    std::vector<Vec> samples;  // a's; b ranges over the basis
    int d;

    Vec value(const std::vector<Mat>& c) const {
        Vec r(static_cast<Eigen::Index>(samples.size()) * d * d);
        Eigen::Index off = 0;
        for (const auto& a : samples) {
            const Vec a2 = apply(c, a, a);
            for (int bi = 0; bi < d; ++bi) {
                const Vec b = Vec::Unit(d, bi);
                r.segment(off, d) = apply(c, a2, apply(c, b, a)) - apply(c, apply(c, a2, b), a);
                off += d;
            }
        }
        return r;
    }

    // Directional derivative along the tensor n.
    Vec derivative(const std::vector<Mat>& c, const std::vector<Mat>& n) const {
        Vec r(static_cast<Eigen::Index>(samples.size()) * d * d);
        Eigen::Index off = 0;
        for (const auto& a : samples) {
            const Vec a2 = apply(c, a, a);
            const Vec da2 = apply(n, a, a);
            for (int bi = 0; bi < d; ++bi) {
                const Vec b = Vec::Unit(d, bi);
                const Vec ba = apply(c, b, a);
                const Vec dba = apply(n, b, a);
                const Vec a2b = apply(c, a2, b);
                const Vec da2b = apply(n, a2, b) + apply(c, da2, b);
                const Vec left = apply(n, a2, ba) + apply(c, da2, ba) + apply(c, a2, dba);
                const Vec right = apply(n, a2b, a) + apply(c, da2b, a);
                r.segment(off, d) = left - right;
                off += d;
            }
        }
        return r;
    }
};

std::vector<Mat> combine(const std::vector<Mat>& base, const std::vector<std::vector<Mat>>& dirs, const Vec& t) {
    std::vector<Mat> c = base;
    for (size_t p = 0; p < dirs.size(); ++p)
        for (size_t k = 0; k < c.size(); ++k) c[k] += t(static_cast<Eigen::Index>(p)) * dirs[p][k];
    return c;
}

// Levenberg-Marquardt on the Jordan residual over the affine parametrization.
NewtonRun levenberg_marquardt(const JordanResidual& res, const std::vector<Mat>& base,
                              const std::vector<std::vector<Mat>>& dirs, Vec& t) {
    NewtonRun run;
    const auto np = static_cast<Eigen::Index>(dirs.size());
    double mu = 1e-3;
    Vec r = res.value(combine(base, dirs, t));
    double cost = r.squaredNorm();
    for (int it = 0; it < 300; ++it) {
        run.iterations = it + 1;
        const auto c = combine(base, dirs, t);
        Mat jac(r.size(), np);
        for (Eigen::Index p = 0; p < np; ++p) jac.col(p) = res.derivative(c, dirs[static_cast<size_t>(p)]);
        const Mat jtj = jac.transpose() * jac;
        const Vec g = jac.transpose() * r;
        bool improved = false;
        for (int tries = 0; tries < 30; ++tries) {
            const Mat damped = jtj + mu * Mat(jtj.diagonal().cwiseMax(1e-12).asDiagonal());
            const Vec step = damped.ldlt().solve(-g);
            const Vec trial = t + step;
            const Vec rt = res.value(combine(base, dirs, trial));
            if (rt.squaredNorm() < cost) {
                t = trial;
                r = rt;
                cost = rt.squaredNorm();
                mu = std::max(mu / 3, 1e-15);
                improved = true;
                if (step.norm() < 1e-12) it = 1 << 20;
                break;
            }
            mu *= 4;
        }
        if (!improved || cost < 1e-30) break;
    }
    run.residual = r.size() ? r.cwiseAbs().maxCoeff() : 0.0;
    run.converged = run.residual <= 1e-8;
    return run;
}

// Float membership: facets for polyhedral cones, eigenvalues for PSD cones.
class ApproxCone {
public:
    explicit ApproxCone(const Cone& k) : cone_(k) {
        if (k.kind == ConeKind::Polyhedral) {
            for (const auto& h : dual_cone(k, identity_matrix(k.dim)).generators) facets_.push_back(kvwb::to_double(h));
        } else {
            to_operator_ = kvwb::to_double(k.to_operator);
            for (int i = 0; i < k.operators->size(); ++i) {
                const QVector e = QVector(identity_matrix(k.operators->size()).col(i));
                ops_.push_back(k.operators->matrix(e).to_complex());
            }
        }
    }

    bool contains(const Vec& v, double tol) const {
        if (cone_.kind == ConeKind::Polyhedral) {
            for (const auto& h : facets_)
                if (h.dot(v) < -tol * h.norm() * std::max(1.0, v.norm())) return false;
            return true;
        }
        const Vec c = to_operator_ * v;
        Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(ops_.front().rows(), ops_.front().cols());
        for (Eigen::Index i = 0; i < c.size(); ++i) m += c(i) * ops_[static_cast<size_t>(i)];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(m, Eigen::EigenvaluesOnly);
        return solver.eigenvalues()(0) >= -tol * std::max(1.0, m.norm());
    }

private:
    const Cone& cone_;
    std::vector<Vec> facets_;
    Mat to_operator_;
    std::vector<Eigen::MatrixXcd> ops_;
};

}  // namespace

RecoveryResult recover_jordan_product(const RecoveryProblem& p) {
    RecoveryResult out;
    const int d = static_cast<int>(p.form.rows());
    out.imposed_constraints = {"commutativity", "unit", "form associativity"};
    if (p.impose_equivariance) out.imposed_constraints.push_back("group equivariance");
    if (p.impose_outcome_idempotence && !p.sharp_outcomes.empty()) out.imposed_constraints.push_back("outcome idempotence");

    if (!is_positive_definite(p.form)) {
        out.status = "hypotheses not met";
        return out;
    }
    out.self_dual_verified = is_self_dual(p.cone, p.form).verdict;
    if (!out.self_dual_verified) {
        out.status = "hypotheses not met";
        return out;
    }

    const LinearSystem sys = product_constraints(p, d);
    const int nu = sys.unknowns;
    std::vector<Mat> base;
    std::vector<std::vector<Mat>> dirs;
    std::optional<std::vector<QMatrix>> exact_base;
    if (nu <= kExactUnknownLimit) {
        QMatrix a = zero_matrix(static_cast<Eigen::Index>(std::max<size_t>(1, sys.rows.size())), nu);
        QVector b = zero_vector(a.rows());
        for (size_t i = 0; i < sys.rows.size(); ++i) {
            for (const auto& [v, c] : sys.rows[i]) a(static_cast<Eigen::Index>(i), v) = c;
            b(static_cast<Eigen::Index>(i)) = sys.rhs[i];
        }
        const auto x = solve(a, b);
        if (!x) {
            out.status = "linear system inconsistent";
            return out;
        }
        const QMatrix null = nullspace(a);
        exact_base = structure_from_unknowns(*x, d);
        base = structure_from_unknowns(Vec(kvwb::to_double(*x)), d);
        for (Eigen::Index c = 0; c < null.cols(); ++c)
            dirs.push_back(structure_from_unknowns(Vec(kvwb::to_double(QVector(null.col(c)))), d));
    } else {
        Mat a = Mat::Zero(static_cast<Eigen::Index>(sys.rows.size()), nu);
        Vec b(static_cast<Eigen::Index>(sys.rows.size()));
        for (size_t i = 0; i < sys.rows.size(); ++i) {
            for (const auto& [v, c] : sys.rows[i]) a(static_cast<Eigen::Index>(i), v) = kvwb::to_double(c);
            b(static_cast<Eigen::Index>(i)) = kvwb::to_double(sys.rhs[i]);
        }
        Eigen::BDCSVD<Mat> svd(a, Eigen::ComputeThinU | Eigen::ComputeFullV);
        const double cutoff = 1e-9 * svd.singularValues()(0);
        svd.setThreshold(cutoff / svd.singularValues()(0));
        const Vec x = svd.solve(b);
        if ((a * x - b).cwiseAbs().maxCoeff() > 1e-8) {
            out.status = "linear system inconsistent";
            return out;
        }
        base = structure_from_unknowns(x, d);
        const auto rank = svd.rank();
        for (Eigen::Index c = rank; c < nu; ++c) dirs.push_back(structure_from_unknowns(Vec(svd.matrixV().col(c)), d));
    }
    out.linear_solution_dim = static_cast<int>(dirs.size());

    JordanResidual res;
    res.d = d;
    for (int i = 0; i < d; ++i) res.samples.push_back(Vec::Unit(d, i));
    for (int i = 0; i + 1 < d; ++i) res.samples.push_back(Vec::Unit(d, i) + Vec::Unit(d, i + 1));
    res.samples.push_back(Vec::Ones(d));

    std::mt19937_64 rng(p.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<std::vector<Mat>> solutions;
    for (int s = 0; s < p.newton_seeds; ++s) {
        const std::uint64_t run_seed = rng();
        std::mt19937_64 local(run_seed);
        Vec t(static_cast<Eigen::Index>(dirs.size()));
        for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = normal(local);
        NewtonRun run;
        if (dirs.empty()) {
            const Vec r = res.value(base);
            run.residual = r.cwiseAbs().maxCoeff();
            run.converged = run.residual <= 1e-8;
        } else {
            run = levenberg_marquardt(res, base, dirs, t);
        }
        run.seed = run_seed;
        out.runs.push_back(run);
        if (run.converged) solutions.push_back(combine(base, dirs, t));
    }
    if (solutions.empty()) {
        out.status = "no formally real solution";
        out.residual = out.runs.empty() ? 0 : out.runs.front().residual;
        return out;
    }
    for (const auto& sol : solutions)
        for (size_t k = 0; k < sol.size(); ++k)
            out.seed_spread = std::max(out.seed_spread, (sol[k] - solutions.front()[k]).cwiseAbs().maxCoeff());
    out.unique = solutions.size() == out.runs.size() && out.seed_spread <= 1e-8;

    JordanAlgebra j;
    if (dirs.empty() && exact_base) {
        j = algebra_from_exact_structure(*exact_base, p.unit);
        out.exact = true;
    } else {
        j = algebra_from_structure(solutions.front(), kvwb::to_double(p.unit));
    }
    j.kind = JordanKind::Recovered;
    out.residual = res.value(j.structure).cwiseAbs().maxCoeff();

    // Squares of basis vectors and of cone generators lie in the cone.
    const ApproxCone approx(p.cone);
    out.squares_in_cone = true;
    std::vector<Vec> probes;
    for (int i = 0; i < d; ++i) probes.push_back(Vec::Unit(d, i));
    for (const auto& g : p.cone.generators) probes.push_back(kvwb::to_double(g));
    for (const auto& v : probes)
        if (!approx.contains(jordan_product(j, v, v), 1e-9)) out.squares_in_cone = false;
    if (j.is_exact()) {
        out.trace_form_pd = is_positive_definite(exact_trace_form(j));
    } else {
        Eigen::SelfAdjointEigenSolver<Mat> solver(trace_form(j), Eigen::EigenvaluesOnly);
        out.trace_form_pd = solver.eigenvalues()(0) > 1e-10;
    }
    if (!out.squares_in_cone || !out.trace_form_pd) {
        out.status = "no formally real solution";
        return out;
    }
    out.status = "recovered";
    out.algebra = std::move(j);
    return out;
}

// ---------------------------------------------------------------------------
// Identification

std::vector<std::string> simple_candidates(int dim, int rank) {
    std::vector<std::string> names;
    if (rank == 1) {
        if (dim == 1) names.push_back("R");
        return names;
    }
    if (rank == 2 && dim >= 3) {
        const int n = dim - 1;
        std::string s;
        if (n == 2) s = "RealSym(2) = ";
        if (n == 3) s = "ComplexHerm(2) = ";
        if (n == 5) s = "QuatHerm(2) = ";
        names.push_back(s + "SpinFactor(" + std::to_string(n) + ")");
        return names;
    }
    if (rank >= 3) {
        const int n = rank;
        if (dim == n * (n + 1) / 2) names.push_back("RealSym(" + std::to_string(n) + ")");
        if (dim == n * n) names.push_back("ComplexHerm(" + std::to_string(n) + ")");
        if (dim == n * (2 * n - 1)) names.push_back("QuatHerm(" + std::to_string(n) + ")");
    }
    return names;
}

namespace {

// Number of distinct eigenvalues of a generic element of the ideal with unit c.
int ideal_rank(const JordanAlgebra& j, const Vec& c, std::mt19937_64& rng) {
    const Vec a = jordan_product(j, c, random_vector(rng, j.dim));
    const auto mp = minimal_polynomial(j, a, c);
    return mp.ok ? static_cast<int>(mp.powers.size()) : -1;
}

int matrix_rank(const Mat& m) {
    Eigen::JacobiSVD<Mat> svd(m);
    svd.setThreshold(1e-8);
    return static_cast<int>(svd.rank());
}

}  // namespace

Identification identify_algebra(const JordanAlgebra& j) {
    Identification id;
    const int d = j.dim;
    std::mt19937_64 rng(7);
    // Center: z with [L_z, L_a] = 0 for every basis element a.
    std::vector<Mat> l;
    for (int i = 0; i < d; ++i) l.push_back(left_multiplication(j, Vec::Unit(d, i)));
    Mat system(static_cast<Eigen::Index>(d) * d * d, d);
    for (int a = 0; a < d; ++a) {
        for (int i = 0; i < d; ++i) {
            const Mat comm = l[static_cast<size_t>(i)] * l[static_cast<size_t>(a)] - l[static_cast<size_t>(a)] * l[static_cast<size_t>(i)];
            system.block(static_cast<Eigen::Index>(a) * d * d, i, d * d, 1) = comm.reshaped();
        }
    }
    Eigen::JacobiSVD<Mat> svd(system, Eigen::ComputeFullV);
    svd.setThreshold(1e-8);
    const auto center_dim = d - svd.rank();
    std::vector<Vec> units;
    if (center_dim <= 1) {
        units.push_back(j.unit);
    } else {
        Vec z = Vec::Zero(d);
        std::uniform_real_distribution<double> u(1.0, 2.0);
        for (Eigen::Index c = svd.rank(); c < d; ++c) z += u(rng) * svd.matrixV().col(c);
        const auto sd = krylov_spectral(j, z, j.unit);
        if (sd.ok) units = sd.idempotents;
        else units.push_back(j.unit);
    }
    std::vector<std::vector<std::string>> per_component;
    for (const auto& c : units) {
        const int dim_c = matrix_rank(left_multiplication(j, c));
        const int rank_c = ideal_rank(j, c, rng);
        id.simple_components.emplace_back(dim_c, rank_c);
        id.rank += rank_c;
        auto names = simple_candidates(dim_c, rank_c);
        if (names.empty()) names.push_back("unclassified(" + std::to_string(dim_c) + "," + std::to_string(rank_c) + ")");
        per_component.push_back(names);
    }
    // Order components by (dim, rank) so that identical algebras read alike.
    std::vector<size_t> order(per_component.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) { return id.simple_components[a] > id.simple_components[b]; });
    std::vector<std::string> combos{""};
    for (size_t idx : order) {
        std::vector<std::string> next;
        for (const auto& prefix : combos)
            for (const auto& n : per_component[idx]) next.push_back(prefix.empty() ? n : prefix + " + " + n);
        combos = std::move(next);
    }
    id.candidates = combos;
    return id;
}

}  // namespace kvwb
