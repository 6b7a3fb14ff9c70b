#include "kvwb/hermitian.hpp"

#include <Eigen/Eigenvalues>

namespace kvwb {

std::string to_string(Field f) {
    return f == Field::Real ? "real" : "complex";
}

Field parse_field(const std::string& s) {
    if (s == "real") return Field::Real;
    if (s == "complex") return Field::Complex;
    throw ParseError("unknown field '" + s + "' (expected real or complex)");
}

CMatrix CMatrix::zero(Eigen::Index n) {
    return CMatrix(zero_matrix(n, n), zero_matrix(n, n));
}

CMatrix CMatrix::identity(Eigen::Index n) {
    return CMatrix(identity_matrix(n), zero_matrix(n, n));
}

CMatrix CMatrix::adjoint() const {
    return CMatrix(re.transpose(), QMatrix(-im.transpose()));
}

CMatrix CMatrix::conjugate() const {
    return CMatrix(re, QMatrix(-im));
}

Rational CMatrix::trace_re() const {
    return re.trace();
}

Rational CMatrix::trace_im() const {
    return im.trace();
}

bool CMatrix::is_hermitian() const {
    return re == re.transpose() && im == QMatrix(-im.transpose());
}

Eigen::MatrixXcd CMatrix::to_complex() const {
    const Eigen::MatrixXd r = to_double(re);
    const Eigen::MatrixXd i = to_double(im);
    Eigen::MatrixXcd out(r.rows(), r.cols());
    for (Eigen::Index a = 0; a < r.rows(); ++a)
        for (Eigen::Index b = 0; b < r.cols(); ++b) out(a, b) = {r(a, b), i(a, b)};
    return out;
}

CMatrix operator+(const CMatrix& a, const CMatrix& b) {
    return CMatrix(a.re + b.re, a.im + b.im);
}

CMatrix operator-(const CMatrix& a, const CMatrix& b) {
    return CMatrix(a.re - b.re, a.im - b.im);
}

CMatrix operator*(const CMatrix& a, const CMatrix& b) {
    return CMatrix(a.re * b.re - a.im * b.im, a.re * b.im + a.im * b.re);
}

CMatrix operator*(const Rational& s, const CMatrix& a) {
    return CMatrix(QMatrix(a.re * s), QMatrix(a.im * s));
}

std::optional<CMatrix> inverse(const CMatrix& a) {
    const Eigen::Index n = a.dim();
    QMatrix embedded(2 * n, 2 * n);
    embedded.topLeftCorner(n, n) = a.re;
    embedded.topRightCorner(n, n) = -a.im;
    embedded.bottomLeftCorner(n, n) = a.im;
    embedded.bottomRightCorner(n, n) = a.re;
    auto inv = inverse(embedded);
    if (!inv) return std::nullopt;
    return CMatrix(QMatrix(inv->topLeftCorner(n, n)), QMatrix(inv->bottomLeftCorner(n, n)));
}

CMatrix projector(const GaussVector& v) {
    const auto n = static_cast<Eigen::Index>(v.size());
    CMatrix p = CMatrix::zero(n);
    Rational norm = 0;
    for (const auto& [r, i] : v) norm += Rational(r * r + i * i);
    if (norm == 0) throw Error("projector of the zero vector");
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            // v_a * conj(v_b)
            const auto [ar, ai] = v[static_cast<size_t>(a)];
            const auto [br, bi] = v[static_cast<size_t>(b)];
            p.re(a, b) = Rational(ar * br + ai * bi) / norm;
            p.im(a, b) = Rational(ai * br - ar * bi) / norm;
        }
    }
    return p;
}

CMatrix cayley_unitary(const CMatrix& k) {
    const Eigen::Index n = k.dim();
    const CMatrix id = CMatrix::identity(n);
    auto inv = inverse(id + k);
    if (!inv) throw Error("Cayley transform: 1 + K is singular (K is not anti-Hermitian)");
    return (id - k) * *inv;
}

OperatorBasis::OperatorBasis(Field field, int dim) : field_(field), dim_(dim) {
    if (dim < 1) throw Error("operator basis needs dimension >= 1");
    const Eigen::Index n = dim;
    elements_.push_back(CMatrix::identity(n));
    labels_.push_back("1");
    for (int j = 0; j < dim; ++j) {
        for (int k = j + 1; k < dim; ++k) {
            CMatrix s = CMatrix::zero(n);
            s.re(j, k) = 1;
            s.re(k, j) = 1;
            elements_.push_back(s);
            labels_.push_back("S" + std::to_string(j) + std::to_string(k));
            if (field == Field::Complex) {
                CMatrix a = CMatrix::zero(n);
                a.im(j, k) = -1;
                a.im(k, j) = 1;
                elements_.push_back(a);
                labels_.push_back("A" + std::to_string(j) + std::to_string(k));
            }
        }
    }
    for (int l = 1; l < dim; ++l) {
        CMatrix d = CMatrix::zero(n);
        for (int i = 0; i < l; ++i) d.re(i, i) = 1;
        d.re(l, l) = -l;
        elements_.push_back(d);
        labels_.push_back("D" + std::to_string(l));
    }
    norms_ = zero_vector(static_cast<Eigen::Index>(elements_.size()));
    for (size_t k = 0; k < elements_.size(); ++k)
        norms_(static_cast<Eigen::Index>(k)) = (elements_[k] * elements_[k]).trace_re();
}

QVector OperatorBasis::coordinates(const CMatrix& h) const {
    if (h.dim() != dim_) throw DimensionMismatch("operator has wrong dimension for this basis");
    QVector c(size());
    for (int k = 0; k < size(); ++k) c(k) = (h * element(k)).trace_re() / norms_(k);
    return c;
}

CMatrix OperatorBasis::matrix(const QVector& coords) const {
    if (coords.size() != size()) throw DimensionMismatch("coordinate vector has wrong length");
    CMatrix m = CMatrix::zero(dim_);
    for (int k = 0; k < size(); ++k)
        if (coords(k) != 0) m = m + coords(k) * element(k);
    return m;
}

QMatrix OperatorBasis::conjugation_action(const CMatrix& u) const {
    QMatrix m(size(), size());
    const CMatrix ua = u.adjoint();
    for (int k = 0; k < size(); ++k) m.col(k) = coordinates(u * element(k) * ua);
    return m;
}

QMatrix OperatorBasis::complex_conjugation() const {
    QMatrix m(size(), size());
    for (int k = 0; k < size(); ++k) m.col(k) = coordinates(element(k).conjugate());
    return m;
}

QMatrix OperatorBasis::trace_form() const {
    QMatrix g = zero_matrix(size(), size());
    for (int k = 0; k < size(); ++k) g(k, k) = norms_(k);
    return g;
}

CMatrix OperatorBasis::operator_of_functional(const QVector& f) const {
    // f(a) = sum_k f_k c_k(a) with c_k(a) = tr(a l_k)/n_k, so F = sum_k f_k l_k / n_k.
    QVector coords(size());
    for (int k = 0; k < size(); ++k) coords(k) = f(k) / norms_(k);
    return matrix(coords);
}

QVector OperatorBasis::functional_of_operator(const CMatrix& rho) const {
    QVector f(size());
    for (int k = 0; k < size(); ++k) f(k) = (rho * element(k)).trace_re();
    return f;
}

double min_eigenvalue(const CMatrix& h) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h.to_complex(), Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

namespace {

long small_int(std::mt19937_64& rng, long lo, long hi) {
    const auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(rng() % span);
}

}  // namespace

std::vector<CMatrix> random_cayley_unitaries(Field field, int dim, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CMatrix> out;
    while (static_cast<int>(out.size()) < count) {
        CMatrix k = CMatrix::zero(dim);
        for (int a = 0; a < dim; ++a) {
            if (field == Field::Complex) k.im(a, a) = small_int(rng, -3, 3);
            for (int b = a + 1; b < dim; ++b) {
                const long x = small_int(rng, -3, 3);
                k.re(a, b) = x;
                k.re(b, a) = -x;
                if (field == Field::Complex) {
                    const long y = small_int(rng, -3, 3);
                    k.im(a, b) = y;
                    k.im(b, a) = y;
                }
            }
        }
        bool trivial = true;
        for (int a = 0; a < dim && trivial; ++a)
            for (int b = a + 1; b < dim; ++b)
                if (k.re(a, b) != 0 || k.im(a, b) != 0) trivial = false;
        if (trivial) continue;  // diagonal K acts trivially by conjugation up to phases
        out.push_back(cayley_unitary(k));
    }
    return out;
}

std::vector<CMatrix> random_pure_projectors(Field field, int dim, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<CMatrix> out;
    while (static_cast<int>(out.size()) < count) {
        GaussVector v(static_cast<size_t>(dim));
        bool nonzero = false;
        for (auto& [r, i] : v) {
            r = small_int(rng, -4, 4);
            i = field == Field::Complex ? small_int(rng, -4, 4) : 0;
            nonzero = nonzero || r != 0 || i != 0;
        }
        if (nonzero) out.push_back(projector(v));
    }
    return out;
}

}  // namespace kvwb
