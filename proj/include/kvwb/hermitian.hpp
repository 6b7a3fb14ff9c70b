#pragma once

// Exact complex-rational matrices and the operator-basis coordinates used
// for quantum models: a Hermitian d x d matrix is stored as its real
// coordinates in the orthogonal basis {1, off-diagonal generators, traceless
// diagonals}.

#include "kvwb/rational.hpp"

#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace kvwb {

enum class Field { Real, Complex };

std::string to_string(Field f);
Field parse_field(const std::string& s);

/// Complex matrix with exact Gaussian-rational entries.
struct CMatrix {
    QMatrix re;
    QMatrix im;

    CMatrix() = default;
    CMatrix(QMatrix real, QMatrix imag) : re(std::move(real)), im(std::move(imag)) {}

    static CMatrix zero(Eigen::Index n);
    static CMatrix identity(Eigen::Index n);

    Eigen::Index dim() const { return re.rows(); }

    CMatrix adjoint() const;
    CMatrix conjugate() const;
    Rational trace_re() const;
    Rational trace_im() const;
    bool is_hermitian() const;
    bool operator==(const CMatrix& other) const { return re == other.re && im == other.im; }

    Eigen::MatrixXcd to_complex() const;
};

CMatrix operator+(const CMatrix& a, const CMatrix& b);
CMatrix operator-(const CMatrix& a, const CMatrix& b);
CMatrix operator*(const CMatrix& a, const CMatrix& b);
CMatrix operator*(const Rational& s, const CMatrix& a);

std::optional<CMatrix> inverse(const CMatrix& a);

/// Gaussian-integer (or integer) vector; entries as (re, im) pairs.
using GaussVector = std::vector<std::pair<long, long>>;

/// Rank-one projector v v^* / (v^* v).
CMatrix projector(const GaussVector& v);

/// Cayley transform (1 - K)(1 + K)^{-1} of an anti-Hermitian K; exactly unitary.
CMatrix cayley_unitary(const CMatrix& anti_hermitian);

/// Orthogonal (not normalised) basis of the real space of Hermitian (or real
/// symmetric) d x d matrices. Element 0 is the identity.
class OperatorBasis {
public:
    OperatorBasis(Field field, int dim);

    Field field() const { return field_; }
    int hilbert_dim() const { return dim_; }
    int size() const { return static_cast<int>(elements_.size()); }
    const CMatrix& element(int k) const { return elements_[static_cast<size_t>(k)]; }
    const std::string& label(int k) const { return labels_[static_cast<size_t>(k)]; }

    /// tr(lambda_k^2) for each basis element.
    const QVector& norms() const { return norms_; }

    QVector coordinates(const CMatrix& hermitian) const;
    CMatrix matrix(const QVector& coords) const;

    /// Matrix of a -> U a U^* on coordinates.
    QMatrix conjugation_action(const CMatrix& unitary) const;

    /// Matrix of a -> conj(a) (entrywise complex conjugation) on coordinates.
    QMatrix complex_conjugation() const;

    /// Trace form tr(ab) on coordinates.
    QMatrix trace_form() const;

    /// Hermitian matrix F with f(a) = tr(F a) for a functional given in dual coordinates.
    CMatrix operator_of_functional(const QVector& functional) const;

    /// Functional a -> tr(rho a) in dual coordinates.
    QVector functional_of_operator(const CMatrix& rho) const;

private:
    Field field_;
    int dim_;
    std::vector<CMatrix> elements_;
    std::vector<std::string> labels_;
    QVector norms_;
};

/// Smallest eigenvalue of a Hermitian matrix (float).
double min_eigenvalue(const CMatrix& hermitian);

/// Pseudo-random Cayley unitaries (orthogonal for the real field) from small
/// integer anti-Hermitian generators. Deterministic in `seed`.
std::vector<CMatrix> random_cayley_unitaries(Field field, int dim, int count, std::uint64_t seed);

/// Pseudo-random rank-one projectors with small Gaussian-integer vectors.
std::vector<CMatrix> random_pure_projectors(Field field, int dim, int count, std::uint64_t seed);

}  // namespace kvwb
