#pragma once

// Exact rational scalars and the small amount of exact linear algebra the
// rest of the library is built on (row reduction, null spaces, inverses).

#include <boost/multiprecision/gmp.hpp>
#include <boost/multiprecision/eigen.hpp>
#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace kvwb {

using Rational = boost::multiprecision::number<boost::multiprecision::gmp_rational,
                                               boost::multiprecision::et_off>;
using Integer = boost::multiprecision::number<boost::multiprecision::gmp_int,
                                              boost::multiprecision::et_off>;

using QVector = Eigen::Matrix<Rational, Eigen::Dynamic, 1>;
using QMatrix = Eigen::Matrix<Rational, Eigen::Dynamic, Eigen::Dynamic>;

/// Base class for every error the library throws.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ParseError : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public Error {
public:
    using Error::Error;
};

/// Parses "p/q", integers, and decimals ("0.25", "-1.5e-3") exactly.
Rational parse_rational(std::string_view text);

/// Exact rational value of a double (every finite double is dyadic).
Rational rational_from_double(double value);

/// Shortest decimal that round-trips, parsed exactly. Used for JSON numbers.
Rational rational_from_decimal_double(double value);

std::string to_string(const Rational& q);
std::string format_double(double value);  // 17 significant digits

double to_double(const Rational& q);
Eigen::VectorXd to_double(const QVector& v);
Eigen::MatrixXd to_double(const QMatrix& m);

QMatrix zero_matrix(Eigen::Index rows, Eigen::Index cols);
QVector zero_vector(Eigen::Index n);
QMatrix identity_matrix(Eigen::Index n);

/// Row-reduced echelon form, computed in place. Returns pivot columns.
std::vector<Eigen::Index> rref_in_place(QMatrix& m);

Eigen::Index rank(QMatrix m);

/// Null-space basis as columns, one per free variable in RREF order.
QMatrix nullspace(const QMatrix& a);

/// Basis of the column space of `a` made of its own columns (greedy, left to right).
std::vector<Eigen::Index> independent_columns(const QMatrix& a);

/// Some solution of a x = b, or nullopt if the system is inconsistent.
std::optional<QVector> solve(const QMatrix& a, const QVector& b);

/// Inverse of a square matrix, or nullopt when singular.
std::optional<QMatrix> inverse(const QMatrix& a);

Rational determinant(QMatrix a);

/// Exact LDL^T pivots of a symmetric matrix; true iff all are strictly positive.
bool is_positive_definite(const QMatrix& symmetric);

bool is_zero(const QVector& v);
bool is_symmetric(const QMatrix& m);

/// Scales a non-zero vector to a primitive integer vector (same direction).
QVector primitive(const QVector& v);

/// Lexicographic comparison used to sort generator sets deterministically.
bool lex_less(const QVector& a, const QVector& b);

std::vector<std::string> to_strings(const QVector& v);
std::vector<std::vector<std::string>> to_strings(const QMatrix& m);

}  // namespace kvwb
