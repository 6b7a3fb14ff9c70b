#include "kvwb/rational.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>

namespace kvwb {

namespace {

Integer pow10(long exponent) {
    Integer r = 1;
    for (long i = 0; i < exponent; ++i) r *= 10;
    return r;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

Rational parse_decimal(std::string_view text) {
    std::string_view s = text;
    bool negative = false;
    if (!s.empty() && (s.front() == '-' || s.front() == '+')) {
        negative = s.front() == '-';
        s.remove_prefix(1);
    }
    long exponent = 0;
    if (auto e = s.find_first_of("eE"); e != std::string_view::npos) {
        std::string_view exp_text = s.substr(e + 1);
        bool exp_negative = false;
        if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
            exp_negative = exp_text.front() == '-';
            exp_text.remove_prefix(1);
        }
        if (!all_digits(exp_text)) throw ParseError("invalid exponent in number '" + std::string(text) + "'");
        exponent = std::stol(std::string(exp_text));
        if (exp_negative) exponent = -exponent;
        s = s.substr(0, e);
    }
    std::string digits;
    long fraction_digits = 0;
    if (auto dot = s.find('.'); dot != std::string_view::npos) {
        std::string_view whole = s.substr(0, dot);
        std::string_view frac = s.substr(dot + 1);
        if ((!whole.empty() && !all_digits(whole)) || (!frac.empty() && !all_digits(frac)) ||
            (whole.empty() && frac.empty()))
            throw ParseError("invalid decimal '" + std::string(text) + "'");
        digits = std::string(whole) + std::string(frac);
        fraction_digits = static_cast<long>(frac.size());
    } else {
        if (!all_digits(s)) throw ParseError("invalid number '" + std::string(text) + "'");
        digits = std::string(s);
    }
    // Leading zeros would make the string octal to the Integer constructor.
    const auto first = digits.find_first_not_of('0');
    digits = first == std::string::npos ? "0" : digits.substr(first);
    Integer mantissa(digits);
    long scale = exponent - fraction_digits;
    Rational value = scale >= 0 ? Rational(mantissa * pow10(scale)) : Rational(mantissa, pow10(-scale));
    return negative ? Rational(-value) : value;
}

}  // namespace

Rational parse_rational(std::string_view text) {
    while (!text.empty() && text.front() == ' ') text.remove_prefix(1);
    while (!text.empty() && text.back() == ' ') text.remove_suffix(1);
    if (text.empty()) throw ParseError("empty number");
    if (auto slash = text.find('/'); slash != std::string_view::npos) {
        Rational num = parse_decimal(text.substr(0, slash));
        Rational den = parse_decimal(text.substr(slash + 1));
        if (den == 0) throw ParseError("zero denominator in '" + std::string(text) + "'");
        return num / den;
    }
    return parse_decimal(text);
}

Rational rational_from_double(double value) {
    if (!std::isfinite(value)) throw ParseError("non-finite value");
    return Rational(value);
}

Rational rational_from_decimal_double(double value) {
    if (!std::isfinite(value)) throw ParseError("non-finite value");
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    if (ec != std::errc()) throw ParseError("cannot format number");
    return parse_decimal(std::string_view(buf, static_cast<size_t>(end - buf)));
}

std::string to_string(const Rational& q) {
    return q.str();
}

std::string format_double(double value) {
    if (value == 0.0) return "0";
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

double to_double(const Rational& q) {
    return q.convert_to<double>();
}

Eigen::VectorXd to_double(const QVector& v) {
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = to_double(v(i));
    return out;
}

Eigen::MatrixXd to_double(const QMatrix& m) {
    Eigen::MatrixXd out(m.rows(), m.cols());
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) out(i, j) = to_double(m(i, j));
    return out;
}

QMatrix zero_matrix(Eigen::Index rows, Eigen::Index cols) {
    QMatrix m(rows, cols);
    m.setConstant(Rational(0));
    return m;
}

QVector zero_vector(Eigen::Index n) {
    QVector v(n);
    v.setConstant(Rational(0));
    return v;
}

QMatrix identity_matrix(Eigen::Index n) {
    QMatrix m = zero_matrix(n, n);
    for (Eigen::Index i = 0; i < n; ++i) m(i, i) = 1;
    return m;
}

std::vector<Eigen::Index> rref_in_place(QMatrix& m) {
    std::vector<Eigen::Index> pivots;
    const Eigen::Index rows = m.rows();
    const Eigen::Index cols = m.cols();
    Eigen::Index r = 0;
    for (Eigen::Index c = 0; c < cols && r < rows; ++c) {
        Eigen::Index p = r;
        while (p < rows && m(p, c) == 0) ++p;
        if (p == rows) continue;
        if (p != r) m.row(p).swap(m.row(r));
        const Rational inv = Rational(1) / m(r, c);
        for (Eigen::Index j = c; j < cols; ++j)
            if (m(r, j) != 0) m(r, j) *= inv;
        for (Eigen::Index i = 0; i < rows; ++i) {
            if (i == r || m(i, c) == 0) continue;
            const Rational f = m(i, c);
            for (Eigen::Index j = c; j < cols; ++j)
                if (m(r, j) != 0) m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

Eigen::Index rank(QMatrix m) {
    return static_cast<Eigen::Index>(rref_in_place(m).size());
}

QMatrix nullspace(const QMatrix& a) {
    QMatrix r = a;
    const auto pivots = rref_in_place(r);
    const Eigen::Index n = a.cols();
    std::vector<bool> is_pivot(static_cast<size_t>(n), false);
    for (auto p : pivots) is_pivot[static_cast<size_t>(p)] = true;
    std::vector<Eigen::Index> free;
    for (Eigen::Index j = 0; j < n; ++j)
        if (!is_pivot[static_cast<size_t>(j)]) free.push_back(j);
    QMatrix basis = zero_matrix(n, static_cast<Eigen::Index>(free.size()));
    for (size_t k = 0; k < free.size(); ++k) {
        const Eigen::Index f = free[k];
        basis(f, static_cast<Eigen::Index>(k)) = 1;
        for (size_t i = 0; i < pivots.size(); ++i)
            basis(pivots[i], static_cast<Eigen::Index>(k)) = -r(static_cast<Eigen::Index>(i), f);
    }
    return basis;
}

std::vector<Eigen::Index> independent_columns(const QMatrix& a) {
    QMatrix r = a;
    return rref_in_place(r);
}

std::optional<QVector> solve(const QMatrix& a, const QVector& b) {
    if (a.rows() != b.size()) throw DimensionMismatch("solve: row count differs from right-hand side");
    QMatrix aug(a.rows(), a.cols() + 1);
    aug.leftCols(a.cols()) = a;
    aug.col(a.cols()) = b;
    const auto pivots = rref_in_place(aug);
    if (!pivots.empty() && pivots.back() == a.cols()) return std::nullopt;
    QVector x = zero_vector(a.cols());
    for (size_t i = 0; i < pivots.size(); ++i) x(pivots[i]) = aug(static_cast<Eigen::Index>(i), a.cols());
    return x;
}

std::optional<QMatrix> inverse(const QMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("inverse of a non-square matrix");
    const Eigen::Index n = a.rows();
    QMatrix aug(n, 2 * n);
    aug.leftCols(n) = a;
    aug.rightCols(n) = identity_matrix(n);
    const auto pivots = rref_in_place(aug);
    if (static_cast<Eigen::Index>(pivots.size()) < n || pivots[static_cast<size_t>(n - 1)] != n - 1)
        return std::nullopt;
    return QMatrix(aug.rightCols(n));
}

Rational determinant(QMatrix a) {
    if (a.rows() != a.cols()) throw DimensionMismatch("determinant of a non-square matrix");
    const Eigen::Index n = a.rows();
    Rational det = 1;
    for (Eigen::Index c = 0; c < n; ++c) {
        Eigen::Index p = c;
        while (p < n && a(p, c) == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            a.row(p).swap(a.row(c));
            det = -det;
        }
        det *= a(c, c);
        for (Eigen::Index i = c + 1; i < n; ++i) {
            if (a(i, c) == 0) continue;
            const Rational f = a(i, c) / a(c, c);
            for (Eigen::Index j = c; j < n; ++j) a(i, j) -= f * a(c, j);
        }
    }
    return det;
}

bool is_positive_definite(const QMatrix& symmetric) {
    if (symmetric.rows() != symmetric.cols()) return false;
    QMatrix a = symmetric;
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k < n; ++k) {
        if (a(k, k) <= 0) return false;
        for (Eigen::Index i = k + 1; i < n; ++i) {
            if (a(i, k) == 0) continue;
            const Rational f = a(i, k) / a(k, k);
            for (Eigen::Index j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return true;
}

bool is_zero(const QVector& v) {
    for (Eigen::Index i = 0; i < v.size(); ++i)
        if (v(i) != 0) return false;
    return true;
}

bool is_symmetric(const QMatrix& m) {
    if (m.rows() != m.cols()) return false;
    for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = i + 1; j < m.cols(); ++j)
            if (m(i, j) != m(j, i)) return false;
    return true;
}

QVector primitive(const QVector& v) {
    Integer den_lcm = 1;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) == 0) continue;
        const Integer d = boost::multiprecision::denominator(v(i));
        den_lcm = boost::multiprecision::lcm(den_lcm, d);
    }
    Integer num_gcd = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v(i) == 0) continue;
        const Rational scaled = v(i) * Rational(den_lcm);
        const Integer n = boost::multiprecision::abs(boost::multiprecision::numerator(scaled));
        num_gcd = num_gcd == 0 ? n : boost::multiprecision::gcd(num_gcd, n);
    }
    if (num_gcd == 0) return v;
    const Rational factor = Rational(den_lcm) / Rational(num_gcd);
    QVector out = v;
    for (Eigen::Index i = 0; i < v.size(); ++i) out(i) = v(i) * factor;
    return out;
}

bool lex_less(const QVector& a, const QVector& b) {
    const Eigen::Index n = std::min(a.size(), b.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (a(i) < b(i)) return true;
        if (b(i) < a(i)) return false;
    }
    return a.size() < b.size();
}

std::vector<std::string> to_strings(const QVector& v) {
    std::vector<std::string> out;
    out.reserve(static_cast<size_t>(v.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_string(v(i)));
    return out;
}

std::vector<std::vector<std::string>> to_strings(const QMatrix& m) {
    std::vector<std::vector<std::string>> out;
    for (Eigen::Index i = 0; i < m.rows(); ++i) out.push_back(to_strings(QVector(m.row(i).transpose())));
    return out;
}

}  // namespace kvwb
