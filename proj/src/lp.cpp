#include "kvwb/lp.hpp"

namespace kvwb {

namespace {

using Row = std::vector<Rational>;

class Tableau {
public:
    // rows_[i] has cols_ + 1 entries; the last one is the right-hand side.
    Tableau(std::vector<Row> rows, std::vector<int> basis, int cols)
        : rows_(std::move(rows)), basis_(std::move(basis)), cols_(cols) {}

    // Runs Bland's-rule simplex minimising `cost` over the columns in
    // [0, active_cols). Returns false if unbounded.
    bool minimize(const std::vector<Rational>& cost, int active_cols) {
        for (;;) {
            std::vector<Rational> reduced = reduced_costs(cost, active_cols);
            int entering = -1;
            for (int j = 0; j < active_cols; ++j) {
                if (reduced[static_cast<size_t>(j)] < 0) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) return true;
            int leaving = -1;
            Rational best_ratio;
            for (size_t i = 0; i < rows_.size(); ++i) {
                const Rational& a = rows_[i][static_cast<size_t>(entering)];
                if (a <= 0) continue;
                Rational ratio = rows_[i][static_cast<size_t>(cols_)] / a;
                if (leaving < 0 || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[i] < basis_[static_cast<size_t>(leaving)])) {
                    leaving = static_cast<int>(i);
                    best_ratio = ratio;
                }
            }
            if (leaving < 0) return false;
            pivot(static_cast<size_t>(leaving), entering);
        }
    }

    std::vector<Rational> reduced_costs(const std::vector<Rational>& cost, int active_cols) const {
        std::vector<Rational> reduced(cost.begin(), cost.begin() + active_cols);
        for (size_t i = 0; i < rows_.size(); ++i) {
            const Rational& cb = cost[static_cast<size_t>(basis_[i])];
            if (cb == 0) continue;
            for (int j = 0; j < active_cols; ++j) {
                const Rational& a = rows_[i][static_cast<size_t>(j)];
                if (a != 0) reduced[static_cast<size_t>(j)] -= cb * a;
            }
        }
        return reduced;
    }

    void pivot(size_t r, int c) {
        const size_t cc = static_cast<size_t>(c);
        const Rational inv = Rational(1) / rows_[r][cc];
        Row& pr = rows_[r];
        std::vector<size_t> nz;
        for (size_t j = 0; j < pr.size(); ++j) {
            if (pr[j] != 0) {
                pr[j] *= inv;
                nz.push_back(j);
            }
        }
        for (size_t i = 0; i < rows_.size(); ++i) {
            if (i == r || rows_[i][cc] == 0) continue;
            const Rational f = rows_[i][cc];
            for (size_t j : nz) rows_[i][j] -= f * pr[j];
        }
        basis_[r] = c;
    }

    std::vector<Row>& rows() { return rows_; }
    std::vector<int>& basis() { return basis_; }
    int cols() const { return cols_; }

    Rational rhs(size_t i) const { return rows_[i][static_cast<size_t>(cols_)]; }

private:
    std::vector<Row> rows_;
    std::vector<int> basis_;
    int cols_;
};

}  // namespace

StandardLpResult solve_standard_lp(const QMatrix& a, const QVector& b, const QVector& c) {
    const int m = static_cast<int>(a.rows());
    const int n = static_cast<int>(a.cols());
    if (b.size() != m || c.size() != n) throw DimensionMismatch("solve_standard_lp: inconsistent shapes");

    // Phase 1: artificial variables n..n+m-1; rows with negative rhs are negated.
    // A row owning a +1 singleton column (a slack) starts with that column basic.
    std::vector<int> column_nonzeros(static_cast<size_t>(n), 0);
    std::vector<int> singleton(static_cast<size_t>(m), -1);
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < m; ++i)
            if (a(i, j) != 0) ++column_nonzeros[static_cast<size_t>(j)];
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < n && singleton[static_cast<size_t>(i)] < 0; ++j)
            if (column_nonzeros[static_cast<size_t>(j)] == 1 && (a(i, j) == 1 || a(i, j) == -1)) singleton[static_cast<size_t>(i)] = j;
    std::vector<bool> flipped(static_cast<size_t>(m), false);
    std::vector<Row> rows(static_cast<size_t>(m), Row(static_cast<size_t>(n + m + 1), Rational(0)));
    std::vector<int> basis(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const int sj = singleton[static_cast<size_t>(i)];
        const bool flip = b(i) < 0 || (b(i) == 0 && sj >= 0 && a(i, sj) < 0);
        flipped[static_cast<size_t>(i)] = flip;
        Row& row = rows[static_cast<size_t>(i)];
        for (int j = 0; j < n; ++j) {
            if (a(i, j) != 0) row[static_cast<size_t>(j)] = flip ? Rational(-a(i, j)) : a(i, j);
        }
        row[static_cast<size_t>(n + i)] = 1;
        row[static_cast<size_t>(n + m)] = flip ? Rational(-b(i)) : b(i);
        basis[static_cast<size_t>(i)] = sj >= 0 && row[static_cast<size_t>(sj)] == 1 ? sj : n + i;
    }
    Tableau t(std::move(rows), std::move(basis), n + m);
    std::vector<Rational> phase1_cost(static_cast<size_t>(n + m), Rational(0));
    for (int i = 0; i < m; ++i) phase1_cost[static_cast<size_t>(n + i)] = 1;
    t.minimize(phase1_cost, n + m);

    Rational infeasibility = 0;
    for (int i = 0; i < m; ++i) {
        if (t.basis()[static_cast<size_t>(i)] >= n) infeasibility += t.rhs(static_cast<size_t>(i));
    }

    StandardLpResult result;
    if (infeasibility > 0) {
        // Duals y_i = 1 - reduced cost of artificial i; z = -y certifies infeasibility.
        std::vector<Rational> reduced = t.reduced_costs(phase1_cost, n + m);
        result.status = LpStatus::Infeasible;
        result.farkas = zero_vector(m);
        for (int i = 0; i < m; ++i) {
            Rational y = Rational(1) - reduced[static_cast<size_t>(n + i)];
            Rational z = -y;
            result.farkas(i) = flipped[static_cast<size_t>(i)] ? Rational(-z) : z;
        }
        return result;
    }

    // Drive remaining (zero-level) artificials out of the basis; drop redundant rows.
    {
        auto& rws = t.rows();
        auto& bas = t.basis();
        for (size_t i = 0; i < rws.size();) {
            if (bas[i] < n) {
                ++i;
                continue;
            }
            int col = -1;
            for (int j = 0; j < n; ++j) {
                if (rws[i][static_cast<size_t>(j)] != 0) {
                    col = j;
                    break;
                }
            }
            if (col >= 0) {
                t.pivot(i, col);
                ++i;
            } else {
                rws.erase(rws.begin() + static_cast<long>(i));
                bas.erase(bas.begin() + static_cast<long>(i));
            }
        }
    }

    std::vector<Rational> cost(static_cast<size_t>(n + m), Rational(0));
    for (int j = 0; j < n; ++j) cost[static_cast<size_t>(j)] = c(j);
    if (!t.minimize(cost, n)) {
        result.status = LpStatus::Unbounded;
        return result;
    }
    result.status = LpStatus::Optimal;
    result.x = zero_vector(n);
    for (size_t i = 0; i < t.basis().size(); ++i) {
        const int v = t.basis()[i];
        if (v < n) result.x(v) = t.rhs(i);
    }
    result.objective = 0;
    for (int j = 0; j < n; ++j)
        if (c(j) != 0) result.objective += c(j) * result.x(j);
    return result;
}

StandardLpResult find_feasible_point(const QMatrix& a, const QVector& b) {
    return solve_standard_lp(a, b, zero_vector(a.cols()));
}

int LinearProgram::add_variable(bool free) {
    free_.push_back(free);
    return static_cast<int>(free_.size()) - 1;
}

int LinearProgram::add_variables(int count, bool free) {
    const int first = static_cast<int>(free_.size());
    for (int i = 0; i < count; ++i) free_.push_back(free);
    return first;
}

void LinearProgram::add_constraint(LinearExpr terms, Sense sense, Rational rhs) {
    rows_.push_back(Row{std::move(terms), sense, std::move(rhs)});
}

void LinearProgram::set_objective(LinearExpr terms, bool maximize) {
    objective_ = std::move(terms);
    maximize_ = maximize;
}

LpSolution LinearProgram::solve() const {
    // Constraints without variables are decided here and dropped.
    std::vector<const Row*> live;
    for (const auto& row : rows_) {
        bool constant = true;
        for (const auto& term : row.terms)
            if (term.second != 0) constant = false;
        if (!constant) {
            live.push_back(&row);
            continue;
        }
        const bool ok = row.sense == Sense::Equal       ? row.rhs == 0
                        : row.sense == Sense::LessEqual ? row.rhs >= 0
                                                        : row.rhs <= 0;
        if (!ok) return LpSolution{};
    }

    // Column layout: one column per variable, a second (negative part) for
    // each free variable, then one slack per inequality.
    const int nv = variable_count();
    std::vector<int> neg_col(static_cast<size_t>(nv), -1);
    int cols = nv;
    for (int v = 0; v < nv; ++v)
        if (free_[static_cast<size_t>(v)]) neg_col[static_cast<size_t>(v)] = cols++;
    std::vector<int> slack_col(live.size(), -1);
    for (size_t i = 0; i < live.size(); ++i)
        if (live[i]->sense != Sense::Equal) slack_col[i] = cols++;

    QMatrix a = zero_matrix(static_cast<Eigen::Index>(live.size()), cols);
    QVector b = zero_vector(static_cast<Eigen::Index>(live.size()));
    for (size_t i = 0; i < live.size(); ++i) {
        const auto ii = static_cast<Eigen::Index>(i);
        for (const auto& [v, coef] : live[i]->terms) {
            a(ii, v) += coef;
            if (neg_col[static_cast<size_t>(v)] >= 0) a(ii, neg_col[static_cast<size_t>(v)]) -= coef;
        }
        if (live[i]->sense == Sense::LessEqual) a(ii, slack_col[i]) = 1;
        if (live[i]->sense == Sense::GreaterEqual) a(ii, slack_col[i]) = -1;
        b(ii) = live[i]->rhs;
    }
    QVector c = zero_vector(cols);
    for (const auto& [v, coef] : objective_) {
        const Rational k = maximize_ ? Rational(-coef) : coef;
        c(v) += k;
        if (neg_col[static_cast<size_t>(v)] >= 0) c(neg_col[static_cast<size_t>(v)]) -= k;
    }

    StandardLpResult r = solve_standard_lp(a, b, c);
    LpSolution out;
    out.status = r.status;
    if (r.status != LpStatus::Optimal) return out;
    out.values = zero_vector(nv);
    for (int v = 0; v < nv; ++v) {
        out.values(v) = r.x(v);
        if (neg_col[static_cast<size_t>(v)] >= 0) out.values(v) -= r.x(neg_col[static_cast<size_t>(v)]);
    }
    out.objective = maximize_ ? Rational(-r.objective) : r.objective;
    return out;
}

}  // namespace kvwb
