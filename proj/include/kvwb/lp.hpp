#pragma once

// Exact rational linear programming: dense two-phase tableau simplex with
// Bland's rule. Every verdict comes with exact data (a primal point, or a
// Farkas functional proving infeasibility).

#include "kvwb/rational.hpp"

#include <utility>
#include <vector>

namespace kvwb {

enum class LpStatus { Optimal, Infeasible, Unbounded };

struct StandardLpResult {
    LpStatus status = LpStatus::Infeasible;
    QVector x;           // primal point (Optimal)
    Rational objective;  // c^T x (Optimal)
    QVector farkas;      // y with y^T A >= 0 and y^T b < 0 (Infeasible)
};

/// min c^T x  s.t.  A x = b, x >= 0.
StandardLpResult solve_standard_lp(const QMatrix& a, const QVector& b, const QVector& c);

/// Feasibility only (zero objective).
StandardLpResult find_feasible_point(const QMatrix& a, const QVector& b);

enum class Sense { LessEqual, GreaterEqual, Equal };

using LinearExpr = std::vector<std::pair<int, Rational>>;

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    QVector values;
    Rational objective;
};

/// Small modelling layer over solve_standard_lp: free / non-negative
/// variables and mixed constraint senses.
class LinearProgram {
public:
    int add_variable(bool free = false);
    /// Adds `count` variables; returns the index of the first.
    int add_variables(int count, bool free = false);
    void add_constraint(LinearExpr terms, Sense sense, Rational rhs);
    void set_objective(LinearExpr terms, bool maximize);

    int variable_count() const { return static_cast<int>(free_.size()); }
    int constraint_count() const { return static_cast<int>(rows_.size()); }

    LpSolution solve() const;

private:
    struct Row {
        LinearExpr terms;
        Sense sense;
        Rational rhs;
    };
    std::vector<bool> free_;
    std::vector<Row> rows_;
    LinearExpr objective_;
    bool maximize_ = false;
};

}  // namespace kvwb
