#pragma once

#include "ato/common.hpp"

#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

namespace ato {

enum class VarKind { integer_nonneg, continuous_nonneg };
enum class RowSense { eq, le, ge };

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct MilpVar {
    std::string name;
    VarKind kind = VarKind::continuous_nonneg;
    double obj = 0.0;
    double lower = 0.0;
    double upper = kInfinity;
};

struct MilpTerm {
    int var = 0;
    double coef = 0.0;
};

struct MilpRow {
    std::string name;
    RowSense sense = RowSense::eq;
    double rhs = 0.0;
    std::vector<MilpTerm> terms;
};

/// Plain linear integer program in maximization form. Variables keep their
/// creation order everywhere (solver columns, LP/MPS export), so files are
/// bit-stable for a given build sequence.
class MilpModel {
public:
    bool maximize = true;

    int add_var(std::string name, VarKind kind, double obj, double lower = 0.0,
                double upper = kInfinity);
    int add_row(std::string name, RowSense sense, double rhs, std::vector<MilpTerm> terms);

    /// Adds `delta` to the objective coefficient of `var`.
    void add_objective_term(int var, double delta);

    int num_vars() const { return static_cast<int>(vars_.size()); }
    int num_rows() const { return static_cast<int>(rows_.size()); }
    const std::vector<MilpVar>& vars() const { return vars_; }
    const std::vector<MilpRow>& rows() const { return rows_; }

    double objective_value(const std::vector<double>& values) const;

    /// Largest absolute violation across all rows and variable bounds.
    double max_violation(const std::vector<double>& values) const;

    void validate() const;

    /// CPLEX LP format.
    void write_lp(std::ostream& os) const;
    /// Free-form MPS.
    void write_mps(std::ostream& os) const;

private:
    std::vector<MilpVar> vars_;
    std::vector<MilpRow> rows_;
};

} // namespace ato
