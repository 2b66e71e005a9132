#include "ato/milp.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

namespace ato {

namespace {

// Shortest round-trip representation; keeps exports byte-stable.
std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    double back = std::strtod(buf, nullptr);
    if (back == v) {
        for (int prec = 1; prec <= 16; ++prec) {
            char shorter[40];
            std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
            if (std::strtod(shorter, nullptr) == v) return shorter;
        }
    }
    return buf;
}

} // namespace

int MilpModel::add_var(std::string name, VarKind kind, double obj, double lower, double upper) {
    require(std::isfinite(obj), "milp: objective coefficient must be finite");
    require(lower >= 0.0 && upper >= lower, "milp: bad bounds for " + name);
    MilpVar v;
    v.name = std::move(name);
    v.kind = kind;
    v.obj = obj;
    v.lower = lower;
    v.upper = upper;
    vars_.push_back(std::move(v));
    return num_vars() - 1;
}

int MilpModel::add_row(std::string name, RowSense sense, double rhs, std::vector<MilpTerm> terms) {
    for (const MilpTerm& t : terms) {
        require(t.var >= 0 && t.var < num_vars(), "milp: row references undeclared variable");
        require(std::isfinite(t.coef), "milp: non-finite row coefficient");
    }
    require(std::isfinite(rhs), "milp: non-finite right-hand side");
    MilpRow r;
    r.name = std::move(name);
    r.sense = sense;
    r.rhs = rhs;
    r.terms = std::move(terms);
    rows_.push_back(std::move(r));
    return num_rows() - 1;
}

void MilpModel::add_objective_term(int var, double delta) {
    require(var >= 0 && var < num_vars(), "milp: objective references undeclared variable");
    require(std::isfinite(delta), "milp: non-finite objective term");
    vars_[var].obj += delta;
}

double MilpModel::objective_value(const std::vector<double>& values) const {
    require(static_cast<int>(values.size()) == num_vars(), "milp: value vector size mismatch");
    double z = 0.0;
    for (int v = 0; v < num_vars(); ++v) z += vars_[v].obj * values[v];
    return z;
}

double MilpModel::max_violation(const std::vector<double>& values) const {
    require(static_cast<int>(values.size()) == num_vars(), "milp: value vector size mismatch");
    double worst = 0.0;
    for (int v = 0; v < num_vars(); ++v) {
        worst = std::max(worst, vars_[v].lower - values[v]);
        if (std::isfinite(vars_[v].upper)) worst = std::max(worst, values[v] - vars_[v].upper);
    }
    // Row violations are normalized by the right-hand-side magnitude so the
    // same tolerance works for toy models and capacity rows in the 1e5 range.
    for (const MilpRow& r : rows_) {
        double lhs = 0.0;
        for (const MilpTerm& t : r.terms) lhs += t.coef * values[t.var];
        double v = 0.0;
        switch (r.sense) {
        case RowSense::eq: v = std::abs(lhs - r.rhs); break;
        case RowSense::le: v = lhs - r.rhs; break;
        case RowSense::ge: v = r.rhs - lhs; break;
        }
        worst = std::max(worst, v / std::max(1.0, std::abs(r.rhs)));
    }
    return worst;
}

void MilpModel::validate() const {
    require(num_vars() > 0, "milp: no variables");
    for (const MilpVar& v : vars_) require(!v.name.empty(), "milp: unnamed variable");
    for (const MilpRow& r : rows_) require(!r.name.empty(), "milp: unnamed row");
}

void MilpModel::write_lp(std::ostream& os) const {
    os << (maximize ? "Maximize\n" : "Minimize\n") << " obj:";
    int on_line = 0;
    for (int v = 0; v < num_vars(); ++v) {
        double c = vars_[v].obj;
        if (c == 0.0) continue;
        os << (c < 0 ? " - " : " + ") << num(std::abs(c)) << ' ' << vars_[v].name;
        if (++on_line % 8 == 0) os << '\n'
                                   << "     ";
    }
    if (on_line == 0) os << " 0 " << vars_[0].name;
    os << "\nSubject To\n";
    for (const MilpRow& r : rows_) {
        os << ' ' << r.name << ':';
        if (r.terms.empty()) os << " 0 " << vars_[0].name;
        int n = 0;
        for (const MilpTerm& t : r.terms) {
            os << (t.coef < 0 ? " - " : " + ") << num(std::abs(t.coef)) << ' '
               << vars_[t.var].name;
            if (++n % 8 == 0) os << '\n'
                                 << "     ";
        }
        const char* rel = r.sense == RowSense::eq ? " = " : (r.sense == RowSense::le ? " <= " : " >= ");
        os << rel << num(r.rhs) << '\n';
    }
    os << "Bounds\n";
    for (const MilpVar& v : vars_) {
        if (std::isfinite(v.upper))
            os << ' ' << num(v.lower) << " <= " << v.name << " <= " << num(v.upper) << '\n';
        else if (v.lower != 0.0)
            os << ' ' << v.name << " >= " << num(v.lower) << '\n';
    }
    bool any_int = std::any_of(vars_.begin(), vars_.end(),
                               [](const MilpVar& v) { return v.kind == VarKind::integer_nonneg; });
    if (any_int) {
        os << "Generals\n";
        int n = 0;
        for (const MilpVar& v : vars_)
            if (v.kind == VarKind::integer_nonneg) {
                os << ' ' << v.name;
                if (++n % 10 == 0) os << '\n';
            }
        if (n % 10 != 0) os << '\n';
    }
    os << "End\n";
}

void MilpModel::write_mps(std::ostream& os) const {
    os << "NAME          ato_model\n";
    if (maximize) os << "OBJSENSE\n    MAX\n";
    os << "ROWS\n N  obj\n";
    for (const MilpRow& r : rows_) {
        char s = r.sense == RowSense::eq ? 'E' : (r.sense == RowSense::le ? 'L' : 'G');
        os << ' ' << s << "  " << r.name << '\n';
    }

    // Column-major coefficient lists in variable creation order.
    std::vector<std::vector<std::pair<const std::string*, double>>> cols(vars_.size());
    for (const MilpRow& r : rows_)
        for (const MilpTerm& t : r.terms) cols[t.var].emplace_back(&r.name, t.coef);

    os << "COLUMNS\n";
    bool in_integer_block = false;
    int marker = 0;
    for (int v = 0; v < num_vars(); ++v) {
        bool is_int = vars_[v].kind == VarKind::integer_nonneg;
        if (is_int != in_integer_block) {
            os << "    MARKER" << marker++ << "  'MARKER'  "
               << (is_int ? "'INTORG'" : "'INTEND'") << '\n';
            in_integer_block = is_int;
        }
        if (vars_[v].obj != 0.0)
            os << "    " << vars_[v].name << "  obj  " << num(vars_[v].obj) << '\n';
        for (const auto& [row_name, coef] : cols[v])
            os << "    " << vars_[v].name << "  " << *row_name << "  " << num(coef) << '\n';
        if (vars_[v].obj == 0.0 && cols[v].empty())
            os << "    " << vars_[v].name << "  obj  0\n";
    }
    if (in_integer_block) os << "    MARKER" << marker++ << "  'MARKER'  'INTEND'\n";

    os << "RHS\n";
    for (const MilpRow& r : rows_)
        if (r.rhs != 0.0) os << "    rhs  " << r.name << "  " << num(r.rhs) << '\n';

    os << "BOUNDS\n";
    for (const MilpVar& v : vars_) {
        if (v.lower != 0.0) os << " LO bnd  " << v.name << "  " << num(v.lower) << '\n';
        if (std::isfinite(v.upper))
            os << " UP bnd  " << v.name << "  " << num(v.upper) << '\n';
        else if (v.kind == VarKind::integer_nonneg)
            os << " PL bnd  " << v.name << '\n'; // integers default to [0,1] in some readers
    }
    os << "ENDATA\n";
}

} // namespace ato
