#include "lqs/milp.hpp"

#include <cmath>
#include <set>
#include <stdexcept>

namespace lqs {

VarId MilpModel::add_var(Variable v) {
    if (v.name.empty()) throw std::invalid_argument("variable name empty");
    if (names_.count(v.name))
        throw std::invalid_argument("duplicate variable name: " + v.name);
    if (v.kind == VarKind::Binary && (v.lower < 0.0 || v.upper > 1.0))
        throw std::invalid_argument("binary bounds outside [0,1]: " + v.name);
    names_[v.name] = vars_.size();
    vars_.push_back(std::move(v));
    return VarId{vars_.size() - 1};
}

VarId MilpModel::add_continuous(const std::string& name, double lower, double upper) {
    if (lower > upper)
        throw std::invalid_argument("empty bound interval for " + name);
    return add_var(Variable{name, VarKind::Continuous, lower, upper});
}

VarId MilpModel::add_binary(const std::string& name) {
    return add_var(Variable{name, VarKind::Binary, 0.0, 1.0});
}

void MilpModel::check_terms(const std::vector<LinTerm>& terms) const {
    std::set<std::size_t> seen;
    for (const LinTerm& t : terms) {
        if (!t.var.valid() || t.var.index >= vars_.size())
            throw std::invalid_argument("constraint references unregistered variable");
        if (!std::isfinite(t.coeff))
            throw std::invalid_argument("non-finite coefficient on " +
                                        vars_[t.var.index].name);
        if (!seen.insert(t.var.index).second)
            throw std::invalid_argument("duplicate variable in constraint terms: " +
                                        vars_[t.var.index].name);
    }
}

void MilpModel::add_constraint(LinearConstraint c) {
    check_terms(c.terms);
    if (!std::isfinite(c.rhs))
        throw std::invalid_argument("non-finite rhs in " + c.name);
    rows_.push_back(std::move(c));
}

void MilpModel::add_le(const std::string& name, std::vector<LinTerm> terms, double rhs) {
    add_constraint({name, std::move(terms), ConstraintSense::LessEqual, rhs});
}

void MilpModel::add_ge(const std::string& name, std::vector<LinTerm> terms, double rhs) {
    add_constraint({name, std::move(terms), ConstraintSense::GreaterEqual, rhs});
}

void MilpModel::add_eq(const std::string& name, std::vector<LinTerm> terms, double rhs) {
    add_constraint({name, std::move(terms), ConstraintSense::Equal, rhs});
}

void MilpModel::add_sos1(const std::string& name, std::vector<VarId> members) {
    if (members.size() < 2)
        throw std::invalid_argument("SOS1 set needs at least 2 members: " + name);
    for (VarId v : members)
        if (!v.valid() || v.index >= vars_.size())
            throw std::invalid_argument("SOS1 references unregistered variable");
    sos_.push_back({name, std::move(members)});
}

void MilpModel::add_indicator(VarId guard, int active_value, LinearConstraint body) {
    if (!guard.valid() || guard.index >= vars_.size())
        throw std::invalid_argument("indicator guard unregistered");
    if (vars_[guard.index].kind != VarKind::Binary)
        throw std::invalid_argument("indicator guard must be binary: " +
                                    vars_[guard.index].name);
    if (active_value != 0 && active_value != 1)
        throw std::invalid_argument("indicator active value must be 0 or 1");
    check_terms(body.terms);
    indicators_.push_back({guard, active_value, std::move(body)});
}

void MilpModel::set_objective(std::vector<LinTerm> terms, double constant) {
    check_terms(terms);
    objective_ = {std::move(terms), constant};
}

std::optional<VarId> MilpModel::find_var(const std::string& name) const {
    auto it = names_.find(name);
    if (it == names_.end()) return std::nullopt;
    return VarId{it->second};
}

VarId add_mccormick_product(MilpModel& m, VarId z, VarId s,
                            const std::string& name) {
    const Variable& zv = m.var(z);
    const Variable& sv = m.var(s);
    if (zv.kind != VarKind::Binary)
        throw std::invalid_argument("mccormick: " + zv.name + " is not binary");
    const double U = sv.upper;
    if (!std::isfinite(U) || U < 0.0)
        throw std::invalid_argument("mccormick: " + sv.name +
                                    " needs a finite nonnegative upper bound");
    if (sv.lower < 0.0)
        throw std::invalid_argument("mccormick: " + sv.name + " must be nonnegative");

    VarId w = m.add_continuous(name, 0.0, U);
    m.add_le(name + "_cap", {{w, 1.0}, {z, -U}}, 0.0);        // w <= U z
    m.add_le(name + "_le_s", {{w, 1.0}, {s, -1.0}}, 0.0);      // w <= s
    m.add_ge(name + "_ge", {{w, 1.0}, {s, -1.0}, {z, -U}}, -U); // w >= s - U(1-z)
    return w;
}

namespace {

// Fresh structural content copied row-for-row; only the SOS/indicator
// lists differ between input and output models.
MilpModel clone_structure(const MilpModel& m, bool keep_sos, bool keep_indicators) {
    MilpModel out;
    for (const Variable& v : m.variables()) {
        if (v.kind == VarKind::Binary)
            out.add_binary(v.name);
        else
            out.add_continuous(v.name, v.lower, v.upper);
    }
    for (const LinearConstraint& c : m.constraints()) out.add_constraint(c);
    if (keep_sos)
        for (const Sos1Set& s : m.sos1_sets()) out.add_sos1(s.name, s.members);
    if (keep_indicators)
        for (const IndicatorConstraint& ic : m.indicators())
            out.add_indicator(ic.guard, ic.active_value, ic.body);
    out.set_objective(m.objective().terms, m.objective().constant);
    return out;
}

} // namespace

MilpModel lower_sos1(const MilpModel& m) {
    MilpModel out = clone_structure(m, /*keep_sos=*/false, /*keep_indicators=*/true);
    std::size_t serial = 0;
    for (const Sos1Set& set : m.sos1_sets()) {
        std::vector<LinTerm> chooser;
        for (VarId member : set.members) {
            const Variable& v = m.var(member);
            if (v.lower < 0.0)
                throw std::invalid_argument("lower_sos1: member " + v.name +
                                            " may be negative");
            const double U = v.kind == VarKind::Binary ? 1.0 : v.upper;
            if (!std::isfinite(U))
                throw std::invalid_argument("lower_sos1: member " + v.name +
                                            " has no finite upper bound");
            VarId b = out.add_binary(set.name + "_pick" + std::to_string(serial++));
            chooser.push_back({b, 1.0});
            // member <= U * b
            out.add_le(set.name + "_cap" + std::to_string(serial),
                       {{member, 1.0}, {b, -U}}, 0.0);
        }
        out.add_le(set.name + "_one", std::move(chooser), 1.0);
    }
    return out;
}

namespace {

MilpModel lower_indicators_impl(const MilpModel& m,
                                const std::vector<double>* big_m) {
    MilpModel out = clone_structure(m, /*keep_sos=*/true, /*keep_indicators=*/false);
    std::size_t k = 0;
    for (const IndicatorConstraint& ic : m.indicators()) {
        double M;
        if (big_m) {
            M = (*big_m)[k];
        } else {
            // Worst slack of the body over the variable boxes.
            double lo = 0.0, hi = 0.0;
            for (const LinTerm& t : ic.body.terms) {
                const Variable& v = m.var(t.var);
                const double a = t.coeff * v.lower, b = t.coeff * v.upper;
                lo += std::min(a, b);
                hi += std::max(a, b);
            }
            if (ic.body.sense == ConstraintSense::LessEqual)
                M = hi - ic.body.rhs;
            else if (ic.body.sense == ConstraintSense::GreaterEqual)
                M = ic.body.rhs - lo;
            else
                M = std::max(hi - ic.body.rhs, ic.body.rhs - lo);
            M = std::max(M, 0.0);
        }
        if (!std::isfinite(M))
            throw std::invalid_argument("lower_indicators: no finite big-M for " +
                                        ic.body.name);
        // sign of the relaxation term: active when guard == a, so the slack
        // M * (1 - guard) for a = 1, and M * guard for a = 0.
        auto relaxed = [&](const LinearConstraint& body, bool upper) {
            LinearConstraint c = body;
            c.name = body.name + (upper ? "_ub" : "_lb");
            const double sgn = upper ? 1.0 : -1.0;
            // move the guard term to the lhs:
            //   a'x <= b + M(1-g)  ->  a'x + M g <= b + M      (active=1)
            //   a'x <= b + M g     ->  a'x - M g <= b           (active=0)
            if (ic.active_value == 1) {
                c.terms.push_back({ic.guard, sgn * M});
                c.rhs += sgn * M;
            } else {
                c.terms.push_back({ic.guard, -sgn * M});
            }
            c.sense = upper ? ConstraintSense::LessEqual : ConstraintSense::GreaterEqual;
            return c;
        };
        if (ic.body.sense == ConstraintSense::LessEqual) {
            out.add_constraint(relaxed(ic.body, true));
        } else if (ic.body.sense == ConstraintSense::GreaterEqual) {
            out.add_constraint(relaxed(ic.body, false));
        } else {
            out.add_constraint(relaxed(ic.body, true));
            out.add_constraint(relaxed(ic.body, false));
        }
        ++k;
    }
    return out;
}

} // namespace

MilpModel lower_indicators(const MilpModel& m, const std::vector<double>& big_m) {
    if (big_m.size() != m.indicators().size())
        throw std::invalid_argument("lower_indicators: need one big-M per indicator");
    return lower_indicators_impl(m, &big_m);
}

MilpModel lower_indicators_auto(const MilpModel& m) {
    return lower_indicators_impl(m, nullptr);
}

MilpModel lower_all(const MilpModel& m) {
    return lower_indicators_auto(lower_sos1(m));
}

} // namespace lqs
