#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace lqs {

/// Solver-agnostic mixed-integer linear model. Builders append variables
/// and constraints; lowering passes rewrite SOS1 sets, indicator
/// constraints and binary-times-continuous products into plain rows so
/// that any MILP solver can consume the emitted file.

enum class VarKind { Continuous, Binary };

struct VarId {
    std::size_t index = static_cast<std::size_t>(-1);
    bool valid() const { return index != static_cast<std::size_t>(-1); }
    bool operator==(const VarId&) const = default;
};

struct Variable {
    std::string name;
    VarKind kind = VarKind::Continuous;
    double lower = 0.0;
    double upper = std::numeric_limits<double>::infinity();
};

struct LinTerm {
    VarId var;
    double coeff = 0.0;
};

enum class ConstraintSense { LessEqual, Equal, GreaterEqual };

struct LinearConstraint {
    std::string name;
    std::vector<LinTerm> terms;
    ConstraintSense sense = ConstraintSense::LessEqual;
    double rhs = 0.0;
};

/// At most one member may take a nonzero value.
struct Sos1Set {
    std::string name;
    std::vector<VarId> members;
};

/// body enforced whenever guard == active_value.
struct IndicatorConstraint {
    VarId guard;
    int active_value = 1;
    LinearConstraint body;
};

struct Objective {
    std::vector<LinTerm> terms;
    double constant = 0.0; // carried in the RHS of the objective row on emit
};

class MilpModel {
  public:
    VarId add_continuous(const std::string& name, double lower, double upper);
    VarId add_binary(const std::string& name);

    void add_le(const std::string& name, std::vector<LinTerm> terms, double rhs);
    void add_ge(const std::string& name, std::vector<LinTerm> terms, double rhs);
    void add_eq(const std::string& name, std::vector<LinTerm> terms, double rhs);
    void add_constraint(LinearConstraint c);

    void add_sos1(const std::string& name, std::vector<VarId> members);
    void add_indicator(VarId guard, int active_value, LinearConstraint body);

    void set_objective(std::vector<LinTerm> terms, double constant = 0.0);

    const Variable& var(VarId id) const { return vars_.at(id.index); }
    Variable& var(VarId id) { return vars_.at(id.index); }
    std::optional<VarId> find_var(const std::string& name) const;

    const std::vector<Variable>& variables() const { return vars_; }
    const std::vector<LinearConstraint>& constraints() const { return rows_; }
    const std::vector<Sos1Set>& sos1_sets() const { return sos_; }
    const std::vector<IndicatorConstraint>& indicators() const { return indicators_; }
    const Objective& objective() const { return objective_; }

    bool fully_lowered() const { return sos_.empty() && indicators_.empty(); }
    std::size_t num_vars() const { return vars_.size(); }
    std::size_t num_rows() const { return rows_.size(); }

  private:
    VarId add_var(Variable v);
    void check_terms(const std::vector<LinTerm>& terms) const;

    std::vector<Variable> vars_;
    std::vector<LinearConstraint> rows_;
    std::vector<Sos1Set> sos_;
    std::vector<IndicatorConstraint> indicators_;
    Objective objective_;
    std::unordered_map<std::string, std::size_t> names_;
};

/// Adds w = z * s for binary z and continuous s in [0, U], U finite:
///   w <= U z,  w <= s,  w >= s - U (1 - z),  w >= 0.
/// Every integral feasible point satisfies w = z * s exactly.
VarId add_mccormick_product(MilpModel& m, VarId z, VarId s,
                            const std::string& name);

/// Replaces each SOS1 set by fresh binaries b_k with sum b_k <= 1 and
/// member_k <= U_k b_k, U_k taken from the member's upper bound. Members
/// must be nonnegative with finite upper bounds (binaries use U = 1).
MilpModel lower_sos1(const MilpModel& m);

/// Replaces each indicator by a big-M row; big_m must carry one finite
/// constant per indicator, in order.
MilpModel lower_indicators(const MilpModel& m, const std::vector<double>& big_m);

/// Same, with each M derived from the body's variable bounds.
MilpModel lower_indicators_auto(const MilpModel& m);

/// Convenience: SOS1 then indicator lowering with automatic constants.
MilpModel lower_all(const MilpModel& m);

} // namespace lqs
