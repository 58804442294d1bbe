#pragma once

#include "lqs/milp.hpp"

#include <string>

namespace lqs {

/// Free-format MPS emission: NAME, ROWS, COLUMNS (with integrality
/// markers), RHS, BOUNDS, ENDATA. Deterministic and byte-stable: variable
/// order is insertion order and numbers are printed with round-trip
/// precision. The objective constant is carried, negated, in the RHS
/// entry of the objective row.
struct MpsWriteOptions {
    std::string model_name = "LQS";
    bool allow_sos = false; // emit a SOS section instead of refusing
};

std::string emit_model_file(const MilpModel& m, const MpsWriteOptions& opts = {});

/// Internal reader for round-trip tests and tooling; accepts the dialect
/// emit_model_file produces.
MilpModel read_model_file(const std::string& bytes);

} // namespace lqs
