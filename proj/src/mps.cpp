#include "lqs/mps.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>

namespace lqs {

namespace {

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

char sense_tag(ConstraintSense s) {
    switch (s) {
        case ConstraintSense::LessEqual: return 'L';
        case ConstraintSense::Equal: return 'E';
        case ConstraintSense::GreaterEqual: return 'G';
    }
    return 'L';
}

} // namespace

std::string emit_model_file(const MilpModel& m, const MpsWriteOptions& opts) {
    if (!m.indicators().empty())
        throw std::runtime_error("emit_model_file: indicator constraints must be "
                                 "lowered before emission");
    if (!m.sos1_sets().empty() && !opts.allow_sos)
        throw std::runtime_error("emit_model_file: SOS1 sets present and the "
                                 "target dialect does not accept them");

    std::ostringstream out;
    out << "NAME " << opts.model_name << "\n";
    out << "ROWS\n";
    out << " N OBJ\n";
    for (const LinearConstraint& c : m.constraints())
        out << ' ' << sense_tag(c.sense) << ' ' << c.name << "\n";

    // Gather per-column entries in row order: objective first, then rows.
    const std::size_t nv = m.num_vars();
    std::vector<std::vector<std::pair<std::string, double>>> entries(nv);
    for (const LinTerm& t : m.objective().terms)
        entries[t.var.index].push_back({"OBJ", t.coeff});
    for (const LinearConstraint& c : m.constraints())
        for (const LinTerm& t : c.terms)
            entries[t.var.index].push_back({c.name, t.coeff});

    if (nv > 0) out << "COLUMNS\n";
    bool in_integer = false;
    std::size_t marker = 0;
    for (std::size_t j = 0; j < nv; ++j) {
        const Variable& v = m.variables()[j];
        const bool want_integer = v.kind == VarKind::Binary;
        if (want_integer != in_integer) {
            out << " MARK" << marker++ << " 'MARKER' "
                << (want_integer ? "'INTORG'" : "'INTEND'") << "\n";
            in_integer = want_integer;
        }
        if (entries[j].empty()) {
            out << ' ' << v.name << " OBJ 0\n";
            continue;
        }
        for (const auto& [row, coeff] : entries[j])
            out << ' ' << v.name << ' ' << row << ' ' << num(coeff) << "\n";
    }
    if (in_integer)
        out << " MARK" << marker++ << " 'MARKER' 'INTEND'\n";

    bool any_rhs = m.objective().constant != 0.0;
    for (const LinearConstraint& c : m.constraints()) any_rhs |= c.rhs != 0.0;
    if (any_rhs) {
        out << "RHS\n";
        if (m.objective().constant != 0.0)
            out << " RHS OBJ " << num(-m.objective().constant) << "\n";
        for (const LinearConstraint& c : m.constraints())
            if (c.rhs != 0.0)
                out << " RHS " << c.name << ' ' << num(c.rhs) << "\n";
    }

    const double inf = std::numeric_limits<double>::infinity();
    bool any_bound = false;
    for (const Variable& v : m.variables())
        any_bound |= v.kind == VarKind::Binary || v.lower != 0.0 || v.upper != inf;
    if (any_bound) out << "BOUNDS\n";
    for (const Variable& v : m.variables()) {
        if (v.kind == VarKind::Binary) {
            out << " BV BND " << v.name << "\n";
            continue;
        }
        if (v.lower == 0.0 && v.upper == inf) continue;
        if (v.lower == v.upper) {
            out << " FX BND " << v.name << ' ' << num(v.lower) << "\n";
            continue;
        }
        if (v.lower == -inf && v.upper == inf) {
            out << " FR BND " << v.name << "\n";
            continue;
        }
        if (v.lower == -inf)
            out << " MI BND " << v.name << "\n";
        else if (v.lower != 0.0)
            out << " LO BND " << v.name << ' ' << num(v.lower) << "\n";
        if (v.upper != inf)
            out << " UP BND " << v.name << ' ' << num(v.upper) << "\n";
    }

    if (!m.sos1_sets().empty()) {
        out << "SOS\n";
        for (const Sos1Set& s : m.sos1_sets()) {
            out << " S1 " << s.name << ' ' << s.members.size() << "\n";
            std::size_t w = 1;
            for (VarId member : s.members)
                out << "  " << m.var(member).name << ' ' << w++ << "\n";
        }
    }

    out << "ENDATA\n";
    return out.str();
}

namespace {

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> t;
    std::istringstream in(line);
    std::string w;
    while (in >> w) t.push_back(w);
    return t;
}

double parse_num(const std::string& s, std::size_t lineno) {
    try {
        std::size_t used = 0;
        double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw std::runtime_error("mps: bad numeric token '" + s + "' at line " +
                                 std::to_string(lineno));
    }
}

} // namespace

MilpModel read_model_file(const std::string& bytes) {
    enum Section { None, Rows, Columns, Rhs, Bounds, Sos, Done };
    Section section = None;

    struct RowInfo {
        char tag = 'L';
        std::vector<LinTerm> terms;
        double rhs = 0.0;
    };
    std::map<std::string, RowInfo> rows;
    std::vector<std::string> row_order;
    std::string obj_row;
    double obj_constant = 0.0;

    MilpModel model;
    std::map<std::string, VarId> vars;
    bool in_integer = false;

    struct SosInfo {
        std::string name;
        std::vector<std::string> members;
    };
    std::vector<SosInfo> sos_sets;

    auto ensure_var = [&](const std::string& name) {
        auto it = vars.find(name);
        if (it != vars.end()) return it->second;
        VarId id = in_integer ? model.add_binary(name)
                              : model.add_continuous(
                                    name, 0.0, std::numeric_limits<double>::infinity());
        vars.emplace(name, id);
        return id;
    };

    std::istringstream in(bytes);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '*') continue;
        std::vector<std::string> t = tokens(line);
        if (t.empty()) continue;

        if (line[0] != ' ' && line[0] != '\t') {
            const std::string& head = t[0];
            if (head == "NAME") section = None;
            else if (head == "ROWS") section = Rows;
            else if (head == "COLUMNS") section = Columns;
            else if (head == "RHS") section = Rhs;
            else if (head == "RANGES")
                throw std::runtime_error("mps: RANGES section not supported");
            else if (head == "BOUNDS") section = Bounds;
            else if (head == "SOS") section = Sos;
            else if (head == "ENDATA") section = Done;
            else throw std::runtime_error("mps: unknown section '" + head +
                                          "' at line " + std::to_string(lineno));
            continue;
        }

        switch (section) {
            case Rows: {
                if (t.size() != 2)
                    throw std::runtime_error("mps: malformed ROWS line " +
                                             std::to_string(lineno));
                if (t[0] == "N") {
                    if (!obj_row.empty())
                        throw std::runtime_error("mps: multiple objective rows");
                    obj_row = t[1];
                } else if (t[0] == "L" || t[0] == "G" || t[0] == "E") {
                    rows[t[1]].tag = t[0][0];
                    row_order.push_back(t[1]);
                } else {
                    throw std::runtime_error("mps: bad row sense at line " +
                                             std::to_string(lineno));
                }
                break;
            }
            case Columns: {
                if (t.size() >= 3 && t[1] == "'MARKER'") {
                    if (t[2] == "'INTORG'") in_integer = true;
                    else if (t[2] == "'INTEND'") in_integer = false;
                    else throw std::runtime_error("mps: bad marker at line " +
                                                  std::to_string(lineno));
                    break;
                }
                if (t.size() < 3 || t.size() % 2 == 0)
                    throw std::runtime_error("mps: malformed COLUMNS line " +
                                             std::to_string(lineno));
                VarId id = ensure_var(t[0]);
                for (std::size_t k = 1; k + 1 < t.size() + 1 && k + 1 <= t.size();
                     k += 2) {
                    const std::string& row = t[k];
                    const double coeff = parse_num(t[k + 1], lineno);
                    if (row == obj_row) {
                        // accumulate objective terms per variable later
                        rows["\x01OBJ"].terms.push_back({id, coeff});
                    } else {
                        auto it = rows.find(row);
                        if (it == rows.end())
                            throw std::runtime_error("mps: unknown row '" + row +
                                                     "' at line " +
                                                     std::to_string(lineno));
                        it->second.terms.push_back({id, coeff});
                    }
                }
                break;
            }
            case Rhs: {
                if (t.size() < 3 || t.size() % 2 == 0)
                    throw std::runtime_error("mps: malformed RHS line " +
                                             std::to_string(lineno));
                for (std::size_t k = 1; k + 1 <= t.size() - 1; k += 2) {
                    const std::string& row = t[k];
                    const double v = parse_num(t[k + 1], lineno);
                    if (row == obj_row) {
                        obj_constant = -v;
                    } else {
                        auto it = rows.find(row);
                        if (it == rows.end())
                            throw std::runtime_error("mps: unknown RHS row '" + row +
                                                     "' at line " +
                                                     std::to_string(lineno));
                        it->second.rhs = v;
                    }
                }
                break;
            }
            case Bounds: {
                if (t.size() < 3)
                    throw std::runtime_error("mps: malformed BOUNDS line " +
                                             std::to_string(lineno));
                const std::string& kind = t[0];
                VarId id = ensure_var(t[2]);
                Variable& v = model.var(id);
                if (kind == "BV") {
                    if (v.kind != VarKind::Binary) {
                        // re-register as binary, preserving the name slot
                        v.kind = VarKind::Binary;
                        v.lower = 0.0;
                        v.upper = 1.0;
                    }
                } else if (kind == "FR") {
                    v.lower = -std::numeric_limits<double>::infinity();
                    v.upper = std::numeric_limits<double>::infinity();
                } else if (kind == "MI") {
                    v.lower = -std::numeric_limits<double>::infinity();
                } else if (kind == "UP") {
                    v.upper = parse_num(t.at(3), lineno);
                } else if (kind == "LO") {
                    v.lower = parse_num(t.at(3), lineno);
                } else if (kind == "FX") {
                    v.lower = v.upper = parse_num(t.at(3), lineno);
                } else {
                    throw std::runtime_error("mps: unsupported bound type '" + kind +
                                             "' at line " + std::to_string(lineno));
                }
                break;
            }
            case Sos: {
                if (t[0] == "S1") {
                    if (t.size() < 2)
                        throw std::runtime_error("mps: malformed SOS header line " +
                                                 std::to_string(lineno));
                    sos_sets.push_back({t[1], {}});
                } else {
                    if (sos_sets.empty())
                        throw std::runtime_error("mps: SOS member before header at line " +
                                                 std::to_string(lineno));
                    sos_sets.back().members.push_back(t[0]);
                }
                break;
            }
            case None:
            case Done:
                break;
        }
    }
    if (section != Done) throw std::runtime_error("mps: missing ENDATA");

    for (const std::string& name : row_order) {
        const RowInfo& r = rows[name];
        ConstraintSense s = r.tag == 'L' ? ConstraintSense::LessEqual
                          : r.tag == 'G' ? ConstraintSense::GreaterEqual
                                         : ConstraintSense::Equal;
        model.add_constraint({name, r.terms, s, r.rhs});
    }
    auto obj_it = rows.find("\x01OBJ");
    model.set_objective(obj_it == rows.end() ? std::vector<LinTerm>{}
                                             : obj_it->second.terms,
                        obj_constant);
    for (const SosInfo& s : sos_sets) {
        std::vector<VarId> members;
        for (const std::string& name : s.members) {
            auto it = vars.find(name);
            if (it == vars.end())
                throw std::runtime_error("mps: SOS references unknown column " + name);
            members.push_back(it->second);
        }
        model.add_sos1(s.name, std::move(members));
    }
    return model;
}

} // namespace lqs
