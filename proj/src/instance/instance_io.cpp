#include "ucr/error.hpp"
#include "ucr/instance.hpp"

#include <nlohmann/json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace ucr {

using nlohmann::json;

namespace {

json parse_json(std::string_view text, std::string_view what) {
    try {
        return json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ParseError(std::string(what) + ": syntax error at byte " + std::to_string(e.byte) + ": " +
                         e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& where) {
    for (const auto& [key, _] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw SchemaError(where + ": unknown field '" + key + "'");
    }
}

const json& require(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where + ": missing field '" + key + "'");
    return *it;
}

double number(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number()) throw SchemaError(where + "." + key + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw SchemaError(where + "." + key + ": must be finite");
    return d;
}

int integer(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_number_integer()) throw SchemaError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

std::string string(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_string()) throw SchemaError(where + "." + key + ": expected a string");
    return v.get<std::string>();
}

const json& array(const json& obj, const char* key, const std::string& where) {
    const json& v = require(obj, key, where);
    if (!v.is_array()) throw SchemaError(where + "." + key + ": expected an array");
    return v;
}

std::vector<double> number_array(const json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaError(where + ": expected an array of numbers");
    std::vector<double> out;
    out.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) throw SchemaError(where + "[" + std::to_string(i) + "]: expected a number");
        out.push_back(v[i].get<double>());
    }
    return out;
}

}  // namespace

UcInstance parse_instance(std::string_view text) {
    const json doc = parse_json(text, "instance");
    if (!doc.is_object()) throw SchemaError("instance: top level must be an object");
    reject_unknown(doc, {"buses", "ref_bus", "generators", "lines", "horizon", "demand"}, "instance");

    UcInstance inst;
    for (const auto& b : array(doc, "buses", "instance")) {
        if (!b.is_string()) throw SchemaError("buses: every bus id must be a string");
        inst.buses.push_back(b.get<std::string>());
    }
    inst.ref_bus = string(doc, "ref_bus", "instance");
    inst.horizon = integer(doc, "horizon", "instance");

    const json& gens = array(doc, "generators", "instance");
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const std::string w = "generators[" + std::to_string(i) + "]";
        const json& o = gens[i];
        if (!o.is_object()) throw SchemaError(w + ": expected an object");
        reject_unknown(o,
                       {"id", "bus", "c", "c_nl", "c_su", "p_min", "p_max", "ut", "dt", "r_hr", "r_su", "r_sd",
                        "u0", "p0", "init_duration"},
                       w);
        Generator g;
        g.id = string(o, "id", w);
        g.bus = string(o, "bus", w);
        g.c = number(o, "c", w);
        g.c_nl = number(o, "c_nl", w);
        g.c_su = number(o, "c_su", w);
        g.p_min = number(o, "p_min", w);
        g.p_max = number(o, "p_max", w);
        g.ut = integer(o, "ut", w);
        g.dt = integer(o, "dt", w);
        g.r_hr = number(o, "r_hr", w);
        g.r_su = number(o, "r_su", w);
        g.r_sd = number(o, "r_sd", w);
        g.u0 = integer(o, "u0", w);
        g.p0 = number(o, "p0", w);
        g.init_duration = integer(o, "init_duration", w);
        inst.generators.push_back(std::move(g));
    }

    const json& lines = array(doc, "lines", "instance");
    for (std::size_t k = 0; k < lines.size(); ++k) {
        const std::string w = "lines[" + std::to_string(k) + "]";
        const json& o = lines[k];
        if (!o.is_object()) throw SchemaError(w + ": expected an object");
        reject_unknown(o, {"id", "from_bus", "to_bus", "b", "f_max"}, w);
        inst.lines.push_back(Line{string(o, "id", w), string(o, "from_bus", w), string(o, "to_bus", w),
                                  number(o, "b", w), number(o, "f_max", w)});
    }

    const json& dem = require(doc, "demand", "instance");
    if (!dem.is_object()) throw SchemaError("demand: expected an object mapping bus id to hourly values");
    for (const auto& [bus, _] : dem.items())
        if (std::find(inst.buses.begin(), inst.buses.end(), bus) == inst.buses.end())
            throw SemanticError("demand." + bus + ": unknown bus '" + bus + "'");
    inst.demand.resize(inst.buses.size());
    for (std::size_t n = 0; n < inst.buses.size(); ++n) {
        const auto it = dem.find(inst.buses[n]);
        if (it == dem.end()) throw SchemaError("demand: missing profile for bus '" + inst.buses[n] + "'");
        inst.demand[n] = number_array(*it, "demand." + inst.buses[n]);
    }

    std::string problems;
    for (const auto& v : validate_instance(inst)) {
        if (v.field == "capacity") continue;  // reported by validate_instance, not a type invariant
        if (!problems.empty()) problems += "; ";
        problems += v.field + ": " + v.detail;
    }
    if (!problems.empty()) throw SemanticError("instance: " + problems);
    return inst;
}

UcInstance load_instance(const std::string& path) { return parse_instance(read_file(path)); }

std::string serialize_instance(const UcInstance& inst) {
    json doc;
    doc["buses"] = inst.buses;
    doc["ref_bus"] = inst.ref_bus;
    doc["horizon"] = inst.horizon;
    json gens = json::array();
    for (const auto& g : inst.generators) {
        gens.push_back({{"id", g.id},       {"bus", g.bus},     {"c", g.c},         {"c_nl", g.c_nl},
                        {"c_su", g.c_su},   {"p_min", g.p_min}, {"p_max", g.p_max}, {"ut", g.ut},
                        {"dt", g.dt},       {"r_hr", g.r_hr},   {"r_su", g.r_su},   {"r_sd", g.r_sd},
                        {"u0", g.u0},       {"p0", g.p0},       {"init_duration", g.init_duration}});
    }
    doc["generators"] = std::move(gens);
    json lines = json::array();
    for (const auto& l : inst.lines)
        lines.push_back({{"id", l.id}, {"from_bus", l.from_bus}, {"to_bus", l.to_bus}, {"b", l.b}, {"f_max", l.f_max}});
    doc["lines"] = std::move(lines);
    json dem = json::object();
    for (std::size_t n = 0; n < inst.buses.size(); ++n) dem[inst.buses[n]] = inst.demand[n];
    doc["demand"] = std::move(dem);
    return doc.dump(2) + "\n";
}

HistoryBank parse_history(std::string_view text) {
    const json doc = parse_json(text, "history");
    if (!doc.is_array()) throw SchemaError("history: top level must be an array of days");
    HistoryBank bank;
    for (std::size_t d = 0; d < doc.size(); ++d) {
        const std::string w = "history[" + std::to_string(d) + "]";
        const json& day = doc[d];
        if (!day.is_object()) throw SchemaError(w + ": expected an object");
        reject_unknown(day, {"demand", "schedule"}, w);
        HistoryDay hd;
        hd.demand = number_array(require(day, "demand", w), w + ".demand");
        const json& s = require(day, "schedule", w);
        if (!s.is_object()) throw SchemaError(w + ".schedule: expected an object");
        reject_unknown(s, {"u", "p"}, w + ".schedule");
        for (const auto& row : array(s, "u", w + ".schedule")) {
            std::vector<int> r;
            if (!row.is_array()) throw SchemaError(w + ".schedule.u: expected arrays of 0/1");
            for (const auto& v : row) {
                if (!v.is_number_integer()) throw SchemaError(w + ".schedule.u: expected integers");
                r.push_back(v.get<int>());
            }
            hd.schedule.u.push_back(std::move(r));
        }
        const json& p = array(s, "p", w + ".schedule");
        for (std::size_t g = 0; g < p.size(); ++g)
            hd.schedule.p.push_back(number_array(p[g], w + ".schedule.p[" + std::to_string(g) + "]"));
        try {
            hd.schedule.check(hd.schedule.u.size(), static_cast<int>(hd.demand.size()));
        } catch (const DimensionError& e) {
            throw DimensionError(w + ": " + e.what());
        } catch (const SemanticError& e) {
            throw SemanticError(w + ": " + e.what());
        }
        if (!bank.days.empty() && (hd.demand.size() != bank.days[0].demand.size() ||
                                   hd.schedule.u.size() != bank.days[0].schedule.u.size()))
            throw DimensionError(w + ": shape differs from history[0]");
        bank.days.push_back(std::move(hd));
    }
    return bank;
}

HistoryBank load_history(const std::string& path) { return parse_history(read_file(path)); }

std::string serialize_history(const HistoryBank& bank) {
    json doc = json::array();
    for (const auto& d : bank.days)
        doc.push_back({{"demand", d.demand}, {"schedule", {{"u", d.schedule.u}, {"p", d.schedule.p}}}});
    return doc.dump() + "\n";
}

}  // namespace ucr
