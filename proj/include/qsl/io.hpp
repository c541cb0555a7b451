#pragma once

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bounds.hpp"
#include "build.hpp"
#include "evolution.hpp"
#include "minorant.hpp"
#include "reverse.hpp"

namespace qsl {

using json = nlohmann::ordered_json;

inline constexpr const char* tool_version = "qsl 1.0.0";

// Recorded at the top of every output file.
struct RunInfo {
    std::uint64_t seed = 0;
    int precision_bits = 256;
    std::string config_hash;
};

inline std::string fnv1a_hex(const std::string& s)
{
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline json header_json(const RunInfo& info)
{
    return {{"tool_version", tool_version},
            {"seed", info.seed},
            {"precision_bits", info.precision_bits},
            {"config_hash", info.config_hash}};
}

inline std::string csv_header(const RunInfo& info)
{
    std::ostringstream os;
    os << "# tool_version=" << tool_version << " seed=" << info.seed << " precision_bits=" << info.precision_bits
       << " config_hash=" << info.config_hash << "\n";
    return os.str();
}

// 17 significant digits, enough to round-trip a double.
template <class T>
std::string csv_num(const T& x)
{
    const double d = to_double(x);
    if (std::isinf(d))
        return d > 0 ? "inf" : "-inf";
    if (std::isnan(d))
        return "nan";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

template <class T>
std::string json_num(const T& x)
{
    using std::isinf;
    if (isinf(x))
        return x > 0 ? "inf" : "-inf";
    return to_decimal(x);
}

template <class T>
T num_from_json(const json& j)
{
    if (j.is_number())
        return from_decimal<T>(j.dump());
    if (!j.is_string())
        throw parse_error("expected a number or a decimal string");
    const std::string s = j.get<std::string>();
    if (s == "inf")
        return std::numeric_limits<T>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<T>::infinity();
    return from_decimal<T>(s);
}

template <class T>
json to_json(const Interval<T>& x)
{
    return json::array({json_num(x.lo), json_num(x.hi)});
}

template <class T>
json to_json(const Polynomial<T>& p)
{
    json c = json::array();
    for (const auto& v : p.coeffs())
        c.push_back(to_decimal(v));
    return {{"scale", to_decimal(p.scale())}, {"degree", p.degree()}, {"coeffs", c}};
}

template <class T>
Polynomial<T> polynomial_from_json(const json& j)
{
    try {
        const json& c = j.is_array() ? j : j.at("coeffs");
        std::vector<T> v;
        for (const auto& x : c)
            v.push_back(num_from_json<T>(x));
        if (v.empty())
            throw parse_error("polynomial has no coefficients");
        const T s = j.is_object() && j.contains("scale") ? num_from_json<T>(j["scale"]) : T(1);
        return Polynomial<T>(std::move(v), s);
    } catch (const json::exception& e) {
        throw parse_error(std::string("polynomial: ") + e.what());
    } catch (const domain_error& e) {
        throw parse_error(std::string("polynomial: ") + e.what());
    }
}

template <class T>
json to_json(const MinorantCertificate<T>& c)
{
    json j = {{"method", to_string(c.method)},
              {"status", to_string(c.status)},
              {"verified", c.verified},
              {"precision_bits", c.precision_bits},
              {"seed", c.seed},
              {"domain_lower", json_num(c.domain_lower)},
              {"far_field_cutoff", json_num(c.far_field_cutoff)},
              {"subdivision_count", c.subdivision_count},
              {"contact_tolerance", json_num(c.contact_tolerance)}};
    json ce = json::array();
    for (const auto& e : c.contact_enclosures)
        ce.push_back(to_json(e));
    j["contact_enclosures"] = ce;
    if (c.negative_evidence)
        j["witness"] = {{"region", to_json(c.negative_evidence->region)},
                        {"point", json_num(c.negative_evidence->point)},
                        {"difference", json_num(c.negative_evidence->difference)}};
    if (c.method == CertMethod::derivative_count) {
        j["derivative_order"] = c.derivative_order;
        if (c.window)
            j["window"] = to_json(*c.window);
        j["window_root_count"] = c.window_root_count;
        json roots = json::array();
        for (const auto& r : c.window_roots)
            roots.push_back({{"enclosure", to_json(r.x)}, {"bound", r.bound}});
        j["window_roots"] = roots;
    }
    j["note"] = c.note;
    return j;
}

template <class T>
json to_json(const IntervalSet<T>& s)
{
    json a = json::array();
    for (const auto& i : s.intervals)
        a.push_back({{"lo", json_num(i.lo)},
                     {"hi", json_num(i.hi)},
                     {"lo_width", json_num(i.lo_width)},
                     {"hi_width", json_num(i.hi_width)},
                     {"degenerate", i.degenerate}});
    return a;
}

template <class T>
std::string to_csv(const IntervalSet<T>& s, const RunInfo& info)
{
    std::string out = csv_header(info) + "lo,hi,lo_width,hi_width,degenerate\n";
    for (const auto& i : s.intervals)
        out += csv_num(i.lo) + "," + csv_num(i.hi) + "," + csv_num(i.lo_width) + "," + csv_num(i.hi_width) + "," +
               (i.degenerate ? "1" : "0") + "\n";
    return out;
}

template <class T>
json to_json(const TauMinCurve<T>& c)
{
    json pts = json::array(), jumps = json::array();
    for (std::size_t i = 0; i < c.sqrt_f.size(); ++i)
        pts.push_back({{"sqrt_f", json_num(c.sqrt_f[i])}, {"tau_min", json_num(c.tau_min[i])}});
    for (const auto& j : c.jumps)
        jumps.push_back({{"sqrt_f", json_num(j.sqrt_f)},
                         {"tau_before", json_num(j.tau_before)},
                         {"tau_after", json_num(j.tau_after)}});
    return {{"points", pts}, {"jumps", jumps}};
}

template <class T>
std::string to_csv(const TauMinCurve<T>& c, const RunInfo& info)
{
    std::string out = csv_header(info) + "sqrt_f,tau_min\n";
    for (std::size_t i = 0; i < c.sqrt_f.size(); ++i)
        out += csv_num(c.sqrt_f[i]) + "," + csv_num(c.tau_min[i]) + "\n";
    for (const auto& j : c.jumps)
        out += "# jump sqrt_f=" + csv_num(j.sqrt_f) + " tau_before=" + csv_num(j.tau_before) +
               " tau_after=" + csv_num(j.tau_after) + "\n";
    return out;
}

template <class T>
json to_json(const DiagonalState<T>& st)
{
    json a = json::array();
    for (const auto& l : st.levels)
        a.push_back({{"energy", to_decimal(l.energy)}, {"weight", to_decimal(l.weight)}});
    return {{"levels", a}};
}

template <class T>
json to_json(const ReverseSolution<T>& s)
{
    json contacts = json::array(), ag = json::array(), eg = json::array();
    for (const auto& x : s.contacts)
        contacts.push_back(json_num(x));
    for (const auto& x : s.approximation_grid)
        ag.push_back(json_num(x));
    for (const auto& x : s.extended_grid)
        eg.push_back(json_num(x));
    const auto& r = s.report;
    return {{"polynomial", to_json(s.p)},
            {"sup_gap", json_num(s.sup_gap)},
            {"x_min", json_num(s.x_min)},
            {"x_max", json_num(s.x_max)},
            {"x_reach", json_num(s.x_reach)},
            {"x_far", json_num(s.x_far)},
            {"tau_min", json_num(s.tau_min)},
            {"theta_min", json_num(s.theta_min)},
            {"contacts", contacts},
            {"tightness_residual", json_num(s.tightness_residual)},
            {"strictness_margin", json_num(s.strictness_margin)},
            {"near_margin", json_num(s.near_margin)},
            {"near_witness", json_num(s.near_witness)},
            {"report",
             {{"delta", json_num(r.delta)},
              {"beta", r.beta},
              {"zeta", json_num(r.zeta)},
              {"gamma_prime", json_num(r.gamma_prime)},
              {"gamma", r.gamma},
              {"epsilon", json_num(r.epsilon)},
              {"tau_turn", json_num(r.tau_turn)},
              {"gap_below_epsilon", r.gap_below_epsilon}}},
            {"rounds", s.rounds},
            {"grid_density", s.grid_density},
            {"lp_pivots", s.lp_pivots},
            {"certificate", to_json(s.certificate)},
            {"approximation_grid", ag},
            {"extended_grid", eg}};
}

// A state by name ("paper-example", "two-level") or as {"levels": [{energy, weight}]}.
template <class T>
DiagonalState<T> state_from_json(const json& j)
{
    if (j.is_string()) {
        const std::string n = j.get<std::string>();
        if (n == "paper-example")
            return paper_state<T>();
        if (n == "two-level")
            return {{{T(0), T(1) / 2}, {T(1), T(1) / 2}}};
        throw parse_error("unknown state name: " + n);
    }
    try {
        const json& lv = j.is_array() ? j : j.at("levels");
        DiagonalState<T> st;
        for (const auto& l : lv)
            st.levels.push_back({num_from_json<T>(l.at("energy")), num_from_json<T>(l.at("weight"))});
        st.validate();
        return st;
    } catch (const json::exception& e) {
        throw parse_error(std::string("state: ") + e.what());
    } catch (const domain_error& e) {
        throw parse_error(std::string("state: ") + e.what());
    }
}

// {"scale": s, "values": [...], "absolute": bool, "shift": a}, or the name "paper-example".
template <class T>
MomentVector<T> moments_from_json(const json& j, int n)
{
    if (j.is_string()) {
        if (j.get<std::string>() == "paper-example")
            return paper_moments<T>(n);
        throw parse_error("unknown moment set: " + j.get<std::string>());
    }
    try {
        MomentVector<T> m;
        m.s = j.contains("scale") ? num_from_json<T>(j["scale"]) : T(1);
        for (const auto& v : j.at("values"))
            m.values.push_back(num_from_json<T>(v));
        m.absolute = j.value("absolute", false);
        m.shift = j.contains("shift") ? num_from_json<T>(j["shift"]) : T(0);
        m.validate();
        return m;
    } catch (const json::exception& e) {
        throw parse_error(std::string("moments: ") + e.what());
    } catch (const domain_error& e) {
        throw parse_error(std::string("moments: ") + e.what());
    }
}

// {"theta": t, "scale": s, "seed": n, "nodes": [{"x": x, "m": m}]}
template <class T>
MinorantSpec<T> minorant_spec_from_json(const json& j)
{
    try {
        MinorantSpec<T> spec;
        spec.theta = j.contains("theta") ? num_from_json<T>(j["theta"]) : T(0);
        spec.s = j.contains("scale") ? num_from_json<T>(j["scale"]) : T(1);
        spec.seed = j.value("seed", std::uint64_t(0));
        for (const auto& n : j.at("nodes"))
            spec.nodes.push_back({num_from_json<T>(n.at("x")), n.at("m").get<int>(), 0});
        return spec;
    } catch (const json::exception& e) {
        throw parse_error(std::string("minorant spec: ") + e.what());
    }
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw parse_error("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw parse_error(path + ": " + e.what());
    }
}

// Flat "key = value" lines; '#' starts a comment.
inline std::map<std::string, std::string> parse_config(std::istream& in)
{
    std::map<std::string, std::string> out;
    std::string line;
    int no = 0;
    while (std::getline(in, line)) {
        ++no;
        if (auto h = line.find('#'); h != std::string::npos)
            line.erase(h);
        auto trim = [](std::string s) {
            const auto a = s.find_first_not_of(" \t\r");
            if (a == std::string::npos)
                return std::string();
            const auto b = s.find_last_not_of(" \t\r");
            return s.substr(a, b - a + 1);
        };
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw parse_error("config line " + std::to_string(no) + ": expected key = value");
        const std::string k = trim(line.substr(0, eq));
        if (k.empty())
            throw parse_error("config line " + std::to_string(no) + ": empty key");
        out[k] = trim(line.substr(eq + 1));
    }
    return out;
}

} // namespace qsl
