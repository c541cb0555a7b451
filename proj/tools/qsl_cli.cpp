#include <CLI11.hpp>

#include <qsl/qsl.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

enum Exit { ok = 0, failure = 1, bad_input = 2, refuted = 3, inconclusive = 4 };

struct Options {
    int precision = 256;
    std::uint64_t seed = 0;
    std::string horizon = "1000";
    int grid = 1201;
    std::string out;
    std::string format = "csv";
    int threads = 1;

    // shared subcommand inputs
    std::string spec, poly, state, moments, theta = "0", method = "subdivision", lower = "0";
    std::vector<std::string> roots, shifts;
    std::string fidelity = "0", kind = "all", stat = "1", b = "2", threshold = "1";
    std::string from = "0", to = "12", scale = "1", shift = "0";
    int points = 400, order = 8, degree = 16, gamma = 2, max_degree = 0, density = 256;
    bool absolute = false;
};

struct Context {
    Options opt;
    qsl::RunInfo info;
    std::string command;
};

int exit_for(const qsl::CertStatus s)
{
    return s == qsl::CertStatus::verified ? ok : s == qsl::CertStatus::refuted ? refuted : inconclusive;
}

void write_file(const Context& cx, const std::string& name, const std::string& body)
{
    fs::path dir = cx.opt.out.empty() ? fs::path(".") : fs::path(cx.opt.out);
    fs::create_directories(dir);
    const fs::path path = dir / name;
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw qsl::error("cannot write " + path.string());
    f << body;
    std::cout << "wrote " << path.string() << "\n";
}

void write_json(const Context& cx, const std::string& name, qsl::json body)
{
    qsl::json doc = {{"header", qsl::header_json(cx.info)}, {"command", cx.command}};
    for (auto& [k, v] : body.items())
        doc[k] = v;
    write_file(cx, name, doc.dump(2) + "\n");
}

template <class T>
std::string show(const T& x, int digits = 10)
{
    using std::isinf;
    if (isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, qsl::to_double(x));
    return buf;
}

template <class T>
T num(const std::string& s, const char* what)
{
    try {
        return qsl::from_decimal<T>(s);
    } catch (const qsl::parse_error&) {
        throw qsl::parse_error(std::string(what) + ": not a number: " + s);
    }
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep))
        out.push_back(item);
    return out;
}

const qsl::PeMinorant<qsl::real512>& pe512(bool certify)
{
    static std::optional<qsl::PeMinorant<qsl::real512>> plain, certified;
    auto& slot = certify ? certified : plain;
    if (!slot)
        slot = qsl::build_pe<qsl::real512>(certify);
    return *slot;
}

// "pe", a JSON file, or inline comma-separated coefficients.
template <class T>
qsl::Polynomial<T> load_poly(const std::string& s)
{
    if (s.empty())
        throw qsl::parse_error("no polynomial given (--poly)");
    if (s == "pe")
        return qsl::convert<T>(pe512(false).p);
    if (fs::exists(s)) {
        auto j = qsl::read_json_file(s);
        return qsl::polynomial_from_json<T>(j.contains("polynomial") ? j["polynomial"] : j);
    }
    std::vector<T> c;
    for (const auto& t : split(s, ','))
        c.push_back(num<T>(t, "coefficient"));
    if (c.empty())
        throw qsl::parse_error("empty coefficient list");
    return qsl::Polynomial<T>(std::move(c));
}

// A name, a JSON file, or inline "energy:weight,..." pairs.
template <class T>
qsl::DiagonalState<T> load_state(const std::string& s)
{
    if (s.empty())
        throw qsl::parse_error("no state given (--state)");
    if (s == "paper-example" || s == "two-level")
        return qsl::state_from_json<T>(qsl::json(s));
    if (fs::exists(s))
        return qsl::state_from_json<T>(qsl::read_json_file(s));
    qsl::DiagonalState<T> st;
    for (const auto& t : split(s, ',')) {
        const auto kv = split(t, ':');
        if (kv.size() != 2)
            throw qsl::parse_error("state level must read energy:weight, got " + t);
        st.levels.push_back({num<T>(kv[0], "energy"), num<T>(kv[1], "weight")});
    }
    try {
        st.validate();
    } catch (const qsl::domain_error& e) {
        throw qsl::parse_error(std::string("state: ") + e.what());
    }
    return st;
}

template <class T>
qsl::MomentVector<T> load_moments(const Options& o, const qsl::Polynomial<T>& p)
{
    if (!o.moments.empty()) {
        if (o.moments == "paper-example")
            return qsl::paper_moments<T>(p.degree());
        return qsl::moments_from_json<T>(qsl::read_json_file(o.moments), p.degree());
    }
    if (o.state.empty())
        throw qsl::parse_error("give --state or --moments");
    return qsl::moments_of(load_state<T>(o.state), p.scale(), p.degree(), T(0), true);
}

template <class T>
int minorant_build(const Context& cx)
{
    if (cx.opt.spec.empty())
        throw qsl::parse_error("minorant build needs --spec");
    const auto j = qsl::read_json_file(cx.opt.spec);
    auto spec = qsl::minorant_spec_from_json<T>(j);
    if (!j.contains("seed"))
        spec.seed = cx.opt.seed;
    try {
        qsl::validate(spec);
    } catch (const qsl::domain_error& e) {
        throw qsl::parse_error(std::string("minorant spec: ") + e.what());
    }
    auto m = qsl::build_minorant(spec);
    qsl::json nodes = qsl::json::array();
    for (const auto& n : m.nodes)
        nodes.push_back({{"x", qsl::to_decimal(n.x)}, {"m", n.m}, {"kappa", n.kappa}});
    write_json(cx, "minorant.json",
               {{"polynomial", qsl::to_json(m.p)},
                {"theta", qsl::to_decimal(spec.theta)},
                {"correction", qsl::to_decimal(m.correction)},
                {"nodes", nodes},
                {"certificate", qsl::to_json(m.certificate)}});
    std::cout << "degree " << m.p.degree() << ", certificate " << qsl::to_string(m.certificate.status) << "\n";
    return exit_for(m.certificate.status);
}

template <class T>
int minorant_certify(const Context& cx)
{
    const auto& o = cx.opt;
    const auto p = load_poly<T>(o.poly);
    const T theta = num<T>(o.theta, "theta");
    qsl::MinorantCertificate<T> c;
    if (o.method == "subdivision") {
        qsl::CertifyOptions<T> co;
        co.lower = num<T>(o.lower, "lower");
        for (const auto& r : o.roots)
            co.contacts.push_back(num<T>(split(r, ':')[0], "root"));
        c = qsl::certify_by_subdivision(p, theta, co);
    } else if (o.method == "derivative-count") {
        if (theta != 0)
            throw qsl::parse_error("derivative-count certifies against cos(x) only");
        std::vector<qsl::KnownRoot<T>> roots;
        for (const auto& r : o.roots) {
            const auto kv = split(r, ':');
            if (kv.size() != 2)
                throw qsl::parse_error("root must read x:multiplicity, got " + r);
            roots.push_back({num<T>(kv[0], "root"), std::stoi(kv[1])});
        }
        c = qsl::certify_by_derivative_count(p, roots);
    } else {
        throw qsl::parse_error("unknown method " + o.method);
    }
    write_json(cx, "certificate.json", {{"polynomial", qsl::to_json(p)}, {"certificate", qsl::to_json(c)}});
    std::cout << qsl::to_string(c.status);
    if (c.negative_evidence)
        std::cout << ": p exceeds cos at x = " << show(c.negative_evidence->point) << " by "
                  << show(T(-c.negative_evidence->difference), 6);
    std::cout << "\n";
    return exit_for(c.status);
}

struct CoefficientCheck {
    int power;
    std::string value;
    std::string rounded;
    std::string published;
    bool match;
};

template <class T>
std::vector<CoefficientCheck> check_pe_coefficients(const qsl::Polynomial<T>& p)
{
    std::vector<CoefficientCheck> out;
    for (std::size_t i = 0; i < qsl::reference::pe_even_coefficients.size(); ++i) {
        const int k = static_cast<int>(2 * i);
        const T c = k < static_cast<int>(p.size()) ? p[k] : T(0);
        const std::string mine = qsl::to_decimal(qsl::to_double(c), 5);
        const std::string pub = qsl::to_decimal(qsl::reference::pe_even_coefficients[i], 5);
        out.push_back({k, qsl::to_decimal(c), mine, pub, mine == pub});
    }
    return out;
}

template <class T>
int minorant_pe(const Context& cx)
{
    const auto& e = pe512(true);
    const auto checks = check_pe_coefficients(e.p);
    std::string csv = qsl::csv_header(cx.info) + "power,coefficient,coefficient_5sf,published_5sf,match\n";
    qsl::json rows = qsl::json::array();
    std::cout << "power  coefficient (5 s.f.)  published   match\n";
    for (const auto& c : checks) {
        csv += std::to_string(c.power) + "," + c.value + "," + c.rounded + "," + c.published + "," +
               (c.match ? "1" : "0") + "\n";
        rows.push_back({{"power", c.power}, {"coefficient", c.value}, {"coefficient_5sf", c.rounded},
                        {"published_5sf", c.published}, {"match", c.match}});
        char line[128];
        std::snprintf(line, sizeof line, "%5d  %-21s %-11s %s\n", c.power, c.rounded.c_str(), c.published.c_str(),
                      c.match ? "yes" : "no");
        std::cout << line;
    }
    write_file(cx, "pe_coefficients.csv", csv);
    write_json(cx, "pe.json",
               {{"polynomial", qsl::to_json(e.p)},
                {"tau_c1", qsl::to_decimal(e.times.tau_c1)},
                {"tau_c2", qsl::to_decimal(e.times.tau_c2)},
                {"sqrt_f_c2", qsl::to_decimal(e.times.sqrt_f_c2)},
                {"coefficients", rows},
                {"subdivision", qsl::to_json(e.subdivision)},
                {"derivative_count", qsl::to_json(e.derivative_count)}});
    return exit_for(e.subdivision.verified && e.derivative_count.verified ? qsl::CertStatus::verified
                                                                          : qsl::CertStatus::inconclusive);
}

template <class T>
void print_intervals(const qsl::IntervalSet<T>& s)
{
    if (s.empty())
        std::cout << "no permissible time within the horizon\n";
    for (const auto& i : s.intervals) {
        if (i.degenerate)
            std::cout << "{" << show(i.lo) << "}\n";
        else
            std::cout << "[" << show(i.lo) << ", " << show(i.hi) << "]\n";
    }
}

template <class T>
int qsl_intervals(const Context& cx)
{
    const auto& o = cx.opt;
    const auto p = load_poly<T>(o.poly);
    const T f = num<T>(o.fidelity, "fidelity");
    const T horizon = num<T>(o.horizon, "horizon");
    qsl::IntervalSet<T> set;
    if (!o.shifts.empty()) {
        if (o.state.empty())
            throw qsl::parse_error("shift tightening needs --state");
        std::vector<T> shifts;
        for (const auto& a : o.shifts)
            shifts.push_back(num<T>(a, "shift"));
        set = qsl::tighten_by_shift(load_state<T>(o.state), p, f, shifts, horizon);
    } else {
        set = qsl::permissible_times(p, load_moments(o, p), f, horizon);
    }
    print_intervals(set);
    if (o.format == "json")
        write_json(cx, "intervals.json", {{"fidelity", o.fidelity}, {"intervals", qsl::to_json(set)}});
    else
        write_file(cx, "intervals.csv", qsl::to_csv(set, cx.info));
    return ok;
}

template <class T>
int qsl_scan(const Context& cx)
{
    const auto& o = cx.opt;
    const auto p = load_poly<T>(o.poly);
    if (o.points < 2)
        throw qsl::parse_error("--points must be at least 2");
    auto curve = qsl::tau_min_scan(p, load_moments(o, p), qsl::default_fidelity_grid<T>(o.points),
                                   num<T>(o.horizon, "horizon"), num<T>(o.threshold, "threshold"));
    std::cout << curve.jumps.size() << " jump(s)\n";
    for (const auto& j : curve.jumps)
        std::cout << "sqrt(F) = " << show(j.sqrt_f, 8) << ": tau_min " << show(j.tau_before) << " -> "
                  << show(j.tau_after) << "\n";
    if (o.format == "json")
        write_json(cx, "scan.json", {{"curve", qsl::to_json(curve)}});
    else
        write_file(cx, "scan.csv", qsl::to_csv(curve, cx.info));
    return ok;
}

template <class T>
int qsl_classic(const Context& cx)
{
    const auto& o = cx.opt;
    const T stat = num<T>(o.stat, "stat"), f = num<T>(o.fidelity, "fidelity"), b = num<T>(o.b, "b");
    std::vector<qsl::ClassicKind> kinds;
    if (o.kind == "all")
        kinds = {qsl::ClassicKind::mandelstam_tamm, qsl::ClassicKind::margolus_levitin, qsl::ClassicKind::chau,
                 qsl::ClassicKind::generalized};
    else
        try {
            kinds = {qsl::parse_classic_kind(o.kind)};
        } catch (const qsl::domain_error& e) {
            throw qsl::parse_error(e.what());
        }
    std::string csv = qsl::csv_header(cx.info) + "kind,statistic,fidelity,b,tau,theta,a\n";
    qsl::json rows = qsl::json::array();
    for (auto k : kinds) {
        const auto r = qsl::classic_bound(k, stat, f, b);
        const std::string bs = k == qsl::ClassicKind::generalized ? qsl::csv_num(b) : "1";
        std::cout << qsl::to_string(k) << " tau >= " << show(r.tau, 17) << "\n";
        csv += std::string(qsl::to_string(k)) + "," + qsl::csv_num(stat) + "," + qsl::csv_num(f) + "," + bs + "," +
               qsl::csv_num(r.tau) + "," + qsl::csv_num(r.theta) + "," + qsl::csv_num(r.a) + "\n";
        rows.push_back({{"kind", qsl::to_string(k)}, {"tau", qsl::to_decimal(r.tau)},
                        {"theta", qsl::to_decimal(r.theta)}, {"a", qsl::to_decimal(r.a)}, {"b", bs}});
    }
    if (o.format == "json")
        write_json(cx, "classic.json", {{"statistic", o.stat}, {"fidelity", o.fidelity}, {"bounds", rows}});
    else
        write_file(cx, "classic.csv", csv);
    return ok;
}

template <class T>
int evolve_fidelity(const Context& cx)
{
    const auto& o = cx.opt;
    const auto st = load_state<T>(o.state);
    const T a = num<T>(o.from, "from"), b = num<T>(o.to, "to");
    if (o.grid < 2 || !(b > a))
        throw qsl::parse_error("need --grid >= 2 and --to > --from");
    std::string csv = qsl::csv_header(cx.info) + "tau,sqrt_f\n";
    qsl::json rows = qsl::json::array();
    for (int i = 0; i < o.grid; ++i) {
        const T t = a + (b - a) * i / (o.grid - 1);
        const T f = qsl::fidelity(st, t);
        csv += qsl::csv_num(t) + "," + qsl::csv_num(f) + "\n";
        rows.push_back({{"tau", qsl::to_decimal(t)}, {"sqrt_f", qsl::to_decimal(f)}});
    }
    if (o.format == "json")
        write_json(cx, "fidelity.json", {{"state", qsl::to_json(st)}, {"points", rows}});
    else
        write_file(cx, "fidelity.csv", csv);
    return ok;
}

template <class T>
int evolve_first_passage(const Context& cx)
{
    const auto& o = cx.opt;
    const auto st = load_state<T>(o.state);
    const auto t = qsl::first_passage(st, num<T>(o.fidelity, "fidelity"), num<T>(o.horizon, "horizon"));
    std::cout << (t ? show(*t, 17) : std::string("none within the horizon")) << "\n";
    const std::string v = t ? qsl::to_decimal(*t) : "none";
    if (o.format == "json")
        write_json(cx, "first_passage.json", {{"fidelity", o.fidelity}, {"tau", v}});
    else
        write_file(cx, "first_passage.csv",
                   qsl::csv_header(cx.info) + "fidelity,tau\n" + o.fidelity + "," + (t ? qsl::csv_num(*t) : "") +
                       "\n");
    return ok;
}

template <class T>
int evolve_moments(const Context& cx)
{
    const auto& o = cx.opt;
    const auto st = load_state<T>(o.state);
    const T s = num<T>(o.scale, "scale"), a = num<T>(o.shift, "shift");
    auto m = qsl::moments_of(st, s, o.order, a, o.absolute);
    std::string csv = qsl::csv_header(cx.info) + "k,r,moment\n";
    qsl::json vals = qsl::json::array();
    for (std::size_t k = 0; k < m.values.size(); ++k) {
        const T r = s * T(static_cast<long>(k));
        csv += std::to_string(k) + "," + qsl::csv_num(r) + "," + qsl::csv_num(m.values[k]) + "\n";
        vals.push_back(qsl::to_decimal(m.values[k]));
        std::cout << "M_" << show(r, 6) << " = " << show(m.values[k], 17) << "\n";
    }
    if (o.format == "json")
        write_json(cx, "moments.json",
                   {{"scale", qsl::to_decimal(s)}, {"shift", qsl::to_decimal(a)}, {"absolute", o.absolute},
                    {"values", vals}});
    else
        write_file(cx, "moments.csv", csv);
    return ok;
}

template <class T>
int reverse_solve(const Context& cx)
{
    const auto& o = cx.opt;
    qsl::ReverseProblemSpec<T> spec;
    spec.state = load_state<T>(o.state);
    spec.sqrt_f0 = num<T>(o.fidelity, "fidelity");
    spec.degree = o.degree;
    spec.gamma = o.gamma;
    spec.grid_density = o.density;
    spec.horizon = num<T>(o.horizon, "horizon");
    const auto sol = o.max_degree > o.degree ? qsl::solve_reverse_raising(spec, o.max_degree)
                                             : qsl::solve_reverse(spec);
    std::cout << "tau_min " << show(sol.tau_min, 17) << ", degree " << sol.p.degree() << ", sup gap "
              << show(sol.sup_gap, 6) << ", tightness residual " << show(sol.tightness_residual, 3)
              << ", strictness margin " << show(sol.strictness_margin, 6) << ", certificate "
              << qsl::to_string(sol.certificate.status) << "\n";
    write_json(cx, "reverse.json", {{"state", qsl::to_json(spec.state)}, {"sqrt_f0", o.fidelity},
                                    {"solution", qsl::to_json(sol)}});
    return exit_for(sol.certificate.status);
}

template <class T>
std::string csv_table(const Context& cx, const std::string& columns, const T& a, const T& b, int n,
                      const std::function<std::vector<T>(const T&)>& row)
{
    std::string out = qsl::csv_header(cx.info) + columns + "\n";
    for (int i = 0; i < n; ++i) {
        const T x = a + (b - a) * i / (n - 1);
        out += qsl::csv_num(x);
        for (const auto& v : row(x))
            out += "," + qsl::csv_num(v);
        out += "\n";
    }
    return out;
}

template <class T>
qsl::json intervals_brief(const qsl::IntervalSet<T>& s)
{
    qsl::json a = qsl::json::array();
    for (const auto& i : s.intervals)
        a.push_back({{"lo", qsl::json_num(i.lo)}, {"hi", qsl::json_num(i.hi)}, {"degenerate", i.degenerate}});
    return a;
}

bool within(double x, double ref, double tol)
{
    return std::abs(x - ref) <= tol;
}

template <class T>
int reproduce_paper(const Context& cx)
{
    namespace ref = qsl::reference;
    using std::cos;
    const int n = cx.opt.grid;
    if (n < 2)
        throw qsl::parse_error("--grid must be at least 2");
    const T horizon = num<T>(cx.opt.horizon, "horizon");
    const auto st = qsl::paper_state<T>();
    const auto ct = qsl::critical_times(st);
    const double c1 = qsl::to_double(ct.tau_c1), c2 = qsl::to_double(ct.tau_c2), f2 = qsl::to_double(ct.sqrt_f_c2);
    const bool pass1 = within(c1, ref::tau_c1, 0.005) && within(c2, ref::tau_c2, 0.005) &&
                       within(f2, ref::sqrt_f_c2, 0.0005);

    const auto& e = pe512(true);
    const auto checks = check_pe_coefficients(e.p);
    bool pass2 = true;
    qsl::json coeffs = qsl::json::array();
    for (const auto& c : checks) {
        pass2 = pass2 && c.match;
        coeffs.push_back({{"power", c.power}, {"coefficient_5sf", c.rounded}, {"published_5sf", c.published},
                          {"match", c.match}});
    }
    const auto& dc = e.derivative_count;
    const bool pass3 = e.subdivision.verified && dc.verified && dc.window_root_count == 4;

    const auto p = qsl::convert<T>(e.p);
    const auto m = qsl::paper_moments<T>(p.degree());
    const auto s0 = qsl::permissible_times(p, m, T(0), horizon);
    const auto sc = qsl::permissible_times(p, m, ct.sqrt_f_c2, horizon);
    const T inf = std::numeric_limits<T>::infinity();
    bool pass4 = s0.intervals.size() == 2 && sc.intervals.size() == 2;
    if (pass4) {
        const auto &a = s0.intervals[0], &b = s0.intervals[1], &c = sc.intervals[0], &d = sc.intervals[1];
        pass4 = within(qsl::to_double(a.lo), ref::tau_c1, 0.005) && within(qsl::to_double(a.hi), ref::gap_lo, 0.005) &&
                within(qsl::to_double(b.lo), ref::gap_hi, 0.005) && b.hi == inf && c.degenerate &&
                within(qsl::to_double(c.lo), ref::tau_c2, 0.005) && within(qsl::to_double(d.lo), ref::tail_c2, 0.005) &&
                d.hi == inf;
    }
    const auto scan = qsl::tau_min_scan(p, m, qsl::default_fidelity_grid<T>(400), horizon);

    write_file(cx, "fig1a_fidelity.csv", csv_table<T>(cx, "tau,sqrt_f", T(0), T(12), n, [&](const T& t) {
                   return std::vector<T>{qsl::fidelity(st, t)};
               }));
    write_file(cx, "fig1b_minorant.csv", csv_table<T>(cx, "x,p_e,cos", T(0), T(22), n, [&](const T& x) {
                   return std::vector<T>{p(x), T(cos(x))};
               }));
    const auto p32 = qsl::derivative(p, 32);
    std::string c_csv = csv_table<T>(cx, "x,p_e_32,cos", T(-8), T(8), n, [&](const T& x) {
        return std::vector<T>{p32(x), T(cos(x))};
    });
    qsl::json crossings = qsl::json::array();
    for (const auto& r : dc.window_roots) {
        c_csv += "# crossing lo=" + qsl::csv_num(r.x.lo) + " hi=" + qsl::csv_num(r.x.hi) +
                 " at_most=" + std::to_string(r.bound) + "\n";
        crossings.push_back({{"enclosure", qsl::to_json(r.x)}, {"at_most", r.bound}});
    }
    write_file(cx, "fig1c_derivative.csv", c_csv);
    write_file(cx, "fig1d_bound.csv", csv_table<T>(cx, "tau,bound_rhs", T(0), T(12), n, [&](const T& t) {
                   return std::vector<T>{qsl::bound_rhs(p, m, t)};
               }));

    qsl::json jumps = qsl::json::array();
    for (const auto& j : scan.jumps)
        jumps.push_back({{"sqrt_f", qsl::json_num(j.sqrt_f)}, {"tau_before", qsl::json_num(j.tau_before)},
                         {"tau_after", qsl::json_num(j.tau_after)}});
    const bool all = pass1 && pass2 && pass3 && pass4;
    write_json(cx, "summary.json",
               {{"tau_c1", qsl::to_decimal(ct.tau_c1)},
                {"tau_c2", qsl::to_decimal(ct.tau_c2)},
                {"sqrt_f_c2", qsl::to_decimal(ct.sqrt_f_c2)},
                {"coefficients", coeffs},
                {"subdivision_certificate", qsl::to_string(e.subdivision.status)},
                {"derivative_count_certificate", qsl::to_string(dc.status)},
                {"intersection_count", dc.window_root_count},
                {"intersections", crossings},
                {"intervals_at_zero", intervals_brief(s0)},
                {"intervals_at_sqrt_f_c2", intervals_brief(sc)},
                {"jumps", jumps},
                {"pass",
                 {{"critical_times", pass1},
                  {"coefficients", pass2},
                  {"certification", pass3},
                  {"forbidden_intervals", pass4},
                  {"all", all}}}});
    std::cout << "critical times " << (pass1 ? "pass" : "FAIL") << ", coefficients " << (pass2 ? "pass" : "FAIL")
              << ", certification " << (pass3 ? "pass" : "FAIL") << ", forbidden intervals "
              << (pass4 ? "pass" : "FAIL") << "\n";
    return ok;
}

template <class T>
int dispatch(const Context& cx)
{
    const std::string& c = cx.command;
    if (c == "minorant build") return minorant_build<T>(cx);
    if (c == "minorant certify") return minorant_certify<T>(cx);
    if (c == "minorant pe") return minorant_pe<T>(cx);
    if (c == "qsl intervals") return qsl_intervals<T>(cx);
    if (c == "qsl scan") return qsl_scan<T>(cx);
    if (c == "qsl classic") return qsl_classic<T>(cx);
    if (c == "evolve fidelity") return evolve_fidelity<T>(cx);
    if (c == "evolve first-passage") return evolve_first_passage<T>(cx);
    if (c == "evolve moments") return evolve_moments<T>(cx);
    if (c == "reverse solve") return reverse_solve<T>(cx);
    if (c == "reproduce-paper") return reproduce_paper<T>(cx);
    throw qsl::parse_error("no command given");
}

// Effective settings minus where they are written and how fast.
std::string config_fingerprint(const CLI::App& app)
{
    std::string out;
    for (const auto& line : split(app.config_to_str(true, false), '\n')) {
        const auto k = line.substr(0, line.find('='));
        if (k.rfind("out", 0) == 0 || k.rfind("config", 0) == 0 || k.rfind("threads", 0) == 0)
            continue;
        out += line + "\n";
    }
    return out;
}

} // namespace

int main(int argc, char** argv)
{
    Options o;
    if (const char* env = std::getenv("QSL_OUT_DIR"))
        o.out = env;
    CLI::App app{"Certified cosine minorants and quantum speed limits"};
    app.require_subcommand(1);
    app.fallthrough();
    app.allow_config_extras(false);
    app.set_config("--config", "", "flat key = value file; flags override it");
    app.add_option("--precision", o.precision, "working precision in bits")->check(CLI::IsMember({256, 512}));
    app.add_option("--seed", o.seed, "seed recorded in outputs and used for random nodes");
    app.add_option("--horizon", o.horizon, "largest evolution time considered");
    app.add_option("--grid", o.grid, "points per sampled dataset")->check(CLI::PositiveNumber);
    app.add_option("--out", o.out, "output directory (default $QSL_OUT_DIR or .)");
    app.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", o.threads, "worker cap")->check(CLI::PositiveNumber);

    auto* mn = app.add_subcommand("minorant", "build and certify minorants of cos")->require_subcommand(1);
    auto* mb = mn->add_subcommand("build", "Hermite construction with correction");
    mb->add_option("--spec", o.spec, "minorant spec JSON")->required();
    auto* mc = mn->add_subcommand("certify", "certify p(x) <= cos(x - theta) on x >= lower");
    mc->add_option("--poly", o.poly, "pe, a JSON file, or comma-separated coefficients")->required();
    mc->add_option("--theta", o.theta);
    mc->add_option("--lower", o.lower);
    mc->add_option("--method", o.method)->check(CLI::IsMember({"subdivision", "derivative-count"}));
    mc->add_option("--root", o.roots, "declared contact x:multiplicity");
    mn->add_subcommand("pe", "the degree-34 example minorant and its coefficient table");

    auto* qs = app.add_subcommand("qsl", "speed-limit bounds")->require_subcommand(1);
    auto add_bound_inputs = [&](CLI::App* c) {
        c->add_option("--poly", o.poly, "pe, a JSON file, or comma-separated coefficients")->required();
        c->add_option("--state", o.state, "paper-example, two-level, a JSON file, or energy:weight,...");
        c->add_option("--moments", o.moments, "paper-example or a JSON file");
    };
    auto* qi = qs->add_subcommand("intervals", "permissible evolution times");
    add_bound_inputs(qi);
    qi->add_option("--fidelity", o.fidelity, "target root fidelity");
    qi->add_option("--shift", o.shifts, "reference-energy shifts to intersect over");
    auto* qn = qs->add_subcommand("scan", "tau_min over a fidelity grid");
    add_bound_inputs(qn);
    qn->add_option("--points", o.points);
    qn->add_option("--threshold", o.threshold, "smallest drop reported as a jump");
    auto* qc = qs->add_subcommand("classic", "closed-form and tangent-family bounds");
    qc->add_option("--kind", o.kind, "mandelstam_tamm, margolus_levitin, chau, generalized or all");
    qc->add_option("--stat", o.stat, "the energy statistic");
    qc->add_option("--fidelity", o.fidelity);
    qc->add_option("--b", o.b, "exponent of the generalized bound");

    auto* ev = app.add_subcommand("evolve", "exact evolution of a diagonal state")->require_subcommand(1);
    auto* ef = ev->add_subcommand("fidelity", "root fidelity on a grid");
    ef->add_option("--state", o.state)->required();
    ef->add_option("--from", o.from);
    ef->add_option("--to", o.to);
    auto* ep = ev->add_subcommand("first-passage", "first time sqrt(F) reaches the target");
    ep->add_option("--state", o.state)->required();
    ep->add_option("--fidelity", o.fidelity);
    auto* em = ev->add_subcommand("moments", "energy moments M_{s k}, k = 0..order");
    em->add_option("--state", o.state)->required();
    em->add_option("--order", o.order);
    em->add_option("--scale", o.scale);
    em->add_option("--shift", o.shift);
    em->add_flag("--absolute", o.absolute);

    auto* rv = app.add_subcommand("reverse", "speed limits tight for a given state")->require_subcommand(1);
    auto* rs = rv->add_subcommand("solve", "tight polynomial for one state and target");
    rs->add_option("--state", o.state)->required();
    rs->add_option("--fidelity", o.fidelity);
    rs->add_option("--degree", o.degree);
    rs->add_option("--gamma", o.gamma);
    rs->add_option("--max-degree", o.max_degree, "raise the degree up to this cap on failure");
    rs->add_option("--density", o.density);

    app.add_subcommand("reproduce-paper", "regenerate the example datasets and a summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return bad_input;
    }

    Context cx;
    cx.opt = o;
    for (const CLI::App* a = &app; !a->get_subcommands().empty();) {
        a = a->get_subcommands().front();
        cx.command += (cx.command.empty() ? "" : " ") + a->get_name();
    }
    cx.info.seed = o.seed;
    cx.info.precision_bits = o.precision;
    cx.info.config_hash = qsl::fnv1a_hex(config_fingerprint(app));

    try {
        return o.precision == 512 ? dispatch<qsl::real512>(cx) : dispatch<qsl::real256>(cx);
    } catch (const qsl::parse_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return bad_input;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return failure;
    }
}
