#include "wigneton/run_config.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "wigneton/errors.hpp"

namespace wigneton {

namespace {

using nlohmann::json;

// Cursor over one JSON object: typed getters with field paths, and a final
// check that every key present was consumed.
class Obj {
public:
    Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) fail(path_, "must be an object");
    }

    [[noreturn]] static void fail(const std::string& field, const std::string& msg) {
        throw ConfigError(field, field + ": " + msg);
    }
    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& raw(const std::string& key) {
        if (!j_.contains(key)) fail(field(key), "required");
        used_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_number()) fail(field(key), "must be a number");
        const double d = v.get<double>();
        if (!std::isfinite(d)) fail(field(key), "must be finite");
        return d;
    }
    double number(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    long long integer(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_number_integer()) fail(field(key), "must be an integer");
        return v.get<long long>();
    }
    long long integer(const std::string& key, long long fallback) { return has(key) ? integer(key) : fallback; }

    std::string string(const std::string& key) {
        const auto& v = raw(key);
        if (!v.is_string()) fail(field(key), "must be a string");
        return v.get<std::string>();
    }
    std::string string(const std::string& key, const std::string& fallback) { return has(key) ? string(key) : fallback; }

    bool boolean(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = raw(key);
        if (!v.is_boolean()) fail(field(key), "must be true or false");
        return v.get<bool>();
    }

    Obj object(const std::string& key) { return Obj(raw(key), field(key)); }

    void finish() const {
        for (const auto& [key, value] : j_.items()) {
            (void)value;
            if (!used_.count(key)) fail(field(key), "unknown key");
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

double element_number(const json& v, const std::string& field) {
    if (!v.is_number()) Obj::fail(field, "must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) Obj::fail(field, "must be finite");
    return d;
}

long long element_integer(const json& v, const std::string& field) {
    if (!v.is_number_integer()) Obj::fail(field, "must be an integer");
    return v.get<long long>();
}

const json& array_of(const json& v, const std::string& field, std::size_t size = 0) {
    if (!v.is_array()) Obj::fail(field, "must be an array");
    if (size && v.size() != size) Obj::fail(field, "must have " + std::to_string(size) + " elements");
    return v;
}

// [[i, j, re], [i, j, re, im], ...] with coefficient of p^i q^j.
PolySymbol parse_symbol(const json& v, const std::string& field) {
    array_of(v, field);
    PolySymbol s;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const std::string f = field + "[" + std::to_string(k) + "]";
        const auto& t = array_of(v[k], f);
        if (t.size() != 3 && t.size() != 4) Obj::fail(f, "must be [i, j, coeff] or [i, j, re, im]");
        const long long i = element_integer(t[0], f + "[0]");
        const long long jj = element_integer(t[1], f + "[1]");
        if (i < 0 || i > 16) Obj::fail(f + "[0]", "power of p must be in 0..16");
        if (jj < 0 || jj > 16) Obj::fail(f + "[1]", "power of q must be in 0..16");
        const double re = element_number(t[2], f + "[2]");
        const double im = t.size() == 4 ? element_number(t[3], f + "[3]") : 0.0;
        s.add_term(static_cast<int>(i), static_cast<int>(jj), Complex(re, im));
    }
    return s;
}

Hamiltonian parse_hamiltonian(Obj o) {
    Hamiltonian h;
    h.base = parse_symbol(o.raw("terms"), o.field("terms"));
    if (!h.base.is_real()) Obj::fail(o.field("terms"), "coefficients must be real");
    h.hbar = o.number("hbar", 1.0);
    if (!(h.hbar > 0.0)) Obj::fail(o.field("hbar"), "must be positive");
    if (o.has("kicks")) {
        const auto& ks = array_of(o.raw("kicks"), o.field("kicks"));
        for (std::size_t k = 0; k < ks.size(); ++k) {
            Obj ko(ks[k], o.field("kicks") + "[" + std::to_string(k) + "]");
            Kick kick;
            kick.period = ko.number("period");
            if (!(kick.period > 0.0)) Obj::fail(ko.field("period"), "must be positive");
            kick.symbol = parse_symbol(ko.raw("symbol"), ko.field("symbol"));
            if (!kick.symbol.is_real()) Obj::fail(ko.field("symbol"), "coefficients must be real");
            if (kick.symbol.degree_p() > 0 && kick.symbol.degree_q() > 0)
                Obj::fail(ko.field("symbol"), "must depend on q only or on p only");
            ko.finish();
            h.kicks.push_back(std::move(kick));
        }
    }
    o.finish();
    return h;
}

void parse_grid(Obj o, RunConfig& c) {
    auto range = [&](const char* key, double& lo, double& hi) {
        if (!o.has(key)) return;
        const std::string f = o.field(key);
        const auto& r = array_of(o.raw(key), f, 2);
        lo = element_number(r[0], f + "[0]");
        hi = element_number(r[1], f + "[1]");
        if (!(hi > lo)) Obj::fail(f, "max must exceed min");
    };
    range("q", c.grid.q0, c.grid.q1);
    range("p", c.grid.p0, c.grid.p1);
    if (o.has("points")) {
        const std::string f = o.field("points");
        const auto& pts = array_of(o.raw("points"), f, 2);
        for (int k = 0; k < 2; ++k) {
            const std::string fk = f + "[" + std::to_string(k) + "]";
            const long long n = element_integer(pts[static_cast<std::size_t>(k)], fk);
            if (n < 4 || n > (1 << 14) || !std::has_single_bit(static_cast<unsigned long long>(n)))
                Obj::fail(fk, "must be a power of two in 4..16384, got " + std::to_string(n));
            (k == 0 ? c.grid.nq : c.grid.np) = static_cast<std::size_t>(n);
        }
    }
    o.finish();
}

InitialState parse_initial(Obj o, const std::filesystem::path& base) {
    InitialState s;
    const std::string kind = o.string("kind");
    if (kind == "coherent") {
        s.kind = InitialState::Kind::coherent;
        s.q = o.number("q", 0.0);
        s.p = o.number("p", 0.0);
    } else if (kind == "field") {
        s.kind = InitialState::Kind::field;
        s.path = base / o.string("path");
    } else if (kind == "random") {
        s.kind = InitialState::Kind::random;
    } else if (kind == "stationary") {
        s.kind = InitialState::Kind::stationary;
        const long long m = o.integer("mode", 0);
        if (m < 0 || m > 64) Obj::fail(o.field("mode"), "must be in 0..64");
        s.mode = static_cast<int>(m);
    } else {
        Obj::fail(o.field("kind"), "must be one of coherent, field, random, stationary");
    }
    o.finish();
    return s;
}

int small_level(Obj& o, const std::string& key, long long lo, long long hi) {
    const long long v = o.integer(key);
    if (v < lo || v > hi) Obj::fail(o.field(key), "must be in " + std::to_string(lo) + ".." + std::to_string(hi));
    return static_cast<int>(v);
}

void parse_params(Obj o, RunConfig& c) {
    switch (c.task) {
        case Task::solve_stationary: {
            const long long n = o.integer("n_modes", 5);
            if (n < 1 || n > 64) Obj::fail(o.field("n_modes"), "must be in 1..64");
            c.n_modes = static_cast<int>(n);
            break;
        }
        case Task::evolve: {
            c.propagate.t_end = o.number("t_end");
            if (!(c.propagate.t_end > 0.0)) Obj::fail(o.field("t_end"), "must be positive");
            c.propagate.dt = o.number("dt");
            if (!(c.propagate.dt > 0.0)) Obj::fail(o.field("dt"), "must be positive");
            if (c.propagate.t_end / c.propagate.dt > 1e7) Obj::fail(o.field("dt"), "more than 1e7 steps");
            const std::string scheme = o.string("scheme", "implicit_midpoint");
            if (scheme == "rk4") c.propagate.scheme = Scheme::rk4;
            else if (scheme == "implicit_midpoint") c.propagate.scheme = Scheme::implicit_midpoint;
            else Obj::fail(o.field("scheme"), "must be rk4 or implicit_midpoint");
            const long long stride = o.integer("stride", 1);
            if (stride < 1 || stride > (1 << 30)) Obj::fail(o.field("stride"), "must be a positive integer");
            c.propagate.stride = static_cast<int>(stride);
            if (o.has("initial")) c.initial = parse_initial(o.object("initial"), c.base_dir);
            if (c.initial.kind == InitialState::Kind::stationary)
                Obj::fail(o.field("initial.kind"), "stationary initial states are only available to analyze");
            if (o.has("time_coarse_level")) c.time_coarse_level = small_level(o, "time_coarse_level", 0, 20);
            if (o.has("analysis_levels")) c.analysis_levels = small_level(o, "analysis_levels", 1, 12);
            break;
        }
        case Task::wigner_transform: {
            c.transform_hbar = o.number("hbar", 1.0);
            if (!(c.transform_hbar > 0.0)) Obj::fail(o.field("hbar"), "must be positive");
            const auto& ps = array_of(o.raw("packets"), o.field("packets"));
            if (ps.empty()) Obj::fail(o.field("packets"), "must not be empty");
            for (std::size_t k = 0; k < ps.size(); ++k) {
                Obj po(ps[k], o.field("packets") + "[" + std::to_string(k) + "]");
                Packet p;
                p.q = po.number("q", 0.0);
                p.p = po.number("p", 0.0);
                if (po.has("weight")) {
                    const std::string f = po.field("weight");
                    const auto& w = po.raw("weight");
                    if (w.is_number()) p.weight = element_number(w, f);
                    else {
                        array_of(w, f, 2);
                        p.weight = Complex(element_number(w[0], f + "[0]"), element_number(w[1], f + "[1]"));
                    }
                }
                po.finish();
                c.packets.push_back(p);
            }
            if (o.has("analysis_levels")) c.analysis_levels = small_level(o, "analysis_levels", 1, 12);
            break;
        }
        case Task::demo_mra: {
            Obj s = o.object("signal");
            const std::string kind = s.string("kind");
            if (kind == "kick") c.demo_kind = DemoKind::kick;
            else if (kind == "multikick") c.demo_kind = DemoKind::multikick;
            else if (kind == "riemann-weierstrass") c.demo_kind = DemoKind::riemann_weierstrass;
            else Obj::fail(s.field("kind"), "must be kick, multikick or riemann-weierstrass");
            const long long len = s.integer("length", 512);
            if (len < 4 || len > (1 << 20) || !std::has_single_bit(static_cast<unsigned long long>(len)))
                Obj::fail(s.field("length"), "must be a power of two in 4..2^20");
            c.demo.length = static_cast<std::size_t>(len);
            c.demo.center = s.number("center", c.demo.center);
            c.demo.width = s.number("width", c.demo.width);
            if (!(c.demo.width > 0.0)) Obj::fail(s.field("width"), "must be positive");
            const long long period = s.integer("period", static_cast<long long>(c.demo.period));
            if (period < 1) Obj::fail(s.field("period"), "must be positive");
            c.demo.period = static_cast<std::size_t>(period);
            c.demo.amplitude_ratio = s.number("amplitude_ratio", c.demo.amplitude_ratio);
            c.demo.frequency_ratio = s.number("frequency_ratio", c.demo.frequency_ratio);
            const long long terms = s.integer("terms", c.demo.terms);
            if (terms < 1 || terms > 64) Obj::fail(s.field("terms"), "must be in 1..64");
            c.demo.terms = static_cast<int>(terms);
            s.finish();
            const int top = std::bit_width(c.demo.length) - 1;
            c.demo_coarse_level = o.has("coarse_level") ? small_level(o, "coarse_level", 0, top - 1) : std::min(3, top - 1);
            break;
        }
        case Task::compress_operator: {
            Obj op = o.object("operator");
            const std::string kind = op.string("kind");
            if (kind == "derivative") {
                const long long order = op.integer("order", 1);
                if (order < 1 || order > 8) Obj::fail(op.field("order"), "must be in 1..8");
                c.compress_operator = Derivative{static_cast<int>(order)};
            } else if (kind == "multiply-x") {
                c.compress_operator = MultiplyByX{};
            } else {
                Obj::fail(op.field("kind"), "must be derivative or multiply-x");
            }
            op.finish();
            const long long pts = o.integer("points", 1024);
            if (pts < 4 || pts > 4096 || !std::has_single_bit(static_cast<unsigned long long>(pts)))
                Obj::fail(o.field("points"), "must be a power of two in 4..4096");
            c.compress_points = static_cast<int>(pts);
            const int top = std::bit_width(static_cast<unsigned long long>(pts)) - 1;
            c.compress_levels = o.has("levels") ? small_level(o, "levels", 1, top) : std::min(6, top);
            c.compress_epsilon = o.number("epsilon", 1e-8);
            if (c.compress_epsilon < 0.0) Obj::fail(o.field("epsilon"), "must be nonnegative");
            if (o.has("domain")) {
                const std::string f = o.field("domain");
                const auto& d = array_of(o.raw("domain"), f, 2);
                c.compress_x0 = element_number(d[0], f + "[0]");
                const double x1 = element_number(d[1], f + "[1]");
                if (!(x1 > c.compress_x0)) Obj::fail(f, "max must exceed min");
                c.compress_length = x1 - c.compress_x0;
            }
            break;
        }
        case Task::analyze: {
            c.initial = parse_initial(o.object("source"), c.base_dir);
            c.analysis_levels = o.has("analysis_levels") ? small_level(o, "analysis_levels", 1, 12) : 4;
            break;
        }
    }
    o.finish();
}

}  // namespace

std::string to_string(Task t) {
    switch (t) {
        case Task::solve_stationary: return "solve-stationary";
        case Task::evolve: return "evolve";
        case Task::wigner_transform: return "wigner-transform";
        case Task::demo_mra: return "demo-mra";
        case Task::compress_operator: return "compress-operator";
        case Task::analyze: return "analyze";
    }
    return "";
}

Task parse_task(const std::string& name) {
    for (Task t : {Task::solve_stationary, Task::evolve, Task::wigner_transform, Task::demo_mra,
                   Task::compress_operator, Task::analyze})
        if (to_string(t) == name) return t;
    throw ConfigError("task", "task: unknown task '" + name + "'");
}

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    RunConfig c;
    c.base_dir = base_dir;
    Obj root(j, "");
    c.task = parse_task(root.string("task"));

    if (root.has("seed")) {
        const auto& s = root.raw("seed");
        if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
            Obj::fail("seed", "must be a nonnegative integer");
        c.seed = s.get<std::uint64_t>();
    }
    if (root.has("hamiltonian")) c.hamiltonian = parse_hamiltonian(root.object("hamiltonian"));

    if (root.has("basis")) {
        Obj b = root.object("basis");
        if (b.string("family", "daubechies") != "daubechies") Obj::fail("basis.family", "only daubechies is supported");
        const long long g = b.integer("genus", 8);
        if (g < 2 || g > 20 || g % 2) Obj::fail("basis.genus", "must be even in 2..20");
        c.genus = static_cast<int>(g);
        b.finish();
    }
    if (root.has("grid")) parse_grid(root.object("grid"), c);
    if (root.has("levels")) {
        Obj l = root.object("levels");
        c.levels.coarse = static_cast<int>(l.integer("coarse", c.levels.coarse));
        c.levels.fine = static_cast<int>(l.integer("fine", c.levels.fine));
        l.finish();
    }
    // Levels must fit the grid: coarse < fine <= log2(min points).
    const int top = std::bit_width(std::min(c.grid.nq, c.grid.np)) - 1;
    if (c.levels.coarse < 0) Obj::fail("levels.coarse", "must be nonnegative");
    if (c.levels.fine <= c.levels.coarse) Obj::fail("levels.fine", "must exceed levels.coarse");
    if (c.levels.fine > top)
        Obj::fail("levels.fine", "must not exceed log2 of the smallest grid dimension (" + std::to_string(top) + ")");

    const bool needs_h = c.task == Task::solve_stationary || c.task == Task::evolve;
    if (needs_h && !c.hamiltonian) Obj::fail("hamiltonian", "required for task " + to_string(c.task));
    if (c.task == Task::solve_stationary && c.hamiltonian && !c.hamiltonian->kicks.empty())
        Obj::fail("hamiltonian.kicks", "not allowed for solve-stationary");

    if (root.has("params")) parse_params(root.object("params"), c);
    else if (c.task == Task::evolve || c.task == Task::wigner_transform || c.task == Task::demo_mra ||
             c.task == Task::analyze)
        Obj::fail("params", "required for task " + to_string(c.task));

    if (c.task == Task::analyze && c.initial.kind == InitialState::Kind::stationary && !c.hamiltonian)
        Obj::fail("hamiltonian", "required for a stationary source");
    if (c.analysis_levels && (*c.analysis_levels > top))
        Obj::fail("params.analysis_levels", "must not exceed log2 of the smallest grid dimension");
    if (c.task == Task::wigner_transform && c.analysis_levels &&
        *c.analysis_levels > static_cast<int>(std::bit_width(c.grid.nq)) - 1)
        Obj::fail("params.analysis_levels", "must not exceed log2(grid.points[0])");

    Obj out = root.object("output");
    c.output_dir = c.base_dir / out.string("dir", "out");
    if (out.has("formats")) {
        const auto& f = array_of(out.raw("formats"), "output.formats");
        c.formats.clear();
        for (std::size_t k = 0; k < f.size(); ++k) {
            const std::string fk = "output.formats[" + std::to_string(k) + "]";
            if (!f[k].is_string()) Obj::fail(fk, "must be a string");
            const auto name = f[k].get<std::string>();
            if (name != "csv" && name != "f64" && name != "json") Obj::fail(fk, "must be csv, f64 or json");
            c.formats.insert(name);
        }
        if (c.formats.empty()) Obj::fail("output.formats", "must not be empty");
    }
    c.plot = out.boolean("plot", false);
    out.finish();
    root.finish();
    return c;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config", "config: cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(ss.str());
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError("config", std::string("config: ") + e.what());
    }
    return parse_config(j, path.parent_path());
}

}  // namespace wigneton
