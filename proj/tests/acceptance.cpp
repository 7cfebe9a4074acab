// Acceptance run: one PASS/FAIL line per criterion. Criteria 4 to 10 go
// through the shipped configs and the same runner the CLI uses; criterion 10
// reruns every config and compares bytes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "wigneton/field_io.hpp"
#include "wigneton/operator_compression.hpp"
#include "wigneton/patterns.hpp"
#include "wigneton/runner.hpp"
#include "wigneton/symbol_algebra.hpp"
#include "wigneton/wavelet.hpp"

using namespace wigneton;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr double pi = std::numbers::pi;

const fs::path config_dir = fs::path(WIGNETON_SOURCE_DIR) / "configs";

struct Clock {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

int failures = 0;

void report(int n, bool ok, const std::string& detail) {
    std::printf("criterion %2d: %s  %s\n", n, ok ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(double v, int digits = 3) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// Runs one shipped config into out_root/<stem>; returns wall time or -1.
double run_config(const std::string& stem, const fs::path& out_root) {
    const fs::path cfg = config_dir / (stem + ".json");
    const json j = json::parse(read_file(cfg));
    RunRequest req;
    req.task = j.at("task").get<std::string>();
    req.config = cfg;
    req.out = out_root / stem;
    std::ostringstream out, err;
    Clock c;
    const int code = run(req, out, err);
    if (code != 0) {
        std::printf("  %s exited with %d: %s", stem.c_str(), code, err.str().c_str());
        return -1.0;
    }
    return c.seconds();
}

json read_json(const fs::path& p) { return json::parse(read_file(p)); }

PolySymbol random_poly(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    PolySymbol s;
    for (int i = 0; i <= 4; ++i)
        for (int j = 0; i + j <= 4; ++j) s.add_term(i, j, Complex(u(rng), 0.0));
    return s;
}

void criterion_1() {
    Clock c;
    std::mt19937_64 rng(2024);
    double assoc = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto f = random_poly(rng), g = random_poly(rng), h = random_poly(rng);
        assoc = std::max(assoc, max_coeff_diff(star_product(star_product(f, g, 1.0), h, 1.0),
                                               star_product(f, star_product(g, h, 1.0), 1.0)));
    }
    double canon = 0.0;
    for (double hbar : {0.1, 1.0, 2.0}) {
        const auto q = PolySymbol::q(), p = PolySymbol::p();
        const auto comm = star_product(q, p, hbar) - star_product(p, q, hbar);
        canon = std::max(canon, max_coeff_diff(comm, PolySymbol::monomial(0, 0, Complex(0.0, hbar))));
    }
    const double t = c.seconds();
    report(1, assoc < 1e-12 && canon <= 1e-14 && t < 5.0,
           "associativity " + fmt(assoc) + ", [q,p]* - i hbar " + fmt(canon) + ", " + fmt(t) + " s");
}

void criterion_2() {
    Clock c;
    double recon = 0.0, parseval = 0.0;
    for (int genus = 2; genus <= 12; genus += 2) {
        const auto basis = daubechies_filters(genus);
        for (std::size_t n = 64; n <= 1024; n *= 2)
            for (int levels = 1; levels <= 5; ++levels) {
                std::mt19937_64 rng(genus * 7919 + n + levels);
                std::normal_distribution<double> d;
                std::vector<double> x(n);
                double e = 0.0;
                for (auto& v : x) {
                    v = d(rng);
                    e += v * v;
                }
                const auto mra = dwt_forward(x, basis, levels);
                const auto y = dwt_inverse(mra);
                double diff = 0.0, ec = 0.0;
                for (std::size_t i = 0; i < n; ++i) diff += (y[i] - x[i]) * (y[i] - x[i]);
                for (double v : mra.flatten()) ec += v * v;
                recon = std::max(recon, std::sqrt(diff / e));
                parseval = std::max(parseval, std::abs(ec - e) / e);
            }
    }
    const double t = c.seconds();
    report(2, recon < 1e-12 && parseval < 1e-10 && t < 10.0,
           "reconstruction " + fmt(recon) + ", Parseval " + fmt(parseval) + ", " + fmt(t) + " s");
}

void criterion_3() {
    double sum_rule = 0.0;
    for (int genus : {4, 6, 8, 10}) {
        const auto t = connection_coefficients(daubechies_filters(genus), 0, 1);
        double acc = 0.0;
        for (int l = -t.max_shift(); l <= t.max_shift(); ++l) acc += l * t.at(l);
        sum_rule = std::max(sum_rule, std::abs(acc + 1.0));
    }
    // Cascade quadrature of phi * phi' for the differentiable cases.
    const int level = 13;
    double quad = 0.0;
    for (int genus : {6, 8, 10}) {
        const auto basis = daubechies_filters(genus);
        const auto phi = oracle::cascade(basis.lowpass(), level, 0);
        const auto dphi = oracle::cascade(basis.lowpass(), level, 1);
        const auto t = connection_coefficients(basis, 0, 1);
        const long n = static_cast<long>(phi.size());
        for (int l = -t.max_shift(); l <= t.max_shift(); ++l) {
            const long shift = static_cast<long>(l) << level;
            double acc = 0.0;
            for (long i = 0; i < n; ++i)
                if (i + shift >= 0 && i + shift < n) acc += phi[i] * dphi[i + shift];
            quad = std::max(quad, std::abs(std::ldexp(acc, -level) - t.at(l)));
        }
    }
    // Genus 4 has no pointwise phi', so its table is checked against the
    // known closed form: the fourth-order central difference stencil.
    const auto t4 = connection_coefficients(daubechies_filters(4), 0, 1);
    const std::map<int, double> d4{{-2, -1.0 / 12.0}, {-1, 2.0 / 3.0}, {0, 0.0}, {1, -2.0 / 3.0}, {2, 1.0 / 12.0}};
    double closed = 0.0;
    for (const auto& [l, v] : d4) closed = std::max(closed, std::abs(t4.at(l) - v));
    report(3, sum_rule < 1e-10 && quad < 1e-6 && closed < 1e-10,
           "sum rule " + fmt(sum_rule) + ", quadrature (genus 6-10) " + fmt(quad) + ", genus 4 closed form " +
               fmt(closed));
}

void criterion_4(const fs::path& out) {
    const double t = run_config("ho_stationary", out);
    if (t < 0) return report(4, false, "run failed");
    const json e = read_json(out / "ho_stationary" / "eigenvalues.json");
    double err = 0.0, res = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
        err = std::max(err, std::abs(e["values"][k].get<double>() - (k + 0.5)));
        res = std::max({res, e["residuals"][k].get<double>(), e["imag_residuals"][k].get<double>()});
    }
    const auto m = read_json(out / "ho_stationary" / "manifest.json");
    int modes = 0;
    for (const auto& a : m["artifacts"])
        if (a["path"].get<std::string>().starts_with("mode_") && a["path"].get<std::string>().ends_with(".f64")) ++modes;
    report(4, err < 1e-4 && res < 1e-6 && t < 60.0 && modes == 5,
           "max |eps_k - (k + 1/2)| " + fmt(err) + ", max mode residual " + fmt(res) + ", " + std::to_string(modes) +
               " mode files, " + fmt(t) + " s");
}

void criterion_5(const fs::path& out) {
    if (run_config("quartic_stationary", out) < 0) return report(5, false, "run failed");
    const json e = read_json(out / "quartic_stationary" / "eigenvalues.json");
    const auto ref = oracle::schrodinger_levels([](double x) { return x * x * x * x; }, -4.0, 4.0, 2048, 3);
    double rel = 0.0;
    std::string vals;
    for (int k = 0; k < 3; ++k) {
        const double v = e["values"][k].get<double>();
        rel = std::max(rel, std::abs(v - ref(k)) / ref(k));
        vals += (k ? ", " : "") + fmt(v, 7) + " vs " + fmt(ref(k), 7);
    }
    report(5, rel < 1e-3, "levels " + vals + ", max relative error " + fmt(rel));
}

double rel_l2(const WignerField& a, const WignerField& b) {
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        num += (a.values[i] - b.values[i]) * (a.values[i] - b.values[i]);
        den += b.values[i] * b.values[i];
    }
    return std::sqrt(num / den);
}

void criterion_6(const fs::path& out) {
    if (run_config("ho_evolve", out) < 0) return report(6, false, "run failed");
    const fs::path dir = out / "ho_evolve";
    const json tr = read_json(dir / "trajectory.json");
    const std::size_t last = tr["times"].size() - 1;
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%04zu.json", last);
    const auto w0 = load_field(dir / "snapshot_0000.json");
    const auto w1 = load_field(dir / name);
    const double err = rel_l2(w1, w0);
    const double drift = tr["max_mass_drift"].get<double>();
    const bool period = std::abs(w1.time - 2.0 * pi) < 1e-12 && tr["steps"] == 2000;
    report(6, period && err < 1e-3 && drift < 1e-8,
           "L2 error after 2 pi " + fmt(err) + ", mass drift " + fmt(drift));
}

void criterion_7(const fs::path& out) {
    if (run_config("cat_wigner", out) < 0) return report(7, false, "run failed");
    const json cfg = read_json(config_dir / "cat_wigner.json");
    const auto w = load_field(out / "cat_wigner" / "wigner.json");
    const auto& g = w.grid;
    const double hbar = w.hbar;
    const double a = cfg["params"]["packets"][1]["q"].get<double>();
    const double n2 = 1.0 / (2.0 * (1.0 + std::exp(-a * a / hbar)));
    auto gauss = [&](double x, double c) { return std::pow(pi * hbar, -0.25) * std::exp(-(x - c) * (x - c) / (2.0 * hbar)); };

    double qerr = 0.0, perr = 0.0, mx = 0.0;
    for (std::size_t i = 0; i < g.nq; ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < g.np; ++j) s += w.at(i, j) * g.dp();
        const double psi = gauss(g.q(i), a) + gauss(g.q(i), -a);
        qerr = std::max(qerr, std::abs(s - n2 * psi * psi));
    }
    for (std::size_t j = 0; j < g.np; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < g.nq; ++i) s += w.at(i, j) * g.dq();
        const double p = g.p(j);
        const double exact = 4.0 * n2 * std::pow(std::cos(a * p / hbar), 2) * std::exp(-p * p / hbar) / std::sqrt(pi * hbar);
        perr = std::max(perr, std::abs(s - exact));
    }
    for (double v : w.values) mx = std::max(mx, std::abs(v));
    const double bound = 1.0 / (pi * hbar);

    auto excited = [](std::size_t n) {
        Grid2D sq;
        sq.q0 = sq.p0 = -6.0;
        sq.q1 = sq.p1 = 6.0;
        sq.nq = sq.np = n;
        return negativity_volume(sample_field(sq, 1.0, [](double q, double p) { return oracle::ho_wigner(1, q, p); }));
    };
    const double n64 = excited(64), n128 = excited(128);
    const double change = std::abs(n128 - n64) / n128;
    report(7, qerr < 1e-6 && perr < 1e-6 && mx <= bound + 1e-6 && n64 > 0.1 && change < 0.05,
           "marginals q " + fmt(qerr) + " p " + fmt(perr) + ", max|W| - 1/(pi hbar) " + fmt(mx - bound) +
               ", negativity " + fmt(n64) + " (64) " + fmt(n128) + " (128)");
}

void criterion_8(const fs::path& out) {
    if (run_config("compress_d1", out) < 0) return report(8, false, "run failed");
    const json c = read_json(out / "compress_d1" / "compression.json");
    const double frac = c["retained_fraction"], err = c["max_apply_error_random"];
    const bool setup = c["genus"] == 8 && c["dense_dim"] == 1024 && c["levels"] == 6 && c["epsilon"] == 1e-8;
    report(8, setup && frac <= 0.05 && err < 1e-6,
           "retained fraction " + fmt(frac) + ", apply error on 100 unit vectors " + fmt(err));
}

void criterion_9(const fs::path& out) {
    bool ran = run_config("analyze_ground", out) >= 0;
    ran = run_config("analyze_random", out) >= 0 && ran;
    ran = run_config("kicked_quartic", out) >= 0 && ran;
    if (!ran) return report(9, false, "run failed");
    const json g = read_json(out / "analyze_ground" / "pattern_report.json");
    const json r = read_json(out / "analyze_random" / "pattern_report.json");
    const json k = read_json(out / "kicked_quartic" / "pattern_report.json")["snapshots"].back();
    const bool ok = g["classification"] == "localized_waveleton" && r["classification"] == "chaotic";
    // Only the two calibrated cases carry a class assertion; the kicked
    // quartic is reported with its metrics.
    report(9, ok,
           "ground " + g["classification"].get<std::string>() + ", random " + r["classification"].get<std::string>() +
               " (entropy " + fmt(r["scale_entropy"]) + "); kicked quartic t=" + fmt(k["time"]) + " " +
               k["classification"].get<std::string>() + " (radius " + fmt(k["localization_radius"]) + " of diameter " +
               fmt(k["domain_diameter"]) + ", top2 " + fmt(k["top2_share"]) + ", negativity " +
               fmt(k["negativity_volume"]) + ", not asserted)");
}

void criterion_10(const fs::path& first, const fs::path& second) {
    std::vector<std::string> stems;
    for (const auto& e : fs::directory_iterator(config_dir))
        if (e.path().extension() == ".json") stems.push_back(e.path().stem().string());
    std::sort(stems.begin(), stems.end());
    std::size_t payloads = 0;
    std::vector<std::string> mismatched;
    for (const auto& s : stems) {
        if (!fs::exists(first / s / "manifest.json") && run_config(s, first) < 0) {
            mismatched.push_back(s + " (run failed)");
            continue;
        }
        if (run_config(s, second) < 0) {
            mismatched.push_back(s + " (rerun failed)");
            continue;
        }
        const std::string ma = read_file(first / s / "manifest.json");
        const std::string mb = read_file(second / s / "manifest.json");
        if (sha256_hex(ma) != sha256_hex(mb)) mismatched.push_back(s + "/manifest.json");
        const json manifest = json::parse(ma);
        for (const auto& a : manifest["artifacts"]) {
            const std::string p = a["path"];
            if (!p.ends_with(".f64")) continue;
            ++payloads;
            if (read_file(first / s / p) != read_file(second / s / p)) mismatched.push_back(s + "/" + p);
        }
    }
    std::string detail = std::to_string(stems.size()) + " configs, " + std::to_string(payloads) + " payloads";
    for (const auto& m : mismatched) detail += ", differs: " + m;
    report(10, mismatched.empty() && payloads > 0, detail);
}

}  // namespace

int main() {
    const fs::path root = fs::temp_directory_path() / ("wigneton_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    const fs::path first = root / "first", second = root / "second";

    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4(first);
    criterion_5(first);
    criterion_6(first);
    criterion_7(first);
    criterion_8(first);
    criterion_9(first);
    criterion_10(first, second);

    std::error_code ec;
    fs::remove_all(root, ec);
    std::printf("%d of 10 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
