#include "wigneton/runner.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "wigneton/errors.hpp"
#include "wigneton/field_io.hpp"
#include "wigneton/patterns.hpp"
#include "wigneton/scale_separation.hpp"

namespace wigneton {

namespace fs = std::filesystem;
using nlohmann::json;

ArtifactWriter::ArtifactWriter(fs::path dir) : dir_(std::move(dir)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) throw IoError("cannot create output directory " + dir_.string());
}

void ArtifactWriter::write(const std::string& name, const std::string& bytes) {
    write_atomic(dir_ / name, bytes);
    artifacts_.push_back({name, sha256_hex(bytes), bytes.size()});
}

void ArtifactWriter::write_json(const std::string& name, const json& j) { write(name, dump_json(j)); }

void ArtifactWriter::write_field(const std::string& name, const WignerField& field, const RunConfig& config) {
    if (config.formats.count("f64")) {
        write(name + ".f64", encode_f64(field.values));
        write_json(name + ".json", field_header(field, name + ".f64"));
    }
    if (config.formats.count("csv")) write(name + ".csv", field_csv(field));
    if (config.plot) write(name + ".dat", plot_blocks(field));
}

json ArtifactWriter::finish(const RunConfig& config, const std::string& config_sha256) {
    auto list = artifacts_;
    std::sort(list.begin(), list.end(), [](const Artifact& a, const Artifact& b) { return a.path < b.path; });
    json m;
    m["task"] = to_string(config.task);
    m["seed"] = config.seed;
    m["config_sha256"] = config_sha256;
    m["artifacts"] = json::array();
    for (const auto& a : list) m["artifacts"].push_back({{"path", a.path}, {"sha256", a.sha256}, {"bytes", a.bytes}});
    write_atomic(dir_ / "manifest.json", dump_json(m));
    return m;
}

namespace {

std::string numbered(const std::string& stem, std::size_t k, int width) {
    std::string digits = std::to_string(k);
    if (static_cast<int>(digits.size()) < width) digits.insert(0, static_cast<std::size_t>(width) - digits.size(), '0');
    return stem + "_" + digits;
}

StationaryResult stationary(const RunConfig& c, int n_modes) {
    const auto basis = daubechies_filters(c.genus);
    const auto ops = assemble_stationary(*c.hamiltonian, basis, c.levels, c.grid);
    StationaryOptions opt;
    opt.eigen.seed = c.seed ^ 0x5eedULL;
    return solve_stationary(ops, n_modes, opt);
}

json stationary_json(const StationaryResult& r, double hbar) {
    json j;
    j["hbar"] = hbar;
    j["values"] = r.eigenvalues;
    j["residuals"] = r.residuals;
    j["imag_residuals"] = r.imag_residuals;
    json flags = json::array();
    for (bool f : r.flagged) flags.push_back(f);
    j["flagged"] = flags;
    j["cluster_sizes"] = r.cluster_sizes;
    j["rejected_eigenvalues"] = r.rejected_eigenvalues;
    j["eigenpairs_computed"] = r.eigenpairs_computed;
    j["asymmetry"] = r.asymmetry;
    return j;
}

WignerField initial_field(const RunConfig& c, double hbar) {
    switch (c.initial.kind) {
        case InitialState::Kind::coherent: return coherent_state(c.grid, hbar, c.initial.q, c.initial.p);
        case InitialState::Kind::random: return random_field(c.grid, c.seed, hbar);
        case InitialState::Kind::field: {
            auto w = load_field(c.initial.path);
            try {
                w.grid.validate();
            } catch (const std::invalid_argument& e) {
                throw ConfigError("params.initial.path", std::string("params.initial.path: ") + e.what());
            }
            return w;
        }
        case InitialState::Kind::stationary: {
            const auto r = stationary(c, c.initial.mode + 1);
            return r.modes[static_cast<std::size_t>(c.initial.mode)];
        }
    }
    throw ConfigError("params.initial", "params.initial: unsupported kind");
}

void run_stationary(const RunConfig& c, ArtifactWriter& w) {
    const auto r = stationary(c, c.n_modes);
    if (c.formats.count("json")) w.write_json("eigenvalues.json", stationary_json(r, c.hamiltonian->hbar));
    const int width = r.modes.size() > 9 ? 2 : 1;
    for (std::size_t k = 0; k < r.modes.size(); ++k) w.write_field(numbered("mode", k, width), r.modes[k], c);
}

void run_evolve(const RunConfig& c, ArtifactWriter& w) {
    const auto& h = *c.hamiltonian;
    const auto basis = daubechies_filters(c.genus);
    const WignerField w0 = initial_field(c, h.hbar);
    if (std::abs(w0.hbar - h.hbar) > 1e-15 * h.hbar)
        throw ConfigError("params.initial.path", "params.initial.path: field hbar differs from hamiltonian.hbar");
    const auto traj = propagate(w0, h, basis, c.propagate);

    const int width = std::max(4, static_cast<int>(std::to_string(traj.snapshots.size()).size()));
    json times = json::array(), masses = json::array();
    for (std::size_t k = 0; k < traj.snapshots.size(); ++k) {
        w.write_field(numbered("snapshot", k, width), traj.snapshots[k], c);
        times.push_back(traj.snapshots[k].time);
        masses.push_back(traj.snapshots[k].integral());
    }
    if (c.formats.count("json")) {
        json j;
        j["times"] = times;
        j["mass"] = masses;
        j["steps"] = traj.steps;
        j["kicks_applied"] = traj.kicks_applied;
        j["max_mass_drift"] = traj.max_mass_drift;
        j["spectral_bound"] = traj.spectral_bound;
        j["scheme"] = c.propagate.scheme == Scheme::rk4 ? "rk4" : "implicit_midpoint";
        w.write_json("trajectory.json", j);
    }
    if (c.time_coarse_level) {
        const auto s = scale_separate(traj.snapshots, basis, c.levels.transform_levels(), *c.time_coarse_level);
        json j;
        j["spatial_levels"] = s.spatial_levels;
        j["time_coarse_level"] = s.time_coarse_level;
        j["samples"] = s.times.size();
        j["slow_energy"] = s.slow_energy();
        j["fast_energy"] = s.fast_energy();
        j["dominant_omega"] = s.dominant_omega;
        j["reconstruction_error"] = s.reconstruction_error;
        json levels = json::array();
        for (const auto& f : s.fast)
            levels.push_back({{"level", f.level}, {"dominant_bin", f.dominant_bin}, {"omega", f.omega},
                              {"in_band", f.in_band}, {"energy", f.energy}});
        j["fast"] = levels;
        json amp = json::array();
        for (Eigen::Index i = 0; i < s.amplitudes.rows(); ++i) {
            json row = json::array();
            for (Eigen::Index k = 0; k < s.amplitudes.cols(); ++k) row.push_back(s.amplitudes(i, k));
            amp.push_back(row);
        }
        j["amplitudes"] = amp;
        w.write_json("scale_separation.json", j);
    }
    if (c.analysis_levels) {
        const auto rep = analyze(traj.snapshots, basis, *c.analysis_levels);
        w.write_json("pattern_report.json", to_json(rep));
        if (c.plot) w.write("pattern_report.dat", plot_blocks(rep.summary));
    }
}

void run_wigner_transform(const RunConfig& c, ArtifactWriter& w) {
    const double hbar = c.transform_hbar;
    const std::size_t n = c.grid.nq;
    const double dq = c.grid.dq();
    std::vector<Complex> psi(n, 0.0);
    for (const auto& pk : c.packets)
        for (std::size_t i = 0; i < n; ++i) {
            const double x = c.grid.q(i);
            psi[i] += pk.weight * std::pow(std::numbers::pi * hbar, -0.25) *
                      std::exp(-(x - pk.q) * (x - pk.q) / (2.0 * hbar)) * std::polar(1.0, pk.p * x / hbar);
        }
    const auto r = wigner_transform(psi, c.grid.q0, dq, hbar);
    w.write_field("wigner", r.field, c);
    if (c.formats.count("json")) {
        double mx = 0.0;
        for (double v : r.field.values) mx = std::max(mx, std::abs(v));
        json j;
        j["input_norm"] = r.input_norm;
        j["renormalized"] = r.renormalized;
        j["max_abs"] = mx;
        j["pure_state_bound"] = 1.0 / (std::numbers::pi * hbar);
        j["integral"] = r.field.integral();
        j["negativity_volume"] = negativity_volume(r.field);
        w.write_json("transform.json", j);
    }
    if (c.analysis_levels) {
        const auto rep = analyze(r.field, daubechies_filters(c.genus), *c.analysis_levels);
        w.write_json("pattern_report.json", to_json(rep));
        if (c.plot) w.write("pattern_report.dat", plot_blocks(rep));
    }
}

void run_demo_mra(const RunConfig& c, ArtifactWriter& w) {
    const auto signal = demo_signal(c.demo_kind, c.demo);
    const auto parts = mra_components(signal, daubechies_filters(c.genus), c.demo_coarse_level);
    std::string csv = "x,signal";
    for (std::size_t k = 0; k < parts.size(); ++k) csv += ",delta_" + std::to_string(k);
    csv += '\n';
    for (std::size_t i = 0; i < signal.size(); ++i) {
        csv += format_double(static_cast<double>(i) / static_cast<double>(signal.size()));
        csv += ',';
        csv += format_double(signal[i]);
        for (const auto& p : parts) {
            csv += ',';
            csv += format_double(p[i]);
        }
        csv += '\n';
    }
    w.write("demo_mra.csv", csv);
}

void run_compress(const RunConfig& c, ArtifactWriter& w) {
    const auto basis = daubechies_filters(c.genus);
    const PeriodicGrid1D grid{c.compress_x0, c.compress_length, static_cast<std::size_t>(c.compress_points)};
    const Eigen::MatrixXd dense = assemble_1d_operator(c.compress_operator, basis, grid);
    const auto ns = to_nonstandard_form(dense, basis, c.compress_levels);
    const auto comp = threshold_compress(ns, c.compress_epsilon);

    std::mt19937_64 rng(c.seed);
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Eigen::VectorXd v(dense.rows());
        for (Eigen::Index k = 0; k < v.size(); ++k) v[k] = static_cast<double>(rng() >> 11) * 0x1.0p-53 - 0.5;
        v.normalize();
        worst = std::max(worst, (apply(comp.matrix, v) - dense * v).norm());
    }
    json j;
    j["genus"] = c.genus;
    j["dense_dim"] = comp.stats.dense_dim;
    j["levels"] = c.compress_levels;
    j["epsilon"] = comp.stats.epsilon;
    j["retained_entries"] = comp.stats.retained_entries;
    j["retained_fraction"] = comp.stats.retained_fraction;
    j["max_apply_error_bound"] = comp.stats.max_apply_error_bound;
    j["max_apply_error_random"] = worst;
    w.write_json("compression.json", j);
}

void run_analyze(const RunConfig& c, ArtifactWriter& w) {
    const double hbar = c.hamiltonian ? c.hamiltonian->hbar : 1.0;
    const auto field = initial_field(c, hbar);
    w.write_field("field", field, c);
    const auto rep = analyze(field, daubechies_filters(c.genus), *c.analysis_levels);
    w.write_json("pattern_report.json", to_json(rep));
    if (c.plot) w.write("pattern_report.dat", plot_blocks(rep));
}

void diagnostic(std::ostream& err, int code, const std::string& kind, const std::string& field,
                const std::string& message) {
    json j;
    j["status"] = "error";
    j["code"] = code;
    j["kind"] = kind;
    j["field"] = field;
    j["message"] = message;
    err << j.dump() << std::endl;
}

}  // namespace

void execute(const RunConfig& config, ArtifactWriter& writer) {
    switch (config.task) {
        case Task::solve_stationary: run_stationary(config, writer); break;
        case Task::evolve: run_evolve(config, writer); break;
        case Task::wigner_transform: run_wigner_transform(config, writer); break;
        case Task::demo_mra: run_demo_mra(config, writer); break;
        case Task::compress_operator: run_compress(config, writer); break;
        case Task::analyze: run_analyze(config, writer); break;
    }
}

int run(const RunRequest& request, std::ostream& out, std::ostream& err) {
    try {
        RunConfig config = load_config(request.config);
        if (!request.task.empty() && parse_task(request.task) != config.task)
            throw ConfigError("task", "task: command line says '" + request.task + "' but the config says '" +
                                          to_string(config.task) + "'");
        if (request.seed) config.seed = *request.seed;
        if (request.out) config.output_dir = *request.out;
        const std::string config_sha = sha256_hex(read_file(request.config));

        ArtifactWriter writer(config.output_dir);
        execute(config, writer);
        const auto manifest = writer.finish(config, config_sha);
        json ok;
        ok["status"] = "ok";
        ok["task"] = to_string(config.task);
        ok["manifest"] = (config.output_dir / "manifest.json").string();
        ok["artifacts"] = manifest["artifacts"].size();
        out << ok.dump() << std::endl;
        return 0;
    } catch (const ConfigError& e) {
        diagnostic(err, 2, "config", e.field(), e.what());
        return 2;
    } catch (const nlohmann::json::exception& e) {
        diagnostic(err, 2, "config", "", e.what());
        return 2;
    } catch (const NumericalError& e) {
        diagnostic(err, 3, "numerical", "", e.what());
        return 3;
    } catch (const IoError& e) {
        diagnostic(err, 4, "io", "", e.what());
        return 4;
    } catch (const fs::filesystem_error& e) {
        diagnostic(err, 4, "io", "", e.what());
        return 4;
    } catch (const std::invalid_argument& e) {
        // Library preconditions violated by config values (e.g. more modes
        // than grid points, levels that do not divide the grid).
        diagnostic(err, 2, "config", "params", e.what());
        return 2;
    } catch (const std::exception& e) {
        diagnostic(err, 1, "internal", "", e.what());
        return 1;
    }
}

}  // namespace wigneton
