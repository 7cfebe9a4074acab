#pragma once

// Declarative run configuration (one JSON file, one task).
//
// Parsing is strict: unknown keys, wrong types and out-of-range values all
// raise ConfigError naming the offending field, e.g. "grid.points[0]".

#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "wigneton/propagate.hpp"
#include "wigneton/stationary.hpp"

namespace wigneton {

enum class Task { solve_stationary, evolve, wigner_transform, demo_mra, compress_operator, analyze };

std::string to_string(Task t);
// Throws ConfigError (field "task") for unknown names.
Task parse_task(const std::string& name);

struct InitialState {
    enum class Kind { coherent, field, random, stationary } kind = Kind::coherent;
    double q = 0.0, p = 0.0;       // coherent
    std::filesystem::path path;    // field header
    int mode = 0;                  // stationary: index of the mode
};

struct Packet {
    double q = 0.0, p = 0.0;
    Complex weight = 1.0;
};

struct RunConfig {
    Task task = Task::solve_stationary;
    std::uint64_t seed = 0;
    std::optional<Hamiltonian> hamiltonian;
    int genus = 8;
    LevelRange levels;  // coarse 2, fine 6
    Grid2D grid;        // [-8, 8]^2, 64 x 64

    // solve-stationary
    int n_modes = 5;
    // evolve
    PropagateOptions propagate;
    InitialState initial;
    std::optional<int> time_coarse_level;  // enables scale separation output
    // evolve, wigner-transform, analyze
    std::optional<int> analysis_levels;
    // wigner-transform
    std::vector<Packet> packets;
    double transform_hbar = 1.0;
    // demo-mra
    DemoKind demo_kind = DemoKind::riemann_weierstrass;
    DemoParams demo;
    int demo_coarse_level = 3;
    // compress-operator
    OperatorKind compress_operator = Derivative{1};
    int compress_points = 1024;
    int compress_levels = 6;
    double compress_epsilon = 1e-8;
    double compress_x0 = 0.0, compress_length = 1.0;

    std::filesystem::path output_dir = "out";
    std::set<std::string> formats{"f64", "json"};
    bool plot = false;

    // Directory of the config file; relative paths in the config resolve here.
    std::filesystem::path base_dir;
};

RunConfig parse_config(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
// Reads and parses; throws ConfigError for unreadable or malformed files.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace wigneton
