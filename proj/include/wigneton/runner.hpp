#pragma once

// Run orchestration behind the CLI: load a config, dispatch the task, write
// artifacts atomically and finish with manifest.json.
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure,
// 4 I/O failure, 1 anything unexpected. Failures print one JSON line on the
// error stream: {"status":"error","code":..,"kind":..,"field":..,"message":..}.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "wigneton/run_config.hpp"

namespace wigneton {

struct RunRequest {
    std::string task;  // must match the config's task
    std::filesystem::path config;
    std::optional<std::filesystem::path> out;  // overrides output.dir
    std::optional<std::uint64_t> seed;         // overrides the config seed
};

struct Artifact {
    std::string path;  // relative to the output directory
    std::string sha256;
    std::size_t bytes = 0;
};

// Collects artifacts written under one directory.
class ArtifactWriter {
public:
    // Creates the directory. Throws IoError.
    explicit ArtifactWriter(std::filesystem::path dir);

    const std::filesystem::path& dir() const noexcept { return dir_; }
    const std::vector<Artifact>& artifacts() const noexcept { return artifacts_; }

    void write(const std::string& name, const std::string& bytes);
    void write_json(const std::string& name, const nlohmann::json& j);
    // name.json + name.f64 (format f64), name.csv (csv), name.dat (plot).
    void write_field(const std::string& name, const WignerField& field, const RunConfig& config);
    // Writes manifest.json listing every artifact in path order.
    nlohmann::json finish(const RunConfig& config, const std::string& config_sha256);

private:
    std::filesystem::path dir_;
    std::vector<Artifact> artifacts_;
};

// Runs an already parsed config. Exceptions propagate.
void execute(const RunConfig& config, ArtifactWriter& writer);

// Full pipeline with error classification; returns the exit code.
int run(const RunRequest& request, std::ostream& out, std::ostream& err);

}  // namespace wigneton
