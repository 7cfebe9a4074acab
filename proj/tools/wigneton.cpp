// wigneton <task> --config <path> [--out <dir>] [--seed <u64>]

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "wigneton/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Wavelet-Galerkin Wigner-function solver"};
    app.set_version_flag("--version", "wigneton 1.0");

    wigneton::RunRequest request;
    std::string config, out;
    std::uint64_t seed = 0;
    app.add_option("task", request.task, "solve-stationary | evolve | wigner-transform | demo-mra | compress-operator | analyze")
        ->required();
    app.add_option("--config", config, "run configuration (JSON)")->required();
    auto* out_opt = app.add_option("--out", out, "output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "random seed (overrides the config seed)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        const nlohmann::json diag{{"status", "error"}, {"code", 2}, {"kind", "usage"}, {"field", ""}, {"message", e.what()}};
        std::cerr << diag.dump() << std::endl;
        return 2;
    }
    request.config = config;
    if (*out_opt) request.out = out;
    if (*seed_opt) request.seed = seed;
    return wigneton::run(request, std::cout, std::cerr);
}
