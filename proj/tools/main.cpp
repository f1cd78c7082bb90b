// orchard-duo <simulate|r0|sensitivity|optimize> --config <path> --out <dir> [--seed N] [--threads K]

#include "orchard_duo/config.hpp"
#include "orchard_duo/dispatch.hpp"
#include "orchard_duo/errors.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace od = orchard_duo;

namespace {

int exit_code_for(const std::exception& e)
{
    const auto* err = dynamic_cast<const od::Error*>(&e);
    if (!err) {
        return 1;
    }
    switch (err->code()) {
    case od::ErrorCode::ParseError:
    case od::ErrorCode::ValidationError:
    case od::ErrorCode::ConfigInvalid:
        return 2;
    case od::ErrorCode::IoError:
        return 3;
    default:
        return 1;
    }
}

unsigned threads_from_env()
{
    const char* env = std::getenv("ORCHARD_DUO_THREADS");
    if (!env || !*env) {
        return 1;
    }
    try {
        const long v = std::stol(env);
        return v > 0 ? static_cast<unsigned>(v) : 1u;
    } catch (...) {
        return 1;
    }
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Two-orchard HLB / psyllid dispersal model"};
    app.set_version_flag("--version", std::string(od::tool_version()));
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;

    for (const char* name : {"simulate", "r0", "sensitivity", "optimize"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", config_path, "JSON config (empty object for baseline)");
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--seed", seed, "RNG seed, overrides the config");
        sub->add_option("--threads", threads, "worker threads (default: $ORCHARD_DUO_THREADS or 1)")
            ->check(CLI::PositiveNumber);
    }

    CLI11_PARSE(app, argc, argv);
    const std::string command = app.get_subcommands().front()->get_name();

    try {
        const od::RunConfig cfg = config_path.empty() ? od::config_from_json(nlohmann::json::object())
                                                      : od::load_config(config_path);
        od::DispatchOptions opts;
        opts.seed = seed;
        opts.threads = threads.value_or(threads_from_env());
        const od::RunManifest m = od::dispatch(command, cfg, out_dir, opts);
        for (const std::string& f : m.outputs) {
            std::cout << (std::filesystem::path(out_dir) / f).string() << "\n";
        }
        return 0;
    } catch (const std::exception& e) {
        const nlohmann::json err = od::error_json(e);
        std::cerr << err.dump() << "\n";
        if (!out_dir.empty()) {
            try {
                std::filesystem::create_directories(out_dir);
                od::write_file_atomic(std::filesystem::path(out_dir) / "error.json", err.dump(2) + "\n");
            } catch (...) {
            }
        }
        return exit_code_for(e);
    }
}
