#include "ssflab/lab/cache.hpp"
#include "ssflab/lab/config.hpp"
#include "ssflab/lab/experiments.hpp"
#include "ssflab/lab/selftest.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

int main(int argc, char** argv)
{
    using namespace ssflab::lab;

    CLI::App app{"Spectral shift function experiments for lattice random operators"};
    app.set_version_flag("--version", library_version());
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Run the experiment described by a config file");
    run->add_option("config", config_path, "Config file")->required();
    run->allow_extras();
    run->footer("Any --section.key=value flag overrides the config file.");

    std::string cache_action;
    std::string cache_dir;
    auto* cache = app.add_subcommand("cache", "Inspect or clear the eigenvalue cache");
    cache->add_option("action", cache_action, "stats or clear")
        ->required()
        ->check(CLI::IsMember({"stats", "clear"}));
    cache->add_option("--dir", cache_dir, "Cache directory (SSF_LAB_CACHE_DIR takes precedence)");

    auto* selftest = app.add_subcommand("selftest", "Run the built-in worked examples");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try
    {
        if (*run)
            return run_command(config_path, run->remaining(), std::cout, std::cerr);

        if (*cache)
        {
            SpectrumCache c(resolve_cache_dir(cache_dir), false);
            if (cache_action == "stats")
            {
                const auto s = c.directory_stats();
                std::cout << "directory: " << c.directory().string() << '\n'
                          << "entries: " << s.files << '\n'
                          << "bytes: " << s.bytes << '\n';
            }
            else
            {
                std::cout << "removed " << c.clear() << " entries from " << c.directory().string() << '\n';
            }
            return 0;
        }

        if (*selftest)
            return run_selftest(std::cout);
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
