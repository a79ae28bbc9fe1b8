#include "flatlab/config.hpp"
#include "flatlab/errors.hpp"
#include "flatlab/experiments.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw flatlab::ConfigError("cannot read " + path);
    }
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

flatlab::ExperimentConfig resolve(const std::string& config_path, const std::vector<std::string>& sets,
                                  const std::string& seed)
{
    flatlab::ExperimentConfig cfg;
    if (!config_path.empty()) {
        cfg = flatlab::parse_config(read_file(config_path));
    }
    for (const auto& s : sets) {
        flatlab::apply_override(cfg, s);
    }
    if (!seed.empty()) {
        flatlab::apply_override(cfg, "seed=" + seed);
    }
    return cfg;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"flatlab: annular flatness experiments for minimal graphs"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string seed;
    std::vector<std::string> sets;

    auto* run = app.add_subcommand("run", "run one experiment and write its reports");
    run->add_option("--config", config_path, "key = value config file");
    run->add_option("--out", out_dir, "output root directory");
    run->add_option("--set", sets, "override KEY=VALUE (repeatable)");
    run->add_option("--seed", seed, "random seed");

    auto* val = app.add_subcommand("validate", "check a config file and list violations");
    val->add_option("--config", config_path, "key = value config file");
    val->add_option("--set", sets, "override KEY=VALUE (repeatable)");

    app.add_subcommand("list-experiments", "print the experiment kinds");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand("list-experiments")) {
            for (const auto& k : flatlab::experiment_kinds()) {
                std::cout << k << "\n";
            }
            return 0;
        }
        const auto cfg = resolve(config_path, sets, seed);
        if (app.got_subcommand("validate")) {
            const auto problems = flatlab::validate(cfg);
            for (const auto& p : problems) {
                std::cout << p << "\n";
            }
            return problems.empty() ? 0 : 1;
        }

        std::string root = "flatlab-out";
        if (const char* env = std::getenv("FLATLAB_OUT")) {
            root = env;
        }
        if (!cfg.out.empty()) {
            root = cfg.out;
        }
        if (!out_dir.empty()) {
            root = out_dir;
        }
        const auto result = flatlab::run_experiment(cfg);
        const fs::path dir = fs::path(root) / cfg.experiment;
        fs::create_directories(dir);
        for (const auto& f : result.files) {
            std::ofstream os(dir / f.name, std::ios::binary);
            os << f.content;
            if (!os) {
                throw flatlab::Error("cannot write " + (dir / f.name).string());
            }
        }
        {
            std::ofstream os(dir / "config.txt", std::ios::binary);
            os << flatlab::to_text(cfg);
        }
        std::cout << result.summary << "\n";
        return result.pass ? 0 : 2;
    } catch (const flatlab::ParseError& e) {
        std::cerr << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return 1;
    }
}
