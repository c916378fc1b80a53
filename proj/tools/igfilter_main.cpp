#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "igf/errors.hpp"
#include "igf/harness/acceptance.hpp"
#include "igf/harness/config.hpp"
#include "igf/harness/experiments.hpp"
#include "igf/version.hpp"

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

int cmd_run(const std::string& config_path) {
    const igf::harness::ExperimentConfig cfg = igf::harness::load_config(config_path);
    std::string override_dir;
    if (const char* env = std::getenv("IGFILTER_OUTPUT_DIR")) override_dir = env;
    const auto written = igf::harness::run_and_write(cfg, override_dir);
    for (const auto& path : written) std::cout << path.string() << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path) {
    std::ifstream in(config_path, std::ios::binary);
    if (!in) {
        std::cerr << "error: cannot open " << config_path << "\n";
        return kExitIo;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    const auto errors = igf::harness::validate_config_text(buffer.str());
    if (errors.empty()) {
        std::cout << "ok\n";
        return 0;
    }
    for (const auto& e : errors) std::cout << "error: " << e << "\n";
    return kExitValidation;
}

int cmd_suite(const std::string& level_name, const std::string& configs_dir) {
    const auto level = level_name == "full" ? igf::harness::SuiteLevel::full
                                            : igf::harness::SuiteLevel::fast;
    const auto results = igf::harness::run_acceptance(level, configs_dir);
    std::cout << igf::harness::format_report(results);
    return igf::harness::all_passed(results) ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Information-geometric nonlinear filtering experiments"};
    app.set_version_flag("--version", igf::library_version);
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "Execute an experiment config and write its CSV tables");
    run->add_option("config", config_path, "Path to the experiment config (JSON)")->required();

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "Schema/invariant report without running");
    validate->add_option("config", validate_path, "Path to the experiment config (JSON)")
        ->required();

    std::string level = "fast";
    std::string configs_dir = "configs";
    auto* suite = app.add_subcommand("suite", "Run the acceptance criteria");
    suite->add_option("level", level, "fast or full")
        ->check(CLI::IsMember({"fast", "full"}));
    suite->add_option("--configs", configs_dir, "Directory of shipped configs")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path);
        if (validate->parsed()) return cmd_validate(validate_path);
        if (suite->parsed()) return cmd_suite(level, configs_dir);
    } catch (const igf::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitValidation;
    } catch (const igf::IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const igf::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
    return 0;
}
