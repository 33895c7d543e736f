#include <fstream>

#include <Eigen/Core>

#include "dmimo/common.hpp"
#include "dmimo/harness/experiments.hpp"

#ifndef DMIMO_VERSION
#define DMIMO_VERSION "0.0.0"
#endif

namespace dmimo::harness {

namespace {

std::string compiler() {
#if defined(__clang__)
    return "clang " __clang_version__;
#elif defined(__GNUC__)
    return "gcc " __VERSION__;
#else
    return "unknown";
#endif
}

void open_for_write(std::ofstream& f, const std::filesystem::path& p) {
    f.open(p, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + p.string());
}

}  // namespace

std::vector<std::string> write_outputs(const ExperimentSpec& spec, const ExperimentOutput& output) {
    std::filesystem::create_directories(spec.out_dir);
    const std::string stem(to_string(spec.experiment));
    std::vector<std::string> files;
    nlohmann::json tables = nlohmann::json::array();
    for (const auto& t : output.tables) {
        const std::string name = t.suffix.empty() ? stem + ".csv" : stem + "-" + t.suffix + ".csv";
        std::ofstream f;
        open_for_write(f, spec.out_dir / name);
        write_csv(f, t);
        files.push_back(name);
        tables.push_back({{"file", name}, {"rows", t.rows.size()}, {"reproducible", t.reproducible}});
    }
    {
        std::ofstream f;
        open_for_write(f, spec.out_dir / (stem + ".gp"));
        write_gnuplot(f, stem + ".csv", stem, output.plots);
        files.push_back(stem + ".gp");
    }

    nlohmann::json manifest;
    manifest["experiment"] = stem;
    manifest["seed"] = spec.seed;
    manifest["trials"] = spec.trials;
    manifest["grid"] = spec.grid;
    manifest["paper_scale"] = spec.paper_scale;
    manifest["config_path"] = spec.config_path.string();
    manifest["config"] = config_to_json(spec.config);
    manifest["tables"] = tables;
    manifest["summary"] = output.summary;
    manifest["versions"] = {
        {"dmimo", DMIMO_VERSION},
        {"build_id", std::string(build_id())},
        {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                      std::to_string(EIGEN_MINOR_VERSION)},
        {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                              std::to_string(NLOHMANN_JSON_VERSION_PATCH)},
        {"compiler", compiler()},
        {"cplusplus", static_cast<long>(__cplusplus)},
    };
    std::ofstream f;
    open_for_write(f, spec.out_dir / "run-manifest.json");
    f << manifest.dump(2) << '\n';
    files.push_back("run-manifest.json");
    return files;
}

}  // namespace dmimo::harness
