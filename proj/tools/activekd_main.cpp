#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "akd/config.hpp"
#include "akd/runner.hpp"
#include "akd/verify.hpp"

namespace {

int cmd_run(const std::string& config_path, const std::string& seed_override,
            int workers_override, const std::string& out_dir_override) {
    akd::ExperimentConfig config = akd::parse_config(config_path);
    if (!seed_override.empty()) {
        config.seeds.clear();
        std::string item;
        std::stringstream ss(seed_override);
        while (std::getline(ss, item, ','))
            if (!item.empty()) config.seeds.push_back(std::stoull(item));
        if (config.seeds.empty()) throw akd::ConfigError("--seed-override: empty seed list");
    }
    if (workers_override > 0) config.workers = workers_override;
    if (!out_dir_override.empty()) config.output_dir = out_dir_override;
    akd::validate_config(config);

    const akd::RunOutput out = akd::run(config);
    int failed = 0;
    for (const akd::CellOutcome& cell : out.cells) {
        if (cell.ok) {
            std::printf("[ok]    %s %s seed=%llu (%.1f ms) -> %s\n", cell.strategy.c_str(),
                        cell.framework.c_str(), static_cast<unsigned long long>(cell.seed),
                        cell.elapsed_ms, cell.csv_path.c_str());
        } else {
            ++failed;
            std::printf("[error] %s %s seed=%llu: %s\n", cell.strategy.c_str(),
                        cell.framework.c_str(), static_cast<unsigned long long>(cell.seed),
                        cell.error.c_str());
        }
    }
    std::printf("manifest: %s\nsummary:  %s\n", out.manifest_path.c_str(),
                out.summary_path.c_str());
    if (failed > 0) std::printf("%d cell(s) failed\n", failed);
    return failed == 0 ? 0 : 1;
}

int cmd_export(const std::string& manifest, const std::string& kind,
               const std::string& out_dir) {
    const std::string path = akd::export_plotdata(manifest, kind, out_dir);
    std::printf("wrote %s\n", path.c_str());
    return 0;
}

int cmd_verify() {
    bool all_pass = true;
    for (const akd::verify::CheckResult& r : akd::verify::run_all()) {
        std::printf("[%s] %s: %s (%.2f s)\n", r.pass ? "PASS" : "FAIL", r.name.c_str(),
                    r.detail.c_str(), r.elapsed_s);
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"active knowledge distillation simulator"};
    app.require_subcommand(1);

    std::string config_path, seed_override, out_dir, manifest, kind = "accuracy";
    int workers = 0;

    CLI::App* run_cmd = app.add_subcommand("run", "run the experiment grid from a config file");
    run_cmd->add_option("config", config_path, "config file path")->required();
    run_cmd->add_option("--seed-override", seed_override, "comma-separated seed list");
    run_cmd->add_option("--workers", workers, "parallel grid cells");
    run_cmd->add_option("--out-dir", out_dir, "output directory override");

    CLI::App* export_cmd =
        app.add_subcommand("export", "emit plot-ready long-format CSV from a manifest");
    export_cmd->add_option("manifest", manifest, "manifest.json path")->required();
    export_cmd->add_option("--kind", kind, "accuracy | criteria | knn | purity")->required();
    export_cmd->add_option("--out-dir", out_dir, "output directory override");

    CLI::App* verify_cmd =
        app.add_subcommand("verify", "run the guarantee and oracle-equivalence suites");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return cmd_run(config_path, seed_override, workers, out_dir);
        if (export_cmd->parsed()) return cmd_export(manifest, kind, out_dir);
        if (verify_cmd->parsed()) return cmd_verify();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
