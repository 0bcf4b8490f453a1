// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 1-4 and 9 are the guarantee/oracle checks; 5-7 evaluate the
// standard synthetic benchmark grid; 8 exercises end-to-end determinism of
// the run pipeline.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "akd/config.hpp"
#include "akd/loop.hpp"
#include "akd/runner.hpp"
#include "akd/verify.hpp"

namespace fs = std::filesystem;
using akd::CellOutcome;
using akd::RoundLog;

namespace {

int g_failures = 0;

void report(int criterion, const std::string& name, bool pass, const std::string& detail,
            double elapsed_s, double budget_s) {
    const bool in_budget = elapsed_s < budget_s;
    if (!pass || !in_budget) ++g_failures;
    std::printf("[%s] criterion %d (%s): %s [%.1f s, budget %.0f s]\n",
                pass && in_budget ? "PASS" : "FAIL", criterion, name.c_str(), detail.c_str(),
                elapsed_s, budget_s);
    std::fflush(stdout);
}

double now_s() {
    return std::chrono::duration<double>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct MeanCi {
    double mean = 0.0;
    double half = 0.0;
};

MeanCi mean_ci(const std::vector<double>& v) {
    const auto [m, h] = akd::mean_ci95(v);
    return {m, h};
}

const RoundLog& final_round(const std::vector<CellOutcome>& cells, const std::string& strategy,
                            const std::string& framework, std::uint64_t seed) {
    for (const CellOutcome& cell : cells)
        if (cell.strategy == strategy && cell.framework == framework && cell.seed == seed)
            return cell.result.rounds.back();
    throw std::runtime_error("missing cell " + strategy + "/" + framework);
}

const std::vector<RoundLog>& rounds_of(const std::vector<CellOutcome>& cells,
                                       const std::string& strategy,
                                       const std::string& framework, std::uint64_t seed) {
    for (const CellOutcome& cell : cells)
        if (cell.strategy == strategy && cell.framework == framework && cell.seed == seed)
            return cell.result.rounds;
    throw std::runtime_error("missing cell " + strategy + "/" + framework);
}

std::string slurp(const fs::path& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// criterion 5: each strategy tops its own criterion in >= 4 of 5 seeds
void criterion_5(const std::vector<CellOutcome>& cells, const akd::ExperimentConfig& config,
                 double grid_s) {
    const double t0 = now_s();
    const std::vector<std::string> compared = {"random",   "entropy",        "coreset",
                                               "pcoreset", "class_balanced", "badge"};
    const std::map<std::string, std::string> owner = {
        {"uncertainty", "entropy"},
        {"class_balance", "class_balanced"},
        {"feature_diversity", "coreset"},
        {"prob_diversity", "pcoreset"},
    };
    auto criterion_mean = [&](const std::string& strategy, std::uint64_t seed,
                              const std::string& which) {
        const auto& rounds = rounds_of(cells, strategy, "zero_shot", seed);
        double acc = 0.0;
        for (const RoundLog& log : rounds) {
            if (which == "uncertainty") acc += log.criteria.uncertainty;
            else if (which == "class_balance") acc += log.criteria.class_balance;
            else if (which == "feature_diversity") acc += log.criteria.feature_diversity;
            else acc += log.criteria.prob_diversity;
        }
        return acc / static_cast<double>(rounds.size());
    };

    bool pass = true;
    std::string detail;
    for (const auto& [which, expected] : owner) {
        int wins = 0;
        for (std::uint64_t seed : config.seeds) {
            std::string best;
            double best_value = -1.0;
            for (const std::string& strategy : compared) {
                const double v = criterion_mean(strategy, seed, which);
                if (v > best_value) {
                    best_value = v;
                    best = strategy;
                }
            }
            if (best == expected) ++wins;
        }
        if (wins < 4) pass = false;
        detail += which + "->" + expected + " " + std::to_string(wins) + "/5  ";
    }
    report(5, "selection-criteria ordering", pass, detail, grid_s + (now_s() - t0), 600.0);
}

// criterion 6: zero-shot beats no-distill at the final round for every
// strategy, paired 95% CI excluding zero
void criterion_6(const std::vector<CellOutcome>& cells, const akd::ExperimentConfig& config,
                 double grid_s) {
    const double t0 = now_s();
    bool pass = true;
    std::string detail;
    char buf[96];
    for (const std::string& strategy : config.strategies) {
        std::vector<double> gains;
        for (std::uint64_t seed : config.seeds)
            gains.push_back(final_round(cells, strategy, "zero_shot", seed).test_accuracy -
                            final_round(cells, strategy, "no_distill", seed).test_accuracy);
        const MeanCi ci = mean_ci(gains);
        const bool ok = ci.mean > 0.0 && ci.mean - ci.half > 0.0;
        if (!ok) pass = false;
        std::snprintf(buf, sizeof buf, "%s %+0.3f+-%.3f ", strategy.c_str(), ci.mean, ci.half);
        detail += buf;
    }
    report(6, "distillation direction", pass, detail, grid_s + (now_s() - t0), 900.0);
}

// criterion 7: pcoreset attains min mean knn loss and max mean purity at the
// final round, strictly dominating its reverse on both
void criterion_7(const std::vector<CellOutcome>& cells, const akd::ExperimentConfig& config,
                 double grid_s) {
    const double t0 = now_s();
    std::map<std::string, double> knn, purity;
    for (const std::string& strategy : config.strategies) {
        std::vector<double> k, p;
        for (std::uint64_t seed : config.seeds) {
            const RoundLog& log = final_round(cells, strategy, "zero_shot", seed);
            k.push_back(log.knn_loss);
            p.push_back(log.purity);
        }
        knn[strategy] = mean_ci(k).mean;
        purity[strategy] = mean_ci(p).mean;
    }
    bool knn_ok = true, purity_ok = true;
    for (const auto& [strategy, value] : knn)
        if (strategy != "pcoreset" && knn.at("pcoreset") > value) knn_ok = false;
    for (const auto& [strategy, value] : purity)
        if (strategy != "pcoreset" && purity.at("pcoreset") < value) purity_ok = false;
    const bool reverse_ok = knn.at("pcoreset") < knn.at("pcoreset_reverse") &&
                            purity.at("pcoreset") > purity.at("pcoreset_reverse");
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "knn %.4f (min of others %.4f), purity %.4f (max of others %.4f), "
                  "reverse knn %.4f purity %.4f",
                  knn.at("pcoreset"),
                  std::min_element(knn.begin(), knn.end(), [](auto& a, auto& b) {
                      return (a.first == "pcoreset" ? 1e9 : a.second) <
                             (b.first == "pcoreset" ? 1e9 : b.second);
                  })->second,
                  purity.at("pcoreset"),
                  std::max_element(purity.begin(), purity.end(), [](auto& a, auto& b) {
                      return (a.first == "pcoreset" ? -1e9 : a.second) <
                             (b.first == "pcoreset" ? -1e9 : b.second);
                  })->second,
                  knn.at("pcoreset_reverse"), purity.at("pcoreset_reverse"));
    report(7, "bias-propagation ordering", knn_ok && purity_ok && reverse_ok, buf,
           grid_s + (now_s() - t0), 900.0);
}

// criterion 8: two full run() invocations with an identical config produce
// byte-identical round-log CSVs (and summary)
void criterion_8(double benchmark_s) {
    const double t0 = now_s();
    akd::ExperimentConfig config = akd::standard_benchmark_config();
    config.strategies = {"random", "pcoreset", "badge"};
    config.frameworks = {"zero_shot"};
    config.rounds = 4;
    config.seeds = {0, 1};
    const fs::path dir_a = fs::temp_directory_path() / "akd_acceptance_det_a";
    const fs::path dir_b = fs::temp_directory_path() / "akd_acceptance_det_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);

    config.output_dir = dir_a.string();
    const akd::RunOutput a = akd::run(config);
    config.output_dir = dir_b.string();
    const akd::RunOutput b = akd::run(config);

    bool pass = a.all_ok && b.all_ok && a.cells.size() == b.cells.size();
    int compared = 0;
    if (pass) {
        for (std::size_t i = 0; i < a.cells.size(); ++i) {
            if (slurp(dir_a / a.cells[i].csv_path) != slurp(dir_b / b.cells[i].csv_path)) {
                pass = false;
                break;
            }
            ++compared;
        }
        if (slurp(a.summary_path) != slurp(b.summary_path)) pass = false;
    }
    report(8, "byte-identical reruns", pass,
           std::to_string(compared) + " round-log files plus summary compared",
           now_s() - t0, 2.0 * std::max(benchmark_s, 1.0));
}

}  // namespace

int main() {
    // criteria 1-4 and 9: guarantee-level suites with fixed tolerances
    {
        auto [prop, bound] = akd::verify::check_bias_propagation();
        report(1, "bias propagation exactness", prop.pass, prop.detail, prop.elapsed_s, 10.0);

        const auto oracle = akd::verify::check_optimal_target_oracle();
        report(2, "optimal-target oracle", oracle.pass, oracle.detail, oracle.elapsed_s, 5.0);

        const auto greedy = akd::verify::check_greedy_oracle();
        report(3, "greedy oracle equivalence", greedy.pass, greedy.detail, greedy.elapsed_s, 5.0);

        const auto grad = akd::verify::check_gradients();
        report(4, "gradient correctness", grad.pass, grad.detail, grad.elapsed_s, 30.0);

        // the benchmark grid shared by criteria 5-7
        const akd::ExperimentConfig config = akd::standard_benchmark_config();
        const double grid_t0 = now_s();
        const std::vector<CellOutcome> cells = akd::run_grid(config, config.workers);
        const double grid_s = now_s() - grid_t0;
        bool grid_ok = true;
        for (const CellOutcome& cell : cells)
            if (!cell.ok) {
                std::printf("[FAIL] benchmark cell %s/%s seed %llu: %s\n", cell.strategy.c_str(),
                            cell.framework.c_str(),
                            static_cast<unsigned long long>(cell.seed), cell.error.c_str());
                grid_ok = false;
            }
        if (!grid_ok) {
            g_failures += 3;
        } else {
            criterion_5(cells, config, grid_s);
            criterion_6(cells, config, grid_s);
            criterion_7(cells, config, grid_s);
        }

        criterion_8(grid_s);

        report(9, "propagated-center bound", bound.pass, bound.detail, bound.elapsed_s, 10.0);
    }

    if (g_failures > 0) std::printf("%d criterion(s) failed\n", g_failures);
    return g_failures;
}
