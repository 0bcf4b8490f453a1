#include "akd/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "akd/rng.hpp"

namespace fs = std::filesystem;

namespace akd {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

FeatureKind feature_kind_from_name(const std::string& name) {
    if (name == "identity") return FeatureKind::Identity;
    if (name == "linear") return FeatureKind::Linear;
    if (name == "mlp1") return FeatureKind::MLP1;
    throw ConfigError("unknown feature map '" + name + "'");
}

LoopConfig make_loop_config(const ExperimentConfig& config, Strategy strategy,
                            FrameworkKind framework, std::uint64_t seed) {
    LoopConfig lc;
    lc.strategy = strategy;
    lc.framework = framework;
    lc.rounds = config.rounds;
    lc.query_size = config.query_size;
    lc.shots_per_class = config.shots_per_class;
    lc.max_unlabeled = config.dataset.max_unlabeled;
    lc.train.lambda = config.lambda;
    lc.train.learning_rate = config.learning_rate;
    lc.train.epochs = config.epochs;
    lc.train.batch_labeled = config.batch_labeled;
    lc.train.batch_unlabeled = config.batch_unlabeled;
    lc.final_round_epochs = config.final_round_epochs;
    lc.feature_kind = feature_kind_from_name(config.features);
    lc.hidden_dim = config.hidden_dim;
    lc.feature_dim = config.feature_dim;
    lc.single_head = config.single_head;
    lc.eta = config.eta;
    lc.alpha = config.alpha;
    lc.beta = config.beta;
    lc.warm_start = config.warm_start;
    lc.epsilon_threshold = config.epsilon_threshold;
    lc.knn_k = config.knn_k;
    lc.selection_raw_features = config.selection_raw_features;
    lc.seed = seed;
    return lc;
}

std::string cell_filename(const CellOutcome& cell) {
    return "rounds_" + cell.strategy + "_" + cell.framework + "_seed" +
           std::to_string(cell.seed) + ".csv";
}

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return std::string(buf);
}

}  // namespace

ExperimentConfig standard_benchmark_config() {
    ExperimentConfig config;
    config.dataset.kind = "synthetic";
    config.dataset.classes = 10;
    config.dataset.per_class = 200;
    config.dataset.dim = 16;
    config.dataset.spread = 2.5;
    config.dataset.test_per_class = 200;
    config.dataset.seed = 42;
    config.teacher.kind = "synthetic_biased";
    config.teacher.clusters = 10;
    config.teacher.sharpness = 0.85;
    config.teacher.sharpness_min = 0.45;
    config.teacher.flat_clusters = 3;
    config.teacher.radius = 0.05;
    config.teacher.zeta = 0.01;
    config.teacher.seed = 7;
    config.strategies = all_strategy_names();
    config.frameworks = {"no_distill", "zero_shot"};
    config.rounds = 16;
    config.query_size = 0;
    config.shots_per_class = 1;
    config.features = "identity";
    config.lambda = 0.5;
    config.eta = 2.0;
    config.alpha = 0.5;
    config.beta = 0.5;
    config.learning_rate = 0.1;
    config.epochs = 200;
    config.batch_labeled = 64;
    config.batch_unlabeled = 64;
    config.epsilon_threshold = 0.3;
    config.seeds = {0, 1, 2, 3, 4};
    config.output_dir = "out/benchmark";
    config.workers = 1;
    return config;
}

std::pair<Dataset, Dataset> make_datasets(const ExperimentConfig& config) {
    if (config.dataset.kind == "files") {
        Dataset train = load_embeddings(config.dataset.features_path, config.dataset.labels_path);
        Dataset test = load_embeddings(config.dataset.test_features_path,
                                       config.dataset.test_labels_path, train.class_count);
        if (test.feature_dim != train.feature_dim)
            throw IngestError("make_datasets: train/test feature dimensions differ");
        return {std::move(train), std::move(test)};
    }
    // Generate one mixture and carve off the test rows per class so both
    // splits share the component means.
    const DatasetSpec& ds = config.dataset;
    const Dataset all = generate_gaussian_mixture(ds.classes, ds.per_class + ds.test_per_class,
                                                  ds.dim, ds.spread, ds.seed);
    Dataset train, test;
    train.class_count = test.class_count = ds.classes;
    train.feature_dim = test.feature_dim = ds.dim;
    for (const Sample& s : all.samples) {
        const int within_class = s.id % (ds.per_class + ds.test_per_class);
        Sample copy = s;
        if (within_class < ds.per_class) {
            copy.id = train.size();
            train.samples.push_back(std::move(copy));
        } else {
            copy.id = test.size();
            test.samples.push_back(std::move(copy));
        }
    }
    return {std::move(train), std::move(test)};
}

Teacher make_teacher(const ExperimentConfig& config, const Dataset& train_set) {
    const TeacherSpec& ts = config.teacher;
    if (ts.kind == "synthetic_biased") {
        const int clusters = ts.clusters > 0 ? ts.clusters : train_set.class_count;
        return make_synthetic_biased_teacher(train_set.class_count, clusters, ts.sharpness,
                                             ts.radius, ts.seed, ts.sharpness_min,
                                             ts.flat_clusters);
    }
    if (ts.kind == "frozen_logits") {
        FrozenLogitsTeacher teacher = load_frozen_logits(ts.logits_path, ts.zeta);
        if (static_cast<int>(teacher.logits.size()) != train_set.size())
            throw IngestError("make_teacher: logits table has " +
                              std::to_string(teacher.logits.size()) + " rows, training set has " +
                              std::to_string(train_set.size()));
        return teacher;
    }
    PrototypeTeacher teacher;
    teacher.zeta = ts.zeta;
    teacher.feature_dim = train_set.feature_dim;
    teacher.prototypes.resize(static_cast<std::size_t>(train_set.class_count));
    return teacher;
}

std::vector<CellOutcome> run_grid(const ExperimentConfig& config, int workers) {
    const auto [train_set, test_set] = make_datasets(config);
    const Teacher teacher = make_teacher(config, train_set);

    std::vector<CellOutcome> cells;
    for (const std::string& strategy : config.strategies)
        for (const std::string& framework : config.frameworks)
            for (std::uint64_t seed : config.seeds) {
                CellOutcome cell;
                cell.strategy = strategy;
                cell.framework = framework;
                cell.seed = seed;
                cell.csv_path = cell_filename(cell);
                cells.push_back(std::move(cell));
            }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            CellOutcome& cell = cells[i];
            const auto t0 = std::chrono::steady_clock::now();
            try {
                const FrameworkKind fw = framework_from_name(cell.framework);
                const LoopConfig lc = make_loop_config(config, strategy_from_name(cell.strategy),
                                                       fw, cell.seed);
                const Teacher* t = fw == FrameworkKind::NoDistill ? nullptr : &teacher;
                cell.result = run_experiment(train_set, test_set, t, lc);
                cell.ok = true;
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
            cell.elapsed_ms = std::chrono::duration<double, std::milli>(
                                  std::chrono::steady_clock::now() - t0)
                                  .count();
        }
    };
    const int n_threads = std::max(1, std::min<int>(workers, static_cast<int>(cells.size())));
    if (n_threads == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }
    return cells;
}

const std::vector<std::string>& round_csv_columns() {
    static const std::vector<std::string> cols = {
        "round",          "labeled_size",  "unlabeled_size", "test_accuracy",
        "teacher_accuracy", "final_train_loss", "epsilon_hat",   "knn_loss",
        "knn_within",     "active_centers", "purity",          "uncertainty",
        "class_balance",  "feature_diversity", "prob_diversity", "chosen_ids"};
    return cols;
}

void write_round_csv(const std::string& path, const std::vector<RoundLog>& rounds) {
    std::ofstream f(path);
    if (!f) throw RunError("write_round_csv: cannot write " + path);
    const auto& cols = round_csv_columns();
    for (std::size_t i = 0; i < cols.size(); ++i) f << (i ? "," : "") << cols[i];
    f << '\n';
    for (const RoundLog& log : rounds) {
        std::string ids;
        for (std::size_t i = 0; i < log.chosen_ids.size(); ++i)
            ids += (i ? ";" : "") + std::to_string(log.chosen_ids[i]);
        f << log.round << ',' << log.labeled_size << ',' << log.unlabeled_size << ','
          << fmt17(log.test_accuracy) << ',' << fmt17(log.teacher_accuracy) << ','
          << fmt17(log.final_train_loss) << ',' << fmt17(log.epsilon_hat) << ','
          << fmt17(log.knn_loss) << ',' << fmt17(log.knn_within) << ',' << log.active_centers
          << ',' << fmt17(log.purity) << ',' << fmt17(log.criteria.uncertainty) << ','
          << fmt17(log.criteria.class_balance) << ',' << fmt17(log.criteria.feature_diversity)
          << ',' << fmt17(log.criteria.prob_diversity) << ',' << ids << '\n';
    }
}

std::vector<std::vector<std::string>> read_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ExportError("read_csv: cannot open " + path);
    std::vector<std::vector<std::string>> rows;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        std::vector<std::string> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) row.push_back(cell);
        rows.push_back(std::move(row));
    }
    return rows;
}

std::pair<double, double> mean_ci95(const std::vector<double>& values) {
    if (values.empty()) throw InvalidInputError("mean_ci95: no values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (values.size() < 2) return {mean, 0.0};
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size() - 1);
    const double half = 1.96 * std::sqrt(var) / std::sqrt(static_cast<double>(values.size()));
    return {mean, half};
}

RunOutput run(const ExperimentConfig& config) {
    fs::create_directories(config.output_dir);
    RunOutput out;
    out.cells = run_grid(config, config.workers);

    for (const CellOutcome& cell : out.cells) {
        if (!cell.ok) {
            out.all_ok = false;
            continue;
        }
        write_round_csv((fs::path(config.output_dir) / cell.csv_path).string(),
                        cell.result.rounds);
    }

    // summary: per (strategy, framework, round) stats over seeds
    const fs::path summary_path = fs::path(config.output_dir) / "summary.csv";
    {
        std::ofstream f(summary_path);
        if (!f) throw RunError("run: cannot write " + summary_path.string());
        f << "strategy,framework,round,mean_test_accuracy,ci95_halfwidth,seed_count\n";
        for (const std::string& strategy : config.strategies)
            for (const std::string& framework : config.frameworks)
                for (int round = 1; round <= config.rounds; ++round) {
                    std::vector<double> accs;
                    for (const CellOutcome& cell : out.cells)
                        if (cell.ok && cell.strategy == strategy && cell.framework == framework &&
                            round <= static_cast<int>(cell.result.rounds.size()))
                            accs.push_back(
                                cell.result.rounds[static_cast<std::size_t>(round - 1)]
                                    .test_accuracy);
                    if (accs.empty()) continue;
                    const auto [mean, half] = mean_ci95(accs);
                    f << strategy << ',' << framework << ',' << round << ',' << fmt17(mean) << ','
                      << fmt17(half) << ',' << accs.size() << '\n';
                }
    }
    out.summary_path = summary_path.string();

    nlohmann::json manifest;
    manifest["version"] = kToolVersion;
    manifest["config_hash"] = config.hash();
    manifest["created_utc"] = utc_now();
    manifest["output_dir"] = config.output_dir;
    manifest["summary"] = "summary.csv";
    manifest["cells"] = nlohmann::json::array();
    for (const CellOutcome& cell : out.cells) {
        nlohmann::json c;
        c["strategy"] = cell.strategy;
        c["framework"] = cell.framework;
        c["seed"] = cell.seed;
        c["path"] = cell.csv_path;
        c["status"] = cell.ok ? "ok" : "error";
        if (!cell.ok) c["error"] = cell.error;
        c["elapsed_ms"] = cell.elapsed_ms;
        manifest["cells"].push_back(std::move(c));
    }
    const fs::path manifest_path = fs::path(config.output_dir) / "manifest.json";
    std::ofstream mf(manifest_path);
    if (!mf) throw RunError("run: cannot write " + manifest_path.string());
    mf << manifest.dump(2) << '\n';
    out.manifest_path = manifest_path.string();
    return out;
}

std::string export_plotdata(const std::string& manifest_path, const std::string& kind,
                            const std::string& out_dir) {
    static const std::map<std::string, std::vector<std::string>> kind_columns = {
        {"accuracy", {"test_accuracy"}},
        {"criteria", {"uncertainty", "class_balance", "feature_diversity", "prob_diversity"}},
        {"knn", {"knn_loss"}},
        {"purity", {"purity"}},
    };
    const auto kit = kind_columns.find(kind);
    if (kit == kind_columns.end())
        throw ExportError("export: unknown kind '" + kind +
                          "' (expected accuracy, criteria, knn or purity)");

    std::ifstream mf(manifest_path);
    if (!mf) throw ExportError("export: cannot open manifest " + manifest_path);
    nlohmann::json manifest;
    mf >> manifest;
    const fs::path base = fs::path(manifest_path).parent_path();

    // resolve column indexes from the frozen header
    const auto& cols = round_csv_columns();
    auto col_index = [&](const std::string& name) {
        return static_cast<std::size_t>(
            std::find(cols.begin(), cols.end(), name) - cols.begin());
    };

    std::vector<std::string> missing;
    struct Row {
        std::string round, strategy, framework, seed, metric, value;
    };
    std::vector<Row> rows;
    for (const auto& cell : manifest.at("cells")) {
        if (cell.at("status") != "ok") continue;
        const fs::path path = base / cell.at("path").get<std::string>();
        if (!fs::exists(path)) {
            missing.push_back(path.string());
            continue;
        }
        const auto csv = read_csv(path.string());
        for (std::size_t r = 1; r < csv.size(); ++r) {
            for (const std::string& metric : kit->second) {
                Row row;
                row.round = csv[r][col_index("round")];
                row.strategy = cell.at("strategy").get<std::string>();
                row.framework = cell.at("framework").get<std::string>();
                row.seed = std::to_string(cell.at("seed").get<std::uint64_t>());
                row.metric = metric;
                row.value = csv[r][col_index(metric)];  // verbatim pass-through
                rows.push_back(std::move(row));
            }
        }
    }
    if (!missing.empty()) {
        std::string msg = "export: missing cell files:";
        for (const std::string& m : missing) msg += "\n  " + m;
        throw ExportError(msg);
    }

    const fs::path out_base = out_dir.empty() ? base : fs::path(out_dir);
    fs::create_directories(out_base);
    const fs::path out_path = out_base / ("export_" + kind + ".csv");
    std::ofstream f(out_path);
    if (!f) throw ExportError("export: cannot write " + out_path.string());
    f << "round,strategy,framework,seed,metric,value\n";
    for (const Row& row : rows)
        f << row.round << ',' << row.strategy << ',' << row.framework << ',' << row.seed << ','
          << row.metric << ',' << row.value << '\n';
    return out_path.string();
}

}  // namespace akd
