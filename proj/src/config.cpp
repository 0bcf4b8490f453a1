#include "akd/config.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "akd/errors.hpp"
#include "akd/loop.hpp"
#include "akd/selection.hpp"

namespace akd {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::size_t edit_distance(const std::string& a, const std::string& b) {
    std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
    for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
    for (std::size_t i = 1; i <= a.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= b.size(); ++j)
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1,
                               prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1)});
        std::swap(prev, cur);
    }
    return prev[b.size()];
}

const std::map<std::string, std::vector<std::string>>& known_keys() {
    static const std::map<std::string, std::vector<std::string>> keys = {
        {"dataset",
         {"kind", "classes", "per_class", "dim", "spread", "test_per_class", "seed",
          "max_unlabeled", "features_path", "labels_path", "test_features_path",
          "test_labels_path"}},
        {"teacher",
         {"kind", "clusters", "sharpness", "sharpness_min", "flat_clusters", "radius",
          "zeta", "seed", "logits_path"}},
        {"loop", {"frameworks", "strategies", "rounds", "query_size", "shots_per_class"}},
        {"student",
         {"features", "hidden_dim", "feature_dim", "single_head", "warm_start", "lambda", "eta",
          "alpha", "beta", "learning_rate", "epochs", "final_round_epochs", "batch_labeled",
          "batch_unlabeled"}},
        {"metrics", {"epsilon_threshold", "knn_k", "selection_raw_features"}},
        {"run", {"seeds", "output_dir", "workers"}},
    };
    return keys;
}

std::string suggest_key(const std::string& section, const std::string& key) {
    const auto it = known_keys().find(section);
    if (it == known_keys().end()) return "";
    std::string best;
    std::size_t best_d = 4;  // only suggest close matches
    for (const std::string& candidate : it->second) {
        const std::size_t d = edit_distance(key, candidate);
        if (d < best_d) {
            best_d = d;
            best = candidate;
        }
    }
    return best;
}

struct Entry {
    std::string value;
    int line = 0;
};

}  // namespace

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError("parse_config: cannot open " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config_text(ss.str(), path);
}

ExperimentConfig parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, std::map<std::string, Entry>> sections;
    std::vector<std::string> errors;
    {
        std::stringstream ss(text);
        std::string line;
        std::string section;
        int line_no = 0;
        while (std::getline(ss, line)) {
            ++line_no;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line = line.substr(0, hash);
            line = trim(line);
            if (line.empty()) continue;
            if (line.front() == '[') {
                if (line.back() != ']') {
                    errors.push_back("line " + std::to_string(line_no) + ": malformed section header");
                    continue;
                }
                section = trim(line.substr(1, line.size() - 2));
                if (known_keys().find(section) == known_keys().end())
                    errors.push_back("line " + std::to_string(line_no) + ": unknown section [" +
                                     section + "]");
                continue;
            }
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                errors.push_back("line " + std::to_string(line_no) + ": expected key = value");
                continue;
            }
            if (section.empty()) {
                errors.push_back("line " + std::to_string(line_no) + ": key outside any section");
                continue;
            }
            const std::string key = trim(line.substr(0, eq));
            const std::string value = trim(line.substr(eq + 1));
            const auto& allowed = known_keys().count(section) ? known_keys().at(section)
                                                              : std::vector<std::string>{};
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                std::string msg = "line " + std::to_string(line_no) + ": unknown key '" + key +
                                  "' in [" + section + "]";
                const std::string hint = suggest_key(section, key);
                if (!hint.empty()) msg += " (did you mean '" + hint + "'?)";
                errors.push_back(msg);
                continue;
            }
            sections[section][key] = Entry{value, line_no};
        }
    }

    ExperimentConfig config;
    auto get = [&](const std::string& section, const std::string& key) -> const Entry* {
        const auto sit = sections.find(section);
        if (sit == sections.end()) return nullptr;
        const auto kit = sit->second.find(key);
        return kit == sit->second.end() ? nullptr : &kit->second;
    };
    auto bad = [&](const Entry* e, const std::string& what) {
        errors.push_back("line " + std::to_string(e->line) + ": " + what);
    };
    auto read_int = [&](const std::string& sec, const std::string& key, int& out) {
        if (const Entry* e = get(sec, key)) {
            try {
                std::size_t pos = 0;
                out = std::stoi(e->value, &pos);
                if (pos != e->value.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                bad(e, key + " must be an integer, got '" + e->value + "'");
            }
        }
    };
    auto read_u64 = [&](const std::string& sec, const std::string& key, std::uint64_t& out) {
        if (const Entry* e = get(sec, key)) {
            try {
                out = std::stoull(e->value);
            } catch (const std::exception&) {
                bad(e, key + " must be a non-negative integer, got '" + e->value + "'");
            }
        }
    };
    auto read_double = [&](const std::string& sec, const std::string& key, double& out) {
        if (const Entry* e = get(sec, key)) {
            try {
                std::size_t pos = 0;
                out = std::stod(e->value, &pos);
                if (pos != e->value.size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                bad(e, key + " must be a number, got '" + e->value + "'");
            }
        }
    };
    auto read_bool = [&](const std::string& sec, const std::string& key, bool& out) {
        if (const Entry* e = get(sec, key)) {
            if (e->value == "true") out = true;
            else if (e->value == "false") out = false;
            else bad(e, key + " must be true or false, got '" + e->value + "'");
        }
    };
    auto read_string = [&](const std::string& sec, const std::string& key, std::string& out) {
        if (const Entry* e = get(sec, key)) out = e->value;
    };
    auto read_list = [&](const std::string& sec, const std::string& key,
                         std::vector<std::string>& out) {
        if (const Entry* e = get(sec, key)) {
            out = split_list(e->value);
            if (out.empty()) bad(e, key + " must be a non-empty list");
        }
    };

    read_string("dataset", "kind", config.dataset.kind);
    read_int("dataset", "classes", config.dataset.classes);
    read_int("dataset", "per_class", config.dataset.per_class);
    read_int("dataset", "dim", config.dataset.dim);
    read_double("dataset", "spread", config.dataset.spread);
    read_int("dataset", "test_per_class", config.dataset.test_per_class);
    read_u64("dataset", "seed", config.dataset.seed);
    read_int("dataset", "max_unlabeled", config.dataset.max_unlabeled);
    read_string("dataset", "features_path", config.dataset.features_path);
    read_string("dataset", "labels_path", config.dataset.labels_path);
    read_string("dataset", "test_features_path", config.dataset.test_features_path);
    read_string("dataset", "test_labels_path", config.dataset.test_labels_path);

    read_string("teacher", "kind", config.teacher.kind);
    read_int("teacher", "clusters", config.teacher.clusters);
    read_double("teacher", "sharpness", config.teacher.sharpness);
    read_double("teacher", "sharpness_min", config.teacher.sharpness_min);
    read_int("teacher", "flat_clusters", config.teacher.flat_clusters);
    read_double("teacher", "radius", config.teacher.radius);
    read_double("teacher", "zeta", config.teacher.zeta);
    read_u64("teacher", "seed", config.teacher.seed);
    read_string("teacher", "logits_path", config.teacher.logits_path);

    read_list("loop", "frameworks", config.frameworks);
    read_list("loop", "strategies", config.strategies);
    read_int("loop", "rounds", config.rounds);
    read_int("loop", "query_size", config.query_size);
    read_int("loop", "shots_per_class", config.shots_per_class);

    read_string("student", "features", config.features);
    read_int("student", "hidden_dim", config.hidden_dim);
    read_int("student", "feature_dim", config.feature_dim);
    read_bool("student", "single_head", config.single_head);
    read_bool("student", "warm_start", config.warm_start);
    read_double("student", "lambda", config.lambda);
    read_double("student", "eta", config.eta);
    read_double("student", "alpha", config.alpha);
    read_double("student", "beta", config.beta);
    read_double("student", "learning_rate", config.learning_rate);
    read_int("student", "epochs", config.epochs);
    read_int("student", "final_round_epochs", config.final_round_epochs);
    read_int("student", "batch_labeled", config.batch_labeled);
    read_int("student", "batch_unlabeled", config.batch_unlabeled);

    read_double("metrics", "epsilon_threshold", config.epsilon_threshold);
    read_int("metrics", "knn_k", config.knn_k);
    read_bool("metrics", "selection_raw_features", config.selection_raw_features);

    if (const Entry* e = get("run", "seeds")) {
        config.seeds.clear();
        for (const std::string& item : split_list(e->value)) {
            try {
                config.seeds.push_back(std::stoull(item));
            } catch (const std::exception&) {
                bad(e, "seeds must be non-negative integers, got '" + item + "'");
            }
        }
        if (config.seeds.empty()) bad(e, "seeds must be a non-empty list");
    }
    read_string("run", "output_dir", config.output_dir);
    read_int("run", "workers", config.workers);

    if (!errors.empty()) {
        std::string msg = "config errors in " + origin + ":";
        for (const std::string& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    validate_config(config);
    return config;
}

void validate_config(const ExperimentConfig& config) {
    std::vector<std::string> errors;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };

    check(config.dataset.kind == "synthetic" || config.dataset.kind == "files",
          "dataset.kind must be synthetic or files");
    if (config.dataset.kind == "synthetic") {
        check(config.dataset.classes >= 2, "dataset.classes must be >= 2");
        check(config.dataset.per_class >= 1, "dataset.per_class must be >= 1");
        check(config.dataset.dim >= 2, "dataset.dim must be >= 2");
        check(config.dataset.classes <= config.dataset.dim,
              "dataset.classes must be <= dataset.dim");
        check(config.dataset.spread > 0.0, "dataset.spread must be > 0");
        check(config.dataset.test_per_class >= 1, "dataset.test_per_class must be >= 1");
    } else if (config.dataset.kind == "files") {
        for (const auto& [name, path] :
             {std::pair<std::string, std::string>{"features_path", config.dataset.features_path},
              {"labels_path", config.dataset.labels_path},
              {"test_features_path", config.dataset.test_features_path},
              {"test_labels_path", config.dataset.test_labels_path}}) {
            if (path.empty())
                errors.push_back("dataset." + name + " is required when kind = files");
            else if (!std::filesystem::exists(path))
                errors.push_back("dataset." + name + ": file not found: " + path);
        }
    }
    check(config.dataset.max_unlabeled >= 0, "dataset.max_unlabeled must be >= 0");

    check(config.teacher.kind == "synthetic_biased" || config.teacher.kind == "frozen_logits" ||
              config.teacher.kind == "prototype",
          "teacher.kind must be synthetic_biased, frozen_logits or prototype");
    check(config.teacher.clusters >= 0, "teacher.clusters must be >= 0");
    check(config.teacher.sharpness >= 0.0 && config.teacher.sharpness <= 1.0,
          "teacher.sharpness must be in [0, 1]");
    check(config.teacher.sharpness_min <= config.teacher.sharpness,
          "teacher.sharpness_min must not exceed teacher.sharpness");
    check(config.teacher.flat_clusters >= 0, "teacher.flat_clusters must be >= 0");
    check(config.teacher.radius > 0.0, "teacher.radius must be > 0");
    check(config.teacher.zeta > 0.0, "teacher.zeta must be > 0");
    if (config.teacher.kind == "frozen_logits") {
        if (config.teacher.logits_path.empty())
            errors.push_back("teacher.logits_path is required for frozen_logits");
        else if (!std::filesystem::exists(config.teacher.logits_path))
            errors.push_back("teacher.logits_path: file not found: " + config.teacher.logits_path);
    }

    for (const std::string& s : config.strategies) {
        try {
            strategy_from_name(s);
        } catch (const ConfigError&) {
            errors.push_back("loop.strategies: unknown strategy '" + s + "'");
        }
    }
    for (const std::string& f : config.frameworks) {
        try {
            framework_from_name(f);
        } catch (const ConfigError&) {
            errors.push_back("loop.frameworks: unknown framework '" + f + "'");
        }
        if (f == "few_shot" && config.teacher.kind != "prototype")
            errors.push_back("loop.frameworks: few_shot requires teacher.kind = prototype");
    }
    check(config.rounds >= 1, "loop.rounds must be >= 1");
    check(config.query_size >= 0, "loop.query_size must be >= 0");
    check(config.shots_per_class >= 1, "loop.shots_per_class must be >= 1");

    check(config.features == "identity" || config.features == "linear" ||
              config.features == "mlp1",
          "student.features must be identity, linear or mlp1");
    if (config.features == "mlp1") check(config.hidden_dim >= 1, "student.hidden_dim must be >= 1");
    check(config.feature_dim >= 0, "student.feature_dim must be >= 0");
    check(config.lambda >= 0.0 && config.lambda <= 1.0, "student.lambda must be in [0, 1]");
    check(config.eta > 0.0, "student.eta must be > 0");
    check(config.alpha >= 0.0 && config.alpha <= 1.0, "student.alpha must be in [0, 1]");
    check(config.beta > 0.0, "student.beta must be > 0");
    check(config.learning_rate > 0.0, "student.learning_rate must be > 0");
    check(config.epochs >= 1, "student.epochs must be >= 1");
    check(config.final_round_epochs >= 0, "student.final_round_epochs must be >= 0");
    check(config.batch_labeled >= 1 && config.batch_unlabeled >= 1,
          "student batch sizes must be >= 1");

    check(config.epsilon_threshold >= 0.0, "metrics.epsilon_threshold must be >= 0");
    check(config.knn_k >= 0, "metrics.knn_k must be >= 0");

    check(!config.seeds.empty(), "run.seeds must be non-empty");
    check(config.workers >= 1, "run.workers must be >= 1");
    check(!config.output_dir.empty(), "run.output_dir must be non-empty");

    if (!errors.empty()) {
        std::string msg = "invalid config:";
        for (const std::string& e : errors) msg += "\n  " + e;
        throw ConfigError(msg);
    }
}

std::string ExperimentConfig::canonical_string() const {
    std::ostringstream out;
    char buf[40];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto list = [](const std::vector<std::string>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + v[i];
        return s;
    };
    std::string seed_list;
    for (std::size_t i = 0; i < seeds.size(); ++i)
        seed_list += (i ? "," : "") + std::to_string(seeds[i]);

    out << "dataset.kind=" << dataset.kind << '\n'
        << "dataset.classes=" << dataset.classes << '\n'
        << "dataset.per_class=" << dataset.per_class << '\n'
        << "dataset.dim=" << dataset.dim << '\n'
        << "dataset.spread=" << num(dataset.spread) << '\n'
        << "dataset.test_per_class=" << dataset.test_per_class << '\n'
        << "dataset.seed=" << dataset.seed << '\n'
        << "dataset.max_unlabeled=" << dataset.max_unlabeled << '\n'
        << "dataset.features_path=" << dataset.features_path << '\n'
        << "dataset.labels_path=" << dataset.labels_path << '\n'
        << "dataset.test_features_path=" << dataset.test_features_path << '\n'
        << "dataset.test_labels_path=" << dataset.test_labels_path << '\n'
        << "teacher.kind=" << teacher.kind << '\n'
        << "teacher.clusters=" << teacher.clusters << '\n'
        << "teacher.sharpness=" << num(teacher.sharpness) << '\n'
        << "teacher.sharpness_min=" << num(teacher.sharpness_min) << '\n'
        << "teacher.flat_clusters=" << teacher.flat_clusters << '\n'
        << "teacher.radius=" << num(teacher.radius) << '\n'
        << "teacher.zeta=" << num(teacher.zeta) << '\n'
        << "teacher.seed=" << teacher.seed << '\n'
        << "teacher.logits_path=" << teacher.logits_path << '\n'
        << "loop.frameworks=" << list(frameworks) << '\n'
        << "loop.strategies=" << list(strategies) << '\n'
        << "loop.rounds=" << rounds << '\n'
        << "loop.query_size=" << query_size << '\n'
        << "loop.shots_per_class=" << shots_per_class << '\n'
        << "student.features=" << features << '\n'
        << "student.hidden_dim=" << hidden_dim << '\n'
        << "student.feature_dim=" << feature_dim << '\n'
        << "student.single_head=" << (single_head ? 1 : 0) << '\n'
        << "student.warm_start=" << (warm_start ? 1 : 0) << '\n'
        << "student.lambda=" << num(lambda) << '\n'
        << "student.eta=" << num(eta) << '\n'
        << "student.alpha=" << num(alpha) << '\n'
        << "student.beta=" << num(beta) << '\n'
        << "student.learning_rate=" << num(learning_rate) << '\n'
        << "student.epochs=" << epochs << '\n'
        << "student.final_round_epochs=" << final_round_epochs << '\n'
        << "student.batch_labeled=" << batch_labeled << '\n'
        << "student.batch_unlabeled=" << batch_unlabeled << '\n'
        << "metrics.epsilon_threshold=" << num(epsilon_threshold) << '\n'
        << "metrics.knn_k=" << knn_k << '\n'
        << "metrics.selection_raw_features=" << (selection_raw_features ? 1 : 0) << '\n'
        << "run.seeds=" << seed_list << '\n'
        << "run.output_dir=" << output_dir << '\n'
        << "run.workers=" << workers << '\n';
    return out.str();
}

std::string ExperimentConfig::hash() const {
    // FNV-1a 64 over the canonical serialization
    const std::string s = canonical_string();
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char ch : s) {
        h ^= ch;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

}  // namespace akd
