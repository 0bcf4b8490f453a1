#include "akd/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "akd/rng.hpp"

namespace akd {

bool PoolState::is_labeled(int id) const {
    return std::binary_search(labeled_ids.begin(), labeled_ids.end(), id);
}

bool PoolState::is_unlabeled(int id) const {
    return std::binary_search(unlabeled_ids.begin(), unlabeled_ids.end(), id);
}

namespace {

// C orthonormal rows from seeded Gaussian draws (Gram-Schmidt).
std::vector<Vec> orthonormal_directions(int count, int dim, Rng& rng) {
    std::vector<Vec> dirs;
    dirs.reserve(static_cast<std::size_t>(count));
    while (static_cast<int>(dirs.size()) < count) {
        Vec v(static_cast<std::size_t>(dim));
        for (double& x : v) x = rng.normal();
        for (const Vec& u : dirs) {
            const double proj = dot(v, u);
            for (int i = 0; i < dim; ++i) v[static_cast<std::size_t>(i)] -= proj * u[static_cast<std::size_t>(i)];
        }
        const double norm = l2_norm(v);
        if (norm < 1e-8) continue;  // rare collinear draw, resample
        for (double& x : v) x /= norm;
        dirs.push_back(std::move(v));
    }
    return dirs;
}

}  // namespace

Dataset generate_gaussian_mixture(int class_count, int per_class, int dim, double spread,
                                  std::uint64_t seed) {
    if (class_count < 2) throw ConfigError("generate_gaussian_mixture: class_count must be >= 2");
    if (per_class < 1) throw ConfigError("generate_gaussian_mixture: per_class must be >= 1");
    if (dim < 2) throw ConfigError("generate_gaussian_mixture: dim must be >= 2");
    if (class_count > dim)
        throw ConfigError("generate_gaussian_mixture: class_count must be <= dim");
    if (!(spread > 0.0)) throw ConfigError("generate_gaussian_mixture: spread must be positive");

    Rng rng(substream_seed(seed, Stream::DataGen));
    const std::vector<Vec> dirs = orthonormal_directions(class_count, dim, rng);

    Dataset ds;
    ds.class_count = class_count;
    ds.feature_dim = dim;
    ds.samples.reserve(static_cast<std::size_t>(class_count) * static_cast<std::size_t>(per_class));
    int id = 0;
    for (int c = 0; c < class_count; ++c) {
        for (int n = 0; n < per_class; ++n) {
            Sample s;
            s.id = id++;
            s.label = c;
            s.features.resize(static_cast<std::size_t>(dim));
            for (int i = 0; i < dim; ++i)
                s.features[static_cast<std::size_t>(i)] =
                    spread * dirs[static_cast<std::size_t>(c)][static_cast<std::size_t>(i)] + rng.normal();
            ds.samples.push_back(std::move(s));
        }
    }
    return ds;
}

Dataset load_embeddings(const std::string& features_path, const std::string& labels_path,
                        int class_count) {
    std::ifstream ff(features_path);
    if (!ff) throw IngestError("load_embeddings: cannot open " + features_path);
    std::ifstream lf(labels_path);
    if (!lf) throw IngestError("load_embeddings: cannot open " + labels_path);

    Dataset ds;
    std::string line;
    int row = 0;
    int dim = -1;
    while (std::getline(ff, line)) {
        if (line.empty()) continue;
        Sample s;
        s.id = row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            std::size_t pos = 0;
            double v = 0.0;
            try {
                v = std::stod(cell, &pos);
            } catch (const std::exception&) {
                throw IngestError("load_embeddings: bad float at feature row " +
                                  std::to_string(row));
            }
            if (pos != cell.size() || !std::isfinite(v))
                throw IngestError("load_embeddings: bad float at feature row " +
                                  std::to_string(row));
            s.features.push_back(v);
        }
        if (dim < 0) dim = static_cast<int>(s.features.size());
        if (static_cast<int>(s.features.size()) != dim || s.features.empty())
            throw IngestError("load_embeddings: ragged feature row " + std::to_string(row));
        ds.samples.push_back(std::move(s));
        ++row;
    }
    if (ds.samples.empty()) throw IngestError("load_embeddings: no feature rows in " + features_path);
    ds.feature_dim = dim;

    int label_row = 0;
    int max_label = -1;
    while (std::getline(lf, line)) {
        if (line.empty()) continue;
        if (label_row >= ds.size())
            throw IngestError("load_embeddings: more labels than feature rows");
        int lbl = 0;
        try {
            std::size_t pos = 0;
            lbl = std::stoi(line, &pos);
            while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\r')) ++pos;
            if (pos != line.size()) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw IngestError("load_embeddings: bad label at row " + std::to_string(label_row));
        }
        if (lbl < 0) throw IngestError("load_embeddings: negative label at row " +
                                       std::to_string(label_row));
        if (class_count > 0 && lbl >= class_count)
            throw IngestError("load_embeddings: label " + std::to_string(lbl) + " at row " +
                              std::to_string(label_row) + " >= class_count " +
                              std::to_string(class_count));
        ds.samples[static_cast<std::size_t>(label_row)].label = lbl;
        max_label = std::max(max_label, lbl);
        ++label_row;
    }
    if (label_row != ds.size())
        throw IngestError("load_embeddings: row count mismatch (" + std::to_string(ds.size()) +
                          " feature rows vs " + std::to_string(label_row) + " labels)");
    ds.class_count = class_count > 0 ? class_count : max_label + 1;
    return ds;
}

void save_embeddings(const Dataset& dataset, const std::string& features_path,
                     const std::string& labels_path) {
    std::ofstream ff(features_path);
    if (!ff) throw IngestError("save_embeddings: cannot write " + features_path);
    std::ofstream lf(labels_path);
    if (!lf) throw IngestError("save_embeddings: cannot write " + labels_path);
    char buf[40];
    for (const Sample& s : dataset.samples) {
        for (std::size_t i = 0; i < s.features.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", s.features[i]);
            if (i) ff << ',';
            ff << buf;
        }
        ff << '\n';
        lf << s.label << '\n';
    }
}

PoolState initial_split(const Dataset& dataset, int shots_per_class, std::uint64_t seed) {
    if (shots_per_class < 1) throw ConfigError("initial_split: shots_per_class must be >= 1");
    std::vector<std::vector<int>> by_class(static_cast<std::size_t>(dataset.class_count));
    for (const Sample& s : dataset.samples)
        by_class[static_cast<std::size_t>(s.label)].push_back(s.id);

    Rng rng(substream_seed(seed, Stream::Split));
    PoolState pool;
    pool.class_count = dataset.class_count;
    for (int c = 0; c < dataset.class_count; ++c) {
        auto& ids = by_class[static_cast<std::size_t>(c)];
        if (static_cast<int>(ids.size()) < shots_per_class)
            throw ConfigError("initial_split: class " + std::to_string(c) + " has " +
                              std::to_string(ids.size()) + " samples, need " +
                              std::to_string(shots_per_class));
        for (int id : rng.sample_without_replacement(ids, static_cast<std::size_t>(shots_per_class)))
            pool.labeled_ids.push_back(id);
    }
    std::sort(pool.labeled_ids.begin(), pool.labeled_ids.end());
    for (const Sample& s : dataset.samples)
        if (!pool.is_labeled(s.id)) pool.unlabeled_ids.push_back(s.id);
    return pool;
}

void subsample_unlabeled(PoolState& pool, int max_unlabeled, std::uint64_t seed) {
    if (max_unlabeled <= 0 || static_cast<int>(pool.unlabeled_ids.size()) <= max_unlabeled) return;
    Rng rng(substream_seed(seed, Stream::Subsample));
    auto kept = rng.sample_without_replacement(pool.unlabeled_ids,
                                               static_cast<std::size_t>(max_unlabeled));
    std::sort(kept.begin(), kept.end());
    pool.unlabeled_ids = std::move(kept);
}

void annotate(PoolState& pool, const std::vector<int>& query_ids) {
    std::vector<int> sorted = query_ids;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        throw ProtocolError("annotate: duplicate id in query");
    for (int id : sorted)
        if (!pool.is_unlabeled(id))
            throw ProtocolError("annotate: id " + std::to_string(id) + " is not unlabeled");

    std::vector<int> remaining;
    remaining.reserve(pool.unlabeled_ids.size() - sorted.size());
    std::set_difference(pool.unlabeled_ids.begin(), pool.unlabeled_ids.end(), sorted.begin(),
                        sorted.end(), std::back_inserter(remaining));
    pool.unlabeled_ids = std::move(remaining);

    std::vector<int> merged;
    merged.reserve(pool.labeled_ids.size() + sorted.size());
    std::merge(pool.labeled_ids.begin(), pool.labeled_ids.end(), sorted.begin(), sorted.end(),
               std::back_inserter(merged));
    pool.labeled_ids = std::move(merged);
}

}  // namespace akd
