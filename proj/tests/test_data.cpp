#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "akd/data.hpp"
#include "akd/rng.hpp"

using namespace akd;
namespace fs = std::filesystem;

namespace {

std::string temp_path(const std::string& name) {
    return (fs::temp_directory_path() / ("akd_data_" + name)).string();
}

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// classify each sample by its nearest empirical class mean
double nearest_mean_accuracy(const Dataset& ds) {
    std::vector<Vec> means(static_cast<std::size_t>(ds.class_count),
                           Vec(static_cast<std::size_t>(ds.feature_dim), 0.0));
    std::vector<int> counts(static_cast<std::size_t>(ds.class_count), 0);
    for (const Sample& s : ds.samples) {
        for (int i = 0; i < ds.feature_dim; ++i)
            means[static_cast<std::size_t>(s.label)][static_cast<std::size_t>(i)] +=
                s.features[static_cast<std::size_t>(i)];
        ++counts[static_cast<std::size_t>(s.label)];
    }
    for (int c = 0; c < ds.class_count; ++c)
        for (double& x : means[static_cast<std::size_t>(c)])
            x /= static_cast<double>(counts[static_cast<std::size_t>(c)]);
    int correct = 0;
    for (const Sample& s : ds.samples) {
        int best = 0;
        double best_d = l2_distance(s.features, means[0]);
        for (int c = 1; c < ds.class_count; ++c) {
            const double d = l2_distance(s.features, means[static_cast<std::size_t>(c)]);
            if (d < best_d) {
                best_d = d;
                best = c;
            }
        }
        if (best == s.label) ++correct;
    }
    return static_cast<double>(correct) / ds.size();
}

}  // namespace

TEST_CASE("gaussian mixture cardinality and labels") {
    const Dataset ds = generate_gaussian_mixture(2, 1, 2, 1.0, 3);
    REQUIRE(ds.size() == 2);
    CHECK(ds.samples[0].label != ds.samples[1].label);
    CHECK(ds.samples[0].id == 0);
    CHECK(ds.samples[1].id == 1);
}

TEST_CASE("gaussian mixture is separable at large spread") {
    const Dataset ds = generate_gaussian_mixture(5, 40, 8, 50.0, 9);
    CHECK(nearest_mean_accuracy(ds) >= 0.99);
}

TEST_CASE("gaussian mixture determinism") {
    const Dataset a = generate_gaussian_mixture(4, 10, 6, 2.0, 77);
    const Dataset b = generate_gaussian_mixture(4, 10, 6, 2.0, 77);
    REQUIRE(a.size() == b.size());
    for (int i = 0; i < a.size(); ++i) {
        CHECK(a.samples[static_cast<std::size_t>(i)].features ==
              b.samples[static_cast<std::size_t>(i)].features);  // bit-identical
        CHECK(a.samples[static_cast<std::size_t>(i)].label ==
              b.samples[static_cast<std::size_t>(i)].label);
    }
    const Dataset c = generate_gaussian_mixture(4, 10, 6, 2.0, 78);
    CHECK(a.samples[0].features != c.samples[0].features);
}

TEST_CASE("gaussian mixture rejects bad shapes") {
    CHECK_THROWS_AS(generate_gaussian_mixture(1, 5, 4, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(generate_gaussian_mixture(3, 0, 4, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(generate_gaussian_mixture(3, 5, 1, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(generate_gaussian_mixture(5, 5, 4, 1.0, 0), ConfigError);  // C > d
    CHECK_THROWS_AS(generate_gaussian_mixture(3, 5, 4, 0.0, 0), ConfigError);
}

TEST_CASE("load_embeddings parses matching files") {
    const std::string fpath = temp_path("feat.csv");
    const std::string lpath = temp_path("labels.txt");
    {
        std::ofstream f(fpath);
        f << "1.5,2.5\n-0.25,0\n3,4\n";
        std::ofstream l(lpath);
        l << "0\n1\n1\n";
    }
    const Dataset ds = load_embeddings(fpath, lpath);
    REQUIRE(ds.size() == 3);
    CHECK(ds.feature_dim == 2);
    CHECK(ds.class_count == 2);
    CHECK(ds.samples[0].features == Vec{1.5, 2.5});
    CHECK(ds.samples[2].label == 1);
}

TEST_CASE("load_embeddings names the offending row") {
    const std::string fpath = temp_path("ragged.csv");
    const std::string lpath = temp_path("ragged_labels.txt");
    {
        std::ofstream f(fpath);
        f << "1,2\n3\n";
        std::ofstream l(lpath);
        l << "0\n0\n";
    }
    try {
        load_embeddings(fpath, lpath);
        FAIL("expected IngestError");
    } catch (const IngestError& e) {
        CHECK(std::string(e.what()).find("row 1") != std::string::npos);
    }

    {
        std::ofstream f(fpath);
        f << "1,2\n3,4\n";
        std::ofstream l(lpath);
        l << "0\n7\n";
    }
    CHECK_THROWS_AS(load_embeddings(fpath, lpath, 3), IngestError);  // label >= C
    CHECK_THROWS_AS(load_embeddings(temp_path("missing.csv"), lpath), IngestError);
}

TEST_CASE("load_embeddings rejects row count mismatch") {
    const std::string fpath = temp_path("mismatch.csv");
    const std::string lpath = temp_path("mismatch_labels.txt");
    {
        std::ofstream f(fpath);
        f << "1,2\n3,4\n";
        std::ofstream l(lpath);
        l << "0\n";
    }
    CHECK_THROWS_AS(load_embeddings(fpath, lpath), IngestError);
}

TEST_CASE("save then load round-trips to identical text") {
    const Dataset ds = generate_gaussian_mixture(3, 7, 4, 1.7, 21);
    const std::string f1 = temp_path("rt1_feat.csv"), l1 = temp_path("rt1_lab.txt");
    const std::string f2 = temp_path("rt2_feat.csv"), l2 = temp_path("rt2_lab.txt");
    save_embeddings(ds, f1, l1);
    const Dataset loaded = load_embeddings(f1, l1);
    save_embeddings(loaded, f2, l2);
    CHECK(slurp(f1) == slurp(f2));
    CHECK(slurp(l1) == slurp(l2));
}

TEST_CASE("initial split takes exactly shots per class") {
    const Dataset ds = generate_gaussian_mixture(5, 12, 8, 2.0, 5);
    const PoolState pool = initial_split(ds, 1, 99);
    REQUIRE(pool.labeled_ids.size() == 5);
    std::set<int> classes;
    for (int id : pool.labeled_ids) classes.insert(ds.label_of(id));
    CHECK(classes.size() == 5);
    CHECK(pool.unlabeled_ids.size() == 55);

    const PoolState again = initial_split(ds, 1, 99);
    CHECK(again.labeled_ids == pool.labeled_ids);

    // shots equal to the full class size empties the unlabeled pool
    const PoolState full = initial_split(ds, 12, 99);
    CHECK(full.labeled_ids.size() == 60);
    CHECK(full.unlabeled_ids.empty());

    CHECK_THROWS_AS(initial_split(ds, 13, 99), ConfigError);
}

TEST_CASE("annotate moves ids and enforces the protocol") {
    const Dataset ds = generate_gaussian_mixture(3, 4, 4, 2.0, 5);
    PoolState pool = initial_split(ds, 1, 1);
    const std::size_t labeled_before = pool.labeled_ids.size();
    const int target = pool.unlabeled_ids.front();
    annotate(pool, {target});
    CHECK(pool.labeled_ids.size() == labeled_before + 1);
    CHECK(pool.is_labeled(target));
    CHECK_FALSE(pool.is_unlabeled(target));

    CHECK_THROWS_AS(annotate(pool, {target}), ProtocolError);  // already labeled
    const int dup = pool.unlabeled_ids.front();
    CHECK_THROWS_AS(annotate(pool, std::vector<int>{dup, dup}), ProtocolError);
}

TEST_CASE("pool partition invariant under random annotation sequences") {
    const Dataset ds = generate_gaussian_mixture(4, 15, 6, 2.0, 17);
    Rng rng(123);
    for (int trial = 0; trial < 20; ++trial) {
        PoolState pool = initial_split(ds, 2, rng.next_u64());
        while (!pool.unlabeled_ids.empty()) {
            const std::size_t q =
                1 + rng.uniform_index(std::min<std::size_t>(5, pool.unlabeled_ids.size()));
            const std::vector<int> query =
                Rng(rng.next_u64()).sample_without_replacement(pool.unlabeled_ids, q);
            annotate(pool, query);
            // partition: disjoint and jointly exhaustive
            std::set<int> all(pool.labeled_ids.begin(), pool.labeled_ids.end());
            for (int id : pool.unlabeled_ids) {
                CHECK(all.find(id) == all.end());
                all.insert(id);
            }
            CHECK(static_cast<int>(all.size()) == ds.size());
        }
    }
}

TEST_CASE("labels never change across pool operations") {
    const Dataset ds = generate_gaussian_mixture(3, 10, 4, 2.0, 31);
    std::vector<int> before;
    for (const Sample& s : ds.samples) before.push_back(s.label);
    PoolState pool = initial_split(ds, 1, 7);
    annotate(pool, {pool.unlabeled_ids[0], pool.unlabeled_ids[5]});
    for (int i = 0; i < ds.size(); ++i)
        CHECK(ds.label_of(i) == before[static_cast<std::size_t>(i)]);
}

TEST_CASE("subsample_unlabeled caps the pool deterministically") {
    const Dataset ds = generate_gaussian_mixture(4, 25, 6, 2.0, 13);
    PoolState a = initial_split(ds, 1, 5);
    PoolState b = initial_split(ds, 1, 5);
    subsample_unlabeled(a, 30, 5);
    subsample_unlabeled(b, 30, 5);
    CHECK(a.unlabeled_ids.size() == 30);
    CHECK(a.unlabeled_ids == b.unlabeled_ids);
    for (int id : a.unlabeled_ids) CHECK_FALSE(a.is_labeled(id));

    PoolState c = initial_split(ds, 1, 5);
    const std::vector<int> original = c.unlabeled_ids;
    subsample_unlabeled(c, 100000, 5);  // larger than the pool: no-op
    CHECK(c.unlabeled_ids == original);
}
