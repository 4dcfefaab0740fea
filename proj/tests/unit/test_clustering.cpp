#include "classpulse/dendrogram.hpp"
#include "classpulse/dissimilarity.hpp"
#include "classpulse/error.hpp"
#include "classpulse/hierarchy.hpp"
#include "classpulse/partition.hpp"

#include "oracles/naive_agnes.hpp"

#include <doctest.h>

#include <random>

using namespace classpulse;

namespace {

// Raw Manhattan distances between the 1-D points {0, 1, 3, 7}.
DissimilarityMatrix line_points() {
    const std::vector<double> x{0, 1, 3, 7};
    std::vector<std::vector<double>> rows(4, std::vector<double>(4));
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) rows[i][j] = std::abs(x[i] - x[j]);
    return DissimilarityMatrix::from_rows(rows);
}

std::vector<double> heights(const MergeTrace& t) {
    std::vector<double> h;
    for (const auto& m : t.steps) h.push_back(m.height);
    return h;
}

oracle::Matrix to_rows(const DissimilarityMatrix& d) {
    oracle::Matrix m(d.size(), std::vector<double>(d.size()));
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = 0; j < d.size(); ++j) m[i][j] = d(i, j);
    return m;
}

// Two tight pairs far apart: {0,1} and {2,3}.
DissimilarityMatrix two_pairs() {
    return DissimilarityMatrix::from_rows({{0, 1, 50, 50}, {1, 0, 50, 50}, {50, 50, 0, 1}, {50, 50, 1, 0}});
}

}  // namespace

TEST_CASE("gower dissimilarity") {
    SUBCASE("hand-evaluated example") {
        auto d = gower_dissimilarity(FeatureMatrix::numeric({{2, 0, 1, 3}, {0, 0, 1, 1}, {4, 2, 3, 3}}));
        CHECK(d(0, 1) == doctest::Approx(0.375).epsilon(1e-15));
        CHECK(d.feature_ranges() == std::vector<double>{4, 2, 2, 2});
        CHECK(d(0, 0) == 0.0);
        CHECK(d(1, 0) == d(0, 1));
    }
    SUBCASE("zero-range column is left out") {
        auto d = gower_dissimilarity(FeatureMatrix::numeric({{5, 0}, {5, 1}}));
        CHECK(d(0, 1) == 1.0);
    }
    SUBCASE("identical rows") {
        auto d = gower_dissimilarity(FeatureMatrix::numeric({{1, 2}, {1, 2}, {3, 0}}));
        CHECK(d(0, 1) == 0.0);
    }
    SUBCASE("categorical mismatch") {
        auto fm = FeatureMatrix::numeric({{0, 0}, {1, 0}, {2, 4}});
        fm.feature_kinds[0] = FeatureKind::Categorical;
        auto d = gower_dissimilarity(fm);
        CHECK(d(0, 1) == doctest::Approx(0.5));
        CHECK(d(0, 2) == doctest::Approx(1.0));
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(gower_dissimilarity(FeatureMatrix::numeric({})), StructuralError);
        CHECK_THROWS_AS(gower_dissimilarity(FeatureMatrix::numeric({{1, 1}, {1, 1}})), DegenerateFeaturesError);
        CHECK_NOTHROW(gower_dissimilarity(FeatureMatrix::numeric({{1, 1}})));
    }
    SUBCASE("agrees with the oracle") {
        std::mt19937_64 rng(3);
        std::uniform_int_distribution<int> v(0, 5);
        for (int rep = 0; rep < 50; ++rep) {
            std::vector<std::vector<double>> rows(7, std::vector<double>(3));
            for (auto& r : rows)
                for (auto& x : r) x = v(rng);
            rows[0][0] = 0;
            rows[1][0] = 5;
            auto d = gower_dissimilarity(FeatureMatrix::numeric(rows));
            CHECK(to_rows(d) == oracle::gower(rows));
        }
    }
}

TEST_CASE("dissimilarity matrix validation") {
    CHECK_THROWS_AS(DissimilarityMatrix::from_rows({{0, 1}, {2, 0}}), StructuralError);
    CHECK_THROWS_AS(DissimilarityMatrix::from_rows({{1, 1}, {1, 0}}), StructuralError);
    CHECK_THROWS_AS(DissimilarityMatrix::from_rows({{0, -1}, {-1, 0}}), StructuralError);
    CHECK_THROWS_AS(DissimilarityMatrix::from_rows({{0, 1, 2}, {1, 0}}), StructuralError);
}

TEST_CASE("agnes on four points on a line") {
    auto d = line_points();
    auto single = agnes(d, Linkage::Single);
    CHECK(heights(single.trace) == std::vector<double>{1, 2, 4});

    auto complete = agnes(d, Linkage::Complete);
    CHECK(heights(complete.trace) == std::vector<double>{1, 3, 7});
    REQUIRE(complete.trace.steps.size() == 3);
    CHECK(complete.trace.steps[0] == Merge{0, 1, 1.0, 2});
    CHECK(complete.trace.steps[1] == Merge{4, 2, 3.0, 3});
    CHECK(complete.trace.steps[2] == Merge{5, 3, 7.0, 4});
    CHECK(complete.ac.value == doctest::Approx(4.0 / 7.0).epsilon(1e-14));

    for (auto linkage : kAllLinkages) {
        auto model = agnes(d, linkage);
        std::vector<oracle::Step> expect = oracle::agnes(to_rows(d), static_cast<oracle::Rule>(linkage));
        REQUIRE(model.trace.steps.size() == expect.size());
        for (std::size_t t = 0; t < expect.size(); ++t) {
            CHECK(model.trace.steps[t].left == expect[t].left);
            CHECK(model.trace.steps[t].right == expect[t].right);
            CHECK(model.trace.steps[t].height == doctest::Approx(expect[t].height).epsilon(1e-12));
        }
    }
}

TEST_CASE("agnes edge cases") {
    auto d2 = DissimilarityMatrix::from_rows({{0, 0.25}, {0.25, 0}});
    for (auto linkage : kAllLinkages) {
        auto m = agnes(d2, linkage);
        REQUIRE(m.trace.steps.size() == 1);
        CHECK(m.trace.steps[0] == Merge{0, 1, 0.25, 2});
        CHECK(m.ac.value == 0.0);
    }
    CHECK_THROWS_AS(agnes(DissimilarityMatrix::from_rows({{0}}), Linkage::Ward), InsufficientObservationsError);
    CHECK(parse_linkage("ward") == Linkage::Ward);
    CHECK_FALSE(parse_linkage("centroid"));
}

TEST_CASE("ties go to the lexicographically least pair") {
    // All pairwise distances equal: always merge the two lowest canonical ids.
    std::vector<std::vector<double>> rows(5, std::vector<double>(5, 1.0));
    for (int i = 0; i < 5; ++i) rows[i][i] = 0.0;
    auto m = agnes(DissimilarityMatrix::from_rows(rows), Linkage::Average);
    CHECK(m.trace.steps[0].left == 0);
    CHECK(m.trace.steps[0].right == 1);
    CHECK(m.trace.steps[1].left == 5);
    CHECK(m.trace.steps[1].right == 2);
}

TEST_CASE("agglomerative coefficient") {
    MergeTrace equal{4, {{0, 1, 2.0, 2}, {2, 3, 2.0, 2}, {4, 5, 2.0, 4}}};
    CHECK(agglomerative_coefficient(equal).value == 0.0);

    MergeTrace flat{3, {{0, 1, 0.0, 2}, {3, 2, 0.0, 3}}};
    auto ac = agglomerative_coefficient(flat);
    CHECK(ac.value == 0.0);
    CHECK(ac.degenerate);

    MergeTrace bad{3, {{0, 0, 1.0, 2}, {3, 2, 2.0, 3}}};
    CHECK_THROWS_AS(agglomerative_coefficient(bad), StructuralError);
}

TEST_CASE("model selection") {
    auto make = [](Linkage l, double ac) {
        ClusteringModel m;
        m.linkage = l;
        m.ac.value = ac;
        return m;
    };
    std::vector<ClusteringModel> strict{make(Linkage::Single, 0.3), make(Linkage::Complete, 0.6),
                                        make(Linkage::Average, 0.5), make(Linkage::Ward, 0.7)};
    CHECK(select_model(strict).linkage == Linkage::Ward);
    strict[1].ac.value = 0.9;
    CHECK(select_model(strict).linkage == Linkage::Complete);

    std::vector<ClusteringModel> tied{make(Linkage::Single, 0.5), make(Linkage::Complete, 0.5),
                                      make(Linkage::Average, 0.5), make(Linkage::Ward, 0.5)};
    CHECK(select_model(tied).linkage == Linkage::Ward);
    tied[3].ac.value = 0.4;
    CHECK(select_model(tied).linkage == Linkage::Complete);
    tied[1].ac.value = 0.4;
    CHECK(select_model(tied).linkage == Linkage::Average);
}

TEST_CASE("dendrogram") {
    auto single = agnes(line_points(), Linkage::Single);
    auto dg = build_dendrogram(single.trace, {"a", "b", "c", "d"});
    CHECK(dg.leaf_count() == 4);
    CHECK(dg.root.height == 4.0);
    REQUIRE(dg.root.children.size() == 2);
    const auto& inner = dg.root.children[0];
    CHECK(inner.height == 2.0);
    CHECK(inner.children[0].height == 1.0);
    CHECK(inner.children[0].children[0].label == "a");
    CHECK(inner.children[1].label == "c");
    CHECK(dg.root.children[1].label == "d");
    CHECK(leaf_order(dg.root) == std::vector<std::size_t>{0, 1, 2, 3});

    auto two = build_dendrogram(MergeTrace{2, {{0, 1, 0.5, 2}}}, {"x", "y"});
    CHECK(two.root.children.size() == 2);
    CHECK(two.root.height == 0.5);
    CHECK_THROWS(build_dendrogram(single.trace, {"a"}));
}

TEST_CASE("cut_tree") {
    auto t = agnes(line_points(), Linkage::Single).trace;
    CHECK(cut_tree(t, 1).member_of == std::vector<std::size_t>{0, 0, 0, 0});
    CHECK(cut_tree(t, 4).member_of == std::vector<std::size_t>{0, 1, 2, 3});
    auto k2 = cut_tree(t, 2);
    CHECK(k2.member_of == std::vector<std::size_t>{0, 0, 0, 1});
    CHECK(k2.members() == std::vector<std::vector<std::size_t>>{{0, 1, 2}, {3}});
    CHECK_THROWS_AS(cut_tree(t, 0), InvalidKError);
    CHECK_THROWS_AS(cut_tree(t, 5), InvalidKError);
    CHECK(canonicalize({7, 3, 7, 9}).member_of == std::vector<std::size_t>{0, 1, 0, 2});
}

TEST_CASE("silhouette") {
    auto d = two_pairs();
    auto pairs = canonicalize({0, 0, 1, 1});
    CHECK(silhouette_width(d, pairs) > 0.9);
    CHECK_THROWS_AS(silhouette_width(d, canonicalize({0, 1, 2, 3})), InvalidKError);
    CHECK_THROWS_AS(silhouette_width(d, canonicalize({0, 0, 0, 0})), InvalidKError);

    // Every 2-partition of a random 6-point matrix against the definition.
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<std::vector<double>> rows(6, std::vector<double>(6, 0.0));
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) rows[i][j] = rows[j][i] = u(rng);
    auto rd = DissimilarityMatrix::from_rows(rows);
    for (unsigned mask = 1; mask < 63; ++mask) {
        std::vector<std::size_t> labels(6);
        for (int i = 0; i < 6; ++i) labels[i] = (mask >> i) & 1u;
        auto a = canonicalize(labels);
        CHECK(silhouette_width(rd, a) == doctest::Approx(oracle::silhouette(rows, a.member_of)).epsilon(1e-12));
    }
}

TEST_CASE("choose_k") {
    auto pairs = two_pairs();
    CHECK(choose_k(agnes(pairs, Linkage::Average).trace, pairs).k == 2);

    std::vector<std::vector<double>> rows(9, std::vector<double>(9, 0.0));
    for (int i = 0; i < 9; ++i)
        for (int j = 0; j < 9; ++j)
            if (i != j) rows[i][j] = (i / 3 == j / 3) ? 1.0 : 20.0;
    auto triplets = DissimilarityMatrix::from_rows(rows);
    auto choice = choose_k(agnes(triplets, Linkage::Average).trace, triplets);
    CHECK(choice.k == 3);
    CHECK(choice.silhouettes.size() == 7);

    std::vector<std::vector<double>> flat(5, std::vector<double>(5, 1.0));
    for (int i = 0; i < 5; ++i) flat[i][i] = 0.0;
    auto fd = DissimilarityMatrix::from_rows(flat);
    CHECK(choose_k(agnes(fd, Linkage::Average).trace, fd).k == 2);

    auto d2 = DissimilarityMatrix::from_rows({{0, 1}, {1, 0}});
    auto small = choose_k(agnes(d2, Linkage::Single).trace, d2);
    CHECK(small.k == 2);
    CHECK(small.insufficient);
}
