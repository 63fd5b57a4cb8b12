#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "helpers.hpp"
#include "iids/dataset.hpp"
#include "iids/error.hpp"

using namespace iids;

TEST_CASE("load_csv parses values, header, and first-appearance classes") {
    const auto path = helpers::write_file("basic.csv",
                                          "a,b,label\n"
                                          "1.5,2,benign\n"
                                          "-3e2,0.25,attack\n"
                                          "4,5,benign\n");
    const Dataset data = load_csv(path);
    CHECK(data.n() == 3);
    CHECK(data.k() == 2);
    CHECK(data.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(data.class_names == std::vector<std::string>{"benign", "attack"});
    CHECK(data.labels == std::vector<int>{0, 1, 0});
    CHECK(data.at(1, 0) == -300.0);
    CHECK(data.at(1, 1) == 0.25);
}

TEST_CASE("load_csv honors RFC 4180 quoting and CRLF") {
    const auto path = helpers::write_file("quoted.csv",
                                          "a,label\r\n"
                                          "1,\"web, attack\"\r\n"
                                          "2,\"say \"\"hi\"\"\"\r\n"
                                          "3,\"two\nlines\"\r\n");
    const Dataset data = load_csv(path);
    CHECK(data.n() == 3);
    CHECK(data.class_names ==
          std::vector<std::string>{"web, attack", "say \"hi\"", "two\nlines"});
}

TEST_CASE("load_csv accepts a label column anywhere") {
    const auto path = helpers::write_file("midlabel.csv",
                                          "a,label,b\n"
                                          "1,x,2\n"
                                          "3,y,4\n");
    const Dataset data = load_csv(path);
    CHECK(data.feature_names == std::vector<std::string>{"a", "b"});
    CHECK(data.at(0, 1) == 2.0);
    CHECK(data.at(1, 0) == 3.0);
}

TEST_CASE("load_csv with canonical class names rejects strangers") {
    const auto path = helpers::write_file("canon.csv",
                                          "a,label\n"
                                          "1,dog\n"
                                          "2,cat\n");
    const Dataset data = load_csv(path, "label", {"cat", "dog", "bird"});
    CHECK(data.class_names.size() == 3);
    CHECK(data.labels == std::vector<int>{1, 0});
    CHECK_THROWS_AS((void)load_csv(path, "label", {"cat"}), DataError);
}

TEST_CASE("load_csv error cases") {
    CHECK_THROWS_AS((void)load_csv(helpers::scratch_file("missing.csv")), DataError);
    CHECK_THROWS_AS((void)load_csv(helpers::write_file("empty.csv", "")), DataError);
    CHECK_THROWS_AS((void)load_csv(helpers::write_file("headeronly.csv", "a,label\n")),
                    DataError);
    CHECK_THROWS_AS((void)load_csv(helpers::write_file("dupheader.csv", "a,a,label\n1,2,x\n")),
                    DataError);
    CHECK_THROWS_AS((void)load_csv(helpers::write_file("nolabel.csv", "a,b\n1,2\n")), DataError);
    CHECK_THROWS_AS((void)load_csv(helpers::write_file("ragged.csv", "a,label\n1,2,x\n")),
                    DataError);
    CHECK_THROWS_AS((void)load_csv(helpers::write_file("openquote.csv", "a,label\n1,\"x\n")),
                    DataError);

    const auto nan_path = helpers::write_file("nan.csv", "a,label\n nan ,x\n");
    CHECK_THROWS_WITH_AS((void)load_csv(nan_path), doctest::Contains("column 'a'"), DataError);
    const auto text_path = helpers::write_file("text.csv", "a,label\n1,x\noops,y\n");
    CHECK_THROWS_WITH_AS((void)load_csv(text_path), doctest::Contains("row 2"), DataError);
}

TEST_CASE("save_csv and load_csv round-trip doubles exactly") {
    Dataset data = helpers::make_dataset(
        {{0.1, 1e-300}, {-1.0 / 3.0, 2.5e17}, {std::nextafter(1.0, 2.0), -0.0}}, {0, 1, 0},
        {"be,nign", "at\"tack"});
    data.feature_names = {"f one", "f,two"};
    const auto path = helpers::scratch_file("roundtrip.csv");
    save_csv(data, path);
    const Dataset back = load_csv(path);
    CHECK(back.features == data.features);
    CHECK(back.labels == data.labels);
    CHECK(back.feature_names == data.feature_names);
    CHECK(back.class_names == data.class_names);
}

TEST_CASE("load_csv_columns pulls named columns and skips the rest") {
    const auto path = helpers::write_file("cols.csv",
                                          "a,note,b,label\n"
                                          "1,hello,2,x\n"
                                          "3,free text,4,y\n");
    const Dataset data = load_csv_columns(path, {"b", "a"});
    CHECK(data.n() == 2);
    CHECK(data.labels.empty());
    CHECK(data.feature_names == std::vector<std::string>{"b", "a"});
    CHECK(data.at(0, 0) == 2.0);
    CHECK(data.at(0, 1) == 1.0);
    CHECK_THROWS_AS((void)load_csv_columns(path, {"nope"}), DataError);
}

TEST_CASE("fit_scaler computes means and population stddevs") {
    const Dataset data = helpers::make_dataset({{1, 10}, {2, 10}, {3, 10}}, {0, 0, 1});
    const ScalerParams params = fit_scaler(data);
    CHECK(params.means[0] == doctest::Approx(2.0));
    CHECK(params.stddevs[0] == doctest::Approx(std::sqrt(2.0 / 3.0)));
    CHECK(params.means[1] == doctest::Approx(10.0));
    CHECK(params.stddevs[1] == 0.0);

    const Dataset scaled = apply_scaler(data, params);
    CHECK(scaled.at(0, 0) == doctest::Approx(-std::sqrt(1.5)));
    CHECK(scaled.at(1, 0) == doctest::Approx(0.0));
    // Zero-variance columns collapse to zero instead of dividing by zero.
    for (std::size_t i = 0; i < 3; ++i) CHECK(scaled.at(i, 1) == 0.0);

    const ScalerParams refit = fit_scaler(scaled);
    CHECK(refit.means[0] == doctest::Approx(0.0));
    CHECK(refit.stddevs[0] == doctest::Approx(1.0));

    ScalerParams narrow;
    narrow.means = {0.0};
    narrow.stddevs = {1.0};
    CHECK_THROWS_AS((void)apply_scaler(data, narrow), DataError);
}

namespace {

Dataset numbered_dataset(std::size_t n, const std::vector<std::size_t>& class_sizes) {
    std::vector<std::vector<double>> rows;
    std::vector<int> labels;
    std::size_t i = 0;
    for (std::size_t c = 0; c < class_sizes.size(); ++c) {
        for (std::size_t j = 0; j < class_sizes[c]; ++j, ++i) {
            rows.push_back({static_cast<double>(i)});
            labels.push_back(static_cast<int>(c));
        }
    }
    (void)n;
    return helpers::make_dataset(rows, labels);
}

}  // namespace

TEST_CASE("split produces disjoint covering partitions at the right sizes") {
    const Dataset data = numbered_dataset(100, {50, 25, 25});
    SplitSpec spec;
    spec.train_fraction = 0.8;
    spec.seed = 3;

    for (const bool stratified : {true, false}) {
        spec.stratified = stratified;
        const SplitResult result = split_with_indices(data, spec);
        CHECK(result.train.n() == 80);
        CHECK(result.test.n() == 20);
        std::set<std::size_t> seen(result.train_rows.begin(), result.train_rows.end());
        seen.insert(result.test_rows.begin(), result.test_rows.end());
        CHECK(seen.size() == 100);

        if (stratified) {
            CHECK(result.train.class_counts() == std::vector<std::size_t>{40, 20, 20});
        }
        // Row identity survives: the feature value doubles as a row id.
        for (std::size_t i = 0; i < result.train.n(); ++i) {
            CHECK(result.train.at(i, 0) == static_cast<double>(result.train_rows[i]));
        }
    }
}

TEST_CASE("split is deterministic in the seed and varies across seeds") {
    const Dataset data = numbered_dataset(60, {30, 30});
    SplitSpec spec;
    spec.seed = 9;
    const auto a = split_with_indices(data, spec);
    const auto b = split_with_indices(data, spec);
    CHECK(a.train_rows == b.train_rows);
    CHECK(a.test_rows == b.test_rows);

    spec.seed = 10;
    const auto c = split_with_indices(data, spec);
    CHECK(a.train_rows != c.train_rows);
}

TEST_CASE("split depends on labels and seed only, never on features") {
    Dataset data = numbered_dataset(40, {25, 15});
    SplitSpec spec;
    spec.seed = 21;
    const auto clean = split_with_indices(data, spec);
    for (double& v : data.features) v = v * -417.0 + 3.25;
    const auto poisoned = split_with_indices(data, spec);
    CHECK(clean.train_rows == poisoned.train_rows);
    CHECK(clean.test_rows == poisoned.test_rows);
}

TEST_CASE("split rejects degenerate fractions and empty classes") {
    Dataset data = numbered_dataset(10, {5, 5});
    SplitSpec spec;
    spec.train_fraction = 1.0;
    CHECK_THROWS_AS((void)split(data, spec), DataError);
    spec.train_fraction = 0.0;
    CHECK_THROWS_AS((void)split(data, spec), DataError);

    spec.train_fraction = 0.8;
    data.class_names.push_back("ghost");
    CHECK_THROWS_AS((void)split(data, spec), DataError);
    spec.stratified = false;
    CHECK_NOTHROW((void)split(data, spec));
}

namespace {

LabelHierarchy tiny_hierarchy() {
    return LabelHierarchy(
        {
            {"normal", "Benign"},
            {"syn_flood", "DoS"},
            {"udp_flood", "DoS"},
            {"port_scan", "Recon"},
        },
        "Benign");
}

}  // namespace

TEST_CASE("relabel maps fine labels to categories and binary") {
    const Dataset fine = helpers::make_dataset(
        {{1}, {2}, {3}, {4}}, {0, 1, 2, 3}, {"syn_flood", "normal", "port_scan", "udp_flood"});
    const LabelHierarchy h = tiny_hierarchy();

    const Dataset same = relabel(fine, h, ClassLevel::kFine34);
    CHECK(same.labels == fine.labels);
    CHECK(same.class_names == fine.class_names);

    const Dataset cat = relabel(fine, h, ClassLevel::kCategory8);
    // First-appearance order over the original class order.
    CHECK(cat.class_names == std::vector<std::string>{"DoS", "Benign", "Recon"});
    CHECK(cat.labels == std::vector<int>{0, 1, 2, 0});
    CHECK(cat.features == fine.features);

    const Dataset bin = relabel(fine, h, ClassLevel::kBinary2);
    CHECK(bin.class_names == std::vector<std::string>{"attack", "benign"});
    CHECK(bin.labels == std::vector<int>{0, 1, 0, 0});

    const Dataset stranger = helpers::make_dataset({{1}}, {0}, {"zero_day"});
    CHECK_THROWS_AS((void)relabel(stranger, h, ClassLevel::kCategory8), DataError);
}

TEST_CASE("label hierarchy file round-trips and validates") {
    const LabelHierarchy h = tiny_hierarchy();
    const auto path = helpers::scratch_file("hier.tsv");
    h.save(path);
    const LabelHierarchy back = LabelHierarchy::load(path);
    CHECK(back.fine_labels() == h.fine_labels());
    CHECK(back.categories() == h.categories());
    CHECK(back.benign_category() == "Benign");
    CHECK(back.category_of("syn_flood") == "DoS");
    CHECK(back.binary_of("normal") == "benign");
    CHECK(back.binary_of("port_scan") == "attack");
    CHECK(back.contains("udp_flood"));
    CHECK_FALSE(back.contains("nonesuch"));
    CHECK_THROWS_AS((void)back.category_of("nonesuch"), DataError);
}

TEST_CASE("label hierarchy parser handles comments and rejects bad files") {
    const auto ok = helpers::write_file("hier_ok.tsv",
                                        "# comment\n"
                                        "benign Clean\n"
                                        "\n"
                                        "ping Clean   # inline comment\n"
                                        "flood DoS\n");
    const LabelHierarchy h = LabelHierarchy::load(ok);
    CHECK(h.categories() == std::vector<std::string>{"Clean", "DoS"});

    CHECK_THROWS_AS((void)LabelHierarchy::load(helpers::write_file("hier_nob.tsv", "a B\n")),
                    DataError);
    CHECK_THROWS_AS(
        (void)LabelHierarchy::load(helpers::write_file("hier_three.tsv",
                                                       "benign C\na B extra\n")),
        DataError);
    CHECK_THROWS_AS(
        (void)LabelHierarchy::load(helpers::write_file("hier_dup.tsv",
                                                       "benign C\na C\na D\n")),
        DataError);
    CHECK_THROWS_AS((void)LabelHierarchy::load(helpers::write_file("hier_empty.tsv", "")),
                    DataError);
    // The benign directive must name a category that actually occurs.
    CHECK_THROWS_AS(
        (void)LabelHierarchy::load(helpers::write_file("hier_ghost.tsv",
                                                       "benign Ghost\na B\n")),
        DataError);
}

TEST_CASE("bundled traffic hierarchy covers 34 labels in 8 categories") {
    const LabelHierarchy h =
        LabelHierarchy::load(std::string(IIDS_SOURCE_DIR) + "/data/ciciot2023_hierarchy.tsv");
    CHECK(h.fine_labels().size() == 34);
    CHECK(h.categories().size() == 8);
    CHECK(h.benign_category() == "BenignTraffic");
    CHECK(h.category_of("DDoS-ICMP_Flood") == "DDoS");
    CHECK(h.category_of("DictionaryBruteForce") == "BruteForce");
    CHECK(h.category_of("MITM-ArpSpoofing") == "Spoofing");
    CHECK(h.binary_of("BenignTraffic") == "benign");
    CHECK(h.binary_of("XSS") == "attack");
}

TEST_CASE("select_columns keeps requested features in order") {
    const Dataset data = helpers::make_dataset({{1, 2, 3}, {4, 5, 6}}, {0, 1});
    const Dataset picked = select_columns(data, std::vector<std::size_t>{2, 0});
    CHECK(picked.feature_names == std::vector<std::string>{"x2", "x0"});
    CHECK(picked.at(0, 0) == 3.0);
    CHECK(picked.at(1, 1) == 4.0);
    CHECK(picked.labels == data.labels);
    CHECK_THROWS_AS((void)select_columns(data, std::vector<std::size_t>{3}), DataError);
}

TEST_CASE("dataset validation and counters") {
    Dataset data = helpers::make_dataset({{1}, {2}, {3}}, {0, 1, 0});
    CHECK_NOTHROW(data.validate());
    CHECK(data.class_counts() == std::vector<std::size_t>{2, 1});
    CHECK(data.column(0) == std::vector<double>{1, 2, 3});

    Dataset bad_label = data;
    bad_label.labels[0] = 7;
    CHECK_THROWS_AS(bad_label.validate(), DataError);

    Dataset bad_shape = data;
    bad_shape.features.pop_back();
    CHECK_THROWS_AS(bad_shape.validate(), DataError);

    Dataset dup_names = data;
    dup_names.feature_names = {"x0"};
    CHECK_NOTHROW(dup_names.validate());
    Dataset two = helpers::make_dataset({{1, 2}}, {0});
    two.feature_names = {"same", "same"};
    CHECK_THROWS_AS(two.validate(), DataError);
}
