#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "tabsyn/mode_norm.hpp"

using namespace tabsyn;

namespace {

std::vector<double> gaussian_samples(double mean, double stddev, std::size_t n, Rng& rng) {
    std::vector<double> v(n);
    for (double& x : v) x = mean + stddev * rng.normal();
    return v;
}

ColumnModeModel two_mode_model() {
    return ColumnModeModel({{0.5, -1.0, 1.0}, {0.5, 1.0, 1.0}});
}

}  // namespace

TEST_CASE("vgm recovers a single gaussian", "[mode_norm]") {
    Rng rng(11);
    const std::vector<double> data = gaussian_samples(0.0, 1.0, 5000, rng);
    const ColumnModeModel model = fit_vgm(data, 10, 42);
    REQUIRE(model.mode_count() == 1);
    CHECK(std::abs(model.modes()[0].mean) < 0.1);
    CHECK(std::abs(model.modes()[0].stddev - 1.0) < 0.1);
}

TEST_CASE("vgm recovers three well-separated modes", "[mode_norm]") {
    Rng rng(12);
    std::vector<double> data;
    for (double mean : {-4.0, 0.0, 4.0}) {
        const auto part = gaussian_samples(mean, 0.5, 2000, rng);
        data.insert(data.end(), part.begin(), part.end());
    }
    const ColumnModeModel model = fit_vgm(data, 10, 7);
    REQUIRE(model.mode_count() == 3);
    CHECK(std::abs(model.modes()[0].mean - (-4.0)) < 0.15);
    CHECK(std::abs(model.modes()[1].mean - 0.0) < 0.15);
    CHECK(std::abs(model.modes()[2].mean - 4.0) < 0.15);
}

TEST_CASE("vgm rejects constant columns", "[mode_norm]") {
    const std::vector<double> constant(100, 7.0);
    CHECK_THROWS_AS(fit_vgm(constant, 10, 1), DegenerateColumn);
    CHECK_THROWS_AS(fit_vgm(std::vector<double>{3.0}, 10, 1), DegenerateColumn);
}

TEST_CASE("mode model invariants are enforced", "[mode_norm]") {
    CHECK_THROWS_AS(ColumnModeModel({}), Error);
    CHECK_THROWS_AS(ColumnModeModel({{0.5, 0.0, 0.0}}), Error);
    CHECK_THROWS_AS(ColumnModeModel({{0.0, 0.0, 1.0}}), Error);
    CHECK_THROWS_AS(ColumnModeModel({{0.7, 0.0, 1.0}, {0.7, 1.0, 1.0}}), Error);
}

TEST_CASE("mode probabilities hand cases", "[mode_norm]") {
    {
        // symmetric two-mode model: equidistant value gets equal densities
        const auto rho = mode_probabilities(two_mode_model(), 0.0);
        REQUIRE(rho.size() == 2);
        CHECK_THAT(rho[0], Catch::Matchers::WithinRel(rho[1], 1e-12));
    }
    {
        // single standard normal mode at the mean: 1/sqrt(2 pi)
        const ColumnModeModel single({{1.0, 0.0, 1.0}});
        const auto rho = mode_probabilities(single, 0.0);
        CHECK_THAT(rho[0],
                   Catch::Matchers::WithinRel(1.0 / std::sqrt(2.0 * std::numbers::pi), 1e-12));
    }
}

TEST_CASE("tail values underflow to the nearest-mean fallback", "[mode_norm]") {
    const ColumnModeModel model({{0.6, 0.0, 1.0}, {0.4, 100.0, 1.0}});
    const double far = 60.0;  // 60 stddevs from mode 1, 40 from mode 2
    const auto rho = mode_probabilities(model, far);
    CHECK(rho[0] < 1e-300);
    CHECK(rho[1] < 1e-300);
    Rng rng(13);
    const EncodedValue enc = encode_value(model, far, rng);
    CHECK(enc.beta[1] == 1.0);  // mode with the nearest mean wins
    CHECK(enc.alpha == -1.0);   // (60-100)/4 clamped
}

TEST_CASE("encode hand cases", "[mode_norm]") {
    Rng rng(14);
    const ColumnModeModel single({{1.0, 10.0, 2.0}});
    {
        const EncodedValue e = encode_value(single, 10.0, rng);
        CHECK(e.alpha == 0.0);
        CHECK(e.beta == std::vector<double>{1.0});
    }
    {
        const EncodedValue e = encode_value(single, 18.0, rng);
        CHECK(e.alpha == 1.0);  // (18-10)/(4*2)
    }
    {
        const ColumnModeModel unit({{1.0, 0.0, 1.0}});
        const EncodedValue e = encode_value(unit, 9.0, rng);
        CHECK(e.alpha == 1.0);  // raw 2.25 clamps to 1
    }
}

TEST_CASE("decode hand cases", "[mode_norm]") {
    const ColumnModeModel single({{1.0, 10.0, 2.0}});
    CHECK(decode_value(single, {0.5, {1.0}}) == 14.0);  // 10 + 0.5 * 8

    const ColumnModeModel two = two_mode_model();
    CHECK(decode_value(two, {0.0, {0.2, 0.8}}) == 1.0);  // relaxed beta, argmax picks mode 2
    CHECK_THROWS_AS(decode_value(two, {0.0, {1.0}}), LayoutMismatch);
}

TEST_CASE("encode/decode round-trips within the clamp range", "[mode_norm][property]") {
    Rng rng(15);
    std::vector<double> data;
    for (double mean : {-3.0, 2.0}) {
        const auto part = gaussian_samples(mean, 0.7, 1500, rng);
        data.insert(data.end(), part.begin(), part.end());
    }
    const ColumnModeModel model = fit_vgm(data, 10, 3);
    int checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const double c = data[rng.below(data.size())];
        const EncodedValue enc = encode_value(model, c, rng);
        std::size_t k = 0;
        while (enc.beta[k] == 0.0) ++k;
        const GaussMode& m = model.modes()[k];
        if (std::abs((c - m.mean) / (4.0 * m.stddev)) <= 1.0) {
            CHECK_THAT(decode_value(model, enc), Catch::Matchers::WithinRel(c, 1e-9));
            ++checked;
        }
    }
    CHECK(checked > 900);  // clamping should be rare on in-distribution draws
}

TEST_CASE("sampling is invariant under density rescaling", "[mode_norm][property]") {
    // encode picks mode k with probability rho_k / sum(rho): identical draws
    // whether densities are scaled or not, given the same generator stream
    const ColumnModeModel model({{0.3, -2.0, 0.5}, {0.2, 0.0, 0.5}, {0.5, 2.0, 0.5}});
    Rng rng_a(16), rng_b(16);
    for (int i = 0; i < 200; ++i) {
        const double c = -3.0 + 6.0 * rng_a.uniform();
        rng_b.uniform();  // keep streams aligned
        const EncodedValue a = encode_value(model, c, rng_a);
        const EncodedValue b = encode_value(model, c, rng_b);
        CHECK(a.beta == b.beta);
    }
}

TEST_CASE("row layout width arithmetic", "[mode_norm]") {
    const TableSchema schema({{"v", ColumnKind::Continuous, {}},
                              {"label", ColumnKind::Discrete, {"Fire", "NoFire"}}});
    std::vector<ColumnTransform> transforms;
    transforms.push_back({two_mode_model(), 0.0});
    const RowLayout layout(schema, transforms);
    CHECK(layout.total_width() == 5);  // 1 + 2 + 2
    CHECK(layout.continuous_segment(0).offset == 0);
    CHECK(layout.discrete_segment(0).offset == 3);
}

TEST_CASE("row encode/decode inverts", "[mode_norm]") {
    const TableSchema schema({{"v", ColumnKind::Continuous, {}},
                              {"c", ColumnKind::Continuous, {}},
                              {"label", ColumnKind::Discrete, {"Fire", "NoFire"}}});
    std::vector<ColumnTransform> transforms;
    transforms.push_back({two_mode_model(), 0.0});
    transforms.push_back({std::nullopt, 42.0});  // constant passthrough column

    Rng rng(17);
    const Row row{0.8, 42.0, 1.0};
    const std::vector<double> enc = encode_row(schema, transforms, row, rng);
    CHECK(enc.size() == 5);  // constant column contributes nothing
    const Row back = decode_row(schema, transforms, enc);
    CHECK_THAT(back[0], Catch::Matchers::WithinRel(row[0], 1e-9));
    CHECK(back[1] == 42.0);
    CHECK(back[2] == row[2]);

    CHECK_THROWS_AS(decode_row(schema, transforms, std::vector<double>(4, 0.0)),
                    LayoutMismatch);
}

TEST_CASE("encoded width formula holds for random schemas", "[mode_norm][property]") {
    Rng rng(18);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t n_cont = rng.below(4);
        const std::size_t n_disc = 1 + rng.below(3);
        std::vector<Column> cols;
        std::vector<ColumnTransform> transforms;
        std::size_t expected = 0;
        for (std::size_t i = 0; i < n_cont; ++i) {
            cols.push_back({"c" + std::to_string(i), ColumnKind::Continuous, {}});
            const std::size_t k = 1 + rng.below(5);
            std::vector<GaussMode> modes;
            for (std::size_t j = 0; j < k; ++j)
                modes.push_back({1.0 / static_cast<double>(k),
                                 static_cast<double>(j) * 3.0, 0.5});
            transforms.push_back({ColumnModeModel(std::move(modes)), 0.0});
            expected += 1 + k;
        }
        for (std::size_t i = 0; i < n_disc; ++i) {
            const std::size_t cats = 1 + rng.below(5);
            std::vector<std::string> names;
            for (std::size_t j = 0; j < cats; ++j) names.push_back("k" + std::to_string(j));
            cols.push_back({"d" + std::to_string(i), ColumnKind::Discrete, names});
            expected += cats;
        }
        const TableSchema schema(cols);
        const RowLayout layout(schema, transforms);
        CHECK(layout.total_width() == expected);
        // offsets strictly increase in schema order
        std::size_t prev_end = 0;
        for (std::size_t i = 0; i < layout.n_continuous(); ++i) {
            CHECK(layout.continuous_segment(i).offset == prev_end);
            prev_end += layout.continuous_segment(i).width;
        }
        for (std::size_t i = 0; i < layout.n_discrete(); ++i) {
            CHECK(layout.discrete_segment(i).offset == prev_end);
            prev_end += layout.discrete_segment(i).width;
        }
    }
}

TEST_CASE("fit_column_transforms maps constant columns to passthrough", "[mode_norm]") {
    const TableSchema schema({{"v", ColumnKind::Continuous, {}},
                              {"const", ColumnKind::Continuous, {}},
                              {"label", ColumnKind::Discrete, {"a", "b"}}});
    DataTable t(schema);
    Rng rng(19);
    for (int i = 0; i < 200; ++i)
        t.append_row({rng.normal(), 5.5, static_cast<double>(rng.below(2))});
    const auto transforms = fit_column_transforms(t, 10, 4);
    REQUIRE(transforms.size() == 2);
    CHECK_FALSE(transforms[0].is_constant());
    CHECK(transforms[1].is_constant());
    CHECK(transforms[1].constant == 5.5);

    CHECK_THROWS_AS(fit_column_transforms(DataTable(schema), 10, 4), EmptyTable);
}
