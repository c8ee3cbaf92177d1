#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <random>

#include "newspulse/csv.hpp"
#include "newspulse/errors.hpp"
#include "newspulse/report.hpp"

using namespace newspulse;
namespace fs = std::filesystem;

namespace {

// Two-pass product-moment correlation, independent of the library path.
double pearson_oracle(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0, my = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(x.size());
    my /= double(y.size());
    double sxy = 0, sxx = 0, syy = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
        syy += (y[i] - my) * (y[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

std::map<std::string, OutletProfile> synthetic_profiles(int n, uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> norm(0, 1);
    std::map<std::string, OutletProfile> out;
    for (int i = 0; i < n; ++i) {
        OutletProfile p;
        p.outlet_id = "o" + std::to_string(100 + i);
        p.county_fips = "01001";
        p.popularity = -std::log(1.0 + 1000.0 * double(i + 1));
        p.trump_logodds_2020 = norm(rng);
        p.log_population = 8.0 + norm(rng);
        p.cre_risk12 = 40.0 + 2.0 * norm(rng);
        p.cre_risk3plus = 25.0 + 2.0 * norm(rng);
        p.cre_risk0 = 100.0 - p.cre_risk12 - p.cre_risk3plus;
        out[p.outlet_id] = p;
    }
    return out;
}

} // namespace

TEST_CASE("pearson examples and the frozen 10-point fixture") {
    std::vector<double> x = {1.2, 2.4, 3.1, 4.8, 5.0, 6.3, 7.7, 8.1, 9.4, 10.2};
    std::vector<double> y = {2.1, 3.3, 2.9, 5.5, 4.8, 6.9, 7.2, 8.8, 8.9, 11.0};

    CorrelationCell self = pearson(x, x, "x", "x");
    CHECK(self.r == doctest::Approx(1.0));
    CHECK(self.p < 1e-12);

    std::vector<double> neg(x.size());
    for (size_t i = 0; i < x.size(); ++i) neg[i] = -x[i];
    CHECK(pearson(x, neg).r == doctest::Approx(-1.0));

    // frozen from an independent scipy computation
    CorrelationCell cell = pearson(x, y, "x", "y");
    CHECK(cell.r == doctest::Approx(0.980992949858).epsilon(1e-9));
    CHECK(cell.p == doctest::Approx(5.580802987202e-07).epsilon(1e-6));
    CHECK(cell.n == 10);
    CHECK(cell.r == doctest::Approx(pearson_oracle(x, y)).epsilon(1e-12));

    CHECK_THROWS_AS(pearson({1, 1, 1}, {1, 2, 3}), ZeroVariance);
    CHECK_THROWS_AS(pearson({1, 2}, {3, 4}), Error);
}

TEST_CASE("pearson symmetry and affine invariance") {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> norm(0, 1);
    std::vector<double> x(25), y(25), ax(25);
    for (size_t i = 0; i < 25; ++i) {
        x[i] = norm(rng);
        y[i] = 0.4 * x[i] + norm(rng);
        ax[i] = 3.0 * x[i] + 17.0;
    }
    CHECK(pearson(x, y).r == doctest::Approx(pearson(y, x).r).epsilon(1e-12));
    CHECK(pearson(ax, y).r == doctest::Approx(pearson(x, y).r).epsilon(1e-12));
    CHECK(pearson(ax, y).p == doctest::Approx(pearson(x, y).p).epsilon(1e-9));
}

TEST_CASE("loess: constants and lines reproduce exactly") {
    std::vector<double> x, constant, line;
    for (int i = 0; i < 30; ++i) {
        x.push_back(double(i));
        constant.push_back(4.2);
        line.push_back(2.5 * double(i) - 7.0);
    }
    for (double v : loess_smooth(x, constant, 0.5)) CHECK(v == doctest::Approx(4.2));
    auto smooth = loess_smooth(x, line, 0.6);
    for (size_t i = 0; i < x.size(); ++i)
        CHECK(smooth[i] == doctest::Approx(line[i]).epsilon(1e-6));
}

TEST_CASE("loess beats the raw data on a noisy sinusoid") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> noise(0, 0.4);
    std::vector<double> x, truth, noisy;
    for (int i = 0; i < 60; ++i) {
        double t = double(i) / 59.0 * 2.0 * 3.14159265358979;
        x.push_back(double(i));
        truth.push_back(std::sin(t));
        noisy.push_back(truth.back() + noise(rng));
    }
    auto smooth = loess_smooth(x, noisy, 0.3);
    double rmse_raw = 0, rmse_smooth = 0;
    for (size_t i = 0; i < x.size(); ++i) {
        rmse_raw += (noisy[i] - truth[i]) * (noisy[i] - truth[i]);
        rmse_smooth += (smooth[i] - truth[i]) * (smooth[i] - truth[i]);
    }
    CHECK(rmse_smooth < rmse_raw);
}

TEST_CASE("coverage_trend requires 10 weeks and carries both series") {
    std::map<int, double> shares;
    for (int w = 0; w < 9; ++w) shares[w] = 10.0;
    CHECK_THROWS_AS(coverage_trend(shares), Error);
    shares[9] = 10.0;
    auto trend = coverage_trend(shares);
    REQUIRE(trend.size() == 10);
    CHECK(trend[0].smoothed == doctest::Approx(10.0));
}

TEST_CASE("fe_audience_table: planted association and zero variance") {
    auto profiles = synthetic_profiles(20, 3);
    std::vector<std::string> ids;
    Eigen::VectorXd mult(20);
    int i = 0;
    for (auto& [id, p] : profiles) {
        ids.push_back(id);
        // log multiplier exactly linear in popularity
        mult[i] = std::exp(0.7 * p.popularity + 1.0);
        ++i;
    }
    FeAudienceResult result = fe_audience_table(ids, mult, profiles);
    REQUIRE(result.cells.size() == 5);
    for (const auto& cell : result.cells) {
        if (cell.variable == "popularity") {
            CHECK(std::abs(cell.r) == doctest::Approx(1.0).epsilon(1e-9));
            CHECK(cell.p < 1e-10);
        }
    }
    CHECK(result.scatter.at("popularity").size() == 20);

    Eigen::VectorXd flat = Eigen::VectorXd::Ones(20);
    CHECK_THROWS_AS(fe_audience_table(ids, flat, profiles), ZeroVariance);
}

TEST_CASE("heatmap masking: strictness, monotonicity, planted sign") {
    auto profiles = synthetic_profiles(30, 9);
    std::vector<std::string> ids;
    for (auto& [id, p] : profiles) ids.push_back(id);

    std::mt19937_64 rng(123);
    std::normal_distribution<double> norm(0, 1);
    Eigen::MatrixXd shares(30, 3);
    for (int o = 0; o < 30; ++o) {
        shares(o, 0) = norm(rng);                                        // independent
        shares(o, 1) = profiles[ids[size_t(o)]].trump_logodds_2020 * 0.9 // planted positive
                       + 0.1 * norm(rng);
        shares(o, 2) = norm(rng);
    }

    auto cells01 = topic_audience_heatmap(shares, {0, 1, 2}, ids, profiles, 0.01);
    auto cells05 = topic_audience_heatmap(shares, {0, 1, 2}, ids, profiles, 0.05);
    REQUIRE(cells01.size() == 15);

    bool planted_found = false;
    for (const auto& cell : cells01) {
        if (cell.topic == 1 && cell.variable == "trump_logodds_2020") {
            CHECK_FALSE(cell.masked);
            CHECK(cell.r > 0.5);
            planted_found = true;
        }
        if (!cell.masked) CHECK(cell.p < 0.01);
    }
    CHECK(planted_found);

    // monotone in alpha: unmasked at 0.01 stays unmasked at 0.05
    for (size_t i = 0; i < cells01.size(); ++i)
        if (!cells01[i].masked) CHECK_FALSE(cells05[i].masked);

    // p exactly at alpha is masked (strict <)
    for (const auto& cell : cells01) {
        if (cell.p > 0) {
            auto boundary = topic_audience_heatmap(shares, {0, 1, 2}, ids, profiles, cell.p);
            for (const auto& b : boundary)
                if (b.topic == cell.topic && b.variable == cell.variable) CHECK(b.masked);
            break;
        }
    }
}

TEST_CASE("collinearity warning fires above the threshold") {
    auto profiles = synthetic_profiles(25, 4);
    for (auto& [id, p] : profiles) p.cre_risk12 = 10.0 * p.log_population - 40.0; // r = 1
    auto warnings = collinearity_warnings(profiles, 0.6);
    bool found = false;
    for (const auto& w : warnings)
        if (w.find("log_population") != std::string::npos && w.find("cre_risk12") != std::string::npos)
            found = true;
    CHECK(found);
}

TEST_CASE("emit_tables is deterministic and hashes its outputs") {
    ReportBundle bundle;
    bundle.trend = {{0, 10.0, 10.1}, {1, 11.0, 10.9}, {2, 12.5, 12.2}};
    bundle.warnings = {"example warning"};
    bundle.topic_words[0] = {"mask", "wear", "distanc"};
    bundle.topic_shares[{0, 0}] = 55.5;
    bundle.topic_shares[{1, 0}] = 44.5;

    fs::path dir_a = fs::temp_directory_path() / ("np_rep_a_" + std::to_string(std::random_device{}()));
    fs::path dir_b = fs::temp_directory_path() / ("np_rep_b_" + std::to_string(std::random_device{}()));
    auto manifest_a = emit_tables(bundle, dir_a.string());
    auto manifest_b = emit_tables(bundle, dir_b.string());

    REQUIRE(manifest_a.size() == manifest_b.size());
    for (size_t i = 0; i < manifest_a.size(); ++i) {
        CHECK(manifest_a[i].path == manifest_b[i].path);
        CHECK(manifest_a[i].sha256 == manifest_b[i].sha256);
    }
    CHECK(read_file((dir_a / "manifest.txt").string()) ==
          read_file((dir_b / "manifest.txt").string()));

    // empty bundle: manifest exists and lists nothing
    fs::path dir_c = fs::temp_directory_path() / ("np_rep_c_" + std::to_string(std::random_device{}()));
    auto manifest_c = emit_tables(ReportBundle{}, dir_c.string());
    CHECK(manifest_c.empty());
    CHECK(fs::exists(dir_c / "manifest.txt"));

    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    fs::remove_all(dir_c);
}
