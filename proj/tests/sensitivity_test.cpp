#include "orchard_duo/errors.hpp"
#include "orchard_duo/reproduction.hpp"
#include "orchard_duo/rng.hpp"
#include "orchard_duo/sensitivity.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace od = orchard_duo;

namespace {

od::SampleMatrix make_samples(std::size_t n, std::uint64_t seed)
{
    const std::vector<od::ParameterRange> ranges = {{"m1", 0.0, 1.0}, {"n1", 0.0, 1.0}, {"m2", 0.2, 0.6}};
    return od::lhs_sample(ranges, n, seed);
}

void expect_error(auto&& fn, od::ErrorCode code)
{
    try {
        fn();
        FAIL() << "no error";
    } catch (const od::Error& e) {
        EXPECT_EQ(e.code(), code);
    }
}

} // namespace

TEST(Lhs, OneValuePerStratum)
{
    for (std::size_t n : {4u, 37u, 1000u}) {
        const od::SampleMatrix s = make_samples(n, 5);
        ASSERT_EQ(s.values.size(), 3 * n);
        for (std::size_t col = 0; col < 3; ++col) {
            const double low = col == 2 ? 0.2 : 0.0;
            const double width = (col == 2 ? 0.4 : 1.0) / static_cast<double>(n);
            std::set<std::size_t> strata;
            for (double v : s.column(col)) {
                ASSERT_GE(v, low);
                ASSERT_LT(v, low + width * static_cast<double>(n));
                strata.insert(static_cast<std::size_t>((v - low) / width));
            }
            EXPECT_EQ(strata.size(), n) << "n = " << n << " col " << col;
        }
    }
}

TEST(Lhs, DeterministicPerSeed)
{
    EXPECT_EQ(make_samples(200, 11), make_samples(200, 11));
    EXPECT_NE(make_samples(200, 11).values, make_samples(200, 12).values);
}

TEST(Lhs, ColumnsAreNotAligned)
{
    const od::SampleMatrix s = make_samples(2000, 3);
    const std::vector<double> a = od::average_ranks(s.column(0));
    const std::vector<double> b = od::average_ranks(s.column(1));
    double mean = 1000.5, num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        num += (a[k] - mean) * (b[k] - mean);
        den += (a[k] - mean) * (a[k] - mean);
    }
    EXPECT_LT(std::abs(num / den), 0.1);
}

TEST(Ranks, AverageTies)
{
    const std::vector<double> v = {3.0, 1.0, 3.0, 2.0, 3.0};
    EXPECT_EQ(od::average_ranks(v), (std::vector<double>{4.0, 1.0, 4.0, 2.0, 4.0}));
}

TEST(Histogram, CountsSumAndLastBinClosed)
{
    const std::vector<double> v = {0.0, 0.25, 0.5, 0.75, 1.0, 1.0};
    const od::Histogram h = od::make_histogram(v, 4);
    ASSERT_EQ(h.edges.size(), 5u);
    EXPECT_EQ(h.counts, (std::vector<std::size_t>{1, 1, 1, 3}));

    od::Rng rng(1);
    std::vector<double> w(5000);
    for (double& x : w) {
        x = rng.uniform();
    }
    const od::Histogram g = od::make_histogram(w, 50);
    EXPECT_EQ(std::accumulate(g.counts.begin(), g.counts.end(), std::size_t{0}), w.size());
}

TEST(Prcc, MonotoneOutputOfOneParameter)
{
    const od::SampleMatrix s = make_samples(500, 2);
    const std::vector<double> y = s.column(1);
    const od::PrccResult r = od::prcc(s, y);
    EXPECT_GT(r.coefficient("n1"), 0.99);
    EXPECT_LT(std::abs(r.coefficient("m1")), 0.2);

    std::vector<double> neg(y.size());
    std::transform(y.begin(), y.end(), neg.begin(), [](double x) { return -std::exp(3.0 * x); });
    EXPECT_LT(od::prcc(s, neg).coefficient("n1"), -0.99);
}

TEST(Prcc, NullOutputIsUncorrelated)
{
    const od::SampleMatrix s = make_samples(4000, 8);
    od::Rng rng(99);
    std::vector<double> noise(s.n_samples);
    for (double& x : noise) {
        x = rng.uniform();
    }
    const od::PrccResult r = od::prcc(s, noise);
    for (double c : r.coefficients) {
        EXPECT_LT(std::abs(c), 0.05);
    }
}

TEST(Prcc, InvariantUnderMonotoneTransform)
{
    const od::SampleMatrix s = make_samples(800, 4);
    std::vector<double> y(s.n_samples), z(s.n_samples);
    for (std::size_t k = 0; k < s.n_samples; ++k) {
        y[k] = s.at(k, 0) - 2.0 * s.at(k, 1) * s.at(k, 2);
        z[k] = std::exp(y[k]) + 5.0;
    }
    const od::PrccResult a = od::prcc(s, y);
    const od::PrccResult b = od::prcc(s, z);
    for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_NEAR(a.coefficients[k], b.coefficients[k], 1e-12);
        EXPECT_LE(std::abs(a.coefficients[k]), 1.0);
    }
}

TEST(Prcc, ConstantOutputIsDegenerate)
{
    const od::SampleMatrix s = make_samples(100, 4);
    const std::vector<double> y(100, 3.0);
    expect_error([&] { od::prcc(s, y); }, od::ErrorCode::DegenerateColumn);
}

TEST(Ranges, Validation)
{
    expect_error([] { od::validate_ranges(std::vector<od::ParameterRange>{{"zz", 0.0, 1.0}}); },
                 od::ErrorCode::InvalidRange);
    expect_error([] { od::validate_ranges(std::vector<od::ParameterRange>{{"m1", 0.5, 0.5}}); },
                 od::ErrorCode::InvalidRange);
    expect_error([] { od::validate_ranges(std::vector<od::ParameterRange>{{"m1", 0.0, 0.5}, {"m1", 0.0, 0.5}}); },
                 od::ErrorCode::InvalidRange);
    EXPECT_NO_THROW(od::validate_ranges(od::default_ranges(od::StrategyKind::Chemical)));
}

TEST(Run, ThreadCountDoesNotChangeResult)
{
    const od::Scenario base = od::baseline_scenario();
    const auto ranges = od::default_ranges(od::StrategyKind::Mechanical);
    const od::PrccResult one = od::sensitivity_run(base, ranges, 1000, 77, 20, 1);
    const od::PrccResult four = od::sensitivity_run(base, ranges, 1000, 77, 20, 4);
    EXPECT_EQ(one, four);
    EXPECT_EQ(std::accumulate(one.histogram.counts.begin(), one.histogram.counts.end(), std::size_t{0}), 1000u);
}

TEST(Run, OutputsMatchClosedFormPerRow)
{
    const od::Scenario base = od::baseline_scenario(od::StrategyKind::Chemical);
    const auto ranges = od::default_ranges(od::StrategyKind::Chemical);
    const od::SampleMatrix s = od::lhs_sample(ranges, 50, 5);
    const std::vector<double> out = od::evaluate_global_r0(base, s, 3);
    for (std::size_t row = 0; row < s.n_samples; ++row) {
        od::Scenario sc = base;
        for (std::size_t col = 0; col < s.n_params(); ++col) {
            od::apply_parameter(sc, s.names[col], s.at(row, col));
        }
        EXPECT_DOUBLE_EQ(out[row], od::global_r0_closed(sc));
    }
}
