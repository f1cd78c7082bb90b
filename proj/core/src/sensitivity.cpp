#include "orchard_duo/sensitivity.hpp"

#include "orchard_duo/errors.hpp"
#include "orchard_duo/reproduction.hpp"
#include "orchard_duo/rng.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>

namespace orchard_duo {

namespace {

constexpr std::array<std::string_view, 9> kParameterNames = {
    "m1", "n1", "m2", "n2", "p1", "q1", "p2", "q2", "phi12",
};

bool is_known(std::string_view name)
{
    return std::find(kParameterNames.begin(), kParameterNames.end(), name) != kParameterNames.end();
}

double rank_variance(const std::vector<double>& ranks)
{
    const double mean = std::accumulate(ranks.begin(), ranks.end(), 0.0) / static_cast<double>(ranks.size());
    double ss = 0.0;
    for (double r : ranks) {
        ss += (r - mean) * (r - mean);
    }
    return ss;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b)
{
    const Eigen::VectorXd ac = a.array() - a.mean();
    const Eigen::VectorXd bc = b.array() - b.mean();
    const double denom = std::sqrt(ac.squaredNorm() * bc.squaredNorm());
    if (denom == 0.0) {
        return 0.0;
    }
    return std::clamp(ac.dot(bc) / denom, -1.0, 1.0);
}

} // namespace

std::vector<ParameterRange> default_ranges(StrategyKind strategy)
{
    if (strategy == StrategyKind::Mechanical) {
        return {{"m1", 0.0, 1.0}, {"n1", 0.0, 1.0}, {"m2", 0.0, 1.0}, {"n2", 0.0, 1.0}, {"phi12", 0.0, 1.0}};
    }
    return {{"p1", 0.0, 1.0}, {"q1", 0.0, 1.0}, {"p2", 0.0, 1.0}, {"q2", 0.0, 1.0}, {"phi12", 0.0, 1.0}};
}

void validate_ranges(std::span<const ParameterRange> ranges)
{
    if (ranges.empty()) {
        throw Error(ErrorCode::InvalidRange, "no parameter ranges given", "sensitivity.ranges");
    }
    for (std::size_t i = 0; i < ranges.size(); ++i) {
        const ParameterRange& r = ranges[i];
        const std::string field = "sensitivity.ranges." + r.name;
        if (!is_known(r.name)) {
            throw Error(ErrorCode::InvalidRange, "unknown parameter \"" + r.name + "\"", field);
        }
        for (std::size_t j = 0; j < i; ++j) {
            if (ranges[j].name == r.name) {
                throw Error(ErrorCode::InvalidRange, "parameter \"" + r.name + "\" listed twice", field);
            }
        }
        if (!(r.low < r.high) || !std::isfinite(r.low) || !std::isfinite(r.high)) {
            throw Error(ErrorCode::InvalidRange, r.name + " needs low < high", field);
        }
        // Samples stay strictly below `high`, so a control range may end at 1.
        if (r.low < 0.0 || r.high > 1.0) {
            throw Error(ErrorCode::InvalidRange, r.name + " range must lie within [0,1]", field);
        }
    }
}

void apply_parameter(Scenario& s, std::string_view name, double value)
{
    if (name == "m1") s.controls1.m = value;
    else if (name == "n1") s.controls1.n = value;
    else if (name == "p1") s.controls1.p = value;
    else if (name == "q1") s.controls1.q = value;
    else if (name == "m2") s.controls2.m = value;
    else if (name == "n2") s.controls2.n = value;
    else if (name == "p2") s.controls2.p = value;
    else if (name == "q2") s.controls2.q = value;
    else if (name == "phi12") s.phi12 = value;
    else throw Error(ErrorCode::InvalidRange, "unknown parameter \"" + std::string(name) + "\"");
}

std::vector<double> SampleMatrix::column(std::size_t col) const
{
    std::vector<double> out(n_samples);
    for (std::size_t r = 0; r < n_samples; ++r) {
        out[r] = at(r, col);
    }
    return out;
}

SampleMatrix lhs_sample(std::span<const ParameterRange> ranges, std::size_t n_samples, std::uint64_t seed)
{
    validate_ranges(ranges);
    if (n_samples < 2) {
        throw Error(ErrorCode::InvalidRange, "LHS needs at least 2 samples", "sensitivity.n_samples");
    }
    SampleMatrix out;
    out.seed = seed;
    out.n_samples = n_samples;
    for (const ParameterRange& r : ranges) {
        out.names.push_back(r.name);
    }
    const std::size_t k = ranges.size();
    out.values.assign(n_samples * k, 0.0);

    Rng rng(seed);
    std::vector<std::size_t> strata(n_samples);
    const double n = static_cast<double>(n_samples);
    for (std::size_t col = 0; col < k; ++col) {
        const double low = ranges[col].low;
        const double width = ranges[col].high - low;
        std::iota(strata.begin(), strata.end(), std::size_t{0});
        for (std::size_t i = n_samples - 1; i > 0; --i) {
            std::swap(strata[i], strata[rng.below(i + 1)]);
        }
        for (std::size_t row = 0; row < n_samples; ++row) {
            const std::size_t stratum = strata[row];
            double v = low + (static_cast<double>(stratum) + rng.uniform()) / n * width;
            // Rounding can land exactly on the next stratum's lower edge.
            const double lo_edge = low + static_cast<double>(stratum) / n * width;
            const double hi_edge = low + static_cast<double>(stratum + 1) / n * width;
            if (v >= hi_edge) {
                v = std::nextafter(hi_edge, lo_edge);
            }
            v = std::max(v, lo_edge);
            out.values[row * k + col] = v;
        }
    }
    return out;
}

std::vector<double> average_ranks(std::span<const double> values)
{
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i + 1;
        while (j < n && values[order[j]] == values[order[i]]) {
            ++j;
        }
        // positions i..j-1 share the mean of ranks i+1..j
        const double rank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) {
            ranks[order[t]] = rank;
        }
        i = j;
    }
    return ranks;
}

Histogram make_histogram(std::span<const double> values, std::size_t n_bins)
{
    if (n_bins == 0) {
        throw Error(ErrorCode::InvalidRange, "histogram needs at least one bin", "sensitivity.n_bins");
    }
    Histogram h;
    h.counts.assign(n_bins, 0);
    if (values.empty()) {
        h.edges.assign(n_bins + 1, 0.0);
        return h;
    }
    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    const double hi = *hi_it;
    const double width = (hi - lo) / static_cast<double>(n_bins);
    h.edges.resize(n_bins + 1);
    for (std::size_t b = 0; b <= n_bins; ++b) {
        h.edges[b] = lo + width * static_cast<double>(b);
    }
    h.edges.back() = hi;
    for (double v : values) {
        std::size_t bin = width > 0.0 ? static_cast<std::size_t>((v - lo) / width) : 0;
        bin = std::min(bin, n_bins - 1);
        ++h.counts[bin];
    }
    return h;
}

double PrccResult::coefficient(std::string_view name) const
{
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) {
            return coefficients[i];
        }
    }
    throw Error(ErrorCode::InvalidRange, "no PRCC entry for \"" + std::string(name) + "\"");
}

PrccResult prcc(const SampleMatrix& samples, std::span<const double> outputs, std::string output_name)
{
    const std::size_t n = samples.n_samples;
    const std::size_t k = samples.n_params();
    if (outputs.size() != n) {
        throw Error(ErrorCode::InvalidRange, "outputs length does not match sample rows");
    }
    if (n < k + 2) {
        throw Error(ErrorCode::InvalidRange, "too few samples for partial correlation");
    }

    std::vector<std::vector<double>> ranks(k);
    for (std::size_t col = 0; col < k; ++col) {
        const std::vector<double> c = samples.column(col);
        ranks[col] = average_ranks(c);
        if (rank_variance(ranks[col]) == 0.0) {
            throw Error(ErrorCode::DegenerateColumn, "parameter " + samples.names[col] + " is constant");
        }
    }
    const std::vector<double> y_ranks = average_ranks(outputs);
    if (rank_variance(y_ranks) == 0.0) {
        throw Error(ErrorCode::DegenerateColumn, "output " + output_name + " is constant");
    }

    const Eigen::Map<const Eigen::VectorXd> y(y_ranks.data(), static_cast<Eigen::Index>(n));
    PrccResult result;
    result.names = samples.names;
    result.n_samples = n;
    result.output_name = std::move(output_name);
    result.coefficients.resize(k);

    Eigen::MatrixXd design(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    for (std::size_t j = 0; j < k; ++j) {
        // Design: intercept plus every other parameter's ranks.
        design.col(0).setOnes();
        Eigen::Index c = 1;
        for (std::size_t other = 0; other < k; ++other) {
            if (other == j) {
                continue;
            }
            design.col(c++) = Eigen::Map<const Eigen::VectorXd>(ranks[other].data(), static_cast<Eigen::Index>(n));
        }
        const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
        const Eigen::Map<const Eigen::VectorXd> x(ranks[j].data(), static_cast<Eigen::Index>(n));
        const Eigen::VectorXd x_res = x - design * qr.solve(x);
        const Eigen::VectorXd y_res = y - design * qr.solve(y);
        result.coefficients[j] = pearson(x_res, y_res);
    }
    return result;
}

std::vector<double> evaluate_global_r0(const Scenario& scenario_template, const SampleMatrix& samples,
                                       unsigned threads)
{
    const std::size_t n = samples.n_samples;
    std::vector<double> outputs(n);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t row = begin; row < end; ++row) {
            Scenario s = scenario_template;
            for (std::size_t col = 0; col < samples.n_params(); ++col) {
                apply_parameter(s, samples.names[col], samples.at(row, col));
            }
            s.validate();
            outputs[row] = global_r0_closed(s);
        }
    };
    threads = std::max(1u, threads);
    if (threads == 1 || n < 2 * threads) {
        work(0, n);
        return outputs;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    const std::size_t chunk = (n + threads - 1) / threads;
    for (unsigned w = 0; w < threads; ++w) {
        const std::size_t begin = std::min(n, w * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&, w, begin, end] {
            try {
                work(begin, end);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
    return outputs;
}

PrccResult sensitivity_run(const Scenario& scenario_template, std::span<const ParameterRange> ranges,
                           std::size_t n_samples, std::uint64_t seed, std::size_t n_bins, unsigned threads)
{
    const SampleMatrix samples = lhs_sample(ranges, n_samples, seed);
    const std::vector<double> outputs = evaluate_global_r0(scenario_template, samples, threads);
    PrccResult result = prcc(samples, outputs, "global_r0");
    result.histogram = make_histogram(outputs, n_bins);
    return result;
}

} // namespace orchard_duo
