#pragma once

#include "orchard_duo/model.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace orchard_duo {

/// One swept parameter: a control knob (m1, n1, m2, n2, p1, q1, p2, q2) or
/// the dispersal fraction phi12.
struct ParameterRange {
    std::string name;
    double low = 0.0;
    double high = 1.0;

    friend bool operator==(const ParameterRange&, const ParameterRange&) = default;
};

/// Sweeps used for the mechanical {m1, n1, m2, n2, phi12} and chemical
/// {p1, q1, p2, q2, phi12} analyses, each over [0, 1).
std::vector<ParameterRange> default_ranges(StrategyKind strategy);

/// Throws InvalidRange for unknown names, empty or out-of-domain intervals.
void validate_ranges(std::span<const ParameterRange> ranges);

/// Overwrites the named parameter in `scenario`.
void apply_parameter(Scenario& scenario, std::string_view name, double value);

struct SampleMatrix {
    std::vector<std::string> names;
    std::size_t n_samples = 0;
    std::vector<double> values; ///< row-major, n_samples x names.size()
    std::uint64_t seed = 0;

    std::size_t n_params() const { return names.size(); }
    double at(std::size_t row, std::size_t col) const { return values[row * names.size() + col]; }
    std::vector<double> column(std::size_t col) const;

    friend bool operator==(const SampleMatrix&, const SampleMatrix&) = default;
};

/// Latin hypercube: every column has exactly one value in each of the
/// n_samples equal-width strata of [low, high), with strata independently
/// permuted per column and the position inside a stratum uniform.
SampleMatrix lhs_sample(std::span<const ParameterRange> ranges, std::size_t n_samples, std::uint64_t seed);

/// 1-based ranks with ties sharing their average rank.
std::vector<double> average_ranks(std::span<const double> values);

struct Histogram {
    std::vector<double> edges;        ///< n_bins + 1 equal-width edges over [min, max]
    std::vector<std::size_t> counts;  ///< last bin is closed on the right

    friend bool operator==(const Histogram&, const Histogram&) = default;
};

Histogram make_histogram(std::span<const double> values, std::size_t n_bins);

struct PrccResult {
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::size_t n_samples = 0;
    std::string output_name;
    Histogram histogram;

    double coefficient(std::string_view name) const;

    friend bool operator==(const PrccResult&, const PrccResult&) = default;
};

/// Partial rank correlation of `outputs` with each sampled parameter: rank
/// transform everything, regress the parameter's ranks and the output ranks
/// on the remaining parameters' ranks (OLS with intercept), and correlate the
/// two residual vectors. The histogram is left empty.
PrccResult prcc(const SampleMatrix& samples, std::span<const double> outputs,
                std::string output_name = "global_r0");

/// LHS over `ranges`, global R0 (closed form) per row, then PRCC and an
/// n_bins histogram of the outputs. Rows may be evaluated on `threads`
/// workers; the result does not depend on the thread count.
PrccResult sensitivity_run(const Scenario& scenario_template, std::span<const ParameterRange> ranges,
                           std::size_t n_samples, std::uint64_t seed, std::size_t n_bins = 50,
                           unsigned threads = 1);

/// The global R0 outputs of sensitivity_run, in row order.
std::vector<double> evaluate_global_r0(const Scenario& scenario_template, const SampleMatrix& samples,
                                       unsigned threads = 1);

} // namespace orchard_duo
