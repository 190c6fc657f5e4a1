#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hilbench/timeseries.hpp"

namespace hilbench {

struct WarpPath {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;

    // Monotone, contiguous, (0,0) .. (n-1,m-1). Used by property tests.
    bool valid_for(std::size_t len_a, std::size_t len_b) const;
};

enum class DtwCost { Abs, Squared };

struct DtwResult {
    double cost = 0.0;
    WarpPath path;
};

// d = sqrt(sum_i (a_i - b_i)^2); lengths must match and be nonzero.
double euclidean_distance(std::span<const double> a, std::span<const double> b);

// Full O(n*m) dynamic program. Ties in the backtrack prefer the diagonal
// step, then the step that advances i. `band` is a Sakoe-Chiba half-width;
// no constraint when unset.
DtwResult dtw(std::span<const double> a, std::span<const double> b,
              DtwCost cost = DtwCost::Abs,
              std::optional<std::size_t> band = std::nullopt);

struct AlignOptions {
    bool use_dtw = true;           // false: compare index-wise over the common prefix
    double eps_rel = 1e-3;         // denominator floor for relative deviation
    double low_signal_rms = 0.05;  // below this reference RMS, deviation is absolute
    bool max_deviation = false;    // true: worst aligned pair instead of the mean
    std::optional<std::size_t> band;
};

struct ChannelAlignment {
    double dtw_cost = 0.0;
    WarpPath path;
    double aligned_euclidean = 0.0;
    double mean_relative_deviation = 0.0;
    bool absolute_fallback = false;  // reference channel too quiet for ratios
};

struct AlignmentReport {
    // Top-level scalars are the per-channel maxima; the path belongs to the
    // channel with the largest aligned_euclidean.
    double dtw_cost = 0.0;
    WarpPath path;
    double aligned_euclidean = 0.0;
    double mean_relative_deviation = 0.0;
    std::map<std::string, ChannelAlignment> per_channel;
};

// a is the candidate, b the reference; deviations are measured against b.
AlignmentReport aligned_distance(const Trace& a, const Trace& b, const AlignOptions& opts = {});

struct CalibrationProfile {
    std::string task_id;
    std::size_t n_runs = 0;
    std::vector<double> distances;
    std::vector<double> relative_deviations;
    double threshold_distance = 0.0;
    double threshold_relative = 0.10;
    double margin = 1.1;

    std::string serialize() const;
    static CalibrationProfile deserialize(std::string_view text);
    void save(const std::filesystem::path& path) const;
    static CalibrationProfile load(const std::filesystem::path& path);
};

// Reference-vs-reference distance statistics; threshold_distance is
// margin * max observed aligned_euclidean. Needs at least two pairs.
CalibrationProfile calibrate(const std::vector<std::pair<Trace, Trace>>& pairs,
                             double margin = 1.1, double threshold_relative = 0.10,
                             const AlignOptions& opts = {});

}  // namespace hilbench
