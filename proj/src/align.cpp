#include "hilbench/align.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "hilbench/detail/numfmt.hpp"

namespace hilbench {

using detail::format_double;

bool WarpPath::valid_for(std::size_t len_a, std::size_t len_b) const {
    if (pairs.empty()) return false;
    if (pairs.front() != std::pair<std::size_t, std::size_t>{0, 0}) return false;
    if (pairs.back() != std::pair<std::size_t, std::size_t>{len_a - 1, len_b - 1}) return false;
    for (std::size_t k = 1; k < pairs.size(); ++k) {
        std::size_t di = pairs[k].first - pairs[k - 1].first;
        std::size_t dj = pairs[k].second - pairs[k - 1].second;
        if (pairs[k].first < pairs[k - 1].first) return false;
        if (pairs[k].second < pairs[k - 1].second) return false;
        if (di > 1 || dj > 1 || (di == 0 && dj == 0)) return false;
    }
    return true;
}

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) raise(Errc::LengthMismatch, "empty input vector");
    if (a.size() != b.size()) {
        raise(Errc::LengthMismatch, std::to_string(a.size()) + " vs " + std::to_string(b.size()));
    }
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double d = a[i] - b[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

namespace {

inline double point_cost(double a, double b, DtwCost cost) {
    double d = std::abs(a - b);
    return cost == DtwCost::Abs ? d : d * d;
}

}  // namespace

DtwResult dtw(std::span<const double> a, std::span<const double> b, DtwCost cost,
              std::optional<std::size_t> band) {
    if (a.empty() || b.empty()) raise(Errc::EmptySeries, "dtw needs nonempty inputs");
    const std::size_t n = a.size();
    const std::size_t m = b.size();
    const double inf = std::numeric_limits<double>::infinity();

    // A band narrower than the length difference would make the corner
    // unreachable; widen it to keep the problem feasible.
    std::size_t radius = band ? std::max<std::size_t>(*band, n > m ? n - m : m - n)
                              : std::max(n, m);
    auto in_band = [&](std::size_t i, std::size_t j) {
        std::size_t lo = i > radius ? i - radius : 0;
        return j >= lo && j <= i + radius;
    };

    std::vector<double> dp(n * m, inf);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return dp[i * m + j]; };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!in_band(i, j)) continue;
            double c = point_cost(a[i], b[j], cost);
            if (i == 0 && j == 0) {
                at(i, j) = c;
                continue;
            }
            double best = inf;
            if (i > 0 && j > 0) best = std::min(best, at(i - 1, j - 1));
            if (i > 0) best = std::min(best, at(i - 1, j));
            if (j > 0) best = std::min(best, at(i, j - 1));
            at(i, j) = c + best;
        }
    }

    DtwResult result;
    result.cost = at(n - 1, m - 1);

    // Backtrack; ties prefer the diagonal, then the i-advancing step.
    std::vector<std::pair<std::size_t, std::size_t>> rev;
    std::size_t i = n - 1;
    std::size_t j = m - 1;
    rev.emplace_back(i, j);
    while (i > 0 || j > 0) {
        double diag = (i > 0 && j > 0) ? at(i - 1, j - 1) : inf;
        double up = i > 0 ? at(i - 1, j) : inf;
        double left = j > 0 ? at(i, j - 1) : inf;
        double best = std::min({diag, up, left});
        if (diag == best) {
            --i;
            --j;
        } else if (up == best) {
            --i;
        } else {
            --j;
        }
        rev.emplace_back(i, j);
    }
    result.path.pairs.assign(rev.rbegin(), rev.rend());
    return result;
}

namespace {

double rms(std::span<const double> v) {
    if (v.empty()) return 0.0;
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return std::sqrt(acc / static_cast<double>(v.size()));
}

ChannelAlignment align_channel(const std::vector<double>& a, const std::vector<double>& b,
                               const AlignOptions& opts) {
    if (a.empty() || b.empty()) raise(Errc::EmptySeries, "channel with no samples");

    ChannelAlignment out;
    if (opts.use_dtw) {
        DtwResult r = dtw(a, b, DtwCost::Abs, opts.band);
        out.dtw_cost = r.cost;
        out.path = std::move(r.path);
    } else {
        std::size_t len = std::min(a.size(), b.size());
        out.path.pairs.reserve(len);
        for (std::size_t k = 0; k < len; ++k) out.path.pairs.emplace_back(k, k);
        double acc = 0.0;
        for (auto [i, j] : out.path.pairs) acc += std::abs(a[i] - b[j]);
        out.dtw_cost = acc;
    }

    const auto& pairs = out.path.pairs;
    double sq = 0.0;
    for (auto [i, j] : pairs) {
        double d = a[i] - b[j];
        sq += d * d;
    }
    out.aligned_euclidean = std::sqrt(sq) / std::sqrt(static_cast<double>(pairs.size()));

    out.absolute_fallback = rms(b) < opts.low_signal_rms;
    double acc = 0.0;
    double worst = 0.0;
    for (auto [i, j] : pairs) {
        double dev = std::abs(a[i] - b[j]);
        if (!out.absolute_fallback) {
            dev /= std::max(std::abs(b[j]), opts.eps_rel);
        }
        acc += dev;
        worst = std::max(worst, dev);
    }
    out.mean_relative_deviation =
        opts.max_deviation ? worst : acc / static_cast<double>(pairs.size());
    return out;
}

}  // namespace

AlignmentReport aligned_distance(const Trace& a, const Trace& b, const AlignOptions& opts) {
    if (a.channels.size() != b.channels.size()) {
        raise(Errc::ChannelMismatch, "channel counts differ");
    }
    AlignmentReport report;
    for (const Channel& ca : a.channels) {
        const Channel* cb = b.find_channel(ca.label);
        if (!cb) raise(Errc::ChannelMismatch, "no reference channel '" + ca.label + "'");
        ChannelAlignment ch = align_channel(ca.values(), cb->values(), opts);
        report.dtw_cost = std::max(report.dtw_cost, ch.dtw_cost);
        report.mean_relative_deviation =
            std::max(report.mean_relative_deviation, ch.mean_relative_deviation);
        if (report.per_channel.empty() || ch.aligned_euclidean > report.aligned_euclidean) {
            report.aligned_euclidean = ch.aligned_euclidean;
            report.path = ch.path;
        }
        report.per_channel.emplace(ca.label, std::move(ch));
    }
    return report;
}

CalibrationProfile calibrate(const std::vector<std::pair<Trace, Trace>>& pairs, double margin,
                             double threshold_relative, const AlignOptions& opts) {
    if (pairs.size() < 2) raise(Errc::InvalidArgument, "calibrate needs at least two pairs");
    if (margin < 1.0) raise(Errc::InvalidArgument, "margin must be >= 1");

    CalibrationProfile profile;
    profile.margin = margin;
    profile.threshold_relative = threshold_relative;
    for (const auto& [first, second] : pairs) {
        AlignmentReport r = aligned_distance(first, second, opts);
        profile.distances.push_back(r.aligned_euclidean);
        profile.relative_deviations.push_back(r.mean_relative_deviation);
    }
    profile.n_runs = profile.distances.size();
    profile.threshold_distance =
        margin * *std::max_element(profile.distances.begin(), profile.distances.end());
    return profile;
}

namespace {

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    if (v.empty()) return 0.0;
    double pos = q * static_cast<double>(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

std::string join_doubles(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += format_double(v[i]);
    }
    return out;
}

std::vector<double> split_doubles(std::string_view text) {
    std::vector<double> out;
    std::istringstream in{std::string(text)};
    double x = 0.0;
    while (in >> x) out.push_back(x);
    return out;
}

}  // namespace

std::string CalibrationProfile::serialize() const {
    std::string out;
    out += "task: " + task_id + "\n";
    out += "n_runs: " + std::to_string(n_runs) + "\n";
    out += "margin: " + format_double(margin) + "\n";
    out += "threshold_distance: " + format_double(threshold_distance) + "\n";
    out += "threshold_relative: " + format_double(threshold_relative) + "\n";
    for (double q : {0.0, 0.5, 0.9, 0.99, 1.0}) {
        out += "distance_q" + detail::format_fixed(q * 100.0, 0) + ": " +
               format_double(quantile(distances, q)) + "\n";
    }
    out += "distances: " + join_doubles(distances) + "\n";
    out += "relative_deviations: " + join_doubles(relative_deviations) + "\n";
    return out;
}

CalibrationProfile CalibrationProfile::deserialize(std::string_view text) {
    CalibrationProfile profile;
    bool saw_threshold = false;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        std::size_t colon = line.find(':');
        if (colon == std::string::npos) continue;
        std::string key = line.substr(0, colon);
        std::string value = std::string(detail::trim(std::string_view(line).substr(colon + 1)));
        if (key == "task") {
            profile.task_id = value;
        } else if (key == "n_runs") {
            profile.n_runs = static_cast<std::size_t>(std::strtoull(value.c_str(), nullptr, 10));
        } else if (key == "margin") {
            profile.margin = std::strtod(value.c_str(), nullptr);
        } else if (key == "threshold_distance") {
            profile.threshold_distance = std::strtod(value.c_str(), nullptr);
            saw_threshold = true;
        } else if (key == "threshold_relative") {
            profile.threshold_relative = std::strtod(value.c_str(), nullptr);
        } else if (key == "distances") {
            profile.distances = split_doubles(value);
        } else if (key == "relative_deviations") {
            profile.relative_deviations = split_doubles(value);
        }
    }
    if (!saw_threshold || profile.n_runs != profile.distances.size()) {
        raise(Errc::ConfigError, "malformed calibration profile");
    }
    return profile;
}

void CalibrationProfile::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::ConfigError, "cannot write " + path.string());
    out << serialize();
}

CalibrationProfile CalibrationProfile::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::ConfigError, "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return deserialize(buf.str());
}

}  // namespace hilbench
