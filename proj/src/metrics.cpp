#include "famx/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace famx {

namespace {

void check_nonempty(const std::vector<double>& v, const char* msg) {
    if (v.empty()) throw std::invalid_argument(msg);
    for (double x : v) {
        if (!std::isfinite(x)) throw std::invalid_argument("metrics: non-finite score");
    }
}

// Fraction of scores >= t, from an ascending-sorted list.
double frac_at_least(const std::vector<double>& sorted, double t) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    return double(sorted.end() - it) / double(sorted.size());
}

// Fraction of scores < t, from an ascending-sorted list.
double frac_below(const std::vector<double>& sorted, double t) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), t);
    return double(it - sorted.begin()) / double(sorted.size());
}

} // namespace

double fmr_threshold(const std::vector<double>& impostor, double fmr) {
    check_nonempty(impostor, "fmr_threshold: empty impostor scores");
    if (fmr <= 0.0 || fmr >= 1.0) throw std::invalid_argument("fmr_threshold: fmr must be in (0,1)");
    std::vector<double> sorted = impostor;
    std::sort(sorted.begin(), sorted.end());
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        if (i > 0 && sorted[i] == sorted[i - 1]) continue;
        if (frac_at_least(sorted, sorted[i]) <= fmr) return sorted[i];
    }
    // No observed score qualifies: place the threshold just above the max so
    // no impostor matches.
    return std::nextafter(sorted.back(), std::numeric_limits<double>::infinity());
}

double psr(const std::vector<double>& protected_vs_original, double threshold) {
    check_nonempty(protected_vs_original, "psr: empty scores");
    std::size_t below = 0;
    for (double s : protected_vs_original) {
        if (s < threshold) ++below;
    }
    return 100.0 * double(below) / double(protected_vs_original.size());
}

double eer(const ScoreSet& scores) {
    check_nonempty(scores.genuine, "eer: empty genuine scores");
    check_nonempty(scores.impostor, "eer: empty impostor scores");
    std::vector<double> gen = scores.genuine;
    std::vector<double> imp = scores.impostor;
    std::sort(gen.begin(), gen.end());
    std::sort(imp.begin(), imp.end());

    std::vector<double> thresholds;
    thresholds.reserve(gen.size() + imp.size() + 1);
    thresholds.insert(thresholds.end(), gen.begin(), gen.end());
    thresholds.insert(thresholds.end(), imp.begin(), imp.end());
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    thresholds.push_back(
        std::nextafter(thresholds.back(), std::numeric_limits<double>::infinity()));

    // diff(t) = FMR(t) - FNMR(t) is nonincreasing in t; find the crossing.
    auto fmr_at = [&](double t) { return frac_at_least(imp, t); };
    auto fnmr_at = [&](double t) { return frac_below(gen, t); };

    std::size_t cross = thresholds.size();
    for (std::size_t i = 0; i < thresholds.size(); ++i) {
        if (fmr_at(thresholds[i]) - fnmr_at(thresholds[i]) <= 0.0) {
            cross = i;
            break;
        }
    }
    if (cross == thresholds.size()) cross = thresholds.size() - 1;

    const double fmr_c = fmr_at(thresholds[cross]);
    const double fnmr_c = fnmr_at(thresholds[cross]);
    if (fmr_c == fnmr_c) {
        // Equal over a possibly longer run of thresholds: midpoint rule.
        std::size_t last = cross;
        while (last + 1 < thresholds.size() &&
               fmr_at(thresholds[last + 1]) == fnmr_at(thresholds[last + 1])) {
            ++last;
        }
        return 0.5 * (fmr_c + fmr_at(thresholds[last]));
    }
    if (cross == 0) return 0.5 * (fmr_c + fnmr_c);

    // Linear interpolation of both step curves across the bracketing segment.
    const double f0 = fmr_at(thresholds[cross - 1]);
    const double n0 = fnmr_at(thresholds[cross - 1]);
    const double denom = (fnmr_c - n0) - (fmr_c - f0);
    if (denom == 0.0) return 0.5 * (fmr_c + fnmr_c);
    const double alpha = (f0 - n0) / denom;
    return f0 + alpha * (fmr_c - f0);
}

double auc(const ScoreSet& scores) {
    check_nonempty(scores.genuine, "auc: empty genuine scores");
    check_nonempty(scores.impostor, "auc: empty impostor scores");
    // Rank-sum formulation with average ranks for ties; identical to the
    // pairwise P(g > i) + 0.5 P(g == i) definition.
    struct Entry {
        double score;
        bool genuine;
    };
    std::vector<Entry> all;
    all.reserve(scores.genuine.size() + scores.impostor.size());
    for (double s : scores.genuine) all.push_back({s, true});
    for (double s : scores.impostor) all.push_back({s, false});
    std::sort(all.begin(), all.end(), [](const Entry& a, const Entry& b) {
        return a.score < b.score;
    });

    double rank_sum_genuine = 0.0;
    std::size_t i = 0;
    while (i < all.size()) {
        std::size_t j = i;
        while (j < all.size() && all[j].score == all[i].score) ++j;
        const double avg_rank = 0.5 * (double(i + 1) + double(j)); // ranks are 1-based
        for (std::size_t k = i; k < j; ++k) {
            if (all[k].genuine) rank_sum_genuine += avg_rank;
        }
        i = j;
    }
    const double ng = double(scores.genuine.size());
    const double ni = double(scores.impostor.size());
    return (rank_sum_genuine - ng * (ng + 1.0) / 2.0) / (ng * ni);
}

std::size_t doane_bins(const std::vector<double>& scores) {
    const std::size_t n = scores.size();
    if (n < 3) return 2;
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= double(n);
    double m2 = 0.0, m3 = 0.0;
    for (double s : scores) {
        const double d = s - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= double(n);
    m3 /= double(n);
    if (m2 <= 0.0) return 2;
    const double g1 = m3 / std::pow(m2, 1.5);
    const double sigma_g1 =
        std::sqrt(6.0 * double(n - 2) / (double(n + 1) * double(n + 3)));
    const double k = 1.0 + std::log2(double(n)) + std::log2(1.0 + std::abs(g1) / sigma_g1);
    return std::max<std::size_t>(2, std::size_t(std::ceil(k)));
}

UnlinkabilityReport unlinkability(const std::vector<double>& mated,
                                 const std::vector<double>& nonmated, std::size_t bins) {
    check_nonempty(mated, "unlinkability: empty mated scores");
    check_nonempty(nonmated, "unlinkability: empty nonmated scores");
    if (bins < 2) throw std::invalid_argument("unlinkability: need at least 2 bins");

    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double s : mated) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }
    for (double s : nonmated) {
        lo = std::min(lo, s);
        hi = std::max(hi, s);
    }

    UnlinkabilityReport report;
    if (hi == lo) {
        // All scores identical: both densities collapse onto one bin.
        report.degenerate = true;
        report.bins = 1;
        report.bin_width = 1.0;
        report.grid = {lo};
        report.mated_density = {1.0};
        report.nonmated_density = {1.0};
        report.local = {0.0};
        report.d_sys = 0.0;
        return report;
    }

    report.bins = bins;
    const double width = (hi - lo) / double(bins);
    report.bin_width = width;
    std::vector<std::size_t> count_m(bins, 0), count_nm(bins, 0);
    auto bin_of = [&](double s) {
        auto b = std::size_t((s - lo) / width);
        return std::min(b, bins - 1);
    };
    for (double s : mated) count_m[bin_of(s)]++;
    for (double s : nonmated) count_nm[bin_of(s)]++;

    report.grid.resize(bins);
    report.mated_density.resize(bins);
    report.nonmated_density.resize(bins);
    report.local.resize(bins);
    double d_sys = 0.0;
    for (std::size_t b = 0; b < bins; ++b) {
        report.grid[b] = lo + (double(b) + 0.5) * width;
        const double pm = double(count_m[b]) / (double(mated.size()) * width);
        const double pnm = double(count_nm[b]) / (double(nonmated.size()) * width);
        report.mated_density[b] = pm;
        report.nonmated_density[b] = pnm;
        double d_local = 0.0;
        if (pm > 0.0) {
            if (pnm == 0.0) {
                d_local = 1.0;
            } else {
                const double lr = pm / pnm;
                d_local = std::max(0.0, 2.0 * lr / (1.0 + lr) - 1.0);
            }
        }
        report.local[b] = d_local;
        d_sys += d_local * pm * width;
    }
    report.d_sys = std::min(1.0, d_sys);
    return report;
}

KeyRobustnessReport summarize_key_robustness(const std::vector<double>& psr_per_key) {
    if (psr_per_key.size() < 2) {
        throw std::invalid_argument("key robustness: need at least 2 keys");
    }
    KeyRobustnessReport r;
    r.psr_per_key = psr_per_key;
    for (double p : psr_per_key) r.mean += p;
    r.mean /= double(psr_per_key.size());
    double var = 0.0;
    for (double p : psr_per_key) var += (p - r.mean) * (p - r.mean);
    var /= double(psr_per_key.size());
    r.stddev = std::sqrt(var);
    return r;
}

} // namespace famx
