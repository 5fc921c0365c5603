// Verification metrics: FMR-calibrated thresholds, protection success rate,
// EER, AUC and the likelihood-ratio unlinkability measure.

#pragma once

#include <cstddef>
#include <vector>

namespace famx {

// Labeled similarity scores. Depending on context the two classes are
// genuine/impostor or mated/non-mated.
struct ScoreSet {
    std::vector<double> genuine;
    std::vector<double> impostor;
};

// Smallest threshold t (restricted to observed scores, or just above the
// maximum) such that the fraction of impostor scores >= t is at most fmr.
// Match convention everywhere: score >= threshold.
double fmr_threshold(const std::vector<double>& impostor, double fmr);

// Protection success rate: percentage of scores strictly below the threshold.
double psr(const std::vector<double>& protected_vs_original, double threshold);

// Equal error rate, linearly interpolated between the thresholds bracketing
// the FMR/FNMR crossing; midpoint rule if they are equal over an interval.
double eer(const ScoreSet& scores);

// P(genuine > impostor) + 0.5 P(tie) over all pairs, computed by rank sums.
double auc(const ScoreSet& scores);

struct UnlinkabilityReport {
    std::vector<double> grid;        // bin centers
    std::vector<double> local;       // D(s) per bin, in [0, 1]
    std::vector<double> mated_density;
    std::vector<double> nonmated_density;
    double bin_width = 0.0;
    std::size_t bins = 0;
    double d_sys = 0.0;              // global score in [0, 1]
    bool degenerate = false;         // all scores identical, single-bin fallback
};

// Doane's rule for the default histogram bin count.
std::size_t doane_bins(const std::vector<double>& scores);

// Histogram-based Gomez-Barrero style analysis with prior ratio 1:
// D(s) = max(0, 2 LR(s)/(1 + LR(s)) - 1), D_sys = sum D(s) p(s|mated) ds.
// Bins where only mated mass exists contribute D = 1.
UnlinkabilityReport unlinkability(const std::vector<double>& mated,
                                 const std::vector<double>& nonmated, std::size_t bins);

struct KeyRobustnessReport {
    std::vector<double> psr_per_key;
    double mean = 0.0;
    double stddev = 0.0; // population standard deviation
};

KeyRobustnessReport summarize_key_robustness(const std::vector<double>& psr_per_key);

} // namespace famx
