// Benchmark orchestration: per-subject key issuance, batch protection, the
// four-property evaluation (anonymity, identity preservation, unlinkability,
// irreversibility) and report rendering.

#pragma once

#include "famx/attacks.hpp"
#include "famx/config.hpp"
#include "famx/dataset.hpp"
#include "famx/metrics.hpp"
#include "famx/pipeline.hpp"

#include <array>
#include <functional>
#include <string>
#include <vector>

namespace famx {

// Deterministic key material for one benchmark run. Subject keys come first
// in the issuance stream, then two linkability keys per subject, then the
// robustness sweep keys; all from one stream seeded with key_seed.
struct BenchKeys {
    std::vector<ProtectionKey> subject_keys;              // one per subject
    std::vector<std::array<ProtectionKey, 2>> link_keys;  // two extra per subject
    std::vector<ProtectionKey> robustness_keys;
    KeyRegistry registry; // logical timestamps in issuance order
};

BenchKeys issue_bench_keys(const ExperimentConfig& cfg);

// templates[s][p] protects dataset image p of subject s under that subject's
// key. Deterministic regardless of thread count.
std::vector<std::vector<ProtectedTemplate>>
protect_dataset(const Backend& backend, const SyntheticDataset& dataset, const BenchKeys& keys,
                const ExperimentConfig& cfg, std::size_t threads);

struct EvaluationReport {
    std::vector<double> fmr_list;
    std::vector<double> thresholds;     // calibrated on unprotected impostor scores
    std::vector<double> anonymity_psr;  // per FMR, protected vs own original

    double protected_eer = 0.0;
    double protected_auc = 0.0;
    double baseline_eer = 0.0; // unprotected faces, same pairing
    double baseline_auc = 0.0;

    UnlinkabilityReport unlink_protected; // mated = same subject, different keys
    UnlinkabilityReport unlink_control;   // protection = identity map

    KeyRobustnessReport key_robustness;
};

EvaluationReport evaluate_benchmark(const Backend& backend, const SyntheticDataset& dataset,
                                    const std::vector<std::vector<ProtectedTemplate>>& templates,
                                    const BenchKeys& keys, const ExperimentConfig& cfg,
                                    std::size_t threads);

// Runs both attacks on the held-out subjects; the mapper trains on the
// attack-training split. include_control adds the unprotected-template
// harness check (expected PSR near zero).
std::vector<AttackReport>
attack_benchmark(const Backend& backend, const SyntheticDataset& dataset,
                 const std::vector<std::vector<ProtectedTemplate>>& templates,
                 const BenchKeys& keys, const ExperimentConfig& cfg, bool include_control);

// Human-readable report (key: value lines and aligned tables).
std::string render_report(const ExperimentConfig& cfg, const EvaluationReport& eval,
                          const std::vector<AttackReport>& attacks);

// Machine-readable line-delimited JSON records, one metric datum per line,
// schema "famx-record-v1". Attack records can be appended to an evaluation
// record file.
std::string render_eval_records(const ExperimentConfig& cfg, const EvaluationReport& eval);
std::string render_attack_records(const ExperimentConfig& cfg,
                                  const std::vector<AttackReport>& attacks);
std::string render_records(const ExperimentConfig& cfg, const EvaluationReport& eval,
                           const std::vector<AttackReport>& attacks);

// Bounded-pool helper used by the batch drivers; fn(i) runs once for every
// i in [0, n), in unspecified order.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

} // namespace famx
