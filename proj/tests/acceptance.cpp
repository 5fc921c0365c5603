// Acceptance gate: one numbered check per invocation (argv[1] in 1..10),
// each printing a single "criterion N: PASS|FAIL" line plus supporting
// detail. Derived regression bounds are frozen from the first validated
// run of the default configuration and guard against silent drift.

#include "famx/bench.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <unistd.h>

using namespace famx;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::vector<std::string> notes;

    void expect(bool cond, const std::string& what) {
        if (!cond) ok = false;
        notes.push_back(std::string(cond ? "  ok:   " : "  FAIL: ") + what);
    }
    void note(const std::string& what) { notes.push_back("  info: " + what); }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

ToyBackendConfig tiny_backend_config() {
    ToyBackendConfig cfg;
    cfg.seed = 42;
    cfg.layers = 6;
    cfg.dim = 8;
    cfg.bands = BandSpec{2, 4};
    cfg.identity_dim = 12;
    cfg.attribute_dim = 10;
    return cfg;
}

LatentCode random_code(Rng& rng, const Backend& b, double scale = 0.7) {
    LatentCode z(b.layer_count(), b.layer_dim());
    for (double& v : z.flat()) v = scale * rng.gaussian();
    return z;
}

std::size_t hardware_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// ---------------------------------------------------------------------------

bool criterion_gradients(Check& c) {
    const ToyBackend backend(tiny_backend_config());
    Rng rng(1001);
    const double h = 1e-5;
    const double tol = 1e-4;

    std::size_t checked = 0;
    double worst = 0.0;
    const std::vector<LossWeights> configs = [] {
        LossWeights anon_only, idp_only, attr_only, composed;
        anon_only.identity_preservation = 0.0;
        anon_only.attribute = 0.0;
        anon_only.margin = -0.9; // keep the hinge active for almost all draws
        idp_only.anonymity = 0.0;
        idp_only.attribute = 0.0;
        attr_only.anonymity = 0.0;
        attr_only.identity_preservation = 0.0;
        composed.margin = -0.9;
        return std::vector<LossWeights>{anon_only, idp_only, attr_only, composed};
    }();

    while (checked < 120) {
        const LossWeights& weights = configs[checked % configs.size()];
        const LatentCode z_p = random_code(rng, backend);
        std::vector<LatentCode> z_aug;
        for (int i = 0; i < 2; ++i) z_aug.push_back(random_code(rng, backend));
        const Vector e_r = backend.identity_embed_latent(random_code(rng, backend));
        const Vector a_r = backend.attribute_embed_latent(random_code(rng, backend));

        // Skip draws adjacent to the hinge or L1 kinks, where finite
        // differences straddle the subgradient discontinuity.
        const Vector e_p = backend.identity_embed_latent(z_p);
        if (std::abs(cosine(e_p, e_r) - weights.margin) < 1e-3) continue;
        const Vector a_p = backend.attribute_embed_latent(z_p);
        bool near_kink = false;
        for (std::size_t i = 0; i < a_p.size(); ++i) {
            if (std::abs(a_p[i] - a_r[i]) < 1e-4) near_kink = true;
        }
        if (near_kink) continue;

        const LossGradients g = loss_grad_wrt_latents(backend, z_p, z_aug, e_r, a_r, weights);
        auto total_at = [&](const LatentCode& zp, const std::vector<LatentCode>& za) {
            return loss_grad_wrt_latents(backend, zp, za, e_r, a_r, weights).breakdown.total;
        };

        // One direction through the primary code, one through an augmented
        // code; both must match central differences.
        {
            const Vector dir = rng.gaussian_vector(z_p.flat().size());
            LatentCode zp = z_p, zm = z_p;
            axpy(h, dir, zp.flat());
            axpy(-h, dir, zm.flat());
            const double numeric = (total_at(zp, z_aug) - total_at(zm, z_aug)) / (2 * h);
            const double analytic = dot(g.primary, dir);
            const double rel = std::abs(analytic - numeric) /
                               std::max(std::abs(numeric), 1e-6);
            worst = std::max(worst, rel);
            if (rel >= tol) {
                c.expect(false, "primary gradient relative error " + fmt(rel));
                return false;
            }
        }
        {
            const Vector dir = rng.gaussian_vector(z_p.flat().size());
            auto zap = z_aug, zam = z_aug;
            axpy(h, dir, zap[0].flat());
            axpy(-h, dir, zam[0].flat());
            const double numeric = (total_at(z_p, zap) - total_at(z_p, zam)) / (2 * h);
            const double analytic = dot(g.augmented[0], dir);
            const double rel = std::abs(analytic - numeric) /
                               std::max(std::abs(numeric), 1e-6);
            worst = std::max(worst, rel);
            if (rel >= tol) {
                c.expect(false, "augmented gradient relative error " + fmt(rel));
                return false;
            }
        }
        ++checked;
    }
    c.expect(checked >= 100, "checked " + std::to_string(checked) + " random inputs");
    c.note("worst relative error " + fmt(worst) + " (tolerance " + fmt(tol) + ")");
    return c.ok;
}

bool criterion_mixing(Check& c) {
    Rng rng(1002);
    const BandSpec bands; // 3 / 8
    const std::size_t layers = 18, dim = 64;
    std::size_t mismatches = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        LatentCode z_r(layers, dim), z_f(layers, dim);
        for (double& v : z_r.flat()) v = rng.gaussian();
        for (double& v : z_f.flat()) v = rng.gaussian();
        const LatentCode mixed = mix_naive(z_r, z_f, bands);
        for (std::size_t l = 0; l < layers; ++l) {
            const LatentCode& src = bands.in_mid(l) ? z_f : z_r;
            for (std::size_t i = 0; i < dim; ++i) {
                if (mixed.at(l, i) != src.at(l, i)) ++mismatches; // bit-exact
            }
        }
    }
    c.expect(mismatches == 0,
             "band assignment bit-exact over 1000 pairs (" + std::to_string(mismatches) +
                 " mismatched entries)");
    return c.ok;
}

bool criterion_naive_anonymity(Check& c) {
    ExperimentConfig cfg;
    cfg.leak = 0.0; // perfect disentanglement base case
    const ToyBackend backend(cfg.backend_config());
    const SyntheticDataset dataset = synthesize_dataset(backend, cfg);
    const BenchKeys keys = issue_bench_keys(cfg);

    std::vector<Vector> originals;
    originals.reserve(cfg.subjects);
    for (const auto& subject : dataset.subjects) {
        originals.push_back(backend.identity_embed(subject.faces[0]));
    }

    double worst_gap = 0.0;
    std::vector<double> protected_scores;
    for (std::size_t s = 0; s < cfg.subjects; ++s) {
        const LatentCode z_r = backend.invert(dataset.subjects[s].faces[0]);
        const LatentCode z_f = key_to_latent(keys.subject_keys[s], backend.mapper(),
                                             backend.layer_count(), backend.layer_dim());
        const FaceVector x_p = backend.generate(mix_naive(z_r, z_f, cfg.bands));

        const double cos_protected = cosine(backend.identity_embed(x_p), originals[s]);
        // With zero leakage the protected identity is exactly the key face's.
        const double cos_key_face =
            cosine(backend.identity_embed(backend.generate(z_f)), originals[s]);
        worst_gap = std::max(worst_gap, std::abs(cos_protected - cos_key_face));
        protected_scores.push_back(cos_protected);
    }
    c.expect(worst_gap < 1e-9,
             "protected identity equals the key face identity (max gap " + fmt(worst_gap) + ")");

    std::vector<double> impostor;
    for (std::size_t i = 0; i < originals.size(); ++i) {
        for (std::size_t j = i + 1; j < originals.size(); ++j) {
            impostor.push_back(cosine(originals[i], originals[j]));
        }
    }
    const double threshold = fmr_threshold(impostor, 1e-3);
    std::size_t matched = 0;
    for (double s : protected_scores) {
        if (s >= threshold) ++matched;
    }
    c.note("threshold at FMR 0.1%: " + fmt(threshold));
    c.expect(matched == 0, "protected-vs-original matches at FMR 0.1%: " +
                               std::to_string(matched) + " of " +
                               std::to_string(protected_scores.size()));
    return c.ok;
}

bool criterion_optimization(Check& c) {
    const ExperimentConfig cfg; // defaults: leak 0.2, seeds 42/4242/7
    const ToyBackend backend(cfg.backend_config());
    const SyntheticDataset dataset = synthesize_dataset(backend, cfg);
    const BenchKeys keys = issue_bench_keys(cfg);

    std::size_t reduced = 0, anonymous = 0;
    double worst_reduction = 1.0, worst_cos = -1.0;
    for (std::size_t s = 0; s < cfg.subjects; ++s) {
        // The protection flow, spelled out so both ends of the loss
        // trajectory are visible: the refinement trace logs the pre-update
        // loss, so its first entry is the naive initialization; the final
        // loss is re-evaluated at the refined codes.
        const FaceVector& x_r = dataset.subjects[s].faces[0];
        const LatentCode z_r = backend.invert(x_r);
        const LatentCode z_f = key_to_latent(keys.subject_keys[s], backend.mapper(),
                                             backend.layer_count(), backend.layer_dim());
        const LatentCode z_p0 = mix_naive(z_r, z_f, cfg.bands);
        Rng aug_rng(derive_seed("famx-augment-v1", cfg.augmentation_seed));
        std::vector<LatentCode> z_aug0;
        for (const auto& x : augment(backend, x_r, cfg.bands, cfg.augmentation, aug_rng)) {
            z_aug0.push_back(mix_naive(backend.invert(x), z_f, cfg.bands));
        }
        const Vector e_r = backend.identity_embed(x_r);
        const Vector a_r = backend.attribute_embed(x_r);

        const RefineResult refined =
            refine(backend, z_p0, z_aug0, e_r, a_r, cfg.weights, cfg.optimizer);
        const double initial = refined.trace.steps.front().total;
        const double final_loss = loss_grad_wrt_latents(backend, refined.primary,
                                                        refined.augmented, e_r, a_r, cfg.weights)
                                      .breakdown.total;

        const double reduction = (initial - final_loss) / initial;
        worst_reduction = std::min(worst_reduction, reduction);
        if (reduction >= 0.30) ++reduced;

        const double cos_final =
            cosine(backend.identity_embed_latent(refined.primary), e_r);
        worst_cos = std::max(worst_cos, cos_final);
        if (cos_final <= cfg.weights.margin + 0.05) ++anonymous;
    }
    c.note("worst loss reduction " + fmt(worst_reduction) + ", worst final cosine " +
           fmt(worst_cos));
    c.expect(reduced >= 95, "loss reduced by >= 30% on " + std::to_string(reduced) +
                                "/100 subjects (need >= 95)");
    c.expect(anonymous >= 90, "final cosine <= margin + 0.05 on " + std::to_string(anonymous) +
                                  "/100 subjects (need >= 90)");
    return c.ok;
}

EvaluationReport default_evaluation(Check& c, ExperimentConfig& cfg_out) {
    ExperimentConfig cfg;
    const ToyBackend backend(cfg.backend_config());
    const SyntheticDataset dataset = synthesize_dataset(backend, cfg);
    const BenchKeys keys = issue_bench_keys(cfg);
    const auto templates = protect_dataset(backend, dataset, keys, cfg, hardware_threads());
    c.note("protected " + std::to_string(cfg.subjects * cfg.images_per_subject) + " images");
    cfg_out = cfg;
    return evaluate_benchmark(backend, dataset, templates, keys, cfg, hardware_threads());
}

bool criterion_identity_preservation(Check& c) {
    ExperimentConfig cfg;
    const EvaluationReport eval = default_evaluation(c, cfg);
    c.note("original EER " + fmt(eval.baseline_eer) + ", protected EER " +
           fmt(eval.protected_eer));
    c.note("original AUC " + fmt(eval.baseline_auc) + ", protected AUC " +
           fmt(eval.protected_auc));
    c.expect(eval.protected_eer <= eval.baseline_eer + 0.05,
             "protected EER within 0.05 of the unprotected EER");
    c.expect(eval.protected_auc >= 0.9, "protected AUC >= 0.9");
    return c.ok;
}

bool criterion_unlinkability(Check& c) {
    ExperimentConfig cfg;
    const EvaluationReport eval = default_evaluation(c, cfg);
    c.note("protected D_sys " + fmt(eval.unlink_protected.d_sys) + " over " +
           std::to_string(eval.unlink_protected.bins) + " bins");
    c.note("control D_sys " + fmt(eval.unlink_control.d_sys));
    c.expect(!eval.unlink_protected.degenerate, "protected score histogram is non-degenerate");
    c.expect(eval.unlink_protected.d_sys <= 0.30, "protected templates: D_sys <= 0.30");
    c.expect(eval.unlink_control.d_sys >= 0.70, "identity-map control: D_sys >= 0.70");
    return c.ok;
}

bool criterion_irreversibility(Check& c) {
    ExperimentConfig cfg;
    const ToyBackend backend(cfg.backend_config());
    const SyntheticDataset dataset = synthesize_dataset(backend, cfg);
    const BenchKeys keys = issue_bench_keys(cfg);
    const auto templates = protect_dataset(backend, dataset, keys, cfg, hardware_threads());
    const auto attacks = attack_benchmark(backend, dataset, templates, keys, cfg, true);

    for (const auto& a : attacks) {
        std::ostringstream line;
        line << a.attack_name << ": mean cosine " << fmt(a.mean_identity_cosine) << ", psr";
        for (std::size_t i = 0; i < a.fmr_list.size(); ++i) {
            line << ' ' << fmt(a.psr_per_fmr[i]);
        }
        c.note(line.str());
        const bool control = a.attack_name.find("control") != std::string::npos;
        for (double p : a.psr_per_fmr) {
            if (control) {
                c.expect(p < 5.0, a.attack_name + " PSR < 5% (harness validity)");
            } else {
                // Frozen regression: the first validated default run scored
                // 100% at every FMR for both attacks.
                c.expect(p >= 99.0, a.attack_name + " PSR >= 99% (frozen regression)");
            }
        }
        if (!control) {
            c.expect(a.mean_identity_cosine <= 0.05,
                     a.attack_name + " mean reconstruction cosine <= 0.05 (frozen regression)");
        }
    }

    // Base case: at zero leakage the latent-replacement reconstruction
    // carries exactly the key identity, so its similarity to the original is
    // statistically the same as an unrelated face's.
    ExperimentConfig zero = cfg;
    zero.leak = 0.0;
    const ToyBackend backend0(zero.backend_config());
    const SyntheticDataset dataset0 = synthesize_dataset(backend0, zero);
    const BenchKeys keys0 = issue_bench_keys(zero);

    std::vector<Vector> originals;
    for (const auto& subject : dataset0.subjects) {
        originals.push_back(backend0.identity_embed(subject.faces[0]));
    }
    double recon_mean = 0.0;
    for (std::size_t s = 0; s < zero.subjects; ++s) {
        const LatentCode z_r = backend0.invert(dataset0.subjects[s].faces[0]);
        const LatentCode z_f = key_to_latent(keys0.subject_keys[s], backend0.mapper(),
                                             backend0.layer_count(), backend0.layer_dim());
        ProtectedTemplate t;
        t.latent = mix_naive(z_r, z_f, zero.bands);
        t.face = backend0.generate(t.latent);
        const FaceVector recon = latent_replacement_attack(backend0, t, z_f, zero.bands);
        recon_mean += cosine(backend0.identity_embed(recon), originals[s]);
    }
    recon_mean /= double(zero.subjects);

    double pair_mean = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < originals.size(); ++i) {
        for (std::size_t j = i + 1; j < originals.size(); ++j) {
            pair_mean += cosine(originals[i], originals[j]);
            ++pairs;
        }
    }
    pair_mean /= double(pairs);
    c.note("zero-leak reconstruction mean cosine " + fmt(recon_mean) +
           ", random-pair mean cosine " + fmt(pair_mean));
    c.expect(std::abs(recon_mean - pair_mean) < 0.1,
             "reconstructions indistinguishable from random pairs (mean gap " +
                 fmt(std::abs(recon_mean - pair_mean)) + ")");
    return c.ok;
}

bool criterion_key_robustness(Check& c) {
    ExperimentConfig cfg;
    const EvaluationReport eval = default_evaluation(c, cfg);
    std::ostringstream line;
    line << "per-key PSR:";
    for (double p : eval.key_robustness.psr_per_key) line << ' ' << fmt(p);
    c.note(line.str());
    c.note("mean " + fmt(eval.key_robustness.mean) + ", stddev " +
           fmt(eval.key_robustness.stddev));
    c.expect(eval.key_robustness.psr_per_key.size() == cfg.robustness_keys,
             "one PSR per sweep key");
    // Frozen regression: the first validated default run had every key at
    // PSR 100 with zero spread; a generous drift allowance still catches a
    // broken key pathway.
    c.expect(eval.key_robustness.mean >= 95.0, "mean PSR >= 95 (frozen regression)");
    c.expect(eval.key_robustness.stddev <= 5.0, "PSR stddev <= 5 (frozen regression)");
    return c.ok;
}

bool criterion_metric_oracles(Check& c) {
    ScoreSet s;
    s.genuine = {0.9, 0.8, 0.7, 0.4};
    s.impostor = {0.5, 0.3, 0.2, 0.1};
    c.expect(eer(s) == 0.25, "EER example: " + fmt(eer(s)) + " == 0.25");

    ScoreSet ties;
    ties.genuine = {0.5, 0.5};
    ties.impostor = {0.5, 0.5};
    c.expect(auc(ties) == 0.5, "AUC all-tied example: " + fmt(auc(ties)) + " == 0.5");
    ScoreSet mixed;
    mixed.genuine = {0.9, 0.5};
    mixed.impostor = {0.5, 0.1};
    // Pairs: (0.9>0.5)+(0.9>0.1)+(0.5==0.5: half)+(0.5>0.1) = 3.5 of 4.
    c.expect(auc(mixed) == 0.875, "AUC tie rule: " + fmt(auc(mixed)) + " == 0.875");

    const UnlinkabilityReport apart = unlinkability({0.9, 0.91, 0.92}, {0.1, 0.11, 0.12}, 10);
    c.expect(apart.d_sys == 1.0, "D_sys == 1 for disjoint distributions");
    const UnlinkabilityReport together =
        unlinkability({0.2, 0.4, 0.6, 0.8}, {0.2, 0.4, 0.6, 0.8}, 4);
    c.expect(together.d_sys == 0.0, "D_sys == 0 for identical distributions");

    const std::vector<double> imp = {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
    c.expect(fmr_threshold(imp, 0.2) == 0.9, "threshold sweep: FMR 20% -> 0.9");
    c.expect(fmr_threshold(imp, 0.5) == 0.6, "threshold sweep: FMR 50% -> 0.6");
    c.expect(fmr_threshold(imp, 0.05) == std::nextafter(1.0, 2.0),
             "threshold sweep: unreachable FMR lands just above the maximum");
    return c.ok;
}

int run_cli(const std::string& cli, const std::string& args) {
    const std::string cmd = cli + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return rc;
}

bool compare_trees(Check& c, const fs::path& a, const fs::path& b) {
    std::set<fs::path> rel_a, rel_b;
    for (const auto& e : fs::recursive_directory_iterator(a)) {
        if (e.is_regular_file()) rel_a.insert(fs::relative(e.path(), a));
    }
    for (const auto& e : fs::recursive_directory_iterator(b)) {
        if (e.is_regular_file()) rel_b.insert(fs::relative(e.path(), b));
    }
    c.expect(rel_a == rel_b, "both runs produced the same file set (" +
                                 std::to_string(rel_a.size()) + " files)");
    if (rel_a != rel_b) return false;
    std::size_t differing = 0;
    for (const auto& rel : rel_a) {
        std::ifstream fa(a / rel, std::ios::binary), fb(b / rel, std::ios::binary);
        std::string da((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
        std::string db((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
        if (da != db) {
            ++differing;
            c.expect(false, "byte mismatch in " + rel.string());
        }
    }
    c.expect(differing == 0, "all artifacts byte-identical across executions");
    return differing == 0;
}

bool criterion_determinism(Check& c) {
    const char* cli = std::getenv("FAMX_CLI");
    if (!cli) {
        c.expect(false, "FAMX_CLI environment variable must point at the CLI binary");
        return false;
    }

    const fs::path root =
        fs::temp_directory_path() / ("famx-accept-" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    const fs::path config_path = root / "run.cfg";
    {
        std::ofstream cfg(config_path);
        cfg << "layers = 6\nlayer_dim = 8\nband_coarse_end = 2\nband_mid_end = 4\n"
               "identity_dim = 12\nattribute_dim = 10\n"
               "subjects = 10\nimages_per_subject = 2\nsteps = 10\naugmentations = 2\n"
               "fmr_list = 0.05\nrobustness_keys = 2\n";
    }

    bool all_zero = true;
    for (const char* run : {"a", "b"}) {
        const std::string out = (root / run).string();
        const std::string base = "--config " + config_path.string() + " --seed 123 --out " +
                                 out + " --threads 2 --quiet ";
        for (const char* verb : {"synth", "protect", "evaluate", "attack"}) {
            const int rc = run_cli(cli, base + verb);
            if (rc != 0) {
                all_zero = false;
                c.expect(false, std::string(verb) + " run " + run + " exited with " +
                                    std::to_string(rc));
            }
        }
    }
    c.expect(all_zero, "both end-to-end pipelines exited cleanly");
    if (!all_zero) {
        fs::remove_all(root);
        return false;
    }

    const bool identical = compare_trees(c, root / "a", root / "b");

    // Template container round trip on a real artifact.
    const fs::path tpl = root / "a" / "templates" / "s000_00.famx";
    std::ifstream in(tpl, std::ios::binary);
    std::vector<std::uint8_t> blob((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
    const ProtectedTemplate t = deserialize_template(blob);
    c.expect(serialize_template(t) == blob, "template file round-trips bit-exactly");
    c.expect(t.subject_id == "s000", "template carries its subject id");

    fs::remove_all(root);
    return c.ok && identical;
}

} // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::fprintf(stderr, "usage: %s <criterion 1..10>\n", argv[0]);
        return 2;
    }
    const int n = std::atoi(argv[1]);
    static const struct {
        const char* name;
        double time_limit_s;
        bool (*fn)(Check&);
    } criteria[] = {
        {"gradient correctness", 10.0, criterion_gradients},
        {"mixing exactness", 1.0, criterion_mixing},
        {"naive-mixing anonymity base case", 30.0, criterion_naive_anonymity},
        {"optimization effectiveness", 300.0, criterion_optimization},
        {"identity preservation", 300.0, criterion_identity_preservation},
        {"unlinkability", 300.0, criterion_unlinkability},
        {"irreversibility harness", 600.0, criterion_irreversibility},
        {"key robustness", 600.0, criterion_key_robustness},
        {"metric oracles", 1.0, criterion_metric_oracles},
        {"determinism and formats", 600.0, criterion_determinism},
    };
    if (n < 1 || n > 10) {
        std::fprintf(stderr, "criterion must be in 1..10\n");
        return 2;
    }

    Check check;
    const auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = criteria[n - 1].fn(check);
    } catch (const std::exception& e) {
        check.expect(false, std::string("unexpected exception: ") + e.what());
        ok = false;
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (elapsed > criteria[n - 1].time_limit_s) {
        check.expect(false, "runtime " + fmt(elapsed) + "s exceeds the " +
                                fmt(criteria[n - 1].time_limit_s) + "s budget");
        ok = false;
    }

    for (const auto& note : check.notes) std::puts(note.c_str());
    std::printf("criterion %d (%s): %s  [%.2fs]\n", n, criteria[n - 1].name,
                ok ? "PASS" : "FAIL", elapsed);
    return ok ? 0 : 1;
}
