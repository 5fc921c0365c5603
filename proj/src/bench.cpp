#include "famx/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace famx {

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn) {
    if (threads == 0) threads = 1;
    if (n > 0) threads = std::min(threads, n);
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

BenchKeys issue_bench_keys(const ExperimentConfig& cfg) {
    BenchKeys keys;
    Rng rng(derive_seed("famx-keys-v1", cfg.key_seed));
    std::int64_t clock = 0;
    auto issue = [&] {
        ProtectionKey k = issue_key(rng);
        keys.registry.record_issue(k.key_id(), clock++);
        return k;
    };
    keys.subject_keys.reserve(cfg.subjects);
    for (std::size_t s = 0; s < cfg.subjects; ++s) keys.subject_keys.push_back(issue());
    keys.link_keys.reserve(cfg.subjects);
    for (std::size_t s = 0; s < cfg.subjects; ++s) {
        keys.link_keys.push_back({issue(), issue()});
    }
    keys.robustness_keys.reserve(cfg.robustness_keys);
    for (std::size_t r = 0; r < cfg.robustness_keys; ++r) keys.robustness_keys.push_back(issue());
    return keys;
}

std::vector<std::vector<ProtectedTemplate>>
protect_dataset(const Backend& backend, const SyntheticDataset& dataset, const BenchKeys& keys,
                const ExperimentConfig& cfg, std::size_t threads) {
    const std::size_t subjects = dataset.subjects.size();
    if (keys.subject_keys.size() != subjects) {
        throw std::invalid_argument("protect_dataset: one key per subject required");
    }
    std::vector<std::vector<ProtectedTemplate>> templates(subjects);
    for (std::size_t s = 0; s < subjects; ++s) {
        templates[s].resize(dataset.subjects[s].faces.size());
    }

    std::vector<std::pair<std::size_t, std::size_t>> work;
    for (std::size_t s = 0; s < subjects; ++s) {
        for (std::size_t p = 0; p < dataset.subjects[s].faces.size(); ++p) work.push_back({s, p});
    }
    parallel_for(work.size(), threads, [&](std::size_t i) {
        const auto [s, p] = work[i];
        const ProtectOptions opts = cfg.protect_options(dataset.subjects[s].id);
        templates[s][p] = protect(backend, cfg.bands, dataset.subjects[s].faces[p],
                                  keys.subject_keys[s], opts, &keys.registry);
    });
    return templates;
}

namespace {

// Identity embeddings of every face, subject-major.
std::vector<std::vector<Vector>> embed_faces(const Backend& backend,
                                             const SyntheticDataset& dataset,
                                             std::size_t threads) {
    std::vector<std::vector<Vector>> emb(dataset.subjects.size());
    parallel_for(dataset.subjects.size(), threads, [&](std::size_t s) {
        emb[s].reserve(dataset.subjects[s].faces.size());
        for (const auto& face : dataset.subjects[s].faces) {
            emb[s].push_back(backend.identity_embed(face));
        }
    });
    return emb;
}

std::vector<std::vector<Vector>>
embed_templates(const Backend& backend, const std::vector<std::vector<ProtectedTemplate>>& t,
                std::size_t threads) {
    std::vector<std::vector<Vector>> emb(t.size());
    parallel_for(t.size(), threads, [&](std::size_t s) {
        emb[s].reserve(t[s].size());
        for (const auto& tmpl : t[s]) emb[s].push_back(backend.identity_embed_latent(tmpl.latent));
    });
    return emb;
}

// All cross-subject pairs (every image against every image).
std::vector<double> impostor_scores(const std::vector<std::vector<Vector>>& emb) {
    std::vector<double> scores;
    for (std::size_t s = 0; s + 1 < emb.size(); ++s) {
        for (std::size_t t = s + 1; t < emb.size(); ++t) {
            for (const auto& a : emb[s]) {
                for (const auto& b : emb[t]) scores.push_back(cosine(a, b));
            }
        }
    }
    return scores;
}

// All same-subject image pairs.
std::vector<double> genuine_scores(const std::vector<std::vector<Vector>>& emb) {
    std::vector<double> scores;
    for (const auto& subject : emb) {
        for (std::size_t p = 0; p + 1 < subject.size(); ++p) {
            for (std::size_t q = p + 1; q < subject.size(); ++q) {
                scores.push_back(cosine(subject[p], subject[q]));
            }
        }
    }
    return scores;
}

std::size_t resolve_bins(const ExperimentConfig& cfg, const std::vector<double>& mated,
                         const std::vector<double>& nonmated) {
    if (cfg.histogram_bins >= 2) return cfg.histogram_bins;
    std::vector<double> all = mated;
    all.insert(all.end(), nonmated.begin(), nonmated.end());
    return doane_bins(all);
}

std::string fmt(double v, int precision = 4) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

} // namespace

EvaluationReport evaluate_benchmark(const Backend& backend, const SyntheticDataset& dataset,
                                    const std::vector<std::vector<ProtectedTemplate>>& templates,
                                    const BenchKeys& keys, const ExperimentConfig& cfg,
                                    std::size_t threads) {
    const std::size_t subjects = dataset.subjects.size();
    if (templates.size() != subjects) {
        throw std::invalid_argument("evaluate_benchmark: template/subject count mismatch");
    }

    const auto orig_emb = embed_faces(backend, dataset, threads);
    const auto prot_emb = embed_templates(backend, templates, threads);

    EvaluationReport report;
    report.fmr_list = cfg.fmr_list;

    // Thresholds come from the unprotected system: all cross-subject pairs.
    const std::vector<double> baseline_impostor = impostor_scores(orig_emb);
    const std::vector<double> baseline_genuine = genuine_scores(orig_emb);
    for (double fmr : cfg.fmr_list) {
        report.thresholds.push_back(fmr_threshold(baseline_impostor, fmr));
    }

    // Anonymity: each protected template against its own original.
    std::vector<double> anon_scores;
    for (std::size_t s = 0; s < subjects; ++s) {
        for (std::size_t p = 0; p < prot_emb[s].size(); ++p) {
            anon_scores.push_back(cosine(prot_emb[s][p], orig_emb[s][p]));
        }
    }
    for (double t : report.thresholds) report.anonymity_psr.push_back(psr(anon_scores, t));

    // Identity preservation: protected-vs-protected verification under the
    // same per-subject key, against the unprotected baseline.
    ScoreSet protected_scores{genuine_scores(prot_emb), impostor_scores(prot_emb)};
    ScoreSet baseline_scores{baseline_genuine, baseline_impostor};
    report.protected_eer = eer(protected_scores);
    report.protected_auc = auc(protected_scores);
    report.baseline_eer = eer(baseline_scores);
    report.baseline_auc = auc(baseline_scores);

    // Unlinkability: image 0 of each subject under two fresh keys; mated
    // pairs mix those with the subject's main template.
    std::vector<std::array<Vector, 2>> link_emb(subjects);
    parallel_for(subjects, threads, [&](std::size_t s) {
        const ProtectOptions opts = cfg.protect_options(dataset.subjects[s].id);
        for (int v = 0; v < 2; ++v) {
            const ProtectedTemplate t =
                protect(backend, cfg.bands, dataset.subjects[s].faces[0],
                        keys.link_keys[s][std::size_t(v)], opts, &keys.registry);
            link_emb[s][std::size_t(v)] = backend.identity_embed_latent(t.latent);
        }
    });
    std::vector<double> mated, nonmated;
    for (std::size_t s = 0; s < subjects; ++s) {
        mated.push_back(cosine(link_emb[s][0], link_emb[s][1]));
        mated.push_back(cosine(link_emb[s][0], prot_emb[s][0]));
        mated.push_back(cosine(link_emb[s][1], prot_emb[s][0]));
    }
    for (std::size_t s = 0; s + 1 < subjects; ++s) {
        for (std::size_t t = s + 1; t < subjects; ++t) {
            nonmated.push_back(cosine(prot_emb[s][0], prot_emb[t][0]));
        }
    }
    report.unlink_protected = unlinkability(mated, nonmated, resolve_bins(cfg, mated, nonmated));

    // Control: protection as the identity map, so mated pairs are plain
    // same-subject comparisons and keys have no effect.
    std::vector<double> mated_control = baseline_genuine;
    std::vector<double> nonmated_control;
    for (std::size_t s = 0; s + 1 < subjects; ++s) {
        for (std::size_t t = s + 1; t < subjects; ++t) {
            nonmated_control.push_back(cosine(orig_emb[s][0], orig_emb[t][0]));
        }
    }
    report.unlink_control = unlinkability(mated_control, nonmated_control,
                                          resolve_bins(cfg, mated_control, nonmated_control));

    // Key robustness: one shared key across all subjects, repeated per key.
    std::vector<double> psr_per_key(keys.robustness_keys.size());
    for (std::size_t k = 0; k < keys.robustness_keys.size(); ++k) {
        std::vector<double> scores(subjects);
        parallel_for(subjects, threads, [&](std::size_t s) {
            const ProtectOptions opts = cfg.protect_options(dataset.subjects[s].id);
            const ProtectedTemplate t =
                protect(backend, cfg.bands, dataset.subjects[s].faces[0],
                        keys.robustness_keys[k], opts, &keys.registry);
            scores[s] = cosine(backend.identity_embed_latent(t.latent), orig_emb[s][0]);
        });
        psr_per_key[k] = psr(scores, report.thresholds[0]);
    }
    report.key_robustness = summarize_key_robustness(psr_per_key);
    return report;
}

std::vector<AttackReport>
attack_benchmark(const Backend& backend, const SyntheticDataset& dataset,
                 const std::vector<std::vector<ProtectedTemplate>>& templates,
                 const BenchKeys& keys, const ExperimentConfig& cfg, bool include_control) {
    const std::size_t subjects = dataset.subjects.size();
    const std::size_t split = dataset.attack_train_subjects;
    if (split == 0 || split >= subjects) {
        throw std::invalid_argument("attack_benchmark: empty train or eval split");
    }

    const auto orig_emb = embed_faces(backend, dataset, 0);
    std::vector<double> thresholds;
    {
        const std::vector<double> impostor = impostor_scores(orig_emb);
        for (double fmr : cfg.fmr_list) thresholds.push_back(fmr_threshold(impostor, fmr));
    }

    std::vector<std::pair<std::size_t, std::size_t>> eval_items;
    for (std::size_t s = split; s < subjects; ++s) {
        for (std::size_t p = 0; p < dataset.subjects[s].faces.size(); ++p) {
            eval_items.push_back({s, p});
        }
    }

    auto score_reconstructions = [&](const std::string& name,
                                     const std::function<FaceVector(std::size_t, std::size_t)>&
                                         reconstruct) {
        std::vector<double> scores(eval_items.size());
        parallel_for(eval_items.size(), 0, [&](std::size_t i) {
            const auto [s, p] = eval_items[i];
            FaceVector recon = reconstruct(s, p);
            // Generated faces can brush the encoder's saturation guard; pull
            // them just inside before embedding.
            const double limit = std::nextafter(1.0 - 1e-9, 0.0);
            for (double& v : recon.values) v = std::clamp(v, -limit, limit);
            scores[i] = cosine(backend.identity_embed(recon), orig_emb[s][p]);
        });
        AttackReport report;
        report.attack_name = name;
        report.fmr_list = cfg.fmr_list;
        for (double t : thresholds) report.psr_per_fmr.push_back(psr(scores, t));
        double sum = 0.0;
        for (double s : scores) sum += s;
        report.mean_identity_cosine = sum / double(scores.size());
        return report;
    };

    std::vector<AttackReport> reports;

    reports.push_back(score_reconstructions("latent_replacement", [&](std::size_t s, std::size_t p) {
        const LatentCode z_f = key_to_latent(keys.subject_keys[s], backend.mapper(),
                                             backend.layer_count(), backend.layer_dim());
        return latent_replacement_attack(backend, templates[s][p], z_f, cfg.bands);
    }));

    std::vector<std::pair<FaceVector, FaceVector>> pairs;
    for (std::size_t s = 0; s < split; ++s) {
        for (std::size_t p = 0; p < dataset.subjects[s].faces.size(); ++p) {
            pairs.push_back({templates[s][p].face, dataset.subjects[s].faces[p]});
        }
    }
    const LinearMapper mapper = train_mapper(pairs, cfg.attack_ridge_alpha);
    reports.push_back(score_reconstructions("ridge_mapper", [&](std::size_t s, std::size_t p) {
        return apply_mapper(mapper, templates[s][p].face);
    }));

    if (include_control) {
        // Harness validity: the same attacks against unprotected templates
        // must recover identity almost perfectly.
        reports.push_back(
            score_reconstructions("latent_replacement_control", [&](std::size_t s, std::size_t p) {
                ProtectedTemplate unprotected;
                unprotected.face = dataset.subjects[s].faces[p];
                const LatentCode z_f = key_to_latent(keys.subject_keys[s], backend.mapper(),
                                                     backend.layer_count(), backend.layer_dim());
                return latent_replacement_attack(backend, unprotected, z_f, cfg.bands);
            }));

        std::vector<std::pair<FaceVector, FaceVector>> id_pairs;
        for (std::size_t s = 0; s < split; ++s) {
            for (const auto& face : dataset.subjects[s].faces) id_pairs.push_back({face, face});
        }
        const LinearMapper id_mapper = train_mapper(id_pairs, cfg.attack_ridge_alpha);
        reports.push_back(score_reconstructions("ridge_mapper_control",
                                                [&](std::size_t s, std::size_t p) {
                                                    return apply_mapper(
                                                        id_mapper, dataset.subjects[s].faces[p]);
                                                }));
    }
    return reports;
}

std::string render_report(const ExperimentConfig& cfg, const EvaluationReport& eval,
                          const std::vector<AttackReport>& attacks) {
    std::ostringstream out;
    out << "famx benchmark report\n";
    out << "config_hash: " << to_hex(cfg.hash()) << '\n';
    out << "subjects: " << cfg.subjects << "  images_per_subject: " << cfg.images_per_subject
        << '\n';
    out << '\n';

    out << "[anonymity]\n";
    out << "fmr          threshold    psr\n";
    for (std::size_t i = 0; i < eval.fmr_list.size(); ++i) {
        out << fmt(eval.fmr_list[i], 6) << "     " << fmt(eval.thresholds[i], 6) << "     "
            << fmt(eval.anonymity_psr[i], 2) << '\n';
    }
    out << '\n';

    out << "[identity_preservation]\n";
    out << "system       eer        auc\n";
    out << "original     " << fmt(eval.baseline_eer) << "     " << fmt(eval.baseline_auc) << '\n';
    out << "protected    " << fmt(eval.protected_eer) << "     " << fmt(eval.protected_auc)
        << '\n';
    out << '\n';

    out << "[unlinkability]\n";
    out << "d_sys_protected: " << fmt(eval.unlink_protected.d_sys) << "  (bins "
        << eval.unlink_protected.bins << (eval.unlink_protected.degenerate ? ", degenerate" : "")
        << ")\n";
    out << "d_sys_control:   " << fmt(eval.unlink_control.d_sys) << "  (bins "
        << eval.unlink_control.bins << (eval.unlink_control.degenerate ? ", degenerate" : "")
        << ")\n";
    out << '\n';

    out << "[key_robustness]\n";
    out << "psr_per_key:";
    for (double p : eval.key_robustness.psr_per_key) out << ' ' << fmt(p, 2);
    out << '\n';
    out << "mean: " << fmt(eval.key_robustness.mean, 2)
        << "  stddev: " << fmt(eval.key_robustness.stddev, 2) << '\n';
    out << '\n';

    out << "[attacks]\n";
    for (const auto& a : attacks) {
        out << a.attack_name << ":  mean_cosine " << fmt(a.mean_identity_cosine) << "  psr";
        for (std::size_t i = 0; i < a.fmr_list.size(); ++i) {
            out << "  " << fmt(a.fmr_list[i], 6) << "=" << fmt(a.psr_per_fmr[i], 2);
        }
        out << '\n';
    }
    return out.str();
}

std::string render_eval_records(const ExperimentConfig& cfg, const EvaluationReport& eval) {
    using nlohmann::json;
    std::ostringstream out;
    const std::string hash = to_hex(cfg.hash());
    auto emit = [&](json j) {
        j["schema"] = "famx-record-v1";
        j["config_hash"] = hash;
        out << j.dump() << '\n';
    };

    for (std::size_t i = 0; i < eval.fmr_list.size(); ++i) {
        emit(json{{"type", "anonymity"},
                  {"fmr", eval.fmr_list[i]},
                  {"threshold", eval.thresholds[i]},
                  {"psr", eval.anonymity_psr[i]}});
    }
    emit(json{{"type", "identity_preservation"},
              {"system", "original"},
              {"eer", eval.baseline_eer},
              {"auc", eval.baseline_auc}});
    emit(json{{"type", "identity_preservation"},
              {"system", "protected"},
              {"eer", eval.protected_eer},
              {"auc", eval.protected_auc}});
    emit(json{{"type", "unlinkability"},
              {"system", "protected"},
              {"d_sys", eval.unlink_protected.d_sys},
              {"bins", eval.unlink_protected.bins},
              {"degenerate", eval.unlink_protected.degenerate}});
    emit(json{{"type", "unlinkability"},
              {"system", "control"},
              {"d_sys", eval.unlink_control.d_sys},
              {"bins", eval.unlink_control.bins},
              {"degenerate", eval.unlink_control.degenerate}});
    emit(json{{"type", "key_robustness"},
              {"psr_per_key", eval.key_robustness.psr_per_key},
              {"mean", eval.key_robustness.mean},
              {"stddev", eval.key_robustness.stddev}});
    return out.str();
}

std::string render_attack_records(const ExperimentConfig& cfg,
                                  const std::vector<AttackReport>& attacks) {
    using nlohmann::json;
    std::ostringstream out;
    const std::string hash = to_hex(cfg.hash());
    for (const auto& a : attacks) {
        json j{{"type", "attack"},
               {"name", a.attack_name},
               {"fmr_list", a.fmr_list},
               {"psr_per_fmr", a.psr_per_fmr},
               {"mean_identity_cosine", a.mean_identity_cosine}};
        j["schema"] = "famx-record-v1";
        j["config_hash"] = hash;
        out << j.dump() << '\n';
    }
    return out.str();
}

std::string render_records(const ExperimentConfig& cfg, const EvaluationReport& eval,
                           const std::vector<AttackReport>& attacks) {
    return render_eval_records(cfg, eval) + render_attack_records(cfg, attacks);
}

} // namespace famx
