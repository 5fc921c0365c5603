// famx: config-driven benchmark driver for the cancelable face template
// pipeline. Verbs: synth, protect, verify, evaluate, attack, revoke, keys.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 I/O error,
// 4 numeric failure.

#include "famx/bench.hpp"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

namespace fs = std::filesystem;
using namespace famx;

namespace {

struct GlobalOpts {
    std::string config_path;
    std::string out_override;
    std::uint64_t seed = 0;
    bool seed_set = false;
    std::size_t threads = 0;
    bool quiet = false;
    bool force = false;
};

ExperimentConfig load_config(const GlobalOpts& g) {
    ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig{} : ExperimentConfig::load(g.config_path);
    if (g.seed_set) {
        // One seed pins the whole run; derived streams stay distinct.
        cfg.dataset_seed = g.seed;
        cfg.key_seed = g.seed + 1;
        cfg.augmentation_seed = g.seed + 2;
    }
    if (!g.out_override.empty()) cfg.out_dir = g.out_override;
    cfg.validate();
    return cfg;
}

std::size_t effective_threads(const GlobalOpts& g) {
    if (g.threads > 0) return g.threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

std::vector<std::uint8_t> read_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return std::vector<std::uint8_t>((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void write_text(const fs::path& path, const std::string& text, bool append = false) {
    std::ofstream out(path, std::ios::binary | (append ? std::ios::app : std::ios::trunc));
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed for " + path.string());
}

void check_hash(const Sha256Digest& artifact, const ExperimentConfig& cfg, const GlobalOpts& g,
                const std::string& what) {
    if (artifact == cfg.hash()) return;
    if (g.force) {
        std::cerr << "warning: config hash mismatch on " << what << " overridden by --force\n";
        return;
    }
    throw std::invalid_argument(what + " was produced under a different config (use --force to override)");
}

std::string template_filename(const std::string& subject_id, std::size_t image) {
    char buf[24];
    std::snprintf(buf, sizeof(buf), "_%02zu.famx", image);
    return subject_id + buf;
}

std::vector<std::vector<ProtectedTemplate>> load_templates(const ExperimentConfig& cfg,
                                                           const SyntheticDataset& dataset,
                                                           const GlobalOpts& g) {
    const fs::path dir = fs::path(cfg.out_dir) / "templates";
    std::vector<std::vector<ProtectedTemplate>> templates(dataset.subjects.size());
    for (std::size_t s = 0; s < dataset.subjects.size(); ++s) {
        for (std::size_t p = 0; p < dataset.subjects[s].faces.size(); ++p) {
            const fs::path path = dir / template_filename(dataset.subjects[s].id, p);
            ProtectedTemplate t = deserialize_template(read_bytes(path));
            check_hash(t.config_hash, cfg, g, path.string());
            templates[s].push_back(std::move(t));
        }
    }
    return templates;
}

KeyRegistry load_registry(const ExperimentConfig& cfg) {
    const fs::path path = fs::path(cfg.out_dir) / "registry.txt";
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return KeyRegistry::parse(buf.str());
}

void save_registry(const ExperimentConfig& cfg, const KeyRegistry& registry) {
    write_text(fs::path(cfg.out_dir) / "registry.txt", registry.serialize());
}

int cmd_synth(const GlobalOpts& g) {
    const ExperimentConfig cfg = load_config(g);
    const ToyBackend backend(cfg.backend_config());
    const SyntheticDataset dataset = synthesize_dataset(backend, cfg);
    const std::string checksum = save_dataset(dataset, (fs::path(cfg.out_dir) / "dataset").string());
    if (!g.quiet) {
        std::cout << "subjects: " << dataset.subjects.size()
                  << "  images_per_subject: " << cfg.images_per_subject
                  << "  face_dim: " << backend.face_dim() << '\n';
        std::cout << "manifest_checksum: " << checksum << '\n';
    }
    return 0;
}

int cmd_protect(const GlobalOpts& g) {
    const ExperimentConfig cfg = load_config(g);
    const ToyBackend backend(cfg.backend_config());
    const SyntheticDataset dataset = load_dataset((fs::path(cfg.out_dir) / "dataset").string());
    check_hash(dataset.config_hash, cfg, g, "dataset");

    const BenchKeys keys = issue_bench_keys(cfg);
    const auto templates = protect_dataset(backend, dataset, keys, cfg, effective_threads(g));

    const fs::path dir = fs::path(cfg.out_dir) / "templates";
    fs::create_directories(dir);
    std::size_t count = 0;
    for (std::size_t s = 0; s < templates.size(); ++s) {
        for (std::size_t p = 0; p < templates[s].size(); ++p) {
            write_bytes(dir / template_filename(dataset.subjects[s].id, p),
                        serialize_template(templates[s][p]));
            ++count;
        }
    }
    save_registry(cfg, keys.registry);
    if (!g.quiet) std::cout << "templates_written: " << count << '\n';
    return 0;
}

int cmd_verify(const GlobalOpts& g, const std::string& path_a, const std::string& path_b,
               double threshold) {
    const ExperimentConfig cfg = load_config(g);
    const ToyBackend backend(cfg.backend_config());
    const ProtectedTemplate a = deserialize_template(read_bytes(path_a));
    const ProtectedTemplate b = deserialize_template(read_bytes(path_b));
    check_hash(a.config_hash, cfg, g, path_a);
    check_hash(b.config_hash, cfg, g, path_b);
    const VerifyResult r = verify(backend, a, b, threshold);
    std::cout << "score: " << r.score << '\n';
    std::cout << "match: " << (r.match ? "yes" : "no") << '\n';
    return 0;
}

int cmd_evaluate(const GlobalOpts& g) {
    const ExperimentConfig cfg = load_config(g);
    const ToyBackend backend(cfg.backend_config());
    const SyntheticDataset dataset = load_dataset((fs::path(cfg.out_dir) / "dataset").string());
    check_hash(dataset.config_hash, cfg, g, "dataset");
    const auto templates = load_templates(cfg, dataset, g);
    const BenchKeys keys = issue_bench_keys(cfg);

    const EvaluationReport eval =
        evaluate_benchmark(backend, dataset, templates, keys, cfg, effective_threads(g));
    const std::string report = render_report(cfg, eval, {});
    write_text(fs::path(cfg.out_dir) / "report.txt", report);
    write_text(fs::path(cfg.out_dir) / "records.jsonl", render_eval_records(cfg, eval));
    if (!g.quiet) std::cout << report;
    return 0;
}

int cmd_attack(const GlobalOpts& g) {
    const ExperimentConfig cfg = load_config(g);
    const ToyBackend backend(cfg.backend_config());
    const SyntheticDataset dataset = load_dataset((fs::path(cfg.out_dir) / "dataset").string());
    check_hash(dataset.config_hash, cfg, g, "dataset");
    const auto templates = load_templates(cfg, dataset, g);
    const BenchKeys keys = issue_bench_keys(cfg);

    const std::vector<AttackReport> attacks =
        attack_benchmark(backend, dataset, templates, keys, cfg, true);

    std::ostringstream text;
    text << "famx attack report\n";
    text << "config_hash: " << to_hex(cfg.hash()) << '\n';
    for (const auto& a : attacks) {
        text << a.attack_name << ":  mean_cosine " << a.mean_identity_cosine << "  psr";
        for (std::size_t i = 0; i < a.fmr_list.size(); ++i) {
            text << "  " << a.fmr_list[i] << "=" << a.psr_per_fmr[i];
        }
        text << '\n';
    }
    write_text(fs::path(cfg.out_dir) / "attack.txt", text.str());
    const fs::path records = fs::path(cfg.out_dir) / "records.jsonl";
    write_text(records, render_attack_records(cfg, attacks), fs::exists(records));
    if (!g.quiet) std::cout << text.str();
    return 0;
}

int cmd_revoke(const GlobalOpts& g, const std::string& key_id_hex) {
    const ExperimentConfig cfg = load_config(g);
    if (key_id_hex.size() != 16) throw std::invalid_argument("revoke: key id must be 16 hex chars");
    std::uint8_t raw[8];
    from_hex(key_id_hex, raw, 8);
    std::uint64_t key_id = 0;
    for (int i = 0; i < 8; ++i) key_id = (key_id << 8) | raw[i];

    KeyRegistry registry = load_registry(cfg);
    registry.revoke(key_id, std::int64_t(registry.events().size()));
    save_registry(cfg, registry);
    if (!g.quiet) std::cout << "revoked: " << key_id_hex << '\n';
    return 0;
}

int cmd_keys(const GlobalOpts& g) {
    const ExperimentConfig cfg = load_config(g);
    const KeyRegistry registry = load_registry(cfg);
    for (const auto& e : registry.events()) {
        char idbuf[17];
        std::snprintf(idbuf, sizeof(idbuf), "%016llx", static_cast<unsigned long long>(e.key_id));
        std::cout << e.timestamp << '\t' << idbuf << '\t'
                  << (e.action == KeyAction::Issue ? "issue" : "revoke") << '\t'
                  << (registry.is_active(e.key_id) ? "active" : "revoked") << '\n';
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"cancelable face template benchmark"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOpts g;
    app.add_option("--config", g.config_path, "configuration file (key = value lines)");
    app.add_option("--seed", g.seed, "override all experiment seeds from one value")
        ->each([&g](const std::string&) { g.seed_set = true; });
    app.add_option("--out", g.out_override, "output directory override");
    app.add_option("--threads", g.threads, "worker threads (0 = hardware)");
    app.add_flag("--quiet", g.quiet, "suppress reports on stdout");
    app.add_flag("--force", g.force, "proceed on config hash mismatches");

    auto* synth = app.add_subcommand("synth", "generate the synthetic dataset");
    auto* protect_cmd = app.add_subcommand("protect", "protect every dataset image");
    auto* verify_cmd = app.add_subcommand("verify", "match two protected templates");
    std::string path_a, path_b;
    double threshold = 0.5;
    verify_cmd->add_option("template_a", path_a, "first template file")->required();
    verify_cmd->add_option("template_b", path_b, "second template file")->required();
    verify_cmd->add_option("--threshold", threshold, "match threshold (score >= t matches)");
    auto* evaluate_cmd = app.add_subcommand("evaluate", "run the evaluation benchmark");
    auto* attack_cmd = app.add_subcommand("attack", "run the irreversibility attacks");
    auto* revoke_cmd = app.add_subcommand("revoke", "revoke a key by id");
    std::string key_id_hex;
    revoke_cmd->add_option("key_id", key_id_hex, "16-hex-char key id")->required();
    auto* keys_cmd = app.add_subcommand("keys", "list the key registry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (synth->parsed()) return cmd_synth(g);
        if (protect_cmd->parsed()) return cmd_protect(g);
        if (verify_cmd->parsed()) return cmd_verify(g, path_a, path_b, threshold);
        if (evaluate_cmd->parsed()) return cmd_evaluate(g);
        if (attack_cmd->parsed()) return cmd_attack(g);
        if (revoke_cmd->parsed()) return cmd_revoke(g, key_id_hex);
        if (keys_cmd->parsed()) return cmd_keys(g);
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        const std::string msg = e.what();
        return msg.find("non-finite") != std::string::npos ? 4 : 3;
    }
    return 2;
}
