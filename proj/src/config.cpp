#include "famx/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <stdexcept>

namespace famx {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw std::invalid_argument("config: bad numeric value for " + key + ": " + value);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw std::invalid_argument("config: bad integer value for " + key + ": " + value);
    }
    return v;
}

} // namespace

void ExperimentConfig::validate() const {
    if (layers < 3) throw std::invalid_argument("config: layers must be >= 3");
    if (layer_dim < 1) throw std::invalid_argument("config: layer_dim must be >= 1");
    bands.validate(layers);
    if (leak < 0.0 || leak >= 1.0) throw std::invalid_argument("config: leak must be in [0, 1)");
    weights.validate();
    augmentation.validate();
    if (optimizer.learning_rate <= 0.0) {
        throw std::invalid_argument("config: learning_rate must be > 0");
    }
    if (subjects < 1 || images_per_subject < 1) {
        throw std::invalid_argument("config: dataset sizes must be >= 1");
    }
    if (intra_class_sigma < 0.0) {
        throw std::invalid_argument("config: intra_class_sigma must be >= 0");
    }
    if (attack_train_fraction <= 0.0 || attack_train_fraction >= 1.0) {
        throw std::invalid_argument("config: attack_train_fraction must be in (0, 1)");
    }
    if (fmr_list.empty()) throw std::invalid_argument("config: fmr_list must be non-empty");
    for (double f : fmr_list) {
        if (f <= 0.0 || f >= 1.0) throw std::invalid_argument("config: fmr values must be in (0,1)");
    }
    if (robustness_keys < 2) throw std::invalid_argument("config: robustness_keys must be >= 2");
    if (attack_ridge_alpha < 0.0) {
        throw std::invalid_argument("config: attack_ridge_alpha must be >= 0");
    }
    const std::size_t mid_w = bands.mid_count() * layer_dim;
    if (identity_dim > mid_w) {
        throw std::invalid_argument("config: identity_dim exceeds mid band width");
    }
}

ToyBackendConfig ExperimentConfig::backend_config() const {
    ToyBackendConfig cfg;
    cfg.seed = backend_seed;
    cfg.layers = layers;
    cfg.dim = layer_dim;
    cfg.face_dim = face_dim;
    cfg.identity_dim = identity_dim;
    cfg.attribute_dim = attribute_dim;
    cfg.bands = bands;
    cfg.leak = leak;
    return cfg;
}

ProtectOptions ExperimentConfig::protect_options(const std::string& subject_id) const {
    ProtectOptions opts;
    opts.weights = weights;
    opts.optimizer = optimizer;
    opts.augmentation = augmentation;
    opts.augmentation_seed = augmentation_seed;
    opts.subject_id = subject_id;
    opts.config_hash = hash();
    return opts;
}

std::string ExperimentConfig::canonical() const {
    std::ostringstream out;
    out << "famx-config-v1\n";
    out << "backend_seed = " << backend_seed << '\n';
    out << "layers = " << layers << '\n';
    out << "layer_dim = " << layer_dim << '\n';
    out << "face_dim = " << face_dim << '\n';
    out << "identity_dim = " << identity_dim << '\n';
    out << "attribute_dim = " << attribute_dim << '\n';
    out << "leak = " << fmt_double(leak) << '\n';
    out << "band_coarse_end = " << bands.coarse_end << '\n';
    out << "band_mid_end = " << bands.mid_end << '\n';
    out << "lambda_anon = " << fmt_double(weights.anonymity) << '\n';
    out << "lambda_idp = " << fmt_double(weights.identity_preservation) << '\n';
    out << "lambda_attr = " << fmt_double(weights.attribute) << '\n';
    out << "margin = " << fmt_double(weights.margin) << '\n';
    out << "optimizer = " << (optimizer.kind == OptimizerKind::Adam ? "adam" : "sgd") << '\n';
    out << "learning_rate = " << fmt_double(optimizer.learning_rate) << '\n';
    out << "adam_beta1 = " << fmt_double(optimizer.beta1) << '\n';
    out << "adam_beta2 = " << fmt_double(optimizer.beta2) << '\n';
    out << "adam_epsilon = " << fmt_double(optimizer.epsilon) << '\n';
    out << "steps = " << optimizer.steps << '\n';
    out << "augmentations = " << augmentation.count << '\n';
    out << "aug_sigma_coarse = " << fmt_double(augmentation.sigma_coarse) << '\n';
    out << "aug_sigma_fine = " << fmt_double(augmentation.sigma_fine) << '\n';
    out << "augmentation_seed = " << augmentation_seed << '\n';
    out << "dataset_seed = " << dataset_seed << '\n';
    out << "subjects = " << subjects << '\n';
    out << "images_per_subject = " << images_per_subject << '\n';
    out << "intra_class_sigma = " << fmt_double(intra_class_sigma) << '\n';
    out << "attack_train_fraction = " << fmt_double(attack_train_fraction) << '\n';
    out << "key_seed = " << key_seed << '\n';
    out << "fmr_list = ";
    for (std::size_t i = 0; i < fmr_list.size(); ++i) {
        if (i) out << ',';
        out << fmt_double(fmr_list[i]);
    }
    out << '\n';
    out << "histogram_bins = " << histogram_bins << '\n';
    out << "robustness_keys = " << robustness_keys << '\n';
    out << "attack_ridge_alpha = " << fmt_double(attack_ridge_alpha) << '\n';
    // out_dir deliberately excluded: artifact content does not depend on
    // where it is written.
    return out.str();
}

Sha256Digest ExperimentConfig::hash() const { return sha256(canonical()); }

ExperimentConfig ExperimentConfig::parse(const std::string& text) {
    ExperimentConfig cfg;
    std::map<std::string, std::function<void(const std::string&)>> setters;

    auto set_u64 = [](std::uint64_t& field) {
        return [&field](const std::string& v) { field = parse_u64("", v); };
    };
    auto set_size = [](std::size_t& field) {
        return [&field](const std::string& v) { field = std::size_t(parse_u64("", v)); };
    };
    auto set_dbl = [](double& field) {
        return [&field](const std::string& v) { field = parse_double("", v); };
    };

    setters["backend_seed"] = set_u64(cfg.backend_seed);
    setters["layers"] = set_size(cfg.layers);
    setters["layer_dim"] = set_size(cfg.layer_dim);
    setters["face_dim"] = set_size(cfg.face_dim);
    setters["identity_dim"] = set_size(cfg.identity_dim);
    setters["attribute_dim"] = set_size(cfg.attribute_dim);
    setters["leak"] = set_dbl(cfg.leak);
    setters["band_coarse_end"] = set_size(cfg.bands.coarse_end);
    setters["band_mid_end"] = set_size(cfg.bands.mid_end);
    setters["lambda_anon"] = set_dbl(cfg.weights.anonymity);
    setters["lambda_idp"] = set_dbl(cfg.weights.identity_preservation);
    setters["lambda_attr"] = set_dbl(cfg.weights.attribute);
    setters["margin"] = set_dbl(cfg.weights.margin);
    setters["optimizer"] = [&cfg](const std::string& v) {
        if (v == "adam") cfg.optimizer.kind = OptimizerKind::Adam;
        else if (v == "sgd") cfg.optimizer.kind = OptimizerKind::Sgd;
        else throw std::invalid_argument("config: optimizer must be adam or sgd");
    };
    setters["learning_rate"] = set_dbl(cfg.optimizer.learning_rate);
    setters["adam_beta1"] = set_dbl(cfg.optimizer.beta1);
    setters["adam_beta2"] = set_dbl(cfg.optimizer.beta2);
    setters["adam_epsilon"] = set_dbl(cfg.optimizer.epsilon);
    setters["steps"] = set_size(cfg.optimizer.steps);
    setters["augmentations"] = set_size(cfg.augmentation.count);
    setters["aug_sigma_coarse"] = set_dbl(cfg.augmentation.sigma_coarse);
    setters["aug_sigma_fine"] = set_dbl(cfg.augmentation.sigma_fine);
    setters["augmentation_seed"] = set_u64(cfg.augmentation_seed);
    setters["dataset_seed"] = set_u64(cfg.dataset_seed);
    setters["subjects"] = set_size(cfg.subjects);
    setters["images_per_subject"] = set_size(cfg.images_per_subject);
    setters["intra_class_sigma"] = set_dbl(cfg.intra_class_sigma);
    setters["attack_train_fraction"] = set_dbl(cfg.attack_train_fraction);
    setters["key_seed"] = set_u64(cfg.key_seed);
    setters["fmr_list"] = [&cfg](const std::string& v) {
        cfg.fmr_list.clear();
        std::istringstream ls(v);
        std::string item;
        while (std::getline(ls, item, ',')) cfg.fmr_list.push_back(parse_double("fmr_list", trim(item)));
    };
    setters["histogram_bins"] = set_size(cfg.histogram_bins);
    setters["robustness_keys"] = set_size(cfg.robustness_keys);
    setters["attack_ridge_alpha"] = set_dbl(cfg.attack_ridge_alpha);
    setters["out_dir"] = [&cfg](const std::string& v) { cfg.out_dir = v; };

    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash_pos = line.find('#');
        if (hash_pos != std::string::npos) line.erase(hash_pos);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                        " is not of the form key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw std::invalid_argument("config: unknown key '" + key + "' on line " +
                                        std::to_string(lineno));
        }
        try {
            it->second(value);
        } catch (const std::invalid_argument& e) {
            throw std::invalid_argument(std::string(e.what()) + " (line " +
                                        std::to_string(lineno) + ")");
        }
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

} // namespace famx
