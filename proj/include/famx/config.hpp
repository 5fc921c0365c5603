// Experiment configuration: a flat key=value text format, validation and a
// canonical 256-bit hash embedded in every output artifact.

#pragma once

#include "famx/backends.hpp"
#include "famx/hash.hpp"
#include "famx/losses.hpp"
#include "famx/optimize.hpp"
#include "famx/pipeline.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace famx {

struct ExperimentConfig {
    // Backend
    std::uint64_t backend_seed = 42;
    std::size_t layers = 18;
    std::size_t layer_dim = 64;
    std::size_t face_dim = 0; // 0 -> 2 * layers * layer_dim
    std::size_t identity_dim = 32;
    std::size_t attribute_dim = 32;
    double leak = 0.2;
    BandSpec bands; // coarse [0,3), mid [3,8), fine [8,L)

    // Losses and optimizer
    LossWeights weights;
    OptimizerConfig optimizer;

    // Augmentation
    AugmentationPolicy augmentation;
    std::uint64_t augmentation_seed = 7;

    // Synthetic dataset
    std::uint64_t dataset_seed = 42;
    std::size_t subjects = 100;
    std::size_t images_per_subject = 5;
    double intra_class_sigma = 0.3;
    double attack_train_fraction = 0.5;

    // Keys
    std::uint64_t key_seed = 4242;

    // Evaluation
    std::vector<double> fmr_list = {1e-3, 1e-4, 1e-5};
    std::size_t histogram_bins = 0; // 0 -> Doane's rule
    std::size_t robustness_keys = 5;
    double attack_ridge_alpha = 1.0;

    // Output
    std::string out_dir = "out";

    void validate() const;

    ToyBackendConfig backend_config() const;
    ProtectOptions protect_options(const std::string& subject_id) const;

    // Canonical text rendering (fixed field order, fixed float formatting)
    // and its SHA-256. Two configs with equal canonical forms behave
    // identically everywhere.
    std::string canonical() const;
    Sha256Digest hash() const;

    // Parses the key=value format; '#' starts a comment, unknown keys are
    // errors. Missing keys keep their defaults.
    static ExperimentConfig parse(const std::string& text);
    static ExperimentConfig load(const std::string& path);
};

} // namespace famx
