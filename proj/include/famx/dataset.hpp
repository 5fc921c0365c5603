// Synthetic identity dataset: per subject a ground-truth latent whose mid
// band carries the identity and P face images with band-limited intra-class
// jitter on the coarse and fine bands.

#pragma once

#include "famx/backends.hpp"
#include "famx/config.hpp"

#include <string>
#include <vector>

namespace famx {

struct SubjectData {
    std::string id;               // "s000", "s001", ...
    LatentCode identity_latent;   // ground truth, jitter-free
    std::vector<FaceVector> faces;
};

struct SyntheticDataset {
    std::vector<SubjectData> subjects;
    std::size_t attack_train_subjects = 0; // first k subjects train the mapper
    Sha256Digest config_hash{};
};

// Deterministic from (backend, config): identities are independent draws,
// images add intra-class jitter outside the mid band.
SyntheticDataset synthesize_dataset(const Backend& backend, const ExperimentConfig& cfg);

// Writes one face file per image plus a manifest; returns the manifest
// checksum (SHA-256 of the manifest text, hex).
std::string save_dataset(const SyntheticDataset& dataset, const std::string& dir);
SyntheticDataset load_dataset(const std::string& dir);

// Face file container: "FAMF", u16 version, u32 dim, doubles, 32-byte
// config hash.
std::vector<std::uint8_t> serialize_face(const FaceVector& face, const Sha256Digest& config_hash);
FaceVector deserialize_face(const std::vector<std::uint8_t>& blob, Sha256Digest* config_hash = nullptr);

} // namespace famx
