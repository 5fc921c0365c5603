#include "famx/dataset.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace famx {

namespace {

std::string subject_name(std::size_t index) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "s%03zu", index);
    return buf;
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
    out.push_back(std::uint8_t(v));
    out.push_back(std::uint8_t(v >> 8));
}
void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(std::uint8_t(v >> (8 * i)));
}
void put_f64(std::vector<std::uint8_t>& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    for (int i = 0; i < 8; ++i) out.push_back(std::uint8_t(bits >> (8 * i)));
}

void write_file(const std::filesystem::path& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("dataset: cannot write " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
    if (!out) throw std::runtime_error("dataset: write failed for " + path.string());
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("dataset: cannot open " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

} // namespace

SyntheticDataset synthesize_dataset(const Backend& backend, const ExperimentConfig& cfg) {
    cfg.validate();
    const std::size_t layers = backend.layer_count();
    const std::size_t dim = backend.layer_dim();
    const BandSpec& bands = cfg.bands;

    SyntheticDataset dataset;
    dataset.config_hash = cfg.hash();
    dataset.attack_train_subjects =
        std::size_t(double(cfg.subjects) * cfg.attack_train_fraction + 0.5);
    if (dataset.attack_train_subjects == 0) dataset.attack_train_subjects = 1;
    if (dataset.attack_train_subjects >= cfg.subjects) {
        dataset.attack_train_subjects = cfg.subjects - 1;
    }

    Rng root(derive_seed("famx-dataset-v1", cfg.dataset_seed));
    dataset.subjects.reserve(cfg.subjects);
    for (std::size_t s = 0; s < cfg.subjects; ++s) {
        Rng sub = root.split();
        SubjectData subject;
        subject.id = subject_name(s);
        subject.identity_latent = LatentCode(layers, dim);
        for (double& v : subject.identity_latent.flat()) v = sub.gaussian();

        subject.faces.reserve(cfg.images_per_subject);
        for (std::size_t p = 0; p < cfg.images_per_subject; ++p) {
            LatentCode z = subject.identity_latent;
            // Identity sits in the mid band; only pose/style layers vary
            // between images of the same subject.
            for (std::size_t l = 0; l < layers; ++l) {
                if (bands.in_mid(l)) continue;
                double* layer = z.layer(l);
                for (std::size_t c = 0; c < dim; ++c) {
                    layer[c] += cfg.intra_class_sigma * sub.gaussian();
                }
            }
            subject.faces.push_back(backend.generate(z));
        }
        dataset.subjects.push_back(std::move(subject));
    }
    return dataset;
}

std::vector<std::uint8_t> serialize_face(const FaceVector& face, const Sha256Digest& config_hash) {
    std::vector<std::uint8_t> out;
    out.insert(out.end(), {'F', 'A', 'M', 'F'});
    put_u16(out, 1);
    put_u32(out, std::uint32_t(face.size()));
    for (double v : face.values) put_f64(out, v);
    out.insert(out.end(), config_hash.begin(), config_hash.end());
    return out;
}

FaceVector deserialize_face(const std::vector<std::uint8_t>& blob, Sha256Digest* config_hash) {
    if (blob.size() < 10 || blob[0] != 'F' || blob[1] != 'A' || blob[2] != 'M' || blob[3] != 'F') {
        throw std::invalid_argument("face blob: bad magic");
    }
    const std::uint16_t version = std::uint16_t(blob[4]) | std::uint16_t(blob[5]) << 8;
    if (version != 1) throw std::invalid_argument("face blob: unsupported version");
    std::uint32_t dim = 0;
    for (int i = 0; i < 4; ++i) dim |= std::uint32_t(blob[6 + i]) << (8 * i);
    const std::size_t expected = 10 + std::size_t(dim) * 8 + 32;
    if (blob.size() != expected) throw std::invalid_argument("face blob: bad length");

    FaceVector face;
    face.values.resize(dim);
    std::size_t pos = 10;
    for (auto& v : face.values) {
        std::uint64_t bits = 0;
        for (int i = 0; i < 8; ++i) bits |= std::uint64_t(blob[pos++]) << (8 * i);
        std::memcpy(&v, &bits, 8);
    }
    if (config_hash) std::copy(blob.begin() + std::ptrdiff_t(pos), blob.end(), config_hash->begin());
    return face;
}

std::string save_dataset(const SyntheticDataset& dataset, const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    fs::create_directories(root / "faces");

    std::ostringstream manifest;
    manifest << "famx-dataset-v1\n";
    manifest << "config_hash = " << to_hex(dataset.config_hash) << '\n';
    manifest << "subjects = " << dataset.subjects.size() << '\n';
    manifest << "images_per_subject = "
             << (dataset.subjects.empty() ? 0 : dataset.subjects.front().faces.size()) << '\n';
    manifest << "attack_train_subjects = " << dataset.attack_train_subjects << '\n';

    for (const auto& subject : dataset.subjects) {
        for (std::size_t p = 0; p < subject.faces.size(); ++p) {
            char suffix[24];
            std::snprintf(suffix, sizeof(suffix), "_%02zu.famf", p);
            const std::string filename = subject.id + suffix;
            const auto blob = serialize_face(subject.faces[p], dataset.config_hash);
            write_file(root / "faces" / filename, blob);
            const Sha256Digest digest = sha256(blob.data(), blob.size());
            manifest << subject.id << '\t' << filename << '\t' << to_hex(digest) << '\n';
        }
    }

    const std::string text = manifest.str();
    std::ofstream out(root / "manifest.txt", std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("dataset: cannot write manifest in " + dir);
    out << text;
    if (!out) throw std::runtime_error("dataset: manifest write failed in " + dir);
    return to_hex(sha256(text));
}

SyntheticDataset load_dataset(const std::string& dir) {
    namespace fs = std::filesystem;
    const fs::path root(dir);
    std::ifstream in(root / "manifest.txt", std::ios::binary);
    if (!in) throw std::runtime_error("dataset: cannot open manifest in " + dir);

    std::string line;
    if (!std::getline(in, line) || line != "famx-dataset-v1") {
        throw std::runtime_error("dataset: bad manifest header");
    }

    SyntheticDataset dataset;
    auto header_value = [&](const std::string& key) {
        if (!std::getline(in, line) || line.rfind(key + " = ", 0) != 0) {
            throw std::runtime_error("dataset: manifest missing " + key);
        }
        return line.substr(key.size() + 3);
    };
    from_hex(header_value("config_hash"), dataset.config_hash.data(), dataset.config_hash.size());
    const std::size_t subjects = std::stoul(header_value("subjects"));
    const std::size_t images = std::stoul(header_value("images_per_subject"));
    dataset.attack_train_subjects = std::stoul(header_value("attack_train_subjects"));

    dataset.subjects.reserve(subjects);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string subject_id, filename, digest_hex;
        if (!std::getline(fields, subject_id, '\t') || !std::getline(fields, filename, '\t') ||
            !std::getline(fields, digest_hex)) {
            throw std::runtime_error("dataset: malformed manifest line: " + line);
        }
        const auto blob = read_file(root / "faces" / filename);
        if (to_hex(sha256(blob.data(), blob.size())) != digest_hex) {
            throw std::runtime_error("dataset: checksum mismatch for " + filename);
        }
        Sha256Digest face_hash{};
        FaceVector face = deserialize_face(blob, &face_hash);
        if (face_hash != dataset.config_hash) {
            throw std::runtime_error("dataset: config hash mismatch in " + filename);
        }

        if (dataset.subjects.empty() || dataset.subjects.back().id != subject_id) {
            SubjectData subject;
            subject.id = subject_id;
            dataset.subjects.push_back(std::move(subject));
        }
        dataset.subjects.back().faces.push_back(std::move(face));
    }

    if (dataset.subjects.size() != subjects) {
        throw std::runtime_error("dataset: subject count does not match manifest header");
    }
    for (const auto& subject : dataset.subjects) {
        if (subject.faces.size() != images) {
            throw std::runtime_error("dataset: image count mismatch for " + subject.id);
        }
    }
    return dataset;
}

} // namespace famx
