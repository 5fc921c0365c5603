#include "famx/latent.hpp"

#include <cstring>
#include <stdexcept>

namespace famx {

void BandSpec::validate(std::size_t layers) const {
    if (layers < 3) throw std::invalid_argument("BandSpec: latent needs at least 3 layers");
    if (coarse_end == 0 || coarse_end >= mid_end || mid_end >= layers) {
        throw std::invalid_argument("BandSpec: bands must partition [0, L) contiguously");
    }
}

BandSlices decompose(const LatentCode& z, const BandSpec& bands) {
    bands.validate(z.layer_count());
    BandSlices out;
    const std::size_t d = z.layer_dim();
    for (std::size_t l = 0; l < z.layer_count(); ++l) {
        Vector layer(z.layer(l), z.layer(l) + d);
        if (l < bands.coarse_end) out.coarse.push_back(std::move(layer));
        else if (l < bands.mid_end) out.mid.push_back(std::move(layer));
        else out.fine.push_back(std::move(layer));
    }
    return out;
}

LatentCode mix_naive(const LatentCode& z_r, const LatentCode& z_f, const BandSpec& bands) {
    if (!z_r.same_shape(z_f)) throw std::invalid_argument("mix_naive: shape mismatch");
    bands.validate(z_r.layer_count());
    LatentCode out(z_r.layer_count(), z_r.layer_dim());
    const std::size_t d = z_r.layer_dim();
    for (std::size_t l = 0; l < z_r.layer_count(); ++l) {
        const double* src = bands.in_mid(l) ? z_f.layer(l) : z_r.layer(l);
        std::memcpy(out.layer(l), src, d * sizeof(double));
    }
    return out;
}

Vector flatten(const LatentCode& z) { return z.flat(); }

LatentCode unflatten(const Vector& v, std::size_t layers, std::size_t dim) {
    if (v.size() != layers * dim) throw std::invalid_argument("unflatten: length != L*d");
    LatentCode z(layers, dim);
    z.flat() = v;
    return z;
}

Vector mid_band(const LatentCode& z, const BandSpec& bands) {
    bands.validate(z.layer_count());
    const std::size_t d = z.layer_dim();
    Vector out;
    out.reserve(bands.mid_count() * d);
    for (std::size_t l = bands.coarse_end; l < bands.mid_end; ++l) {
        out.insert(out.end(), z.layer(l), z.layer(l) + d);
    }
    return out;
}

Vector other_bands(const LatentCode& z, const BandSpec& bands) {
    bands.validate(z.layer_count());
    const std::size_t d = z.layer_dim();
    Vector out;
    out.reserve((z.layer_count() - bands.mid_count()) * d);
    for (std::size_t l = 0; l < z.layer_count(); ++l) {
        if (!bands.in_mid(l)) out.insert(out.end(), z.layer(l), z.layer(l) + d);
    }
    return out;
}

void scatter_mid_band(const Vector& mid, const BandSpec& bands, std::size_t layers,
                      std::size_t dim, Vector& flat_out) {
    bands.validate(layers);
    if (mid.size() != bands.mid_count() * dim) {
        throw std::invalid_argument("scatter_mid_band: size mismatch");
    }
    if (flat_out.size() != layers * dim) {
        throw std::invalid_argument("scatter_mid_band: output size mismatch");
    }
    std::size_t src = 0;
    for (std::size_t l = bands.coarse_end; l < bands.mid_end; ++l) {
        for (std::size_t i = 0; i < dim; ++i) flat_out[l * dim + i] += mid[src++];
    }
}

void scatter_other_bands(const Vector& other, const BandSpec& bands, std::size_t layers,
                         std::size_t dim, Vector& flat_out) {
    bands.validate(layers);
    if (other.size() != (layers - bands.mid_count()) * dim) {
        throw std::invalid_argument("scatter_other_bands: size mismatch");
    }
    if (flat_out.size() != layers * dim) {
        throw std::invalid_argument("scatter_other_bands: output size mismatch");
    }
    std::size_t src = 0;
    for (std::size_t l = 0; l < layers; ++l) {
        if (bands.in_mid(l)) continue;
        for (std::size_t i = 0; i < dim; ++i) flat_out[l * dim + i] += other[src++];
    }
}

} // namespace famx
