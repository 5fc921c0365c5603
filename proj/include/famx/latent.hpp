// Layer-structured latent codes, the coarse/mid/fine band decomposition and
// the naive band-swap mixing function.

#pragma once

#include "famx/numcore.hpp"

#include <cstddef>

namespace famx {

// Contiguous partition of the layer range [0, L) into coarse / mid / fine.
// Half-open ranges: coarse = [0, coarse_end), mid = [coarse_end, mid_end),
// fine = [mid_end, L).
struct BandSpec {
    std::size_t coarse_end = 3;
    std::size_t mid_end = 8;

    void validate(std::size_t layers) const;
    std::size_t coarse_count() const { return coarse_end; }
    std::size_t mid_count() const { return mid_end - coarse_end; }
    std::size_t fine_count(std::size_t layers) const { return layers - mid_end; }
    bool in_mid(std::size_t layer) const { return layer >= coarse_end && layer < mid_end; }
};

// A latent code of L layers, each a d-dimensional vector, stored layer-major.
// Immutable by convention after construction: operations return new codes.
class LatentCode {
public:
    LatentCode() : layers_(0), dim_(0) {}
    LatentCode(std::size_t layers, std::size_t dim)
        : layers_(layers), dim_(dim), data_(layers * dim, 0.0) {}

    std::size_t layer_count() const { return layers_; }
    std::size_t layer_dim() const { return dim_; }

    double* layer(std::size_t l) { return data_.data() + l * dim_; }
    const double* layer(std::size_t l) const { return data_.data() + l * dim_; }

    double& at(std::size_t l, std::size_t i) { return data_[l * dim_ + i]; }
    double at(std::size_t l, std::size_t i) const { return data_[l * dim_ + i]; }

    const Vector& flat() const { return data_; }
    Vector& flat() { return data_; }

    bool same_shape(const LatentCode& other) const {
        return layers_ == other.layers_ && dim_ == other.dim_;
    }
    bool operator==(const LatentCode& other) const {
        return same_shape(other) && data_ == other.data_;
    }

private:
    std::size_t layers_, dim_;
    Vector data_;
};

struct BandSlices {
    std::vector<Vector> coarse, mid, fine;
};

// Splits z into its three bands; concatenating the slices in order
// reconstructs z exactly.
BandSlices decompose(const LatentCode& z, const BandSpec& bands);

// Band-swap mixing: result = [z_r.coarse, z_f.mid, z_r.fine].
// Inputs are never aliased or modified.
LatentCode mix_naive(const LatentCode& z_r, const LatentCode& z_f, const BandSpec& bands);

// Lossless layer-major flat view and its inverse.
Vector flatten(const LatentCode& z);
LatentCode unflatten(const Vector& v, std::size_t layers, std::size_t dim);

// Concatenation of the mid-band layers as one vector (layer-major), and of
// the coarse+fine layers in layer order. Used by the toy embedders.
Vector mid_band(const LatentCode& z, const BandSpec& bands);
Vector other_bands(const LatentCode& z, const BandSpec& bands);

// Inverse scatter of the band views above: adds the given band vector
// contributions into a flat gradient of size L*d.
void scatter_mid_band(const Vector& mid, const BandSpec& bands, std::size_t layers,
                      std::size_t dim, Vector& flat_out);
void scatter_other_bands(const Vector& other, const BandSpec& bands, std::size_t layers,
                         std::size_t dim, Vector& flat_out);

} // namespace famx
