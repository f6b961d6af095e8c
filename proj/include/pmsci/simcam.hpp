#pragma once

#include <cstdint>

#include "pmsci/matrix.hpp"

namespace pmsci {

// Ground-truth camera for the synthetic oracle: a fixed multiplicative
// PRNU pattern plus i.i.d. shot/read noise per capture.
struct SynthCamera {
    int rows = 0, cols = 0;
    Matrix prnu;               // F_true, zero-mean
    double prnu_strength = 0.0;
    double noise_std = 0.0;    // 8-bit units
    std::uint64_t seed = 0;
};

// F_true drawn i.i.d. zero-mean Gaussian scaled by `strength`. The default
// puts 25-image fingerprints in the 10^2..10^3 per-image PCE range at
// 256x256, the regime the attack-and-recover pipeline is built around.
SynthCamera make_camera(int rows, int cols, double strength = 0.0035,
                        double noise_std = 2.0, std::uint64_t seed = 0);

// Smooth natural-image surrogate: random low-frequency sinusoids plus mild
// texture, affinely mapped to [20, 235].
Image synth_scene(int rows, int cols, std::uint64_t seed);

// Sensor model L = L0 + L0*F + noise, clamped to [0,255] and quantized to
// 8 bits.
Image capture(const SynthCamera& cam, const Image& scene, std::uint64_t seed);

}  // namespace pmsci
