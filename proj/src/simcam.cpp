#include "pmsci/simcam.hpp"

#include <cmath>

#include "pmsci/imgops.hpp"
#include "pmsci/rng.hpp"

namespace pmsci {

namespace {
// Texture amplitude in gray levels (std of the smoothed noise field).
constexpr double kSceneTextureLevels = 3.0;
}  // namespace

SynthCamera make_camera(int rows, int cols, double strength, double noise_std,
                        std::uint64_t seed) {
    if (rows < 16 || cols < 16) {
        throw std::invalid_argument("make_camera: degenerate dimensions");
    }
    if (!(strength > 0.0) || strength > 0.1) {
        throw std::invalid_argument("make_camera: prnu strength must be in (0, 0.1]");
    }
    if (!(noise_std > 0.0)) {
        throw std::invalid_argument("make_camera: noise_std must be positive");
    }

    SynthCamera cam;
    cam.rows = rows;
    cam.cols = cols;
    cam.prnu_strength = strength;
    cam.noise_std = noise_std;
    cam.seed = seed;
    cam.prnu = Matrix(rows, cols);

    Rng rng(Rng::derive(seed, 0x70726e75));  // "prnu" stream
    for (double& v : cam.prnu.values()) v = strength * rng.gaussian();
    const double mean = mean_of(cam.prnu);
    for (double& v : cam.prnu.values()) v -= mean;
    return cam;
}

Image synth_scene(int rows, int cols, std::uint64_t seed) {
    if (rows < 16 || cols < 16) {
        throw std::invalid_argument("synth_scene: degenerate dimensions");
    }
    Rng rng(Rng::derive(seed, 0x7363656e));  // "scen" stream

    struct Wave {
        double fr, fc, phase, amp;
    };
    constexpr int kWaves = 6;
    Wave waves[kWaves];
    for (Wave& w : waves) {
        // Periods between ~32 px and ~256 px, random orientation.
        const double freq = 1.0 / 32.0 + (1.0 / 256.0 - 1.0 / 32.0) * rng.uniform();
        const double angle = 2.0 * M_PI * rng.uniform();
        w.fr = freq * std::sin(angle);
        w.fc = freq * std::cos(angle);
        w.phase = 2.0 * M_PI * rng.uniform();
        w.amp = 0.5 + rng.uniform();
    }

    Image img(rows, cols);
    double lo = 1e300, hi = -1e300;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            double v = 0.0;
            for (const Wave& w : waves) {
                v += w.amp * std::sin(2.0 * M_PI * (w.fr * r + w.fc * c) + w.phase);
            }
            img(r, c) = v;
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }

    double scale = hi > lo ? (235.0 - 20.0) / (hi - lo) : 0.0;
    for (double& v : img.values()) v = 20.0 + (v - lo) * scale;

    // Mild smooth texture (in gray levels) so patch matching has content to
    // work with and matches are decided by content rather than by
    // per-capture noise.
    Matrix noise(rows, cols);
    for (double& v : noise.values()) v = rng.gaussian();
    noise = binomial3_filter(binomial3_filter(noise));
    double tex_var = 0.0;
    const double tex_mean = mean_of(noise);
    for (double v : noise.values()) tex_var += (v - tex_mean) * (v - tex_mean);
    const double tex_std = std::sqrt(tex_var / static_cast<double>(noise.size()));
    const double texture = kSceneTextureLevels / (tex_std > 0.0 ? tex_std : 1.0);
    for (std::size_t i = 0; i < img.size(); ++i) {
        img.values()[i] += texture * (noise.values()[i] - tex_mean);
    }

    lo = 1e300;
    hi = -1e300;
    for (double v : img.values()) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    scale = hi > lo ? (235.0 - 20.0) / (hi - lo) : 0.0;
    for (double& v : img.values()) v = 20.0 + (v - lo) * scale;
    return img;
}

Image capture(const SynthCamera& cam, const Image& scene, std::uint64_t seed) {
    if (scene.rows() != cam.rows || scene.cols() != cam.cols) {
        throw std::invalid_argument("capture: scene does not match camera dimensions");
    }
    Rng rng(Rng::derive(seed, 0x63617074));  // "capt" stream
    Image out(cam.rows, cam.cols);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double l0 = scene.values()[i];
        const double v = l0 + l0 * cam.prnu.values()[i] + cam.noise_std * rng.gaussian();
        out.values()[i] = static_cast<double>(quantize_u8(v));
    }
    return out;
}

}  // namespace pmsci
