#include "pmsci/fingerprint.hpp"

#include <bit>
#include <chrono>
#include <cstring>
#include <fstream>

#include "pmsci/image_io.hpp"
#include "pmsci/imgops.hpp"
#include "pmsci/parallel.hpp"

static_assert(std::endian::native == std::endian::little,
              "fingerprint file IO assumes a little-endian host");

namespace pmsci {

FingerprintTerms fingerprint_terms(const Image& img, double sigma0) {
    NoiseResidue w = extract_residue(img, sigma0);
    FingerprintTerms t{Matrix(img.rows(), img.cols()), Matrix(img.rows(), img.cols())};
    for (std::size_t i = 0; i < img.size(); ++i) {
        const double l = img.values()[i];
        t.num.values()[i] = w.values()[i] * l;
        t.den.values()[i] = l * l;
    }
    return t;
}

void FingerprintAccumulator::add(const FingerprintTerms& terms) {
    if (n_ == 0) {
        rows_ = terms.num.rows();
        cols_ = terms.num.cols();
        num_.assign(terms.num.size(), 0);
        den_.assign(terms.den.size(), 0);
    } else if (rows_ != terms.num.rows() || cols_ != terms.num.cols()) {
        throw std::invalid_argument("estimate_fingerprint: dimension mismatch across images");
    }
    for (std::size_t i = 0; i < num_.size(); ++i) {
        num_[i] += terms.num.values()[i];
        den_[i] += terms.den.values()[i];
    }
    ++n_;
}

Fingerprint FingerprintAccumulator::finalize(std::string label) const {
    if (n_ == 0) throw std::invalid_argument("estimate_fingerprint: no images");
    Fingerprint fp;
    fp.data = Matrix(rows_, cols_);
    std::uint64_t zero_cells = 0;
    for (std::size_t i = 0; i < num_.size(); ++i) {
        const double den = static_cast<double>(den_[i]);
        if (den == 0.0) {
            fp.data.values()[i] = 0.0;
            ++zero_cells;
        } else {
            fp.data.values()[i] = static_cast<double>(num_[i]) / den;
        }
    }
    zero_mean_rows_cols(fp.data);
    fp.meta.n = n_;
    fp.meta.sigma0 = sigma0_;
    fp.meta.flags = kFingerprintFlagZeroMean;
    fp.meta.label = std::move(label);
    fp.meta.zero_denominator_cells = zero_cells;
    fp.meta.created_unix = std::chrono::duration_cast<std::chrono::seconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count();
    return fp;
}

void zero_mean_rows_cols(Matrix& m) {
    const int rows = m.rows(), cols = m.cols();
    for (int r = 0; r < rows; ++r) {
        double s = 0.0;
        for (int c = 0; c < cols; ++c) s += m(r, c);
        const double mean = s / cols;
        for (int c = 0; c < cols; ++c) m(r, c) -= mean;
    }
    for (int c = 0; c < cols; ++c) {
        double s = 0.0;
        for (int r = 0; r < rows; ++r) s += m(r, c);
        const double mean = s / rows;
        for (int r = 0; r < rows; ++r) m(r, c) -= mean;
    }
}

Fingerprint estimate_fingerprint(const std::vector<Image>& images,
                                 const EstimateOptions& opts) {
    if (images.empty()) throw std::invalid_argument("estimate_fingerprint: no images");
    for (const Image& img : images) {
        require_same_shape(images.front(), img, "estimate_fingerprint");
    }

    std::vector<FingerprintTerms> terms(images.size());
    parallel_for(static_cast<int>(images.size()), opts.threads, [&](int i) {
        terms[static_cast<std::size_t>(i)] =
            fingerprint_terms(images[static_cast<std::size_t>(i)], opts.sigma0);
    });

    FingerprintAccumulator acc(opts.sigma0);
    for (const FingerprintTerms& t : terms) acc.add(t);
    return acc.finalize(opts.label);
}

Fingerprint generate_fingerprint(const std::vector<std::string>& paths,
                                 const EstimateOptions& opts) {
    if (paths.empty()) throw std::invalid_argument("generate_fingerprint: empty path list");
    std::vector<Image> images(paths.size());
    parallel_for(static_cast<int>(paths.size()), opts.threads, [&](int i) {
        const std::string& path = paths[static_cast<std::size_t>(i)];
        try {
            Image img = load_image(path);
            images[static_cast<std::size_t>(i)] =
                opts.trim > 0 ? trim_border(img, opts.trim) : std::move(img);
        } catch (const std::exception& e) {
            throw std::runtime_error("generate_fingerprint: '" + path + "': " + e.what());
        }
    });
    for (std::size_t i = 1; i < images.size(); ++i) {
        if (!images[0].same_shape(images[i])) {
            throw std::runtime_error("generate_fingerprint: dimension mismatch, '" + paths[0] +
                                     "' is " + std::to_string(images[0].rows()) + "x" +
                                     std::to_string(images[0].cols()) + " but '" + paths[i] +
                                     "' is " + std::to_string(images[i].rows()) + "x" +
                                     std::to_string(images[i].cols()));
        }
    }
    return estimate_fingerprint(images, opts);
}

namespace {

constexpr char kMagic[8] = {'P', 'R', 'N', 'U', 'F', 'P', '0', '1'};

template <typename T>
void write_raw(std::ostream& out, const T& v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_raw(std::istream& in, const char* field) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (in.gcount() != sizeof(T)) {
        throw std::runtime_error(std::string("load_fingerprint: truncated file (") + field +
                                 ")");
    }
    return v;
}

}  // namespace

void save_fingerprint(const Fingerprint& fp, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("save_fingerprint: cannot open '" + path + "'");
    out.write(kMagic, sizeof(kMagic));
    write_raw(out, static_cast<std::uint32_t>(fp.data.rows()));
    write_raw(out, static_cast<std::uint32_t>(fp.data.cols()));
    write_raw(out, fp.meta.n);
    write_raw(out, fp.meta.sigma0);
    write_raw(out, fp.meta.flags);
    write_raw(out, static_cast<std::uint32_t>(fp.meta.label.size()));
    out.write(fp.meta.label.data(), static_cast<std::streamsize>(fp.meta.label.size()));
    out.write(reinterpret_cast<const char*>(fp.data.data()),
              static_cast<std::streamsize>(fp.data.size() * sizeof(double)));
    if (!out) throw std::runtime_error("save_fingerprint: write failed for '" + path + "'");
}

Fingerprint load_fingerprint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("load_fingerprint: cannot open '" + path + "'");
    char magic[8] = {};
    in.read(magic, sizeof(magic));
    if (in.gcount() != sizeof(magic) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("load_fingerprint: '" + path + "' is not a fingerprint file");
    }
    const auto rows = read_raw<std::uint32_t>(in, "rows");
    const auto cols = read_raw<std::uint32_t>(in, "cols");
    if (rows == 0 || cols == 0 || rows > (1u << 20) || cols > (1u << 20)) {
        throw std::runtime_error("load_fingerprint: implausible dimensions in '" + path + "'");
    }
    Fingerprint fp;
    fp.meta.n = read_raw<std::uint32_t>(in, "n");
    fp.meta.sigma0 = read_raw<double>(in, "sigma0");
    fp.meta.flags = read_raw<std::uint32_t>(in, "flags");
    const auto label_len = read_raw<std::uint32_t>(in, "label length");
    if (label_len > (1u << 20)) {
        throw std::runtime_error("load_fingerprint: implausible label length in '" + path +
                                 "'");
    }
    fp.meta.label.resize(label_len);
    in.read(fp.meta.label.data(), label_len);
    if (in.gcount() != static_cast<std::streamsize>(label_len)) {
        throw std::runtime_error("load_fingerprint: truncated file (label)");
    }
    fp.data = Matrix(static_cast<int>(rows), static_cast<int>(cols));
    const auto bytes = static_cast<std::streamsize>(fp.data.size() * sizeof(double));
    in.read(reinterpret_cast<char*>(fp.data.data()), bytes);
    if (in.gcount() != bytes) {
        throw std::runtime_error("load_fingerprint: truncated file (values)");
    }
    return fp;
}

}  // namespace pmsci
