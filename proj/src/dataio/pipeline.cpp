#include "dataio/pipeline.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>

#include "common/rng.hpp"
#include "dataio/csv.hpp"

namespace gs {

namespace {

void fill_telemetry_row(const TelemetryFrame& frame, double* row) {
    std::size_t c = 0;
    for (double v : frame.torque) row[c++] = v;
    for (double v : frame.angle) row[c++] = v;
    row[c] = frame.mass;
}

}  // namespace

Matrix shape_features(const std::vector<TelemetryFrame>& frames) {
    Matrix out(frames.size(), kShapeFeatureCount);
    for (std::size_t i = 0; i < frames.size(); ++i) fill_telemetry_row(frames[i], out.row(i));
    return out;
}

Matrix slip_features(const std::vector<TelemetryFrame>& frames, const ShapeVocab& vocab) {
    Matrix out(frames.size(), kSlipFeatureCount);
    for (std::size_t i = 0; i < frames.size(); ++i) {
        fill_telemetry_row(frames[i], out.row(i));
        out(i, kSlipFeatureCount - 1) =
            static_cast<double>(vocab.index_of(frames[i].object_held));
    }
    return out;
}

std::vector<int> encode_shapes(const std::vector<TelemetryFrame>& frames,
                               const ShapeVocab& vocab) {
    std::vector<int> out;
    out.reserve(frames.size());
    for (const auto& frame : frames) out.push_back(vocab.index_of(frame.object_held));
    return out;
}

std::vector<int> encode_sizes(const std::vector<TelemetryFrame>& frames,
                              const SizeVocab& vocab) {
    std::vector<int> out;
    out.reserve(frames.size());
    for (const auto& frame : frames) out.push_back(vocab.index_of(frame.size_code));
    return out;
}

std::vector<int> slip_targets(const std::vector<GraspLabel>& labels) {
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& label : labels) out.push_back(label.slip);
    return out;
}

std::vector<int> crumple_targets(const std::vector<GraspLabel>& labels) {
    std::vector<int> out;
    out.reserve(labels.size());
    for (const auto& label : labels) out.push_back(label.crumple);
    return out;
}

ScalerParams fit_minmax(const Matrix& train_rows) {
    if (train_rows.rows() == 0)
        throw std::invalid_argument("fit_minmax: needs at least one training row");
    ScalerParams scaler;
    scaler.min.assign(train_rows.cols(), 0.0);
    scaler.max.assign(train_rows.cols(), 0.0);
    for (std::size_t j = 0; j < train_rows.cols(); ++j) {
        double lo = train_rows(0, j), hi = train_rows(0, j);
        for (std::size_t i = 1; i < train_rows.rows(); ++i) {
            lo = std::min(lo, train_rows(i, j));
            hi = std::max(hi, train_rows(i, j));
        }
        scaler.min[j] = lo;
        scaler.max[j] = hi;
    }
    return scaler;
}

Matrix apply_minmax(const Matrix& rows, const ScalerParams& scaler) {
    if (!scaler.fitted()) throw std::logic_error("apply_minmax: scaler not fitted");
    if (rows.cols() != scaler.features())
        throw std::invalid_argument("apply_minmax: " + std::to_string(rows.cols()) +
                                    " columns vs scaler with " +
                                    std::to_string(scaler.features()) + " features");
    Matrix out(rows.rows(), rows.cols());
    for (std::size_t j = 0; j < rows.cols(); ++j) {
        const double lo = scaler.min[j];
        const double range = scaler.max[j] - lo;
        if (range == 0.0) {
            for (std::size_t i = 0; i < rows.rows(); ++i) out(i, j) = 0.0;
        } else {
            const double inv = 1.0 / range;
            for (std::size_t i = 0; i < rows.rows(); ++i)
                out(i, j) = (rows(i, j) - lo) * inv;
        }
    }
    return out;
}

void save_scaler(const std::string& path, const ScalerParams& scaler) {
    if (!scaler.fitted()) throw std::logic_error("save_scaler: scaler not fitted");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write scaler file " + path);
    out << "GSSCALER1 " << scaler.features() << '\n';
    for (std::size_t j = 0; j < scaler.features(); ++j)
        out << format_double(scaler.min[j]) << ' ' << format_double(scaler.max[j]) << '\n';
}

ScalerParams load_scaler(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open scaler file " + path);
    std::string magic;
    std::size_t count = 0;
    if (!(in >> magic >> count) || magic != "GSSCALER1")
        throw std::runtime_error(path + ": not a GSSCALER1 file");
    ScalerParams scaler;
    scaler.min.resize(count);
    scaler.max.resize(count);
    for (std::size_t j = 0; j < count; ++j) {
        if (!(in >> scaler.min[j] >> scaler.max[j]))
            throw std::runtime_error(path + ": truncated scaler entry " + std::to_string(j));
        if (scaler.max[j] < scaler.min[j])
            throw std::runtime_error(path + ": max < min at feature " + std::to_string(j));
    }
    return scaler;
}

SplitIndices shuffle_split(std::size_t n, double val_fraction, std::uint64_t seed) {
    if (!(val_fraction > 0.0 && val_fraction < 1.0))
        throw std::invalid_argument("shuffle_split: fraction must be in (0,1), got " +
                                    std::to_string(val_fraction));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(seed, 0x5117));
    rng.shuffle(order);

    const auto val_count =
        static_cast<std::size_t>(std::llround(val_fraction * static_cast<double>(n)));
    SplitIndices split;
    split.validation.assign(order.begin(), order.begin() + val_count);
    split.train.assign(order.begin() + val_count, order.end());
    return split;
}

std::vector<std::vector<std::size_t>> kfold(std::size_t n, std::size_t k,
                                            std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("kfold: k must be >= 2");
    if (n < k)
        throw std::invalid_argument("kfold: " + std::to_string(n) + " rows cannot fill " +
                                    std::to_string(k) + " folds");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    Rng rng(mix_seed(seed, 0xf01d5));
    rng.shuffle(order);

    std::vector<std::vector<std::size_t>> folds(k);
    const std::size_t base = n / k;
    const std::size_t extra = n % k;
    std::size_t cursor = 0;
    for (std::size_t f = 0; f < k; ++f) {
        const std::size_t size = base + (f < extra ? 1 : 0);
        folds[f].assign(order.begin() + cursor, order.begin() + cursor + size);
        cursor += size;
    }
    return folds;
}

Matrix gather_rows(const Matrix& source, const std::vector<std::size_t>& indices) {
    Matrix out(indices.size(), source.cols());
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const double* src = source.row(indices[i]);
        double* dst = out.row(i);
        for (std::size_t j = 0; j < source.cols(); ++j) dst[j] = src[j];
    }
    return out;
}

}  // namespace gs
