#include "model/checkpoint.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace gs {

namespace {

constexpr char kMagic[5] = {'G', 'S', 'N', 'V', '1'};

template <typename T>
void store_le(std::string& out, T value) {
    for (std::size_t i = 0; i < sizeof(T); ++i)
        out.push_back(static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xff));
}

void store_f64_le(std::string& out, double value) {
    std::uint64_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    store_le(out, bits);
}

void store_f32_le(std::string& out, float value) {
    std::uint32_t bits;
    std::memcpy(&bits, &value, sizeof(bits));
    store_le(out, bits);
}

class Reader {
public:
    Reader(const std::string& bytes, const std::string& path)
        : bytes_(bytes), path_(path) {}

    template <typename T>
    T read_le() {
        need(sizeof(T));
        std::uint64_t value = 0;
        for (std::size_t i = 0; i < sizeof(T); ++i)
            value |= static_cast<std::uint64_t>(
                         static_cast<unsigned char>(bytes_[cursor_ + i]))
                     << (8 * i);
        cursor_ += sizeof(T);
        return static_cast<T>(value);
    }

    std::string read_bytes(std::size_t count) {
        need(count);
        std::string out = bytes_.substr(cursor_, count);
        cursor_ += count;
        return out;
    }

    double read_f64() {
        const std::uint64_t bits = read_le<std::uint64_t>();
        double value;
        std::memcpy(&value, &bits, sizeof(value));
        return value;
    }

    float read_f32() {
        const std::uint32_t bits = read_le<std::uint32_t>();
        float value;
        std::memcpy(&value, &bits, sizeof(value));
        return value;
    }

    std::size_t cursor() const { return cursor_; }
    void seek(std::size_t offset) { cursor_ = offset; }

private:
    void need(std::size_t count) const {
        if (cursor_ + count > bytes_.size())
            throw std::runtime_error(path_ + ": truncated checkpoint");
    }

    const std::string& bytes_;
    std::string path_;
    std::size_t cursor_ = 0;
};

}  // namespace

const std::string& Checkpoint::config_value(const std::string& key) const {
    for (const auto& [k, v] : config)
        if (k == key) return v;
    throw std::runtime_error("checkpoint config missing key '" + key + "'");
}

bool Checkpoint::has_config(const std::string& key) const {
    for (const auto& [k, v] : config)
        if (k == key) return true;
    return false;
}

const Matrix& Checkpoint::tensor(const std::string& name) const {
    for (const auto& [n, m] : tensors)
        if (n == name) return m;
    throw std::runtime_error("checkpoint missing tensor '" + name + "'");
}

void save_checkpoint(const std::string& path, const Checkpoint& checkpoint,
                     CheckpointDtype dtype) {
    std::string config_text;
    for (const auto& [key, value] : checkpoint.config)
        config_text += key + "=" + value + "\n";

    const std::size_t value_size = dtype == CheckpointDtype::kF64 ? 8 : 4;

    std::string table;
    std::string blob;
    for (const auto& [name, tensor] : checkpoint.tensors) {
        if (name.size() > 0xffff)
            throw std::invalid_argument("checkpoint tensor name too long: " + name);
        store_le<std::uint16_t>(table, static_cast<std::uint16_t>(name.size()));
        table += name;
        table.push_back(static_cast<char>(dtype));
        table.push_back(2);  // ndim
        store_le<std::uint64_t>(table, tensor.rows());
        store_le<std::uint64_t>(table, tensor.cols());
        store_le<std::uint64_t>(table, blob.size());

        blob.reserve(blob.size() + tensor.size() * value_size);
        for (std::size_t i = 0; i < tensor.rows(); ++i)
            for (std::size_t j = 0; j < tensor.cols(); ++j) {
                if (dtype == CheckpointDtype::kF64)
                    store_f64_le(blob, tensor(i, j));
                else
                    store_f32_le(blob, static_cast<float>(tensor(i, j)));
            }
    }

    std::string out;
    out.append(kMagic, sizeof(kMagic));
    store_le<std::uint32_t>(out, static_cast<std::uint32_t>(config_text.size()));
    out += config_text;
    store_le<std::uint32_t>(out, static_cast<std::uint32_t>(checkpoint.tensors.size()));
    out += table;
    store_le<std::uint64_t>(out, blob.size());
    out += blob;

    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write checkpoint " + path);
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw std::runtime_error("write failed for checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot open checkpoint " + path);
    std::string bytes(std::istreambuf_iterator<char>(file), {});
    Reader reader(bytes, path);

    if (reader.read_bytes(sizeof(kMagic)) != std::string(kMagic, sizeof(kMagic)))
        throw std::runtime_error(path + ": not a GSNV1 checkpoint");

    Checkpoint checkpoint;
    const auto config_len = reader.read_le<std::uint32_t>();
    const std::string config_text = reader.read_bytes(config_len);
    std::size_t start = 0;
    while (start < config_text.size()) {
        std::size_t end = config_text.find('\n', start);
        if (end == std::string::npos) end = config_text.size();
        const std::string line = config_text.substr(start, end - start);
        const auto eq = line.find('=');
        if (!line.empty() && eq != std::string::npos)
            checkpoint.config.emplace_back(line.substr(0, eq), line.substr(eq + 1));
        start = end + 1;
    }

    struct Entry {
        std::string name;
        CheckpointDtype dtype;
        std::uint64_t rows, cols, offset;
    };
    const auto tensor_count = reader.read_le<std::uint32_t>();
    std::vector<Entry> entries;
    entries.reserve(tensor_count);
    for (std::uint32_t t = 0; t < tensor_count; ++t) {
        Entry entry;
        const auto name_len = reader.read_le<std::uint16_t>();
        entry.name = reader.read_bytes(name_len);
        const auto dtype_byte = reader.read_le<std::uint8_t>();
        if (dtype_byte > 1)
            throw std::runtime_error(path + ": unknown dtype for tensor " + entry.name);
        entry.dtype = static_cast<CheckpointDtype>(dtype_byte);
        const auto ndim = reader.read_le<std::uint8_t>();
        if (ndim != 2)
            throw std::runtime_error(path + ": unsupported rank for tensor " + entry.name);
        entry.rows = reader.read_le<std::uint64_t>();
        entry.cols = reader.read_le<std::uint64_t>();
        entry.offset = reader.read_le<std::uint64_t>();
        entries.push_back(std::move(entry));
    }

    const auto blob_size = reader.read_le<std::uint64_t>();
    const std::size_t blob_start = reader.cursor();
    if (blob_start + blob_size > bytes.size())
        throw std::runtime_error(path + ": truncated checkpoint data");

    for (const Entry& entry : entries) {
        const std::size_t value_size = entry.dtype == CheckpointDtype::kF64 ? 8 : 4;
        const std::uint64_t byte_count = entry.rows * entry.cols * value_size;
        if (entry.offset + byte_count > blob_size)
            throw std::runtime_error(path + ": tensor " + entry.name +
                                     " overruns the data blob");
        reader.seek(blob_start + entry.offset);
        Matrix tensor(entry.rows, entry.cols);
        for (std::size_t i = 0; i < entry.rows; ++i)
            for (std::size_t j = 0; j < entry.cols; ++j)
                tensor(i, j) = entry.dtype == CheckpointDtype::kF64
                                   ? reader.read_f64()
                                   : static_cast<double>(reader.read_f32());
        checkpoint.tensors.emplace_back(entry.name, std::move(tensor));
    }
    return checkpoint;
}

}  // namespace gs
