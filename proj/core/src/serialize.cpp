#include "glyphrec/serialize.hpp"

#include <cstring>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "glyphrec/errors.hpp"

namespace glyphrec {

static_assert(std::numeric_limits<double>::is_iec559,
              "model container requires IEEE-754 doubles");

void write_file_atomic(const std::string& path, const std::string& bytes) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
        if (!out) throw IoError("write failed for " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("rename to " + path + " failed: " + ec.message());
    }
}

namespace {

class ByteWriter {
public:
    void u8(std::uint8_t v) { buf_.push_back(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
    }
    void i32(std::int32_t v) { u32(static_cast<std::uint32_t>(v)); }
    void u64(std::uint64_t v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<char>(v >> (8 * i)));
    }
    void f64(double v) {
        std::uint64_t bits;
        std::memcpy(&bits, &v, sizeof(bits));
        u64(bits);
    }
    void f64_array(const std::vector<double>& v) {
        for (double x : v) f64(x);
    }
    const std::string& bytes() const { return buf_; }

private:
    std::string buf_;
};

class ByteReader {
public:
    ByteReader(std::string data, std::string origin)
        : data_(std::move(data)), origin_(std::move(origin)) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }
    std::uint32_t u32() {
        const char* p = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }
    std::int32_t i32() { return static_cast<std::int32_t>(u32()); }
    std::uint64_t u64() {
        const char* p = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
        return v;
    }
    double f64() {
        const std::uint64_t bits = u64();
        double v;
        std::memcpy(&v, &bits, sizeof(v));
        return v;
    }
    std::vector<double> f64_array(std::size_t n) {
        std::vector<double> out(n);
        for (auto& v : out) v = f64();
        return out;
    }
    void expect_end() const {
        if (pos_ != data_.size())
            throw FormatError(origin_ + ": trailing bytes in model file");
    }

private:
    const char* take(std::size_t n) {
        if (data_.size() - pos_ < n)
            throw FormatError(origin_ + ": truncated model file");
        const char* p = data_.data() + pos_;
        pos_ += n;
        return p;
    }

    std::string data_;
    std::string origin_;
    std::size_t pos_ = 0;
};

std::string read_all(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

ByteReader open_container(const std::string& path, std::uint32_t expected_kind) {
    ByteReader r(read_all(path), path);
    char magic[8];
    for (char& ch : magic) ch = static_cast<char>(r.u8());
    if (std::memcmp(magic, kModelMagic, 8) != 0)
        throw FormatError(path + ": not a model container");
    const std::uint32_t version = r.u32();
    if (version != kModelFormatVersion)
        throw FormatError(path + ": unsupported format version " +
                          std::to_string(version));
    const std::uint32_t kind = r.u32();
    if (kind != expected_kind)
        throw FormatError(path + ": holds payload kind " + std::to_string(kind) +
                          ", expected " + std::to_string(expected_kind));
    return r;
}

void save_container(const std::string& path, std::uint32_t kind,
                    const ByteWriter& payload) {
    ByteWriter head;
    for (char ch : kModelMagic) head.u8(static_cast<std::uint8_t>(ch));
    head.u32(kModelFormatVersion);
    head.u32(kind);
    write_file_atomic(path, head.bytes() + payload.bytes());
}

}  // namespace

std::uint32_t peek_kind(const std::string& path) {
    ByteReader r(read_all(path), path);
    char magic[8];
    for (char& ch : magic) ch = static_cast<char>(r.u8());
    if (std::memcmp(magic, kModelMagic, 8) != 0)
        throw FormatError(path + ": not a model container");
    const std::uint32_t version = r.u32();
    if (version != kModelFormatVersion)
        throw FormatError(path + ": unsupported format version " +
                          std::to_string(version));
    return r.u32();
}

void save_scaler(const std::string& path, const ScalerModel& scaler) {
    if (scaler.min.size() != scaler.max.size())
        throw DimensionMismatch("save_scaler: min/max size mismatch");
    ByteWriter w;
    w.u32(static_cast<std::uint32_t>(scaler.min.size()));
    w.u8(scaler.clamp ? 1 : 0);
    w.f64_array(scaler.min);
    w.f64_array(scaler.max);
    save_container(path, kKindScaler, w);
}

ScalerModel load_scaler(const std::string& path) {
    ByteReader r = open_container(path, kKindScaler);
    const std::uint32_t dim = r.u32();
    ScalerModel scaler;
    scaler.clamp = r.u8() != 0;
    scaler.min = r.f64_array(dim);
    scaler.max = r.f64_array(dim);
    r.expect_end();
    return scaler;
}

void save_mlp(const std::string& path, const MlpModel& model) {
    ByteWriter w;
    const auto& cfg = model.config;
    w.u32(static_cast<std::uint32_t>(cfg.input_dim));
    w.u32(static_cast<std::uint32_t>(cfg.hidden_dim));
    w.u32(static_cast<std::uint32_t>(cfg.output_dim));
    w.f64(cfg.learning_rate);
    w.f64(cfg.momentum);
    w.u32(static_cast<std::uint32_t>(cfg.epochs));
    w.u64(cfg.seed);
    w.f64_array(model.w1);
    w.f64_array(model.b1);
    w.f64_array(model.w2);
    w.f64_array(model.b2);
    save_container(path, kKindMlp, w);
}

MlpModel load_mlp(const std::string& path) {
    ByteReader r = open_container(path, kKindMlp);
    MlpModel model;
    auto& cfg = model.config;
    cfg.input_dim = static_cast<int>(r.u32());
    cfg.hidden_dim = static_cast<int>(r.u32());
    cfg.output_dim = static_cast<int>(r.u32());
    cfg.learning_rate = r.f64();
    cfg.momentum = r.f64();
    cfg.epochs = static_cast<int>(r.u32());
    cfg.seed = r.u64();
    const std::size_t hidden = static_cast<std::size_t>(cfg.hidden_dim);
    const std::size_t input = static_cast<std::size_t>(cfg.input_dim);
    const std::size_t output = static_cast<std::size_t>(cfg.output_dim);
    model.w1 = r.f64_array(hidden * input);
    model.b1 = r.f64_array(hidden);
    model.w2 = r.f64_array(output * hidden);
    model.b2 = r.f64_array(output);
    r.expect_end();
    return model;
}

void save_svm(const std::string& path, const SvmModel& model) {
    ByteWriter w;
    w.u32(model.scheme == MulticlassScheme::OneVsRest ? 0 : 1);
    w.u32(static_cast<std::uint32_t>(model.num_classes));
    w.u32(static_cast<std::uint32_t>(model.machines.size()));
    for (const auto& machine : model.machines) {
        w.i32(machine.positive_class);
        w.i32(machine.negative_class);
        const auto& bin = machine.model;
        switch (bin.kernel.tag) {
            case Kernel::Tag::Linear: w.u32(0); break;
            case Kernel::Tag::Rbf: w.u32(1); break;
            case Kernel::Tag::Poly: w.u32(2); break;
        }
        w.f64(bin.kernel.sigma);
        w.u32(static_cast<std::uint32_t>(bin.kernel.degree));
        w.f64(bin.c);
        w.f64(bin.bias);
        w.u32(static_cast<std::uint32_t>(bin.support_vectors.size()));
        const std::uint32_t dim = bin.support_vectors.empty()
                                      ? 0
                                      : static_cast<std::uint32_t>(
                                            bin.support_vectors[0].size());
        w.u32(dim);
        for (const auto& sv : bin.support_vectors) {
            if (sv.size() != dim)
                throw DimensionMismatch("save_svm: ragged support vectors");
            w.f64_array(sv);
        }
        w.f64_array(bin.coefficients);
    }
    save_container(path, kKindSvm, w);
}

SvmModel load_svm(const std::string& path) {
    ByteReader r = open_container(path, kKindSvm);
    SvmModel model;
    model.scheme = r.u32() == 0 ? MulticlassScheme::OneVsRest
                                : MulticlassScheme::OneVsOne;
    model.num_classes = static_cast<int>(r.u32());
    const std::uint32_t machine_count = r.u32();
    model.machines.resize(machine_count);
    for (auto& machine : model.machines) {
        machine.positive_class = r.i32();
        machine.negative_class = r.i32();
        auto& bin = machine.model;
        switch (r.u32()) {
            case 0: bin.kernel.tag = Kernel::Tag::Linear; break;
            case 1: bin.kernel.tag = Kernel::Tag::Rbf; break;
            case 2: bin.kernel.tag = Kernel::Tag::Poly; break;
            default: throw FormatError(path + ": bad kernel tag");
        }
        bin.kernel.sigma = r.f64();
        bin.kernel.degree = static_cast<int>(r.u32());
        bin.c = r.f64();
        bin.bias = r.f64();
        const std::uint32_t sv_count = r.u32();
        const std::uint32_t dim = r.u32();
        bin.support_vectors.resize(sv_count);
        for (auto& sv : bin.support_vectors) sv = r.f64_array(dim);
        bin.coefficients = r.f64_array(sv_count);
    }
    r.expect_end();
    return model;
}

void save_fusion_weights(const std::string& path, const FusionWeights& weights) {
    ByteWriter w;
    for (double v : weights.weights) w.f64(v);
    save_container(path, kKindFusion, w);
}

FusionWeights load_fusion_weights(const std::string& path) {
    ByteReader r = open_container(path, kKindFusion);
    FusionWeights weights;
    for (double& v : weights.weights) v = r.f64();
    r.expect_end();
    return weights;
}

std::string mlp_to_json(const MlpModel& model) {
    nlohmann::json doc;
    doc["config"] = {{"input_dim", model.config.input_dim},
                     {"hidden_dim", model.config.hidden_dim},
                     {"output_dim", model.config.output_dim},
                     {"learning_rate", model.config.learning_rate},
                     {"momentum", model.config.momentum},
                     {"epochs", model.config.epochs},
                     {"seed", model.config.seed}};
    doc["w1"] = model.w1;
    doc["b1"] = model.b1;
    doc["w2"] = model.w2;
    doc["b2"] = model.b2;
    return doc.dump(2) + "\n";
}

}  // namespace glyphrec
