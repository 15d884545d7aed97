#include "vsseq/serialize.hpp"

#include <cstring>
#include <stdexcept>

#include "vsseq/fsutil.hpp"

namespace vsseq::nn {

namespace {

void put_u32(std::string& buf, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    buf.append(b, 4);
}

void put_u64(std::string& buf, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    buf.append(b, 8);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    void need(std::size_t n) const {
        if (pos + n > buf.size()) throw std::runtime_error("weight file truncated");
    }
    std::uint32_t u32() {
        need(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i)
            v |= static_cast<std::uint32_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 4;
        return v;
    }
    std::uint64_t u64() {
        need(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i)
            v |= static_cast<std::uint64_t>(static_cast<unsigned char>(buf[pos + i])) << (8 * i);
        pos += 8;
        return v;
    }
    std::string bytes(std::size_t n) {
        need(n);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

}  // namespace

void save_tensors(const std::string& path, const std::vector<TensorPtr>& tensors) {
    std::string buf;
    buf.append("VSNN", 4);
    put_u32(buf, kWeightFormatVersion);
    put_u32(buf, static_cast<std::uint32_t>(tensors.size()));
    for (const auto& t : tensors) {
        put_u32(buf, static_cast<std::uint32_t>(t->name.size()));
        buf.append(t->name);
        put_u32(buf, static_cast<std::uint32_t>(t->shape.size()));
        for (std::size_t d : t->shape) put_u64(buf, d);
        const std::size_t n = t->value.size() * sizeof(double);
        const std::size_t off = buf.size();
        buf.resize(off + n);
        std::memcpy(buf.data() + off, t->value.data(), n);
    }
    atomic_write(path, buf);
}

std::vector<TensorPtr> load_tensors(const std::string& path) {
    const std::string buf = read_file(path);
    Reader r{buf};
    if (r.bytes(4) != "VSNN") throw std::runtime_error("bad magic in weight file: " + path);
    const std::uint32_t version = r.u32();
    if (version != kWeightFormatVersion) {
        throw std::runtime_error("unsupported weight file version " + std::to_string(version));
    }
    const std::uint32_t count = r.u32();
    std::vector<TensorPtr> out;
    out.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = r.u32();
        std::string name = r.bytes(name_len);
        const std::uint32_t rank = r.u32();
        std::vector<std::size_t> shape(rank);
        std::size_t total = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            shape[d] = static_cast<std::size_t>(r.u64());
            total *= shape[d];
        }
        std::vector<double> values(total);
        const std::string payload = r.bytes(total * sizeof(double));
        std::memcpy(values.data(), payload.data(), payload.size());
        auto t = Tensor::from_values(std::move(shape), std::move(values));
        t->name = std::move(name);
        out.push_back(std::move(t));
    }
    return out;
}

}  // namespace vsseq::nn
