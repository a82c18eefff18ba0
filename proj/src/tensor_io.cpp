#include "rank1/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <stdexcept>

namespace rank1 {

namespace {

constexpr std::array<char, 6> kMagic = {'D', 'T', 'E', 'N', '1', '\0'};

static_assert(sizeof(double) == 8, "dt1 requires 64-bit IEEE-754 doubles");

void put_u64le(std::ostream& os, std::uint64_t v) {
    std::array<unsigned char, 8> b{};
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xff);
    os.write(reinterpret_cast<const char*>(b.data()), 8);
}

std::uint64_t get_u64le(std::istream& is) {
    std::array<unsigned char, 8> b{};
    is.read(reinterpret_cast<char*>(b.data()), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

void put_f64le(std::ostream& os, double x) {
    std::uint64_t v;
    std::memcpy(&v, &x, 8);
    put_u64le(os, v);
}

double get_f64le(std::istream& is) {
    const std::uint64_t v = get_u64le(is);
    double x;
    std::memcpy(&x, &v, 8);
    return x;
}

}  // namespace

void write_dt1(const std::string& path, const DenseTensor& a) {
    if (a.order() < 2) throw std::invalid_argument("write_dt1: tensor order must be >= 2");
    if (a.order() > 255) throw std::invalid_argument("write_dt1: tensor order exceeds 255");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("write_dt1: cannot open " + path);
    os.write(kMagic.data(), kMagic.size());
    const unsigned char d = static_cast<unsigned char>(a.order());
    os.write(reinterpret_cast<const char*>(&d), 1);
    for (std::size_t n = 0; n < a.order(); ++n) put_u64le(os, a.dim(n));
    if constexpr (std::endian::native == std::endian::little) {
        os.write(reinterpret_cast<const char*>(a.data()),
                 static_cast<std::streamsize>(a.size() * 8));
    } else {
        for (std::size_t i = 0; i < a.size(); ++i) put_f64le(os, a[i]);
    }
    if (!os) throw std::runtime_error("write_dt1: write failed for " + path);
}

DenseTensor read_dt1(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("read_dt1: cannot open " + path);

    std::array<char, 6> magic{};
    is.read(magic.data(), magic.size());
    if (!is || magic != kMagic) throw std::runtime_error("read_dt1: bad magic in " + path);

    unsigned char d = 0;
    is.read(reinterpret_cast<char*>(&d), 1);
    if (!is || d < 2) throw std::runtime_error("read_dt1: tensor order must be >= 2");

    std::vector<std::size_t> dims(d);
    std::size_t count = 1;
    for (auto& dim : dims) {
        const std::uint64_t v = get_u64le(is);
        if (!is || v == 0) throw std::runtime_error("read_dt1: invalid dimension");
        dim = static_cast<std::size_t>(v);
        if (count > (std::size_t(-1) / dim)) throw std::runtime_error("read_dt1: size overflow");
        count *= dim;
    }

    std::vector<double> data(count);
    if constexpr (std::endian::native == std::endian::little) {
        is.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(count * 8));
        if (is.gcount() != static_cast<std::streamsize>(count * 8))
            throw std::runtime_error("read_dt1: truncated payload in " + path);
    } else {
        for (auto& x : data) x = get_f64le(is);
        if (!is) throw std::runtime_error("read_dt1: truncated payload in " + path);
    }
    // The declared shape must account for the file exactly.
    is.peek();
    if (!is.eof()) throw std::runtime_error("read_dt1: trailing bytes in " + path);
    return DenseTensor(std::move(dims), std::move(data));
}

void write_dt1(const std::string& path, const Matrix& m) {
    DenseTensor t({m.rows(), m.cols()},
                  std::vector<double>(m.values().begin(), m.values().end()));
    write_dt1(path, t);
}

}  // namespace rank1
