#include "simsr/checkpoint.hpp"

#include "simsr/errors.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace simsr {
namespace {

constexpr char kMagic[8] = {'S', 'I', 'M', 'S', 'R', 'B', 'I', 'N'};
constexpr std::uint32_t kVersion = 1;

static_assert(std::endian::native == std::endian::little,
              "checkpoint I/O assumes a little-endian host");

void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t read_u32(std::istream& in, const std::string& path) {
    std::uint32_t v = 0;
    in.read(reinterpret_cast<char*>(&v), sizeof v);
    if (!in) throw IoError("checkpoint: truncated file " + path);
    return v;
}

}  // namespace

void save_checkpoint(const std::string& path, const std::vector<CheckpointSection>& sections) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("checkpoint: cannot open " + path + " for writing");
    out.write(kMagic, sizeof kMagic);
    write_u32(out, kVersion);
    write_u32(out, static_cast<std::uint32_t>(sections.size()));
    for (const CheckpointSection& s : sections) {
        write_u32(out, static_cast<std::uint32_t>(s.name.size()));
        out.write(s.name.data(), static_cast<std::streamsize>(s.name.size()));
        write_u32(out, static_cast<std::uint32_t>(s.tensors.size()));
        for (const Matrix& t : s.tensors) {
            write_u32(out, static_cast<std::uint32_t>(t.rows()));
            write_u32(out, static_cast<std::uint32_t>(t.cols()));
            for (Eigen::Index r = 0; r < t.rows(); ++r)
                for (Eigen::Index c = 0; c < t.cols(); ++c) {
                    const double v = t(r, c);
                    out.write(reinterpret_cast<const char*>(&v), sizeof v);
                }
        }
    }
    if (!out) throw IoError("checkpoint: write failed for " + path);
}

std::vector<CheckpointSection> load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("checkpoint: cannot open " + path);
    char magic[8];
    in.read(magic, sizeof magic);
    if (!in || std::memcmp(magic, kMagic, sizeof kMagic) != 0)
        throw IoError("checkpoint: bad magic in " + path);
    const std::uint32_t version = read_u32(in, path);
    if (version != kVersion)
        throw IoError("checkpoint: unsupported version " + std::to_string(version) + " in " +
                      path);
    const std::uint32_t n_sections = read_u32(in, path);
    std::vector<CheckpointSection> sections(n_sections);
    for (CheckpointSection& s : sections) {
        const std::uint32_t name_len = read_u32(in, path);
        s.name.resize(name_len);
        in.read(s.name.data(), name_len);
        const std::uint32_t n_tensors = read_u32(in, path);
        s.tensors.resize(n_tensors);
        for (Matrix& t : s.tensors) {
            const std::uint32_t rows = read_u32(in, path);
            const std::uint32_t cols = read_u32(in, path);
            t.resize(rows, cols);
            for (std::uint32_t r = 0; r < rows; ++r)
                for (std::uint32_t c = 0; c < cols; ++c) {
                    double v = 0.0;
                    in.read(reinterpret_cast<char*>(&v), sizeof v);
                    t(r, c) = v;
                }
        }
        if (!in) throw IoError("checkpoint: truncated file " + path);
    }
    return sections;
}

const CheckpointSection& find_section(const std::vector<CheckpointSection>& sections,
                                      const std::string& name) {
    for (const CheckpointSection& s : sections)
        if (s.name == name) return s;
    throw IoError("checkpoint: missing section '" + name + "'");
}

CheckpointSection section_of(const std::string& name, const Mlp& net) {
    CheckpointSection s{name, {}};
    for (const Linear& l : net.layers) {
        s.tensors.push_back(l.W);
        s.tensors.push_back(l.b);
    }
    return s;
}

Mlp mlp_from_section(const CheckpointSection& section) {
    if (section.tensors.empty() || section.tensors.size() % 2 != 0)
        throw IoError("checkpoint: section '" + section.name + "' is not an MLP");
    Mlp net;
    for (std::size_t i = 0; i < section.tensors.size(); i += 2) {
        Linear l;
        l.W = section.tensors[i];
        const Matrix& b = section.tensors[i + 1];
        if (b.cols() != 1 || b.rows() != l.W.rows())
            throw IoError("checkpoint: bias shape mismatch in section '" + section.name + "'");
        l.b = b.col(0);
        net.layers.push_back(std::move(l));
    }
    return net;
}

}  // namespace simsr
