#include "bvlab/idx.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>

namespace bvlab {

namespace {

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
    return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
           (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

std::string hex(std::uint32_t v) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "0x%08x", v);
    return buf;
}

void check_header(std::span<const std::uint8_t> bytes, std::size_t header, std::uint32_t magic,
                  const char* what) {
    if (bytes.size() < 4)
        throw IdxError(IdxErrorKind::truncated, std::string(what) + ": file shorter than the magic number");
    const std::uint32_t found = read_be32(bytes, 0);
    if (found != magic)
        throw IdxError(IdxErrorKind::bad_magic, std::string(what) + ": bad magic number, expected " +
                                                    hex(magic) + ", found " + hex(found));
    if (bytes.size() < header)
        throw IdxError(IdxErrorKind::truncated, std::string(what) + ": truncated header");
}

void check_payload(std::size_t have, std::size_t want, const char* what) {
    if (have < want)
        throw IdxError(IdxErrorKind::truncated, std::string(what) + ": truncated payload, expected " +
                                                    std::to_string(want) + " bytes, found " +
                                                    std::to_string(have));
    if (have > want)
        throw IdxError(IdxErrorKind::trailing_data, std::string(what) + ": " + std::to_string(have - want) +
                                                        " unexpected trailing bytes");
}

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IdxError(IdxErrorKind::io, "cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

IdxImages parse_idx_images(std::span<const std::uint8_t> bytes) {
    check_header(bytes, 16, kIdxImageMagic, "IDX images");
    IdxImages out;
    out.count = read_be32(bytes, 4);
    out.rows = read_be32(bytes, 8);
    out.cols = read_be32(bytes, 12);
    const std::size_t want = std::size_t{out.count} * out.rows * out.cols;
    check_payload(bytes.size() - 16, want, "IDX images");
    out.pixels.assign(bytes.begin() + 16, bytes.end());
    return out;
}

std::vector<std::uint8_t> parse_idx_labels(std::span<const std::uint8_t> bytes) {
    check_header(bytes, 8, kIdxLabelMagic, "IDX labels");
    const std::uint32_t count = read_be32(bytes, 4);
    check_payload(bytes.size() - 8, count, "IDX labels");
    return {bytes.begin() + 8, bytes.end()};
}

LabeledDataset load_idx(const std::filesystem::path& image_path, const std::filesystem::path& label_path) {
    const auto image_bytes = read_file(image_path);
    const auto label_bytes = read_file(label_path);
    const IdxImages images = parse_idx_images(image_bytes);
    const auto labels = parse_idx_labels(label_bytes);
    if (labels.size() != images.count)
        throw IdxError(IdxErrorKind::count_mismatch, "IDX image count " + std::to_string(images.count) +
                                                         " does not match label count " +
                                                         std::to_string(labels.size()));

    LabeledDataset out;
    out.provenance = Provenance::idx_file;
    const Eigen::Index dim = static_cast<Eigen::Index>(images.rows) * images.cols;
    out.inputs.resize(dim, images.count);
    for (std::uint32_t e = 0; e < images.count; ++e)
        for (Eigen::Index i = 0; i < dim; ++i)
            out.inputs(i, e) = images.pixels[static_cast<std::size_t>(e) * dim + i] / 255.0;
    out.labels.assign(labels.begin(), labels.end());
    out.classes = labels.empty() ? 0 : *std::max_element(labels.begin(), labels.end()) + 1;
    return out;
}

}  // namespace bvlab
