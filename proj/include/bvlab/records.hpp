#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bvlab/config.hpp"

namespace bvlab {

/// One output row. Parameters that do not apply to the producing mode are
/// left empty.
struct SweepRecord {
    std::string mode;
    std::optional<double> lambda0;
    std::optional<double> gamma;
    std::optional<long> width;
    std::optional<long> d;
    std::optional<long> n;
    std::optional<long> p;
    std::optional<double> noise_p;
    std::optional<long> trials;
    std::optional<std::uint64_t> seed;
    double risk = 0.0;
    double bias_sq = 0.0;
    double variance = 0.0;
    std::optional<double> wall_time_s;

    bool operator==(const SweepRecord&) const = default;
};

inline constexpr std::string_view kCsvHeader =
    "mode,lambda0,gamma,width,d,n,p,noise_p,trials,seed,risk,bias_sq,variance,wall_time_s";

/// CSV text with the fixed header. Reals use 9 significant digits.
std::string to_csv(std::span<const SweepRecord> records);

/// JSON array of objects keyed like the CSV columns; empty fields are null.
/// Reals keep full precision so a parse reproduces the records exactly.
nlohmann::json to_json(std::span<const SweepRecord> records);
std::vector<SweepRecord> records_from_json(const nlohmann::json& array);

/// Writes the records to `path`. Throws std::runtime_error on an empty record
/// list or an unwritable path.
void emit(std::span<const SweepRecord> records, const std::filesystem::path& path, OutputFormat format);

/// Rendered file contents for `format`.
std::string render(std::span<const SweepRecord> records, OutputFormat format);

}  // namespace bvlab
