#include "bvlab/records.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace bvlab {

namespace {

std::string real9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

template <typename T>
std::string cell(const std::optional<T>& v) {
    if (!v) return {};
    if constexpr (std::is_floating_point_v<T>)
        return real9(*v);
    else
        return std::to_string(*v);
}

template <typename T>
nlohmann::json optional_json(const std::optional<T>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const nlohmann::json& obj, const char* key) {
    const auto& v = obj.at(key);
    if (v.is_null()) return std::nullopt;
    return v.get<T>();
}

}  // namespace

std::string to_csv(std::span<const SweepRecord> records) {
    std::string out(kCsvHeader);
    out += '\n';
    for (const auto& r : records) {
        out += r.mode;
        for (const std::string& c :
             {cell(r.lambda0), cell(r.gamma), cell(r.width), cell(r.d), cell(r.n), cell(r.p), cell(r.noise_p),
              cell(r.trials), cell(r.seed), real9(r.risk), real9(r.bias_sq), real9(r.variance),
              cell(r.wall_time_s)}) {
            out += ',';
            out += c;
        }
        out += '\n';
    }
    return out;
}

nlohmann::json to_json(std::span<const SweepRecord> records) {
    auto array = nlohmann::json::array();
    for (const auto& r : records) {
        nlohmann::json obj;
        obj["mode"] = r.mode;
        obj["lambda0"] = optional_json(r.lambda0);
        obj["gamma"] = optional_json(r.gamma);
        obj["width"] = optional_json(r.width);
        obj["d"] = optional_json(r.d);
        obj["n"] = optional_json(r.n);
        obj["p"] = optional_json(r.p);
        obj["noise_p"] = optional_json(r.noise_p);
        obj["trials"] = optional_json(r.trials);
        obj["seed"] = optional_json(r.seed);
        obj["risk"] = r.risk;
        obj["bias_sq"] = r.bias_sq;
        obj["variance"] = r.variance;
        obj["wall_time_s"] = optional_json(r.wall_time_s);
        array.push_back(std::move(obj));
    }
    return array;
}

std::vector<SweepRecord> records_from_json(const nlohmann::json& array) {
    if (!array.is_array()) throw std::invalid_argument("records JSON must be an array");
    std::vector<SweepRecord> out;
    for (const auto& obj : array) {
        SweepRecord r;
        r.mode = obj.at("mode").get<std::string>();
        r.lambda0 = optional_from<double>(obj, "lambda0");
        r.gamma = optional_from<double>(obj, "gamma");
        r.width = optional_from<long>(obj, "width");
        r.d = optional_from<long>(obj, "d");
        r.n = optional_from<long>(obj, "n");
        r.p = optional_from<long>(obj, "p");
        r.noise_p = optional_from<double>(obj, "noise_p");
        r.trials = optional_from<long>(obj, "trials");
        r.seed = optional_from<std::uint64_t>(obj, "seed");
        r.risk = obj.at("risk").get<double>();
        r.bias_sq = obj.at("bias_sq").get<double>();
        r.variance = obj.at("variance").get<double>();
        r.wall_time_s = optional_from<double>(obj, "wall_time_s");
        out.push_back(std::move(r));
    }
    return out;
}

std::string render(std::span<const SweepRecord> records, OutputFormat format) {
    if (format == OutputFormat::csv) return to_csv(records);
    return to_json(records).dump(2) + "\n";
}

void emit(std::span<const SweepRecord> records, const std::filesystem::path& path, OutputFormat format) {
    if (records.empty()) throw std::runtime_error("emit: no records to write");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("emit: cannot open " + path.string() + " for writing");
    out << render(records, format);
    if (!out) throw std::runtime_error("emit: write to " + path.string() + " failed");
}

}  // namespace bvlab
