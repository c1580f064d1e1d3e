#include "bvlab/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

namespace bvlab {

std::string_view to_string(RunMode mode) {
    switch (mode) {
        case RunMode::theory: return "theory";
        case RunMode::simulate: return "simulate";
        case RunMode::mlp_sweep: return "mlp-sweep";
        case RunMode::decompose: return "decompose";
    }
    return "?";
}

RunMode parse_mode(std::string_view text) {
    if (text == "theory") return RunMode::theory;
    if (text == "simulate") return RunMode::simulate;
    if (text == "mlp-sweep") return RunMode::mlp_sweep;
    if (text == "decompose") return RunMode::decompose;
    throw ConfigError("mode: unknown mode '" + std::string(text) + "'");
}

OutputFormat parse_format(std::string_view text) {
    if (text == "csv") return OutputFormat::csv;
    if (text == "json") return OutputFormat::json;
    throw ConfigError("format: expected csv or json, got '" + std::string(text) + "'");
}

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true) {
        const auto at = s.find(sep, start);
        parts.push_back(trim(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start)));
        if (at == std::string_view::npos) break;
        start = at + 1;
    }
    return parts;
}

double parse_real(std::string_view text, std::string_view key) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
        throw ConfigError(std::string(key) + ": '" + std::string(text) + "' is not a finite number");
    return v;
}

template <typename Int>
Int parse_int(std::string_view text, std::string_view key) {
    Int v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError(std::string(key) + ": '" + std::string(text) + "' is not an integer");
    return v;
}

bool parse_bool(std::string_view text, std::string_view key) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    throw ConfigError(std::string(key) + ": expected true or false, got '" + std::string(text) + "'");
}

template <typename Int>
std::vector<Int> parse_int_list(std::string_view text, std::string_view key) {
    std::vector<Int> out;
    for (auto item : split(text, ',')) {
        if (item.empty()) continue;
        out.push_back(parse_int<Int>(item, key));
    }
    return out;
}

}  // namespace

KeyValues parse_key_values(std::string_view text) {
    KeyValues out;
    std::size_t line_no = 0;
    for (auto line : split(text, '\n')) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty key");
        out[std::string(key)] = std::string(trim(line.substr(eq + 1)));
    }
    return out;
}

KeyValues load_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_key_values(buffer.str());
}

std::vector<double> parse_real_list(std::string_view text) {
    std::vector<double> out;
    for (auto item : split(text, ',')) {
        if (item.empty()) continue;
        const auto bounds = split(item, ':');
        if (bounds.size() == 1) {
            out.push_back(parse_real(item, "list"));
        } else if (bounds.size() == 3) {
            const double start = parse_real(bounds[0], "range"), stop = parse_real(bounds[1], "range"),
                         step = parse_real(bounds[2], "range");
            if (!(step > 0.0) || stop < start) throw ConfigError("range '" + std::string(item) + "' is empty");
            const long count = static_cast<long>(std::floor((stop - start) / step + 1e-9)) + 1;
            for (long i = 0; i < count; ++i) out.push_back(start + static_cast<double>(i) * step);
        } else {
            throw ConfigError("list item '" + std::string(item) + "' is neither a number nor start:stop:step");
        }
    }
    return out;
}

SweepConfig config_from_key_values(const KeyValues& values) {
    SweepConfig c;
    using Setter = std::function<void(std::string_view, std::string_view)>;
    auto real = [](double& field) -> Setter { return [&field](auto v, auto k) { field = parse_real(v, k); }; };
    auto integer = [](long& field) -> Setter { return [&field](auto v, auto k) { field = parse_int<long>(v, k); }; };
    auto text = [](std::string& field) -> Setter { return [&field](auto v, auto) { field = std::string(v); }; };
    auto reals = [](std::vector<double>& field) -> Setter {
        return [&field](auto v, auto k) {
            try {
                field = parse_real_list(v);
            } catch (const ConfigError& e) {
                throw ConfigError(std::string(k) + ": " + e.what());
            }
        };
    };

    const std::map<std::string, Setter, std::less<>> setters{
        {"mode", [&](auto v, auto) { c.mode = parse_mode(v); }},
        {"lambda0", reals(c.lambda0)},
        {"gamma", reals(c.gamma)},
        {"d", integer(c.d)},
        {"n", integer(c.n)},
        {"p", [&](auto v, auto k) { c.p = parse_int_list<long>(v, k); }},
        {"trials", integer(c.trials)},
        {"trial_seeds", [&](auto v, auto k) { c.trial_seeds = parse_int_list<std::uint64_t>(v, k); }},
        {"widths", [&](auto v, auto k) { c.widths = parse_int_list<long>(v, k); }},
        {"data", text(c.data)},
        {"pool_size", integer(c.pool_size)},
        {"test_size", integer(c.test_size)},
        {"input_dim", integer(c.input_dim)},
        {"classes", integer(c.classes)},
        {"margin", real(c.margin)},
        {"train_images", text(c.train_images)},
        {"train_labels", text(c.train_labels)},
        {"test_images", text(c.test_images)},
        {"test_labels", text(c.test_labels)},
        {"noise_p", reals(c.noise_p)},
        {"parts", integer(c.parts)},
        {"repeats", integer(c.repeats)},
        {"epochs", integer(c.epochs)},
        {"lr", real(c.lr)},
        {"momentum", real(c.momentum)},
        {"weight_decay", real(c.weight_decay)},
        {"lr_decay_factor", real(c.lr_decay_factor)},
        {"lr_decay_every", integer(c.lr_decay_every)},
        {"batch_size", integer(c.batch_size)},
        {"share_init", [&](auto v, auto k) { c.share_init = parse_bool(v, k); }},
        {"input", text(c.input)},
        {"seed", [&](auto v, auto k) { c.seed = parse_int<std::uint64_t>(v, k); }},
        {"out", text(c.out)},
        {"format", [&](auto v, auto) { c.format = parse_format(v); }},
        {"threads", [&](auto v, auto k) { c.threads = parse_int<int>(v, k); }},
        {"timing", [&](auto v, auto k) { c.timing = parse_bool(v, k); }},
    };
    for (const auto& [key, value] : values) {
        const auto it = setters.find(key);
        if (it == setters.end()) throw ConfigError("unknown config key '" + key + "'");
        it->second(value, key);
    }
    return c;
}

namespace {

void require(bool ok, const std::string& message) {
    if (!ok) throw ConfigError(message);
}

}  // namespace

void SweepConfig::validate() const {
    require(threads >= 0, "threads: must be >= 0");
    switch (mode) {
        case RunMode::theory:
            require(!lambda0.empty(), "lambda0: theory mode needs at least one value");
            require(!gamma.empty(), "gamma: theory mode needs at least one value");
            for (double v : lambda0) require(v > 0.0, "lambda0: values must be > 0");
            for (double v : gamma) require(v > 0.0, "gamma: values must be > 0");
            break;
        case RunMode::simulate:
            require(!lambda0.empty(), "lambda0: simulate mode needs at least one value");
            for (double v : lambda0) require(v >= 0.0, "lambda0: values must be >= 0");
            require(d >= 1, "d: must be >= 1");
            require(n >= 1, "n: must be >= 1");
            require(!p.empty() || !gamma.empty(), "p: simulate mode needs p or gamma values");
            for (long v : p) require(v >= 1, "p: values must be >= 1");
            for (double v : gamma) require(v > 0.0, "gamma: values must be > 0");
            if (trial_seeds.empty())
                require(trials >= 2, "trials: need at least 2");
            else
                require(trial_seeds.size() >= 2, "trial_seeds: need at least 2");
            break;
        case RunMode::mlp_sweep:
            require(!widths.empty(), "widths: mlp-sweep mode needs at least one width");
            for (long w : widths) require(w >= 1, "widths: values must be >= 1");
            require(data == "synthetic" || data == "idx", "data: expected synthetic or idx");
            if (data == "synthetic") {
                require(pool_size >= 2, "pool_size: must be >= 2");
                require(test_size >= 1, "test_size: must be >= 1");
                require(input_dim >= 1, "input_dim: must be >= 1");
                require(classes >= 2, "classes: must be >= 2");
                require(margin >= 0.0, "margin: must be >= 0");
            } else {
                require(!train_images.empty(), "train_images: path required for idx data");
                require(!train_labels.empty(), "train_labels: path required for idx data");
                require(!test_images.empty(), "test_images: path required for idx data");
                require(!test_labels.empty(), "test_labels: path required for idx data");
                require(pool_size >= 0, "pool_size: must be >= 0 (0 uses the whole file)");
                require(test_size >= 0, "test_size: must be >= 0 (0 uses the whole file)");
            }
            require(!noise_p.empty(), "noise_p: need at least one value");
            for (double v : noise_p) require(v >= 0.0 && v <= 1.0, "noise_p: values must lie in [0, 1]");
            require(parts >= 2, "parts: must be >= 2");
            require(repeats >= 1, "repeats: must be >= 1");
            require(epochs >= 1, "epochs: must be >= 1");
            require(lr >= 0.0, "lr: must be >= 0");
            require(momentum >= 0.0 && momentum < 1.0, "momentum: must lie in [0, 1)");
            require(weight_decay >= 0.0, "weight_decay: must be >= 0");
            require(lr_decay_factor > 1.0, "lr_decay_factor: must be > 1");
            require(lr_decay_every >= 1, "lr_decay_every: must be >= 1");
            require(batch_size >= 1, "batch_size: must be >= 1");
            break;
        case RunMode::decompose:
            require(!input.empty(), "input: decompose mode needs a prediction dump path");
            break;
    }
}

}  // namespace bvlab
