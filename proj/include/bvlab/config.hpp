#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bvlab {

enum class RunMode { theory, simulate, mlp_sweep, decompose };
enum class OutputFormat { csv, json };

std::string_view to_string(RunMode mode);
RunMode parse_mode(std::string_view text);
OutputFormat parse_format(std::string_view text);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw `key = value` pairs. Later assignments replace earlier ones.
using KeyValues = std::map<std::string, std::string>;

/// Parses a flat key-value text: one `key = value` per line, `#` starts a
/// comment, blank lines are ignored.
KeyValues parse_key_values(std::string_view text);
KeyValues load_key_values(const std::filesystem::path& path);

/// Numbers separated by commas; an item `start:stop:step` expands to the
/// inclusive arithmetic grid start + i * step.
std::vector<double> parse_real_list(std::string_view text);

struct SweepConfig {
    RunMode mode = RunMode::theory;

    // theory / simulate grid
    std::vector<double> lambda0;
    std::vector<double> gamma;

    // simulate
    long d = 64;
    long n = 6400;
    std::vector<long> p;  // if empty, p = round(gamma * d)
    long trials = 200;
    std::vector<std::uint64_t> trial_seeds;

    // mlp-sweep
    std::vector<long> widths;
    std::string data = "synthetic";
    long pool_size = 10000;
    long test_size = 1000;
    long input_dim = 20;
    long classes = 4;
    double margin = 2.0;
    std::string train_images, train_labels, test_images, test_labels;
    std::vector<double> noise_p{0.0};
    long parts = 2;
    long repeats = 3;
    long epochs = 200;
    double lr = 0.1;
    double momentum = 0.9;
    double weight_decay = 5e-4;
    double lr_decay_factor = 10.0;
    long lr_decay_every = 100;
    long batch_size = 128;
    bool share_init = false;

    // decompose
    std::string input;

    // common
    std::uint64_t seed = 0;
    std::string out;
    OutputFormat format = OutputFormat::csv;
    int threads = 0;
    bool timing = false;

    /// Mode-specific checks; ConfigError names the offending field.
    void validate() const;
};

/// Builds a typed config from key-values. Unknown keys are rejected.
SweepConfig config_from_key_values(const KeyValues& values);

}  // namespace bvlab
