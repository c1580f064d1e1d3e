#include "bvlab/run.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "bvlab/estimators.hpp"
#include "bvlab/idx.hpp"
#include "bvlab/rng.hpp"
#include "bvlab/split_plan.hpp"
#include "bvlab/theory.hpp"
#include "bvlab/twolayer.hpp"
#include "bvlab/width_sweep.hpp"

namespace bvlab {

namespace {

using Clock = std::chrono::steady_clock;

std::size_t dump_count(const nlohmann::json& doc, const char* key) {
    const auto& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw std::invalid_argument(std::string("prediction dump: '") + key + "' must be a positive integer");
    return v.get<std::size_t>();
}

const nlohmann::json& expect_array(const nlohmann::json& v, std::size_t size, const char* what) {
    if (!v.is_array() || v.size() != size)
        throw std::invalid_argument(std::string("prediction dump: ") + what + " must be an array of length " +
                                    std::to_string(size));
    return v;
}

}  // namespace

PredictionDump parse_prediction_dump(const nlohmann::json& doc) {
    PredictionDump dump;
    dump.shape.test_count = dump_count(doc, "test_count");
    dump.shape.repeats = dump_count(doc, "k");
    dump.shape.parts = dump_count(doc, "N");
    dump.shape.dim = dump_count(doc, "c");
    const auto kind = doc.at("kind").get<std::string>();
    if (kind != "real" && kind != "simplex")
        throw std::invalid_argument("prediction dump: kind must be 'real' or 'simplex', got '" + kind + "'");
    dump.simplex = kind == "simplex";

    const auto& s = dump.shape;
    dump.outputs.reserve(s.size());
    for (const auto& point : expect_array(doc.at("outputs"), s.test_count, "outputs"))
        for (const auto& repeat : expect_array(point, s.repeats, "outputs[test]"))
            for (const auto& model : expect_array(repeat, s.parts, "outputs[test][repeat]"))
                for (const auto& v : expect_array(model, s.dim, "outputs[test][repeat][part]"))
                    dump.outputs.push_back(v.get<double>());

    dump.labels.reserve(s.test_count * s.dim);
    for (const auto& label : expect_array(doc.at("labels"), s.test_count, "labels")) {
        if (label.is_number_integer()) {
            const auto cls = label.get<long long>();
            if (cls < 0 || static_cast<std::size_t>(cls) >= s.dim)
                throw std::invalid_argument("prediction dump: class label out of range");
            for (std::size_t l = 0; l < s.dim; ++l) dump.labels.push_back(static_cast<std::size_t>(cls) == l ? 1.0 : 0.0);
        } else {
            for (const auto& v : expect_array(label, s.dim, "labels[test]")) dump.labels.push_back(v.get<double>());
        }
    }
    return dump;
}

PredictionDump load_prediction_dump(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open prediction dump " + path.string());
    return parse_prediction_dump(nlohmann::json::parse(in));
}

nlohmann::json to_json(const PredictionDump& dump) {
    const auto& s = dump.shape;
    nlohmann::json doc;
    doc["test_count"] = s.test_count;
    doc["k"] = s.repeats;
    doc["N"] = s.parts;
    doc["c"] = s.dim;
    doc["kind"] = dump.simplex ? "simplex" : "real";
    auto outputs = nlohmann::json::array();
    std::size_t at = 0;
    for (std::size_t t = 0; t < s.test_count; ++t) {
        auto point = nlohmann::json::array();
        for (std::size_t i = 0; i < s.repeats; ++i) {
            auto repeat = nlohmann::json::array();
            for (std::size_t j = 0; j < s.parts; ++j) {
                auto model = nlohmann::json::array();
                for (std::size_t l = 0; l < s.dim; ++l) model.push_back(dump.outputs[at++]);
                repeat.push_back(std::move(model));
            }
            point.push_back(std::move(repeat));
        }
        outputs.push_back(std::move(point));
    }
    doc["outputs"] = std::move(outputs);
    auto labels = nlohmann::json::array();
    for (std::size_t t = 0; t < s.test_count; ++t)
        labels.push_back(std::vector<double>(dump.labels.begin() + static_cast<std::ptrdiff_t>(t * s.dim),
                                             dump.labels.begin() + static_cast<std::ptrdiff_t>((t + 1) * s.dim)));
    doc["labels"] = std::move(labels);
    return doc;
}

namespace {

std::vector<SweepRecord> run_theory(const SweepConfig& c) {
    std::vector<SweepRecord> out;
    for (double lambda0 : c.lambda0) {
        for (double gamma : c.gamma) {
            const auto start = Clock::now();
            const auto tp = theory::theory_point(lambda0, gamma);
            SweepRecord r;
            r.mode = "theory";
            r.lambda0 = lambda0;
            r.gamma = gamma;
            r.risk = tp.risk;
            r.bias_sq = tp.bias_sq;
            r.variance = tp.variance;
            if (c.timing) r.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
            out.push_back(r);
        }
    }
    return out;
}

std::vector<SweepRecord> run_simulate(const SweepConfig& c) {
    std::vector<long> widths = c.p;
    if (widths.empty())
        for (double g : c.gamma) widths.push_back(std::max(1L, std::lround(g * static_cast<double>(c.d))));

    std::vector<SweepRecord> out;
    for (double lambda0 : c.lambda0) {
        for (long p : widths) {
            const auto start = Clock::now();
            const ModelDims dims{c.d, c.n, p, lambda0};
            const BiasVariance bv = c.trial_seeds.empty()
                                        ? mc_bias_variance(dims, static_cast<std::size_t>(c.trials), c.seed)
                                        : mc_bias_variance(dims, std::span<const std::uint64_t>(c.trial_seeds));
            SweepRecord r;
            r.mode = "simulate";
            r.lambda0 = lambda0;
            r.gamma = dims.gamma();
            r.d = c.d;
            r.n = c.n;
            r.p = p;
            r.trials = c.trial_seeds.empty() ? c.trials : static_cast<long>(c.trial_seeds.size());
            r.seed = c.seed;
            r.risk = bv.risk;
            r.bias_sq = bv.bias_sq;
            r.variance = bv.variance;
            if (c.timing) r.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
            out.push_back(r);
        }
    }
    return out;
}

std::pair<LabeledDataset, LabeledDataset> sweep_data(const SweepConfig& c) {
    if (c.data == "synthetic") {
        const auto pool_n = static_cast<std::size_t>(c.pool_size), test_n = static_cast<std::size_t>(c.test_size);
        const LabeledDataset all = synth_dataset(c.input_dim, pool_n + test_n, static_cast<int>(c.classes), c.margin,
                                                 derive_seed(c.seed, 0x5eed));
        return {all.slice(0, pool_n), all.slice(pool_n, test_n)};
    }
    LabeledDataset pool = load_idx(c.train_images, c.train_labels);
    LabeledDataset test = load_idx(c.test_images, c.test_labels);
    const int classes = std::max(pool.classes, test.classes);
    pool.classes = test.classes = classes;
    if (c.pool_size > 0) pool = pool.slice(0, std::min(pool.size(), static_cast<std::size_t>(c.pool_size)));
    if (c.test_size > 0) test = test.slice(0, std::min(test.size(), static_cast<std::size_t>(c.test_size)));
    return {std::move(pool), std::move(test)};
}

std::vector<SweepRecord> run_mlp_sweep(const SweepConfig& c) {
    auto [pool, test] = sweep_data(c);
    std::vector<Eigen::Index> widths(c.widths.begin(), c.widths.end());
    std::sort(widths.begin(), widths.end());

    TrainConfig train;
    train.epochs = static_cast<int>(c.epochs);
    train.initial_lr = c.lr;
    train.momentum = c.momentum;
    train.weight_decay = c.weight_decay;
    train.lr_decay_factor = c.lr_decay_factor;
    train.lr_decay_every = static_cast<int>(c.lr_decay_every);
    train.batch_size = static_cast<int>(c.batch_size);
    train.seed = derive_seed(c.seed, 0x7a1);
    const SplitPlan plan = plan_splits(pool.size(), static_cast<std::size_t>(c.parts),
                                       static_cast<std::size_t>(c.repeats), derive_seed(c.seed, 0x5b1));
    const SweepOptions options{c.share_init};

    std::vector<SweepRecord> out;
    for (double noise : c.noise_p) {
        LabeledDataset noisy = pool;
        noisy.labels = inject_label_noise(pool.labels, noise, pool.classes, derive_seed(c.seed, 0x0153));
        for (Eigen::Index width : widths) {
            const auto start = Clock::now();
            const Eigen::Index one[] = {width};
            const WidthResult wr = width_sweep(one, noisy, test, plan, train, options).front();
            SweepRecord r;
            r.mode = "mlp-sweep";
            r.width = width;
            r.n = static_cast<long>(plan.part_size());
            r.noise_p = noise;
            r.trials = static_cast<long>(plan.model_count());
            r.seed = c.seed;
            r.risk = wr.decomposition.risk;
            r.bias_sq = wr.decomposition.bias_sq;
            r.variance = wr.decomposition.variance;
            if (c.timing) r.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
            out.push_back(r);
        }
    }
    return out;
}

std::vector<SweepRecord> run_decompose(const SweepConfig& c) {
    const auto start = Clock::now();
    const PredictionDump dump = load_prediction_dump(c.input);
    DecompositionResult result;
    if (dump.simplex) {
        result = estimate_kl_decomposition(ProbabilityEnsemble(dump.shape, dump.outputs), dump.labels);
    } else {
        result = estimate_mse_decomposition(PredictionMatrix(dump.shape, dump.outputs), dump.labels);
    }
    SweepRecord r;
    r.mode = "decompose";
    r.trials = static_cast<long>(dump.shape.model_count());
    r.risk = result.risk;
    r.bias_sq = result.bias_sq;
    r.variance = result.variance;
    if (c.timing) r.wall_time_s = std::chrono::duration<double>(Clock::now() - start).count();
    return {r};
}

}  // namespace

std::vector<SweepRecord> run_config(const SweepConfig& config) {
    config.validate();
    const std::string mode(to_string(config.mode));
    try {
        switch (config.mode) {
            case RunMode::theory: return run_theory(config);
            case RunMode::simulate: return run_simulate(config);
            case RunMode::mlp_sweep: return run_mlp_sweep(config);
            case RunMode::decompose: return run_decompose(config);
        }
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw std::runtime_error(mode + ": " + e.what());
    }
    return {};
}

}  // namespace bvlab
