// Serial reference vs OpenMP drivers on the same inputs. Also confirms the two
// produce identical bits, since a faster wrong answer is not a speedup.

#include <CLI11.hpp>

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <optional>
#include <random>
#include <vector>

#include "bvlab/dataset.hpp"
#include "bvlab/estimators.hpp"
#include "bvlab/parallel.hpp"
#include "bvlab/rng.hpp"
#include "bvlab/split_plan.hpp"
#include "bvlab/twolayer.hpp"
#include "bvlab/width_sweep.hpp"

using namespace bvlab;

namespace {

double best_of(int reps, const std::function<void()>& body) {
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto start = std::chrono::steady_clock::now();
        body();
        best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count());
    }
    return best;
}

void report(const char* name, double serial, double parallel, bool same) {
    std::printf("%-28s %10.4f %10.4f %8.2fx  %s\n", name, serial, parallel, serial / parallel,
                same ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"serial vs OpenMP kernel timings"};
    int threads = 0, reps = 3;
    app.add_option("--threads", threads, "OpenMP team size (0 = runtime default)");
    app.add_option("--reps", reps, "timed repetitions, best is reported")->check(CLI::PositiveNumber);
    CLI11_PARSE(app, argc, argv);
    set_thread_count(threads);

    std::printf("threads: %d\n", omp_get_max_threads());
    std::printf("%-28s %10s %10s %9s\n", "kernel", "serial s", "omp s", "speedup");

    {
        EnsembleShape shape{2000, 3, 5, 10};
        Rng rng(1);
        std::normal_distribution<double> normal;
        std::vector<double> values(shape.size()), labels(shape.test_count * shape.dim);
        for (double& v : values) v = normal(rng);
        for (double& v : labels) v = normal(rng);
        PredictionMatrix preds(shape, values);
        DecompositionResult a, b;
        const double s = best_of(reps, [&] { a = reference::estimate_mse_decomposition(preds, labels); });
        const double p = best_of(reps, [&] { b = estimate_mse_decomposition(preds, labels); });
        report("mse decomposition", s, p, a.risk == b.risk && a.variance == b.variance);

        for (double& v : values) v = 0.01 + uniform01(rng);
        ProbabilityEnsemble probs(shape, values);
        std::vector<int> classes(shape.test_count);
        for (int& y : classes) y = static_cast<int>(uniform_index(rng, shape.dim));
        const double ks = best_of(reps, [&] { a = reference::estimate_kl_decomposition(probs, classes); });
        const double kp = best_of(reps, [&] { b = estimate_kl_decomposition(probs, classes); });
        report("kl decomposition", ks, kp, a.risk == b.risk && a.variance == b.variance);
    }

    {
        const ModelDims dims{64, 6400, 64, 1.0};
        std::vector<std::uint64_t> seeds(64);
        for (std::size_t t = 0; t < seeds.size(); ++t) seeds[t] = derive_seed(2, t);
        BiasVariance a, b;
        const double s = best_of(reps, [&] { a = reference::mc_bias_variance(dims, seeds); });
        const double p = best_of(reps, [&] { b = mc_bias_variance(dims, seeds); });
        report("two-layer monte carlo", s, p, a.risk == b.risk && a.variance == b.variance);

        double x = 0.0, y = 0.0;
        const double ms = best_of(reps, [&] { x = reference::mc_risk_mtilde(256, 256, 1.0, 16, 3); });
        const double mp = best_of(reps, [&] { y = mc_risk_mtilde(256, 256, 1.0, 16, 3); });
        report("data-free risk", ms, mp, x == y);
    }

    {
        const LabeledDataset all = synth_dataset(20, 1400, 4, 2.0, 4);
        const LabeledDataset pool = all.slice(0, 400), test = all.slice(400, 1000);
        const SplitPlan plan = plan_splits(pool.size(), 2, 3, 5);
        TrainConfig cfg;
        cfg.epochs = 30;
        cfg.batch_size = 32;
        std::optional<EnsembleOutputs> a, b;
        const double s = best_of(reps, [&] { a = reference::train_ensemble(64, pool, test, plan, cfg); });
        const double p = best_of(reps, [&] { b = train_ensemble(64, pool, test, plan, cfg); });
        const auto x = a->predictions.values(), y = b->predictions.values();
        report("mlp ensemble (width 64)", s, p, std::equal(x.begin(), x.end(), y.begin()));
    }
    return 0;
}
