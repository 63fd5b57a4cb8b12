// Command-line front end for the train-and-evaluate toolkit.
//
//   iids run       run an experiment batch from a config file
//   iids generate  write a synthetic Gaussian-cluster dataset as CSV
//   iids report    merge results.json files into one report directory
//   iids predict   label a CSV with a saved model
//
// Exit codes: 0 ok, 2 configuration error, 3 data or model-file error,
// 4 pipeline stage failure.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "iids/dataset.hpp"
#include "iids/error.hpp"
#include "iids/pipeline.hpp"
#include "iids/synthetic.hpp"

namespace {

struct RunOptions {
    std::string config_path;
    std::string data_path;
    std::string out_dir = "report";
    std::string hierarchy_path;
    bool has_seed = false;
    std::uint64_t seed = 0;
};

std::string sanitize(const std::string& name) {
    std::string out;
    for (char c : name) {
        out.push_back(std::isalnum(static_cast<unsigned char>(c)) ? c : '_');
    }
    return out;
}

int cmd_run(const RunOptions& opts) {
    iids::ExperimentSpec spec = iids::load_experiment_spec(opts.config_path);
    if (!opts.data_path.empty()) spec.data_path = opts.data_path;
    if (!opts.hierarchy_path.empty()) spec.hierarchy_path = opts.hierarchy_path;
    if (opts.has_seed) spec.seed = opts.seed;
    if (spec.data_path.empty()) {
        throw iids::ConfigError("no dataset given; set 'data' in the config or pass --data");
    }

    const iids::Dataset data = iids::load_csv(spec.data_path, spec.label_column);
    std::optional<iids::LabelHierarchy> hierarchy;
    if (!spec.hierarchy_path.empty()) {
        hierarchy = iids::LabelHierarchy::load(spec.hierarchy_path);
    }

    const auto results =
        iids::run_experiment(data, hierarchy ? &*hierarchy : nullptr, spec);

    std::error_code ec;
    std::filesystem::create_directories(opts.out_dir, ec);
    if (ec) {
        throw iids::DataError("cannot create '" + opts.out_dir + "': " + ec.message());
    }
    iids::emit_report(results, opts.out_dir);
    iids::save_results(results, (std::filesystem::path(opts.out_dir) / "results.json").string());
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& r = results[i];
        const std::string model_name = "model_" + std::to_string(i) + "_" +
                                       sanitize(r.framework.name) + "_" +
                                       iids::to_string(r.framework.level) + ".json";
        // The scaler was fit over all columns before selection; the model
        // only sees the selected ones, so store that slice with it.
        iids::ScalerParams model_scaler;
        for (std::size_t j : r.selected_features.indices) {
            model_scaler.means.push_back(r.trace.scaler.means[j]);
            model_scaler.stddevs.push_back(r.trace.scaler.stddevs[j]);
        }
        iids::save_model(r.model, (std::filesystem::path(opts.out_dir) / model_name).string(),
                         &model_scaler);
    }

    // Timings are console-only; report files stay byte-reproducible.
    for (const auto& r : results) {
        std::printf("%-16s level=%-9s features=%-3zu macro_f1=%.4f accuracy=%.4f",
                    r.framework.name.c_str(), iids::to_string(r.framework.level),
                    r.selected_features.indices.size(), r.metrics.macro_f1,
                    r.metrics.accuracy);
        if (r.gain.has_value()) std::printf(" avg_usc_gain=%+.4f", r.gain->average_gain);
        std::printf("\n");
        for (const auto& [stage, seconds] : r.timings) {
            std::printf("    %-8s %8.3fs\n", stage.c_str(), seconds);
        }
    }
    std::printf("report written to %s\n", opts.out_dir.c_str());
    return iids::kExitOk;
}

int cmd_generate(const std::string& out_path, const std::vector<std::size_t>& counts,
                 std::size_t informative, std::size_t noise, double separation,
                 std::uint64_t seed) {
    iids::SyntheticSpec spec;
    spec.class_counts = counts;
    spec.k_informative = informative;
    spec.k_noise = noise;
    spec.class_separation = separation;
    spec.seed = seed;
    const iids::Dataset data = iids::generate_synthetic(spec);
    iids::save_csv(data, out_path);
    std::printf("wrote %zu rows x %zu features (%zu classes) to %s\n", data.n(), data.k(),
                data.num_classes(), out_path.c_str());
    return iids::kExitOk;
}

int cmd_report(const std::vector<std::string>& result_files, const std::string& out_dir) {
    std::vector<iids::ExperimentResult> merged;
    for (const auto& path : result_files) {
        auto part = iids::load_results(path);
        for (auto& r : part) merged.push_back(std::move(r));
    }
    iids::emit_report(merged, out_dir);
    std::printf("merged %zu results into %s\n", merged.size(), out_dir.c_str());
    return iids::kExitOk;
}

int cmd_predict(const std::string& model_path, const std::string& input_path,
                const std::string& out_path) {
    const iids::LoadedModel loaded = iids::load_model(model_path);
    iids::Dataset input = iids::load_csv_columns(input_path, loaded.model.feature_names);
    if (loaded.scaler.has_value()) input = iids::apply_scaler(input, *loaded.scaler);
    const std::vector<int> labels = iids::predict(loaded.model, input);

    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw iids::DataError("cannot write '" + out_path + "'");
    out << "row,prediction\n";
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out << i << ","
            << iids::csv_quote(loaded.model.class_names[static_cast<std::size_t>(labels[i])])
            << "\n";
    }
    if (!out) throw iids::DataError("write to '" + out_path + "' failed");
    std::printf("wrote %zu predictions to %s\n", labels.size(), out_path.c_str());
    return iids::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Intrusion-detection train-and-evaluate toolkit"};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run = app.add_subcommand("run", "Run an experiment batch from a config file");
    run->add_option("--config", run_opts.config_path, "Experiment config file")->required();
    run->add_option("--data", run_opts.data_path, "Dataset CSV (overrides the config)");
    run->add_option("--out", run_opts.out_dir, "Report output directory");
    run->add_option("--hierarchy", run_opts.hierarchy_path,
                    "Label hierarchy file (overrides the config)");
    auto* seed_opt = run->add_option("--seed", run_opts.seed, "Master seed (overrides the config)");

    std::string gen_out = "synthetic.csv";
    std::vector<std::size_t> gen_counts;
    std::size_t gen_informative = 4;
    std::size_t gen_noise = 0;
    double gen_separation = 3.0;
    std::uint64_t gen_seed = 0;
    auto* generate = app.add_subcommand("generate", "Write a synthetic dataset CSV");
    generate->add_option("--out", gen_out, "Output CSV path");
    generate->add_option("--counts", gen_counts, "Per-class row counts")
        ->required()
        ->delimiter(',');
    generate->add_option("--informative", gen_informative, "Informative feature count");
    generate->add_option("--noise", gen_noise, "Noise feature count");
    generate->add_option("--separation", gen_separation, "Class separation");
    generate->add_option("--seed", gen_seed, "Generator seed");

    std::vector<std::string> report_files;
    std::string report_out = "report";
    auto* report = app.add_subcommand("report", "Merge results.json files into one report");
    report->add_option("files", report_files, "results.json files")->required();
    report->add_option("--out", report_out, "Report output directory");

    std::string predict_model;
    std::string predict_input;
    std::string predict_out = "predictions.csv";
    auto* predict = app.add_subcommand("predict", "Label a CSV with a saved model");
    predict->add_option("--model", predict_model, "Model JSON file")->required();
    predict->add_option("--input", predict_input, "Input CSV")->required();
    predict->add_option("--out", predict_out, "Output CSV path");

    try {
        app.parse(argc, argv);
        run_opts.has_seed = seed_opt->count() > 0;
        if (run->parsed()) return cmd_run(run_opts);
        if (generate->parsed()) {
            return cmd_generate(gen_out, gen_counts, gen_informative, gen_noise, gen_separation,
                                gen_seed);
        }
        if (report->parsed()) return cmd_report(report_files, report_out);
        if (predict->parsed()) return cmd_predict(predict_model, predict_input, predict_out);
        return iids::kExitConfigError;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? iids::kExitOk : iids::kExitConfigError;
    } catch (const iids::StageError& e) {
        // what() already carries the "stage: detail" tag.
        std::fprintf(stderr, "stage failure: %s\n", e.what());
        return iids::kExitStageError;
    } catch (const iids::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return iids::kExitConfigError;
    } catch (const iids::Error& e) {
        // DataError and ModelIoError both mean the inputs are unusable.
        std::fprintf(stderr, "error: %s\n", e.what());
        return iids::kExitDataError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}
