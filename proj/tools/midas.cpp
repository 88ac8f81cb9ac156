#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "midas/bench.hpp"
#include "midas/core.hpp"
#include "midas/fingerprint.hpp"
#include "midas/learn.hpp"
#include "midas/mtdf.hpp"
#include "midas/preprocess.hpp"
#include "midas/segment.hpp"
#include "midas/simulate.hpp"

namespace {

std::vector<double> split_numbers(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty())
            continue;
        out.push_back(std::stod(item));
    }
    return out;
}

struct ExtractFlags {
    int threshold = 26;
    std::size_t vector_len = 480;
    double epsilon = 0.02;
    int denoise_window = 3;
    double dissimilarity = 0.2;
    double floor_c = -1e9; // default: ambient from the container
    double ceil_c = -1e9;  // default: ambient + 20 C
};

void add_extract_flags(CLI::App* cmd, ExtractFlags& f) {
    cmd->add_option("--threshold", f.threshold, "hot-pixel intensity threshold [1,255]");
    cmd->add_option("--vector-len", f.vector_len, "dissipation vector length");
    cmd->add_option("--epsilon", f.epsilon, "remaining fraction counted as dissipated");
    cmd->add_option("--denoise-window", f.denoise_window, "median filter window (odd)");
    cmd->add_option("--dissimilarity", f.dissimilarity,
                    "background dissimilarity rejection threshold [0,1]");
    cmd->add_option("--floor-c", f.floor_c, "normalization floor in deg C (default ambient)");
    cmd->add_option("--ceil-c", f.ceil_c, "normalization ceiling in deg C (default ambient+20)");
}

struct Preprocessed {
    std::vector<midas::GrayFrame> gray;
    std::uint32_t fps_millihz = 0;
    midas::fp::FingerprintConfig fcfg;
};

Preprocessed preprocess_file(const std::string& path, const ExtractFlags& f) {
    const midas::FrameSequence seq = midas::mtdf::read_sequence_file(path);
    midas::pre::PreprocessConfig pcfg = midas::pre::default_config(seq.ambient_centikelvin());
    if (f.floor_c > -1e8)
        pcfg.norm_floor_centikelvin = midas::celsius_to_centikelvin(f.floor_c);
    if (f.ceil_c > -1e8)
        pcfg.norm_ceil_centikelvin = midas::celsius_to_centikelvin(f.ceil_c);
    pcfg.denoise_window = f.denoise_window;
    pcfg.dissimilarity_threshold = f.dissimilarity;

    Preprocessed out;
    out.fcfg.intensity_threshold = static_cast<std::uint8_t>(f.threshold);
    out.fcfg.vector_len = f.vector_len;
    out.fcfg.dissipated_epsilon = f.epsilon;
    out.fcfg.validate();
    out.fps_millihz = seq.fps_millihz();
    out.gray = midas::pre::run(seq, pcfg, out.fcfg.intensity_threshold);
    return out;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"MIDAS thermal-dissipation sensing pipeline"};
    app.require_subcommand(1);

    // simulate
    auto* cmd_sim = app.add_subcommand("simulate", "render a synthetic thermal scene to MTDF");
    std::string sim_spec, sim_out;
    std::uint64_t sim_seed = 0;
    bool sim_seed_set = false;
    cmd_sim->add_option("--spec", sim_spec, "scene spec file")->required();
    cmd_sim->add_option("--out", sim_out, "output MTDF path")->required();
    cmd_sim->add_option("--seed", sim_seed, "override the scene's rng seed")
        ->each([&](const std::string&) { sim_seed_set = true; });

    // extract
    auto* cmd_extract = app.add_subcommand("extract", "single-object dissipation vector");
    std::string ext_in, ext_out;
    ExtractFlags ext_flags;
    cmd_extract->add_option("--in", ext_in, "input MTDF")->required();
    cmd_extract->add_option("--out", ext_out, "output MDV1 vector")->required();
    add_extract_flags(cmd_extract, ext_flags);

    // segment
    auto* cmd_segment = app.add_subcommand("segment", "multi-object ROI vectors");
    std::string seg_in, seg_outdir;
    ExtractFlags seg_flags;
    int seg_prominence = 10;
    int seg_expected_k = 0;
    cmd_segment->add_option("--in", seg_in, "input MTDF")->required();
    cmd_segment->add_option("--out-dir", seg_outdir, "directory for per-ROI vectors")->required();
    cmd_segment->add_option("--prominence", seg_prominence, "peak prominence for splitting");
    cmd_segment->add_option("--expected-k", seg_expected_k, "expected object count (0 = auto)");
    add_extract_flags(cmd_segment, seg_flags);

    // train
    auto* cmd_train = app.add_subcommand("train", "train a classifier from a manifest");
    std::string train_manifest, train_model = "forest", train_out;
    bool train_context = false, train_gender = false;
    std::uint64_t train_seed = 0;
    int train_trees = 50, train_depth = 12, train_epochs = 200, train_hidden = 16;
    double train_lr = 0.01, train_l2 = 1e-4;
    cmd_train->add_option("--manifest", train_manifest, "dataset manifest")->required();
    cmd_train->add_option("--model", train_model, "forest | svm | mlp")
        ->check(CLI::IsMember({"forest", "svm", "mlp"}));
    cmd_train->add_option("--out", train_out, "output model path")->required();
    cmd_train->add_flag("--context", train_context, "include hold-context one-hot");
    cmd_train->add_flag("--gender", train_gender, "include gender one-hot");
    cmd_train->add_option("--seed", train_seed, "training seed");
    cmd_train->add_option("--trees", train_trees, "forest: tree count");
    cmd_train->add_option("--depth", train_depth, "forest: max depth");
    cmd_train->add_option("--epochs", train_epochs, "svm/mlp: epochs");
    cmd_train->add_option("--hidden", train_hidden, "mlp: hidden units");
    cmd_train->add_option("--lr", train_lr, "svm/mlp: learning rate");
    cmd_train->add_option("--l2", train_l2, "svm: L2 strength");

    // predict
    auto* cmd_predict = app.add_subcommand("predict", "classify dissipation vectors");
    std::string pred_model;
    std::vector<std::string> pred_inputs;
    cmd_predict->add_option("--model", pred_model, "model path")->required();
    cmd_predict->add_option("--in", pred_inputs, "MDV1 vector files")->required();

    // evaluate
    auto* cmd_eval = app.add_subcommand("evaluate", "accuracy and confusion on a manifest");
    std::string eval_model, eval_manifest;
    bool eval_context = false, eval_gender = false;
    cmd_eval->add_option("--model", eval_model, "model path")->required();
    cmd_eval->add_option("--manifest", eval_manifest, "dataset manifest")->required();
    cmd_eval->add_flag("--context", eval_context, "include hold-context one-hot");
    cmd_eval->add_flag("--gender", eval_gender, "include gender one-hot");

    // bench
    auto* cmd_bench = app.add_subcommand("bench", "response-time benchmark table");
    std::string bench_lengths = "30,60,90,120", bench_arr = "A,B,C,D", bench_out;
    int bench_reps = 5, bench_width = 64, bench_height = 30;
    std::uint32_t bench_fps = 30000;
    std::uint64_t bench_seed = 0;
    bool bench_no_agg = false;
    cmd_bench->add_option("--lengths", bench_lengths, "video lengths in seconds, comma-separated");
    cmd_bench->add_option("--arrangements", bench_arr, "subset of A,B,C,D");
    cmd_bench->add_option("--reps", bench_reps, "repetitions per cell (>= 3)");
    cmd_bench->add_option("--fps-millihz", bench_fps, "frame rate in millihertz");
    cmd_bench->add_option("--seed", bench_seed, "scene seed");
    cmd_bench->add_option("--width", bench_width, "scene width");
    cmd_bench->add_option("--height", bench_height, "scene height");
    cmd_bench->add_flag("--no-agglomerated", bench_no_agg, "dispersed cells only");
    cmd_bench->add_option("--out", bench_out, "output table path (default stdout)");

    // calibrate
    auto* cmd_cal = app.add_subcommand("calibrate", "fit (tau, theta) to measured times");
    std::string cal_times, cal_excesses;
    cmd_cal->add_option("--times", cal_times, "dissipation times in seconds, comma-separated")
        ->required();
    cmd_cal->add_option("--excesses", cal_excesses, "initial excesses in deg C, comma-separated")
        ->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (cmd_sim->parsed()) {
            midas::sim::SceneSpec spec = midas::sim::parse_scene_spec_file(sim_spec);
            if (sim_seed_set)
                spec.rng_seed = sim_seed;
            const midas::FrameSequence seq = midas::sim::render_scene(spec);
            const std::size_t n = midas::mtdf::write_sequence_file(seq, sim_out);
            std::cout << "wrote " << n << " bytes, " << seq.frames().size() << " frames to "
                      << sim_out << "\n";
        } else if (cmd_extract->parsed()) {
            const Preprocessed p = preprocess_file(ext_in, ext_flags);
            const midas::DissipationVector v =
                midas::fp::extract_vector(p.gray, p.fcfg, p.fps_millihz);
            midas::fp::write_vector_file(v, ext_out);
            const auto dt = midas::fp::dissipation_time(v, p.fcfg.dissipated_epsilon);
            std::cout << "dissipation_time_s " << dt.seconds
                      << (dt.still_dissipating ? " still-dissipating" : "") << "\n";
        } else if (cmd_segment->parsed()) {
            const Preprocessed p = preprocess_file(seg_in, seg_flags);
            midas::seg::SegmentConfig scfg;
            scfg.prominence = static_cast<std::uint8_t>(seg_prominence);
            if (seg_expected_k > 0)
                scfg.expected_k = seg_expected_k;
            const midas::seg::MultiResult multi =
                midas::seg::extract_multi(p.gray, p.fcfg, scfg, p.fps_millihz);
            std::filesystem::create_directories(seg_outdir);
            for (const midas::seg::TrackedObject& obj : multi.objects) {
                const std::string path =
                    seg_outdir + "/roi_" + std::to_string(obj.roi.id) + ".mdv";
                midas::fp::write_vector_file(obj.vector, path);
                std::printf("roi %d bbox %d %d %d %d centroid %.3f %.3f\n", obj.roi.id,
                            obj.roi.min_x, obj.roi.min_y, obj.roi.max_x, obj.roi.max_y,
                            obj.roi.centroid_x, obj.roi.centroid_y);
            }
            std::cout << "arrangement "
                      << (multi.arrangement == midas::seg::Arrangement::dispersed
                              ? "dispersed"
                              : "agglomerated")
                      << "\n";
            if (multi.under_segmented)
                std::cerr << "warning: under-segmented (fewer maxima than expected)\n";
        } else if (cmd_train->parsed()) {
            const midas::learn::Dataset data = midas::learn::load_manifest(train_manifest);
            const midas::learn::FeatureSpec spec{train_context, train_gender};
            midas::learn::AnyModel model;
            if (train_model == "forest") {
                model.kind = midas::learn::ModelKind::forest;
                midas::learn::ForestParams p;
                p.n_trees = train_trees;
                p.max_depth = train_depth;
                p.seed = train_seed;
                model.forest = midas::learn::train_forest(data, spec, p);
            } else if (train_model == "svm") {
                model.kind = midas::learn::ModelKind::svm;
                midas::learn::SvmParams p;
                p.epochs = train_epochs;
                p.learning_rate = train_lr;
                p.l2 = train_l2;
                p.seed = train_seed;
                model.svm = midas::learn::train_svm(data, spec, p);
            } else {
                model.kind = midas::learn::ModelKind::mlp;
                midas::learn::MlpParams p;
                p.hidden_units = train_hidden;
                p.epochs = train_epochs;
                p.learning_rate = train_lr;
                p.seed = train_seed;
                model.mlp = midas::learn::train_mlp(data, spec, p);
            }
            midas::learn::save_model_file(model, train_out);
            std::cout << "trained " << train_model << " on " << data.size() << " samples -> "
                      << train_out << "\n";
        } else if (cmd_predict->parsed()) {
            const midas::learn::AnyModel model = midas::learn::load_model_file(pred_model);
            for (const std::string& path : pred_inputs) {
                midas::learn::LabeledSample s{midas::fp::read_vector_file(path), std::nullopt,
                                              std::nullopt, "?"};
                const std::string label =
                    model.predict_label(midas::learn::encode_features(s, {}));
                std::cout << path << "\t" << label << "\n";
            }
        } else if (cmd_eval->parsed()) {
            const midas::learn::AnyModel model = midas::learn::load_model_file(eval_model);
            const midas::learn::Dataset data = midas::learn::load_manifest(eval_manifest);
            const midas::learn::FeatureSpec spec{eval_context, eval_gender};
            midas::learn::EvalReport report;
            switch (model.kind) {
                case midas::learn::ModelKind::forest:
                    report = midas::learn::evaluate(model.forest, data, spec);
                    break;
                case midas::learn::ModelKind::svm:
                    report = midas::learn::evaluate(model.svm, data, spec);
                    break;
                case midas::learn::ModelKind::mlp:
                    report = midas::learn::evaluate(model.mlp, data, spec);
                    break;
            }
            std::printf("accuracy %.4f\n", report.accuracy);
            for (std::size_t t = 0; t < report.classes.size(); ++t) {
                std::cout << report.classes[t];
                for (std::size_t p = 0; p < report.classes.size(); ++p)
                    std::cout << '\t' << report.confusion[t][p];
                std::cout << '\n';
            }
        } else if (cmd_bench->parsed()) {
            midas::bench::BenchConfig cfg;
            cfg.video_lengths_s = split_numbers(bench_lengths);
            cfg.arrangements.clear();
            std::stringstream ss(bench_arr);
            std::string item;
            while (std::getline(ss, item, ',')) {
                if (item.size() != 1 || item[0] < 'A' || item[0] > 'D')
                    throw midas::DomainError("arrangement must be one of A,B,C,D: " + item);
                cfg.arrangements.push_back(
                    static_cast<midas::bench::ArrangementGroup>(item[0] - 'A'));
            }
            cfg.repetitions = bench_reps;
            cfg.fps_millihz = bench_fps;
            cfg.rng_seed = bench_seed;
            cfg.width = bench_width;
            cfg.height = bench_height;
            cfg.include_agglomerated = !bench_no_agg;
            const std::vector<midas::bench::BenchRow> rows = midas::bench::run_bench(cfg);
            if (bench_out.empty()) {
                midas::bench::write_table(rows, std::cout);
            } else {
                std::ofstream os(bench_out);
                if (!os)
                    throw midas::IoError("cannot open for writing: " + bench_out);
                midas::bench::write_table(rows, os);
            }
        } else if (cmd_cal->parsed()) {
            const midas::sim::CoolingFit fit =
                midas::sim::fit_cooling(split_numbers(cal_times), split_numbers(cal_excesses));
            std::printf("tau_s %.4f\ntheta_c %.4f\n", fit.tau_s, fit.theta_c);
            for (std::size_t i = 0; i < fit.fitted_times_s.size(); ++i)
                std::printf("point %zu fitted_s %.2f residual_s %+.2f\n", i,
                            fit.fitted_times_s[i], fit.residuals_s[i]);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
