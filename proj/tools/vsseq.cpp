// vsseq: end-to-end pipeline for Vs30 regression from strong-motion records.
// Subcommands: synth, pick, train, eval, grid, region, gradcheck, rerun.

#include <CLI11.hpp>
#include <json.hpp>

#include <array>
#include <filesystem>
#include <iostream>
#include <sstream>

#include "vsseq/dataset_io.hpp"
#include "vsseq/experiment.hpp"
#include "vsseq/fsutil.hpp"
#include "vsseq/json_conv.hpp"
#include "vsseq/nn_suite.hpp"
#include "vsseq/picker.hpp"
#include "vsseq/regional.hpp"
#include "vsseq/synth.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace vsseq;

namespace {

constexpr const char* kVersion = "0.1.0";

// Flat run configuration: one namespace covering dataset paths, the
// synthesizer, picker, experiment grid, site classes and clustering.
// Every field has a default; JSON config plus CLI flags (flags win).
struct RunConfig {
    std::string dataset;
    std::string out_dir = "out";
    std::string manual_picks;
    std::string auto_picks;
    std::string checkpoint;
    std::string metrics;

    std::uint64_t seed = 1;

    std::size_t stations = 12;
    std::size_t records_per_station = 3;
    double synth_duration_s = 60.0;
    double sample_rate = 100.0;
    bool inline_channels = false;

    double sta_s = 0.5;
    double lta_s = 5.0;
    double trigger_ratio = 4.0;
    std::string pick_method = "auto";
    std::string pick_file;

    std::string training_method = "scratch";
    bool ps_info = false;
    std::string annotation_train = "manual";
    std::string annotation_test = "manual";
    std::string anchor = "PGA";
    double duration_s = 60.0;
    double segment_len_s = 1.0;
    std::uint64_t split_seed = 7;
    std::uint64_t init_seed = 1;
    double train_fraction = 0.8;
    double val_fraction = 0.1;
    std::size_t epochs = 50;
    std::size_t batch_size = 8;
    double lr = 1e-3;
    std::string optimizer = "adam";
    std::string target = "log10";
    std::string encoder_checkpoint;
    bool freeze_encoder = false;
    std::size_t hidden = 64;
    std::vector<std::vector<std::size_t>> conv_blocks;  // [out_ch, kernel, stride, pool]

    std::array<double, 4> class_thresholds{180.0, 360.0, 760.0, 1500.0};

    std::size_t k_min = 1;
    std::size_t k_max = 10;
};

void to_json(json& j, const RunConfig& c) {
    j = json{{"dataset", c.dataset},
             {"out_dir", c.out_dir},
             {"manual_picks", c.manual_picks},
             {"auto_picks", c.auto_picks},
             {"checkpoint", c.checkpoint},
             {"metrics", c.metrics},
             {"seed", c.seed},
             {"stations", c.stations},
             {"records_per_station", c.records_per_station},
             {"synth_duration_s", c.synth_duration_s},
             {"sample_rate", c.sample_rate},
             {"inline_channels", c.inline_channels},
             {"sta_s", c.sta_s},
             {"lta_s", c.lta_s},
             {"trigger_ratio", c.trigger_ratio},
             {"pick_method", c.pick_method},
             {"pick_file", c.pick_file},
             {"training_method", c.training_method},
             {"ps_info", c.ps_info},
             {"annotation_train", c.annotation_train},
             {"annotation_test", c.annotation_test},
             {"anchor", c.anchor},
             {"duration_s", c.duration_s},
             {"segment_len_s", c.segment_len_s},
             {"split_seed", c.split_seed},
             {"init_seed", c.init_seed},
             {"train_fraction", c.train_fraction},
             {"val_fraction", c.val_fraction},
             {"epochs", c.epochs},
             {"batch_size", c.batch_size},
             {"lr", c.lr},
             {"optimizer", c.optimizer},
             {"target", c.target},
             {"encoder_checkpoint", c.encoder_checkpoint},
             {"freeze_encoder", c.freeze_encoder},
             {"hidden", c.hidden},
             {"conv_blocks", c.conv_blocks},
             {"class_thresholds", c.class_thresholds},
             {"k_min", c.k_min},
             {"k_max", c.k_max}};
}

void from_json(const json& j, RunConfig& c) {
    RunConfig def;
#define VSSEQ_GET(field) c.field = j.value(#field, def.field)
    VSSEQ_GET(dataset);
    VSSEQ_GET(out_dir);
    VSSEQ_GET(manual_picks);
    VSSEQ_GET(auto_picks);
    VSSEQ_GET(checkpoint);
    VSSEQ_GET(metrics);
    VSSEQ_GET(seed);
    VSSEQ_GET(stations);
    VSSEQ_GET(records_per_station);
    VSSEQ_GET(synth_duration_s);
    VSSEQ_GET(sample_rate);
    VSSEQ_GET(inline_channels);
    VSSEQ_GET(sta_s);
    VSSEQ_GET(lta_s);
    VSSEQ_GET(trigger_ratio);
    VSSEQ_GET(pick_method);
    VSSEQ_GET(pick_file);
    VSSEQ_GET(training_method);
    VSSEQ_GET(ps_info);
    VSSEQ_GET(annotation_train);
    VSSEQ_GET(annotation_test);
    VSSEQ_GET(anchor);
    VSSEQ_GET(duration_s);
    VSSEQ_GET(segment_len_s);
    VSSEQ_GET(split_seed);
    VSSEQ_GET(init_seed);
    VSSEQ_GET(train_fraction);
    VSSEQ_GET(val_fraction);
    VSSEQ_GET(epochs);
    VSSEQ_GET(batch_size);
    VSSEQ_GET(lr);
    VSSEQ_GET(optimizer);
    VSSEQ_GET(target);
    VSSEQ_GET(encoder_checkpoint);
    VSSEQ_GET(freeze_encoder);
    VSSEQ_GET(hidden);
    VSSEQ_GET(conv_blocks);
    VSSEQ_GET(class_thresholds);
    VSSEQ_GET(k_min);
    VSSEQ_GET(k_max);
#undef VSSEQ_GET
}

AnnotationSource parse_annotation(const std::string& s) {
    if (s == "manual") return AnnotationSource::MANUAL;
    if (s == "auto") return AnnotationSource::AUTO;
    throw std::runtime_error("unknown annotation source: " + s);
}

ExperimentConfig experiment_config(const RunConfig& c) {
    ExperimentConfig e;
    if (c.training_method == "scratch") {
        e.training_method = TrainingMethod::SCRATCH;
    } else if (c.training_method == "transfer") {
        e.training_method = TrainingMethod::TRANSFER;
    } else {
        throw std::runtime_error("unknown training_method: " + c.training_method);
    }
    e.ps_info = c.ps_info;
    e.annotation_train = parse_annotation(c.annotation_train);
    e.annotation_test = parse_annotation(c.annotation_test);
    if (c.anchor == "PGA") {
        e.window.anchor = Anchor::PGA;
    } else if (c.anchor == "P" || c.anchor == "P_ARRIVAL") {
        e.window.anchor = Anchor::P_ARRIVAL;
    } else {
        throw std::runtime_error("unknown anchor: " + c.anchor);
    }
    e.window.duration_s = c.duration_s;
    e.window.segment_len_s = c.segment_len_s;
    e.window.include_ps_channel = c.ps_info;
    e.window.annotation_source = e.annotation_train;
    e.split_seed = c.split_seed;
    e.train_fraction = c.train_fraction;
    e.val_fraction = c.val_fraction;
    e.epochs = c.epochs;
    e.lr = c.lr;
    e.batch_size = c.batch_size;
    e.optimizer = c.optimizer == "sgd" ? Optimizer::SGD : Optimizer::ADAM;
    e.init_seed = c.init_seed;
    e.encoder_checkpoint = c.encoder_checkpoint;
    e.freeze_encoder = c.freeze_encoder;
    e.hidden = c.hidden;
    e.target = c.target == "linear" ? TargetMode::LINEAR : TargetMode::LOG10;
    e.class_bounds.thresholds = c.class_thresholds;
    if (!c.conv_blocks.empty()) {
        e.encoder.conv_blocks.clear();
        for (const auto& b : c.conv_blocks) {
            if (b.size() != 4) throw std::runtime_error("conv_blocks entries need 4 values");
            e.encoder.conv_blocks.push_back({b[0], b[1], b[2], b[3]});
        }
    }
    return e;
}

void write_run_meta(const std::string& command, const RunConfig& c) {
    json meta;
    meta["command"] = command;
    meta["config"] = c;
    meta["version"] = kVersion;
    atomic_write((fs::path(c.out_dir) / "run_meta.json").string(), meta.dump(2) + "\n");
}

Dataset open_dataset(const RunConfig& c) {
    if (c.dataset.empty()) throw std::runtime_error("no dataset given (--dataset or config)");
    return load_dataset(c.dataset);
}

PickSet assemble_picks(const Dataset& ds, const RunConfig& c, std::size_t* no_trigger = nullptr) {
    StaLtaParams params{c.sta_s, c.lta_s, c.trigger_ratio};
    PickSet picks = build_pick_set(ds, params, no_trigger);
    if (!c.manual_picks.empty()) {
        for (auto& p : load_manual_picks(c.manual_picks, ds)) picks.insert(std::move(p));
    }
    if (!c.auto_picks.empty()) {
        for (auto& p : load_manual_picks(c.auto_picks, ds)) {
            p.source = AnnotationSource::AUTO;
            picks.insert(std::move(p));
        }
    }
    return picks;
}

int cmd_synth(const RunConfig& c) {
    if (c.stations < 1 || c.records_per_station < 1) {
        throw std::runtime_error("--stations and --records-per-station must be >= 1");
    }
    Dataset ds = synthesize_dataset(c.seed, c.stations, c.records_per_station, c.synth_duration_s,
                                    c.sample_rate);
    write_dataset(ds, (fs::path(c.out_dir) / "manifest.json").string(), c.inline_channels);
    write_run_meta("synth", c);
    std::cout << "wrote " << ds.stations.size() << " stations, " << ds.records.size()
              << " records to " << c.out_dir << "\n";
    return 0;
}

int cmd_pick(const RunConfig& c) {
    Dataset ds = open_dataset(c);
    std::vector<PickResult> picks;
    if (c.pick_method == "auto") {
        StaLtaParams params{c.sta_s, c.lta_s, c.trigger_ratio};
        std::size_t dropped = 0;
        for (const auto& rec : ds.records) {
            auto p = sta_lta_pick(rec, params);
            if (p) {
                picks.push_back(std::move(*p));
            } else {
                ++dropped;
            }
        }
        std::cout << picks.size() << " picks, " << dropped << " records without trigger\n";
    } else if (c.pick_method == "manual") {
        if (c.pick_file.empty()) throw std::runtime_error("--method manual needs --file");
        picks = load_manual_picks(c.pick_file, ds);
    } else {
        throw std::runtime_error("unknown pick method " + c.pick_method);
    }
    write_picks_csv((fs::path(c.out_dir) / "picks.csv").string(), picks);
    write_run_meta("pick", c);
    return 0;
}

int cmd_train(const RunConfig& c) {
    Dataset ds = open_dataset(c);
    PickSet picks = assemble_picks(ds, c);
    ExperimentConfig cfg = experiment_config(c);

    TrainResult tr = train(cfg, ds, picks);
    const fs::path out(c.out_dir);
    save_checkpoint(tr.params, (out / "checkpoint.bin").string(), cfg.window);
    save_encoder(tr.params, (out / "encoder.bin").string());
    write_curves_csv(tr.curves, (out / "curves.csv").string());

    MetricsReport m = evaluate(tr.params, ds, tr.plan, cfg, picks);
    write_metrics_json(m, (out / "metrics.json").string());
    write_run_meta("train", c);
    std::cout << "best epoch " << tr.best_epoch << ", test total abs mean error "
              << m.total.abs_mean_error_pct << "% over " << m.total.station_count << " stations\n";
    return 0;
}

int cmd_eval(const RunConfig& c) {
    if (c.checkpoint.empty()) throw std::runtime_error("--checkpoint required");
    Dataset ds = open_dataset(c);

    WindowSpec ckpt_window;
    ModelParams params = load_checkpoint(c.checkpoint, &ckpt_window);
    if (c.ps_info != ckpt_window.include_ps_channel) {
        throw std::runtime_error(
            "ps_info conflicts with the checkpoint sidecar " + c.checkpoint +
            ".json (trained with include_ps_channel=" +
            (ckpt_window.include_ps_channel ? std::string("true") : std::string("false")) + ")");
    }

    RunConfig resolved = c;
    resolved.ps_info = ckpt_window.include_ps_channel;
    ExperimentConfig cfg = experiment_config(resolved);
    cfg.window = ckpt_window;
    cfg.ps_info = ckpt_window.include_ps_channel;

    PickSet picks = assemble_picks(ds, resolved);
    SplitPlan plan = split_by_station(ds, cfg.split_seed, cfg.train_fraction, cfg.val_fraction,
                                      cfg.class_bounds);
    MetricsReport m = evaluate(params, ds, plan, cfg, picks);

    const fs::path out(c.out_dir);
    write_metrics_json(m, (out / "metrics.json").string());
    std::string csv = "experiment,class,station_count,abs_mean_error_pct\n";
    write_metrics_csv_rows("eval", m, csv);
    atomic_write((out / "table2.csv").string(), csv);
    write_run_meta("eval", c);
    return 0;
}

int cmd_grid(const RunConfig& c) {
    Dataset ds = open_dataset(c);
    std::size_t no_trigger = 0;
    PickSet picks = assemble_picks(ds, c, &no_trigger);
    ExperimentConfig base = experiment_config(c);
    auto reports = run_grid(ds, picks, base, c.out_dir);
    write_run_meta("grid", c);
    std::cout << reports.size() << " of 12 grid cells completed (" << no_trigger
              << " records without auto trigger)\n";
    return reports.size() == grid_experiment_names().size() ? 0 : 1;
}

void write_cluster_svg(const std::string& path, const std::map<std::size_t, ClusterErrorStat>& errs) {
    const int width = 640, panel_h = 200, margin = 50;
    const int height = 2 * panel_h + 3 * margin;
    double max_abs = 0.1;
    for (const auto& [k, e] : errs) {
        max_abs = std::max({max_abs, std::fabs(e.log_ratio_mean),
                            e.abs_log_ratio_mean + e.abs_log_ratio_std});
    }
    const double scale = (panel_h / 2.0 - 10.0) / max_abs;
    const std::size_t n = errs.size();
    const double slot = (width - 2.0 * margin) / std::max<std::size_t>(1, n);

    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='" << height
        << "'>\n";
    auto panel = [&](int top, const char* title, bool signed_panel) {
        const double axis_y = signed_panel ? top + panel_h / 2.0 : top + panel_h - 10.0;
        svg << "<text x='" << margin << "' y='" << top - 8 << "' font-size='13'>" << title
            << "</text>\n";
        svg << "<line x1='" << margin << "' y1='" << axis_y << "' x2='" << width - margin
            << "' y2='" << axis_y << "' stroke='black'/>\n";
        std::size_t i = 0;
        for (const auto& [k, e] : errs) {
            const double x = margin + slot * i + slot * 0.25;
            const double bw = slot * 0.5;
            const double v = signed_panel ? e.log_ratio_mean : e.abs_log_ratio_mean;
            const double h = std::fabs(v) * scale * (signed_panel ? 1.0 : 2.0);
            const double y = v >= 0.0 || !signed_panel ? axis_y - h : axis_y;
            svg << "<rect x='" << x << "' y='" << y << "' width='" << bw << "' height='" << h
                << "' fill='steelblue'/>\n";
            if (!signed_panel) {
                const double whisker = e.abs_log_ratio_std * scale * 2.0;
                const double cx = x + bw / 2.0;
                svg << "<line x1='" << cx << "' y1='" << axis_y - h - whisker << "' x2='" << cx
                    << "' y2='" << std::min(axis_y, axis_y - h + whisker)
                    << "' stroke='black'/>\n";
            }
            svg << "<text x='" << x << "' y='" << top + panel_h + 14 << "' font-size='11'>c" << k
                << " (" << e.station_count << ")</text>\n";
            ++i;
        }
    };
    panel(margin, "mean log10(pred/true) per cluster", true);
    panel(2 * margin + panel_h, "mean |log10(pred/true)| per cluster (whisker: std)", false);
    svg << "</svg>\n";
    atomic_write(path, svg.str());
}

int cmd_region(const RunConfig& c) {
    if (c.metrics.empty()) throw std::runtime_error("--metrics required");
    MetricsReport metrics = read_metrics_json(c.metrics);
    if (metrics.per_station.empty()) {
        throw std::runtime_error("no per-station predictions in " + c.metrics);
    }
    Dataset ds = open_dataset(c);
    auto features = build_station_features(ds, /*labeled_only=*/true);
    if (c.k_max > features.size() || c.k_min < 1 || c.k_min > c.k_max) {
        throw std::runtime_error("bad --k-range for " + std::to_string(features.size()) +
                                 " stations");
    }

    const fs::path out(c.out_dir);
    KmeansResult km;
    if (c.k_min == c.k_max) {
        km = kmeans_best(features, c.k_min, c.seed);
    } else {
        ElbowResult elbow = elbow_select(features, c.k_min, c.k_max, c.seed);
        std::ostringstream curve;
        curve << "k,inertia\n";
        for (const auto& [k, inertia] : elbow.inertia_curve) curve << k << ',' << inertia << '\n';
        atomic_write((out / "elbow.csv").string(), curve.str());
        if (elbow.flat_warning) std::cerr << "region: flat inertia curve, using k_min\n";
        km = kmeans_best(features, elbow.selected_k, c.seed);
        std::cout << "elbow selected k=" << elbow.selected_k << "\n";
    }

    std::ostringstream clusters;
    clusters << "station_id,lat,lon,cluster\n";
    for (const auto& [id, cluster] : km.assignments) {
        const auto& st = ds.stations.at(id);
        clusters << id << ',' << st.latitude << ',' << st.longitude << ',' << cluster << '\n';
    }
    atomic_write((out / "clusters.csv").string(), clusters.str());

    std::size_t skipped = 0;
    auto errs = cluster_errors(km, metrics, &skipped);
    std::ostringstream errcsv;
    errcsv << "cluster,signed_mean,abs_mean,abs_std,count\n";
    for (const auto& [k, e] : errs) {
        errcsv << k << ',';
        if (e.available) {
            errcsv << e.log_ratio_mean << ',' << e.abs_log_ratio_mean << ',' << e.abs_log_ratio_std;
        } else {
            errcsv << "NaN,NaN,NaN";
        }
        errcsv << ',' << e.station_count << '\n';
    }
    atomic_write((out / "cluster_errors.csv").string(), errcsv.str());
    write_cluster_svg((out / "cluster_errors.svg").string(), errs);
    if (skipped > 0) {
        std::cout << skipped << " stations without predictions skipped\n";
    }
    write_run_meta("region", c);
    return 0;
}

int cmd_gradcheck() {
    auto suite = nn::run_gradient_suite();
    bool all_pass = true;
    for (const auto& [name, report] : suite) {
        std::cout << (report.pass ? "PASS" : "FAIL") << "  " << name << "  max_rel_err="
                  << report.max_rel_err << "  (" << report.elements_checked << " elements)\n";
        all_pass = all_pass && report.pass;
    }
    return all_pass ? 0 : 1;
}

int dispatch(const std::string& command, const RunConfig& c);

int cmd_rerun(const std::string& meta_path, const std::string& out_override) {
    const json meta = json::parse(read_file(meta_path));
    RunConfig c = meta.at("config").get<RunConfig>();
    if (!out_override.empty()) c.out_dir = out_override;
    return dispatch(meta.at("command").get<std::string>(), c);
}

int dispatch(const std::string& command, const RunConfig& c) {
    if (command == "synth") return cmd_synth(c);
    if (command == "pick") return cmd_pick(c);
    if (command == "train") return cmd_train(c);
    if (command == "eval") return cmd_eval(c);
    if (command == "grid") return cmd_grid(c);
    if (command == "region") return cmd_region(c);
    if (command == "gradcheck") return cmd_gradcheck();
    throw std::runtime_error("unknown command in run meta: " + command);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vs30 prediction from strong-motion records (CNN+LSTM pipeline)"};
    app.require_subcommand(1);

    // --config is read first so explicit flags override file values.
    RunConfig cfg;
    for (int i = 1; i + 1 < argc; ++i) {
        if (std::string(argv[i]) == "--config") {
            try {
                cfg = json::parse(read_file(argv[i + 1])).get<RunConfig>();
            } catch (const std::exception& e) {
                std::cerr << "config: " << e.what() << "\n";
                return 1;
            }
        }
    }
    if (const char* env_out = std::getenv("VSSEQ_OUT_DIR")) cfg.out_dir = env_out;

    std::string config_path, meta_path, out_override;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "JSON run configuration");
        sub->add_option("--out", cfg.out_dir, "output directory");
        sub->add_option("--seed", cfg.seed, "global seed");
    };

    auto* synth = app.add_subcommand("synth", "generate a synthetic dataset");
    add_common(synth);
    synth->add_option("--stations", cfg.stations);
    synth->add_option("--records-per-station", cfg.records_per_station);
    synth->add_option("--duration", cfg.synth_duration_s);
    synth->add_option("--rate", cfg.sample_rate);
    synth->add_flag("--inline", cfg.inline_channels, "inline channel samples in the manifest");

    auto* pick = app.add_subcommand("pick", "compute or validate P/S picks");
    add_common(pick);
    pick->add_option("--dataset", cfg.dataset);
    pick->add_option("--method", cfg.pick_method, "auto|manual");
    pick->add_option("--file", cfg.pick_file, "manual picks CSV");
    pick->add_option("--sta", cfg.sta_s);
    pick->add_option("--lta", cfg.lta_s);
    pick->add_option("--ratio", cfg.trigger_ratio);

    auto* train_cmd = app.add_subcommand("train", "train one experiment configuration");
    add_common(train_cmd);
    train_cmd->add_option("--dataset", cfg.dataset);
    train_cmd->add_option("--epochs", cfg.epochs);
    train_cmd->add_option("--lr", cfg.lr);
    train_cmd->add_option("--anchor", cfg.anchor, "PGA|P");
    train_cmd->add_flag("--ps-info", cfg.ps_info);
    train_cmd->add_option("--annotation-train", cfg.annotation_train, "manual|auto");
    train_cmd->add_option("--annotation-test", cfg.annotation_test, "manual|auto");
    train_cmd->add_option("--split-seed", cfg.split_seed);
    train_cmd->add_option("--init-seed", cfg.init_seed);
    train_cmd->add_option("--manual-picks", cfg.manual_picks);
    train_cmd->add_option("--auto-picks", cfg.auto_picks);
    train_cmd->add_option("--encoder-checkpoint", cfg.encoder_checkpoint);
    train_cmd->add_option("--training-method", cfg.training_method, "scratch|transfer");
    train_cmd->add_flag("--freeze-encoder", cfg.freeze_encoder);

    auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint on the test split");
    add_common(eval_cmd);
    eval_cmd->add_option("--dataset", cfg.dataset);
    eval_cmd->add_option("--checkpoint", cfg.checkpoint);
    eval_cmd->add_option("--split-seed", cfg.split_seed);
    bool eval_ps = false;
    auto* eval_ps_opt = eval_cmd->add_flag("--ps-info", eval_ps, "must match the checkpoint");

    auto* grid = app.add_subcommand("grid", "run the 12-cell experiment grid");
    add_common(grid);
    grid->add_option("--dataset", cfg.dataset);
    grid->add_option("--epochs", cfg.epochs);

    auto* region = app.add_subcommand("region", "k-means regional error analysis");
    add_common(region);
    region->add_option("--dataset", cfg.dataset);
    region->add_option("--metrics", cfg.metrics);
    region->add_option("--k-min", cfg.k_min);
    region->add_option("--k-max", cfg.k_max);

    auto* gradcheck = app.add_subcommand("gradcheck", "run the full gradient-check suite");

    auto* rerun = app.add_subcommand("rerun", "reproduce a run from its run_meta.json");
    rerun->add_option("meta", meta_path, "run_meta.json path")->required();
    rerun->add_option("--out", out_override, "override output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(cfg);
        if (pick->parsed()) return cmd_pick(cfg);
        if (train_cmd->parsed()) return cmd_train(cfg);
        if (eval_cmd->parsed()) {
            if (eval_ps_opt->count() > 0) cfg.ps_info = eval_ps;
            return cmd_eval(cfg);
        }
        if (grid->parsed()) return cmd_grid(cfg);
        if (region->parsed()) return cmd_region(cfg);
        if (gradcheck->parsed()) return cmd_gradcheck();
        if (rerun->parsed()) return cmd_rerun(meta_path, out_override);
    } catch (const std::exception& e) {
        std::cerr << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
        return 1;
    }
    return 1;
}
