#include "vsseq/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "vsseq/fsutil.hpp"
#include "vsseq/json_conv.hpp"
#include "vsseq/optim.hpp"
#include "vsseq/rng.hpp"

namespace vsseq {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::vector<std::string> kClassLabels = {"E", "D", "C", "B", "A"};

std::vector<std::string> labeled_station_ids(const Dataset& ds) {
    std::vector<std::string> ids;
    for (const auto& [id, st] : ds.stations) {
        if (st.vs30) ids.push_back(id);
    }
    return ids;  // map iteration is already sorted
}

// Builds the normalized model input for one record, or nullopt when the
// required pick is unavailable.
std::optional<SegmentSequence> build_sequence(const StrongMotionRecord& rec,
                                              const StationMeta& st,
                                              const ExperimentConfig& config,
                                              AnnotationSource source, const PickSet& picks) {
    WindowSpec spec = config.window;
    spec.include_ps_channel = config.ps_info;
    spec.annotation_source = source;

    std::optional<std::size_t> p, s;
    if (spec.anchor == Anchor::P_ARRIVAL || spec.include_ps_channel) {
        const PickResult* pick = picks.find(rec.record_id, source);
        if (!pick) return std::nullopt;
        p = pick->p_idx;
        s = pick->s_idx;
    }
    SegmentSequence seq = normalize(extract_window(rec, spec, p, s));
    seq.target_vs30 = st.vs30.value_or(0.0);
    return seq;
}

std::vector<SegmentSequence> collect_sequences(const Dataset& ds,
                                               const std::set<std::string>& stations,
                                               const ExperimentConfig& config,
                                               AnnotationSource source, const PickSet& picks,
                                               std::size_t* skipped) {
    std::vector<SegmentSequence> out;
    for (const auto& rec : ds.records) {
        if (!stations.count(rec.station_id)) continue;
        const StationMeta& st = ds.stations.at(rec.station_id);
        if (!st.vs30) continue;
        auto seq = build_sequence(rec, st, config, source, picks);
        if (seq) {
            out.push_back(std::move(*seq));
        } else if (skipped) {
            ++(*skipped);
        }
    }
    return out;
}

double target_value(const ExperimentConfig& config, double vs30) {
    return config.target == TargetMode::LOG10 ? std::log10(vs30) : vs30;
}

struct ValStats {
    double abs_err = 0.0;
    double pct_err = 0.0;
};

ValStats validation_errors(const ModelParams& params, const std::vector<SegmentSequence>& seqs) {
    ValStats v;
    if (seqs.empty()) return v;
    for (const auto& seq : seqs) {
        const double pred = predict_vs30(params, seq);
        v.abs_err += std::fabs(pred - seq.target_vs30);
        v.pct_err += std::fabs(pred - seq.target_vs30) / seq.target_vs30 * 100.0;
    }
    v.abs_err /= static_cast<double>(seqs.size());
    v.pct_err /= static_cast<double>(seqs.size());
    return v;
}

void check_disjoint(const std::set<std::string>& a, const std::set<std::string>& b,
                    const char* what) {
    for (const auto& id : a) {
        if (b.count(id)) {
            throw std::runtime_error(std::string("split violation: station ") + id + " is in " +
                                     what);
        }
    }
}

}  // namespace

void ExperimentConfig::validate() const {
    window.validate();
    if (ps_info != window.include_ps_channel && window.include_ps_channel) {
        throw std::invalid_argument("ExperimentConfig: ps_info conflicts with window spec");
    }
    if (training_method == TrainingMethod::TRANSFER && encoder_checkpoint.empty()) {
        throw std::invalid_argument("ExperimentConfig: TRANSFER requires encoder_checkpoint");
    }
    if (train_fraction <= 0.0 || train_fraction >= 1.0) {
        throw std::invalid_argument("ExperimentConfig: train_fraction must be in (0,1)");
    }
    if (epochs < 1 || batch_size < 1) {
        throw std::invalid_argument("ExperimentConfig: epochs and batch_size must be >= 1");
    }
}

SplitPlan split_by_station(const Dataset& ds, std::uint64_t seed, double train_fraction,
                           double val_fraction, const ClassBoundaries& bounds) {
    std::vector<std::string> labeled = labeled_station_ids(ds);
    if (labeled.size() < 2) {
        throw std::runtime_error("split_by_station: need at least 2 labeled stations");
    }

    std::map<std::string, std::vector<std::string>> by_class;
    for (const auto& id : labeled) {
        by_class[site_class_label(classify(*ds.stations.at(id).vs30, bounds))].push_back(id);
    }

    SplitPlan plan;
    bool stratify = true;
    for (const auto& [cls, ids] : by_class) {
        if (ids.size() < 2) {
            stratify = false;
            plan.warning = "site class " + cls + " has fewer than 2 stations; global split used";
        }
    }

    Rng rng(seed);
    auto partition = [&](std::vector<std::string> ids) {
        rng.shuffle(ids);
        const std::size_t n_train =
            static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(ids.size())));
        for (std::size_t i = 0; i < ids.size(); ++i) {
            (i < n_train ? plan.train_station_ids : plan.test_station_ids).insert(ids[i]);
        }
    };

    if (stratify) {
        // Fixed label order keeps the RNG stream independent of map layout.
        for (const auto& cls : kClassLabels) {
            auto it = by_class.find(cls);
            if (it != by_class.end()) partition(it->second);
        }
    } else {
        partition(labeled);
    }

    if (val_fraction > 0.0 && plan.train_station_ids.size() >= 2) {
        std::vector<std::string> train_ids(plan.train_station_ids.begin(),
                                           plan.train_station_ids.end());
        rng.shuffle(train_ids);
        std::size_t n_val = static_cast<std::size_t>(
            std::llround(val_fraction * static_cast<double>(train_ids.size())));
        n_val = std::clamp<std::size_t>(n_val, 1, train_ids.size() - 1);
        for (std::size_t i = 0; i < n_val; ++i) {
            plan.train_station_ids.erase(train_ids[i]);
            plan.val_station_ids.insert(train_ids[i]);
        }
    }
    return plan;
}

TrainResult train(const ExperimentConfig& config, const Dataset& ds, const PickSet& picks) {
    config.validate();

    TrainResult result;
    result.plan = split_by_station(ds, config.split_seed, config.train_fraction,
                                   config.val_fraction, config.class_bounds);

    std::size_t skipped = 0;
    auto train_seqs = collect_sequences(ds, result.plan.train_station_ids, config,
                                        config.annotation_train, picks, &skipped);
    auto val_seqs = collect_sequences(ds, result.plan.val_station_ids, config,
                                      config.annotation_train, picks, &skipped);
    result.skipped_records = skipped;
    if (train_seqs.empty()) throw std::runtime_error("train: empty training split");

    EncoderConfig enc = config.encoder;
    enc.in_channels = config.ps_info ? 4 : 3;
    const std::size_t seg_len = train_seqs.front().segment_len;

    ModelParams params = init_model(enc, config.hidden, seg_len, config.init_seed, config.target);
    if (config.training_method == TrainingMethod::TRANSFER) {
        transfer_load(params, config.encoder_checkpoint, config.freeze_encoder,
                      config.init_seed + 1);
    }
    auto tensors = params.all_tensors();

    nn::Adam adam(config.lr);
    nn::Sgd sgd(config.lr);

    double best_val = std::numeric_limits<double>::infinity();
    result.best_epoch = 0;
    ModelParams best_params = params.clone();

    std::vector<std::size_t> order(train_seqs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        Rng shuffle_rng(config.init_seed * 1000003ULL + epoch);
        shuffle_rng.shuffle(order);

        double epoch_loss = 0.0;
        std::size_t batch_fill = 0;
        nn::zero_grad(tensors);
        for (std::size_t oi = 0; oi < order.size(); ++oi) {
            const SegmentSequence& seq = train_seqs[order[oi]];
            auto target = nn::Tensor::from_values(
                {1}, {target_value(config, seq.target_vs30)});
            auto loss = nn::mse_loss(model_forward(params, seq), target);
            if (!std::isfinite(loss->value[0])) {
                throw std::runtime_error("train: loss diverged at epoch " + std::to_string(epoch));
            }
            epoch_loss += loss->value[0];
            nn::backward(loss);
            ++batch_fill;

            if (batch_fill == config.batch_size || oi + 1 == order.size()) {
                const double inv = 1.0 / static_cast<double>(batch_fill);
                for (auto& t : tensors) {
                    if (t->requires_grad && !t->grad.empty()) {
                        for (double& g : t->grad) g *= inv;
                    }
                }
                if (config.optimizer == Optimizer::ADAM) {
                    adam.step(tensors);
                } else {
                    sgd.step(tensors);
                }
                nn::zero_grad(tensors);
                batch_fill = 0;
            }
        }
        epoch_loss /= static_cast<double>(train_seqs.size());

        const ValStats val = validation_errors(params, val_seqs);
        result.curves.push_back({epoch, epoch_loss, val.abs_err, val.pct_err});

        const double score = val_seqs.empty() ? epoch_loss : val.pct_err;
        if (score < best_val) {
            best_val = score;
            result.best_epoch = epoch;
            best_params = params.clone();
        }
    }

    result.params = std::move(best_params);
    return result;
}

MetricsReport evaluate(const ModelParams& params, const Dataset& ds, const SplitPlan& plan,
                       const ExperimentConfig& config, const PickSet& picks) {
    // Station-disjointness is re-verified here rather than trusted.
    check_disjoint(plan.test_station_ids, plan.train_station_ids, "both train and test");
    check_disjoint(plan.test_station_ids, plan.val_station_ids, "both val and test");
    check_disjoint(plan.train_station_ids, plan.val_station_ids, "both train and val");
    if (plan.test_station_ids.empty()) throw std::runtime_error("evaluate: empty test split");

    auto test_seqs = collect_sequences(ds, plan.test_station_ids, config, config.annotation_test,
                                       picks, nullptr);
    if (test_seqs.empty()) throw std::runtime_error("evaluate: no usable test records");

    std::map<std::string, std::pair<double, std::size_t>> pred_sum;  // station -> (sum, n)
    for (const auto& seq : test_seqs) {
        auto& [sum, n] = pred_sum[seq.station_id];
        sum += predict_vs30(params, seq);
        ++n;
    }

    MetricsReport report;
    for (const auto& cls : kClassLabels) report.per_site_class[cls] = {};

    std::vector<double> abs_log_ratios;
    double err_total = 0.0;
    std::map<std::string, std::pair<double, std::size_t>> class_err;
    for (const auto& [station_id, acc] : pred_sum) {
        const double pred = acc.first / static_cast<double>(acc.second);
        const double truth = *ds.stations.at(station_id).vs30;
        report.per_station[station_id] = {truth, pred};

        const double pct = std::fabs(pred - truth) / truth * 100.0;
        err_total += pct;
        const std::string cls = site_class_label(classify(truth, config.class_bounds));
        class_err[cls].first += pct;
        class_err[cls].second += 1;

        const double r = std::log10(pred / truth);
        report.log_ratio_mean += r;
        abs_log_ratios.push_back(std::fabs(r));
    }

    const double n_st = static_cast<double>(pred_sum.size());
    report.total.station_count = pred_sum.size();
    report.total.abs_mean_error_pct = err_total / n_st;
    report.total.available = true;
    for (const auto& [cls, acc] : class_err) {
        ClassStat& cs = report.per_site_class[cls];
        cs.station_count = acc.second;
        cs.abs_mean_error_pct = acc.first / static_cast<double>(acc.second);
        cs.available = true;
    }

    report.log_ratio_mean /= n_st;
    double mean_abs = 0.0;
    for (double a : abs_log_ratios) mean_abs += a;
    mean_abs /= n_st;
    double var = 0.0;
    for (double a : abs_log_ratios) var += (a - mean_abs) * (a - mean_abs);
    report.abs_log_ratio_mean = mean_abs;
    report.abs_log_ratio_std = std::sqrt(var / n_st);
    return report;
}

std::vector<std::string> grid_experiment_names() {
    return {"alpha_auto_PGA", "alpha_auto_P_15sec", "alpha_man_PGA", "alpha_man_P_15sec",
            "beta_auto_PGA",  "beta_auto_P_15sec",  "beta_man_PGA",  "beta_man_P_15sec",
            "gamma_ps_auto",  "gamma_ps_man",       "gamma_none_auto", "gamma_none_man"};
}

namespace {

struct GridCell {
    std::string name;
    bool ps_info;
    bool transfer;
    AnnotationSource annot_test;
    Anchor anchor;
};

const std::vector<GridCell> kGrid = {
    {"alpha_auto_PGA", true, false, AnnotationSource::AUTO, Anchor::PGA},
    {"alpha_auto_P_15sec", true, false, AnnotationSource::AUTO, Anchor::P_ARRIVAL},
    {"alpha_man_PGA", true, false, AnnotationSource::MANUAL, Anchor::PGA},
    {"alpha_man_P_15sec", true, false, AnnotationSource::MANUAL, Anchor::P_ARRIVAL},
    {"beta_auto_PGA", false, false, AnnotationSource::AUTO, Anchor::PGA},
    {"beta_auto_P_15sec", false, false, AnnotationSource::AUTO, Anchor::P_ARRIVAL},
    {"beta_man_PGA", false, false, AnnotationSource::MANUAL, Anchor::PGA},
    {"beta_man_P_15sec", false, false, AnnotationSource::MANUAL, Anchor::P_ARRIVAL},
    {"gamma_ps_auto", true, true, AnnotationSource::AUTO, Anchor::PGA},
    {"gamma_ps_man", true, true, AnnotationSource::MANUAL, Anchor::PGA},
    {"gamma_none_auto", false, true, AnnotationSource::AUTO, Anchor::PGA},
    {"gamma_none_man", false, true, AnnotationSource::MANUAL, Anchor::PGA},
};

// P-anchored cells shorten the window the same way 60 s -> 15 s does.
double p_window_duration(const WindowSpec& base) {
    const double want = base.duration_s / 4.0;
    const double segs = std::max(1.0, std::round(want / base.segment_len_s));
    return segs * base.segment_len_s;
}

}  // namespace

std::map<std::string, MetricsReport> run_grid(const Dataset& ds, const PickSet& picks,
                                              const ExperimentConfig& base,
                                              const std::string& out_dir) {
    fs::create_directories(fs::path(out_dir) / "reports");
    fs::create_directories(fs::path(out_dir) / "encoders");
    fs::create_directories(fs::path(out_dir) / "curves");
    fs::create_directories(fs::path(out_dir) / "checkpoints");

    std::map<std::string, MetricsReport> reports;
    std::string table_csv = "experiment,class,station_count,abs_mean_error_pct\n";

    for (const auto& cell : kGrid) {
        ExperimentConfig cfg = base;
        cfg.ps_info = cell.ps_info;
        cfg.window.include_ps_channel = cell.ps_info;
        cfg.window.anchor = cell.anchor;
        if (cell.anchor == Anchor::P_ARRIVAL) cfg.window.duration_s = p_window_duration(base.window);
        cfg.annotation_train = AnnotationSource::AUTO;  // Table-1 cells all train on auto labels
        cfg.annotation_test = cell.annot_test;
        if (cell.transfer) {
            cfg.training_method = TrainingMethod::TRANSFER;
            const std::string source = cell.ps_info ? "alpha_auto_PGA" : "beta_auto_PGA";
            cfg.encoder_checkpoint = (fs::path(out_dir) / "encoders" / (source + ".bin")).string();
        } else {
            cfg.training_method = TrainingMethod::SCRATCH;
        }

        try {
            TrainResult tr = train(cfg, ds, picks);
            if (!cell.transfer) {
                save_encoder(tr.params, (fs::path(out_dir) / "encoders" / (cell.name + ".bin")).string());
            }
            save_checkpoint(tr.params,
                            (fs::path(out_dir) / "checkpoints" / (cell.name + ".bin")).string(),
                            cfg.window);
            MetricsReport m = evaluate(tr.params, ds, tr.plan, cfg, picks);
            write_metrics_json(m, (fs::path(out_dir) / "reports" / (cell.name + ".json")).string());
            write_curves_csv(tr.curves, (fs::path(out_dir) / "curves" / (cell.name + ".csv")).string());
            write_metrics_csv_rows(cell.name, m, table_csv);
            reports[cell.name] = std::move(m);
        } catch (const std::exception& e) {
            std::cerr << "grid cell " << cell.name << " failed: " << e.what() << "\n";
        }
    }
    atomic_write((fs::path(out_dir) / "table2.csv").string(), table_csv);
    return reports;
}

void write_metrics_json(const MetricsReport& m, const std::string& path) {
    json j;
    for (const auto& [cls, cs] : m.per_site_class) {
        j["per_site_class"][cls] = {
            {"station_count", cs.station_count},
            {"abs_mean_error_pct", cs.available ? json(cs.abs_mean_error_pct) : json(nullptr)}};
    }
    j["total"] = {{"station_count", m.total.station_count},
                  {"abs_mean_error_pct", m.total.abs_mean_error_pct}};
    j["log_ratio_mean"] = m.log_ratio_mean;
    j["abs_log_ratio_mean"] = m.abs_log_ratio_mean;
    j["abs_log_ratio_std"] = m.abs_log_ratio_std;
    for (const auto& [id, tp] : m.per_station) {
        j["per_station"][id] = {{"true_vs30", tp.first}, {"predicted_vs30", tp.second}};
    }
    atomic_write(path, j.dump(2) + "\n");
}

MetricsReport read_metrics_json(const std::string& path) {
    const json j = json::parse(read_file(path));
    MetricsReport m;
    for (const auto& [cls, v] : j.at("per_site_class").items()) {
        ClassStat cs;
        cs.station_count = v.at("station_count").get<std::size_t>();
        if (!v.at("abs_mean_error_pct").is_null()) {
            cs.abs_mean_error_pct = v.at("abs_mean_error_pct").get<double>();
            cs.available = true;
        }
        m.per_site_class[cls] = cs;
    }
    m.total.station_count = j.at("total").at("station_count").get<std::size_t>();
    m.total.abs_mean_error_pct = j.at("total").at("abs_mean_error_pct").get<double>();
    m.total.available = true;
    m.log_ratio_mean = j.at("log_ratio_mean").get<double>();
    m.abs_log_ratio_mean = j.at("abs_log_ratio_mean").get<double>();
    m.abs_log_ratio_std = j.at("abs_log_ratio_std").get<double>();
    if (j.contains("per_station")) {
        for (const auto& [id, v] : j.at("per_station").items()) {
            m.per_station[id] = {v.at("true_vs30").get<double>(),
                                 v.at("predicted_vs30").get<double>()};
        }
    }
    return m;
}

void write_metrics_csv_rows(const std::string& experiment, const MetricsReport& m,
                            std::string& csv_out) {
    std::ostringstream ss;
    for (const auto& [cls, cs] : m.per_site_class) {
        ss << experiment << ',' << cls << ',' << cs.station_count << ',';
        if (cs.available) {
            ss << cs.abs_mean_error_pct;
        } else {
            ss << "NaN";
        }
        ss << '\n';
    }
    ss << experiment << ",Total," << m.total.station_count << ',' << m.total.abs_mean_error_pct
       << '\n';
    csv_out += ss.str();
}

void write_curves_csv(const std::vector<EpochStats>& curves, const std::string& path) {
    std::ostringstream ss;
    ss << "epoch,train_loss,val_abs_err,val_pct_err\n";
    for (const auto& e : curves) {
        ss << e.epoch << ',' << e.train_loss << ',' << e.val_abs_err << ',' << e.val_pct_err << '\n';
    }
    atomic_write(path, ss.str());
}

}  // namespace vsseq
