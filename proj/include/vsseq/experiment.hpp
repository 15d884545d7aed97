#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "vsseq/model.hpp"
#include "vsseq/picker.hpp"
#include "vsseq/preprocess.hpp"
#include "vsseq/records.hpp"
#include "vsseq/site_class.hpp"

namespace vsseq {

enum class TrainingMethod { SCRATCH, TRANSFER };
enum class Optimizer { ADAM, SGD };

struct ExperimentConfig {
    TrainingMethod training_method = TrainingMethod::SCRATCH;
    bool ps_info = false;
    AnnotationSource annotation_train = AnnotationSource::MANUAL;
    AnnotationSource annotation_test = AnnotationSource::MANUAL;
    WindowSpec window;
    std::uint64_t split_seed = 7;
    double train_fraction = 0.8;
    double val_fraction = 0.1;  // of the train stations, for best-epoch pick
    std::size_t epochs = 50;
    double lr = 1e-3;
    std::size_t batch_size = 8;
    Optimizer optimizer = Optimizer::ADAM;
    std::uint64_t init_seed = 1;
    std::string encoder_checkpoint;  // required for TRANSFER
    bool freeze_encoder = false;
    EncoderConfig encoder;  // in_channels is forced to match ps_info
    std::size_t hidden = 64;
    TargetMode target = TargetMode::LOG10;
    ClassBoundaries class_bounds;

    void validate() const;
};

struct SplitPlan {
    std::set<std::string> train_station_ids;
    std::set<std::string> val_station_ids;
    std::set<std::string> test_station_ids;
    std::string warning;  // non-empty when stratification fell back
};

// Deterministic station-disjoint split, stratified by site class. A class
// with < 2 stations forces a global (unstratified) split, noted in warning.
SplitPlan split_by_station(const Dataset& ds, std::uint64_t seed, double train_fraction,
                           double val_fraction = 0.0, const ClassBoundaries& bounds = {});

struct EpochStats {
    std::size_t epoch = 0;
    double train_loss = 0.0;
    double val_abs_err = 0.0;  // mean |pred - true| in m/s
    double val_pct_err = 0.0;  // mean percentage error
};

struct TrainResult {
    ModelParams params;  // best validation epoch, not last
    std::vector<EpochStats> curves;
    std::size_t best_epoch = 0;
    std::size_t skipped_records = 0;  // missing picks for the annotation source
    SplitPlan plan;
};

TrainResult train(const ExperimentConfig& config, const Dataset& ds, const PickSet& picks);

struct ClassStat {
    std::size_t station_count = 0;
    double abs_mean_error_pct = 0.0;
    bool available = false;  // false -> printed as NaN (empty class)
};

struct MetricsReport {
    std::map<std::string, ClassStat> per_site_class;  // keys "A".."E"
    ClassStat total;
    double log_ratio_mean = 0.0;
    double abs_log_ratio_mean = 0.0;
    double abs_log_ratio_std = 0.0;  // population std of |r|
    std::map<std::string, std::pair<double, double>> per_station;  // id -> (true, pred)
};

// Per-record predictions averaged per station; per-station error
// |pred - true| / true * 100; log metrics on r = log10(pred / true).
// Re-verifies station disjointness of the plan and throws on violation.
MetricsReport evaluate(const ModelParams& params, const Dataset& ds, const SplitPlan& plan,
                       const ExperimentConfig& config, const PickSet& picks);

// The 12-cell grid (names follow the alpha/beta/gamma scheme). Transfer
// cells reuse the encoder saved by the matching scratch cell. Reports and
// curves are written under out_dir; a failed cell is reported, not fatal.
std::map<std::string, MetricsReport> run_grid(const Dataset& ds, const PickSet& picks,
                                              const ExperimentConfig& base,
                                              const std::string& out_dir);

std::vector<std::string> grid_experiment_names();

// Artifact writers (JSON report, Table-2-style CSV, Figure-4-style curves).
void write_metrics_json(const MetricsReport& m, const std::string& path);
MetricsReport read_metrics_json(const std::string& path);
void write_metrics_csv_rows(const std::string& experiment, const MetricsReport& m,
                            std::string& csv_out);
void write_curves_csv(const std::vector<EpochStats>& curves, const std::string& path);

}  // namespace vsseq
