#pragma once

#include <array>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lczmap/lczparams.hpp"

namespace lczmap {

enum class Param { BSF = 0, ISF = 1, PSF = 2, HRE = 3 };
constexpr std::array<Param, 4> all_params{Param::BSF, Param::ISF, Param::PSF, Param::HRE};
const char* param_name(Param p);
std::optional<Param> param_from_name(const std::string& name);

// Closed at finite endpoints; +-infinity marks one-sided ranges.
struct Interval {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();

    bool contains(double x) const { return x >= lo && x <= hi; }
    double width() const { return hi - lo; }
    bool operator==(const Interval&) const = default;
};

enum class Provenance { given_table1, estimated_table2, fitted };
const char* provenance_name(Provenance p);
std::optional<Provenance> provenance_from_name(const std::string& name);

// Per-LCZ, per-parameter intervals. A patch is a candidate member of every
// LCZ whose four intervals all contain its parameters.
class ThresholdTable {
public:
    explicit ThresholdTable(Provenance prov = Provenance::fitted) : provenance_(prov) {}

    void set_row(int lcz, const std::array<Interval, 4>& intervals);
    bool has(int lcz) const { return rows_.count(lcz) != 0; }
    const std::array<Interval, 4>& row(int lcz) const;  // throws on absent classes
    const Interval& interval(int lcz, Param p) const;
    std::vector<int> classes() const;  // ascending
    bool empty() const { return rows_.empty(); }
    Provenance provenance() const { return provenance_; }

private:
    std::map<int, std::array<Interval, 4>> rows_;
    Provenance provenance_;
};

// The ten built-type rows of the standard LCZ definition sheet, percent
// columns converted to fractions, one-sided bounds as half-infinite
// intervals.
ThresholdTable table1_given();

// The eight data-estimated NYC rows (LCZs 1,2,3,4,5,6,8,10).
ThresholdTable table2_estimated_nyc();

struct FitCell {
    int count = 0;
    double mu = 0.0;
    double sigma = 0.0;  // population
    Interval interval;
};

struct FitSummary {
    std::map<int, std::array<FitCell, 4>> cells;  // included classes only
    std::vector<int> small_classes;               // omitted: fewer than min_samples
};

// Per class and parameter: mean and population sigma over the labeled
// samples, interval [mu-2*sigma, mu+2*sigma] clamped to [0,1] for fractions
// and [0,inf) for HRE. Samples with missing HRE feed the fraction statistics
// but not the HRE one; classes short of min_samples (for any statistic) are
// omitted and reported.
std::pair<ThresholdTable, FitSummary> fit_thresholds(const std::vector<PatchSample>& samples,
                                                     int min_samples = 5);

// All classes whose four intervals contain the parameter vector, ascending.
// A missing HRE fails every HRE interval.
std::vector<int> classify_multilabel(const ParamVector& x, const ThresholdTable& table);

// Among the multi-label candidates, the class with the smallest normalized
// distance sum_j |x_j - mid_j| / width_j (half-infinite intervals use the
// finite bound as mid and width 1); ties break to the smaller LCZ number.
std::optional<int> classify_single(const ParamVector& x, const ThresholdTable& table);

struct Prediction {
    std::string patch_id;
    std::optional<int> lcz;     // ground-truth label when known
    std::optional<int> single;  // classify_single result
    std::vector<int> set;       // classify_multilabel result, ascending
};

std::vector<Prediction> classify_samples(const std::vector<PatchSample>& samples,
                                         const ThresholdTable& table);

struct ClassAccuracy {
    int lcz = 0;
    int n = 0;
    double accuracy = 0.0;  // fraction of samples whose set covers the label
};

struct AccuracyReport {
    std::vector<ClassAccuracy> per_class;  // ascending lcz
    int n_total = 0;
    double oa = 0.0;  // pooled coverage fraction (micro-average)
    double mean_prediction_set_size = 0.0;
    int n_unclassified = 0;
    std::vector<int> absent_classes;  // labeled classes the table lacks
};

// Coverage-based accuracy: a sample counts as correct iff its label is in its
// prediction set. Every sample must be labeled.
AccuracyReport evaluate(const std::vector<PatchSample>& samples, const ThresholdTable& table);
AccuracyReport evaluate_predictions(const std::vector<Prediction>& preds,
                                    const std::vector<int>& table_classes);

// Threshold table CSV: "# provenance:" comment, then lcz,param,lo,hi rows
// with -inf/inf literals for unbounded ends.
void write_thresholds_csv(const ThresholdTable& table, const std::string& path);
ThresholdTable read_thresholds_csv(const std::string& path);

// Predictions CSV: "# classes:" comment naming the table's classes, then
// patch_id,lcz,pred,pred_set rows (pred_set pipe-separated).
void write_preds_csv(const std::vector<Prediction>& preds, const std::vector<int>& table_classes,
                     const std::string& path);
std::pair<std::vector<Prediction>, std::vector<int>> read_preds_csv(const std::string& path);

// Accuracy report CSV (lcz,n,accuracy) and summary JSON.
void write_report_csv(const AccuracyReport& report, const std::string& path);
AccuracyReport read_report_csv(const std::string& path);
void write_report_summary_json(const AccuracyReport& report, const std::string& path);

}  // namespace lczmap
