#include "lczmap/lczrules.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include <nlohmann/json.hpp>

#include "lczmap/textio.hpp"

namespace lczmap {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

const char* param_name(Param p) {
    switch (p) {
        case Param::BSF: return "BSF";
        case Param::ISF: return "ISF";
        case Param::PSF: return "PSF";
        case Param::HRE: return "HRE";
    }
    return "?";
}

std::optional<Param> param_from_name(const std::string& name) {
    for (Param p : all_params)
        if (name == param_name(p)) return p;
    return std::nullopt;
}

const char* provenance_name(Provenance p) {
    switch (p) {
        case Provenance::given_table1: return "given-table1";
        case Provenance::estimated_table2: return "estimated-table2";
        case Provenance::fitted: return "fitted";
    }
    return "?";
}

std::optional<Provenance> provenance_from_name(const std::string& name) {
    for (Provenance p :
         {Provenance::given_table1, Provenance::estimated_table2, Provenance::fitted})
        if (name == provenance_name(p)) return p;
    return std::nullopt;
}

void ThresholdTable::set_row(int lcz, const std::array<Interval, 4>& intervals) {
    if (lcz < 1 || lcz > 10) fail("LCZ identifier out of range 1..10: " + std::to_string(lcz));
    for (Param p : all_params) {
        const Interval& iv = intervals[static_cast<int>(p)];
        if (!(iv.lo <= iv.hi))
            fail("invalid interval for LCZ " + std::to_string(lcz) + " " + param_name(p));
        const bool is_sf = p != Param::HRE;
        if (iv.lo < 0.0 || (is_sf && iv.hi > 1.0))
            fail(std::string("interval outside parameter domain for ") + param_name(p));
    }
    rows_[lcz] = intervals;
}

const std::array<Interval, 4>& ThresholdTable::row(int lcz) const {
    auto it = rows_.find(lcz);
    if (it == rows_.end()) fail("LCZ " + std::to_string(lcz) + " is not in the threshold table");
    return it->second;
}

const Interval& ThresholdTable::interval(int lcz, Param p) const {
    return row(lcz)[static_cast<int>(p)];
}

std::vector<int> ThresholdTable::classes() const {
    std::vector<int> out;
    out.reserve(rows_.size());
    for (const auto& [lcz, _] : rows_) out.push_back(lcz);
    return out;
}

ThresholdTable table1_given() {
    ThresholdTable t(Provenance::given_table1);
    // BSF, ISF, PSF as fractions; HRE in meters. "<x" becomes [0, x] and
    // ">x" becomes [x, inf).
    t.set_row(1, {Interval{0.40, 0.60}, Interval{0.40, 0.60}, Interval{0.0, 0.10},
                  Interval{25.0, kInf}});
    t.set_row(2, {Interval{0.40, 0.70}, Interval{0.30, 0.50}, Interval{0.0, 0.20},
                  Interval{10.0, 25.0}});
    t.set_row(3, {Interval{0.40, 0.70}, Interval{0.20, 0.50}, Interval{0.0, 0.30},
                  Interval{3.0, 10.0}});
    t.set_row(4, {Interval{0.20, 0.40}, Interval{0.30, 0.40}, Interval{0.30, 0.40},
                  Interval{25.0, kInf}});
    t.set_row(5, {Interval{0.20, 0.40}, Interval{0.30, 0.50}, Interval{0.20, 0.40},
                  Interval{10.0, 25.0}});
    t.set_row(6, {Interval{0.20, 0.40}, Interval{0.20, 0.50}, Interval{0.30, 0.60},
                  Interval{3.0, 10.0}});
    t.set_row(7, {Interval{0.60, 0.90}, Interval{0.0, 0.20}, Interval{0.0, 0.30},
                  Interval{2.0, 4.0}});
    t.set_row(8, {Interval{0.30, 0.50}, Interval{0.40, 0.50}, Interval{0.0, 0.20},
                  Interval{3.0, 10.0}});
    t.set_row(9, {Interval{0.10, 0.20}, Interval{0.0, 0.20}, Interval{0.60, 0.80},
                  Interval{3.0, 10.0}});
    t.set_row(10, {Interval{0.20, 0.30}, Interval{0.20, 0.40}, Interval{0.40, 0.50},
                   Interval{5.0, 15.0}});
    return t;
}

ThresholdTable table2_estimated_nyc() {
    ThresholdTable t(Provenance::estimated_table2);
    t.set_row(1, {Interval{0.30, 0.65}, Interval{0.25, 0.55}, Interval{0.00, 0.26},
                  Interval{18.98, 69.14}});
    t.set_row(2, {Interval{0.18, 0.50}, Interval{0.31, 0.62}, Interval{0.04, 0.32},
                  Interval{4.81, 24.25}});
    t.set_row(3, {Interval{0.22, 0.42}, Interval{0.35, 0.58}, Interval{0.09, 0.32},
                  Interval{4.20, 17.72}});
    t.set_row(4, {Interval{0.05, 0.34}, Interval{0.21, 0.58}, Interval{0.17, 0.61},
                  Interval{2.20, 29.78}});
    t.set_row(5, {Interval{0.11, 0.37}, Interval{0.22, 0.53}, Interval{0.21, 0.54},
                  Interval{6.44, 25.09}});
    t.set_row(6, {Interval{0.04, 0.28}, Interval{0.20, 0.56}, Interval{0.23, 0.68},
                  Interval{0.09, 18.11}});
    t.set_row(8, {Interval{0.04, 0.59}, Interval{0.31, 0.81}, Interval{0.00, 0.27},
                  Interval{3.25, 12.21}});
    t.set_row(10, {Interval{0.03, 0.49}, Interval{0.32, 0.81}, Interval{0.00, 0.30},
                   Interval{2.59, 14.16}});
    return t;
}

std::pair<ThresholdTable, FitSummary> fit_thresholds(const std::vector<PatchSample>& samples,
                                                     int min_samples) {
    if (samples.empty()) fail("fit error: no samples");
    if (min_samples < 1) min_samples = 1;

    std::map<int, std::array<std::vector<double>, 4>> by_class;
    for (const auto& s : samples) {
        if (!s.lcz) fail("fit error: sample '" + s.patch_id + "' has no label");
        auto& vals = by_class[*s.lcz];
        vals[0].push_back(s.params.bsf);
        vals[1].push_back(s.params.isf);
        vals[2].push_back(s.params.psf);
        if (s.params.hre) vals[3].push_back(*s.params.hre);
    }

    ThresholdTable table(Provenance::fitted);
    FitSummary summary;
    for (const auto& [lcz, vals] : by_class) {
        bool enough = true;
        for (const auto& v : vals) enough = enough && static_cast<int>(v.size()) >= min_samples;
        if (!enough) {
            summary.small_classes.push_back(lcz);
            continue;
        }
        std::array<FitCell, 4> cells;
        std::array<Interval, 4> intervals;
        for (Param p : all_params) {
            const auto& v = vals[static_cast<int>(p)];
            const double n = static_cast<double>(v.size());
            double sum = 0.0;
            for (double x : v) sum += x;
            const double mu = sum / n;
            double ss = 0.0;
            for (double x : v) ss += (x - mu) * (x - mu);
            const double sigma = std::sqrt(ss / n);  // population
            const double domain_hi = p == Param::HRE ? kInf : 1.0;
            Interval iv{std::max(0.0, mu - 2.0 * sigma), std::min(domain_hi, mu + 2.0 * sigma)};
            cells[static_cast<int>(p)] = FitCell{static_cast<int>(v.size()), mu, sigma, iv};
            intervals[static_cast<int>(p)] = iv;
        }
        table.set_row(lcz, intervals);
        summary.cells[lcz] = cells;
    }
    return {std::move(table), std::move(summary)};
}

namespace {

bool row_contains(const std::array<Interval, 4>& row, const ParamVector& x) {
    if (!row[0].contains(x.bsf)) return false;
    if (!row[1].contains(x.isf)) return false;
    if (!row[2].contains(x.psf)) return false;
    if (!x.hre) return false;  // missing HRE fails every HRE interval
    return row[3].contains(*x.hre);
}

// Normalized distance of one value to one interval's midpoint.
double mid_distance(const Interval& iv, double x) {
    const bool lo_fin = std::isfinite(iv.lo);
    const bool hi_fin = std::isfinite(iv.hi);
    if (lo_fin && hi_fin) {
        const double width = iv.hi - iv.lo;
        if (width <= 0.0) return 0.0;  // degenerate [v,v]: membership implies x == v
        return std::abs(x - 0.5 * (iv.lo + iv.hi)) / width;
    }
    if (lo_fin) return std::abs(x - iv.lo);
    if (hi_fin) return std::abs(x - iv.hi);
    return 0.0;
}

}  // namespace

std::vector<int> classify_multilabel(const ParamVector& x, const ThresholdTable& table) {
    if (table.empty()) fail("classification requires a non-empty threshold table");
    std::vector<int> out;
    for (int lcz : table.classes())
        if (row_contains(table.row(lcz), x)) out.push_back(lcz);
    return out;
}

std::optional<int> classify_single(const ParamVector& x, const ThresholdTable& table) {
    const auto candidates = classify_multilabel(x, table);
    std::optional<int> best;
    double best_dist = 0.0;
    for (int lcz : candidates) {
        const auto& row = table.row(lcz);
        const double dist = mid_distance(row[0], x.bsf) + mid_distance(row[1], x.isf) +
                            mid_distance(row[2], x.psf) + mid_distance(row[3], *x.hre);
        if (!best || dist < best_dist) {  // ties keep the smaller LCZ number
            best = lcz;
            best_dist = dist;
        }
    }
    return best;
}

std::vector<Prediction> classify_samples(const std::vector<PatchSample>& samples,
                                         const ThresholdTable& table) {
    std::vector<Prediction> out;
    out.reserve(samples.size());
    for (const auto& s : samples) {
        Prediction p;
        p.patch_id = s.patch_id;
        p.lcz = s.lcz;
        p.set = classify_multilabel(s.params, table);
        p.single = classify_single(s.params, table);
        out.push_back(std::move(p));
    }
    return out;
}

AccuracyReport evaluate_predictions(const std::vector<Prediction>& preds,
                                    const std::vector<int>& table_classes) {
    if (preds.empty()) fail("evaluation requires at least one prediction");
    std::map<int, std::pair<int, int>> per_class;  // lcz -> (n, hits)
    long long set_size_total = 0;
    int unclassified = 0;
    for (const auto& p : preds) {
        if (!p.lcz) fail("evaluation requires labels; prediction '" + p.patch_id +
                         "' has none");
        auto& [n, hits] = per_class[*p.lcz];
        ++n;
        if (std::find(p.set.begin(), p.set.end(), *p.lcz) != p.set.end()) ++hits;
        set_size_total += static_cast<long long>(p.set.size());
        if (p.set.empty()) ++unclassified;
    }

    AccuracyReport rep;
    rep.n_total = static_cast<int>(preds.size());
    int total_hits = 0;
    for (const auto& [lcz, nh] : per_class) {
        rep.per_class.push_back(
            {lcz, nh.first, static_cast<double>(nh.second) / static_cast<double>(nh.first)});
        total_hits += nh.second;
        if (std::find(table_classes.begin(), table_classes.end(), lcz) == table_classes.end())
            rep.absent_classes.push_back(lcz);
    }
    rep.oa = static_cast<double>(total_hits) / static_cast<double>(rep.n_total);
    rep.mean_prediction_set_size =
        static_cast<double>(set_size_total) / static_cast<double>(rep.n_total);
    rep.n_unclassified = unclassified;
    return rep;
}

AccuracyReport evaluate(const std::vector<PatchSample>& samples, const ThresholdTable& table) {
    return evaluate_predictions(classify_samples(samples, table), table.classes());
}

namespace {

std::string fmt_bound(double v) {
    if (v == kInf) return "inf";
    if (v == -kInf) return "-inf";
    return fmt_double(v);
}

bool parse_bound(const std::string& tok, double& out) {
    if (tok == "inf") {
        out = kInf;
        return true;
    }
    if (tok == "-inf") {
        out = -kInf;
        return true;
    }
    return parse_double(tok, out) && std::isfinite(out);
}

}  // namespace

void write_thresholds_csv(const ThresholdTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    out << "# provenance: " << provenance_name(table.provenance()) << "\n";
    out << "lcz,param,lo,hi\n";
    for (int lcz : table.classes()) {
        for (Param p : all_params) {
            const Interval& iv = table.interval(lcz, p);
            out << fmt_int(lcz) << ',' << param_name(p) << ',' << fmt_bound(iv.lo) << ','
                << fmt_bound(iv.hi) << '\n';
        }
    }
    if (!out) fail("error writing '" + path + "'");
}

ThresholdTable read_thresholds_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "' for reading");
    std::string line;
    int lineno = 0;
    Provenance prov = Provenance::fitted;
    bool saw_header = false;
    std::map<int, std::array<std::optional<Interval>, 4>> rows;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        auto stripped = std::string(trim(line));
        if (stripped.empty()) continue;
        if (stripped.front() == '#') {
            const std::string tag = "# provenance:";
            if (stripped.rfind(tag, 0) == 0) {
                auto name = std::string(trim(stripped.substr(tag.size())));
                auto p = provenance_from_name(name);
                if (!p) fail(path + ":" + std::to_string(lineno) + ": unknown provenance '" +
                             name + "'");
                prov = *p;
            }
            continue;
        }
        if (!saw_header) {
            if (stripped != "lcz,param,lo,hi")
                fail(path + ":" + std::to_string(lineno) + ": expected header 'lcz,param,lo,hi'");
            saw_header = true;
            continue;
        }
        auto f = split(stripped, ',');
        if (f.size() != 4)
            fail(path + ":" + std::to_string(lineno) + ": expected 4 fields, got " +
                 std::to_string(f.size()));
        long long lcz;
        if (!parse_int(f[0], lcz))
            fail(path + ":" + std::to_string(lineno) + ": bad lcz '" + f[0] + "'");
        auto p = param_from_name(f[1]);
        if (!p) fail(path + ":" + std::to_string(lineno) + ": unknown parameter '" + f[1] + "'");
        Interval iv;
        if (!parse_bound(f[2], iv.lo) || !parse_bound(f[3], iv.hi))
            fail(path + ":" + std::to_string(lineno) + ": bad interval bounds");
        auto& slot = rows[static_cast<int>(lcz)][static_cast<int>(*p)];
        if (slot) fail(path + ":" + std::to_string(lineno) + ": duplicate row");
        slot = iv;
    }
    if (!saw_header) fail(path + ": missing 'lcz,param,lo,hi' header");

    ThresholdTable table(prov);
    for (const auto& [lcz, slots] : rows) {
        std::array<Interval, 4> intervals;
        for (Param p : all_params) {
            const auto& slot = slots[static_cast<int>(p)];
            if (!slot) fail(path + ": LCZ " + std::to_string(lcz) + " is missing its " +
                            param_name(p) + " interval");
            intervals[static_cast<int>(p)] = *slot;
        }
        table.set_row(lcz, intervals);
    }
    if (table.empty()) fail(path + ": threshold table has no rows");
    return table;
}

namespace {

std::string join_ints(const std::vector<int>& v, char sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += fmt_int(v[i]);
    }
    return out;
}

std::vector<int> parse_int_list(const std::string& s, char sep, const std::string& ctx) {
    std::vector<int> out;
    if (trim(s).empty()) return out;
    for (const auto& tok : split(s, sep)) {
        long long v;
        if (!parse_int(trim(tok), v)) fail(ctx + ": bad integer '" + tok + "'");
        out.push_back(static_cast<int>(v));
    }
    return out;
}

}  // namespace

void write_preds_csv(const std::vector<Prediction>& preds, const std::vector<int>& table_classes,
                     const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    out << "# classes: " << join_ints(table_classes, ',') << "\n";
    out << "patch_id,lcz,pred,pred_set\n";
    for (const auto& p : preds) {
        out << p.patch_id << ',';
        if (p.lcz) out << fmt_int(*p.lcz);
        out << ',';
        if (p.single) out << fmt_int(*p.single);
        out << ',' << join_ints(p.set, '|') << '\n';
    }
    if (!out) fail("error writing '" + path + "'");
}

std::pair<std::vector<Prediction>, std::vector<int>> read_preds_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "' for reading");
    std::string line;
    int lineno = 0;
    std::vector<int> classes;
    bool saw_header = false;
    std::vector<Prediction> preds;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        auto stripped = std::string(trim(line));
        if (stripped.empty()) continue;
        if (stripped.front() == '#') {
            const std::string tag = "# classes:";
            if (stripped.rfind(tag, 0) == 0)
                classes = parse_int_list(stripped.substr(tag.size()), ',',
                                         path + ":" + std::to_string(lineno));
            continue;
        }
        if (!saw_header) {
            if (stripped != "patch_id,lcz,pred,pred_set")
                fail(path + ":" + std::to_string(lineno) +
                     ": expected header 'patch_id,lcz,pred,pred_set'");
            saw_header = true;
            continue;
        }
        auto f = split(stripped, ',');
        if (f.size() != 4)
            fail(path + ":" + std::to_string(lineno) + ": expected 4 fields, got " +
                 std::to_string(f.size()));
        Prediction p;
        p.patch_id = f[0];
        if (!f[1].empty()) {
            long long z;
            if (!parse_int(f[1], z))
                fail(path + ":" + std::to_string(lineno) + ": bad lcz '" + f[1] + "'");
            p.lcz = static_cast<int>(z);
        }
        if (!f[2].empty()) {
            long long z;
            if (!parse_int(f[2], z))
                fail(path + ":" + std::to_string(lineno) + ": bad pred '" + f[2] + "'");
            p.single = static_cast<int>(z);
        }
        p.set = parse_int_list(f[3], '|', path + ":" + std::to_string(lineno));
        preds.push_back(std::move(p));
    }
    if (!saw_header) fail(path + ": missing 'patch_id,lcz,pred,pred_set' header");
    return {std::move(preds), std::move(classes)};
}

void write_report_csv(const AccuracyReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    out << "lcz,n,accuracy\n";
    for (const auto& row : report.per_class)
        out << fmt_int(row.lcz) << ',' << fmt_int(row.n) << ',' << fmt_double(row.accuracy)
            << '\n';
    if (!out) fail("error writing '" + path + "'");
}

AccuracyReport read_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "' for reading");
    std::string line;
    int lineno = 0;
    if (!std::getline(in, line)) fail(path + ": empty report CSV");
    ++lineno;
    strip_cr(line);
    if (line != "lcz,n,accuracy") fail(path + ":1: expected header 'lcz,n,accuracy'");
    AccuracyReport rep;
    long long total_hits = 0;
    while (std::getline(in, line)) {
        ++lineno;
        strip_cr(line);
        if (trim(line).empty()) continue;
        auto f = split(line, ',');
        if (f.size() != 3)
            fail(path + ":" + std::to_string(lineno) + ": expected 3 fields, got " +
                 std::to_string(f.size()));
        ClassAccuracy row;
        long long lcz, n;
        if (!parse_int(f[0], lcz) || !parse_int(f[1], n) || !parse_double(f[2], row.accuracy))
            fail(path + ":" + std::to_string(lineno) + ": malformed report row");
        row.lcz = static_cast<int>(lcz);
        row.n = static_cast<int>(n);
        rep.per_class.push_back(row);
        rep.n_total += row.n;
        total_hits += std::llround(row.accuracy * row.n);
    }
    if (rep.n_total > 0)
        rep.oa = static_cast<double>(total_hits) / static_cast<double>(rep.n_total);
    return rep;
}

void write_report_summary_json(const AccuracyReport& report, const std::string& path) {
    nlohmann::json j;
    j["oa"] = report.oa;
    j["mean_prediction_set_size"] = report.mean_prediction_set_size;
    j["n_unclassified"] = report.n_unclassified;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) fail("error writing '" + path + "'");
}

}  // namespace lczmap
