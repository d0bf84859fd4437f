#include "lczmap/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include <nlohmann/json.hpp>

#include "lczmap/autolabel.hpp"
#include "lczmap/lczrules.hpp"
#include "lczmap/pngio.hpp"
#include "lczmap/pointcloud.hpp"
#include "lczmap/report.hpp"
#include "lczmap/rng.hpp"
#include "lczmap/synthcity.hpp"
#include "lczmap/textio.hpp"

namespace lczmap {

void validate_config(const PipelineConfig& cfg) {
    if (!(cfg.cellsize > 0.0)) fail("cellsize must be positive");
    if (!(cfg.radius > 0.0)) fail("radius must be positive");
    if (cfg.patch_pixels < 1) fail("patch_pixels must be positive");
    if (!(cfg.min_valid >= 0.0 && cfg.min_valid <= 1.0)) fail("min_valid must be in [0,1]");
    if (cfg.scheme != "gt" && cfg.scheme != "noisy")
        fail("scheme must be 'gt' or 'noisy', got '" + cfg.scheme + "'");
    if (cfg.thresholds.empty()) fail("thresholds source must not be empty");
    if (cfg.threads < 1) fail("threads must be >= 1");
}

PipelineConfig load_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open '" + path + "' for reading");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        fail(path + ": " + e.what());
    }
    if (!j.is_object()) fail(path + ": config must be a JSON object");
    PipelineConfig cfg;
    for (const auto& [key, val] : j.items()) {
        try {
            if (key == "cellsize")
                cfg.cellsize = val.get<double>();
            else if (key == "radius")
                cfg.radius = val.get<double>();
            else if (key == "patch_pixels")
                cfg.patch_pixels = val.get<int>();
            else if (key == "min_valid")
                cfg.min_valid = val.get<double>();
            else if (key == "scheme")
                cfg.scheme = val.get<std::string>();
            else if (key == "thresholds")
                cfg.thresholds = val.get<std::string>();
            else if (key == "seed")
                cfg.seed = val.get<std::uint64_t>();
            else if (key == "threads")
                cfg.threads = val.get<int>();
            else
                fail(path + ": unknown config key '" + key + "'");
        } catch (const nlohmann::json::exception&) {
            fail(path + ": bad value for '" + key + "'");
        }
    }
    validate_config(cfg);
    return cfg;
}

void write_config_json(const PipelineConfig& cfg, const std::string& path) {
    nlohmann::json j;
    j["cellsize"] = cfg.cellsize;
    j["radius"] = cfg.radius;
    j["patch_pixels"] = cfg.patch_pixels;
    j["min_valid"] = cfg.min_valid;
    j["scheme"] = cfg.scheme;
    j["thresholds"] = cfg.thresholds;
    j["seed"] = cfg.seed;
    j["threads"] = cfg.threads;
    std::ofstream out(path, std::ios::binary);
    if (!out) fail("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) fail("error writing '" + path + "'");
}

namespace {

void ensure_parent_dir(const std::string& path) {
    const auto dir = std::filesystem::path(path).parent_path();
    if (!dir.empty()) std::filesystem::create_directories(dir);
}

ThresholdTable resolve_table(const std::string& source) {
    if (source == "table1") return table1_given();
    if (source == "table2") return table2_estimated_nyc();
    return read_thresholds_csv(source);
}

ClassIndexSets scheme_sets(const std::string& scheme) {
    return scheme == "noisy" ? noisy_index_sets() : gt_index_sets();
}

// Per-subcommand flag overrides on top of (optional) config file values.
struct ConfigFlags {
    std::string config_path;
    std::optional<double> cellsize;
    std::optional<double> radius;
    std::optional<int> patch_pixels;
    std::optional<double> min_valid;
    std::optional<std::string> scheme;
    std::optional<std::string> thresholds;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;

    PipelineConfig merge() const {
        PipelineConfig cfg;
        if (!config_path.empty()) cfg = load_pipeline_config(config_path);
        if (cellsize) cfg.cellsize = *cellsize;
        if (radius) cfg.radius = *radius;
        if (patch_pixels) cfg.patch_pixels = *patch_pixels;
        if (min_valid) cfg.min_valid = *min_valid;
        if (scheme) cfg.scheme = *scheme;
        if (thresholds) cfg.thresholds = *thresholds;
        if (seed) cfg.seed = *seed;
        if (threads) cfg.threads = *threads;
        validate_config(cfg);
        return cfg;
    }
};

void add_config_flag(CLI::App* cmd, ConfigFlags& f) {
    cmd->add_option("--config", f.config_path, "JSON config file (flags take precedence)");
}

std::vector<int> parse_class_list(const std::string& spec) {
    std::vector<int> out;
    for (const auto& tok : split(spec, ',')) {
        long long v;
        if (!parse_int(trim(tok), v) || v < 1 || v > 10)
            fail("bad class list '" + spec + "': expected comma-separated LCZ ids in 1..10");
        out.push_back(static_cast<int>(v));
    }
    if (out.empty()) fail("class list is empty");
    return out;
}

std::vector<Prediction> labeled_only(std::vector<Prediction> preds) {
    std::vector<Prediction> out;
    for (auto& p : preds)
        if (p.lcz) out.push_back(std::move(p));
    return out;
}

// ---- subcommand bodies ----

struct RasterizeOpts {
    ConfigFlags cfg;
    std::string input;
    std::string extent;
    std::string out_prefix;
};

void run_rasterize(const RasterizeOpts& o) {
    const PipelineConfig cfg = o.cfg.merge();
    const auto f = split(o.extent, ',');
    if (f.size() != 4) fail("--extent expects xll,yll,ncols,nrows");
    GridHeader h;
    long long nc, nr;
    if (!parse_double(trim(f[0]), h.xll) || !parse_double(trim(f[1]), h.yll) ||
        !parse_int(trim(f[2]), nc) || !parse_int(trim(f[3]), nr))
        fail("bad --extent '" + o.extent + "'");
    h.ncols = static_cast<int>(nc);
    h.nrows = static_cast<int>(nr);
    h.cellsize = cfg.cellsize;
    h.nodata = -9999.0;
    validate_header(h);

    const auto points = read_xyz(o.input);
    const StatsStack stats = rasterize_stats(points, h, cfg.radius, cfg.threads);
    ensure_parent_dir(o.out_prefix + "min.asc");
    write_ascii_grid(stats.min, o.out_prefix + "min.asc");
    write_ascii_grid(stats.max, o.out_prefix + "max.asc");
    write_ascii_grid(stats.mean, o.out_prefix + "mean.asc");
    write_ascii_grid(stats.std, o.out_prefix + "std.asc");
    write_ascii_grid(stats.count, o.out_prefix + "count.asc");
}

struct LabelOpts {
    std::string stats_prefix;
    std::string config;
    std::string out;
};

void run_label(const LabelOpts& o) {
    const Raster mean = read_ascii_raster(o.stats_prefix + "mean.asc");
    const Raster std_dev = read_ascii_raster(o.stats_prefix + "std.asc");
    const Raster count = read_ascii_raster(o.stats_prefix + "count.asc");
    const LabelRuleConfig rules =
        o.config.empty() ? LabelRuleConfig{} : load_label_rules(o.config);
    const CategoryRaster mask = derive_noisy_mask(mean, std_dev, count, rules);
    ensure_parent_dir(o.out);
    write_ascii_grid(mask, o.out);
}

struct ParamsOpts {
    ConfigFlags cfg;
    std::string mask;
    std::string elev;
    std::string labels;
    std::string out;
};

void run_params(const ParamsOpts& o) {
    const PipelineConfig cfg = o.cfg.merge();
    const CategoryRaster mask = read_ascii_category(o.mask);
    const Raster elev = read_ascii_raster(o.elev);
    std::map<std::string, int> label_map;
    const bool have_labels = !o.labels.empty();
    if (have_labels) label_map = labels_to_map(read_labels_csv(o.labels));
    const DatasetExtract ds =
        extract_dataset(mask, elev, scheme_sets(cfg.scheme), have_labels ? &label_map : nullptr,
                        cfg.patch_pixels, cfg.min_valid, cfg.threads);
    if (!ds.skipped_low_valid.empty())
        std::cerr << "skipped " << ds.skipped_low_valid.size()
                  << " patches below the validity threshold\n";
    ensure_parent_dir(o.out);
    write_params_csv(ds.samples, o.out);
}

struct FitOpts {
    std::string params;
    std::string out;
    int min_samples = 5;
};

void run_fit(const FitOpts& o) {
    const auto samples = read_params_csv(o.params);
    auto [table, summary] = fit_thresholds(samples, o.min_samples);
    for (int lcz : summary.small_classes)
        std::cerr << "LCZ " << lcz << " has fewer than " << o.min_samples
                  << " samples; omitted from the fitted table\n";
    ensure_parent_dir(o.out);
    write_thresholds_csv(table, o.out);
}

struct ClassifyOpts {
    std::string params;
    std::string thresholds = "table1";
    std::string out;
};

void run_classify(const ClassifyOpts& o) {
    const auto samples = read_params_csv(o.params);
    const ThresholdTable table = resolve_table(o.thresholds);
    const auto preds = classify_samples(samples, table);
    ensure_parent_dir(o.out);
    write_preds_csv(preds, table.classes(), o.out);
}

struct EvaluateOpts {
    std::string preds;
    std::string out;
    std::string summary;
};

void run_evaluate(const EvaluateOpts& o) {
    auto [preds, classes] = read_preds_csv(o.preds);
    const auto labeled = labeled_only(std::move(preds));
    if (labeled.empty()) fail("no labeled predictions to evaluate");
    const AccuracyReport rep = evaluate_predictions(labeled, classes);
    if (!rep.absent_classes.empty()) {
        std::cerr << "labels outside the threshold table:";
        for (int z : rep.absent_classes) std::cerr << " LCZ " << z;
        std::cerr << '\n';
    }
    ensure_parent_dir(o.out);
    write_report_csv(rep, o.out);
    if (!o.summary.empty()) {
        ensure_parent_dir(o.summary);
        write_report_summary_json(rep, o.summary);
    }
}

struct ReportOpts {
    std::string preds;
    std::string eval;
    std::string map;
    std::string table;
    int scale = 8;
};

void run_report(const ReportOpts& o) {
    if (o.map.empty() && o.table.empty()) fail("nothing to write: pass --map and/or --table");
    if (!o.map.empty()) {
        auto [preds, classes] = read_preds_csv(o.preds);
        (void)classes;
        const PredictionGrid grid = build_prediction_grid(preds);
        const ImageRGB img = render_lcz_map(grid, default_palette(), o.scale);
        ensure_parent_dir(o.map);
        write_png(img, o.map);
    }
    if (!o.table.empty()) {
        if (o.eval.empty()) fail("--table needs --eval (per-class accuracy CSV)");
        const AccuracyReport rep = read_report_csv(o.eval);
        const bool json = o.table.size() >= 5 && o.table.substr(o.table.size() - 5) == ".json";
        ensure_parent_dir(o.table);
        write_report(rep, json ? ReportFormat::json : ReportFormat::csv, o.table);
    }
}

struct SynthOpts {
    ConfigFlags cfg;
    std::string table = "table1";
    std::string classes = "1,2,3,4,5,6,8,10";
    int per_class = 5;
    std::string out_dir;
    std::string points;
    double density = 10.0;
    double jitter = 0.05;
};

void run_synth(const SynthOpts& o) {
    PipelineConfig cfg = o.cfg.merge();
    if (o.per_class < 1) fail("--per-class must be >= 1");
    const ThresholdTable table = resolve_table(o.table);
    const SceneSpec spec =
        make_scene_spec(table, o.table, parse_class_list(o.classes), o.per_class, cfg.seed,
                        cfg.cellsize, cfg.patch_pixels);
    const Scene scene = gen_scene(spec);
    std::filesystem::create_directories(o.out_dir);
    write_scene(scene, o.out_dir);
    if (!o.points.empty()) {
        const auto pts =
            gen_pointcloud(scene.elev, o.density, derive_seed(cfg.seed, 1ULL << 32), o.jitter);
        ensure_parent_dir(o.points);
        write_xyz(pts, o.points);
    }
}

struct PipelineOpts {
    ConfigFlags cfg;
    std::string mask;
    std::string elev;
    std::string labels;
    std::string out_dir;
    int scale = 8;
    int min_samples = 5;
};

void run_pipeline(const PipelineOpts& o) {
    const PipelineConfig cfg = o.cfg.merge();
    std::filesystem::create_directories(o.out_dir);
    const auto path = [&](const char* name) { return o.out_dir + "/" + name; };

    const CategoryRaster mask = read_ascii_category(o.mask);
    const Raster elev = read_ascii_raster(o.elev);
    const auto label_map = labels_to_map(read_labels_csv(o.labels));
    const DatasetExtract ds = extract_dataset(mask, elev, scheme_sets(cfg.scheme), &label_map,
                                              cfg.patch_pixels, cfg.min_valid, cfg.threads);
    if (!ds.skipped_low_valid.empty())
        std::cerr << "skipped " << ds.skipped_low_valid.size()
                  << " patches below the validity threshold\n";
    write_params_csv(ds.samples, path("params.csv"));

    ThresholdTable table = [&] {
        if (cfg.thresholds != "fitted") return resolve_table(cfg.thresholds);
        auto [fitted, summary] = fit_thresholds(ds.samples, o.min_samples);
        for (int lcz : summary.small_classes)
            std::cerr << "LCZ " << lcz << " has fewer than " << o.min_samples
                      << " samples; omitted from the fitted table\n";
        return fitted;
    }();
    write_thresholds_csv(table, path("thresholds.csv"));

    const auto preds = classify_samples(ds.samples, table);
    write_preds_csv(preds, table.classes(), path("preds.csv"));

    const auto labeled = labeled_only(preds);
    if (labeled.empty()) fail("no labeled predictions to evaluate");
    const AccuracyReport rep = evaluate_predictions(labeled, table.classes());
    write_report_csv(rep, path("report.csv"));
    write_report_summary_json(rep, path("report.json"));
    write_report(rep, ReportFormat::csv, path("report_table.csv"));
    write_report(rep, ReportFormat::json, path("report_table.json"));

    const ImageRGB img = render_lcz_map(build_prediction_grid(preds), default_palette(), o.scale);
    write_png(img, path("map.png"));
    write_config_json(cfg, path("config.json"));
}

}  // namespace

int run_cli(std::vector<std::string> args) {
    CLI::App app("rule-based local climate zone mapping from LiDAR rasters");
    app.set_version_flag("--version", "1.0.0");
    app.require_subcommand(1);

    RasterizeOpts ro;
    auto* rast = app.add_subcommand("rasterize", "point cloud to sliding-circle statistics");
    rast->add_option("--input", ro.input, "XYZ point file")->required();
    rast->add_option("--extent", ro.extent, "grid extent xll,yll,ncols,nrows")->required();
    rast->add_option("--out-prefix", ro.out_prefix, "output prefix for {min,max,mean,std,count}.asc")
        ->required();
    rast->add_option("--cellsize", ro.cfg.cellsize, "cell size in meters");
    rast->add_option("--radius", ro.cfg.radius, "circle radius in meters");
    rast->add_option("--threads", ro.cfg.threads, "worker threads");
    add_config_flag(rast, ro.cfg);
    rast->callback([&ro] { run_rasterize(ro); });

    LabelOpts lo;
    auto* label = app.add_subcommand("label", "noisy land-cover mask from statistics rasters");
    label->add_option("--stats-prefix", lo.stats_prefix, "prefix of {mean,std,count}.asc")
        ->required();
    label->add_option("--config", lo.config, "JSON labeling rule thresholds");
    label->add_option("--out", lo.out, "output category raster")->required();
    label->callback([&lo] { run_label(lo); });

    ParamsOpts po;
    auto* params = app.add_subcommand("params", "per-patch parameter vectors");
    params->add_option("--mask", po.mask, "land-cover category raster")->required();
    params->add_option("--elev", po.elev, "elevation raster (mean statistic)")->required();
    params->add_option("--scheme", po.cfg.scheme, "index-set scheme: gt or noisy");
    params->add_option("--labels", po.labels, "patch label CSV");
    params->add_option("--patch-pixels", po.cfg.patch_pixels, "patch side length in cells");
    params->add_option("--min-valid", po.cfg.min_valid, "minimum valid-pixel fraction");
    params->add_option("--threads", po.cfg.threads, "worker threads");
    params->add_option("--out", po.out, "output parameter CSV")->required();
    add_config_flag(params, po.cfg);
    params->callback([&po] { run_params(po); });

    FitOpts fo;
    auto* fit = app.add_subcommand("fit", "mean +- 2 sigma thresholds from labeled parameters");
    fit->add_option("--params", fo.params, "parameter CSV with labels")->required();
    fit->add_option("--min-samples", fo.min_samples, "minimum samples per class");
    fit->add_option("--out", fo.out, "output threshold CSV")->required();
    fit->callback([&fo] { run_fit(fo); });

    ClassifyOpts co;
    auto* classify = app.add_subcommand("classify", "interval membership classification");
    classify->add_option("--params", co.params, "parameter CSV")->required();
    classify->add_option("--thresholds", co.thresholds, "table1, table2, or a threshold CSV");
    classify->add_option("--out", co.out, "output prediction CSV")->required();
    classify->callback([&co] { run_classify(co); });

    EvaluateOpts eo;
    auto* evaluate = app.add_subcommand("evaluate", "coverage accuracy of predictions");
    evaluate->add_option("--preds", eo.preds, "prediction CSV")->required();
    evaluate->add_option("--out", eo.out, "per-class accuracy CSV")->required();
    evaluate->add_option("--summary", eo.summary, "summary JSON path");
    evaluate->callback([&eo] { run_evaluate(eo); });

    ReportOpts rpo;
    auto* report = app.add_subcommand("report", "map image and formatted accuracy table");
    report->add_option("--preds", rpo.preds, "prediction CSV")->required();
    report->add_option("--eval", rpo.eval, "per-class accuracy CSV (for --table)");
    report->add_option("--map", rpo.map, "output PNG map");
    report->add_option("--table", rpo.table, "formatted accuracy table (.csv or .json)");
    report->add_option("--scale", rpo.scale, "pixels per patch");
    report->callback([&rpo] { run_report(rpo); });

    SynthOpts so;
    auto* synth = app.add_subcommand("synth", "synthetic labeled scene");
    synth->add_option("--table", so.table, "table1, table2, or a threshold CSV");
    synth->add_option("--classes", so.classes, "comma-separated LCZ ids");
    synth->add_option("--per-class", so.per_class, "patches per class");
    synth->add_option("--seed", so.cfg.seed, "random seed");
    synth->add_option("--cellsize", so.cfg.cellsize, "cell size in meters");
    synth->add_option("--patch-pixels", so.cfg.patch_pixels, "patch side length in cells");
    synth->add_option("--out-dir", so.out_dir, "output directory")->required();
    synth->add_option("--points", so.points, "also write a synthetic XYZ point cloud here");
    synth->add_option("--density", so.density, "points per square meter");
    synth->add_option("--jitter", so.jitter, "point elevation jitter sigma, meters");
    add_config_flag(synth, so.cfg);
    synth->callback([&so] { run_synth(so); });

    PipelineOpts plo;
    auto* pipeline = app.add_subcommand("pipeline", "params, thresholds, classify, evaluate, report");
    pipeline->add_option("--mask", plo.mask, "land-cover category raster")->required();
    pipeline->add_option("--elev", plo.elev, "elevation raster")->required();
    pipeline->add_option("--labels", plo.labels, "patch label CSV")->required();
    pipeline->add_option("--out-dir", plo.out_dir, "output directory")->required();
    pipeline->add_option("--scheme", plo.cfg.scheme, "index-set scheme: gt or noisy");
    pipeline->add_option("--thresholds", plo.cfg.thresholds,
                         "table1, table2, fitted, or a threshold CSV");
    pipeline->add_option("--patch-pixels", plo.cfg.patch_pixels, "patch side length in cells");
    pipeline->add_option("--min-valid", plo.cfg.min_valid, "minimum valid-pixel fraction");
    pipeline->add_option("--min-samples", plo.min_samples, "minimum samples per fitted class");
    pipeline->add_option("--threads", plo.cfg.threads, "worker threads");
    pipeline->add_option("--scale", plo.scale, "map pixels per patch");
    pipeline->add_option("--seed", plo.cfg.seed, "random seed (recorded in config.json)");
    add_config_flag(pipeline, plo.cfg);
    pipeline->callback([&plo] { run_pipeline(plo); });

    try {
        std::reverse(args.begin(), args.end());
        app.parse(std::move(args));
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}

}  // namespace lczmap
