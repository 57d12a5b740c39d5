// Command-line front end for the lane-geometry vanishing point toolkit.
//
// Subcommands: label, stats, heatmap, augment, eval, horizon, synth.
// Every run is deterministic for a fixed config: all randomness flows from
// --seed via per-subcommand, per-frame derived streams, outputs are written
// in manifest order regardless of worker scheduling, and numbers are
// formatted with shortest round-trip digits.
//
// Exit codes: 0 success, 1 usage/config, 2 input error, 3 internal.

#include <CLI11.hpp>

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "lanevp/lanevp.hpp"

namespace fs = std::filesystem;

namespace {

using lanevp::detail::format_double;

lanevp::ImageGeometry parse_geometry(const std::string& s) {
    auto x = s.find('x');
    if (x == std::string::npos) throw lanevp::ConfigError("geometry must look like 1640x590");
    lanevp::ImageGeometry g;
    try {
        g.width = std::stoi(s.substr(0, x));
        g.height = std::stoi(s.substr(x + 1));
    } catch (const std::exception&) {
        throw lanevp::ConfigError("geometry must look like 1640x590, got '" + s + "'");
    }
    if (!g.valid()) throw lanevp::ConfigError("geometry must be positive, got '" + s + "'");
    return g;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) {
        if (item.empty()) continue;
        double v = 0.0;
        if (!lanevp::detail::parse_double(item, v))
            throw lanevp::ConfigError("bad number '" + item + "' in list '" + s + "'");
        out.push_back(v);
    }
    return out;
}

std::string strip_leading_slashes(std::string id) {
    while (!id.empty() && id.front() == '/') id.erase(0, 1);
    return id;
}

/// driver/clip.MP4/00000.jpg -> driver/clip.MP4/00000.lines.txt
fs::path lines_path(const std::string& root, const std::string& frame_id) {
    std::string id = strip_leading_slashes(frame_id);
    if (id.ends_with(".lines.txt")) return fs::path(root) / id;
    auto slash = id.find_last_of('/');
    auto dot = id.find_last_of('.');
    std::string base =
        (dot != std::string::npos && (slash == std::string::npos || dot > slash))
            ? id.substr(0, dot)
            : id;
    return fs::path(root) / (base + ".lines.txt");
}

std::string flatten_frame_id(const std::string& frame_id) {
    std::string out = strip_leading_slashes(frame_id);
    for (char& c : out)
        if (c == '/' || c == '\\') c = '_';
    return out;
}

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw lanevp::IoError("cannot write '" + path.string() + "'");
    return out;
}

template <typename Fn>
void parallel_for(std::size_t n, int jobs, Fn&& fn) {
    if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
    if (jobs < 1) jobs = 1;
    if (static_cast<std::size_t>(jobs) > n) jobs = static_cast<int>(n);
    if (jobs <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr first_error;
    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(err_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(jobs);
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

// ---------------------------------------------------------------------------

struct Options {
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    std::string geometry = "1640x590";
    int jobs = 0;
    std::string method = "3d";
    std::string aggregation = "median";

    int min_n_int = 3;
    double max_sigma_y = 10.0;
    double max_sigma_x = -1.0;  // < 0 means unset

    std::string sigma_mode = "fixed";
    double sigma = 16.0;
    double sigma_clip_low = 6.0;
    double sigma_clip_high = 16.0;
    std::string amplitude = "unit";

    double h_edge = 0.05;
    double flip_prob = 0.5;
    double shift_prob = 0.5;

    // label / stats
    std::string list_path;
    std::string root;
    std::string annotation = "lines";
    int row_interval = 5;
    double min_y_extent = 50.0;

    // heatmap / augment / eval
    std::string labels_path;
    std::string render_geometry;
    int pad_multiple = 1;
    bool export_pgm = false;
    bool filtered = false;

    // eval / horizon
    std::string pred_path;
    std::string lanes_root;
    std::string pred_geometry;
    std::string thresholds = "0.01,0.02";
    std::string conf_thresholds;

    lanevp::FitMethod fit_method() const { return lanevp::FitMethod::parse(method); }
    lanevp::Aggregation agg() const { return lanevp::parse_aggregation(aggregation); }
    lanevp::ImageGeometry geom() const { return parse_geometry(geometry); }

    lanevp::LabelFilter filter() const {
        lanevp::LabelFilter f;
        f.min_n_int = min_n_int;
        f.max_sigma_y = max_sigma_y;
        if (max_sigma_x >= 0.0) f.max_sigma_x = max_sigma_x;
        f.validate();
        return f;
    }

    lanevp::GaussianSpec gaussian() const {
        lanevp::GaussianSpec g;
        g.sigma_mode = lanevp::parse_sigma_mode(sigma_mode);
        g.sigma_fixed = sigma;
        g.sigma_clip_low = sigma_clip_low;
        g.sigma_clip_high = sigma_clip_high;
        g.amplitude_mode = lanevp::parse_amplitude_mode(amplitude);
        g.validate();
        return g;
    }

    lanevp::ShiftSpec shift_spec() const {
        lanevp::ShiftSpec s;
        s.h_edge = h_edge;
        s.flip_prob = flip_prob;
        s.shift_prob = shift_prob;
        s.seed = seed;
        s.validate();
        return s;
    }

    /// Every enumeration and numeric range is checked once at startup; a
    /// typo fails the run before any work happens.
    void validate() const {
        geom();
        fit_method().validate();
        agg();
        filter();
        gaussian();
        shift_spec();
        if (annotation != "lines" && annotation != "mask")
            throw lanevp::ConfigError("annotation must be lines|mask, got '" + annotation + "'");
        if (row_interval < 1) throw lanevp::ConfigError("row-interval must be >= 1");
        if (min_y_extent < 0.0) throw lanevp::ConfigError("min-y-extent must be >= 0");
        if (pad_multiple < 1) throw lanevp::ConfigError("pad-multiple must be >= 1");
        if (!render_geometry.empty()) parse_geometry(render_geometry);
        if (!pred_geometry.empty()) parse_geometry(pred_geometry);
        parse_double_list(thresholds);
        parse_double_list(conf_thresholds);
    }
};

lanevp::FrameAnnotation load_frame(const Options& opt, const lanevp::ImageGeometry& geometry,
                                   const std::string& root, const std::string& frame_id) {
    if (opt.annotation == "mask") {
        fs::path path = fs::path(root) / strip_leading_slashes(frame_id);
        auto mask = lanevp::read_pgm_mask(path.string());
        return lanevp::mask_to_centerlines(mask, opt.row_interval, opt.min_y_extent, frame_id);
    }
    fs::path path = lines_path(root, frame_id);
    std::ifstream in(path);
    if (!in) throw lanevp::IoError("cannot open annotation '" + path.string() + "'");
    return lanevp::parse_culane_lines(in, geometry, frame_id);
}

struct LabeledDataset {
    std::vector<lanevp::LabelRecord> labels;
    std::vector<lanevp::FrameAnnotation> frames;
    std::int64_t read_failures = 0;
};

/// Label every manifest frame in parallel; results come back in manifest
/// order no matter how workers are scheduled. Per-frame read failures are
/// logged and produce invalid rows instead of aborting the run.
LabeledDataset label_dataset(const Options& opt, bool keep_frames) {
    const auto geometry = opt.geom();
    const auto method = opt.fit_method();
    const auto aggregation = opt.agg();
    auto manifest = lanevp::scan_manifest_file(opt.list_path);

    LabeledDataset data;
    data.labels.resize(manifest.size());
    if (keep_frames) data.frames.resize(manifest.size());
    std::atomic<std::int64_t> failures{0};
    std::mutex log_mutex;

    parallel_for(manifest.size(), opt.jobs, [&](std::size_t i) {
        const std::string& frame_id = manifest[i];
        lanevp::FrameAnnotation frame;
        frame.frame_id = frame_id;
        frame.geometry = geometry;
        try {
            frame = load_frame(opt, geometry, opt.root, frame_id);
        } catch (const lanevp::Error& e) {
            ++failures;
            std::lock_guard lock(log_mutex);
            std::cerr << "warning: " << e.what() << "\n";
        }
        auto res = lanevp::label_frame(frame, method, aggregation);
        data.labels[i] = {frame_id, res.label};
        if (keep_frames) data.frames[i] = std::move(frame);
    });
    data.read_failures = failures.load();
    return data;
}

int cmd_label(const Options& opt) {
    auto data = label_dataset(opt, /*keep_frames=*/false);
    fs::create_directories(opt.out_dir);
    auto out = open_output(fs::path(opt.out_dir) / "labels.tsv");
    lanevp::write_label_header(out);

    const auto filter = opt.filter();
    std::int64_t valid = 0, filtered_in = 0;
    for (const auto& rec : data.labels) {
        lanevp::write_label_row(out, rec);
        valid += rec.label.valid;
        filtered_in += lanevp::apply_filter(rec.label, filter);
    }
    std::cout << "frames\t" << data.labels.size() << "\nvalid\t" << valid << "\nfiltered_in\t"
              << filtered_in << "\nread_failures\t" << data.read_failures << "\n";
    return 0;
}

int cmd_stats(const Options& opt) {
    auto data = label_dataset(opt, /*keep_frames=*/true);
    auto report = lanevp::dataset_label_stats(data.labels, data.frames);
    fs::create_directories(opt.out_dir);
    auto out = open_output(fs::path(opt.out_dir) / "stats.json");
    out << lanevp::stats_to_json(report);
    std::cout << "frames\t" << report.n_frames << "\nvalid\t" << report.n_valid
              << "\nframes_ge2_lanes\t" << report.frames_ge2_lanes << "\n";
    return 0;
}

std::vector<lanevp::LabelRecord> load_labels(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lanevp::IoError("cannot open labels '" + path + "'");
    return lanevp::parse_labels(in);
}

int cmd_heatmap(const Options& opt) {
    auto labels = load_labels(opt.labels_path);
    const auto native = opt.geom();
    const auto render_geom =
        opt.render_geometry.empty() ? native : parse_geometry(opt.render_geometry);
    const auto padded = lanevp::pad_to_multiple(render_geom, opt.pad_multiple);
    const auto spec = opt.gaussian();
    const auto filter = opt.filter();

    fs::path dir = fs::path(opt.out_dir) / "heatmaps";
    fs::create_directories(dir);

    std::atomic<std::int64_t> written{0};
    parallel_for(labels.size(), opt.jobs, [&](std::size_t i) {
        const auto& rec = labels[i];
        if (!rec.label.valid) return;
        if (opt.filtered && !lanevp::apply_filter(rec.label, filter)) return;

        lanevp::VPLabel label = rec.label;
        if (!(render_geom == native)) {
            label.vp = lanevp::rescale_coords(label.vp, native, render_geom);
            label.sigma_x *= static_cast<double>(render_geom.width) / native.width;
            label.sigma_y *= static_cast<double>(render_geom.height) / native.height;
        }
        // The target lives on the padded canvas; the original raster sits at
        // (0, 0), so label coordinates carry over unchanged.
        auto h = lanevp::render_target(label, padded.padded, spec);
        fs::path base = dir / (flatten_frame_id(rec.frame_id) + ".vphm");
        lanevp::write_heatmap(h, base.string());
        if (opt.export_pgm)
            lanevp::write_heatmap_pgm(h, (dir / (flatten_frame_id(rec.frame_id) + ".pgm")).string());
        ++written;
    });
    std::cout << "heatmaps\t" << written.load() << "\nskipped\t"
              << static_cast<std::int64_t>(labels.size()) - written.load() << "\n";
    return 0;
}

int cmd_augment(const Options& opt) {
    auto labels = load_labels(opt.labels_path);
    const auto geometry = opt.geom();
    const auto spec = opt.shift_spec();
    lanevp::Rng master = lanevp::Rng(opt.seed).derive("augment");

    fs::create_directories(opt.out_dir);
    auto out = open_output(fs::path(opt.out_dir) / "augment.tsv");
    out << "#frame_id\tflipped\tshift_px\n";

    std::int64_t flipped = 0, shifted = 0;
    for (const auto& rec : labels) {
        lanevp::FrameAnnotation frame;
        frame.frame_id = rec.frame_id;
        frame.geometry = geometry;
        lanevp::Rng rng = master.derive(rec.frame_id);
        auto res = lanevp::augment_frame(std::move(frame), rec.label, spec, rng);
        out << rec.frame_id << '\t' << (res.record.flipped ? 1 : 0) << '\t'
            << format_double(res.record.shift_px) << '\n';
        flipped += res.record.flipped;
        shifted += res.record.shift_px != 0.0;
    }
    std::cout << "records\t" << labels.size() << "\nflipped\t" << flipped << "\nshifted\t"
              << shifted << "\n";
    return 0;
}

void write_report_files(const fs::path& out_dir, const std::string& suffix,
                        const lanevp::EvalReport& report,
                        const std::vector<std::string>& extra_lines) {
    auto rep = open_output(out_dir / ("report" + suffix + ".txt"));
    lanevp::write_eval_report(rep, report);
    for (const auto& line : extra_lines) rep << line << '\n';
    auto curve = open_output(out_dir / ("curve" + suffix + ".tsv"));
    lanevp::write_cumulative_curve(curve, report);
}

int cmd_eval(const Options& opt) {
    if (opt.pred_path.empty() == opt.lanes_root.empty())
        throw lanevp::ConfigError("eval needs exactly one of --pred or --lanes-root");

    const auto native = opt.geom();
    const auto pred_geom =
        opt.pred_geometry.empty() ? native : parse_geometry(opt.pred_geometry);
    auto labels = load_labels(opt.labels_path);
    const auto filter = opt.filter();

    // Ground truth: rows with a usable label, in label-file order.
    std::vector<const lanevp::LabelRecord*> gt;
    std::int64_t n_unlabeled = 0;
    for (const auto& rec : labels) {
        if (!rec.label.valid || (opt.filtered && !lanevp::apply_filter(rec.label, filter))) {
            ++n_unlabeled;
            continue;
        }
        gt.push_back(&rec);
    }

    std::unordered_map<std::string, lanevp::PredictionRow> pred_by_id;
    std::vector<std::string> unknown;
    if (!opt.pred_path.empty()) {
        std::ifstream in(opt.pred_path);
        if (!in) throw lanevp::IoError("cannot open predictions '" + opt.pred_path + "'");
        std::unordered_set<std::string> known;
        for (const auto& rec : labels) known.insert(rec.frame_id);
        for (auto& row : lanevp::parse_predictions(in)) {
            if (!known.count(row.frame_id)) {
                unknown.push_back(row.frame_id);
                continue;
            }
            pred_by_id.emplace(row.frame_id, std::move(row));
        }
        std::sort(unknown.begin(), unknown.end());
    } else {
        // Two-stage route: fit whatever polylines the detector wrote per
        // frame; fewer than two usable lanes means no answer.
        const auto method = opt.fit_method();
        std::vector<lanevp::PredictionRow> rows(gt.size());
        parallel_for(gt.size(), opt.jobs, [&](std::size_t i) {
            lanevp::PredictionRow row;
            row.frame_id = gt[i]->frame_id;
            try {
                auto frame = load_frame(opt, pred_geom, opt.lanes_root, gt[i]->frame_id);
                if (auto vp = lanevp::two_stage_vp(frame, method)) {
                    row.pred = *vp;
                    row.confidence = 1.0;
                }
            } catch (const lanevp::Error&) {
                // missing or unparseable detection file counts as a failure
            }
            rows[i] = std::move(row);
        });
        for (auto& row : rows) pred_by_id.emplace(row.frame_id, std::move(row));
    }

    std::vector<lanevp::EvalRecord> records;
    records.reserve(gt.size());
    for (const auto* rec : gt) {
        std::optional<lanevp::Point2> pred;
        double confidence = 0.0;
        if (auto it = pred_by_id.find(rec->frame_id); it != pred_by_id.end() && it->second.pred) {
            pred = lanevp::rescale_coords(*it->second.pred, pred_geom, native);
            confidence = it->second.confidence;
        }
        records.push_back(
            lanevp::make_eval_record(rec->frame_id, pred, rec->label.vp, confidence, native));
    }

    const auto thresholds = parse_double_list(opt.thresholds);
    fs::create_directories(opt.out_dir);

    std::vector<std::string> extra;
    extra.push_back("n_unlabeled\t" + std::to_string(n_unlabeled));
    extra.push_back("n_unknown\t" + std::to_string(static_cast<std::int64_t>(unknown.size())));
    for (const auto& id : unknown) extra.push_back("unknown_frame\t" + id);

    auto base = lanevp::evaluate(records, thresholds);
    write_report_files(opt.out_dir, "", base, extra);

    for (double tau : parse_double_list(opt.conf_thresholds)) {
        std::vector<lanevp::EvalRecord> kept;
        for (const auto& r : records)
            if (r.pred && r.confidence > tau) kept.push_back(r);
        auto rep = lanevp::evaluate(kept, thresholds);
        std::vector<std::string> sweep_extra{
            "confidence_threshold\t" + format_double(tau),
            "n_dropped\t" + std::to_string(static_cast<std::int64_t>(records.size() - kept.size()))};
        write_report_files(opt.out_dir, "_conf_" + format_double(tau), rep, sweep_extra);
    }

    std::cout << "records\t" << base.n_total << "\nfailed\t" << base.n_failed
              << "\nmean_norm_dist\t" << format_double(base.mean_norm_dist) << "\n";
    return 0;
}

int cmd_horizon(const Options& opt) {
    const auto geometry = opt.geom();
    std::ifstream in(opt.pred_path);
    if (!in) throw lanevp::IoError("cannot open predictions '" + opt.pred_path + "'");
    std::vector<lanevp::PeakResult> peaks;
    for (const auto& row : lanevp::parse_predictions(in)) {
        if (!row.pred) continue;
        peaks.push_back({static_cast<int>(std::llround(row.pred->x)),
                         static_cast<int>(std::llround(row.pred->y)), row.confidence});
    }
    auto est = lanevp::estimate_horizon(peaks, geometry);
    fs::create_directories(opt.out_dir);
    auto out = open_output(fs::path(opt.out_dir) / "horizon.txt");
    out << "slope\t" << format_double(est.slope) << '\n'
        << "intercept\t" << format_double(est.intercept) << '\n'
        << "angle_deg\t" << format_double(est.angle_deg) << '\n'
        << "n_frames\t" << est.n_frames << '\n'
        << "n_columns\t" << est.n_columns << '\n';
    std::cout << "angle_deg\t" << format_double(est.angle_deg) << "\nn_frames\t" << est.n_frames
              << "\n";
    return 0;
}

int cmd_synth(const Options& opt) {
    auto suite = lanevp::scene_suite(opt.seed);
    fs::path out_dir(opt.out_dir);
    fs::create_directories(out_dir / "scenes");

    auto list = open_output(out_dir / "list.txt");
    auto truth = open_output(out_dir / "truth.tsv");
    truth << "#frame_id\tvp_x\tvp_y\n";
    for (std::size_t i = 0; i < suite.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "scene_%03zu", i);
        std::string frame_id = std::string("scenes/") + name + ".jpg";
        auto lines = open_output(out_dir / "scenes" / (std::string(name) + ".lines.txt"));
        lanevp::serialize_culane_lines(suite[i].second.lanes, lines);
        list << frame_id << '\n';
        truth << frame_id << '\t' << format_double(suite[i].second.vp_true.x) << '\t'
              << format_double(suite[i].second.vp_true.y) << '\n';
    }
    std::cout << "scenes\t" << suite.size() << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"lane-geometry vanishing point toolkit"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "read options from a config file; command-line flags win");
    app.allow_config_extras(CLI::config_extras_mode::error);

    Options opt;
    app.add_option("-o,--out", opt.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", opt.seed, "master seed; all randomness derives from it (splitmix64)")
        ->capture_default_str();
    app.add_option("--geometry", opt.geometry, "native raster size as WIDTHxHEIGHT")
        ->capture_default_str();
    app.add_option("-j,--jobs", opt.jobs, "worker threads (0 = hardware parallelism)")
        ->capture_default_str();
    app.add_option("--method", opt.method, "curve fitting: 1d|1d-close|2d|3d")
        ->capture_default_str();
    app.add_option("--aggregation", opt.aggregation, "intersection aggregation: median|mean")
        ->capture_default_str();
    app.add_option("--min-n-int", opt.min_n_int, "label filter: minimum intersection count")
        ->capture_default_str();
    app.add_option("--max-sigma-y", opt.max_sigma_y, "label filter: sigma_y upper bound (strict)")
        ->capture_default_str();
    app.add_option("--max-sigma-x", opt.max_sigma_x,
                   "label filter: sigma_x upper bound (strict; negative disables)")
        ->capture_default_str();
    app.add_option("--sigma-mode", opt.sigma_mode, "target sigma: fixed|dynamic")
        ->capture_default_str();
    app.add_option("--sigma", opt.sigma, "fixed target sigma in pixels")->capture_default_str();
    app.add_option("--sigma-clip-low", opt.sigma_clip_low, "dynamic sigma lower clip")
        ->capture_default_str();
    app.add_option("--sigma-clip-high", opt.sigma_clip_high, "dynamic sigma upper clip")
        ->capture_default_str();
    app.add_option("--amplitude", opt.amplitude, "target peak: unit|normalized")
        ->capture_default_str();
    app.add_option("--h-edge", opt.h_edge, "shift band margin as a fraction of height")
        ->capture_default_str();
    app.add_option("--flip-prob", opt.flip_prob, "horizontal flip probability")
        ->capture_default_str();
    app.add_option("--shift-prob", opt.shift_prob, "vertical shift probability")
        ->capture_default_str();

    std::function<int(const Options&)> action;

    auto add_dataset_opts = [&](CLI::App* cmd) {
        cmd->add_option("--list", opt.list_path, "manifest: one frame path per line")->required();
        cmd->add_option("--root", opt.root, "dataset root the manifest paths resolve against")
            ->required();
        cmd->add_option("--annotation", opt.annotation,
                        "annotation source: lines (x y pairs) | mask (pgm instance masks)")
            ->capture_default_str();
        cmd->add_option("--row-interval", opt.row_interval, "mask centerline row sampling step")
            ->capture_default_str();
        cmd->add_option("--min-y-extent", opt.min_y_extent,
                        "mask lanes shorter than this along y are dropped")
            ->capture_default_str();
    };

    auto* label = app.add_subcommand("label", "fit lanes, intersect, write labels.tsv");
    add_dataset_opts(label);
    label->callback([&] { action = cmd_label; });

    auto* stats = app.add_subcommand("stats", "dataset label statistics as stats.json");
    add_dataset_opts(stats);
    stats->callback([&] { action = cmd_stats; });

    auto* heatmap = app.add_subcommand("heatmap", "render target probability maps (*.vphm)");
    heatmap->add_option("--labels", opt.labels_path, "labels.tsv produced by the label step")
        ->required();
    heatmap->add_option("--render-geometry", opt.render_geometry,
                        "render at this size (default: --geometry)");
    heatmap->add_option("--pad-multiple", opt.pad_multiple,
                        "grow the canvas to the next multiple (e.g. 128)")
        ->capture_default_str();
    heatmap->add_flag("--filtered", opt.filtered, "render only labels passing the filter");
    heatmap->add_flag("--export-pgm", opt.export_pgm, "also write 8-bit graymaps for viewing");
    heatmap->callback([&] { action = cmd_heatmap; });

    auto* augment = app.add_subcommand("augment", "draw flip/shift records into augment.tsv");
    augment->add_option("--labels", opt.labels_path, "labels.tsv produced by the label step")
        ->required();
    augment->callback([&] { action = cmd_augment; });

    auto* eval = app.add_subcommand("eval", "score predictions against labels");
    eval->add_option("--labels", opt.labels_path, "labels.tsv with ground truth")->required();
    eval->add_option("--pred", opt.pred_path,
                     "predictions: 'frame_id x y confidence' or 'frame_id NONE'");
    eval->add_option("--lanes-root", opt.lanes_root,
                     "two-stage route: fit detector polylines under this root instead");
    eval->add_option("--pred-geometry", opt.pred_geometry,
                     "geometry predictions are expressed in (default: --geometry)");
    eval->add_option("--thresholds", opt.thresholds, "frac-under thresholds, comma separated")
        ->capture_default_str();
    eval->add_option("--conf-thresholds", opt.conf_thresholds,
                     "optional confidence sweep, comma separated");
    eval->add_flag("--filtered", opt.filtered, "restrict ground truth to filter-passing labels");
    eval->callback([&] { action = cmd_eval; });

    auto* horizon = app.add_subcommand("horizon", "fit the horizon line from accumulated peaks");
    horizon->add_option("--pred", opt.pred_path, "predictions with per-frame peak + confidence")
        ->required();
    horizon->callback([&] { action = cmd_horizon; });

    auto* synth = app.add_subcommand("synth", "write the synthetic scene battery");
    synth->callback([&] { action = cmd_synth; });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        opt.validate();
        return action(opt);
    } catch (const lanevp::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const lanevp::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 3;
    }
}
