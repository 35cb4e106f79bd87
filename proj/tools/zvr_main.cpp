#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "zvr/config.hpp"
#include "zvr/pipeline.hpp"
#include "zvr/quality.hpp"
#include "zvr/rng.hpp"
#include "zvr/tensor_io.hpp"

using namespace zvr;
using nlohmann::json;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

const char* lambda_name(int which) {
    switch (which) {
        case 0: return "f1";
        case 1: return "f2";
        default: return "f";
    }
}

void write_lambda_trace(const RunReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os << "step,t,lambda_f1,lambda_f2,lambda_f\n";
    for (const LambdaRow& row : report.lambda_trace)
        os << row.step << "," << row.t << "," << fmt(row.ratios.lambda_f1) << ","
           << fmt(row.ratios.lambda_f2) << "," << fmt(row.ratios.lambda_f) << "\n";
}

void write_candidates(const RunReport& report, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os << "step,which_lambda,candidate,quality,temporal_err,rank_sum,chosen\n";
    for (const CandidateRow& row : report.candidates)
        os << row.step << "," << lambda_name(row.which_lambda) << "," << fmt(row.report.lambda)
           << "," << fmt(row.report.quality) << "," << fmt(row.report.temporal_err) << ","
           << row.report.rank_sum << "," << (row.report.chosen ? 1 : 0) << "\n";
}

void write_report_json(const RunReport& report, const RunConfig& cfg, const std::string& path) {
    json j;
    j["task"] = cfg.get("task");
    j["seed"] = report.seed;
    j["postprocess"] = report.postprocess_ran ? "enabled" : "disabled";
    j["runtime_ms"] = report.runtime_ms;
    json metrics;
    if (report.psnr_db) metrics["psnr"] = *report.psnr_db;
    if (report.ssim_score) metrics["ssim"] = *report.ssim_score;
    if (report.warp_error) metrics["warp_error"] = *report.warp_error;
    metrics["sharpness"] = report.sharpness;
    metrics["data_fidelity"] = report.data_fidelity;
    if (cfg.task() == TaskKind::LowLightEnhance) metrics["lowlight_f"] = report.lowlight_f;
    j["metrics"] = metrics;
    j["config"] = cfg.values();
    j["lambda_trace_rows"] = report.lambda_trace.size();
    j["candidate_rows"] = report.candidates.size();
    std::ofstream os(path);
    if (!os) throw IoError("cannot write " + path);
    os << j.dump(2) << "\n";
}

VideoTensor add_measurement_noise(VideoTensor v, double sigma, uint64_t seed) {
    if (sigma <= 0.0) return v;
    Rng rng(seed, 99);
    for (size_t i = 0; i < v.size(); ++i) v[i] = float(double(v[i]) + sigma * rng.normal());
    return v;
}

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    bool verbose = false;
};

RunConfig resolve_config(const CommonOpts& opts) {
    RunConfig cfg;
    std::string path = opts.config_path;
    if (path.empty()) {
        if (const char* env = std::getenv("ZVR_CONFIG")) path = env;
    }
    if (!path.empty()) cfg.load_file(path);
    for (const std::string& kv : opts.sets) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got " + kv);
        cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    if (opts.verbose) {
        std::cerr << "resolved config (defaults < file < flags):\n";
        for (const auto& [k, v] : cfg.values()) std::cerr << "  " << k << " = " << v << "\n";
    }
    return cfg;
}

DegradationOp task_default_operator(TaskKind task, const RunConfig& cfg, const Dims4& dims) {
    switch (task) {
        case TaskKind::Sr4x:
            return Downsample{uint32_t(cfg.get_int("operator.factor"))};
        case TaskKind::DeblurTemporal:
            return TemporalUniformBlur{cfg.get_int("operator.window")};
        case TaskKind::LowLightEnhance: {
            VideoTensor mask({1, dims.c, dims.h, dims.w},
                             float(cfg.get_double("operator.lowlight_mask")));
            return LowLight{cfg.get_double("operator.lowlight_f"), std::move(mask)};
        }
    }
    throw ConfigError("bad task");
}

int cmd_demo_data(const std::string& kind, const std::string& out, uint32_t frames,
                  uint32_t height, uint32_t width, uint64_t seed, const CommonOpts& common) {
    RunConfig cfg = resolve_config(common);
    std::filesystem::create_directories(out);
    const SyntheticClip clip = generate_synthetic(synthetic_from_name(kind), frames, height,
                                                  width, seed);
    save_raw(clip.clean, out + "/clean.vten");
    save_raw(clip.flow.data, out + "/flow.vten");
    export_frames(clip.clean, out + "/frames");

    const TaskKind task = cfg.task();
    const DegradationOp op = task_default_operator(task, cfg, clip.clean.dims());
    VideoTensor degraded = apply_forward(op, clip.clean);
    degraded = add_measurement_noise(std::move(degraded), cfg.get_double("operator.noise_sigma"),
                                     seed);
    save_raw(degraded, out + "/degraded.vten");
    std::cout << "wrote clean.vten, flow.vten, degraded.vten (" << task_name(task) << ") to "
              << out << "\n";
    return 0;
}

int cmd_degrade(const std::string& in, const std::string& out, const CommonOpts& common) {
    RunConfig cfg = resolve_config(common);
    const VideoTensor x = load_raw(in);
    const DegradationOp op = cfg.make_operator(x.dims());
    VideoTensor y = apply_forward(op, x);
    y = add_measurement_noise(std::move(y), cfg.get_double("operator.noise_sigma"),
                              cfg.get_u64("seed"));
    save_raw(y, out);
    std::cout << "applied " << op_name(op) << ": " << x.dims().str() << " -> " << y.dims().str()
              << "\n";
    return 0;
}

int cmd_restore(const std::string& input, const std::string& out_dir, const std::string& gt_path,
                const std::string& flow_path, bool fixed_ratios, bool no_postprocess,
                const CommonOpts& common) {
    RunConfig cfg = resolve_config(common);
    if (fixed_ratios) cfg.set("search.fixed_mode", "true");
    if (no_postprocess) cfg.set("postprocess.enabled", "false");

    TaskSpec spec;
    spec.task = cfg.task();
    spec.degraded = load_raw(input);
    // the forward operator follows the task; lowlight's (f, M) are fitted
    // during sampling so its entry is a placeholder
    spec.op = task_default_operator(spec.task, cfg, spec.degraded.dims());
    if (!gt_path.empty()) spec.ground_truth = load_raw(gt_path);
    if (!flow_path.empty()) spec.flow = FlowField(load_raw(flow_path));

    const RestorationResult result = run_restoration(spec, cfg.pipeline_config());

    std::filesystem::create_directories(out_dir);
    save_raw(result.video, out_dir + "/restored.vten");
    write_report_json(result.report, cfg, out_dir + "/report.json");
    write_lambda_trace(result.report, out_dir + "/lambda_trace.csv");
    write_candidates(result.report, out_dir + "/candidates.csv");
    export_frames(result.video, out_dir + "/frames");

    std::cout << "restored " << result.video.dims().str() << " -> " << out_dir << "\n";
    if (result.report.psnr_db) std::cout << "psnr " << fmt(*result.report.psnr_db) << "\n";
    if (result.report.warp_error)
        std::cout << "warp_error " << fmt(*result.report.warp_error) << "\n";
    return 0;
}

int cmd_evaluate(const std::string& a_path, const std::string& b_path,
                 const std::string& flow_path) {
    const VideoTensor a = load_raw(a_path);
    const VideoTensor b = load_raw(b_path);
    std::optional<FlowField> flow;
    if (!flow_path.empty()) flow = FlowField(load_raw(flow_path));

    std::ostringstream header, row;
    header << "psnr,ssim,sharpness";
    row << fmt(psnr(a, b)) << "," << fmt(ssim(a, b)) << "," << fmt(sharpness_proxy(a));
    if (flow) {
        header << ",warp_error";
        row << "," << fmt(warping_error(a, *flow));
    }
    std::cout << header.str() << "\n" << row.str() << "\n";
    return 0;
}

std::vector<double> parse_list(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    if (out.empty()) throw ConfigError("empty list: " + csv);
    return out;
}

int cmd_ablate(const std::string& input, const std::string& out_path, const std::string& gt_path,
               const std::string& flow_path, const std::string& grid_m_csv,
               const std::string& grid_r_csv, const CommonOpts& common) {
    RunConfig base = resolve_config(common);

    TaskSpec spec;
    spec.task = base.task();
    spec.degraded = load_raw(input);
    spec.op = task_default_operator(spec.task, base, spec.degraded.dims());
    if (!gt_path.empty()) spec.ground_truth = load_raw(gt_path);
    if (!flow_path.empty()) spec.flow = FlowField(load_raw(flow_path));

    const std::vector<double> grid_m = parse_list(grid_m_csv);
    const std::vector<double> grid_r = parse_list(grid_r_csv);

    std::ostringstream csv;
    csv << "strategy,m,r,psnr,ssim,quality,warp_error\n";
    const auto emit = [&](const std::string& strategy, const std::string& m, const std::string& r,
                          const RunReport& rep) {
        csv << strategy << "," << m << "," << r << ","
            << (rep.psnr_db ? fmt(*rep.psnr_db) : "") << ","
            << (rep.ssim_score ? fmt(*rep.ssim_score) : "") << "," << fmt(rep.sharpness) << ","
            << (rep.warp_error ? fmt(*rep.warp_error) : "") << "\n";
    };

    for (double m : grid_m)
        for (double r : grid_r) {
            RunConfig cfg = base;
            cfg.set("search.m", std::to_string(int(m)));
            cfg.set("search.r0", fmt(r));
            cfg.set("search.fixed_mode", "false");
            const RestorationResult res = run_restoration(spec, cfg.pipeline_config());
            emit("cot", std::to_string(int(m)), fmt(r), res.report);
        }

    RunConfig fixed = base;
    fixed.set("search.fixed_mode", "true");
    const RestorationResult res = run_restoration(spec, fixed.pipeline_config());
    emit("fixed", "", "", res.report);

    std::cout << csv.str();
    if (!out_path.empty()) {
        std::ofstream os(out_path);
        if (!os) throw IoError("cannot write " + out_path);
        os << csv.str();
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"zero-shot video restoration with dual-branch diffusion sampling"};
    app.require_subcommand(1);

    CommonOpts common;

    // demo-data
    auto* demo = app.add_subcommand("demo-data", "generate a synthetic clip + flow + degraded");
    std::string demo_kind = "moving_square", demo_out;
    uint32_t demo_frames = 8, demo_h = 32, demo_w = 32;
    uint64_t demo_seed = 0;
    demo->add_option("--kind", demo_kind, "moving_square | ramp | static");
    demo->add_option("--out", demo_out, "output directory")->required();
    demo->add_option("--frames", demo_frames);
    demo->add_option("--height", demo_h);
    demo->add_option("--width", demo_w);
    demo->add_option("--seed", demo_seed);

    // degrade
    auto* degrade = app.add_subcommand("degrade", "apply a degradation operator to a .vten clip");
    std::string degrade_in, degrade_out;
    degrade->add_option("--in", degrade_in)->required();
    degrade->add_option("--out", degrade_out)->required();

    // restore
    auto* restore = app.add_subcommand("restore", "run the restoration pipeline");
    std::string restore_in, restore_out, restore_gt, restore_flow;
    bool fixed_ratios = false, no_postprocess = false;
    restore->add_option("--input", restore_in, "degraded .vten clip")->required();
    restore->add_option("--out", restore_out, "output directory")->required();
    restore->add_option("--gt", restore_gt, "ground truth .vten for metrics");
    restore->add_option("--flow", restore_flow, "ground truth flow .vten");
    restore->add_flag("--fixed-ratios", fixed_ratios, "fixed fusion ratios, no search");
    restore->add_flag("--no-postprocess", no_postprocess, "skip temporal strengthening");

    // evaluate
    auto* evaluate = app.add_subcommand("evaluate", "metrics between two .vten clips (CSV)");
    std::string eval_a, eval_b, eval_flow;
    evaluate->add_option("--a", eval_a, "clip under test")->required();
    evaluate->add_option("--b", eval_b, "reference clip")->required();
    evaluate->add_option("--flow", eval_flow, "flow .vten enables the warp error column");

    // ablate
    auto* ablate = app.add_subcommand("ablate", "sweep (M, r) search settings plus fixed ratios");
    std::string ab_in, ab_out, ab_gt, ab_flow, ab_m = "2,3,4", ab_r = "0.40,0.45,0.50";
    ablate->add_option("--input", ab_in)->required();
    ablate->add_option("--out", ab_out, "also write the CSV here");
    ablate->add_option("--gt", ab_gt);
    ablate->add_option("--flow", ab_flow);
    ablate->add_option("--grid-m", ab_m, "comma-separated M values");
    ablate->add_option("--grid-r", ab_r, "comma-separated r values");

    for (auto* sub : {demo, degrade, restore, evaluate, ablate}) {
        sub->add_option("--config", common.config_path, "config file (or $ZVR_CONFIG)");
        sub->add_option("--set", common.sets, "override a config key: --set key=value");
        sub->add_flag("--verbose", common.verbose, "print the resolved configuration");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (demo->parsed())
            return cmd_demo_data(demo_kind, demo_out, demo_frames, demo_h, demo_w, demo_seed,
                                 common);
        if (degrade->parsed()) return cmd_degrade(degrade_in, degrade_out, common);
        if (restore->parsed())
            return cmd_restore(restore_in, restore_out, restore_gt, restore_flow, fixed_ratios,
                               no_postprocess, common);
        if (evaluate->parsed()) return cmd_evaluate(eval_a, eval_b, eval_flow);
        if (ablate->parsed())
            return cmd_ablate(ab_in, ab_out, ab_gt, ab_flow, ab_m, ab_r, common);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const PipelineError& e) {
        std::cerr << "error: stage " << e.stage << " failed: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
