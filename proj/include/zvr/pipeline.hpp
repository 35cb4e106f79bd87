#ifndef ZVR_PIPELINE_HPP
#define ZVR_PIPELINE_HPP

#include <optional>
#include <string>
#include <vector>

#include "zvr/codec.hpp"
#include "zvr/degradation.hpp"
#include "zvr/denoiser.hpp"
#include "zvr/fusion.hpp"
#include "zvr/guidance.hpp"
#include "zvr/postprocess.hpp"
#include "zvr/ratio_search.hpp"
#include "zvr/schedule.hpp"
#include "zvr/tensor.hpp"

namespace zvr {

enum class TaskKind { Sr4x, DeblurTemporal, LowLightEnhance };

const char* task_name(TaskKind k);
TaskKind task_from_name(const std::string& name);

// prior mean of the toy gaussian denoisers
enum class PriorKind { Gray, Observation };

struct TaskSpec {
    TaskKind task = TaskKind::Sr4x;
    DegradationOp op = Downsample{4};
    VideoTensor degraded;
    std::optional<VideoTensor> ground_truth;
    std::optional<FlowField> flow;
};

struct PipelineConfig {
    // diffusion schedules (the heterogeneous branch may use its own betas but
    // shares n_train so grid indices stay aligned)
    int n_train = 1000;
    double beta_start = 1e-4;
    double beta_end = 0.02;
    double hetero_beta_start = 1e-4;
    double hetero_beta_end = 0.02;
    int ddim_steps = 50;
    double eta = 0.0;

    // codecs
    uint32_t codec2d_block = 2;
    double codec2d_keep = 1.0;
    uint32_t codec3d_block = 2;
    uint32_t codec3d_group = 2;
    double codec3d_keep = 1.0;

    // toy denoisers
    PriorKind prior = PriorKind::Gray;
    double ir_prior_var = 1.0;
    double video_prior_var = 1.0;
    double homo_kappa = 0.5;
    int homo_window = 3;
    double hetero_kappa = 0.5;
    int hetero_window = 3;

    GuidanceConfig guidance;

    // degradation-parameter fit for the low-light task
    double lowlight_lr = 2e-4;
    int lowlight_iters = 200;

    SearchConfig search;
    bool fusion_enabled = true;  // false runs the single-branch baseline

    bool postprocess_enabled = true;
    double edm_sigma_min = 0.002;
    double edm_sigma_max = 0.05;
    double edm_sigma_data = 0.5;
    int edm_steps = 25;
    double postprocess_rho = 0.15;
    int clip_len = 8;
    bool edm_uniform_indices = false;

    uint64_t seed = 0;
};

struct LambdaRow {
    int step = 0;
    int t = 0;
    FusionRatios ratios;
};

struct CandidateRow {
    int step = 0;
    int which_lambda = 0;  // 0 = f1, 1 = f2, 2 = f
    CandidateReport report;
};

struct RunReport {
    std::vector<LambdaRow> lambda_trace;
    std::vector<CandidateRow> candidates;
    std::optional<double> psnr_db;
    std::optional<double> ssim_score;
    std::optional<double> warp_error;
    double sharpness = 0.0;
    double data_fidelity = 0.0;  // ||y - A(xhat)||^2 before post-processing
    double lowlight_f = 0.0;     // fitted factor (low-light task only)
    bool postprocess_ran = false;
    uint64_t seed = 0;
    int64_t runtime_ms = 0;
};

struct RestorationResult {
    VideoTensor video;
    RunReport report;
};

RestorationResult run_restoration(const TaskSpec& spec, const PipelineConfig& cfg);

enum class SyntheticKind { MovingSquare, Ramp, Static };

SyntheticKind synthetic_from_name(const std::string& name);

struct SyntheticClip {
    VideoTensor clean;
    FlowField flow;
};

// Deterministic fixture clips with exact ground-truth flow. moving_square
// translates a colored square one pixel per frame (bouncing off borders);
// ramp is a static spatial gradient; static repeats a seeded random frame.
SyntheticClip generate_synthetic(SyntheticKind kind, uint32_t t, uint32_t h, uint32_t w,
                                 uint64_t seed);

// replication upsample / identity used to seed the heterogeneous branch
VideoTensor initial_estimate(const DegradationOp& op, const VideoTensor& degraded);

}  // namespace zvr

#endif
