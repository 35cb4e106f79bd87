#include "zvr/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>

namespace zvr {

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::string strip_quotes(const std::string& s) {
    if (s.size() >= 2 && ((s.front() == '"' && s.back() == '"') ||
                          (s.front() == '\'' && s.back() == '\'')))
        return s.substr(1, s.size() - 2);
    return s;
}

}  // namespace

const std::vector<std::pair<std::string, std::string>>& RunConfig::known_keys() {
    static const std::vector<std::pair<std::string, std::string>> keys = {
        {"task", "sr4x"},
        {"seed", "0"},
        {"schedule.n_train", "1000"},
        {"schedule.beta_start", "0.0001"},
        {"schedule.beta_end", "0.02"},
        {"schedule.hetero_beta_start", "0.0001"},
        {"schedule.hetero_beta_end", "0.02"},
        {"schedule.steps", "50"},
        {"schedule.eta", "0"},
        {"codec2d.block", "2"},
        {"codec2d.keep_ratio", "1.0"},
        {"codec3d.block", "2"},
        {"codec3d.group", "2"},
        {"codec3d.keep_ratio", "1.0"},
        {"denoiser.prior", "gray"},
        {"denoiser.ir_prior_var", "1.0"},
        {"denoiser.video_prior_var", "1.0"},
        {"denoiser.homo_kappa", "0.5"},
        {"denoiser.homo_window", "3"},
        {"denoiser.hetero_kappa", "0.5"},
        {"denoiser.hetero_window", "3"},
        {"operator.kind", "downsample"},
        {"operator.factor", "4"},
        {"operator.radius", "2"},
        {"operator.sigma", "1.0"},
        {"operator.window", "5"},
        {"operator.noise_sigma", "0"},
        {"operator.lowlight_f", "0.3"},
        {"operator.lowlight_mask", "0.05"},
        {"guidance.gamma1", "0.1"},
        {"guidance.step_size", "1.0"},
        {"guidance.steps_per_t", "1"},
        {"guidance.grad_mode", "analytic"},
        {"guidance.analytic_fallback", "true"},
        {"lowlight.lr", "0.0002"},
        {"lowlight.iters", "200"},
        {"search.m", "4"},
        {"search.r0", "0.45"},
        {"search.every_k", "10"},
        {"search.lambda_f1", "0.1"},
        {"search.lambda_f2", "0.01"},
        {"search.lambda_f", "0.5"},
        {"search.fixed_mode", "false"},
        {"search.clamp", "true"},
        {"fusion.enabled", "true"},
        {"postprocess.enabled", "true"},
        {"postprocess.steps", "25"},
        {"postprocess.rho", "0.15"},
        {"postprocess.clip_len", "8"},
        {"postprocess.sigma_min", "0.002"},
        {"postprocess.sigma_max", "0.05"},
        {"postprocess.sigma_data", "0.5"},
        {"postprocess.uniform_indices", "false"},
    };
    return keys;
}

RunConfig::RunConfig() {
    for (const auto& [key, value] : known_keys()) values_[key] = value;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key: " + key);
    it->second = strip_quotes(trim(value));
}

void RunConfig::load_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config file: " + path);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(path + ":" + std::to_string(lineno) + ": bad section header");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (!section.empty()) key = section + "." + key;
        try {
            set(key, line.substr(eq + 1));
        } catch (const ConfigError& e) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": " + e.what());
        }
    }
}

const std::string& RunConfig::get(const std::string& key) const {
    auto it = values_.find(key);
    if (it == values_.end()) throw ConfigError("unknown config key: " + key);
    return it->second;
}

double RunConfig::get_double(const std::string& key) const {
    const std::string& v = get(key);
    char* end = nullptr;
    const double d = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError(key + ": expected a number, got '" + v + "'");
    return d;
}

int RunConfig::get_int(const std::string& key) const {
    const double d = get_double(key);
    const int i = int(d);
    if (double(i) != d) throw ConfigError(key + ": expected an integer");
    return i;
}

uint64_t RunConfig::get_u64(const std::string& key) const {
    const std::string& v = get(key);
    char* end = nullptr;
    const unsigned long long u = std::strtoull(v.c_str(), &end, 10);
    if (end == v.c_str() || *end != '\0')
        throw ConfigError(key + ": expected an unsigned integer, got '" + v + "'");
    return uint64_t(u);
}

bool RunConfig::get_bool(const std::string& key) const {
    const std::string& v = get(key);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + ": expected true/false, got '" + v + "'");
}

TaskKind RunConfig::task() const { return task_from_name(get("task")); }

DegradationOp RunConfig::make_operator(const Dims4& video_dims) const {
    const std::string& kind = get("operator.kind");
    if (kind == "downsample") return Downsample{uint32_t(get_int("operator.factor"))};
    if (kind == "gaussian_blur")
        return GaussianBlur{get_int("operator.radius"), get_double("operator.sigma")};
    if (kind == "temporal_blur") return TemporalUniformBlur{get_int("operator.window")};
    if (kind == "lowlight") {
        VideoTensor mask({1, video_dims.c, video_dims.h, video_dims.w},
                         float(get_double("operator.lowlight_mask")));
        return LowLight{get_double("operator.lowlight_f"), std::move(mask)};
    }
    throw ConfigError("unknown operator.kind: " + kind);
}

PipelineConfig RunConfig::pipeline_config() const {
    PipelineConfig p;
    p.n_train = get_int("schedule.n_train");
    p.beta_start = get_double("schedule.beta_start");
    p.beta_end = get_double("schedule.beta_end");
    p.hetero_beta_start = get_double("schedule.hetero_beta_start");
    p.hetero_beta_end = get_double("schedule.hetero_beta_end");
    p.ddim_steps = get_int("schedule.steps");
    p.eta = get_double("schedule.eta");
    p.codec2d_block = uint32_t(get_int("codec2d.block"));
    p.codec2d_keep = get_double("codec2d.keep_ratio");
    p.codec3d_block = uint32_t(get_int("codec3d.block"));
    p.codec3d_group = uint32_t(get_int("codec3d.group"));
    p.codec3d_keep = get_double("codec3d.keep_ratio");
    const std::string& prior = get("denoiser.prior");
    if (prior == "gray")
        p.prior = PriorKind::Gray;
    else if (prior == "observation")
        p.prior = PriorKind::Observation;
    else
        throw ConfigError("denoiser.prior must be gray or observation");
    p.ir_prior_var = get_double("denoiser.ir_prior_var");
    p.video_prior_var = get_double("denoiser.video_prior_var");
    p.homo_kappa = get_double("denoiser.homo_kappa");
    p.homo_window = get_int("denoiser.homo_window");
    p.hetero_kappa = get_double("denoiser.hetero_kappa");
    p.hetero_window = get_int("denoiser.hetero_window");
    p.guidance.gamma1 = get_double("guidance.gamma1");
    p.guidance.step_size = get_double("guidance.step_size");
    p.guidance.steps_per_t = get_int("guidance.steps_per_t");
    const std::string& gm = get("guidance.grad_mode");
    if (gm == "analytic")
        p.guidance.grad_mode = GradMode::Analytic;
    else if (gm == "finite_diff")
        p.guidance.grad_mode = GradMode::FiniteDiff;
    else
        throw ConfigError("guidance.grad_mode must be analytic or finite_diff");
    p.guidance.analytic_fallback = get_bool("guidance.analytic_fallback");
    p.lowlight_lr = get_double("lowlight.lr");
    p.lowlight_iters = get_int("lowlight.iters");
    p.search.m = get_int("search.m");
    p.search.r0 = get_double("search.r0");
    p.search.every_k = get_int("search.every_k");
    p.search.initial_centers = {get_double("search.lambda_f1"), get_double("search.lambda_f2"),
                                get_double("search.lambda_f")};
    p.search.fixed_mode = get_bool("search.fixed_mode");
    p.search.clamp = get_bool("search.clamp");
    p.fusion_enabled = get_bool("fusion.enabled");
    p.postprocess_enabled = get_bool("postprocess.enabled");
    p.edm_steps = get_int("postprocess.steps");
    p.postprocess_rho = get_double("postprocess.rho");
    p.clip_len = get_int("postprocess.clip_len");
    p.edm_sigma_min = get_double("postprocess.sigma_min");
    p.edm_sigma_max = get_double("postprocess.sigma_max");
    p.edm_sigma_data = get_double("postprocess.sigma_data");
    p.edm_uniform_indices = get_bool("postprocess.uniform_indices");
    p.seed = get_u64("seed");

    if (p.search.m < 0) throw ConfigError("search.m must be >= 0");
    if (!(p.search.r0 > 0.0)) throw ConfigError("search.r0 must be > 0");
    if (p.search.every_k < 1) throw ConfigError("search.every_k must be >= 1");
    return p;
}

}  // namespace zvr
