#ifndef ZVR_RATIO_SEARCH_HPP
#define ZVR_RATIO_SEARCH_HPP

#include <array>
#include <functional>
#include <vector>

#include "zvr/fusion.hpp"
#include "zvr/tensor.hpp"

namespace zvr {

struct SearchConfig {
    int m = 4;            // candidates per search = m + 1
    double r0 = 0.45;     // initial radius, halved after each search event
    int every_k = 10;     // events happen when (step index % every_k) == 0
    std::array<double, 3> initial_centers{0.1, 0.01, 0.5};  // lambda_f1, f2, f at t = T
    bool clamp = true;    // clamp candidates to [0,1]
    bool fixed_mode = false;  // hold the initial centers at every timestep
};

// Per-video reward: quality is higher-better, temporal error lower-better.
class RewardModel {
public:
    virtual ~RewardModel() = default;
    virtual std::pair<double, double> score(const VideoTensor& video,
                                            const FlowField* flow) const = 0;
};

// Default reward: sharpness proxy + warping error (zero temporal error when no
// flow is available).
class SharpnessWarpReward : public RewardModel {
public:
    std::pair<double, double> score(const VideoTensor& video,
                                    const FlowField* flow) const override;
};

struct CandidateReport {
    double lambda = 0.0;
    double quality = 0.0;
    double temporal_err = 0.0;
    int rank_q = 0;
    int rank_we = 0;
    int rank_sum = 0;
    bool chosen = false;
};

// m + 1 evenly spaced values over [center - r, center + r], endpoints included
// (spacing 2r/m); optionally clamped to [0,1], duplicates retained. m = 0
// yields just the center.
std::vector<double> sample_candidates(double center, double r, int m, bool clamp);

// Ordinal ranks: rank_q by descending quality, rank_we by ascending temporal
// error, ties and rank-sum ties broken by lower index. Returns the index with
// the lowest rank_q + rank_we and fills the rank fields.
size_t rank_and_select(std::vector<CandidateReport>& reports);

struct SearchResult {
    double lambda = 0.0;
    std::vector<CandidateReport> reports;
};

// Best-of-(m+1) selection for one fusion weight: fuse per candidate, turn the
// fused latent into a decoded video, score, rank, select.
SearchResult search_ratio(const std::function<VideoTensor(double)>& fuse_candidate,
                          const std::function<VideoTensor(const VideoTensor&)>& latent_to_video,
                          const RewardModel& reward, const FlowField* flow, double center,
                          double radius, const SearchConfig& cfg);

struct SearchEventResult {
    FusionRatios ratios;
    std::array<double, 3> centers{};
    double radius_next = 0.0;
    std::array<std::vector<CandidateReport>, 3> reports;  // f1, f2, f
};

// One search event: lambda_f1 first (homologous path), then lambda_f2
// (heterogeneous path), then lambda_f, each conditioned on the previously
// confirmed weights. Winners become the next centers; the radius halves after
// the event.
SearchEventResult run_search_step(const VideoTensor& z_ir, const VideoTensor& z_homo,
                                  const VideoTensor& z_hetero_to_image,
                                  const std::function<VideoTensor(const VideoTensor&)>& latent_to_video,
                                  const RewardModel& reward, const FlowField* flow,
                                  const std::array<double, 3>& centers, double radius,
                                  const SearchConfig& cfg);

}  // namespace zvr

#endif
