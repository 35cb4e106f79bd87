#include "zvr/ratio_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "zvr/quality.hpp"

namespace zvr {

std::pair<double, double> SharpnessWarpReward::score(const VideoTensor& video,
                                                     const FlowField* flow) const {
    const double q = sharpness_proxy(video);
    const double we = flow != nullptr ? warping_error(video, *flow) : 0.0;
    return {q, we};
}

std::vector<double> sample_candidates(double center, double r, int m, bool clamp) {
    if (!(r > 0.0)) throw ValueError("sample_candidates: radius must be > 0");
    std::vector<double> out;
    if (m <= 0) {
        out.push_back(clamp ? std::clamp(center, 0.0, 1.0) : center);
        return out;
    }
    out.reserve(size_t(m) + 1);
    for (int i = 0; i <= m; ++i) {
        double v = center - r + 2.0 * r * double(i) / double(m);
        if (clamp) v = std::clamp(v, 0.0, 1.0);
        out.push_back(v);
    }
    return out;
}

namespace {

// ordinal ranks with lower-index tie-break; better = true orders descending
std::vector<int> ordinal_ranks(const std::vector<double>& values, bool descending) {
    std::vector<size_t> order(values.size());
    std::iota(order.begin(), order.end(), size_t(0));
    std::stable_sort(order.begin(), order.end(), [&](size_t a, size_t b) {
        if (values[a] != values[b]) return descending ? values[a] > values[b] : values[a] < values[b];
        return a < b;
    });
    std::vector<int> ranks(values.size());
    for (size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = int(pos);
    return ranks;
}

}  // namespace

size_t rank_and_select(std::vector<CandidateReport>& reports) {
    if (reports.empty()) throw ValueError("rank_and_select: empty candidate list");
    std::vector<double> q(reports.size()), we(reports.size());
    for (size_t i = 0; i < reports.size(); ++i) {
        if (!std::isfinite(reports[i].quality) || !std::isfinite(reports[i].temporal_err))
            throw MetricError("rank_and_select: non-finite score at candidate " +
                              std::to_string(i));
        q[i] = reports[i].quality;
        we[i] = reports[i].temporal_err;
    }
    const std::vector<int> rank_q = ordinal_ranks(q, /*descending=*/true);
    const std::vector<int> rank_we = ordinal_ranks(we, /*descending=*/false);
    size_t best = 0;
    int best_sum = rank_q[0] + rank_we[0];
    for (size_t i = 0; i < reports.size(); ++i) {
        reports[i].rank_q = rank_q[i];
        reports[i].rank_we = rank_we[i];
        reports[i].rank_sum = rank_q[i] + rank_we[i];
        reports[i].chosen = false;
        if (reports[i].rank_sum < best_sum) {
            best_sum = reports[i].rank_sum;
            best = i;
        }
    }
    reports[best].chosen = true;
    return best;
}

SearchResult search_ratio(const std::function<VideoTensor(double)>& fuse_candidate,
                          const std::function<VideoTensor(const VideoTensor&)>& latent_to_video,
                          const RewardModel& reward, const FlowField* flow, double center,
                          double radius, const SearchConfig& cfg) {
    SearchResult result;
    const std::vector<double> candidates = sample_candidates(center, radius, cfg.m, cfg.clamp);
    result.reports.reserve(candidates.size());
    for (double lambda : candidates) {
        const VideoTensor fused = fuse_candidate(lambda);
        const VideoTensor video = latent_to_video(fused);
        const auto [quality, temporal_err] = reward.score(video, flow);
        CandidateReport rep;
        rep.lambda = lambda;
        rep.quality = quality;
        rep.temporal_err = temporal_err;
        result.reports.push_back(rep);
    }
    const size_t best = rank_and_select(result.reports);
    result.lambda = result.reports[best].lambda;
    return result;
}

SearchEventResult run_search_step(const VideoTensor& z_ir, const VideoTensor& z_homo,
                                  const VideoTensor& z_hetero_to_image,
                                  const std::function<VideoTensor(const VideoTensor&)>& latent_to_video,
                                  const RewardModel& reward, const FlowField* flow,
                                  const std::array<double, 3>& centers, double radius,
                                  const SearchConfig& cfg) {
    SearchEventResult ev;

    SearchResult f1 = search_ratio(
        [&](double l) { return fuse_homologous(z_ir, z_homo, l); }, latent_to_video, reward,
        flow, centers[0], radius, cfg);
    ev.reports[0] = std::move(f1.reports);
    const VideoTensor z_f1 = fuse_homologous(z_ir, z_homo, f1.lambda);

    SearchResult f2 = search_ratio(
        [&](double l) { return lerp(z_ir, z_hetero_to_image, l); }, latent_to_video, reward,
        flow, centers[1], radius, cfg);
    ev.reports[1] = std::move(f2.reports);
    const VideoTensor z_f2 = lerp(z_ir, z_hetero_to_image, f2.lambda);

    SearchResult ff = search_ratio(
        [&](double l) { return lerp(z_f1, z_f2, l); }, latent_to_video, reward, flow,
        centers[2], radius, cfg);
    ev.reports[2] = std::move(ff.reports);

    ev.ratios.lambda_f1 = f1.lambda;
    ev.ratios.lambda_f2 = f2.lambda;
    ev.ratios.lambda_f = ff.lambda;
    ev.centers = {f1.lambda, f2.lambda, ff.lambda};
    ev.radius_next = radius * 0.5;
    return ev;
}

}  // namespace zvr
