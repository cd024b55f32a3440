#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "futuresight/linalg.hpp"

namespace futuresight {

struct Frame {
    int64_t t = 0;
    Vec feat;
    std::vector<std::string> labels;
};

struct FeatureSequence {
    std::string video_id;
    std::vector<Frame> frames;  // strictly increasing t
};

// One supervision pair: observation at time t, representation at t+delta.
struct FramePair {
    Vec input;
    Vec target;
    std::string video_id;
    int64_t t = 0;
    int delta = 1;
    std::vector<std::string> future_labels;
    int true_mode = 0;  // 1..M on synthetic data, 0 when unknown
};

using SampleKey = std::pair<std::string, int64_t>;

inline SampleKey sample_key(const FramePair& p) { return {p.video_id, p.t}; }

struct SynthConfig {
    int n_sequences = 100;
    int seq_len = 20;
    int dim = 8;
    int n_modes = 2;
    double noise_sigma = 0.05;
    std::vector<double> mode_probs;  // empty = uniform
    uint64_t seed = 0;

    void validate() const;
};

struct AffineMode {
    Mat a;
    Vec b;
};

// Generator-side truth: the affine maps and the mode of every transition.
struct SynthGroundTruth {
    std::vector<AffineMode> modes;
    // (video_id, t) -> mode of the transition t -> t+1
    std::map<SampleKey, int> transition_mode;

    Vec mode_output(int mode, const Vec& x) const;  // mode is 1-based
    // Average of the per-mode outputs; the best single prediction under
    // equiprobable modes.
    Vec mean_mode_output(const Vec& x) const;
};

std::pair<std::vector<FeatureSequence>, SynthGroundTruth> generate_synthetic(
    const SynthConfig& cfg);

// JSON-lines: {"video": str, "t": int, "feat": [..], "labels": [..]?}
std::vector<FeatureSequence> load_sequences(const std::string& path);
void save_sequences(const std::string& path, const std::vector<FeatureSequence>& seqs);

std::vector<FramePair> make_pairs(const std::vector<FeatureSequence>& seqs, int delta);

std::pair<std::vector<FeatureSequence>, std::vector<FeatureSequence>> split_dataset(
    const std::vector<FeatureSequence>& seqs, double train_fraction, uint64_t seed);

}  // namespace futuresight
