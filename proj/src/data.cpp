#include "futuresight/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace futuresight {

using nlohmann::json;

void SynthConfig::validate() const {
    if (n_sequences < 1 || seq_len < 1 || dim < 1)
        throw std::invalid_argument("SynthConfig: n_sequences, seq_len, dim must be >= 1");
    if (n_modes < 1) throw std::invalid_argument("SynthConfig: n_modes must be >= 1");
    if (noise_sigma < 0.0) throw std::invalid_argument("SynthConfig: noise_sigma < 0");
    if (!mode_probs.empty()) {
        if (static_cast<int>(mode_probs.size()) != n_modes)
            throw std::invalid_argument("SynthConfig: mode_probs size != n_modes");
        double sum = 0.0;
        for (double p : mode_probs) {
            if (p < 0.0) throw std::invalid_argument("SynthConfig: negative mode probability");
            sum += p;
        }
        if (std::fabs(sum - 1.0) > 1e-9)
            throw std::invalid_argument("SynthConfig: mode_probs must sum to 1");
    }
}

Vec SynthGroundTruth::mode_output(int mode, const Vec& x) const {
    const AffineMode& m = modes.at(static_cast<size_t>(mode - 1));
    Vec y = matvec(m.a, x);
    for (size_t i = 0; i < y.size(); ++i) y[i] += m.b[i];
    return y;
}

Vec SynthGroundTruth::mean_mode_output(const Vec& x) const {
    Vec mean(x.size(), 0.0);
    for (size_t m = 0; m < modes.size(); ++m) {
        Vec y = mode_output(static_cast<int>(m) + 1, x);
        for (size_t i = 0; i < y.size(); ++i) mean[i] += y[i] / static_cast<double>(modes.size());
    }
    return mean;
}

namespace {

double frobenius_diff(const Mat& a, const Mat& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.a.size(); ++i) {
        double d = a.a[i] - b.a[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Contractive affine maps with well-separated offsets. The separation is
// chosen so the pairwise output distance on unit-norm inputs is at least
// 10 * noise_sigma.
std::vector<AffineMode> build_modes(const SynthConfig& cfg, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int d = cfg.dim;
    std::vector<AffineMode> modes(cfg.n_modes);
    const double perturb = 0.08 / std::sqrt(static_cast<double>(d));
    for (AffineMode& m : modes) {
        m.a = Mat(d, d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) m.a(i, j) = (i == j ? 0.45 : 0.0) + perturb * gauss(rng);
        m.b.assign(d, 0.0);
    }
    if (cfg.n_modes == 1) return modes;

    // Offset directions: unit vectors, retried for mutual separation.
    std::vector<Vec> dirs;
    for (int m = 0; m < cfg.n_modes; ++m) {
        Vec best;
        double best_worst_dot = 2.0;
        for (int attempt = 0; attempt < 64; ++attempt) {
            Vec u(d);
            double norm = 0.0;
            for (double& v : u) {
                v = gauss(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
            for (double& v : u) v /= norm;
            double worst = -2.0;
            for (const Vec& prev : dirs) worst = std::max(worst, dot(u, prev));
            if (worst < best_worst_dot) {
                best_worst_dot = worst;
                best = u;
            }
            if (best_worst_dot < 0.3) break;
        }
        dirs.push_back(best);
    }

    double min_dir_dist = 2.0;
    double max_a_diff = 0.0;
    for (int i = 0; i < cfg.n_modes; ++i) {
        for (int j = i + 1; j < cfg.n_modes; ++j) {
            Vec diff(d);
            for (int k = 0; k < d; ++k) diff[k] = dirs[i][k] - dirs[j][k];
            min_dir_dist = std::min(min_dir_dist, std::sqrt(dot(diff, diff)));
            max_a_diff = std::max(max_a_diff, frobenius_diff(modes[i].a, modes[j].a));
        }
    }
    const double radius =
        std::max(2.5, (10.0 * cfg.noise_sigma + max_a_diff + 0.5) / std::max(min_dir_dist, 1e-6));
    for (int m = 0; m < cfg.n_modes; ++m)
        for (int k = 0; k < d; ++k) modes[m].b[k] = radius * dirs[m][k];
    return modes;
}

}  // namespace

std::pair<std::vector<FeatureSequence>, SynthGroundTruth> generate_synthetic(
    const SynthConfig& cfg) {
    cfg.validate();
    SynthGroundTruth truth;
    std::mt19937_64 mode_rng(derive_seed(cfg.seed, 1));
    truth.modes = build_modes(cfg, mode_rng);

    std::vector<double> probs = cfg.mode_probs;
    if (probs.empty()) probs.assign(cfg.n_modes, 1.0 / cfg.n_modes);

    std::vector<FeatureSequence> seqs;
    seqs.reserve(cfg.n_sequences);
    for (int s = 0; s < cfg.n_sequences; ++s) {
        std::mt19937_64 rng(derive_seed(cfg.seed, 2, static_cast<uint64_t>(s)));
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::discrete_distribution<int> pick_mode(probs.begin(), probs.end());

        FeatureSequence seq;
        {
            std::ostringstream name;
            name << "synth-" << s;
            seq.video_id = name.str();
        }
        Vec x(cfg.dim);
        for (double& v : x) v = gauss(rng);
        seq.frames.push_back({0, x, {}});
        for (int t = 0; t + 1 < cfg.seq_len; ++t) {
            const int m = pick_mode(rng) + 1;
            Vec next = truth.mode_output(m, x);
            for (double& v : next) v += cfg.noise_sigma * gauss(rng);
            truth.transition_mode[{seq.video_id, t}] = m;
            seq.frames.push_back({t + 1, next, {"mode-" + std::to_string(m)}});
            x = std::move(next);
        }
        seqs.push_back(std::move(seq));
    }
    return {std::move(seqs), std::move(truth)};
}

std::vector<FeatureSequence> load_sequences(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open feature file: " + path);

    std::vector<FeatureSequence> seqs;
    std::map<std::string, size_t> index;
    std::set<SampleKey> seen;
    int dim = -1;
    std::string line;
    for (int line_no = 1; std::getline(in, line); ++line_no) {
        if (line.empty()) continue;
        json j;
        try {
            j = json::parse(line);
        } catch (const json::exception& e) {
            throw std::runtime_error("feature file " + path + " line " + std::to_string(line_no) +
                                     ": " + e.what());
        }
        auto fail = [&](const std::string& msg) {
            throw std::runtime_error("feature file " + path + " line " + std::to_string(line_no) +
                                     ": " + msg);
        };
        if (!j.is_object() || !j.contains("video") || !j.contains("t") || !j.contains("feat"))
            fail("expected object with video, t, feat");
        if (!j["video"].is_string() || !j["t"].is_number_integer() || !j["feat"].is_array())
            fail("wrong field types");
        Frame f;
        f.t = j["t"].get<int64_t>();
        f.feat = j["feat"].get<Vec>();
        for (double v : f.feat)
            if (!std::isfinite(v)) fail("non-finite feature value");
        if (dim < 0) dim = static_cast<int>(f.feat.size());
        if (static_cast<int>(f.feat.size()) != dim)
            fail("feature length " + std::to_string(f.feat.size()) + " but dataset dimension is " +
                 std::to_string(dim));
        if (j.contains("labels")) {
            if (!j["labels"].is_array()) fail("labels must be an array of strings");
            f.labels = j["labels"].get<std::vector<std::string>>();
        }
        const std::string video = j["video"].get<std::string>();
        if (!seen.insert({video, f.t}).second)
            fail("duplicate frame (" + video + ", " + std::to_string(f.t) + ")");
        auto it = index.find(video);
        if (it == index.end()) {
            index.emplace(video, seqs.size());
            seqs.push_back({video, {}});
            it = index.find(video);
        }
        seqs[it->second].frames.push_back(std::move(f));
    }
    for (FeatureSequence& s : seqs)
        std::sort(s.frames.begin(), s.frames.end(),
                  [](const Frame& a, const Frame& b) { return a.t < b.t; });
    return seqs;
}

void save_sequences(const std::string& path, const std::vector<FeatureSequence>& seqs) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write feature file: " + path);
    for (const FeatureSequence& s : seqs) {
        for (const Frame& f : s.frames) {
            json j;
            j["video"] = s.video_id;
            j["t"] = f.t;
            j["feat"] = f.feat;
            if (!f.labels.empty()) j["labels"] = f.labels;
            out << j.dump() << "\n";
        }
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<FramePair> make_pairs(const std::vector<FeatureSequence>& seqs, int delta) {
    if (delta < 1) throw std::invalid_argument("make_pairs: delta must be >= 1");
    std::vector<FramePair> pairs;
    for (const FeatureSequence& s : seqs) {
        std::map<int64_t, size_t> by_t;
        for (size_t i = 0; i < s.frames.size(); ++i) by_t[s.frames[i].t] = i;
        for (const Frame& f : s.frames) {
            auto it = by_t.find(f.t + delta);
            if (it == by_t.end()) continue;
            const Frame& future = s.frames[it->second];
            FramePair p;
            p.input = f.feat;
            p.target = future.feat;
            p.video_id = s.video_id;
            p.t = f.t;
            p.delta = delta;
            p.future_labels = future.labels;
            for (const std::string& lab : future.labels) {
                if (lab.rfind("mode-", 0) == 0) {
                    try {
                        p.true_mode = std::stoi(lab.substr(5));
                    } catch (const std::exception&) {
                    }
                }
            }
            pairs.push_back(std::move(p));
        }
    }
    return pairs;
}

std::pair<std::vector<FeatureSequence>, std::vector<FeatureSequence>> split_dataset(
    const std::vector<FeatureSequence>& seqs, double train_fraction, uint64_t seed) {
    if (train_fraction <= 0.0 || train_fraction >= 1.0)
        throw std::invalid_argument("split_dataset: train_fraction must be in (0,1)");
    if (seqs.size() < 2) throw std::invalid_argument("split_dataset: need at least 2 videos");

    std::vector<size_t> order(seqs.size());
    std::iota(order.begin(), order.end(), 0);
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);

    const size_t n_test =
        static_cast<size_t>(std::floor((1.0 - train_fraction) * static_cast<double>(seqs.size())));
    std::set<size_t> test_idx(order.begin(), order.begin() + n_test);

    std::pair<std::vector<FeatureSequence>, std::vector<FeatureSequence>> out;
    for (size_t i = 0; i < seqs.size(); ++i) {
        if (test_idx.count(i))
            out.second.push_back(seqs[i]);
        else
            out.first.push_back(seqs[i]);
    }
    return out;
}

}  // namespace futuresight
