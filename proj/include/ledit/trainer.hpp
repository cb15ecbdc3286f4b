#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "ledit/checkpoint.hpp"
#include "ledit/corpus.hpp"
#include "ledit/diffusion.hpp"
#include "ledit/epsnet.hpp"
#include "ledit/losses.hpp"
#include "ledit/promptaug.hpp"

namespace ledit {

enum class TrainMode { Baseline, Cl, SoftCl, SoftClSoftPa };

std::string to_string(TrainMode mode);
TrainMode train_mode_from_string(const std::string& s);

struct TrainConfig {
    int steps = 2000;
    double lr = 1e-3;
    int batch_size = 1;
    int n_prompts = 3;
    int image_size = 64;
    float threshold_frac = 0.4f;
    LossWeights weights;
    TrainMode mode = TrainMode::Cl;
    uint64_t master_seed = 1;

    int T = 256;
    double beta_start = 1e-4;
    double beta_end = 2e-2;
    int d_text = 64;
    int base_channels = 8;
    int time_dim = 16;
    int max_prompt_len = 32;
    int checkpoint_every = 0; // 0 = final checkpoint only

    // Desk preset: CPU-minutes scale. Paper preset: the published training
    // constants (20k steps, lr 1e-5).
    static TrainConfig desk();
    static TrainConfig paper();

    void validate() const;
};

struct TrainLogEntry {
    int64_t step = 0;
    LossBreakdown losses;
    double mask_coverage = 0.0;
    double wall_ms = 0.0;
    bool skipped = false;
    std::string skip_reason;

    nlohmann::json to_json() const;
};

// Per-step rng streams derived statelessly from (master_seed, step):
// augmentation draws live in their own stream so that baseline and alpha=0
// runs consume identical timestep/noise sequences.
struct StepRngs {
    Rng timestep;
    Rng noise;
    Rng augment;
    static StepRngs at(uint64_t master_seed, int64_t step);
};

// Owns the model, the conditioning encoder, the frozen reference embedder,
// and the optimizer state. Single-writer: no concurrent train_step calls.
class TrainState {
public:
    TrainState(const TrainConfig& config, const Lexicon& lexicon);

    const TrainConfig& config() const { return config_; }
    const NoiseSchedule& schedule() const { return sched_; }
    const Lexicon& lexicon() const { return *lexicon_; }
    const ReferenceEmbedder& reference_embedder() const { return *ref_; }
    ConditioningEncoder& encoder() { return *encoder_; }
    const ConditioningEncoder& encoder() const { return *encoder_; }
    ConvEpsilonNet& net() { return *net_; }
    const ConvEpsilonNet& net() const { return *net_; }
    int64_t step() const { return step_; }

    std::vector<ParamRef> parameters(); // net + encoder tables

    Checkpoint to_checkpoint();
    // Restores parameters, optimizer state and step counter. The config in
    // the header must agree with this state's architecture.
    void restore(const Checkpoint& ckpt);

    friend TrainLogEntry train_step(TrainState&, const ImageCaptionRecord&, const StepRngs&);

private:
    void adam_update(const Grads& grads);

    TrainConfig config_;
    NoiseSchedule sched_;
    std::unique_ptr<Lexicon> lexicon_;
    std::unique_ptr<ReferenceEmbedder> ref_;
    std::unique_ptr<ConditioningEncoder> encoder_;
    std::unique_ptr<ConvEpsilonNet> net_;
    std::vector<std::vector<float>> adam_m_, adam_v_;
    int64_t step_ = 0;
};

// One full pipeline step: corrupt, N predictions, mask, losses, update.
// Augmentation-unavailable records are skipped (logged), not fatal.
TrainLogEntry train_step(TrainState& state, const ImageCaptionRecord& record,
                         const StepRngs& rngs);

using LogSink = std::function<void(const TrainLogEntry&)>;

struct TrainRunResult {
    std::string checkpoint_dir;
    int64_t steps_run = 0;
    int64_t skipped = 0;
};

// Runs config.steps steps over the corpus (records picked per-step from the
// record stream), writing checkpoints under checkpoint_dir. Resumable: a
// state restored from a checkpoint continues identically.
TrainRunResult train_run(TrainState& state, const std::vector<ImageCaptionRecord>& corpus,
                         const LogSink& sink, const std::string& checkpoint_dir);

} // namespace ledit
