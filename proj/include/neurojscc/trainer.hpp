#pragma once

#include <optional>
#include <span>
#include <vector>

#include "neurojscc/channel.hpp"
#include "neurojscc/network.hpp"

namespace neurojscc {

/// Three-factor learning rule constants. kappa smooths both the learning
/// signal and the eligibility traces; kappa2 smooths the updates; alpha
/// averages the baseline statistics.
struct Hyperparams {
  double eta = 0.05;
  double kappa = 0.2;
  double kappa2 = 0.2;
  double alpha = 0.9;
  bool use_baseline = true;
  double epsilon = 1e-12;

  void validate() const;
};

/// Geometric smoothing of the summed per-step output loss:
/// l_t = kappa * l_{t-1} + (1 - kappa) * step_loss.
double learning_signal_update(double prev, double step_loss, double kappa);

/// e <- kappa * e + (1 - kappa) * grad, elementwise.
void eligibility_update(std::span<double> e, std::span<const double> grad, double kappa);

/// Running averages <e^2> and <l * e^2> with constant alpha.
void baseline_stats_update(std::span<double> e2_avg, std::span<double> le2_avg,
                           std::span<const double> e, double learning_signal, double alpha);

/// b = <l * e^2> / <e^2>, elementwise, 0 where <e^2> is 0.
void baseline_value(std::span<const double> le2_avg, std::span<const double> e2_avg,
                    std::span<double> b_out);

/// Stochastic neurons: delta <- kappa2 * delta + (1 - kappa2) * (l - b) * e.
void delta_update_stochastic(std::span<double> delta, double learning_signal,
                             std::span<const double> baseline, std::span<const double> e,
                             double kappa2);

/// Observed output neurons: delta = -e. The eligibility smooths
/// grad log p of the clamped targets, so -e is the loss gradient and the
/// shared descent step theta -= eta * delta applies to every neuron class.
void delta_update_observed(std::span<double> delta, std::span<const double> e);

/// theta -= eta * delta; throws DivergenceError on non-finite updates.
void apply_update(std::span<double> params, std::span<const double> delta, double eta,
                  long iteration = -1);

/// Per-neuron vectors shape-aligned with a model's parameters.
struct ModelTrainState {
  std::vector<std::vector<double>> eligibility;
  std::vector<std::vector<double>> e2_avg;
  std::vector<std::vector<double>> le2_avg;
  std::vector<std::vector<double>> delta;

  void resize_like(const SnnModel& model);
  void reset_fast();            // eligibility and delta
  void reset_baseline_stats();  // <e^2>, <l e^2>
};

struct TrainerState {
  double learning_signal = 0.0;
  ModelTrainState encoder;
  ModelTrainState decoder;
};

struct TrainOptions {
  bool reset_smoothing_per_example = true;
  bool carry_baseline_stats = true;
  /// When false (default) the decoder output neurons' self-feedback weights
  /// are excluded from updates: under clamped training that weight reads the
  /// targets themselves and turns the readout into a free-running attractor
  /// at inference.
  bool train_output_feedback = false;
};

/// Online end-to-end training of encoder + decoder through the channel.
/// One call to train_example runs the causal pipeline once over all steps,
/// updating the learning signal, eligibilities, baselines, smoothed updates
/// and parameters at every step. encoder == nullptr selects uncoded
/// transmission (x_t := u_t).
class JsccTrainer {
 public:
  JsccTrainer(SnnModel* encoder, SnnModel* decoder, const ChannelModel* channel, Hyperparams hp,
              TrainOptions options = {});

  /// Returns the per-step summed output losses.
  std::vector<double> train_example(const SpikeTensor& u, const SpikeTensor& v, Rng& rng,
                                    long iteration = -1);

  TrainerState& state() { return state_; }
  const Hyperparams& hyperparams() const { return hp_; }

 private:
  SnnModel* encoder_;
  SnnModel* decoder_;
  const ChannelModel* channel_;
  Hyperparams hp_;
  TrainOptions options_;
  TrainerState state_;

  void update_neuron(SnnModel& model, ModelTrainState& ms, int neuron, std::uint8_t spike,
                     double potential, bool observed, long iteration);
  std::vector<double> grad_buf_;
  std::vector<double> baseline_buf_;
};

/// A realized end-to-end trajectory at fixed parameters.
struct Trajectory {
  SpikeTensor encoder_spikes;  // all encoder neurons (absent for uncoded)
  SpikeTensor channel_output;  // y
  SpikeTensor decoder_spikes;  // all decoder neurons, outputs clamped to v
  bool has_encoder = false;
};

/// Per-trajectory score-function update with no smoothing and no baseline:
/// stochastic neurons get total_loss * sum_t grad log p(s_t | o_t); observed
/// output neurons get -sum_t grad log p(v_t | o_t). Its expectation over
/// trajectories equals the exact gradient of the loss bound; the online rule
/// is the streaming approximation of this estimator.
struct TrajectoryUpdate {
  std::vector<std::vector<double>> encoder;  // per neuron (empty if uncoded)
  std::vector<std::vector<double>> decoder;
  double total_loss = 0.0;
};
/// Resets and replays through the models' trace state.
TrajectoryUpdate reinforce_trajectory_update(SnnModel* encoder, SnnModel& decoder,
                                             const SpikeTensor& u, const Trajectory& traj);

/// Draw one training-mode trajectory (decoder outputs clamped to v) at the
/// current parameters.
Trajectory sample_trajectory(SnnModel* encoder, SnnModel& decoder, const ChannelModel& channel,
                             const SpikeTensor& u, const SpikeTensor& v, Rng& rng);

}  // namespace neurojscc
