// Copyright 2026 The embaudit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Small fully connected networks trained with momentum SGD on binary
// cross-entropy. Used as the attack model of the learned baselines.

#ifndef EMBAUDIT_ATTACK_NET_H_
#define EMBAUDIT_ATTACK_NET_H_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/string_view.h"
#include "embaudit/decision.h"
#include "embaudit/emb_data.h"
#include "embaudit/random.h"

namespace embaudit {

enum class Activation { kRelu, kTanh };

absl::string_view ActivationName(Activation activation);
absl::StatusOr<Activation> ParseActivation(absl::string_view name);

struct MlpSpec {
  // input, hidden..., output.
  std::vector<size_t> layer_widths;
  Activation activation = Activation::kRelu;
  size_t epochs = 200;
  size_t batch_size = 128;
  double learning_rate = 1e-3;
  double momentum = 0.9;
  uint64_t seed = 0;
};

// Checks widths (>= 2 entries, all positive) and optimizer settings. With
// `scalar_output`, the last width must be 1.
absl::Status ValidateMlpSpec(const MlpSpec& spec, bool scalar_output);

// Affine layers with `activation` between them. The last layer is linear.
class DenseNetwork {
 public:
  struct Layer {
    size_t inputs = 0;
    size_t outputs = 0;
    std::vector<double> weights;  // outputs x inputs, row-major
    std::vector<double> bias;

    friend bool operator==(const Layer&, const Layer&) = default;
  };

  // Post-activation values; values[0] is the input.
  struct Trace {
    std::vector<std::vector<double>> values;
    std::span<const double> output() const { return values.back(); }
  };

  DenseNetwork() = default;
  DenseNetwork(std::span<const size_t> widths, Activation activation);

  // Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
  void InitializeUniform(CounterRng& rng);
  void SetZero();
  // this += scale * other. Shapes must match.
  void AddScaled(const DenseNetwork& other, double scale);

  size_t num_layers() const { return layers_.size(); }
  size_t input_width() const;
  size_t output_width() const;
  size_t parameter_count() const;
  Activation activation() const { return activation_; }
  std::vector<size_t> widths() const;

  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }

  void Forward(std::span<const double> input, Trace& trace) const;
  std::vector<double> Evaluate(std::span<const double> input) const;

  // Accumulates d(loss)/d(params) into `grads` given d(loss)/d(output).
  // Writes d(loss)/d(input) when `input_grad` is non-null.
  void Backward(const Trace& trace, std::span<const double> output_grad,
                DenseNetwork& grads, std::vector<double>* input_grad) const;

  friend bool operator==(const DenseNetwork&, const DenseNetwork&) = default;

 private:
  Activation activation_ = Activation::kRelu;
  std::vector<Layer> layers_;
};

// Per-coordinate z-scoring fitted on training inputs. Coordinates with zero
// spread pass through centered but unscaled.
struct Standardizer {
  std::vector<double> mean;
  std::vector<double> scale;

  static Standardizer Fit(std::span<const std::vector<double>> rows);
  static Standardizer Identity(size_t width);
  void Apply(std::span<const double> in, std::span<double> out) const;
  size_t width() const { return mean.size(); }

  friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

// Numerically stable BCE on a logit; writes d(loss)/d(logit).
double BinaryCrossEntropyWithLogit(double logit, double target,
                                   double* dlogit);

// Forward + backward of BCE(network(input), target) for a scalar-output
// network; accumulates into `grads` and returns the loss.
double MlpLossAndGradient(const DenseNetwork& network,
                          std::span<const double> input, double target,
                          DenseNetwork& grads, DenseNetwork::Trace& trace);

class MlpClassifier {
 public:
  MlpClassifier(MlpSpec spec, Standardizer standardizer, DenseNetwork network,
                std::vector<double> epoch_losses = {});

  const MlpSpec& spec() const { return spec_; }
  const Standardizer& standardizer() const { return standardizer_; }
  const DenseNetwork& network() const { return network_; }
  const std::vector<double>& epoch_losses() const { return epoch_losses_; }
  size_t input_width() const { return network_.input_width(); }

  absl::StatusOr<double> Logit(std::span<const double> feature) const;
  // Member iff logit > 0.
  absl::StatusOr<MembershipDecision> Predict(
      std::span<const double> feature) const;

  friend bool operator==(const MlpClassifier& a, const MlpClassifier& b) {
    return a.standardizer_ == b.standardizer_ && a.network_ == b.network_;
  }

 private:
  MlpSpec spec_;
  Standardizer standardizer_;
  DenseNetwork network_;
  std::vector<double> epoch_losses_;
};

// Mini-batch momentum SGD. Labels must be member / non-member and contain
// both classes. Deterministic for a fixed spec.seed.
absl::StatusOr<MlpClassifier> TrainMlp(
    const MlpSpec& spec, std::span<const std::vector<double>> features,
    std::span<const Membership> labels);

// Checkpoint "MLP1": magic, u32 version, u8 activation, u32 width count,
// u32 widths, u32 epochs, u32 batch size, f64 learning rate, f64 momentum,
// u64 seed, standardizer mean and scale, then per layer weights and bias.
// All integers little-endian; standardizer and parameters as binary32.
std::string EncodeCheckpoint(const MlpClassifier& classifier);
absl::StatusOr<MlpClassifier> DecodeCheckpoint(absl::string_view bytes);
absl::Status SaveCheckpoint(const MlpClassifier& classifier,
                            const std::filesystem::path& path);
absl::StatusOr<MlpClassifier> LoadCheckpoint(
    const std::filesystem::path& path);

// Loss of attacker(standardized_signature (.) selector(standardized_target))
// with gradients for both networks accumulated into the grad arguments.
double SdmiLossAndGradient(const DenseNetwork& selector,
                           const DenseNetwork& attacker,
                           std::span<const double> target,
                           std::span<const double> signature, double label,
                           DenseNetwork& selector_grads,
                           DenseNetwork& attacker_grads);

class SdmiAttacker {
 public:
  SdmiAttacker(Standardizer target_standardizer, DenseNetwork selector,
               MlpClassifier attacker);

  const DenseNetwork& selector() const { return selector_; }
  const MlpClassifier& attacker() const { return attacker_; }
  const Standardizer& target_standardizer() const {
    return target_standardizer_;
  }

  // Selector weights for one target.
  absl::StatusOr<std::vector<double>> Weights(
      std::span<const double> target) const;
  absl::StatusOr<double> Logit(std::span<const double> target,
                               std::span<const double> signature) const;

 private:
  Standardizer target_standardizer_;
  DenseNetwork selector_;
  MlpClassifier attacker_;
};

struct SdmiTrainingOptions {
  // Pins the selector to output all ones; the attacker then trains exactly
  // as TrainMlp would on the signatures alone.
  bool freeze_selector_to_ones = false;
};

// Joint end-to-end training of selector and attacker. Epochs, batch size and
// shuffling follow attacker_spec; each network uses its own learning rate,
// momentum and init seed.
absl::StatusOr<SdmiAttacker> TrainSdmi(
    const MlpSpec& selector_spec, const MlpSpec& attacker_spec,
    std::span<const std::vector<double>> targets,
    std::span<const std::vector<double>> signatures,
    std::span<const Membership> labels,
    const SdmiTrainingOptions& options = {});

}  // namespace embaudit

#endif  // EMBAUDIT_ATTACK_NET_H_
