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

#include "embaudit/attack_net.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "absl/strings/str_cat.h"
#include "embaudit/status.h"

namespace embaudit {
namespace {

constexpr char kCheckpointMagic[4] = {'M', 'L', 'P', '1'};
constexpr uint32_t kCheckpointVersion = 1;

double Activate(Activation activation, double x) {
  return activation == Activation::kRelu ? (x > 0.0 ? x : 0.0) : std::tanh(x);
}

// Derivative expressed through the post-activation value.
double ActivationSlope(Activation activation, double activated) {
  return activation == Activation::kRelu ? (activated > 0.0 ? 1.0 : 0.0)
                                         : 1.0 - activated * activated;
}

void MomentumStep(DenseNetwork& params, DenseNetwork& velocity,
                  const DenseNetwork& grads, double grad_scale,
                  double learning_rate, double momentum) {
  auto update = [&](std::vector<double>& p, std::vector<double>& v,
                    const std::vector<double>& g) {
    for (size_t i = 0; i < p.size(); ++i) {
      v[i] = momentum * v[i] + grad_scale * g[i];
      p[i] -= learning_rate * v[i];
    }
  };
  for (size_t l = 0; l < params.num_layers(); ++l) {
    update(params.layers()[l].weights, velocity.layers()[l].weights,
           grads.layers()[l].weights);
    update(params.layers()[l].bias, velocity.layers()[l].bias,
           grads.layers()[l].bias);
  }
}

DenseNetwork ZerosLike(const DenseNetwork& network) {
  DenseNetwork zeros = network;
  zeros.SetZero();
  return zeros;
}

absl::Status CheckLabels(std::span<const Membership> labels, size_t expected) {
  if (labels.size() != expected) {
    return MakeError(ErrorKind::kTraining,
                     absl::StrCat(expected, " feature rows but ",
                                  labels.size(), " labels"));
  }
  size_t members = 0;
  for (size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] == Membership::kUnknown) {
      return MakeError(ErrorKind::kTraining,
                       absl::StrCat("label ", i, " is unknown"));
    }
    members += labels[i] == Membership::kMember;
  }
  if (members == 0 || members == labels.size()) {
    return MakeError(ErrorKind::kTraining,
                     "training labels contain a single class");
  }
  return absl::OkStatus();
}

absl::Status CheckRows(std::span<const std::vector<double>> rows, size_t width,
                       absl::string_view what) {
  if (rows.empty()) {
    return MakeError(ErrorKind::kTraining, absl::StrCat("no ", what, " rows"));
  }
  for (size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != width) {
      return MakeError(ErrorKind::kDomain,
                       absl::StrCat(what, " row ", i, " has width ",
                                    rows[i].size(), ", network expects ",
                                    width));
    }
  }
  return absl::OkStatus();
}

std::vector<std::vector<double>> StandardizeRows(
    const Standardizer& standardizer,
    std::span<const std::vector<double>> rows) {
  std::vector<std::vector<double>> out(rows.size());
  for (size_t i = 0; i < rows.size(); ++i) {
    out[i].resize(rows[i].size());
    standardizer.Apply(rows[i], out[i]);
  }
  return out;
}

// Shuffled mini-batch epochs. `batch_fn` trains on one batch of indices and
// returns the summed loss over it.
template <typename BatchFn>
absl::StatusOr<std::vector<double>> RunEpochs(const MlpSpec& spec,
                                              size_t sample_count,
                                              BatchFn&& batch_fn) {
  CounterRng shuffle_rng(DeriveSeed(spec.seed, "mlp/shuffle"));
  std::vector<size_t> order(sample_count);
  std::iota(order.begin(), order.end(), size_t{0});
  std::vector<double> epoch_losses;
  epoch_losses.reserve(spec.epochs);
  for (size_t epoch = 0; epoch < spec.epochs; ++epoch) {
    Shuffle(std::span<size_t>(order), shuffle_rng);
    double loss = 0.0;
    for (size_t start = 0; start < sample_count; start += spec.batch_size) {
      const size_t end = std::min(sample_count, start + spec.batch_size);
      const double batch_loss =
          batch_fn(std::span<const size_t>(order.data() + start, end - start));
      if (!std::isfinite(batch_loss)) {
        return MakeError(ErrorKind::kDivergence,
                         absl::StrCat("non-finite loss in epoch ", epoch));
      }
      loss += batch_loss;
    }
    epoch_losses.push_back(loss / static_cast<double>(sample_count));
  }
  return epoch_losses;
}

template <typename T>
void PutLe(std::string& out, T value) {
  for (size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((value >> (8 * i)) & 0xFF));
  }
}

void PutF32(std::string& out, double value) {
  const float f = static_cast<float>(value);
  uint32_t bits;
  std::memcpy(&bits, &f, sizeof(bits));
  PutLe<uint32_t>(out, bits);
}

void PutF64(std::string& out, double value) {
  uint64_t bits;
  std::memcpy(&bits, &value, sizeof(bits));
  PutLe<uint64_t>(out, bits);
}

class CheckpointReader {
 public:
  explicit CheckpointReader(absl::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  absl::StatusOr<T> Le() {
    if (bytes_.size() - pos_ < sizeof(T)) {
      return MakeError(ErrorKind::kFormat, "checkpoint truncated");
    }
    T value = 0;
    for (size_t i = 0; i < sizeof(T); ++i) {
      value |= static_cast<T>(static_cast<unsigned char>(bytes_[pos_ + i]))
               << (8 * i);
    }
    pos_ += sizeof(T);
    return value;
  }

  absl::StatusOr<double> F32() {
    EMBAUDIT_ASSIGN_OR_RETURN(uint32_t bits, Le<uint32_t>());
    float f;
    std::memcpy(&f, &bits, sizeof(f));
    return static_cast<double>(f);
  }

  absl::StatusOr<double> F64() {
    EMBAUDIT_ASSIGN_OR_RETURN(uint64_t bits, Le<uint64_t>());
    double d;
    std::memcpy(&d, &bits, sizeof(d));
    return d;
  }

  absl::Status ReadF32s(std::vector<double>& out) {
    for (double& v : out) {
      EMBAUDIT_ASSIGN_OR_RETURN(v, F32());
    }
    return absl::OkStatus();
  }

  bool at_end() const { return pos_ == bytes_.size(); }

 private:
  absl::string_view bytes_;
  size_t pos_ = 4;  // past the magic
};

}  // namespace

absl::string_view ActivationName(Activation activation) {
  return activation == Activation::kRelu ? "relu" : "tanh";
}

absl::StatusOr<Activation> ParseActivation(absl::string_view name) {
  if (name == "relu") return Activation::kRelu;
  if (name == "tanh") return Activation::kTanh;
  return MakeError(ErrorKind::kConfig,
                   absl::StrCat("unknown activation '", name, "'"));
}

absl::Status ValidateMlpSpec(const MlpSpec& spec, bool scalar_output) {
  if (spec.layer_widths.size() < 2) {
    return MakeError(ErrorKind::kConfig,
                     "layer_widths needs at least input and output widths");
  }
  for (size_t w : spec.layer_widths) {
    if (w == 0) {
      return MakeError(ErrorKind::kConfig, "layer widths must be positive");
    }
  }
  if (scalar_output && spec.layer_widths.back() != 1) {
    return MakeError(ErrorKind::kConfig,
                     absl::StrCat("final layer width must be 1, got ",
                                  spec.layer_widths.back()));
  }
  if (spec.epochs == 0 || spec.batch_size == 0) {
    return MakeError(ErrorKind::kConfig, "epochs and batch_size must be >= 1");
  }
  if (!(spec.learning_rate > 0.0) || !std::isfinite(spec.learning_rate)) {
    return MakeError(ErrorKind::kConfig, "learning_rate must be positive");
  }
  if (!(spec.momentum >= 0.0 && spec.momentum < 1.0)) {
    return MakeError(ErrorKind::kConfig, "momentum must lie in [0, 1)");
  }
  return absl::OkStatus();
}

DenseNetwork::DenseNetwork(std::span<const size_t> widths,
                           Activation activation)
    : activation_(activation) {
  for (size_t l = 0; l + 1 < widths.size(); ++l) {
    Layer layer;
    layer.inputs = widths[l];
    layer.outputs = widths[l + 1];
    layer.weights.assign(layer.inputs * layer.outputs, 0.0);
    layer.bias.assign(layer.outputs, 0.0);
    layers_.push_back(std::move(layer));
  }
}

void DenseNetwork::InitializeUniform(CounterRng& rng) {
  for (Layer& layer : layers_) {
    const double bound =
        std::sqrt(6.0 / static_cast<double>(layer.inputs + layer.outputs));
    for (double& w : layer.weights) w = (2.0 * rng.NextDouble() - 1.0) * bound;
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
}

void DenseNetwork::SetZero() {
  for (Layer& layer : layers_) {
    std::fill(layer.weights.begin(), layer.weights.end(), 0.0);
    std::fill(layer.bias.begin(), layer.bias.end(), 0.0);
  }
}

void DenseNetwork::AddScaled(const DenseNetwork& other, double scale) {
  for (size_t l = 0; l < layers_.size(); ++l) {
    for (size_t i = 0; i < layers_[l].weights.size(); ++i) {
      layers_[l].weights[i] += scale * other.layers_[l].weights[i];
    }
    for (size_t i = 0; i < layers_[l].bias.size(); ++i) {
      layers_[l].bias[i] += scale * other.layers_[l].bias[i];
    }
  }
}

size_t DenseNetwork::input_width() const {
  return layers_.empty() ? 0 : layers_.front().inputs;
}

size_t DenseNetwork::output_width() const {
  return layers_.empty() ? 0 : layers_.back().outputs;
}

size_t DenseNetwork::parameter_count() const {
  size_t count = 0;
  for (const Layer& layer : layers_) {
    count += layer.weights.size() + layer.bias.size();
  }
  return count;
}

std::vector<size_t> DenseNetwork::widths() const {
  std::vector<size_t> widths;
  if (layers_.empty()) return widths;
  widths.push_back(layers_.front().inputs);
  for (const Layer& layer : layers_) widths.push_back(layer.outputs);
  return widths;
}

void DenseNetwork::Forward(std::span<const double> input, Trace& trace) const {
  trace.values.resize(layers_.size() + 1);
  trace.values[0].assign(input.begin(), input.end());
  for (size_t l = 0; l < layers_.size(); ++l) {
    const Layer& layer = layers_[l];
    const std::vector<double>& x = trace.values[l];
    std::vector<double>& y = trace.values[l + 1];
    y.resize(layer.outputs);
    const bool last = l + 1 == layers_.size();
    for (size_t o = 0; o < layer.outputs; ++o) {
      const double* row = layer.weights.data() + o * layer.inputs;
      double sum = layer.bias[o];
      for (size_t i = 0; i < layer.inputs; ++i) sum += row[i] * x[i];
      y[o] = last ? sum : Activate(activation_, sum);
    }
  }
}

std::vector<double> DenseNetwork::Evaluate(
    std::span<const double> input) const {
  Trace trace;
  Forward(input, trace);
  return std::move(trace.values.back());
}

void DenseNetwork::Backward(const Trace& trace,
                            std::span<const double> output_grad,
                            DenseNetwork& grads,
                            std::vector<double>* input_grad) const {
  std::vector<double> delta(output_grad.begin(), output_grad.end());
  std::vector<double> below;
  for (size_t l = layers_.size(); l-- > 0;) {
    const Layer& layer = layers_[l];
    Layer& grad = grads.layers_[l];
    const std::vector<double>& x = trace.values[l];
    if (l + 1 != layers_.size()) {
      const std::vector<double>& y = trace.values[l + 1];
      for (size_t o = 0; o < layer.outputs; ++o) {
        delta[o] *= ActivationSlope(activation_, y[o]);
      }
    }
    const bool need_below = l > 0 || input_grad != nullptr;
    if (need_below) below.assign(layer.inputs, 0.0);
    for (size_t o = 0; o < layer.outputs; ++o) {
      const double d = delta[o];
      grad.bias[o] += d;
      if (d == 0.0) continue;
      double* grow = grad.weights.data() + o * layer.inputs;
      const double* row = layer.weights.data() + o * layer.inputs;
      for (size_t i = 0; i < layer.inputs; ++i) grow[i] += d * x[i];
      if (need_below) {
        for (size_t i = 0; i < layer.inputs; ++i) below[i] += d * row[i];
      }
    }
    if (need_below) delta.swap(below);
  }
  if (input_grad != nullptr) *input_grad = std::move(delta);
}

Standardizer Standardizer::Fit(std::span<const std::vector<double>> rows) {
  Standardizer s;
  if (rows.empty()) return s;
  const size_t width = rows.front().size();
  s.mean.assign(width, 0.0);
  s.scale.assign(width, 1.0);
  for (const std::vector<double>& row : rows) {
    for (size_t j = 0; j < width; ++j) s.mean[j] += row[j];
  }
  const double n = static_cast<double>(rows.size());
  for (double& m : s.mean) m /= n;
  std::vector<double> variance(width, 0.0);
  for (const std::vector<double>& row : rows) {
    for (size_t j = 0; j < width; ++j) {
      const double d = row[j] - s.mean[j];
      variance[j] += d * d;
    }
  }
  for (size_t j = 0; j < width; ++j) {
    const double sd = std::sqrt(variance[j] / n);
    s.scale[j] = sd > 0.0 ? 1.0 / sd : 1.0;
  }
  return s;
}

Standardizer Standardizer::Identity(size_t width) {
  Standardizer s;
  s.mean.assign(width, 0.0);
  s.scale.assign(width, 1.0);
  return s;
}

void Standardizer::Apply(std::span<const double> in,
                         std::span<double> out) const {
  for (size_t j = 0; j < in.size(); ++j) out[j] = (in[j] - mean[j]) * scale[j];
}

double BinaryCrossEntropyWithLogit(double logit, double target,
                                   double* dlogit) {
  const double sigmoid = logit >= 0.0
                             ? 1.0 / (1.0 + std::exp(-logit))
                             : std::exp(logit) / (1.0 + std::exp(logit));
  if (dlogit != nullptr) *dlogit = sigmoid - target;
  return std::max(logit, 0.0) - logit * target +
         std::log1p(std::exp(-std::fabs(logit)));
}

double MlpLossAndGradient(const DenseNetwork& network,
                          std::span<const double> input, double target,
                          DenseNetwork& grads, DenseNetwork::Trace& trace) {
  network.Forward(input, trace);
  double dlogit = 0.0;
  const double loss =
      BinaryCrossEntropyWithLogit(trace.output()[0], target, &dlogit);
  network.Backward(trace, std::span<const double>(&dlogit, 1), grads, nullptr);
  return loss;
}

MlpClassifier::MlpClassifier(MlpSpec spec, Standardizer standardizer,
                             DenseNetwork network,
                             std::vector<double> epoch_losses)
    : spec_(std::move(spec)),
      standardizer_(std::move(standardizer)),
      network_(std::move(network)),
      epoch_losses_(std::move(epoch_losses)) {}

absl::StatusOr<double> MlpClassifier::Logit(
    std::span<const double> feature) const {
  if (feature.size() != network_.input_width()) {
    return MakeError(ErrorKind::kDomain,
                     absl::StrCat("feature has width ", feature.size(),
                                  ", classifier expects ",
                                  network_.input_width()));
  }
  std::vector<double> standardized(feature.size());
  standardizer_.Apply(feature, standardized);
  return network_.Evaluate(standardized)[0];
}

absl::StatusOr<MembershipDecision> MlpClassifier::Predict(
    std::span<const double> feature) const {
  EMBAUDIT_ASSIGN_OR_RETURN(double logit, Logit(feature));
  return DecisionFromScore(logit);
}

absl::StatusOr<MlpClassifier> TrainMlp(
    const MlpSpec& spec, std::span<const std::vector<double>> features,
    std::span<const Membership> labels) {
  EMBAUDIT_RETURN_IF_ERROR(ValidateMlpSpec(spec, /*scalar_output=*/true));
  EMBAUDIT_RETURN_IF_ERROR(
      CheckRows(features, spec.layer_widths.front(), "feature"));
  EMBAUDIT_RETURN_IF_ERROR(CheckLabels(labels, features.size()));

  Standardizer standardizer = Standardizer::Fit(features);
  const std::vector<std::vector<double>> inputs =
      StandardizeRows(standardizer, features);

  DenseNetwork network(spec.layer_widths, spec.activation);
  CounterRng init_rng(DeriveSeed(spec.seed, "mlp/init"));
  network.InitializeUniform(init_rng);
  DenseNetwork grads = ZerosLike(network);
  DenseNetwork velocity = ZerosLike(network);
  DenseNetwork::Trace trace;

  EMBAUDIT_ASSIGN_OR_RETURN(
      std::vector<double> epoch_losses,
      RunEpochs(spec, inputs.size(), [&](std::span<const size_t> batch) {
        grads.SetZero();
        double loss = 0.0;
        for (size_t i : batch) {
          const double target = labels[i] == Membership::kMember ? 1.0 : 0.0;
          loss += MlpLossAndGradient(network, inputs[i], target, grads, trace);
        }
        MomentumStep(network, velocity, grads,
                     1.0 / static_cast<double>(batch.size()),
                     spec.learning_rate, spec.momentum);
        return loss;
      }));
  return MlpClassifier(spec, std::move(standardizer), std::move(network),
                       std::move(epoch_losses));
}

std::string EncodeCheckpoint(const MlpClassifier& classifier) {
  const MlpSpec& spec = classifier.spec();
  const DenseNetwork& network = classifier.network();
  const std::vector<size_t> widths = network.widths();
  std::string out(kCheckpointMagic, 4);
  PutLe<uint32_t>(out, kCheckpointVersion);
  out.push_back(static_cast<char>(network.activation() == Activation::kRelu
                                      ? 0
                                      : 1));
  PutLe<uint32_t>(out, static_cast<uint32_t>(widths.size()));
  for (size_t w : widths) PutLe<uint32_t>(out, static_cast<uint32_t>(w));
  PutLe<uint32_t>(out, static_cast<uint32_t>(spec.epochs));
  PutLe<uint32_t>(out, static_cast<uint32_t>(spec.batch_size));
  PutF64(out, spec.learning_rate);
  PutF64(out, spec.momentum);
  PutLe<uint64_t>(out, spec.seed);
  for (double m : classifier.standardizer().mean) PutF32(out, m);
  for (double s : classifier.standardizer().scale) PutF32(out, s);
  for (const DenseNetwork::Layer& layer : network.layers()) {
    for (double w : layer.weights) PutF32(out, w);
    for (double b : layer.bias) PutF32(out, b);
  }
  return out;
}

absl::StatusOr<MlpClassifier> DecodeCheckpoint(absl::string_view bytes) {
  if (bytes.size() < 4 || std::memcmp(bytes.data(), kCheckpointMagic, 4) != 0) {
    return MakeError(ErrorKind::kFormat, "bad checkpoint magic");
  }
  CheckpointReader reader(bytes);
  EMBAUDIT_ASSIGN_OR_RETURN(uint32_t version, reader.Le<uint32_t>());
  if (version != kCheckpointVersion) {
    return MakeError(ErrorKind::kFormat,
                     absl::StrCat("unsupported checkpoint version ", version));
  }
  EMBAUDIT_ASSIGN_OR_RETURN(uint8_t activation_code, reader.Le<uint8_t>());
  if (activation_code > 1) {
    return MakeError(ErrorKind::kFormat, "bad activation code");
  }
  EMBAUDIT_ASSIGN_OR_RETURN(uint32_t width_count, reader.Le<uint32_t>());
  if (width_count < 2 || width_count > 64) {
    return MakeError(ErrorKind::kFormat,
                     absl::StrCat("bad width count ", width_count));
  }
  MlpSpec spec;
  spec.activation =
      activation_code == 0 ? Activation::kRelu : Activation::kTanh;
  for (uint32_t i = 0; i < width_count; ++i) {
    EMBAUDIT_ASSIGN_OR_RETURN(uint32_t w, reader.Le<uint32_t>());
    if (w == 0 || w > (1u << 24)) {
      return MakeError(ErrorKind::kFormat, absl::StrCat("bad layer width ", w));
    }
    spec.layer_widths.push_back(w);
  }
  EMBAUDIT_ASSIGN_OR_RETURN(uint32_t epochs, reader.Le<uint32_t>());
  EMBAUDIT_ASSIGN_OR_RETURN(uint32_t batch_size, reader.Le<uint32_t>());
  spec.epochs = epochs;
  spec.batch_size = batch_size;
  EMBAUDIT_ASSIGN_OR_RETURN(spec.learning_rate, reader.F64());
  EMBAUDIT_ASSIGN_OR_RETURN(spec.momentum, reader.F64());
  EMBAUDIT_ASSIGN_OR_RETURN(spec.seed, reader.Le<uint64_t>());

  Standardizer standardizer = Standardizer::Identity(spec.layer_widths[0]);
  EMBAUDIT_RETURN_IF_ERROR(reader.ReadF32s(standardizer.mean));
  EMBAUDIT_RETURN_IF_ERROR(reader.ReadF32s(standardizer.scale));
  DenseNetwork network(spec.layer_widths, spec.activation);
  for (DenseNetwork::Layer& layer : network.layers()) {
    EMBAUDIT_RETURN_IF_ERROR(reader.ReadF32s(layer.weights));
    EMBAUDIT_RETURN_IF_ERROR(reader.ReadF32s(layer.bias));
  }
  if (!reader.at_end()) {
    return MakeError(ErrorKind::kFormat, "trailing bytes after checkpoint");
  }
  return MlpClassifier(std::move(spec), std::move(standardizer),
                       std::move(network));
}

absl::Status SaveCheckpoint(const MlpClassifier& classifier,
                            const std::filesystem::path& path) {
  return WriteFileBytes(path, EncodeCheckpoint(classifier));
}

absl::StatusOr<MlpClassifier> LoadCheckpoint(
    const std::filesystem::path& path) {
  EMBAUDIT_ASSIGN_OR_RETURN(std::string bytes, ReadFileBytes(path));
  return DecodeCheckpoint(bytes);
}

double SdmiLossAndGradient(const DenseNetwork& selector,
                           const DenseNetwork& attacker,
                           std::span<const double> target,
                           std::span<const double> signature, double label,
                           DenseNetwork& selector_grads,
                           DenseNetwork& attacker_grads) {
  thread_local DenseNetwork::Trace selector_trace;
  thread_local DenseNetwork::Trace attacker_trace;
  thread_local std::vector<double> weighted;
  thread_local std::vector<double> weighted_grad;

  selector.Forward(target, selector_trace);
  const std::span<const double> weights = selector_trace.output();
  weighted.resize(signature.size());
  for (size_t i = 0; i < signature.size(); ++i) {
    weighted[i] = signature[i] * weights[i];
  }
  attacker.Forward(weighted, attacker_trace);
  double dlogit = 0.0;
  const double loss =
      BinaryCrossEntropyWithLogit(attacker_trace.output()[0], label, &dlogit);
  attacker.Backward(attacker_trace, std::span<const double>(&dlogit, 1),
                    attacker_grads, &weighted_grad);
  for (size_t i = 0; i < signature.size(); ++i) weighted_grad[i] *= signature[i];
  selector.Backward(selector_trace, weighted_grad, selector_grads, nullptr);
  return loss;
}

SdmiAttacker::SdmiAttacker(Standardizer target_standardizer,
                           DenseNetwork selector, MlpClassifier attacker)
    : target_standardizer_(std::move(target_standardizer)),
      selector_(std::move(selector)),
      attacker_(std::move(attacker)) {}

absl::StatusOr<std::vector<double>> SdmiAttacker::Weights(
    std::span<const double> target) const {
  if (target.size() != selector_.input_width()) {
    return MakeError(ErrorKind::kDomain,
                     absl::StrCat("target has width ", target.size(),
                                  ", selector expects ",
                                  selector_.input_width()));
  }
  std::vector<double> standardized(target.size());
  target_standardizer_.Apply(target, standardized);
  return selector_.Evaluate(standardized);
}

absl::StatusOr<double> SdmiAttacker::Logit(
    std::span<const double> target, std::span<const double> signature) const {
  if (signature.size() != attacker_.input_width()) {
    return MakeError(ErrorKind::kDomain,
                     absl::StrCat("signature has width ", signature.size(),
                                  ", attacker expects ",
                                  attacker_.input_width()));
  }
  EMBAUDIT_ASSIGN_OR_RETURN(std::vector<double> weights, Weights(target));
  std::vector<double> weighted(signature.size());
  attacker_.standardizer().Apply(signature, weighted);
  for (size_t i = 0; i < weighted.size(); ++i) weighted[i] *= weights[i];
  return attacker_.network().Evaluate(weighted)[0];
}

absl::StatusOr<SdmiAttacker> TrainSdmi(
    const MlpSpec& selector_spec, const MlpSpec& attacker_spec,
    std::span<const std::vector<double>> targets,
    std::span<const std::vector<double>> signatures,
    std::span<const Membership> labels, const SdmiTrainingOptions& options) {
  EMBAUDIT_RETURN_IF_ERROR(
      ValidateMlpSpec(selector_spec, /*scalar_output=*/false));
  EMBAUDIT_RETURN_IF_ERROR(
      ValidateMlpSpec(attacker_spec, /*scalar_output=*/true));
  if (selector_spec.layer_widths.back() != attacker_spec.layer_widths.front()) {
    return MakeError(
        ErrorKind::kConfig,
        absl::StrCat("selector output width ", selector_spec.layer_widths.back(),
                     " must equal attacker input width ",
                     attacker_spec.layer_widths.front()));
  }
  EMBAUDIT_RETURN_IF_ERROR(
      CheckRows(targets, selector_spec.layer_widths.front(), "target"));
  EMBAUDIT_RETURN_IF_ERROR(
      CheckRows(signatures, attacker_spec.layer_widths.front(), "signature"));
  if (targets.size() != signatures.size()) {
    return MakeError(ErrorKind::kTraining,
                     absl::StrCat(targets.size(), " targets but ",
                                  signatures.size(), " signatures"));
  }
  EMBAUDIT_RETURN_IF_ERROR(CheckLabels(labels, targets.size()));

  Standardizer target_standardizer = Standardizer::Fit(targets);
  Standardizer signature_standardizer = Standardizer::Fit(signatures);
  const std::vector<std::vector<double>> target_inputs =
      StandardizeRows(target_standardizer, targets);
  const std::vector<std::vector<double>> signature_inputs =
      StandardizeRows(signature_standardizer, signatures);

  DenseNetwork selector(selector_spec.layer_widths, selector_spec.activation);
  CounterRng selector_rng(DeriveSeed(selector_spec.seed, "mlp/init"));
  selector.InitializeUniform(selector_rng);
  if (options.freeze_selector_to_ones) {
    DenseNetwork::Layer& out = selector.layers().back();
    std::fill(out.weights.begin(), out.weights.end(), 0.0);
    std::fill(out.bias.begin(), out.bias.end(), 1.0);
  }
  DenseNetwork attacker(attacker_spec.layer_widths, attacker_spec.activation);
  CounterRng attacker_rng(DeriveSeed(attacker_spec.seed, "mlp/init"));
  attacker.InitializeUniform(attacker_rng);

  DenseNetwork selector_grads = ZerosLike(selector);
  DenseNetwork selector_velocity = ZerosLike(selector);
  DenseNetwork attacker_grads = ZerosLike(attacker);
  DenseNetwork attacker_velocity = ZerosLike(attacker);

  EMBAUDIT_ASSIGN_OR_RETURN(
      std::vector<double> epoch_losses,
      RunEpochs(attacker_spec, targets.size(),
                [&](std::span<const size_t> batch) {
                  selector_grads.SetZero();
                  attacker_grads.SetZero();
                  double loss = 0.0;
                  for (size_t i : batch) {
                    const double target =
                        labels[i] == Membership::kMember ? 1.0 : 0.0;
                    loss += SdmiLossAndGradient(
                        selector, attacker, target_inputs[i],
                        signature_inputs[i], target, selector_grads,
                        attacker_grads);
                  }
                  const double scale = 1.0 / static_cast<double>(batch.size());
                  MomentumStep(attacker, attacker_velocity, attacker_grads,
                               scale, attacker_spec.learning_rate,
                               attacker_spec.momentum);
                  if (!options.freeze_selector_to_ones) {
                    MomentumStep(selector, selector_velocity, selector_grads,
                                 scale, selector_spec.learning_rate,
                                 selector_spec.momentum);
                  }
                  return loss;
                }));
  MlpClassifier attacker_classifier(attacker_spec,
                                    std::move(signature_standardizer),
                                    std::move(attacker),
                                    std::move(epoch_losses));
  return SdmiAttacker(std::move(target_standardizer), std::move(selector),
                      std::move(attacker_classifier));
}

}  // namespace embaudit
