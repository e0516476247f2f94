#include "shred/net/model.hpp"

#include <random>

#include "shred/errors.hpp"

namespace shred::net {

NetworkParams NetworkParams::zeros_like() const {
  NetworkParams out;
  for (const auto& l : lstm) out.lstm.push_back(LstmLayer::zeros(l.inputs(), l.hidden()));
  out.decoder = decoder.zeros_like();
  return out;
}

namespace {

template <typename Self, typename MapT>
std::vector<MapT> collect_blocks(Self& self) {
  std::vector<MapT> out;
  for (auto& l : self.lstm) {
    out.emplace_back(l.w.data(), l.w.size());
    out.emplace_back(l.u.data(), l.u.size());
    out.emplace_back(l.b.data(), l.b.size());
  }
  for (auto& d : self.decoder.layers) {
    out.emplace_back(d.w.data(), d.w.size());
    out.emplace_back(d.b.data(), d.b.size());
  }
  return out;
}

}  // namespace

std::vector<Eigen::Map<Eigen::VectorXd>> NetworkParams::blocks() {
  return collect_blocks<NetworkParams, Eigen::Map<Eigen::VectorXd>>(*this);
}

std::vector<Eigen::Map<const Eigen::VectorXd>> NetworkParams::blocks() const {
  return collect_blocks<const NetworkParams, Eigen::Map<const Eigen::VectorXd>>(*this);
}

std::size_t NetworkParams::count() const {
  std::size_t n = 0;
  for (const auto& b : blocks()) n += static_cast<std::size_t>(b.size());
  return n;
}

// ---------------------------------------------------------------------------

MinMaxScaler MinMaxScaler::identity(Eigen::Index features) {
  return MinMaxScaler{Eigen::VectorXd::Zero(features), Eigen::VectorXd::Ones(features)};
}

MinMaxScaler MinMaxScaler::fit(const Eigen::MatrixXd& data) {
  if (data.cols() == 0) throw ValidationError("cannot fit a scaler on zero observations");
  MinMaxScaler s;
  s.min = data.rowwise().minCoeff();
  s.span = data.rowwise().maxCoeff() - s.min;
  for (Eigen::Index i = 0; i < s.span.size(); ++i)
    if (!(s.span[i] > 0.0)) s.span[i] = 1.0;
  return s;
}

Eigen::MatrixXd MinMaxScaler::transform(const Eigen::MatrixXd& data) const {
  if (data.rows() != min.size()) throw DimensionMismatch("scaler feature count mismatch");
  return ((data.colwise() - min).array().colwise() / span.array()).matrix();
}

Eigen::MatrixXd MinMaxScaler::inverse(const Eigen::MatrixXd& data) const {
  if (data.rows() != min.size()) throw DimensionMismatch("scaler feature count mismatch");
  return ((data.array().colwise() * span.array()).matrix().colwise() + min);
}

Eigen::MatrixXd MinMaxScaler::transform_windows(const Eigen::MatrixXd& windows) const {
  const Eigen::Index f = min.size();
  if (f == 0 || windows.rows() % f != 0) throw DimensionMismatch("window rows are not a multiple of features");
  Eigen::MatrixXd out(windows.rows(), windows.cols());
  for (Eigen::Index t = 0; t < windows.rows() / f; ++t) out.middleRows(t * f, f) = transform(windows.middleRows(t * f, f));
  return out;
}

// ---------------------------------------------------------------------------

ShredModel::ShredModel(Architecture arch, std::uint64_t seed) : arch_(std::move(arch)), seed_(seed) {
  if (arch_.inputs == 0 || arch_.outputs == 0) throw ValidationError("model needs inputs and outputs");
  if (arch_.lstm_hidden.empty()) throw ValidationError("model needs at least one LSTM layer");
  if (arch_.lag == 0) throw ValidationError("lag window must be at least 1");
  std::mt19937_64 rng(seed);
  auto in = static_cast<Eigen::Index>(arch_.inputs);
  for (auto h : arch_.lstm_hidden) {
    params_.lstm.push_back(LstmLayer::init(in, static_cast<Eigen::Index>(h), rng));
    in = static_cast<Eigen::Index>(h);
  }
  params_.decoder = Decoder::init(in, arch_.decoder_hidden, static_cast<Eigen::Index>(arch_.outputs), rng);
  input_scaler_ = MinMaxScaler::identity(static_cast<Eigen::Index>(arch_.inputs));
  output_scaler_ = MinMaxScaler::identity(static_cast<Eigen::Index>(arch_.outputs));
}

ShredModel::ShredModel(Architecture arch, NetworkParams params, MinMaxScaler input_scaler,
                       MinMaxScaler output_scaler, std::uint64_t seed)
    : arch_(std::move(arch)), params_(std::move(params)), input_scaler_(std::move(input_scaler)),
      output_scaler_(std::move(output_scaler)), seed_(seed) {}

void ShredModel::set_scalers(MinMaxScaler input, MinMaxScaler output) {
  if (input.min.size() != static_cast<Eigen::Index>(arch_.inputs) ||
      output.min.size() != static_cast<Eigen::Index>(arch_.outputs))
    throw DimensionMismatch("scaler widths do not match the architecture");
  input_scaler_ = std::move(input);
  output_scaler_ = std::move(output);
}

Eigen::MatrixXd ShredModel::forward(const std::vector<Eigen::MatrixXd>& steps) const {
  LstmCache cache;
  const std::vector<Eigen::MatrixXd>* seq = &steps;
  std::vector<Eigen::MatrixXd> hidden;
  for (const auto& layer : params_.lstm) {
    lstm_forward(layer, *seq, cache);
    hidden = std::move(cache.h);
    seq = &hidden;
  }
  return decoder_forward(params_.decoder, hidden.back());
}

double ShredModel::loss_and_gradient(const std::vector<Eigen::MatrixXd>& steps, const Eigen::MatrixXd& targets,
                                     NetworkParams* grad, double scale) const {
  const std::size_t layers = params_.lstm.size();
  std::vector<LstmCache> caches(layers);
  for (std::size_t l = 0; l < layers; ++l) lstm_forward(params_.lstm[l], l == 0 ? steps : caches[l - 1].h, caches[l]);

  DecoderCache dcache;
  const Eigen::MatrixXd out = decoder_forward(params_.decoder, caches.back().h.back(), grad ? &dcache : nullptr);
  if (out.rows() != targets.rows() || out.cols() != targets.cols())
    throw DimensionMismatch("targets do not match the network output");
  const Eigen::MatrixXd diff = out - targets;
  const double count = static_cast<double>(diff.size());
  const double loss = scale * diff.squaredNorm() / count;
  if (!grad) return loss;

  const Eigen::MatrixXd dout = (2.0 * scale / count) * diff;
  const Eigen::MatrixXd dh_top = decoder_backward(params_.decoder, dcache, dout, grad->decoder);

  std::vector<Eigen::MatrixXd> upstream(steps.size());
  upstream.back() = dh_top;
  for (std::size_t l = layers; l-- > 0;) {
    upstream = lstm_backward(params_.lstm[l], l == 0 ? steps : caches[l - 1].h, caches[l], upstream, grad->lstm[l]);
  }
  return loss;
}

std::vector<Eigen::MatrixXd> to_steps(const Eigen::MatrixXd& windows, std::size_t lag, std::size_t features) {
  if (static_cast<std::size_t>(windows.rows()) != lag * features)
    throw DimensionMismatch("window rows do not equal lag * features");
  std::vector<Eigen::MatrixXd> steps(lag);
  const auto f = static_cast<Eigen::Index>(features);
  for (std::size_t t = 0; t < lag; ++t) steps[t] = windows.middleRows(static_cast<Eigen::Index>(t) * f, f);
  return steps;
}

Eigen::MatrixXd ShredModel::predict(const WindowDataset& data, std::size_t batch_size) const {
  if (data.features != arch_.inputs || data.lag != arch_.lag)
    throw DimensionMismatch("dataset window shape does not match the model");
  const auto n = static_cast<Eigen::Index>(data.size());
  Eigen::MatrixXd out(static_cast<Eigen::Index>(arch_.outputs), n);
  const auto bs = static_cast<Eigen::Index>(std::max<std::size_t>(batch_size, 1));
  for (Eigen::Index start = 0; start < n; start += bs) {
    const Eigen::Index len = std::min(bs, n - start);
    const Eigen::MatrixXd windows = input_scaler_.transform_windows(data.inputs.middleCols(start, len));
    out.middleCols(start, len) = output_scaler_.inverse(forward(to_steps(windows, data.lag, data.features)));
  }
  return out;
}

}  // namespace shred::net
