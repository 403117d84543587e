#include "aenet/tensor_nn.hpp"

#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "aenet/binary_io.hpp"

namespace aenet {

void TrainConfig::validate() const {
  // Zero epochs is accepted and leaves the model untouched.
  if (epochs < 0) throw ConfigError("epochs must be >= 0");
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be > 0");
  if (batch_size < 1) throw ConfigError("batch size must be >= 1");
}

std::vector<double> run_minibatch_epochs(Index n_samples, const TrainConfig& cfg,
                                         const BatchStep& step) {
  cfg.validate();
  if (n_samples <= 0) throw ConfigError("training set is empty");
  std::vector<Index> order(static_cast<std::size_t>(n_samples));
  std::iota(order.begin(), order.end(), Index{0});
  Rng shuffle_rng(derive_seed(cfg.seed, "shuffle"));
  std::vector<double> history;
  history.reserve(static_cast<std::size_t>(cfg.epochs));
  const std::size_t batch = static_cast<std::size_t>(cfg.batch_size);
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);
    double total = 0.0;
    std::size_t b = 0;
    for (std::size_t start = 0; start < order.size(); start += batch, ++b) {
      const std::size_t len = std::min(batch, order.size() - start);
      const double loss =
          step(std::span<const Index>(order.data() + start, len));
      if (!std::isfinite(loss)) {
        std::ostringstream os;
        os << "training diverged: non-finite loss at epoch " << epoch
           << ", batch " << b;
        throw DivergenceError(os.str());
      }
      total += loss * static_cast<double>(len);
    }
    history.push_back(total / static_cast<double>(n_samples));
  }
  return history;
}

template <typename T>
void write_checkpoint(std::ostream& out, const Mlp<T>& net) {
  out.write("AEMLP", 5);
  io::write_le<std::uint32_t>(out, 1);
  io::write_le<std::uint8_t>(out, sizeof(T));
  io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(net.depth()));
  for (int d : net.dims()) io::write_le<std::uint32_t>(out, static_cast<std::uint32_t>(d));
  for (const auto& l : net.layers()) {
    for (Index r = 0; r < l.weight.rows(); ++r) {
      for (Index c = 0; c < l.weight.cols(); ++c) io::write_le<T>(out, l.weight(r, c));
    }
    for (Index r = 0; r < l.bias.size(); ++r) io::write_le<T>(out, l.bias(r));
  }
  if (!out) throw IoError("failed writing network checkpoint");
}

namespace {

template <typename Stored, typename T>
Mlp<T> read_layers(std::istream& in, const std::vector<std::uint32_t>& dims) {
  std::vector<DenseLayer<T>> layers;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    DenseLayer<T> layer{Matrix<T>(dims[l + 1], dims[l]), Vector<T>(dims[l + 1])};
    for (Index r = 0; r < layer.weight.rows(); ++r) {
      for (Index c = 0; c < layer.weight.cols(); ++c) {
        layer.weight(r, c) = static_cast<T>(io::read_le<Stored>(in));
      }
    }
    for (Index r = 0; r < layer.bias.size(); ++r) {
      layer.bias(r) = static_cast<T>(io::read_le<Stored>(in));
    }
    layers.push_back(std::move(layer));
  }
  return Mlp<T>(std::move(layers));
}

}  // namespace

template <typename T>
Mlp<T> read_checkpoint(std::istream& in) {
  io::expect_magic(in, "AEMLP");
  const auto version = io::read_le<std::uint32_t>(in);
  if (version != 1) throw IoError("unsupported checkpoint version " + std::to_string(version));
  const auto scalar = io::read_le<std::uint8_t>(in);
  const auto n_layers = io::read_le<std::uint32_t>(in);
  if (n_layers == 0 || n_layers > 1024) throw IoError("implausible layer count in checkpoint");
  std::vector<std::uint32_t> dims(n_layers + 1);
  for (auto& d : dims) {
    d = io::read_le<std::uint32_t>(in);
    if (d == 0 || d > (1u << 20)) throw IoError("implausible layer width in checkpoint");
  }
  if (scalar == 4) return read_layers<float, T>(in, dims);
  if (scalar == 8) return read_layers<double, T>(in, dims);
  throw IoError("unsupported checkpoint scalar size " + std::to_string(scalar));
}

template void write_checkpoint<float>(std::ostream&, const Mlp<float>&);
template void write_checkpoint<double>(std::ostream&, const Mlp<double>&);
template Mlp<float> read_checkpoint<float>(std::istream&);
template Mlp<double> read_checkpoint<double>(std::istream&);

void write_loss_history(std::ostream& out, std::span<const double> history) {
  out << "epoch,loss\n" << std::setprecision(17);
  for (std::size_t e = 0; e < history.size(); ++e) out << e << ',' << history[e] << '\n';
}

}  // namespace aenet
