#include "aenet/model_reduction.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>

#include "aenet/binary_io.hpp"
#include "aenet/errors.hpp"
#include "aenet/rng.hpp"

namespace aenet {

double max_abs_scale(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return 1.0;
  const double s = m.cwiseAbs().maxCoeff();
  return s > 0.0 ? s : 1.0;
}

std::uint64_t data_fingerprint(const Eigen::MatrixXd& m) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int b = 0; b < 8; ++b) {
      h ^= (v >> (8 * b)) & 0xFF;
      h *= 0x100000001b3ULL;
    }
  };
  mix(static_cast<std::uint64_t>(m.rows()));
  mix(static_cast<std::uint64_t>(m.cols()));
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      std::uint64_t bits;
      const double v = m(r, c);
      std::memcpy(&bits, &v, sizeof bits);
      mix(bits);
    }
  }
  return h;
}

// ---- PCA -------------------------------------------------------------------

Eigen::MatrixXd PcaModel::encode(const Eigen::MatrixXd& data) const {
  if (data.cols() != input_dim()) throw DimensionError("pca encode: width mismatch");
  return (data.rowwise() - mean.transpose()) * components;
}

Eigen::MatrixXd PcaModel::decode(const Eigen::MatrixXd& latents) const {
  if (latents.cols() != latent_dim()) throw DimensionError("pca decode: width mismatch");
  Eigen::MatrixXd out = latents * components.transpose();
  out.rowwise() += mean.transpose();
  return out;
}

Eigen::VectorXd PcaModel::encode_one(const Eigen::VectorXd& u) const {
  return encode(u.transpose()).row(0).transpose();
}

Eigen::VectorXd PcaModel::decode_one(const Eigen::VectorXd& z) const {
  return decode(z.transpose()).row(0).transpose();
}

PcaModel fit_pca(const Eigen::MatrixXd& data, int d) {
  const Eigen::Index n = data.rows();
  const Eigen::Index dim = data.cols();
  if (n < 2) throw ConfigError("PCA needs at least 2 samples");
  if (d < 1 || d > std::min(n, dim)) {
    throw ConfigError("PCA dimension " + std::to_string(d) + " outside [1, min(n, D)]");
  }
  PcaModel m;
  m.mean = data.colwise().mean().transpose();
  const Eigen::MatrixXd centred = data.rowwise() - m.mean.transpose();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centred, Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  Eigen::MatrixXd v = svd.matrixV();

  const double tol = std::max<double>(n, dim) * std::numeric_limits<double>::epsilon() *
                     (s.size() > 0 ? s(0) : 0.0);
  m.singular_values = s;
  m.spectrum = s.array().square() / static_cast<double>(n - 1);
  for (Eigen::Index k = 0; k < s.size(); ++k) {
    if (s(k) <= tol) m.spectrum(k) = 0.0;
  }
  // Sign convention: the largest-magnitude entry of each direction is positive.
  for (Eigen::Index k = 0; k < v.cols(); ++k) {
    Eigen::Index arg;
    v.col(k).cwiseAbs().maxCoeff(&arg);
    if (v(arg, k) < 0) v.col(k) *= -1.0;
  }
  m.components = v.leftCols(d);
  m.eigenvalues = m.spectrum.head(d);
  // Guard the completion: re-orthonormalize if the null-space directions drifted.
  const Eigen::MatrixXd gram = m.components.transpose() * m.components;
  if ((gram - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12) {
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m.components);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(dim, d);
    for (Eigen::Index k = 0; k < d; ++k) {
      if (q.col(k).dot(m.components.col(k)) < 0) q.col(k) *= -1.0;
    }
    m.components = q;
  }
  return m;
}

PcaModel truncate(const PcaModel& model, int d) {
  if (d < 1 || d > model.latent_dim()) throw ConfigError("PCA truncation out of range");
  PcaModel m = model;
  m.components = model.components.leftCols(d);
  m.eigenvalues = model.eigenvalues.head(d);
  return m;
}

// ---- autoencoder -----------------------------------------------------------

Eigen::MatrixXd AutoEncoder::encode(const Eigen::MatrixXd& data) const {
  const Matrix<float> x = (data / input_scale).cast<float>();
  return encoder.forward(x).cast<double>();
}

Eigen::MatrixXd AutoEncoder::decode(const Eigen::MatrixXd& latents) const {
  return decoder.forward(latents.cast<float>()).cast<double>() * input_scale;
}

namespace {

std::vector<int> chain(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

AutoEncoderResult train_autoencoder(const Eigen::MatrixXd& data, int d_ae,
                                    const AutoEncoderArch& arch,
                                    const TrainConfig& cfg,
                                    const QuadratureRule& rule,
                                    std::uint64_t init_seed) {
  if (d_ae < 1) throw ConfigError("autoencoder latent dimension must be >= 1");
  if (data.rows() == 0) throw ConfigError("autoencoder training data is empty");
  if (static_cast<std::size_t>(data.cols()) != rule.grid().size()) {
    throw DimensionError("autoencoder data width differs from the quadrature grid");
  }
  const int dim = static_cast<int>(data.cols());
  AutoEncoderResult result;
  AutoEncoder& ae = result.model;
  ae.latent_dim = d_ae;
  ae.input_scale = max_abs_scale(data);
  ae.fingerprint = data_fingerprint(data);
  const auto enc_dims = chain(dim, arch.encoder_hidden, d_ae);
  const auto dec_dims = chain(d_ae, arch.decoder_hidden, dim);
  ae.encoder = Mlp<float>::he_uniform(std::span<const int>(enc_dims),
                                      derive_seed(init_seed, "encoder"));
  ae.decoder = Mlp<float>::he_uniform(std::span<const int>(dec_dims),
                                      derive_seed(init_seed, "decoder"));

  const Matrix<float> x = (data / ae.input_scale).cast<float>();
  AdamState<float> adam;
  ForwardTape<float> enc_tape, dec_tape;
  MlpGradients<float> enc_grads, dec_grads;
  Matrix<float> d_recon;
  result.history = run_minibatch_epochs(x.rows(), cfg, [&](std::span<const Index> rows) {
    const Matrix<float> xb = gather_rows(x, rows);
    const Matrix<float> z = ae.encoder.forward(xb, enc_tape);
    const Matrix<float> recon = ae.decoder.forward(z, dec_tape);
    const double loss = weighted_mse(recon, xb, rule.weights(), &d_recon);
    const Matrix<float> dz = ae.decoder.backward(dec_tape, d_recon, dec_grads);
    ae.encoder.backward(enc_tape, dz, enc_grads);
    auto params = ae.encoder.parameter_blocks();
    auto dec_params = ae.decoder.parameter_blocks();
    params.insert(params.end(), dec_params.begin(), dec_params.end());
    auto grads = gradient_blocks(enc_grads);
    auto dec_g = gradient_blocks(dec_grads);
    grads.insert(grads.end(), dec_g.begin(), dec_g.end());
    adam_step<float>(params, grads, adam, cfg.learning_rate);
    return loss;
  });
  return result;
}

// ---- diagnostics -----------------------------------------------------------

RelativeErrorStats relative_errors(const Eigen::MatrixXd& pred,
                                   const Eigen::MatrixXd& target,
                                   std::span<const double> weights) {
  if (pred.rows() != target.rows() || pred.cols() != target.cols()) {
    throw DimensionError("relative error: prediction and target shapes differ");
  }
  if (static_cast<Eigen::Index>(weights.size()) != target.cols()) {
    throw DimensionError("relative error: weights do not match the grid");
  }
  Eigen::Map<const Eigen::VectorXd> w(weights.data(), target.cols());
  RelativeErrorStats s;
  for (Eigen::Index r = 0; r < target.rows(); ++r) {
    const double den = std::sqrt((target.row(r).array().square() * w.transpose().array()).sum());
    if (!(den > 0.0)) {
      ++s.excluded;
      continue;
    }
    const double num = std::sqrt(
        ((pred.row(r) - target.row(r)).array().square() * w.transpose().array()).sum());
    s.per_sample.push_back(num / den);
  }
  s.used = s.per_sample.size();
  if (s.used > 0) {
    double sum = 0;
    for (double v : s.per_sample) sum += v;
    s.mean = sum / static_cast<double>(s.used);
    double var = 0;
    for (double v : s.per_sample) var += (v - s.mean) * (v - s.mean);
    s.stddev = s.used > 1 ? std::sqrt(var / static_cast<double>(s.used - 1)) : 0.0;
  }
  return s;
}

RelativeErrorStats projection_error(const PcaModel& model, const Eigen::MatrixXd& data,
                                    const QuadratureRule& rule) {
  return relative_errors(model.reconstruct(data), data, rule.weights());
}

RelativeErrorStats projection_error(const AutoEncoder& model,
                                    const Eigen::MatrixXd& data,
                                    const QuadratureRule& rule) {
  return relative_errors(model.reconstruct(data), data, rule.weights());
}

LatentTable latent_features(const AutoEncoder& ae, const Eigen::MatrixXd& data,
                            std::span<const IntrinsicParams> params) {
  if (static_cast<Eigen::Index>(params.size()) != data.rows()) {
    throw DimensionError("latent features: parameter count differs from sample count");
  }
  LatentTable t;
  const Eigen::MatrixXd z = ae.encode(data);
  for (Eigen::Index k = 0; k < z.cols(); ++k) t.columns.push_back("z" + std::to_string(k + 1));
  t.columns.push_back("a");
  t.columns.push_back("h");
  t.values.resize(z.rows(), z.cols() + 2);
  t.values.leftCols(z.cols()) = z;
  for (Eigen::Index r = 0; r < z.rows(); ++r) {
    t.values(r, z.cols()) = params[static_cast<std::size_t>(r)].a;
    t.values(r, z.cols() + 1) = params[static_cast<std::size_t>(r)].h;
  }
  return t;
}

LinearFit fit_linear(const Eigen::MatrixXd& features, const Eigen::VectorXd& target) {
  if (features.rows() != target.size() || features.rows() < 2) {
    throw DimensionError("linear fit: feature and target counts differ");
  }
  Eigen::MatrixXd design(features.rows(), features.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(features.cols()) = features;
  LinearFit fit;
  fit.coefficients = design.colPivHouseholderQr().solve(target);
  const Eigen::VectorXd yhat = design * fit.coefficients;
  const Eigen::VectorXd a = yhat.array() - yhat.mean();
  const Eigen::VectorXd b = target.array() - target.mean();
  const double den = a.norm() * b.norm();
  fit.correlation = den > 0 ? a.dot(b) / den : 0.0;
  return fit;
}

// ---- persistence -----------------------------------------------------------

namespace {
constexpr std::uint32_t kPcaVersion = 1;
constexpr std::uint32_t kAeVersion = 1;
}  // namespace

void write_pca(std::ostream& out, const PcaModel& m) {
  out.write("AEPCA", 5);
  io::write_le(out, kPcaVersion);
  io::write_vector(out, m.mean);
  io::write_matrix(out, m.components);
  io::write_vector(out, m.eigenvalues);
  io::write_vector(out, m.spectrum);
  io::write_vector(out, m.singular_values);
  if (!out) throw IoError("failed writing PCA model");
}

PcaModel read_pca(std::istream& in) {
  io::expect_magic(in, "AEPCA");
  if (io::read_le<std::uint32_t>(in) != kPcaVersion) throw IoError("unsupported PCA version");
  PcaModel m;
  m.mean = io::read_vector(in);
  m.components = io::read_matrix(in);
  m.eigenvalues = io::read_vector(in);
  m.spectrum = io::read_vector(in);
  m.singular_values = io::read_vector(in);
  if (m.components.rows() != m.mean.size() || m.components.cols() != m.eigenvalues.size()) {
    throw IoError("PCA model shapes are inconsistent");
  }
  return m;
}

void write_autoencoder(std::ostream& out, const AutoEncoder& ae) {
  out.write("AEAUTO", 6);
  io::write_le(out, kAeVersion);
  io::write_le<std::int32_t>(out, ae.latent_dim);
  io::write_le(out, ae.input_scale);
  io::write_le(out, ae.fingerprint);
  write_checkpoint(out, ae.encoder);
  write_checkpoint(out, ae.decoder);
  if (!out) throw IoError("failed writing autoencoder");
}

AutoEncoder read_autoencoder(std::istream& in) {
  io::expect_magic(in, "AEAUTO");
  if (io::read_le<std::uint32_t>(in) != kAeVersion) {
    throw IoError("unsupported autoencoder version");
  }
  AutoEncoder ae;
  ae.latent_dim = io::read_le<std::int32_t>(in);
  ae.input_scale = io::read_le<double>(in);
  ae.fingerprint = io::read_le<std::uint64_t>(in);
  ae.encoder = read_checkpoint<float>(in);
  ae.decoder = read_checkpoint<float>(in);
  if (ae.encoder.output_dim() != ae.latent_dim || ae.decoder.input_dim() != ae.latent_dim) {
    throw IoError("autoencoder latent dimensions are inconsistent");
  }
  return ae;
}

}  // namespace aenet
