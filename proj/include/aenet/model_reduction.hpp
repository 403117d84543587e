#pragma once

// Stage I: linear (PCA) and nonlinear (autoencoder) reduction of
// discretized functions, with projection-error diagnostics.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "aenet/discretization.hpp"
#include "aenet/pde_data.hpp"
#include "aenet/tensor_nn.hpp"

namespace aenet {

/// Largest absolute entry; 1 for an all-zero matrix so dividing by it is safe.
double max_abs_scale(const Eigen::MatrixXd& m);

/// Stable 64-bit hash of a matrix's shape and bytes.
std::uint64_t data_fingerprint(const Eigen::MatrixXd& m);

// ---- PCA -------------------------------------------------------------------

struct PcaModel {
  Eigen::VectorXd mean;          // D
  Eigen::MatrixXd components;    // D x d, orthonormal columns
  Eigen::VectorXd eigenvalues;   // d, descending
  Eigen::VectorXd spectrum;      // all eigenvalues of the sample covariance
  Eigen::VectorXd singular_values;

  Eigen::Index input_dim() const { return components.rows(); }
  Eigen::Index latent_dim() const { return components.cols(); }

  /// Rows of `data` to latent rows: components^T (u - mean).
  Eigen::MatrixXd encode(const Eigen::MatrixXd& data) const;
  /// Latent rows back to data rows: mean + components z.
  Eigen::MatrixXd decode(const Eigen::MatrixXd& latents) const;
  Eigen::VectorXd encode_one(const Eigen::VectorXd& u) const;
  Eigen::VectorXd decode_one(const Eigen::VectorXd& z) const;
  Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& data) const {
    return decode(encode(data));
  }
};

/// Mean-centred thin SVD. Eigenvalues are s^2 / (n - 1). Directions beyond
/// the numerical rank get eigenvalue 0 and an orthonormal completion.
PcaModel fit_pca(const Eigen::MatrixXd& data, int d);

/// The same model truncated to its leading d components.
PcaModel truncate(const PcaModel& model, int d);

// ---- autoencoder -----------------------------------------------------------

struct AutoEncoderArch {
  std::vector<int> encoder_hidden{500, 500, 500, 500};
  std::vector<int> decoder_hidden{500, 500, 500};
};

/// Encoder D -> hidden -> d_ae and decoder d_ae -> hidden -> D (affine
/// output). Inputs are divided by `input_scale` before encoding, so the
/// encoder sees data in [-1, 1].
struct AutoEncoder {
  Mlp<float> encoder;
  Mlp<float> decoder;
  int latent_dim = 0;
  double input_scale = 1.0;
  std::uint64_t fingerprint = 0;

  Eigen::MatrixXd encode(const Eigen::MatrixXd& data) const;
  Eigen::MatrixXd decode(const Eigen::MatrixXd& latents) const;
  Eigen::MatrixXd reconstruct(const Eigen::MatrixXd& data) const {
    return decode(encode(data));
  }
};

struct AutoEncoderResult {
  AutoEncoder model;
  std::vector<double> history;
};

/// Joint training of encoder and decoder on the quadrature-weighted
/// reconstruction loss, in float.
AutoEncoderResult train_autoencoder(const Eigen::MatrixXd& data, int d_ae,
                                    const AutoEncoderArch& arch,
                                    const TrainConfig& cfg,
                                    const QuadratureRule& rule,
                                    std::uint64_t init_seed);

// ---- diagnostics -----------------------------------------------------------

struct RelativeErrorStats {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t used = 0;
  std::size_t excluded = 0;  // zero-norm rows
  std::vector<double> per_sample;
};

/// Per-row ||pred - target||_S / ||target||_S; rows with zero target norm
/// are skipped and counted.
RelativeErrorStats relative_errors(const Eigen::MatrixXd& pred,
                                   const Eigen::MatrixXd& target,
                                   std::span<const double> weights);

/// Mean over rows of ||u - reconstruct(u)||_S / ||u||_S.
RelativeErrorStats projection_error(const PcaModel& model, const Eigen::MatrixXd& data,
                                    const QuadratureRule& rule);
RelativeErrorStats projection_error(const AutoEncoder& model,
                                    const Eigen::MatrixXd& data,
                                    const QuadratureRule& rule);

/// Encoder outputs joined with the intrinsic parameters: columns
/// z_1..z_d, a, h.
struct LatentTable {
  std::vector<std::string> columns;
  Eigen::MatrixXd values;
};
LatentTable latent_features(const AutoEncoder& ae, const Eigen::MatrixXd& data,
                            std::span<const IntrinsicParams> params);

/// Coefficients (c0, c1, ..., cd) of the least-squares fit
/// target ~ c0 + sum_k ck z_k and the correlation of the fit with the target.
struct LinearFit {
  Eigen::VectorXd coefficients;
  double correlation = 0.0;
};
LinearFit fit_linear(const Eigen::MatrixXd& features, const Eigen::VectorXd& target);

// ---- persistence -----------------------------------------------------------

void write_pca(std::ostream& out, const PcaModel& m);
PcaModel read_pca(std::istream& in);
void write_autoencoder(std::ostream& out, const AutoEncoder& ae);
AutoEncoder read_autoencoder(std::istream& in);

}  // namespace aenet
