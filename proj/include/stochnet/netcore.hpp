#pragma once

#include <cstdint>
#include <optional>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace stochnet {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense weighted interaction matrix. Entry (i, j) is the influence of node j
/// on node i, so row sums are in-strengths and column sums out-strengths.
class NetworkMatrix {
 public:
  explicit NetworkMatrix(Matrix weights);

  static NetworkMatrix uniform(Eigen::Index n, double value);

  Eigen::Index size() const noexcept { return weights_.rows(); }
  const Matrix& weights() const noexcept { return weights_; }
  double operator()(Eigen::Index i, Eigen::Index j) const { return weights_(i, j); }

  NetworkMatrix scaled(double factor) const;
  /// Simultaneous row/column relabeling: node perm[k] of this network becomes node k.
  NetworkMatrix permuted(const std::vector<Eigen::Index>& perm) const;

 private:
  Matrix weights_;
};

struct StrengthVectors {
  Vector s_in;   // row sums
  Vector s_out;  // column sums
};

StrengthVectors strengths(const NetworkMatrix& a);

/// Out-strength weighted average L(x) = <s_out . x> / <s_out>.
///
/// Normalizing by a sum of mixed-sign strengths is allowed as long as the sum
/// is not (numerically) zero, which is the case for competitive GLV matrices
/// whose total weight is negative.
class MeanField {
 public:
  explicit MeanField(Vector s_out);

  double operator()(const Eigen::Ref<const Vector>& x) const;
  Eigen::Index size() const noexcept { return s_out_.size(); }
  const Vector& s_out() const noexcept { return s_out_; }
  double total() const noexcept { return total_; }

  /// Variance rate of L(W) for independent unit Wiener processes W_j:
  /// sum_j (s_out_j / sum s_out)^2.
  double noise_variance_rate() const;

 private:
  Vector s_out_;
  double total_;
};

double mean_field(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& s_out);

/// Plant/animal interaction incidence; plants index rows, animals columns.
struct BipartiteIncidence {
  Eigen::MatrixXi y;
  std::vector<std::string> row_labels;  // plants
  std::vector<std::string> col_labels;  // animals

  Eigen::Index n_plants() const noexcept { return y.rows(); }
  Eigen::Index n_animals() const noexcept { return y.cols(); }
  Eigen::VectorXi plant_degrees() const { return y.rowwise().sum(); }
  Eigen::VectorXi animal_degrees() const { return y.colwise().sum().transpose(); }

  void validate() const;
};

/// Throws IsolatedSpecies naming the first species with no interaction.
void require_connected(const BipartiteIncidence& inc);

/// Throws unless `perm` is a permutation of 0..n-1.
void check_permutation(const std::vector<Eigen::Index>& perm, Eigen::Index n);

/// All n*n entries iid normal(mu_a, mu_a / 3).
NetworkMatrix gen_ou_network(Eigen::Index n, double mu_a, std::uint64_t seed);

/// Four-block mutualistic matrix [[Omega_pp, Gamma_pa], [Gamma_ap, Omega_aa]].
///
/// Omega entries (diagonal included) are uniform on [-2/S - beta_max, beta_max]
/// with S the guild size, giving mean -1/S. Gamma entries are
/// gamma * y_ij / k_i with one gamma ~ normal(mu_gamma, |mu_gamma| / 3) drawn per
/// interacting pair and k_i the degree of the receiving species.
///
/// When `self_regulation` is given the Omega diagonal is overwritten with it after
/// all draws, so the off-diagonal entries do not depend on the choice.
NetworkMatrix gen_mutualistic(const BipartiteIncidence& inc, double mu_gamma, double beta_max,
                              std::uint64_t seed, std::optional<double> self_regulation = std::nullopt);

BipartiteIncidence load_incidence(const std::filesystem::path& path);
BipartiteIncidence parse_incidence(const std::string& text);

NetworkMatrix load_matrix_csv(const std::filesystem::path& path);
NetworkMatrix parse_matrix_csv(const std::string& text);
void save_matrix_csv(const NetworkMatrix& a, const std::filesystem::path& path);
std::string format_matrix_csv(const NetworkMatrix& a);

}  // namespace stochnet
