#include "stochnet/netcore.hpp"

#include <cmath>
#include <random>
#include <string>

#include "stochnet/error.hpp"
#include "stochnet/io.hpp"

namespace stochnet {

NetworkMatrix::NetworkMatrix(Matrix weights) : weights_(std::move(weights)) {
  if (weights_.rows() < 1) throw Error(ErrorCode::InvalidParameter, "network needs at least one node");
  if (weights_.rows() != weights_.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "interaction matrix must be square, got " +
                                                  std::to_string(weights_.rows()) + "x" +
                                                  std::to_string(weights_.cols()));
  }
  if (!weights_.allFinite()) throw Error(ErrorCode::InvalidParameter, "interaction matrix has non-finite entries");
}

NetworkMatrix NetworkMatrix::uniform(Eigen::Index n, double value) {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "network needs at least one node");
  return NetworkMatrix(Matrix::Constant(n, n, value));
}

NetworkMatrix NetworkMatrix::scaled(double factor) const { return NetworkMatrix(weights_ * factor); }

void check_permutation(const std::vector<Eigen::Index>& perm, Eigen::Index n) {
  if (static_cast<Eigen::Index>(perm.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "permutation length differs from node count");
  }
  std::vector<bool> hit(perm.size(), false);
  for (const auto k : perm) {
    if (k < 0 || k >= n || hit[static_cast<std::size_t>(k)]) {
      throw Error(ErrorCode::InvalidParameter, "not a permutation of 0.." + std::to_string(n - 1));
    }
    hit[static_cast<std::size_t>(k)] = true;
  }
}

NetworkMatrix NetworkMatrix::permuted(const std::vector<Eigen::Index>& perm) const {
  const auto n = size();
  check_permutation(perm, n);
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) out(i, j) = weights_(perm[i], perm[j]);
  }
  return NetworkMatrix(std::move(out));
}

StrengthVectors strengths(const NetworkMatrix& a) {
  return {a.weights().rowwise().sum(), a.weights().colwise().sum().transpose()};
}

MeanField::MeanField(Vector s_out) : s_out_(std::move(s_out)), total_(s_out_.sum()) {
  const double scale = s_out_.cwiseAbs().sum();
  if (!std::isfinite(total_) || scale == 0.0 || std::abs(total_) <= 1e-12 * scale) {
    throw Error(ErrorCode::ZeroTotalStrength,
                "total out-strength is zero; the mean-field operator is undefined");
  }
}

double MeanField::operator()(const Eigen::Ref<const Vector>& x) const {
  if (x.size() != s_out_.size()) {
    throw Error(ErrorCode::DimensionMismatch, "state length " + std::to_string(x.size()) +
                                                  " differs from network size " +
                                                  std::to_string(s_out_.size()));
  }
  return s_out_.dot(x) / total_;
}

double MeanField::noise_variance_rate() const { return (s_out_ / total_).squaredNorm(); }

double mean_field(const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& s_out) {
  return MeanField(s_out)(x);
}

void BipartiteIncidence::validate() const {
  if (static_cast<Eigen::Index>(row_labels.size()) != y.rows() ||
      static_cast<Eigen::Index>(col_labels.size()) != y.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "incidence label counts do not match its dimensions");
  }
  if (y.rows() < 1 || y.cols() < 1) throw Error(ErrorCode::InvalidParameter, "incidence needs both guilds");
  for (Eigen::Index i = 0; i < y.rows(); ++i) {
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
      if (y(i, j) != 0 && y(i, j) != 1) {
        throw Error(ErrorCode::InvalidParameter, "incidence entries must be 0 or 1");
      }
    }
  }
}

void require_connected(const BipartiteIncidence& inc) {
  const auto kp = inc.plant_degrees();
  for (Eigen::Index i = 0; i < kp.size(); ++i) {
    if (kp(i) == 0) throw Error(ErrorCode::IsolatedSpecies, "plant '" + inc.row_labels[i] + "' has no partner");
  }
  const auto ka = inc.animal_degrees();
  for (Eigen::Index j = 0; j < ka.size(); ++j) {
    if (ka(j) == 0) throw Error(ErrorCode::IsolatedSpecies, "animal '" + inc.col_labels[j] + "' has no partner");
  }
}

NetworkMatrix gen_ou_network(Eigen::Index n, double mu_a, std::uint64_t seed) {
  if (n < 1) throw Error(ErrorCode::InvalidParameter, "n must be >= 1");
  if (!(mu_a > 0.0) || !std::isfinite(mu_a)) throw Error(ErrorCode::InvalidParameter, "mu_A must be > 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> draw(mu_a, mu_a / 3.0);
  Matrix a(n, n);
  // Row-major fill so the draw order is independent of Eigen's storage order.
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = draw(rng);
  }
  return NetworkMatrix(std::move(a));
}

namespace {

void fill_competition(Matrix& a, Eigen::Index offset, Eigen::Index size, double beta_max, std::mt19937_64& rng) {
  const double lo = -2.0 / static_cast<double>(size) - beta_max;
  std::uniform_real_distribution<double> draw(lo, beta_max);
  for (Eigen::Index i = 0; i < size; ++i) {
    for (Eigen::Index j = 0; j < size; ++j) a(offset + i, offset + j) = draw(rng);
  }
}

}  // namespace

NetworkMatrix gen_mutualistic(const BipartiteIncidence& inc, double mu_gamma, double beta_max, std::uint64_t seed,
                              std::optional<double> self_regulation) {
  inc.validate();
  if (!std::isfinite(mu_gamma)) throw Error(ErrorCode::InvalidParameter, "mu_gamma must be finite");
  if (!(beta_max < 0.0)) throw Error(ErrorCode::InvalidParameter, "beta_max must be negative");
  if (self_regulation && !std::isfinite(*self_regulation)) {
    throw Error(ErrorCode::InvalidParameter, "self_regulation must be finite");
  }
  const auto np = inc.n_plants();
  const auto na = inc.n_animals();
  for (const auto s : {np, na}) {
    // The uniform support [-2/S - beta_max, beta_max] is empty when beta_max < -1/S.
    if (beta_max < -1.0 / static_cast<double>(s)) {
      throw Error(ErrorCode::InvalidParameter,
                  "beta_max is below the competition mean -1/S for a guild of " + std::to_string(s));
    }
  }

  const auto n = np + na;
  Matrix a = Matrix::Zero(n, n);
  std::mt19937_64 rng(seed);
  fill_competition(a, 0, np, beta_max, rng);
  fill_competition(a, np, na, beta_max, rng);

  std::normal_distribution<double> gamma(mu_gamma, std::abs(mu_gamma) / 3.0);
  const auto kp = inc.plant_degrees();
  const auto ka = inc.animal_degrees();
  // Gamma_pa: plant i receives from animal j, traded off by the plant's degree.
  for (Eigen::Index i = 0; i < np; ++i) {
    for (Eigen::Index j = 0; j < na; ++j) {
      if (inc.y(i, j) == 1) a(i, np + j) = gamma(rng) / static_cast<double>(kp(i));
    }
  }
  // Gamma_ap: animal j receives from plant i.
  for (Eigen::Index j = 0; j < na; ++j) {
    for (Eigen::Index i = 0; i < np; ++i) {
      if (inc.y(i, j) == 1) a(np + j, i) = gamma(rng) / static_cast<double>(ka(j));
    }
  }
  if (self_regulation) a.diagonal().setConstant(*self_regulation);
  return NetworkMatrix(std::move(a));
}

BipartiteIncidence parse_incidence(const std::string& text) {
  const auto lines = io::split_lines(text);
  BipartiteIncidence inc;
  std::vector<std::vector<int>> rows;
  bool have_header = false;
  std::size_t width = 0;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = io::trim(lines[ln]);
    const auto where = "line " + std::to_string(ln + 1);
    if (line.empty()) continue;
    auto cells = io::split_csv_line(line);
    if (!have_header) {
      if (cells.size() < 2) throw Error(ErrorCode::ParseError, where + ": header needs at least one animal label");
      if (!cells.front().empty()) throw Error(ErrorCode::ParseError, where + ": header must start with a blank cell");
      inc.col_labels.assign(cells.begin() + 1, cells.end());
      width = cells.size();
      have_header = true;
      continue;
    }
    if (cells.size() != width) {
      throw Error(ErrorCode::ParseError, where + ": expected " + std::to_string(width) + " cells, found " +
                                             std::to_string(cells.size()));
    }
    inc.row_labels.push_back(cells.front());
    std::vector<int> row;
    row.reserve(width - 1);
    for (std::size_t c = 1; c < cells.size(); ++c) {
      if (cells[c] == "0") {
        row.push_back(0);
      } else if (cells[c] == "1") {
        row.push_back(1);
      } else {
        throw Error(ErrorCode::ParseError, where + ": cell " + std::to_string(c + 1) + " is '" + cells[c] +
                                               "', expected 0 or 1");
      }
    }
    rows.push_back(std::move(row));
  }
  if (!have_header) throw Error(ErrorCode::ParseError, "incidence file is empty");
  if (rows.empty()) throw Error(ErrorCode::ParseError, "incidence file has no plant rows");

  inc.y.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width - 1));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) {
      inc.y(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
  }
  inc.validate();
  return inc;
}

BipartiteIncidence load_incidence(const std::filesystem::path& path) {
  try {
    return parse_incidence(io::read_text(path));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::ParseError) throw;
    throw Error(ErrorCode::ParseError, path.string() + ": " + e.detail());
  }
}

NetworkMatrix parse_matrix_csv(const std::string& text) {
  const auto lines = io::split_lines(text);
  std::vector<std::vector<double>> rows;
  long declared = -1;
  for (std::size_t ln = 0; ln < lines.size(); ++ln) {
    const auto line = io::trim(lines[ln]);
    const auto where = "line " + std::to_string(ln + 1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      const auto pos = line.find("n=");
      if (pos != std::string_view::npos && rows.empty()) {
        double n = 0;
        if (!io::parse_double(line.substr(pos + 2), n) || n < 1 || n != std::floor(n)) {
          throw Error(ErrorCode::ParseError, where + ": malformed size comment");
        }
        declared = static_cast<long>(n);
      }
      continue;
    }
    std::vector<double> row;
    for (const auto& cell : io::split_csv_line(line)) {
      double v = 0;
      if (!io::parse_double(cell, v) || !std::isfinite(v)) {
        throw Error(ErrorCode::ParseError, where + ": '" + cell + "' is not a finite number");
      }
      row.push_back(v);
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw Error(ErrorCode::ParseError, where + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorCode::ParseError, "matrix file is empty");
  const auto n = rows.size();
  if (rows.front().size() != n) {
    throw Error(ErrorCode::DimensionMismatch, "matrix is " + std::to_string(n) + "x" + std::to_string(rows.front().size()) +
                                           ", expected square");
  }
  if (declared >= 0 && static_cast<std::size_t>(declared) != n) {
    throw Error(ErrorCode::ParseError, "size comment declares n=" + std::to_string(declared) + " but found " +
                                           std::to_string(n) + " rows");
  }
  Matrix a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return NetworkMatrix(std::move(a));
}

NetworkMatrix load_matrix_csv(const std::filesystem::path& path) { return parse_matrix_csv(io::read_text(path)); }

std::string format_matrix_csv(const NetworkMatrix& a) {
  std::string out = "# n=" + std::to_string(a.size()) + "\n";
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    for (Eigen::Index j = 0; j < a.size(); ++j) {
      if (j > 0) out += ',';
      out += io::format_double(a(i, j));
    }
    out += '\n';
  }
  return out;
}

void save_matrix_csv(const NetworkMatrix& a, const std::filesystem::path& path) {
  io::write_text(path, format_matrix_csv(a));
}

}  // namespace stochnet
