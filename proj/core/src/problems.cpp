#include "dualopt/problems.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <fmt/format.h>

#include "dualopt/errors.hpp"
#include "dualopt/fgm.hpp"

namespace dualopt {

Eigen::VectorXd AgentObjective::tangent_gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = gradient(x);
  if (domain() == Domain::kSimplex) g.array() -= g.mean();
  return g;
}

Eigen::VectorXd AgentObjective::conjugate_argmax(const Eigen::VectorXd&) const {
  throw MissingOracleError(fmt::format("{} objective has no conjugate oracle", kind()));
}

Eigen::VectorXd AgentObjective::regularized_conjugate_argmax(const Eigen::VectorXd&, double,
                                                             const Eigen::VectorXd&) const {
  throw MissingOracleError(
      fmt::format("{} objective has no regularized conjugate oracle", kind()));
}

// ---------------------------------------------------------------- quadratic

QuadraticObjective::QuadraticObjective(Eigen::MatrixXd Q, Eigen::VectorXd p, double r,
                                       std::string kind)
    : Q_(std::move(Q)), p_(std::move(p)), r_(r), kind_(std::move(kind)) {
  if (Q_.rows() != Q_.cols() || Q_.rows() != p_.size() || p_.size() == 0) {
    throw std::invalid_argument("quadratic: Q must be n x n and p of size n");
  }
  const double scale = std::max(1.0, Q_.cwiseAbs().maxCoeff());
  if ((Q_ - Q_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("quadratic: Q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Q_);
  evals_ = es.eigenvalues();
  V_ = es.eigenvectors();
  L_ = evals_.maxCoeff();
  if (evals_.minCoeff() < -1e-12 * std::max(1.0, L_)) {
    throw std::invalid_argument("quadratic: Q must be positive semi-definite");
  }
  const double lo = evals_.minCoeff();
  mu_ = lo > 1e-12 * L_ ? lo : 0.0;
  if (!(L_ > 0.0)) throw std::invalid_argument("quadratic: Q must be nonzero");
}

double QuadraticObjective::value(const Eigen::VectorXd& x) const {
  return 0.5 * x.dot(Q_ * x) - p_.dot(x) + r_;
}

Eigen::VectorXd QuadraticObjective::gradient(const Eigen::VectorXd& x) const {
  return Q_ * x - p_;
}

Eigen::VectorXd QuadraticObjective::shifted_solve(const Eigen::VectorXd& v, double shift) const {
  Eigen::VectorXd w = V_.transpose() * v;
  const double cut = 1e-12 * (L_ + shift);
  for (Eigen::Index k = 0; k < w.size(); ++k) {
    const double d = evals_(k) + shift;
    w(k) = d > cut ? w(k) / d : 0.0;
  }
  return V_ * w;
}

Eigen::VectorXd QuadraticObjective::conjugate_argmax(const Eigen::VectorXd& z) const {
  if (mu_ <= 0.0) {
    throw SingularSystemError(fmt::format("{} objective: Q is singular, no conjugate", kind_));
  }
  return shifted_solve(z + p_, 0.0);
}

Eigen::VectorXd QuadraticObjective::regularized_conjugate_argmax(
    const Eigen::VectorXd& z, double c, const Eigen::VectorXd& center) const {
  if (!(c > 0.0) && mu_ <= 0.0) throw SingularSystemError("regularized conjugate: singular system");
  return shifted_solve(z + p_ + c * center, c);
}

std::optional<Eigen::VectorXd> QuadraticObjective::closed_form_minimizer() const {
  return shifted_solve(p_, 0.0);
}

// ---------------------------------------------------------------- entropy

EntropyObjective::EntropyObjective(Eigen::VectorXd q, double mu) : q_(std::move(q)), mu_(mu) {
  if (q_.size() == 0 || (q_.array() <= 0.0).any() || std::abs(q_.sum() - 1.0) > 1e-10) {
    throw std::invalid_argument("entropy: q must lie in the simplex interior");
  }
  if (!(mu_ > 0.0)) throw std::invalid_argument("entropy: mu must be positive");
  log_q_ = q_.array().log().matrix();
}

double EntropyObjective::value(const Eigen::VectorXd& x) const {
  double s = 0.0;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x(j) > 0.0) s += x(j) * (std::log(x(j)) - log_q_(j));
  }
  return s;
}

Eigen::VectorXd EntropyObjective::gradient(const Eigen::VectorXd& x) const {
  return (x.array().log() - log_q_.array() + 1.0).matrix();
}

Eigen::VectorXd EntropyObjective::conjugate_argmax(const Eigen::VectorXd& z) const {
  Eigen::ArrayXd s = z.array() + log_q_.array();
  s -= s.maxCoeff();
  s = s.exp();
  return (s / s.sum()).matrix();
}

namespace {

// Root of u + c e^u = t. Newton from the right of the root is monotone for
// this convex increasing function; every starting candidate lies to the right.
double solve_log_linear(double t, double c) {
  if (c == 0.0) return t;
  double u = t > c ? std::min(t, std::log(t / c)) : std::min(t, 0.0);
  for (int it = 0; it < 200; ++it) {
    const double e = c * std::exp(u);
    const double step = (u + e - t) / (1.0 + e);
    u -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(u))) break;
  }
  return u;
}

}  // namespace

Eigen::VectorXd EntropyObjective::regularized_conjugate_argmax(
    const Eigen::VectorXd& z, double c, const Eigen::VectorXd& center) const {
  // Stationarity: log x_j + c x_j = s_j - nu, with nu fixed by sum x = 1.
  const Eigen::Index n = q_.size();
  const Eigen::ArrayXd s = z.array() + log_q_.array() - 1.0 + c * center.array();
  auto point = [&](double nu) {
    Eigen::ArrayXd x(n);
    for (Eigen::Index j = 0; j < n; ++j) x(j) = std::exp(solve_log_linear(s(j) - nu, c));
    return x;
  };
  const double dn = static_cast<double>(n);
  double hi = s.maxCoeff() - (std::log(1.0 / dn) + c / dn);  // every x_j <= 1/n
  double lo = s.minCoeff() - c;                               // every x_j >= 1
  double nu = 0.5 * (lo + hi);
  Eigen::ArrayXd x = point(nu);
  for (int it = 0; it < 200; ++it) {
    const double h = x.sum() - 1.0;
    if (std::abs(h) <= 1e-15) break;
    if (h > 0.0) lo = nu; else hi = nu;
    const double dh = -(x / (1.0 + c * x)).sum();
    double next = nu - h / dh;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == nu) break;
    nu = next;
    x = point(nu);
  }
  return (x / x.sum()).matrix();
}

// ---------------------------------------------------------------- logistic

LogisticObjective::LogisticObjective(Eigen::MatrixXd A, Eigen::VectorXd y, std::size_t m,
                                     std::size_t l, double c)
    : A_(std::move(A)), y_(std::move(y)), m_(static_cast<double>(m)),
      l_(static_cast<double>(l)), c_(c) {
  if (A_.rows() != y_.size() || A_.cols() == 0) {
    throw std::invalid_argument("logistic: A rows must match label count");
  }
  if (m == 0 || l == 0) throw std::invalid_argument("logistic: m and l must be positive");
  if (c < 0.0) throw std::invalid_argument("logistic: c must be nonnegative");
  for (Eigen::Index j = 0; j < y_.size(); ++j) {
    if (y_(j) != 1.0 && y_(j) != -1.0) throw std::invalid_argument("logistic: labels must be +-1");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A_.transpose() * A_,
                                                    Eigen::EigenvaluesOnly);
  L_ = es.eigenvalues().maxCoeff() / (8.0 * m_ * l_) + c_ / m_;
}

double LogisticObjective::value(const Eigen::VectorXd& x) const {
  const Eigen::ArrayXd t = y_.array() * (A_ * x).array();
  double s = 0.0;
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    s += std::log1p(std::exp(-std::abs(t(j)))) + std::max(-t(j), 0.0);
  }
  return s / (2.0 * m_ * l_) + c_ / (2.0 * m_) * x.squaredNorm();
}

Eigen::VectorXd LogisticObjective::gradient(const Eigen::VectorXd& x) const {
  const Eigen::ArrayXd t = y_.array() * (A_ * x).array();
  Eigen::VectorXd w(t.size());
  for (Eigen::Index j = 0; j < t.size(); ++j) {
    // sigma(-t), evaluated without overflow
    const double e = std::exp(-std::abs(t(j)));
    const double sig = t(j) >= 0.0 ? e / (1.0 + e) : 1.0 / (1.0 + e);
    w(j) = -y_(j) * sig;
  }
  return A_.transpose() * w / (2.0 * m_ * l_) + (c_ / m_) * x;
}

// ---------------------------------------------------------------- regularized

RegularizedObjective::RegularizedObjective(AgentPtr base, double c, Eigen::VectorXd center)
    : base_(std::move(base)), c_(c), center_(std::move(center)) {
  if (!base_) throw std::invalid_argument("regularize: null base");
  if (!(c_ > 0.0)) throw std::invalid_argument("regularize: modulus must be positive");
  if (center_.size() != static_cast<Eigen::Index>(base_->dim())) {
    throw std::invalid_argument("regularize: center dimension mismatch");
  }
}

double RegularizedObjective::value(const Eigen::VectorXd& x) const {
  return base_->value(x) + 0.5 * c_ * (x - center_).squaredNorm();
}

Eigen::VectorXd RegularizedObjective::gradient(const Eigen::VectorXd& x) const {
  return base_->gradient(x) + c_ * (x - center_);
}

Eigen::VectorXd RegularizedObjective::tangent_gradient(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g = gradient(x);
  if (domain() == Domain::kSimplex) g.array() -= g.mean();
  return g;
}

Eigen::VectorXd RegularizedObjective::conjugate_argmax(const Eigen::VectorXd& z) const {
  return base_->regularized_conjugate_argmax(z, c_, center_);
}

// ---------------------------------------------------------------- factories

AgentPtr make_quadratic(const Eigen::VectorXd& c, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("make_quadratic: scale must be positive");
  const auto n = c.size();
  return std::make_shared<QuadraticObjective>(scale * Eigen::MatrixXd::Identity(n, n), scale * c,
                                              0.5 * scale * c.squaredNorm());
}

AgentPtr make_quadratic(Eigen::MatrixXd Q, Eigen::VectorXd p, double r) {
  return std::make_shared<QuadraticObjective>(std::move(Q), std::move(p), r);
}

AgentPtr make_ridge(const Eigen::MatrixXd& H, const Eigen::VectorXd& b, std::size_t m,
                    std::size_t l, double c) {
  if (H.rows() != b.size()) throw std::invalid_argument("make_ridge: H rows must match b");
  if (m == 0 || l == 0) throw std::invalid_argument("make_ridge: m and l must be positive");
  if (c < 0.0) throw std::invalid_argument("make_ridge: c must be nonnegative");
  const double ml = static_cast<double>(m) * static_cast<double>(l);
  const auto n = H.cols();
  Eigen::MatrixXd Q = H.transpose() * H / ml + (c / static_cast<double>(m)) *
                                                    Eigen::MatrixXd::Identity(n, n);
  Q = 0.5 * (Q + Q.transpose()).eval();
  Eigen::VectorXd p = H.transpose() * b / ml;
  auto obj = std::make_shared<QuadraticObjective>(std::move(Q), std::move(p),
                                                  b.squaredNorm() / (2.0 * ml), "ridge");
  return obj;
}

AgentPtr make_entropy(const Eigen::VectorXd& q, double mu) {
  return std::make_shared<EntropyObjective>(q, mu);
}

AgentPtr make_logistic(const Eigen::MatrixXd& A, const Eigen::VectorXd& y, std::size_t m,
                       std::size_t l, double c) {
  return std::make_shared<LogisticObjective>(A, y, m, l, c);
}

std::shared_ptr<const RegularizedObjective> regularize(AgentPtr base, double c,
                                                       const Eigen::VectorXd& center) {
  return std::make_shared<RegularizedObjective>(std::move(base), c, center);
}

Eigen::VectorXd local_minimizer(const AgentObjective& agent, double tol) {
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(agent.dim()));
  if (agent.has_conjugate()) return agent.conjugate_argmax(zero);
  if (auto x = agent.closed_form_minimizer()) return *x;
  if (agent.domain() == Domain::kSimplex) {
    throw MissingOracleError("local_minimizer: simplex objective without conjugate oracle");
  }
  if (!(agent.mu() > 0.0) || !std::isfinite(agent.L())) {
    throw std::invalid_argument(
        "local_minimizer: agent must be strongly convex and smooth (regularize it first)");
  }
  const FgmParams params = FgmParams::from(agent.mu() / agent.L(), 1.0 / agent.L());
  const FgmResult res =
      fgm_minimize([&](const Eigen::VectorXd& x) { return agent.gradient(x); }, params, zero,
                   FgmStop{5'000'000, tol});
  if (!res.converged) {
    throw NumericalError(fmt::format("local_minimizer: gradient norm {} above tolerance {}",
                                     res.last_grad_norm, tol));
  }
  return res.x;
}

// ---------------------------------------------------------------- separable

SeparableObjective::SeparableObjective(std::vector<AgentPtr> agents) : agents_(std::move(agents)) {
  if (agents_.empty()) throw std::invalid_argument("separable objective needs agents");
  n_ = agents_.front()->dim();
  mu_ = kInf;
  for (const auto& a : agents_) {
    if (!a) throw std::invalid_argument("null agent objective");
    if (a->dim() != n_) throw std::invalid_argument("agents must share the same dimension");
    mu_ = std::min(mu_, a->mu());
    L_ = std::max(L_, a->L());
    M_ = std::max(M_, a->M());
    mu_sum_ += a->mu();
  }
}

bool SeparableObjective::dual_friendly() const {
  return std::all_of(agents_.begin(), agents_.end(),
                     [](const AgentPtr& a) { return a->has_conjugate(); });
}

bool SeparableObjective::uniform_kind(std::string_view kind) const {
  return std::all_of(agents_.begin(), agents_.end(),
                     [&](const AgentPtr& a) { return a->kind() == kind; });
}

namespace {

void check_stacked(const Eigen::VectorXd& x, std::size_t m, std::size_t n) {
  if (x.size() != static_cast<Eigen::Index>(m * n)) {
    throw std::invalid_argument(
        fmt::format("stacked vector has {} entries, expected {}", x.size(), m * n));
  }
}

}  // namespace

double SeparableObjective::value(const Eigen::VectorXd& stacked) const {
  check_stacked(stacked, agents_.size(), n_);
  const auto n = static_cast<Eigen::Index>(n_);
  double s = 0.0;
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    s += agents_[i]->value(stacked.segment(static_cast<Eigen::Index>(i) * n, n));
  }
  return s;
}

Eigen::VectorXd SeparableObjective::gradient(const Eigen::VectorXd& stacked) const {
  check_stacked(stacked, agents_.size(), n_);
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::VectorXd g(stacked.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto off = static_cast<Eigen::Index>(i) * n;
    g.segment(off, n) = agents_[i]->gradient(stacked.segment(off, n));
  }
  return g;
}

Eigen::VectorXd SeparableObjective::tangent_gradient(const Eigen::VectorXd& stacked) const {
  check_stacked(stacked, agents_.size(), n_);
  const auto n = static_cast<Eigen::Index>(n_);
  Eigen::VectorXd g(stacked.size());
  for (std::size_t i = 0; i < agents_.size(); ++i) {
    const auto off = static_cast<Eigen::Index>(i) * n;
    g.segment(off, n) = agents_[i]->tangent_gradient(stacked.segment(off, n));
  }
  return g;
}

Eigen::VectorXd SeparableObjective::stack(const Eigen::VectorXd& x) const {
  return x.replicate(static_cast<Eigen::Index>(agents_.size()), 1);
}

// ---------------------------------------------------------------- datasets

std::vector<DataShard> load_csv_dataset(const std::string& path, std::size_t m) {
  if (m == 0) throw std::invalid_argument("load_csv_dataset: m must be positive");
  std::ifstream in(path);
  if (!in) throw std::runtime_error(fmt::format("cannot read dataset '{}'", path));
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw std::runtime_error(
            fmt::format("{}:{}: non-numeric cell '{}'", path, line_no, cell));
      }
    }
    if (row.size() < 2) {
      throw std::runtime_error(fmt::format("{}:{}: need features and a label", path, line_no));
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw std::runtime_error(fmt::format("{}:{}: inconsistent column count", path, line_no));
    }
    if (row.back() != 1.0 && row.back() != -1.0) {
      throw std::invalid_argument(
          fmt::format("{}:{}: label {} is not +-1", path, line_no, row.back()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.size() < m) {
    throw std::invalid_argument(
        fmt::format("dataset has {} rows, fewer than {} agents", rows.size(), m));
  }
  const auto features = static_cast<Eigen::Index>(rows.front().size() - 1);
  std::vector<DataShard> shards(m);
  std::size_t next = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t count = rows.size() / m + (i < rows.size() % m ? 1 : 0);
    auto& sh = shards[i];
    sh.A.resize(static_cast<Eigen::Index>(count), features);
    sh.y.resize(static_cast<Eigen::Index>(count));
    for (std::size_t r = 0; r < count; ++r, ++next) {
      const auto rr = static_cast<Eigen::Index>(r);
      for (Eigen::Index j = 0; j < features; ++j) sh.A(rr, j) = rows[next][static_cast<std::size_t>(j)];
      sh.y(rr) = rows[next].back();
    }
  }
  return shards;
}

}  // namespace dualopt
