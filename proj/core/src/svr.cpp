#include "posauth/svr.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "posauth/error.hpp"

namespace posauth {

namespace {

constexpr double kTau = 1e-12;

double dot(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) s += a[k] * b[k];
  return s;
}

double squared_distance(const double* a, const double* b, std::size_t d) {
  double s = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    const double t = a[k] - b[k];
    s += t * t;
  }
  return s;
}

/// Dual of epsilon-SVR over 2l variables in the usual stacked form:
///   min 0.5 a'Qa + p'a  s.t.  y'a = 0, 0 <= a <= C,
/// where t < l carries alpha_t (y = +1, p = eps - z) and t >= l carries
/// alpha*_(t-l) (y = -1, p = eps + z), Q_ts = y_t y_s k(x_t, x_s).
/// Variables stuck at a bound are shrunk out of the active set periodically.
class SmoSolver {
 public:
  SmoSolver(const FeatureMatrix& x, std::span<const double> z, const SvrParams& params,
            double gamma)
      : x_(x), l_(static_cast<std::size_t>(x.rows())), d_(static_cast<std::size_t>(x.cols())),
        params_(params), gamma_(gamma), z_(z.begin(), z.end()) {
    alpha_.assign(2 * l_, 0.0);
    grad_.resize(2 * l_);
    for (std::size_t t = 0; t < 2 * l_; ++t) grad_[t] = linear_term(t);
    diag_.resize(l_);
    for (std::size_t q = 0; q < l_; ++q) diag_[q] = kernel(q, row(q));
    row_i_.resize(l_);
    row_j_.resize(l_);
    direction_.resize(d_);
    active_.resize(2 * l_);
    for (std::size_t t = 0; t < 2 * l_; ++t) active_[t] = t;
  }

  void solve(std::size_t max_iter, SvrFitInfo& info) {
    std::size_t iter = 0;
    std::size_t counter = std::min<std::size_t>(2 * l_, 1000) + 1;
    double gap = std::numeric_limits<double>::infinity();
    while (true) {
      if (--counter == 0) {
        counter = std::min<std::size_t>(2 * l_, 1000);
        shrink();
      }
      std::size_t i = 0;
      std::size_t j = 0;
      if (!select_working_set(i, j, gap)) {
        if (active_.size() == 2 * l_) break;
        reconstruct_gradient();
        counter = 1;
        if (!select_working_set(i, j, gap)) break;
      }
      if (iter >= max_iter) {
        info.iterations = iter;
        info.kkt_violation = gap;
        throw NonConvergence("SMO did not converge within " + std::to_string(max_iter) +
                                 " iterations; maximal KKT violation " + std::to_string(gap),
                             gap);
      }
      update_pair(i, j);
      ++iter;
    }
    info.iterations = iter;
    info.kkt_violation = std::max(gap, 0.0);
  }

  /// beta_q = alpha_q - alpha*_q.
  std::vector<double> dual_coefficients() const {
    std::vector<double> beta(l_);
    for (std::size_t q = 0; q < l_; ++q) beta[q] = alpha_[q] - alpha_[q + l_];
    return beta;
  }

  double bias() const {
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double sum_free = 0.0;
    std::size_t n_free = 0;
    for (std::size_t t = 0; t < 2 * l_; ++t) {
      const double y = sign(t);
      const double yg = y * grad_[t];
      if (at_upper(t)) {
        if (y < 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else if (at_lower(t)) {
        if (y > 0) ub = std::min(ub, yg);
        else lb = std::max(lb, yg);
      } else {
        ++n_free;
        sum_free += yg;
      }
    }
    const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : 0.5 * (ub + lb);
    return -rho;
  }

 private:
  const double* row(std::size_t q) const { return x_.data() + q * d_; }
  double sign(std::size_t t) const { return t < l_ ? 1.0 : -1.0; }
  std::size_t sample(std::size_t t) const { return t < l_ ? t : t - l_; }
  bool at_upper(std::size_t t) const { return alpha_[t] >= params_.c; }
  bool at_lower(std::size_t t) const { return alpha_[t] <= 0.0; }
  double linear_term(std::size_t t) const {
    return t < l_ ? params_.epsilon - z_[t] : params_.epsilon + z_[t - l_];
  }

  double kernel(std::size_t q, const double* other) const {
    if (params_.kernel == KernelType::linear) return dot(row(q), other, d_);
    return std::exp(-gamma_ * squared_distance(row(q), other, d_));
  }

  void kernel_row(std::size_t q, std::vector<double>& out) const {
    const double* xq = row(q);
    for (std::size_t t : active_) {
      const std::size_t s = sample(t);
      out[s] = kernel(s, xq);
    }
  }

  // Maximal violating pair with second-order selection of j, over the active set.
  bool select_working_set(std::size_t& out_i, std::size_t& out_j, double& gap) {
    double gmax = -std::numeric_limits<double>::infinity();
    std::ptrdiff_t i = -1;
    for (std::size_t t : active_) {
      if (t < l_) {
        if (!at_upper(t) && -grad_[t] >= gmax) {
          gmax = -grad_[t];
          i = static_cast<std::ptrdiff_t>(t);
        }
      } else if (!at_lower(t) && grad_[t] >= gmax) {
        gmax = grad_[t];
        i = static_cast<std::ptrdiff_t>(t);
      }
    }
    if (i < 0) {
      gap = 0.0;
      return false;
    }
    const auto ti = static_cast<std::size_t>(i);
    const std::size_t si = sample(ti);
    const double yi = sign(ti);
    kernel_row(si, row_i_);

    double gmax2 = -std::numeric_limits<double>::infinity();
    double best = std::numeric_limits<double>::infinity();
    std::ptrdiff_t j = -1;
    for (std::size_t t : active_) {
      const std::size_t st = sample(t);
      const double yt = sign(t);
      const double qit = yi * yt * row_i_[st];
      if (t < l_) {
        if (at_lower(t)) continue;
        const double grad_diff = gmax + grad_[t];
        gmax2 = std::max(gmax2, grad_[t]);
        if (grad_diff > 0.0) {
          double quad = diag_[si] + diag_[st] - 2.0 * yi * qit;
          if (quad <= 0.0) quad = kTau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= best) {
            best = obj;
            j = static_cast<std::ptrdiff_t>(t);
          }
        }
      } else {
        if (at_upper(t)) continue;
        const double grad_diff = gmax - grad_[t];
        gmax2 = std::max(gmax2, -grad_[t]);
        if (grad_diff > 0.0) {
          double quad = diag_[si] + diag_[st] + 2.0 * yi * qit;
          if (quad <= 0.0) quad = kTau;
          const double obj = -(grad_diff * grad_diff) / quad;
          if (obj <= best) {
            best = obj;
            j = static_cast<std::ptrdiff_t>(t);
          }
        }
      }
    }
    gap = gmax + gmax2;
    if (gap < params_.tolerance || j < 0) return false;
    out_i = ti;
    out_j = static_cast<std::size_t>(j);
    return true;
  }

  bool be_shrunk(std::size_t t, double gmax1, double gmax2) const {
    const double g = grad_[t];
    if (at_upper(t)) return sign(t) > 0 ? -g > gmax1 : -g > gmax2;
    if (at_lower(t)) return sign(t) > 0 ? g > gmax2 : g > gmax1;
    return false;
  }

  void shrink() {
    double gmax1 = -std::numeric_limits<double>::infinity();  // -y G over the up set
    double gmax2 = -std::numeric_limits<double>::infinity();  // y G over the low set
    for (std::size_t t : active_) {
      const double yg = sign(t) * grad_[t];
      const bool up = sign(t) > 0 ? !at_upper(t) : !at_lower(t);
      const bool low = sign(t) > 0 ? !at_lower(t) : !at_upper(t);
      if (up) gmax1 = std::max(gmax1, -yg);
      if (low) gmax2 = std::max(gmax2, yg);
    }
    if (!unshrunk_ && gmax1 + gmax2 <= params_.tolerance * 10.0) {
      unshrunk_ = true;
      reconstruct_gradient();
    }
    std::erase_if(active_, [&](std::size_t t) { return be_shrunk(t, gmax1, gmax2); });
  }

  // Restores exact gradients for every variable and reactivates all of them.
  void reconstruct_gradient() {
    if (params_.kernel == KernelType::linear) {
      std::fill(direction_.begin(), direction_.end(), 0.0);
      for (std::size_t q = 0; q < l_; ++q) {
        const double beta = alpha_[q] - alpha_[q + l_];
        if (beta == 0.0) continue;
        const double* xq = row(q);
        for (std::size_t k = 0; k < d_; ++k) direction_[k] += beta * xq[k];
      }
      for (std::size_t q = 0; q < l_; ++q) {
        const double f = dot(row(q), direction_.data(), d_);
        grad_[q] = f + linear_term(q);
        grad_[q + l_] = -f + linear_term(q + l_);
      }
    } else {
      for (std::size_t q = 0; q < l_; ++q) {
        double f = 0.0;
        for (std::size_t s = 0; s < l_; ++s) {
          const double beta = alpha_[s] - alpha_[s + l_];
          if (beta != 0.0) f += beta * kernel(s, row(q));
        }
        grad_[q] = f + linear_term(q);
        grad_[q + l_] = -f + linear_term(q + l_);
      }
    }
    active_.resize(2 * l_);
    for (std::size_t t = 0; t < 2 * l_; ++t) active_[t] = t;
  }

  void update_pair(std::size_t i, std::size_t j) {
    const double c = params_.c;
    const double yi = sign(i);
    const double yj = sign(j);
    const std::size_t si = sample(i);
    const std::size_t sj = sample(j);
    const double qij = yi * yj * row_i_[sj];
    const double old_ai = alpha_[i];
    const double old_aj = alpha_[j];
    double& ai = alpha_[i];
    double& aj = alpha_[j];

    if (yi != yj) {
      double quad = diag_[si] + diag_[sj] + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[i] - grad_[j]) / quad;
      const double diff = ai - aj;
      ai += delta;
      aj += delta;
      if (diff > 0.0) {
        if (aj < 0.0) {
          aj = 0.0;
          ai = diff;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = -diff;
      }
      if (diff > 0.0) {
        if (ai > c) {
          ai = c;
          aj = c - diff;
        }
      } else if (aj > c) {
        aj = c;
        ai = c + diff;
      }
    } else {
      double quad = diag_[si] + diag_[sj] - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[i] - grad_[j]) / quad;
      const double sum = ai + aj;
      ai -= delta;
      aj += delta;
      if (sum > c) {
        if (ai > c) {
          ai = c;
          aj = sum - c;
        }
      } else if (aj < 0.0) {
        aj = 0.0;
        ai = sum;
      }
      if (sum > c) {
        if (aj > c) {
          aj = c;
          ai = sum - c;
        }
      } else if (ai < 0.0) {
        ai = 0.0;
        aj = sum;
      }
    }

    // G_t += Q_ti dai + Q_tj daj = y_t * (y_i dai k(s_i, s_t) + y_j daj k(s_j, s_t)).
    const double wi = yi * (ai - old_ai);
    const double wj = yj * (aj - old_aj);
    if (params_.kernel == KernelType::linear) {
      const double* xi = row(si);
      const double* xj = row(sj);
      for (std::size_t k = 0; k < d_; ++k) direction_[k] = wi * xi[k] + wj * xj[k];
      for (std::size_t t : active_) {
        const double delta_q = dot(row(sample(t)), direction_.data(), d_);
        grad_[t] += t < l_ ? delta_q : -delta_q;
      }
    } else {
      kernel_row(sj, row_j_);
      for (std::size_t t : active_) {
        const std::size_t s = sample(t);
        const double delta_q = wi * row_i_[s] + wj * row_j_[s];
        grad_[t] += t < l_ ? delta_q : -delta_q;
      }
    }
  }

  const FeatureMatrix& x_;
  std::size_t l_;
  std::size_t d_;
  SvrParams params_;
  double gamma_;
  std::vector<double> z_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::vector<double> diag_;
  std::vector<double> row_i_;
  std::vector<double> row_j_;
  std::vector<double> direction_;
  std::vector<std::size_t> active_;
  bool unshrunk_ = false;
};

}  // namespace

double kernel_value(KernelType kernel, double gamma, std::span<const double> a,
                    std::span<const double> b) {
  if (a.size() != b.size()) throw InvalidArgument("kernel arguments differ in dimension");
  if (kernel == KernelType::linear) return dot(a.data(), b.data(), a.size());
  return std::exp(-gamma * squared_distance(a.data(), b.data(), a.size()));
}

SvrModel::SvrModel(KernelType kernel, double gamma, FeatureMatrix support_vectors,
                   std::vector<double> coefficients, double bias)
    : kernel_(kernel),
      gamma_(gamma),
      support_vectors_(std::move(support_vectors)),
      coefficients_(std::move(coefficients)),
      bias_(bias) {
  if (static_cast<std::size_t>(support_vectors_.rows()) != coefficients_.size()) {
    throw InvalidArgument("support vector count does not match coefficient count");
  }
  if (kernel_ == KernelType::linear) {
    weights_.assign(static_cast<std::size_t>(support_vectors_.cols()), 0.0);
    for (Eigen::Index s = 0; s < support_vectors_.rows(); ++s) {
      for (Eigen::Index k = 0; k < support_vectors_.cols(); ++k) {
        weights_[static_cast<std::size_t>(k)] +=
            coefficients_[static_cast<std::size_t>(s)] * support_vectors_(s, k);
      }
    }
  }
}

SvrModel::SvrModel(std::vector<double> weights, double bias)
    : kernel_(KernelType::linear), weights_(std::move(weights)), bias_(bias) {}

SvrModel SvrModel::fit(const FeatureMatrix& x, std::span<const double> y, const SvrParams& params,
                       SvrFitInfo* info) {
  if (y.empty() || static_cast<std::size_t>(x.rows()) != y.size() || x.cols() == 0) {
    throw InvalidArgument("SVR training needs a non-empty feature matrix matching the labels");
  }
  if (!(params.c > 0.0)) throw InvalidArgument("SVR C must be positive");
  if (!(params.epsilon >= 0.0)) throw InvalidArgument("SVR epsilon must be non-negative");
  if (!(params.tolerance > 0.0)) throw InvalidArgument("SVR tolerance must be positive");
  const double gamma = params.gamma > 0.0 ? params.gamma : 1.0 / static_cast<double>(x.cols());
  const std::size_t max_iter =
      params.max_iterations > 0 ? params.max_iterations
                                : std::max<std::size_t>(10'000'000, 100 * y.size());

  SmoSolver solver(x, y, params, gamma);
  SvrFitInfo local;
  solver.solve(max_iter, local);

  local.dual_coefficients = solver.dual_coefficients();
  const double bias = solver.bias();

  std::vector<Eigen::Index> support;
  for (std::size_t q = 0; q < local.dual_coefficients.size(); ++q) {
    if (local.dual_coefficients[q] != 0.0) support.push_back(static_cast<Eigen::Index>(q));
  }
  FeatureMatrix sv(static_cast<Eigen::Index>(support.size()), x.cols());
  std::vector<double> coef;
  coef.reserve(support.size());
  for (std::size_t s = 0; s < support.size(); ++s) {
    sv.row(static_cast<Eigen::Index>(s)) = x.row(support[s]);
    coef.push_back(local.dual_coefficients[static_cast<std::size_t>(support[s])]);
  }
  if (info != nullptr) *info = std::move(local);
  return SvrModel(params.kernel, gamma, std::move(sv), std::move(coef), bias);
}

double SvrModel::predict(std::span<const double> features) const {
  if (kernel_ == KernelType::linear) {
    if (features.size() != weights_.size()) {
      throw InvalidArgument("SVR expects " + std::to_string(weights_.size()) + " features, got " +
                            std::to_string(features.size()));
    }
    return dot(weights_.data(), features.data(), features.size()) + bias_;
  }
  if (features.size() != static_cast<std::size_t>(support_vectors_.cols())) {
    throw InvalidArgument("SVR expects " + std::to_string(support_vectors_.cols()) +
                          " features, got " + std::to_string(features.size()));
  }
  double f = bias_;
  const auto d = features.size();
  for (Eigen::Index s = 0; s < support_vectors_.rows(); ++s) {
    const double* sv = support_vectors_.data() + static_cast<std::size_t>(s) * d;
    f += coefficients_[static_cast<std::size_t>(s)] *
         std::exp(-gamma_ * squared_distance(sv, features.data(), d));
  }
  return f;
}

}  // namespace posauth
