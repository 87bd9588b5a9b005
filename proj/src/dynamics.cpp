#include "qsw/dynamics.hpp"

#include "qsw/errors.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace qsw {

using cd = std::complex<double>;

void QswConfig::validate(int n_nodes) const {
  if (!(p >= 0.0 && p <= 1.0)) throw UsageError("p must be in [0,1]");
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw UsageError("gamma must be >= 0");
  if (sink_site >= n_nodes || (sink_site < 0 && sink_site != -1))
    throw UsageError("sink site out of range");
}

void IntegratorSettings::validate() const {
  if (dt < 0.0 || !std::isfinite(dt)) throw UsageError("dt must be >= 0");
  if (!(dt_scale > 0.0) || !std::isfinite(dt_scale)) throw UsageError("dt_scale must be > 0");
  if (max_samples < 2) throw UsageError("max_samples must be >= 2");
}

std::string InitialState::describe() const {
  return kind == Kind::mixture ? "mixture" : "site:" + std::to_string(site);
}

void InitialState::validate(int n_nodes) const {
  if (kind == Kind::site && (site < 0 || site >= n_nodes))
    throw UsageError("initial site out of range");
}

QswGenerator::QswGenerator(const Graph& g, const QswConfig& cfg)
    : n_(g.num_nodes()),
      sink_(cfg.resolved_sink(g.num_nodes())),
      p_(cfg.p),
      gamma_(cfg.gamma),
      convention_(cfg.convention) {
  cfg.validate(n_);
  offsets_.resize(n_ + 1);
  offsets_[0] = 0;
  for (int v = 0; v < n_; ++v) {
    const auto& nb = g.neighbors(v);
    if (nb.empty()) throw ConstructionError("isolated node " + std::to_string(v));
    offsets_[v + 1] = offsets_[v] + static_cast<int>(nb.size());
    nbr_.insert(nbr_.end(), nb.begin(), nb.end());
  }
  invdeg_.resize(n_);
  for (int v = 0; v < n_; ++v) invdeg_[v] = 1.0 / g.degree(v);
  if (convention_ == AmplitudeConvention::literal) {
    // column sums of T.^2; T(i,j) = invdeg(j) on edges
    w2_.assign(n_, 0.0);
    for (int j = 0; j < n_; ++j)
      w2_[j] = static_cast<double>(g.degree(j)) * invdeg_[j] * invdeg_[j];
  }

  // operator norm of A by power iteration; 5% headroom since the Rayleigh
  // quotient approaches lambda_max from below
  Eigen::VectorXd v = Eigen::VectorXd::Ones(n_);
  v.normalize();
  Eigen::VectorXd w(n_);
  double lam = 1.0;
  for (int it = 0; it < 100; ++it) {
    for (int i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int t = offsets_[i]; t < offsets_[i + 1]; ++t) acc += v[nbr_[t]];
      w[i] = acc;
    }
    lam = v.dot(w);
    double nw = w.norm();
    if (nw == 0.0) break;
    v = w / nw;
  }
  norm_estimate_ = std::max(1.0, 1.05 * lam);
}

double QswGenerator::default_dt(const IntegratorSettings& s) const {
  if (s.dt > 0.0) return s.dt;
  return 0.05 / std::max(norm_estimate_, gamma_) * s.dt_scale;
}

void QswGenerator::derivative(const Eigen::MatrixXcd& rho, Eigen::MatrixXcd& drho,
                              double& dsunk) const {
  const int n = n_;
  if (m_.rows() != n) m_.resize(n, n);
  const cd* r = rho.data();
  cd* m = m_.data();
  cd* d = drho.data();

  // m = rho * A: column c sums the neighbor columns of rho
  for (int c = 0; c < n; ++c) {
    cd* mc = m + static_cast<size_t>(c) * n;
    int b = offsets_[c], e = offsets_[c + 1];
    const cd* src = r + static_cast<size_t>(nbr_[b]) * n;
    std::copy(src, src + n, mc);
    for (int t = b + 1; t < e; ++t) {
      const cd* s2 = r + static_cast<size_t>(nbr_[t]) * n;
      for (int i = 0; i < n; ++i) mc[i] += s2[i];
    }
  }

  // [A, rho] = m^dagger - m for Hermitian rho; fold in the elementwise decay
  // -(dec_i + dec_j) rho_ij. Tiled so the transposed reads stay in L1.
  const cd ham(0.0, -(1.0 - p_));
  const double halfp = 0.5 * p_;
  constexpr int kTile = 32;
  for (int jb = 0; jb < n; jb += kTile) {
    const int je = std::min(jb + kTile, n);
    for (int ib = 0; ib < n; ib += kTile) {
      const int ie = std::min(ib + kTile, n);
      for (int j = jb; j < je; ++j) {
        const cd* mcol = m + static_cast<size_t>(j) * n;
        const cd* rcol = r + static_cast<size_t>(j) * n;
        cd* dcol = d + static_cast<size_t>(j) * n;
        const double dec_j =
            convention_ == AmplitudeConvention::literal ? halfp * w2_[j] : halfp;
        for (int i = ib; i < ie; ++i) {
          const double dec_i =
              convention_ == AmplitudeConvention::literal ? halfp * w2_[i] : halfp;
          const cd mji = m[static_cast<size_t>(i) * n + j];
          dcol[i] = ham * (std::conj(mji) - mcol[i]) - (dec_i + dec_j) * rcol[i];
        }
      }
    }
  }

  // hopping gain on the diagonal: p * sum_k T_ik q_k (T.^2 for literal)
  for (int i = 0; i < n; ++i) {
    double acc = 0.0;
    for (int t = offsets_[i]; t < offsets_[i + 1]; ++t) {
      int k = nbr_[t];
      double w = convention_ == AmplitudeConvention::literal ? invdeg_[k] * invdeg_[k]
                                                             : invdeg_[k];
      acc += w * r[static_cast<size_t>(k) * n + k].real();
    }
    d[static_cast<size_t>(i) * n + i] += p_ * acc;
  }

  // sink: -gamma {P_s, rho}; (s,s) is hit by both the row and the column pass
  const int s = sink_;
  cd* dcol_s = d + static_cast<size_t>(s) * n;
  const cd* rcol_s = r + static_cast<size_t>(s) * n;
  for (int i = 0; i < n; ++i) {
    dcol_s[i] -= gamma_ * rcol_s[i];
    d[static_cast<size_t>(i) * n + s] -= gamma_ * r[static_cast<size_t>(i) * n + s];
  }
  dsunk = 2.0 * gamma_ * rcol_s[s].real();
}

Eigen::MatrixXcd initial_density(const InitialState& init, int n_nodes) {
  init.validate(n_nodes);
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(n_nodes, n_nodes);
  if (init.kind == InitialState::Kind::site)
    rho(init.site, init.site) = 1.0;
  else
    rho.diagonal().setConstant(1.0 / n_nodes);
  return rho;
}

double purity(const Eigen::MatrixXcd& rho) { return rho.squaredNorm(); }

namespace {

// One classic RK4 step of rho and of the absorbed weight. The absorbed weight
// uses the same stage combination, so tr(rho) + sunk is a discrete invariant
// of the step (the generator is trace-compatible by construction).
struct Rk4 {
  const QswGenerator& gen;
  Eigen::MatrixXcd k, acc, tmp;

  explicit Rk4(const QswGenerator& g)
      : gen(g), k(g.dim(), g.dim()), acc(g.dim(), g.dim()), tmp(g.dim(), g.dim()) {}

  void step(Eigen::MatrixXcd& y, double& sunk, double dt) {
    double sk = 0.0, sacc = 0.0;
    gen.derivative(y, k, sk);  // k1
    acc = k;
    sacc = sk;
    tmp = y + (0.5 * dt) * k;
    gen.derivative(tmp, k, sk);  // k2
    acc += 2.0 * k;
    sacc += 2.0 * sk;
    tmp = y + (0.5 * dt) * k;
    gen.derivative(tmp, k, sk);  // k3
    acc += 2.0 * k;
    sacc += 2.0 * sk;
    tmp = y + dt * k;
    gen.derivative(tmp, k, sk);  // k4
    acc += k;
    sacc += sk;
    y += (dt / 6.0) * acc;
    sunk += (dt / 6.0) * sacc;
  }
};

double trace_real(const Eigen::MatrixXcd& rho) {
  double t = 0.0;
  for (int i = 0; i < rho.rows(); ++i) t += rho(i, i).real();
  return t;
}

}  // namespace

Trajectory evolve_qsw(const Graph& g, const QswConfig& cfg, const InitialState& init,
                      double t_final, const IntegratorSettings& settings) {
  settings.validate();
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw UsageError("t_final must be > 0");
  const int n = g.num_nodes();
  init.validate(n);
  QswGenerator gen(g, cfg);
  const double dt0 = gen.default_dt(settings);
  const long long steps = std::max<long long>(1, static_cast<long long>(std::ceil(t_final / dt0)));
  const double dt = t_final / static_cast<double>(steps);
  const long long stride = std::max<long long>(1, steps / (settings.max_samples - 1));

  Eigen::MatrixXcd rho = initial_density(init, n);
  double sunk = 0.0;
  Rk4 rk(gen);

  Trajectory out;
  out.dt_used = dt;
  out.steps = steps;
  out.times.push_back(0.0);
  out.efficiency.push_back(0.0);
  if (settings.record_populations)
    out.populations.push_back(rho.diagonal().real());

  double last_e = 0.0;
  for (long long s = 1; s <= steps; ++s) {
    rk.step(rho, sunk, dt);
    const double drift = std::abs(trace_real(rho) + sunk - 1.0);
    out.conservation_drift = std::max(out.conservation_drift, drift);
    if (!(drift < 1e-4))
      throw IntegratorError("conservation broke at t=" + std::to_string(s * dt) +
                            " (drift " + std::to_string(drift) + "); reduce dt");
    if (s % stride == 0 || s == steps) {
      if (!std::isfinite(sunk))
        throw IntegratorError("state blew up at t=" + std::to_string(s * dt));
      if (sunk < last_e - 1e-9)
        throw IntegratorError("efficiency decreased at t=" + std::to_string(s * dt));
      if (sunk > 1.0 + 1e-6)
        throw IntegratorError("efficiency exceeded 1 at t=" + std::to_string(s * dt));
      last_e = sunk;
      out.times.push_back(s * dt);
      out.efficiency.push_back(sunk);
      if (settings.record_populations)
        out.populations.push_back(rho.diagonal().real());
    }
  }
  out.final_state = std::move(rho);
  return out;
}

double transfer_efficiency(const Graph& g, const QswConfig& cfg, const InitialState& init,
                           double t_bar, const IntegratorSettings& settings) {
  IntegratorSettings s = settings;
  s.record_populations = false;
  return evolve_qsw(g, cfg, init, t_bar, s).final_efficiency();
}

TbarResult select_tbar(const Graph& g, const QswConfig& cfg, const InitialState& init,
                       const IntegratorSettings& settings) {
  settings.validate();
  const int n = g.num_nodes();
  init.validate(n);
  static const double kProbes[] = {0.0, 0.1, 0.5, 1.0};
  constexpr int kNumProbes = 4;
  constexpr double kThreshold = 0.99;
  constexpr int kDoublings = 6;  // cap = 5N * 2^6

  std::vector<QswGenerator> gens;
  std::vector<Rk4> steppers;
  std::vector<Eigen::MatrixXcd> rhos;
  double sunk[kNumProbes] = {0, 0, 0, 0};
  gens.reserve(kNumProbes);
  steppers.reserve(kNumProbes);
  for (int j = 0; j < kNumProbes; ++j) {
    QswConfig c = cfg;
    c.p = kProbes[j];
    gens.emplace_back(g, c);
    steppers.emplace_back(gens.back());
    rhos.push_back(initial_density(init, n));
  }

  TbarResult res;
  double prev_t = 0.0;
  for (int k = 0; k <= kDoublings; ++k) {
    const double target = 5.0 * n * std::pow(2.0, k);
    for (int j = 0; j < kNumProbes; ++j) {
      const double dt0 = gens[j].default_dt(settings);
      const double span = target - prev_t;
      const long long steps =
          std::max<long long>(1, static_cast<long long>(std::ceil(span / dt0)));
      const double dt = span / static_cast<double>(steps);
      for (long long s = 0; s < steps; ++s) steppers[j].step(rhos[j], sunk[j], dt);
      if (!std::isfinite(sunk[j]))
        throw IntegratorError("probe p=" + std::to_string(kProbes[j]) + " blew up");
    }
    prev_t = target;
    res.t_bar = target;
    res.best_efficiency = *std::max_element(sunk, sunk + kNumProbes);
    if (res.best_efficiency >= kThreshold) {
      res.threshold_met = true;
      return res;
    }
  }
  res.threshold_met = false;
  return res;
}

InvariantSubspace invariant_subspace(const Graph& g, int sink_site) {
  const int n = g.num_nodes();
  if (sink_site < 0) sink_site = n - 1;
  if (sink_site >= n) throw UsageError("sink site out of range");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.adjacency());
  const Eigen::VectorXd& vals = es.eigenvalues();
  const Eigen::MatrixXd& vecs = es.eigenvectors();
  const double tol = 1e-8 * std::max(1.0, std::abs(vals(n - 1)));

  InvariantSubspace out;
  out.projector = Eigen::MatrixXd::Zero(n, n);
  int lo = 0;
  while (lo < n) {
    int hi = lo + 1;
    while (hi < n && vals(hi) - vals(hi - 1) <= tol) ++hi;
    const int m = hi - lo;
    Eigen::MatrixXd v = vecs.middleCols(lo, m);
    Eigen::VectorXd r = v.row(sink_site).transpose();
    const double rn = r.norm();
    if (rn <= 1e-12) {
      // the whole cluster is invisible at the sink
      out.projector += v * v.transpose();
      out.dimension += m;
    } else if (m > 1) {
      Eigen::VectorXd u = v * (r / rn);
      out.projector += v * v.transpose() - u * u.transpose();
      out.dimension += m - 1;
    }
    lo = hi;
  }
  return out;
}

namespace {

// generic vector RK4 with the same sampling scheme as the density version
template <typename Deriv>
CrwTrajectory integrate_vec(const Eigen::VectorXd& q0, double t_final, double dt,
                            int max_samples, Deriv&& f) {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw UsageError("t_final must be > 0");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw UsageError("dt must be > 0");
  const long long steps = std::max<long long>(1, static_cast<long long>(std::ceil(t_final / dt)));
  const double h = t_final / static_cast<double>(steps);
  const long long stride = std::max<long long>(1, steps / (std::max(2, max_samples) - 1));

  Eigen::VectorXd q = q0, k(q0.size()), acc(q0.size()), tmp(q0.size());
  double sunk = 0.0;
  CrwTrajectory out;
  out.dt_used = h;
  out.times.push_back(0.0);
  out.states.push_back(q);
  out.efficiency.push_back(0.0);
  for (long long s = 1; s <= steps; ++s) {
    double sk = 0.0, sacc = 0.0;
    f(q, k, sk);
    acc = k;
    sacc = sk;
    tmp = q + (0.5 * h) * k;
    f(tmp, k, sk);
    acc += 2.0 * k;
    sacc += 2.0 * sk;
    tmp = q + (0.5 * h) * k;
    f(tmp, k, sk);
    acc += 2.0 * k;
    sacc += 2.0 * sk;
    tmp = q + h * k;
    f(tmp, k, sk);
    acc += k;
    sacc += sk;
    q += (h / 6.0) * acc;
    sunk += (h / 6.0) * sacc;
    if (!q.allFinite()) throw IntegratorError("classical walk blew up; reduce dt");
    if (s % stride == 0 || s == steps) {
      out.times.push_back(s * h);
      out.states.push_back(q);
      out.efficiency.push_back(sunk);
    }
  }
  return out;
}

}  // namespace

CrwTrajectory crw_evolve(const Eigen::MatrixXd& t_matrix, const Eigen::VectorXd& q0,
                         double t_final, double dt, int max_samples) {
  if (t_matrix.rows() != t_matrix.cols() || t_matrix.rows() != q0.size())
    throw UsageError("transition matrix and state size mismatch");
  return integrate_vec(q0, t_final, dt, max_samples,
                       [&](const Eigen::VectorXd& q, Eigen::VectorXd& k, double& sk) {
                         k.noalias() = t_matrix * q;
                         k -= q;
                         sk = 0.0;
                       });
}

CrwTrajectory crw_sink_evolve(const Graph& g, double gamma, int sink_site,
                              const Eigen::VectorXd& q0, double t_final, double dt,
                              int max_samples) {
  const int n = g.num_nodes();
  if (q0.size() != n) throw UsageError("initial state size mismatch");
  if (sink_site < 0) sink_site = n - 1;
  if (sink_site >= n) throw UsageError("sink site out of range");
  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    double w = 1.0 / g.degree(j);
    for (int i : g.neighbors(j)) t(i, j) = w;
  }
  // |T - 1| <= 2, so 0.05 / max(2, 2 gamma) matches the quantum step rule
  if (dt <= 0.0) dt = 0.05 / std::max(2.0, 2.0 * gamma);
  const int s = sink_site;
  return integrate_vec(q0, t_final, dt, max_samples,
                       [&, s, gamma](const Eigen::VectorXd& q, Eigen::VectorXd& k, double& sk) {
                         k.noalias() = t * q;
                         k -= q;
                         k[s] -= 2.0 * gamma * q[s];
                         sk = 2.0 * gamma * q[s];
                       });
}

Eigen::VectorXd crw_stationary(const Graph& g) {
  const int n = g.num_nodes();
  Eigen::VectorXd q(n);
  double total = 0.0;
  for (int v = 0; v < n; ++v) {
    q[v] = g.degree(v);
    total += q[v];
  }
  return q / total;
}

double classical_efficiency(const Graph& g, double gamma, int sink_site,
                            const Eigen::VectorXd& q0, double t) {
  const int n = g.num_nodes();
  if (q0.size() != n) throw UsageError("initial state size mismatch");
  if (sink_site < 0) sink_site = n - 1;
  if (sink_site >= n) throw UsageError("sink site out of range");
  if (!(t >= 0.0) || !std::isfinite(t)) throw UsageError("t must be >= 0");
  Eigen::VectorXd dsqrt(n), dinv(n);
  for (int v = 0; v < n; ++v) {
    if (g.degree(v) == 0) throw ConstructionError("isolated node " + std::to_string(v));
    dsqrt[v] = std::sqrt(static_cast<double>(g.degree(v)));
    dinv[v] = 1.0 / dsqrt[v];
  }
  // S = D^(-1/2) A D^(-1/2) - 1 - 2 gamma P_s
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    double w = dinv[e.first] * dinv[e.second];
    s(e.first, e.second) = w;
    s(e.second, e.first) = w;
  }
  s.diagonal().array() -= 1.0;
  s(sink_site, sink_site) -= 2.0 * gamma;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s);
  Eigen::VectorXd y = es.eigenvectors().transpose() * (dinv.asDiagonal() * q0);
  for (int i = 0; i < n; ++i) y[i] *= std::exp(es.eigenvalues()[i] * t);
  Eigen::VectorXd q = dsqrt.asDiagonal() * (es.eigenvectors() * y);
  return 1.0 - q.sum();
}

}  // namespace qsw
