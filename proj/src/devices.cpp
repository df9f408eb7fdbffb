#include "rplace/devices.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "rplace/dual.hpp"
#include "rplace/errors.hpp"
#include "rplace/riccati.hpp"

namespace rplace {
namespace {

void check_param(const DeviceFamily& f, const Vector& v, const char* what) {
  if (v.size() != f.param_dim()) {
    throw DimensionMismatch(std::string(what) + " has length " + std::to_string(v.size()) +
                            ", expected " + std::to_string(f.param_dim()));
  }
  if (!v.allFinite()) throw InvalidArgument(std::string(what) + " has non-finite entries");
}

}  // namespace

std::vector<Matrix> DeviceFamily::dG_basis(const Vector& p) const {
  std::vector<Matrix> out;
  out.reserve(param_dim());
  for (int j = 0; j < param_dim(); ++j) out.push_back(dG(p, Vector::Unit(param_dim(), j)));
  return out;
}

GaussianActuators::GaussianActuators(Vector grid, double sigma, double r_weight, int actuators)
    : grid_(std::move(grid)), sigma_(sigma), r_(r_weight), actuators_(actuators) {
  if (grid_.size() == 0) throw InvalidArgument("actuator grid is empty");
  if (!(sigma_ > 0.0) || !std::isfinite(sigma_)) throw InvalidArgument("sigma must be positive");
  if (!(r_ > 0.0) || !std::isfinite(r_)) throw InvalidArgument("control weight must be positive");
  if (actuators_ < 1) throw InvalidArgument("need at least one actuator");
}

Vector GaussianActuators::profile(double x) const {
  const double s2 = sigma_ * sigma_;
  return ((grid_.array() - x).square() / (-2.0 * s2)).exp().matrix();
}

Vector GaussianActuators::profile_d1(double x) const {
  const double s2 = sigma_ * sigma_;
  return (profile(x).array() * (grid_.array() - x) / s2).matrix();
}

Vector GaussianActuators::profile_d2(double x) const {
  const double s2 = sigma_ * sigma_;
  const Eigen::ArrayXd u = (grid_.array() - x) / s2;
  return (profile(x).array() * (u.square() - 1.0 / s2)).matrix();
}

Matrix GaussianActuators::G(const Vector& p) const {
  const Index n = grid_.size();
  Matrix out = Matrix::Zero(n, n);
  for (int j = 0; j < actuators_; ++j) {
    const Vector b = profile(p(j));
    out.noalias() += b * b.transpose();
  }
  return out / r_;
}

Matrix GaussianActuators::dG(const Vector& p, const Vector& q) const {
  const Index n = grid_.size();
  Matrix out = Matrix::Zero(n, n);
  for (int j = 0; j < actuators_; ++j) {
    if (q(j) == 0.0) continue;
    const Vector b = profile(p(j));
    const Vector db = profile_d1(p(j));
    const Matrix t = db * b.transpose();
    out += q(j) * (t + t.transpose());
  }
  return out / r_;
}

Matrix GaussianActuators::d2G(const Vector& p, const Vector& q, const Vector& r) const {
  const Index n = grid_.size();
  Matrix out = Matrix::Zero(n, n);
  for (int j = 0; j < actuators_; ++j) {
    const double w = q(j) * r(j);
    if (w == 0.0) continue;
    const Vector b = profile(p(j));
    const Vector db = profile_d1(p(j));
    const Vector d2b = profile_d2(p(j));
    const Matrix t = d2b * b.transpose();
    out += w * (t + t.transpose() + 2.0 * db * db.transpose());
  }
  return out / r_;
}

std::vector<Matrix> GaussianActuators::dG_basis(const Vector& p) const {
  std::vector<Matrix> out;
  out.reserve(actuators_);
  for (int j = 0; j < actuators_; ++j) {
    const Vector b = profile(p(j));
    const Vector db = profile_d1(p(j));
    const Matrix t = db * b.transpose();
    out.push_back((t + t.transpose()) / r_);
  }
  return out;
}

double GaussianActuators::trace_closed_form(const Vector& p) const {
  double s = 0.0;
  for (int j = 0; j < actuators_; ++j) s += profile(p(j)).squaredNorm();
  return s / r_;
}

Matrix eval_G(const DeviceFamily& family, const Vector& p) {
  check_param(family, p, "p");
  return family.G(p);
}

Matrix eval_dG(const DeviceFamily& family, const Vector& p, const Vector& q) {
  check_param(family, p, "p");
  check_param(family, q, "q");
  return family.dG(p, q);
}

Matrix eval_d2G(const DeviceFamily& family, const Vector& p, const Vector& q, const Vector& r) {
  check_param(family, p, "p");
  check_param(family, q, "q");
  check_param(family, r, "r");
  return family.d2G(p, q, r);
}

Vector adjoint_dG(const DeviceFamily& family, const Vector& p, const Matrix& T) {
  check_param(family, p, "p");
  if (T.rows() != family.state_dim() || T.cols() != family.state_dim()) {
    throw DimensionMismatch("adjoint argument must be state_dim x state_dim");
  }
  const auto D = family.dG_basis(p);
  Vector v(family.param_dim());
  // tr(T D_j) = sum_ik T_ik (D_j)_ki
  for (int j = 0; j < family.param_dim(); ++j) v(j) = (T.array() * D[j].transpose().array()).sum();
  return v;
}

Matrix dG_gram(const DeviceFamily& family, const Vector& p) {
  check_param(family, p, "p");
  const auto D = family.dG_basis(p);
  const int m = family.param_dim();
  Matrix gram(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = i; j < m; ++j) gram(i, j) = gram(j, i) = (D[i].array() * D[j].transpose().array()).sum();
  return gram;
}

bool Box::contains(const Vector& p) const {
  return p.size() == lo.size() && (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
}

Vector Box::clamp(const Vector& p) const { return p.cwiseMax(lo).cwiseMin(hi); }

std::uint64_t split_seed(std::uint64_t seed, std::uint64_t index) {
  auto mix = [](std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  };
  return mix(mix(seed) ^ index);
}

Vector sample_box(const Box& box, std::uint64_t seed, std::uint64_t index) {
  std::mt19937_64 rng(split_seed(seed, index));
  Vector p(box.dim());
  for (int j = 0; j < box.dim(); ++j) {
    // 53-bit uniform in [0, 1); independent of the library's distribution code.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    p(j) = box.lo(j) + u * (box.hi(j) - box.lo(j));
  }
  return p;
}

namespace {

constexpr double kInflate = 1.1;
constexpr double kDeflate = 0.9;

// sqrt(sum_j N(L e_j)^2) for the two norm readings.
struct MapNorm {
  double schatten = 0.0;
  double trace = 0.0;
};

MapNorm map_norm(const std::vector<Matrix>& D) {
  MapNorm m;
  for (const auto& d : D) {
    const double s = schatten1_norm(d), t = std::abs(d.trace());
    m.schatten += s * s;
    m.trace += t * t;
  }
  m.schatten = std::sqrt(m.schatten);
  m.trace = std::sqrt(m.trace);
  return m;
}

MapNorm map_difference(const std::vector<Matrix>& D1, const std::vector<Matrix>& D2) {
  std::vector<Matrix> diff(D1.size());
  for (size_t j = 0; j < D1.size(); ++j) diff[j] = D1[j] - D2[j];
  return map_norm(diff);
}

struct SampleRecord {
  Vector p;
  Matrix G;
  std::vector<Matrix> D;
  double g_schatten = 0.0, g_op = 0.0, g_trace = 0.0;
  MapNorm dG;
  double K = std::numeric_limits<double>::quiet_NaN();  // NaN when singular
  double xlx = 0.0;
  StabilityCertificate closed_loop;
  // Difference quotients against a nearby partner point.
  double qG_schatten = 0.0, qG_trace = 0.0;
  MapNorm qdG;
};

void quotients(const DeviceFamily& family, const Vector& p1, const Matrix& G1,
               const std::vector<Matrix>& D1, const Vector& p2, double& qs, double& qt,
               MapNorm& qd) {
  const double dp = (p1 - p2).norm();
  if (dp == 0.0) return;
  const Matrix dG = G1 - family.G(p2);
  qs = schatten1_norm(dG) / dp;
  qt = std::abs(dG.trace()) / dp;
  const MapNorm d = map_difference(D1, family.dG_basis(p2));
  qd.schatten = d.schatten / dp;
  qd.trace = d.trace / dp;
}

SampleRecord evaluate_sample(const DeviceFamily& family, const Box& domain, std::uint64_t seed,
                             int i, const LedgerInputs& in, const StabilityCertificate& open_loop) {
  SampleRecord r;
  r.p = sample_box(domain, seed, 2 * static_cast<std::uint64_t>(i));
  r.G = family.G(r.p);
  r.D = family.dG_basis(r.p);
  const auto nr = norms(r.G);
  r.g_schatten = nr.trace_norm_schatten;
  r.g_op = nr.op_norm;
  r.g_trace = nr.trace_norm_paper;
  r.dG = map_norm(r.D);

  const Matrix gram = dG_gram(family, r.p);
  Eigen::SelfAdjointEigenSolver<Matrix> es(gram, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues().minCoeff(), lmax = es.eigenvalues().maxCoeff();
  if (lmax > 0.0 && lmin > 1e-12 * lmax) r.K = 1.0 / lmin;

  RiccatiOptions ro;
  ro.certificate = open_loop;
  const auto are = solve_are(in.A, r.G, in.Q, ro);
  const auto dual = solve_dual(in.A, r.G, are.X, in.W, true);
  r.xlx = op_norm(are.X * dual.Lambda * are.X);
  r.closed_loop = dual.closed_loop;

  // Nearby partner: log-uniform distance between 1e-3 and 1e-1 of the diameter.
  std::mt19937_64 rng(split_seed(seed, 2 * static_cast<std::uint64_t>(i) + 1));
  std::normal_distribution<double> nd;
  Vector u(domain.dim());
  for (int j = 0; j < domain.dim(); ++j) u(j) = nd(rng);
  const double e = -3.0 + 2.0 * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  const double h = std::max(domain.diameter(), 1e-12) * std::pow(10.0, e);
  const Vector partner = domain.clamp(r.p + h * u / std::max(u.norm(), 1e-300));
  quotients(family, r.p, r.G, r.D, partner, r.qG_schatten, r.qG_trace, r.qdG);
  return r;
}

}  // namespace

ConstantLedger estimate_constants(const DeviceFamily& family, const Box& domain, int samples,
                                  std::uint64_t seed, const LedgerInputs& in, Execution exec) {
  if (domain.dim() != family.param_dim()) throw DimensionMismatch("domain dimension != param_dim");
  if ((domain.hi.array() < domain.lo.array()).any()) throw InvalidArgument("domain box is empty");
  if (samples < 1) throw InvalidArgument("need at least one sample");
  const StabilityCertificate open_loop = certify_stability(in.A);

  std::vector<SampleRecord> rec(samples);
  // Pair each sample with its successor for long-range quotients.
  std::vector<double> far_s(samples, 0.0), far_t(samples, 0.0);
  std::vector<MapNorm> far_d(samples);

  if (exec == Execution::parallel) {
    // The first exception is rethrown after the region; per-sample work is
    // otherwise independent, so results match the serial path bit for bit.
    std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < samples; ++i) {
      try {
        rec[i] = evaluate_sample(family, domain, seed, i, in, open_loop);
      } catch (...) {
#pragma omp critical
        if (!failure) failure = std::current_exception();
      }
    }
    if (failure) std::rethrow_exception(failure);
#pragma omp parallel for schedule(static)
    for (int i = 0; i < samples; ++i) {
      const auto& a = rec[i];
      const auto& b = rec[(i + 1) % samples];
      quotients(family, a.p, a.G, a.D, b.p, far_s[i], far_t[i], far_d[i]);
    }
  } else {
    for (int i = 0; i < samples; ++i) rec[i] = evaluate_sample(family, domain, seed, i, in, open_loop);
    for (int i = 0; i < samples; ++i) {
      const auto& a = rec[i];
      const auto& b = rec[(i + 1) % samples];
      quotients(family, a.p, a.G, a.D, b.p, far_s[i], far_t[i], far_d[i]);
    }
  }

  ConstantLedger L;
  L.samples = samples;
  L.seed = seed;
  L.trQ = in.Q.trace();
  L.normW = op_norm(in.W);
  L.beta = in.beta;
  L.gamma = in.gamma;
  double mu = std::numeric_limits<double>::infinity();
  std::vector<StabilityCertificate> certs{open_loop};
  for (int i = 0; i < samples; ++i) {
    const auto& r = rec[i];
    L.g = std::max(L.g, r.g_schatten);
    L.g_op = std::max(L.g_op, r.g_op);
    L.g_trace = std::max(L.g_trace, r.g_trace);
    L.C_dG = std::max(L.C_dG, r.dG.schatten);
    L.C_dG_trace = std::max(L.C_dG_trace, r.dG.trace);
    L.L_G = std::max({L.L_G, r.qG_schatten, far_s[i]});
    L.L_G_trace = std::max({L.L_G_trace, r.qG_trace, far_t[i]});
    L.L_dG = std::max({L.L_dG, r.qdG.schatten, far_d[i].schatten});
    L.L_dG_trace = std::max({L.L_dG_trace, r.qdG.trace, far_d[i].trace});
    if (!std::isnan(r.K)) {
      L.K = std::max(L.K, r.K);
      ++L.invertible_samples;
    }
    mu = std::min(mu, r.xlx);
    L.xlx_sup = std::max(L.xlx_sup, r.xlx);
    certs.push_back(r.closed_loop);
  }
  if (L.invertible_samples == 0) {
    throw DegenerateFamily("dG_p^* dG_p is singular at every sampled parameter");
  }
  for (double* f : {&L.g, &L.g_op, &L.g_trace, &L.C_dG, &L.C_dG_trace, &L.L_G, &L.L_G_trace,
                    &L.L_dG, &L.L_dG_trace, &L.K, &L.xlx_sup}) {
    *f *= kInflate;
  }
  L.mu = mu * kDeflate;
  const auto env = envelope(certs);
  L.M = env.M;
  L.alpha = env.alpha;
  return L;
}

}  // namespace rplace
