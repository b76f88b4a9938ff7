#include "xxzfid/ed_oracle.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

#include "xxzfid/errors.hpp"
#include "xxzfid/fidelity.hpp"

namespace xxzfid::ed {

void SpinChainSpec::validate() const {
  if (length < 4 || length % 2 != 0)
    throw InvalidSpec("chain length must be an even integer >= 4, got " +
                      std::to_string(length));
  if (length > 62) throw SizeLimit("chain length above 62 sites is not representable");
  if (!(x > 0.0 && x < 1.0)) throw DomainError("x must lie in (0,1)");
}

int neel_magnetization(int first, int last) {
  int m = 0;
  for (int j = first; j <= last; ++j) m += neel_sign(j);
  return m;
}

namespace {

ChainModel open_chain(int sites, double delta) {
  ChainModel model;
  model.sites = sites;
  model.delta = delta;
  for (int j = 1; j < sites; ++j) model.bonds.push_back({j, j + 1});
  return model;
}

double pin_strength(double delta, int virtual_site) { return -0.5 * delta * neel_sign(virtual_site); }

}  // namespace

ChainModel chain_model(const SpinChainSpec& spec) {
  spec.validate();
  const int L = spec.length;
  ChainModel model = open_chain(L, spec.delta());
  if (spec.split) {
    std::erase_if(model.bonds, [h = L / 2](const Bond& b) { return b.a == h && b.b == h + 1; });
  }
  if (spec.pinning == Pinning::neel) {
    model.fields.push_back({1, pin_strength(model.delta, 0)});
    model.fields.push_back({L, pin_strength(model.delta, L + 1)});
  }
  return model;
}

std::pair<ChainModel, ChainModel> half_chain_models(const SpinChainSpec& spec) {
  spec.validate();
  const int L = spec.length, h = L / 2;
  ChainModel left = open_chain(h, spec.delta());
  ChainModel right = open_chain(h, spec.delta());
  if (spec.pinning == Pinning::neel) {
    left.fields.push_back({1, pin_strength(left.delta, 0)});
    right.fields.push_back({h, pin_strength(right.delta, L + 1)});
  }
  return {std::move(left), std::move(right)};
}

std::size_t sector_dimension(int sites, int magnetization) {
  if (sites < 0 || std::abs(magnetization) > sites || (sites + magnetization) % 2 != 0) return 0;
  const int up = (sites + magnetization) / 2;
  const int k = std::min(up, sites - up);
  double c = 1.0;
  for (int i = 1; i <= k; ++i) c = c * (sites - k + i) / i;
  return static_cast<std::size_t>(std::llround(c));
}

SectorBasis::SectorBasis(int sites, int magnetization) : sites_(sites), magnetization_(magnetization) {
  if (sites < 1 || sites > 62) throw SizeLimit("sector basis supports 1..62 sites");
  if (sector_dimension(sites, magnetization) == 0)
    throw InvalidSpec("magnetization " + std::to_string(magnetization) +
                      " is not reachable with " + std::to_string(sites) + " sites");
  const int up = (sites + magnetization) / 2;
  states_.reserve(sector_dimension(sites, magnetization));
  const std::uint64_t limit = std::uint64_t{1} << sites;
  if (up == 0) {
    states_.push_back(0);
    return;
  }
  // Gosper's hack: next larger integer with the same popcount.
  for (std::uint64_t s = (std::uint64_t{1} << up) - 1; s < limit;) {
    states_.push_back(s);
    const std::uint64_t c = s & (~s + 1);
    const std::uint64_t r = s + c;
    s = (((r ^ s) >> 2) / c) | r;
  }
}

std::optional<std::size_t> SectorBasis::index(std::uint64_t state) const {
  const auto it = std::lower_bound(states_.begin(), states_.end(), state);
  if (it == states_.end() || *it != state) return std::nullopt;
  return static_cast<std::size_t>(it - states_.begin());
}

SpinOperator build_operator(const ChainModel& model, int magnetization, std::size_t sector_cap) {
  const std::size_t dim = sector_dimension(model.sites, magnetization);
  if (dim > sector_cap)
    throw SizeLimit("sector dimension " + std::to_string(dim) + " exceeds cap " +
                    std::to_string(sector_cap));
  SpinOperator op{SectorBasis(model.sites, magnetization), {}};
  const auto& basis = op.basis;
  auto spin = [](std::uint64_t s, int site) { return ((s >> (site - 1)) & 1U) ? 1.0 : -1.0; };

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(dim * (model.bonds.size() + 1));
  for (std::size_t i = 0; i < dim; ++i) {
    const std::uint64_t s = basis.state(i);
    double diagonal = 0.0;
    for (const Bond& b : model.bonds) {
      const double za = spin(s, b.a), zb = spin(s, b.b);
      diagonal += -0.5 * model.delta * za * zb;
      if (za != zb) {
        const std::uint64_t flipped = s ^ (std::uint64_t{1} << (b.a - 1)) ^ (std::uint64_t{1} << (b.b - 1));
        const auto j = basis.index(flipped);
        if (!j) throw SectorMismatch("hopping term left the magnetization sector");
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(*j), -1.0);
      }
    }
    for (const Field& f : model.fields) diagonal += f.strength * spin(s, f.site);
    triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), diagonal);
  }
  op.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
  op.matrix.setFromTriplets(triplets.begin(), triplets.end());
  return op;
}

SpinOperator build_hamiltonian(const SpinChainSpec& spec, std::size_t sector_cap) {
  return build_operator(chain_model(spec), 0, sector_cap);
}

namespace {

void fix_sign(Eigen::VectorXd& v) {
  if (v.sum() < 0.0) v = -v;
}

GroundState finish(const SpinOperator& op, Eigen::VectorXd v, double energy, double gap) {
  fix_sign(v);
  GroundState gs;
  gs.energy = energy;
  gs.gap = gap;
  gs.residual = (op.matrix * v - energy * v).norm();
  gs.state = SectorState{op.basis, std::move(v)};
  return gs;
}

}  // namespace

GroundState ground_state_dense(const SpinOperator& op) {
  const Eigen::MatrixXd dense(op.matrix);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(dense);
  if (solver.info() != Eigen::Success) throw NoConvergence("dense eigensolver failed");
  const auto& values = solver.eigenvalues();
  const double gap = values.size() > 1 ? values(1) - values(0)
                                       : std::numeric_limits<double>::infinity();
  return finish(op, solver.eigenvectors().col(0), values(0), gap);
}

GroundState ground_state_lanczos(const SpinOperator& op, const EigenOptions& options) {
  const Eigen::Index n = op.matrix.rows();
  if (n == 0) throw InvalidSpec("empty operator");
  if (n == 1) return finish(op, Eigen::VectorXd::Ones(1), op.matrix.coeff(0, 0),
                            std::numeric_limits<double>::infinity());

  const Eigen::Index krylov = std::min<Eigen::Index>(
      std::max<Eigen::Index>(static_cast<Eigen::Index>(options.krylov_dim), 2), n);
  Eigen::VectorXd start = Eigen::VectorXd::Ones(n) / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd V(n, krylov);
  Eigen::VectorXd alpha(krylov), beta(krylov);

  for (int restart = 0; restart <= options.max_restarts; ++restart) {
    V.col(0) = start;
    Eigen::Index m = 0;
    bool converged = false;
    Eigen::VectorXd ritz_coeffs;
    double theta0 = 0.0, gap = std::numeric_limits<double>::infinity();

    for (Eigen::Index j = 0; j < krylov; ++j) {
      Eigen::VectorXd w = op.matrix * V.col(j);
      alpha(j) = V.col(j).dot(w);
      w -= alpha(j) * V.col(j);
      if (j > 0) w -= beta(j - 1) * V.col(j - 1);
      for (int pass = 0; pass < 2; ++pass) {
        const auto basis = V.leftCols(j + 1);
        w -= basis * (basis.transpose() * w);
      }
      beta(j) = w.norm();
      m = j + 1;

      const bool exhausted = beta(j) <= 1e-13 * std::max(1.0, std::abs(alpha(j)));
      const bool last = m == krylov;
      if (m >= 2 && (m % 4 == 0 || exhausted || last)) {
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < m; ++i) {
          T(i, i) = alpha(i);
          if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = beta(i);
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(T);
        theta0 = tri.eigenvalues()(0);
        gap = tri.eigenvalues()(1) - theta0;
        ritz_coeffs = tri.eigenvectors().col(0);
        const double estimate = std::abs(beta(j) * ritz_coeffs(m - 1));
        converged = exhausted || estimate < options.tolerance * std::max(1.0, std::abs(theta0));
      }
      if (converged || exhausted || last) break;
      V.col(j + 1) = w / beta(j);
    }

    if (ritz_coeffs.size() == 0) {
      // Krylov space collapsed after a single vector: start is an eigenvector.
      converged = true;
      theta0 = alpha(0);
      ritz_coeffs = Eigen::VectorXd::Ones(1);
    }
    Eigen::VectorXd ritz = V.leftCols(ritz_coeffs.size()) * ritz_coeffs;
    ritz.normalize();
    if (converged) return finish(op, std::move(ritz), theta0, gap);
    start = ritz;
  }
  throw NoConvergence("Lanczos did not converge within " + std::to_string(options.max_restarts) +
                      " restarts");
}

GroundState ground_state(const SpinOperator& op, const EigenOptions& options) {
  if (static_cast<std::size_t>(op.matrix.rows()) < options.dense_threshold)
    return ground_state_dense(op);
  return ground_state_lanczos(op, options);
}

double overlap(const SectorState& a, const SectorState& b) {
  if (!(a.basis == b.basis))
    throw SectorMismatch("overlap between states of different sectors (" +
                         std::to_string(a.basis.magnetization()) + " vs " +
                         std::to_string(b.basis.magnetization()) + ")");
  return a.amplitudes.dot(b.amplitudes);
}

SectorState tensor_product(const SectorState& left, const SectorState& right,
                           const SectorBasis& joined) {
  const int hl = left.basis.sites();
  if (joined.sites() != hl + right.basis.sites())
    throw SectorMismatch("joined chain length does not match the two halves");
  if (joined.magnetization() != left.basis.magnetization() + right.basis.magnetization())
    throw SectorMismatch("half-chain sectors do not add up to the joined sector");
  const std::uint64_t mask = (std::uint64_t{1} << hl) - 1;
  SectorState out{joined, Eigen::VectorXd::Zero(static_cast<Eigen::Index>(joined.size()))};
  for (std::size_t i = 0; i < joined.size(); ++i) {
    const std::uint64_t s = joined.state(i);
    const auto li = left.basis.index(s & mask);
    if (!li) continue;
    const auto ri = right.basis.index(s >> hl);
    if (!ri) continue;
    out.amplitudes(static_cast<Eigen::Index>(i)) =
        left.amplitudes(static_cast<Eigen::Index>(*li)) *
        right.amplitudes(static_cast<Eigen::Index>(*ri));
  }
  return out;
}

FiniteFidelity bipartite_fidelity_finite(int length, double x, Pinning pinning,
                                         const EigenOptions& options, std::size_t sector_cap) {
  const SpinChainSpec spec{length, x, false, pinning};
  spec.validate();
  const int h = length / 2;
  const auto full = ground_state(build_hamiltonian(spec, sector_cap), options);
  const auto [left_model, right_model] = half_chain_models(spec);
  const auto left =
      ground_state(build_operator(left_model, neel_magnetization(1, h), sector_cap), options);
  const auto right = ground_state(
      build_operator(right_model, neel_magnetization(h + 1, length), sector_cap), options);
  const auto split = tensor_product(left.state, right.state, full.state.basis);
  const double amplitude = overlap(full.state, split);

  FiniteFidelity r;
  r.f = amplitude * amplitude;
  r.full_gap = full.gap;
  r.left_gap = left.gap;
  r.right_gap = right.gap;
  r.near_degenerate = std::min({full.gap, left.gap, right.gap}) < kNearDegenerateGap;
  return r;
}

std::vector<ConvergenceRow> convergence_study(std::span<const int> lengths, double x,
                                              Pinning pinning, const EigenOptions& options,
                                              std::size_t sector_cap) {
  std::vector<ConvergenceRow> rows;
  if (lengths.empty()) return rows;
  const double exact = std::exp(fidelity(ModelPoint<double>::from_x(x)).ln_f);
  for (const int L : lengths) {
    const auto finite = bipartite_fidelity_finite(L, x, pinning, options, sector_cap);
    rows.push_back({L, finite.f, exact, std::abs(finite.f - exact), finite.near_degenerate});
  }
  return rows;
}

}  // namespace xxzfid::ed
