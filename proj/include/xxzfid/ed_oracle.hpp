#pragma once

// Finite-chain exact diagonalization used as an independent check of the
// infinite-chain fidelity.
//
// Sites are numbered 1..L. The open chain carries
//
//   H = -1/2 sum_bonds (sx sx + sy sy + delta sz sz) + sum_fields h_j sz_j,
//
// with delta = -(x + 1/x)/2. Neel pinning emulates the alternating boundary
// condition at infinity: virtual sites 0 and L+1 with fixed spins
// s_j = (-1)^j couple to sites 1 and L through the Ising part of the bond,
// i.e. h_1 = -delta/2 s_0 and h_L = -delta/2 s_{L+1}. The split chain drops
// the bond between sites L/2 and L/2+1.
//
// States are bit strings: bit j-1 set means site j is up (sz = +1).

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace xxzfid::ed {

enum class Pinning { none, neel };

struct SpinChainSpec {
  int length = 8;
  double x = 0.2;
  bool split = false;
  Pinning pinning = Pinning::neel;

  void validate() const;
  double delta() const { return -(x + 1.0 / x) / 2.0; }
};

/// Alternating reference spin s_j = (-1)^j.
constexpr int neel_sign(int site) { return site % 2 == 0 ? 1 : -1; }

/// Sum of neel_sign over sites first..last.
int neel_magnetization(int first, int last);

struct Bond {
  int a = 0;  // 1-based sites
  int b = 0;
};

struct Field {
  int site = 0;
  double strength = 0.0;  // coefficient of sz_site
};

struct ChainModel {
  int sites = 0;
  double delta = 0.0;
  std::vector<Bond> bonds;
  std::vector<Field> fields;
};

ChainModel chain_model(const SpinChainSpec& spec);

/// Left (sites 1..L/2) and right (sites L/2+1..L, renumbered 1..L/2) halves
/// of the split chain, each keeping its outer pinning field.
std::pair<ChainModel, ChainModel> half_chain_models(const SpinChainSpec& spec);

/// Basis states with a fixed total sz (= #up - #down), in increasing order.
class SectorBasis {
 public:
  SectorBasis() = default;
  SectorBasis(int sites, int magnetization);

  int sites() const { return sites_; }
  int magnetization() const { return magnetization_; }
  std::size_t size() const { return states_.size(); }
  std::uint64_t state(std::size_t i) const { return states_[i]; }
  std::span<const std::uint64_t> states() const { return states_; }
  std::optional<std::size_t> index(std::uint64_t state) const;

  friend bool operator==(const SectorBasis& a, const SectorBasis& b) {
    return a.sites_ == b.sites_ && a.magnetization_ == b.magnetization_;
  }

 private:
  int sites_ = 0;
  int magnetization_ = 0;
  std::vector<std::uint64_t> states_;
};

/// Number of states in the sector, without enumerating it.
std::size_t sector_dimension(int sites, int magnetization);

inline constexpr std::size_t kDefaultSectorCap = 200'000;

struct SpinOperator {
  SectorBasis basis;
  Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
};

SpinOperator build_operator(const ChainModel& model, int magnetization,
                            std::size_t sector_cap = kDefaultSectorCap);

/// H or H' (spec.split) in the zero-magnetization sector.
SpinOperator build_hamiltonian(const SpinChainSpec& spec,
                               std::size_t sector_cap = kDefaultSectorCap);

struct SectorState {
  SectorBasis basis;
  Eigen::VectorXd amplitudes;
};

struct GroundState {
  SectorState state;
  double energy = 0.0;
  double gap = 0.0;       // to the next level reached by the solver
  double residual = 0.0;  // ||H v - E v||
  int sector() const { return state.basis.magnetization(); }
};

inline constexpr double kNearDegenerateGap = 1e-8;

struct EigenOptions {
  double tolerance = 1e-12;
  std::size_t krylov_dim = 200;
  int max_restarts = 50;
  std::size_t dense_threshold = 2000;
};

GroundState ground_state_dense(const SpinOperator& op);

/// Lanczos with full reorthogonalization and explicit restarts, started from
/// the normalized all-ones vector.
GroundState ground_state_lanczos(const SpinOperator& op, const EigenOptions& options = {});

/// Dense below options.dense_threshold, Lanczos otherwise.
GroundState ground_state(const SpinOperator& op, const EigenOptions& options = {});

/// <a|b>; both states must live in the same sector of the same chain.
double overlap(const SectorState& a, const SectorState& b);

/// |left> (x) |right> expressed in the given basis of the joined chain.
SectorState tensor_product(const SectorState& left, const SectorState& right,
                           const SectorBasis& joined);

struct FiniteFidelity {
  double f = 0.0;
  double full_gap = 0.0;
  double left_gap = 0.0;
  double right_gap = 0.0;
  bool near_degenerate = false;
};

/// |<gs(H)|gs(H')>|^2, with gs(H') assembled from the half-chain ground states.
FiniteFidelity bipartite_fidelity_finite(int length, double x, Pinning pinning,
                                         const EigenOptions& options = {},
                                         std::size_t sector_cap = kDefaultSectorCap);

struct ConvergenceRow {
  int length = 0;
  double f_finite = 0.0;
  double f_exact = 0.0;
  double abs_error = 0.0;
  bool near_degenerate = false;
};

std::vector<ConvergenceRow> convergence_study(std::span<const int> lengths, double x,
                                              Pinning pinning, const EigenOptions& options = {},
                                              std::size_t sector_cap = kDefaultSectorCap);

}  // namespace xxzfid::ed
