#pragma once

#include "prolong/geometry.hpp"
#include "prolong/grid.hpp"
#include "prolong/hodge.hpp"
#include "prolong/module.hpp"

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace prolong {

/// Component fields and sections are expressed in the gauge of the conformal
/// orthonormal frame e_a = e^{-phi} d/dx_a; on flat charts this is the
/// coordinate frame. Scalar components are frame independent.

/// A value of a W-valued section at a point, with access to the graded
/// components.
struct TractorSection {
  const GradedModule* module = nullptr;
  Eigen::VectorXd value;

  TractorSection() = default;
  TractorSection(const GradedModule& mod, const Eigen::VectorXd& v);
  Eigen::VectorXd component(int i) const { return module->component(value, i); }
  /// Projection to the bottom eigenspace W_0.
  Eigen::VectorXd bottom() const { return component(0); }
};

/// W_0-valued polynomial field (dim W_0 polynomial components).
struct BottomField {
  std::vector<MultiPoly> comps;

  static BottomField scalar(const MultiPoly& f) { return BottomField{{f}}; }
  static BottomField zero(const GradedModule& mod, int nvars, int degree);
  int dim() const { return static_cast<int>(comps.size()); }
};

/// Chart data expanded as truncated Taylor series in offset variables
/// h = x - x0; shared by the jet pipeline below.
struct ChartJets {
  int n = 0;
  int order = 0;
  Eigen::VectorXd x0;
  MultiPoly phi;
  std::vector<MultiPoly> dphi;
  MultiPoly exp_phi;
  MultiPoly exp_minus_phi;
};

ChartJets chart_jets(const MetricChart& chart, const Eigen::VectorXd& x0, int order);

/// W-valued jet field (one truncated expansion per module coordinate).
struct JetSection {
  const GradedModule* module = nullptr;
  std::vector<MultiPoly> comps;

  Eigen::VectorXd value_at_center() const;
};

/// Covariant derivative in the orthonormal direction e_c:
///   e^{-phi} ( d_c F + rho(omega_c) F ),  omega_c the frame rotation form.
JetSection covariant_derivative_jet(const ChartJets& cj, const JetSection& f, int c);

/// Same plus the algebraic term rho(X_c) F of the modified connection.
JetSection modified_derivative_jet(const ChartJets& cj, const JetSection& f, int c);

/// nabla-tilde applied to a W-valued polynomial section at x, contracted
/// with the coordinate tangent vector xi.
Eigen::VectorXd modified_connection_apply(const MetricChart& chart, const GradedModule& mod,
                                          const std::vector<MultiPoly>& section,
                                          const Eigen::VectorXd& x, const Eigen::VectorXd& xi);

/// The splitting operator
///   L(f) = sum_{i=0}^{N} (-1)^i (delta* nabla)^i f
/// as a jet around x0 (each graded component exact to order `order` minus the
/// number of derivatives it consumed). `order` must be >= N.
JetSection splitting_jet(const MetricChart& chart, const GradedModule& mod,
                         const BottomField& f, const Eigen::VectorXd& x0, int order);

/// Value of L(f) at x; the unique section with bottom component f and
/// delta*(nabla-tilde L(f)) = 0.
TractorSection splitting_operator(const MetricChart& chart, const GradedModule& mod,
                                  const BottomField& f, const Eigen::VectorXd& x);

/// || delta* nabla-tilde L(f) || at x (should vanish identically).
double splitting_defect(const MetricChart& chart, const GradedModule& mod,
                        const BottomField& f, const Eigen::VectorXd& x);

/// True iff component ell of L(f) and L(f + perturbation) agree at x0 within
/// tol; with a perturbation vanishing to order ell+1 this must hold.
bool jet_dependence_check(const MetricChart& chart, const GradedModule& mod,
                          const BottomField& f, const BottomField& perturbation, int ell,
                          const Eigen::VectorXd& x0, double tol = 1e-10);

// ---------------------------------------------------------------------------
// Closed first-order systems  nabla-tilde Sigma + C(Sigma) = 0.
// ---------------------------------------------------------------------------

struct ClosedSystem {
  enum class Provenance { FlatZero, ExplicitEinstein };
  MetricChart chart;
  GradedModule module;
  Provenance provenance = Provenance::FlatZero;
  LowerOrderTensor lower_order; // zero unless ExplicitEinstein

  /// C as matrices per orthonormal frame direction; bottom-row blocks vanish.
  std::vector<Eigen::MatrixXd> c_matrices(const Eigen::VectorXd& x) const;

  /// Generator K(x, xdot) of the parallel transport ODE dSigma/dt = -K Sigma
  /// along a curve with coordinate velocity xdot.
  Eigen::MatrixXd transport_generator(const Eigen::VectorXd& x,
                                      const Eigen::VectorXd& xdot) const;
};

/// The explicit closed system equivalent to
///   nabla_(a nabla_b)0 f + f A_ab = 0
/// for the standard module (scalar family, r = 2):
///   nabla_a f   = phi_a
///   nabla_a phi_b = -h g_ab - f A_ab
///   nabla_a h   = (1/(n-1)) ( Ric_a^c phi_c + f div A_a + phi^c A_ac )
/// with the curvature contraction fixed by the convention that makes the
/// round sphere's Ricci positive (see docs/conventions in the README).
ClosedSystem build_closed_system_einstein(const MetricChart& chart, const GradedModule& mod,
                                          const LowerOrderTensor& a_coeff);

/// The flat-chart system nabla-tilde Sigma = 0 (C = 0) for any module.
ClosedSystem build_closed_system_flat(const MetricChart& chart, const GradedModule& mod);

// ---------------------------------------------------------------------------
// Transport, holonomy, solution spaces.
// ---------------------------------------------------------------------------

/// Piecewise straight path through the listed chart points.
using Polyline = std::vector<Eigen::VectorXd>;

struct TransportOptions {
  double step = 1e-3;          // arclength per RK4 step on unit-scale paths
  bool estimate_error = false; // rerun at half step and report the deviation
};

struct TransportResult {
  Eigen::VectorXd value;
  double error_estimate = 0.0;
};

TransportResult transport(const ClosedSystem& system, const Eigen::VectorXd& sigma0,
                          const Polyline& path, const TransportOptions& opts = {});

/// Transport as a matrix (the ODE is linear in the initial value).
Eigen::MatrixXd transport_matrix(const ClosedSystem& system, const Polyline& path,
                                 const TransportOptions& opts = {});

/// Transport matrix around a closed loop (closes the polyline if needed).
Eigen::MatrixXd holonomy(const ClosedSystem& system, const Polyline& loop,
                         const TransportOptions& opts = {});

/// Axis-plane rectangle loops through the basepoint, one per axis pair and
/// side length, traversed forward.
std::vector<Polyline> coordinate_rectangle_loops(const Eigen::VectorXd& basepoint,
                                                 const std::vector<double>& sides);

struct SolutionSpace {
  int dim = 0;
  Eigen::MatrixXd basis;          // dim W x dim, orthonormal initial values
  Eigen::VectorXd singular_values; // of the stacked holonomy constraints
  bool condition_warning = false;  // singular values within 10x of the cut
  double threshold = 0.0;
};

/// Joint fixed space of the holonomies: kernel of stacked (H - I), singular
/// values below `svd_abs_tol` treated as zero. Ill-conditioned cuts are
/// reported through condition_warning, never silently resolved.
SolutionSpace solution_space(const ClosedSystem& system, const std::vector<Polyline>& loops,
                             const TransportOptions& opts = {}, double svd_abs_tol = 1e-6);

// ---------------------------------------------------------------------------
// Reconstruction and residual check.
// ---------------------------------------------------------------------------

struct ReconstructResult {
  Grid grid;
  Eigen::MatrixXd bottom;        // nodes x dim W_0, transported bottom components
  Eigen::MatrixXd section;       // nodes x dim W, full transported values
  double max_residual = 0.0;     // of the reported operator over interior nodes
  long residual_nodes = 0;
};

class OperatorTag; // defined in oracle.hpp

/// Transports sigma0 from the basepoint to every grid node along straight
/// chart segments, extracts the bottom component, and evaluates the
/// operator residual by order-4 finite differences on interior nodes.
ReconstructResult reconstruct_and_check(const ClosedSystem& system,
                                        const Eigen::VectorXd& sigma0,
                                        const Eigen::VectorXd& basepoint, const Grid& grid,
                                        const OperatorTag& tag,
                                        const TransportOptions& opts = {});

/// Same with several initial values (columns); the transports over the grid
/// are shared across the columns.
std::vector<ReconstructResult> reconstruct_many(const ClosedSystem& system,
                                                const Eigen::MatrixXd& initial_values,
                                                const Eigen::VectorXd& basepoint,
                                                const Grid& grid, const OperatorTag& tag,
                                                const TransportOptions& opts = {});

} // namespace prolong
