// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any fails.
#include <fmt/format.h>

#include <chrono>
#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "neontrap/bound_states.hpp"
#include "neontrap/cli/commands.hpp"
#include "neontrap/cli/config.hpp"
#include "neontrap/growth_estimates.hpp"
#include "neontrap/lateral_trap.hpp"
#include "neontrap/parallel.hpp"
#include "neontrap/tridiagonal.hpp"

using namespace neontrap;
using namespace neontrap::cli;

namespace {

// Tolerances and runtime budgets.
constexpr double kBulkTarget = -15.7, kBulkTol = 0.5;
constexpr double kThinScTarget = -44.6, kThinSiTarget = -40.0, kThinTol = 1.0;
constexpr double kRatioLo = 2.8, kRatioHi = 3.0;
constexpr double kGapTarget = 21.1, kGapTol = 1.0;
constexpr double kHeightTarget = 1.7, kHeightTol = 0.2, kHeightVariation = 0.2;
constexpr double kOracleRelTol = 1e-6, kLimitRelTol = 1e-4;
constexpr double kHydrogenE1 = -40.22, kHydrogenGap = 30.16, kHydrogenTol = 0.1;
constexpr double kHellmannFeynmanTol = 1e-3;
constexpr double kGibbsThomsonTarget = -9.12, kGibbsThomsonRel = 0.005;
constexpr double kDiffusionTarget = 100.0, kGravityTarget = 5.1e-11, kGravityRel = 0.05;
constexpr double kDepthTarget = 10.0, kDepthRel = 0.3;
constexpr double kFitRelTol = 1e-6;
constexpr double kLadderRel = 3e-3, kDiskRel = 0.01;

constexpr double kBudgetAC1 = 1.0, kBudgetAC2 = 2.0, kBudgetAC4 = 5.0, kBudgetAC6 = 0.1, kBudgetAC7 = 120.0;

const double H = kDefaultConstants.hbar2_over_2me;

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

RunConfig config_from(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

// (L, E) -> (W_G, h_e, gap, bound) from a ground-sweep table.
struct SweepRow {
  double w, h, gap;
  bool bound;
};
SweepRow sweep_row(const ResultTable& t, double L, double E) {
  for (const auto& r : t.rows) {
    if (std::get<double>(r[0]) == L && std::get<double>(r[1]) == E) {
      return {std::get<double>(r[2]), std::get<double>(r[3]), std::get<double>(r[4]), std::get<double>(r[5]) == 1.0};
    }
  }
  return {NAN, NAN, NAN, false};
}

std::vector<double> log_spaced(double lo, double hi, int n) {
  std::vector<double> out;
  for (int i = 0; i < n; ++i) out.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return out;
}

Outcome ac1() {
  Outcome o;
  PotentialCache::global().clear();
  const auto start = std::chrono::steady_clock::now();
  const auto out = run_ground_sweep(config_from("[ground_sweep]\nL = inf nm\nE_ex = 0 V/m\n"), 1);
  const double elapsed = seconds_since(start);
  const auto row = sweep_row(out.tables[0], kInfiniteThickness, 0.0);
  o.detail << fmt::format("W_G(bulk) = {:.3f} meV (target {} +- {}), {:.3f} s", row.w, kBulkTarget, kBulkTol, elapsed);
  o.require(row.bound && within(row.w, kBulkTarget, kBulkTol), "bulk energy");
  o.require(elapsed < kBudgetAC1, "runtime");
  return o;
}

Outcome ac2() {
  Outcome o;
  PotentialCache::global().clear();
  const auto start = std::chrono::steady_clock::now();
  const auto sc = run_ground_sweep(config_from("[ground_sweep]\nL = 10 nm\nE_ex = 0 V/m\n"), 1);
  const auto si = run_ground_sweep(
      config_from("[stack]\nsubstrate = dielectric\neps_substrate = 12\n[ground_sweep]\nL = 10 nm\nE_ex = 0 V/m\n"), 1);
  const double elapsed = seconds_since(start);
  const double w_sc = sweep_row(sc.tables[0], 10.0, 0.0).w;
  const double w_si = sweep_row(si.tables[0], 10.0, 0.0).w;
  const double bulk = ground_state_energy(DielectricStack::superconducting(kInfiniteThickness), {});
  const double ratio = w_sc / bulk;
  o.detail << fmt::format("W_G(10 nm) = {:.3f} meV superconductor, {:.3f} meV Si; ratio to bulk {:.3f}; {:.3f} s",
                          w_sc, w_si, ratio, elapsed);
  o.require(within(w_sc, kThinScTarget, kThinTol), "superconductor");
  o.require(within(w_si, kThinSiTarget, kThinTol), "silicon");
  o.require(ratio >= kRatioLo && ratio <= kRatioHi, "ratio");
  o.require(elapsed < kBudgetAC2, "runtime");
  return o;
}

Outcome ac3() {
  Outcome o;
  const auto out = run_ground_sweep(config_from("[ground_sweep]\nL = 10 nm\nE_ex = -1e6, -5e5, 0, 5e5, 1e6 V/m\n"),
                                    default_worker_count());
  const auto zero = sweep_row(out.tables[0], 10.0, 0.0);
  double worst = 0.0;
  for (double e : {-1e6, -5e5, 5e5, 1e6}) {
    const auto r = sweep_row(out.tables[0], 10.0, e);
    o.require(r.bound, "bound across the field range");
    worst = std::max(worst, std::abs(r.h - zero.h) / zero.h);
  }
  o.detail << fmt::format("gap = {:.3f} meV, h_e = {:.3f} nm, max h_e change over +-1e6 V/m = {:.1f}%", zero.gap,
                          zero.h, 100.0 * worst);
  o.require(within(zero.gap, kGapTarget, kGapTol), "gap");
  o.require(within(zero.h, kHeightTarget, kHeightTol), "mean height");
  o.require(worst <= kHeightVariation, "height variation");
  return o;
}

Outcome ac4() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  double worst = 0.0;
  for (double L : {2.0, 5.0, 10.0, 50.0}) {
    for (const auto& stack : {DielectricStack::superconducting(L), DielectricStack::dielectric(12.0, L)}) {
      for (double z : log_spaced(0.23, 30.0, 40)) {
        const double quad = perpendicular_potential(stack, z);
        const double series = image_series_oracle(stack, z, 200);
        worst = std::max(worst, std::abs(quad - series) / std::abs(series));
      }
    }
  }
  const double bulk = kDefaultConstants.image_prefactor * DielectricStack::superconducting(1.0).bulk_reflection() / 2.0;
  const double mirror = -kDefaultConstants.image_prefactor / 2.0;
  const double thick = std::abs(perpendicular_potential(DielectricStack::superconducting(1e6), 1.0) / bulk - 1.0);
  const double thin = std::abs(perpendicular_potential(DielectricStack::superconducting(1e-5), 1.0) / mirror - 1.0);
  const double elapsed = seconds_since(start);
  o.detail << fmt::format(
      "quadrature vs image series max rel {:.2e}; limits at z = 1 nm: L = 1e6 nm {:.1e}, L = 1e-5 nm {:.1e}; {:.3f} s",
      worst, thick, thin, elapsed);
  o.require(worst <= kOracleRelTol, "oracle agreement");
  o.require(thick <= kLimitRelTol && thin <= kLimitRelTol, "limits");
  o.require(elapsed < kBudgetAC4, "runtime");
  return o;
}

// Error of the lowest level against `exact` on grids of n and 2n - 1 points; returns the ratio.
double convergence_ratio(const PotentialSampler& v, double lo, double hi, std::size_t n, double exact) {
  auto error = [&](std::size_t points) {
    const Grid1D g(lo, hi, points);
    return std::abs(solve_lowest(build_hamiltonian(v, g), g, 1).energies[0] - exact);
  };
  return error(n) / error(2 * n - 1);
}

Outcome ac5() {
  Outcome o;
  const double A = kDefaultConstants.image_prefactor * 0.10873440285204991;
  const Grid1D hg(0.0, 60.0, 30001);
  const auto hyd = solve_lowest(build_hamiltonian([&](double z) { return -A / z; }, hg), hg, 4);
  const double gap = perpendicular_gap(hyd);

  const double box_ratio = convergence_ratio([](double) { return 0.0; }, 0.0, 5.0, 1001, std::pow(std::numbers::pi / 5.0, 2) * H);
  const double osc_ratio = convergence_ratio([](double z) { return z * z / (4.0 * H); }, -40.0, 40.0, 801, 0.5);

  const Grid1D og(-80.0, 80.0, 8001);
  const auto osc = solve_lowest(build_hamiltonian([](double z) { return z * z / (4.0 * H); }, og), og, 10);
  bool nodes = true;
  for (std::size_t i = 0; i < 10; ++i) nodes = nodes && count_nodes(osc.wavefunctions[i]) == i;
  for (std::size_t i = 0; i < 4; ++i) nodes = nodes && count_nodes(hyd.wavefunctions[i]) == i;
  const auto perp = solve_perpendicular(DielectricStack::superconducting(10.0), {}, 3);
  for (std::size_t i = 0; i < 3; ++i) nodes = nodes && count_nodes(perp.wavefunctions[i]) == i;

  const auto hf = hellmann_feynman_check(DielectricStack::superconducting(10.0), {}, 1e4);
  o.detail << fmt::format(
      "1D hydrogen E1 = {:.3f} meV, gap = {:.3f} meV; error ratio on grid doubling: box {:.2f}, oscillator {:.2f}; "
      "node counts {}; Hellmann-Feynman residual {:.1e}",
      hyd.energies[0], gap, box_ratio, osc_ratio, nodes ? "exact" : "WRONG", hf.residual);
  o.require(within(hyd.energies[0], kHydrogenE1, kHydrogenTol), "hydrogen ground state");
  o.require(within(gap, kHydrogenGap, kHydrogenTol), "hydrogen gap");
  o.require(within(box_ratio, 4.0, 0.2) && within(osc_ratio, 4.0, 0.2), "second-order convergence");
  o.require(nodes, "node counts");
  o.require(hf.residual <= kHellmannFeynmanTol, "Hellmann-Feynman");
  return o;
}

Outcome ac6() {
  Outcome o;
  const auto start = std::chrono::steady_clock::now();
  const NeonMaterialData m;
  const double coeff = gibbs_thomson_coefficient(m);
  const double plus = gibbs_thomson_shift(m, 10.0), minus = gibbs_thomson_shift(m, -10.0);
  const double diff = diffusion_length(m, 1e-5);
  const double grav = gravity_potential_difference(m, 25.0);
  const double elapsed = seconds_since(start);
  o.detail << fmt::format("coefficient {:.4f} K nm, r_c = +-10 nm -> {:.3f} / {:+.3f} K, diffusion {:.2f} nm, "
                          "gravity {:.3e} meV; {:.2e} s",
                          coeff, plus, minus, diff, grav, elapsed);
  o.require(std::abs(coeff / kGibbsThomsonTarget - 1.0) <= kGibbsThomsonRel, "coefficient");
  o.require(within(plus, -0.91, 0.01) && within(minus, 0.91, 0.01), "shifts");
  o.require(within(diff, kDiffusionTarget, 1e-9), "diffusion length");
  o.require(std::abs(grav / kGravityTarget - 1.0) <= kGravityRel, "gravity");
  o.require(elapsed < kBudgetAC6, "runtime");
  return o;
}

Outcome ac7() {
  Outcome o;
  PotentialCache::global().clear();
  const auto start = std::chrono::steady_clock::now();
  EnergyCurveOptions opts;
  opts.workers = default_worker_count();
  const PillarProfile deep{10.0, 3.0, 110.0, 2.0};
  const auto [lo, hi] = curve_range_for(deep, default_rho_max(deep));
  const auto curve = EnergyCurve::build(DielectricStack::superconducting(10.0), {}, lo, hi, opts);
  const double depth = trap_depth(curve, deep);

  std::vector<double> spacing;
  for (double R : {60.0, 110.0, 200.0}) {
    spacing.push_back(lateral_spectrum(curve, PillarProfile{10.0, 0.5, R, 2.0}).delta_U_ueV);
  }
  const double elapsed = seconds_since(start);
  o.detail << fmt::format("depth(dL = 3 nm) = {:.3f} meV; dU at R = 60/110/200 nm = {:.2f}/{:.2f}/{:.2f} ueV; {:.2f} s",
                          depth, spacing[0], spacing[1], spacing[2], elapsed);
  o.require(std::abs(depth / kDepthTarget - 1.0) <= kDepthRel, "depth");
  o.require(spacing[0] > spacing[1] && spacing[1] > spacing[2], "monotone in R");
  o.require(spacing[1] >= 1.0 && spacing[1] <= 100.0, "spacing at R = 110 nm");
  o.require(elapsed < kBudgetAC7, "runtime");
  return o;
}

Outcome ac8() {
  Outcome o;
  const auto sweep = run_field_sweep(RunConfig{}, default_worker_count());
  const ResultTable* response = nullptr;
  for (const auto& t : sweep.tables) {
    if (t.block == "response") response = &t;
  }
  const double s_neg = std::stod(*response->find_metadata("slope_negative_ueV_per_V_per_m"));
  const double s_pos = std::stod(*response->find_metadata("slope_positive_ueV_per_V_per_m"));

  const HarmonicFieldModel truth{26.4, 4.2e-13};
  std::vector<double> fields, values;
  for (double e = -1e6; e <= 1e6; e += 2.5e5) {
    fields.push_back(e);
    values.push_back(harmonic_field_model(truth, e));
  }
  const auto fit = fit_harmonic_field_model(fields, values);
  const double fit_err = std::max(std::abs(fit.model.hbar_omega0_ueV / truth.hbar_omega0_ueV - 1.0),
                                  std::abs(fit.model.beta1 / truth.beta1 - 1.0));
  o.detail << fmt::format("|s-| = {:.3e}, |s+| = {:.3e} ueV per V/m (ratio {:.3f}); harmonic fit round trip {:.1e}",
                          std::abs(s_neg), std::abs(s_pos), std::abs(s_neg / s_pos), fit_err);
  o.require(std::abs(s_neg) > std::abs(s_pos), "asymmetry");
  o.require(fit_err <= kFitRelTol, "fit round trip");
  return o;
}

Outcome ac9() {
  Outcome o;
  const double hw = 0.026;
  const double l = std::sqrt(2.0 * H / hw);
  const auto osc = radial_spectrum([&](double r) { return hw * hw * r * r / (4.0 * H); }, 3, 12.0 * l, 16384);
  double worst = 0.0;
  for (int a = 0; a <= 3; ++a) worst = std::max(worst, std::abs(osc.U_meV[a] / ((a + 1) * hw) - 1.0));
  const auto disk = radial_spectrum([](double) { return 0.0; }, 1, 50.0, 8192);
  const double j01 = 2.404825557695773, j11 = 3.831705970207512;
  const double exact = (j11 / j01) * (j11 / j01);
  const double ratio = disk.U_meV[1] / disk.U_meV[0];
  o.detail << fmt::format("oscillator ladder max rel error {:.1e}; disk U1/U0 = {:.4f} (exact {:.4f})", worst, ratio,
                          exact);
  o.require(worst <= kLadderRel, "oscillator ladder");
  o.require(std::abs(ratio / exact - 1.0) <= kDiskRel, "disk ratio");
  return o;
}

Outcome ac10() {
  Outcome o;
  const RunConfig c = config_from(
      "[ground_sweep]\nL = 3, 10, inf nm\nE_ex = -1e6, 0, 1e6 V/m\n[potential_z]\nL = 0, 10, inf nm\n"
      "[lateral]\nR = 60, 110 nm\ntable_points = 100\n");
  std::size_t files = 0;
  bool identical = true;
  for (const char* command : {"ground-sweep", "potential-z", "lateral"}) {
    const auto a = run_command(command, c, 1);
    const auto b = run_command(command, c, 4);
    const auto again = run_command(command, c, 1);
    for (std::size_t i = 0; i < a.tables.size(); ++i) {
      identical = identical && to_csv(a.tables[i]) == to_csv(b.tables[i]) && to_csv(a.tables[i]) == to_csv(again.tables[i]);
      ++files;
    }
  }
  o.detail << fmt::format("{} tables from ground-sweep, potential-z, lateral with 1, 4, 1 workers: {}", files,
                          identical ? "byte-identical" : "DIFFER");
  o.require(identical, "determinism");
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"AC1 bulk binding", ac1},
      {"AC2 thin-layer enhancement", ac2},
      {"AC3 perpendicular gap and height", ac3},
      {"AC4 electrostatics oracle", ac4},
      {"AC5 eigensolver oracles", ac5},
      {"AC6 growth estimates", ac6},
      {"AC7 lateral trap properties", ac7},
      {"AC8 field asymmetry", ac8},
      {"AC9 radial-solver oracles", ac9},
      {"AC10 determinism", ac10},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail << " [exception: " << e.what() << "]";
    }
    failures += o.pass ? 0 : 1;
    fmt::print("{} {}: {}\n", o.pass ? "PASS" : "FAIL", name, o.detail.str());
    std::fflush(stdout);
  }
  fmt::print("{} of {} acceptance criteria passed\n", criteria.size() - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
