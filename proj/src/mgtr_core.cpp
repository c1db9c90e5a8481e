#include "mgtr/mgtr_core.hpp"

#include <gsl/gsl_multimin.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "mgtr/errors.hpp"

namespace mgtr {

PowerSeries composite_series(const PowerSeries& mt, const PowerSeries& st) {
  return PowerSeries::from_derivatives(mt.i_dc + st.i_dc, mt.gm + st.gm, mt.gm1 + st.gm1,
                                       mt.gm2 + st.gm2);
}

std::vector<double> Window::grid() const {
  std::vector<double> g;
  if (points <= 1) {
    g.push_back(0.5 * (lo + hi));
    return g;
  }
  for (int k = 0; k < points; ++k) g.push_back(lo + (hi - lo) * k / (points - 1));
  return g;
}

Window default_window(const LnaDesign& design) {
  const double h = design.analysis.window_half_width_v;
  return {design.bias.v_b - h, design.bias.v_b + h, design.analysis.window_points};
}

std::vector<double> branch_gm2(const LnaDesign& design, Branch branch, double ratio,
                               const std::vector<double>& v_grid) {
  BiasNetwork net = design.bias;
  ControlTransistor ct = branch == Branch::mt ? net.ct_mt : net.ct_st;
  set_ct_ratio(ct, ratio);
  const MosfetParams& dev = branch == Branch::mt ? design.mt : design.st;
  SolverOptions opts;
  opts.max_iterations = design.analysis.bias_max_iter;
  std::vector<double> out;
  out.reserve(v_grid.size());
  for (double v : v_grid) {
    net.v_b = v;
    out.push_back(solve_branch(dev, ct, net, branch, design.temperature_k, opts).series.gm2);
  }
  return out;
}

double window_max_abs(const std::vector<double>& a, const std::vector<double>* b) {
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] + (b ? (*b)[k] : 0.0)));
  return m;
}

namespace {

constexpr double kInfeasible = std::numeric_limits<double>::infinity();
constexpr std::size_t kMaxDiagnostics = 20;

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> g;
  if (n <= 1 || lo == hi) return {lo};
  const double a = std::log(lo), b = std::log(hi);
  for (int k = 0; k < n; ++k) g.push_back(std::exp(a + (b - a) * k / (n - 1)));
  g.front() = lo;
  g.back() = hi;
  return g;
}

// Evaluates the window objective for candidate knob settings and remembers
// discarded candidates.
struct Objective {
  const LnaDesign& design;
  std::vector<double> v_grid;
  bool st_on;
  int evaluations = 0;
  std::vector<std::string> diagnostics;
  std::size_t discarded = 0;
  std::optional<ConvergenceError> non_convergence;  ///< first solver budget failure

  Objective(const LnaDesign& d, std::vector<double> grid, bool st)
      : design(d), v_grid(std::move(grid)), st_on(st) {}

  std::optional<std::vector<double>> table(Branch b, double ratio) {
    try {
      return branch_gm2(design, b, ratio, v_grid);
    } catch (const ConvergenceError& e) {
      if (!non_convergence) non_convergence = e;
      note(b, ratio, e);
      return std::nullopt;
    } catch (const std::exception& e) {
      note(b, ratio, e);
      return std::nullopt;
    }
  }

  void note(Branch b, double ratio, const std::exception& e) {
    ++discarded;
    if (diagnostics.size() < kMaxDiagnostics) {
      std::ostringstream os;
      os << "discarded " << to_string(b) << " ct ratio " << ratio << ": " << e.what();
      diagnostics.push_back(os.str());
    }
  }

  /// Every candidate failed. A solver budget failure is reported as such
  /// since no sizing can help it.
  [[noreturn]] void infeasible(const char* what) const {
    if (non_convergence) throw *non_convergence;
    throw NoFeasibleCancellation(what);
  }

  double operator()(double ct_mt, double ct_st) {
    ++evaluations;
    auto mt = table(Branch::mt, ct_mt);
    if (!mt) return kInfeasible;
    if (!st_on) return window_max_abs(*mt);
    auto st = table(Branch::st, ct_st);
    if (!st) return kInfeasible;
    return window_max_abs(*mt, &*st);
  }
};

// Ordering used everywhere a best candidate is picked.
bool better(double r, double ct_st, double best_r, double best_st) {
  if (r < best_r) return true;
  return r == best_r && ct_st < best_st;
}

struct Candidate {
  double ct_mt = 0.0;
  double ct_st = 0.0;
  double residual = kInfeasible;
};

CancellationResult finish(const LnaDesign& design, const Window& window, Objective& obj,
                          Candidate best) {
  CancellationResult r;
  r.window = window;
  r.ct_mt_wl = best.ct_mt;
  r.ct_st_wl = best.ct_st;
  auto mt = obj.table(Branch::mt, best.ct_mt);
  if (!mt) throw NoFeasibleCancellation("no feasible cancellation: MT branch unsolvable at the optimum");
  r.baseline = window_max_abs(*mt);
  if (!design.st_active() || !(best.residual <= r.baseline)) {
    r.st_disabled = true;
    r.residual = r.baseline;
  } else {
    r.residual = best.residual;
  }
  r.evaluations = obj.evaluations;
  r.diagnostics = std::move(obj.diagnostics);
  if (obj.discarded > r.diagnostics.size()) {
    std::ostringstream os;
    os << obj.discarded - r.diagnostics.size() << " further candidates discarded";
    r.diagnostics.push_back(os.str());
  }
  return r;
}

struct SimplexContext {
  Objective* obj;
  const SearchBox* box;
  bool free_mt, free_st;
  double fixed_mt, fixed_st;

  Candidate decode(const gsl_vector* x, double* penalty) const {
    Candidate c{fixed_mt, fixed_st, kInfeasible};
    std::size_t k = 0;
    double pen = 0.0;
    auto take = [&](double lo, double hi) {
      const double y = gsl_vector_get(x, k++);
      const double a = std::log(lo), b = std::log(hi);
      const double yc = std::clamp(y, a, b);
      pen += std::abs(y - yc);
      return std::exp(yc);
    };
    if (free_mt) c.ct_mt = take(box->ct_mt_min, box->ct_mt_max);
    if (free_st) c.ct_st = take(box->ct_st_min, box->ct_st_max);
    if (penalty) *penalty = pen;
    return c;
  }
};

double simplex_f(const gsl_vector* x, void* params) {
  auto* ctx = static_cast<SimplexContext*>(params);
  double pen = 0.0;
  Candidate c = ctx->decode(x, &pen);
  const double r = (*ctx->obj)(c.ct_mt, c.ct_st);
  if (!std::isfinite(r)) return 1e300;
  return r * (1.0 + pen);
}

}  // namespace

CancellationResult find_sweet_spot(const LnaDesign& design, const Window& window, Knobs knobs) {
  if (!(window.hi >= window.lo)) throw DomainError("find_sweet_spot: empty window");
  const bool st_on = design.st_active();
  const bool free_mt = knobs.ct_mt;
  const bool free_st = knobs.ct_st && st_on;
  if (!knobs.ct_mt && !knobs.ct_st) throw DomainError("find_sweet_spot: no free knob");

  Objective obj{design, window.grid(), st_on};
  const SearchBox& box = design.analysis.search;
  const double fixed_mt = ct_ratio(design.bias.ct_mt);
  const double fixed_st = st_on ? ct_ratio(design.bias.ct_st) : 0.0;

  const int coarse = (free_mt && free_st) ? 15 : 41;
  const auto g_mt = free_mt ? log_grid(box.ct_mt_min, box.ct_mt_max, coarse) : std::vector<double>{fixed_mt};
  const auto g_st = free_st ? log_grid(box.ct_st_min, box.ct_st_max, coarse) : std::vector<double>{fixed_st};

  Candidate best;
  best.ct_st = kInfeasible;
  for (double st : g_st) {
    for (double mt : g_mt) {
      const double r = obj(mt, st);
      if (better(r, st, best.residual, best.ct_st)) best = {mt, st, r};
    }
  }
  if (!std::isfinite(best.residual)) {
    obj.infeasible("no feasible cancellation: every candidate in the search box failed to bias");
  }

  const std::size_t dim = (free_mt ? 1 : 0) + (free_st ? 1 : 0);
  if (dim > 0) {
    SimplexContext ctx{&obj, &box, free_mt, free_st, fixed_mt, fixed_st};
    gsl_multimin_function fn{&simplex_f, dim, &ctx};
    gsl_vector* x = gsl_vector_alloc(dim);
    gsl_vector* step = gsl_vector_alloc(dim);
    std::size_t k = 0;
    if (free_mt) {
      gsl_vector_set(x, k, std::log(best.ct_mt));
      gsl_vector_set(step, k++, std::log(box.ct_mt_max / box.ct_mt_min) / (coarse - 1));
    }
    if (free_st) {
      gsl_vector_set(x, k, std::log(best.ct_st));
      gsl_vector_set(step, k++, std::log(box.ct_st_max / box.ct_st_min) / (coarse - 1));
    }
    gsl_multimin_fminimizer* s = gsl_multimin_fminimizer_alloc(gsl_multimin_fminimizer_nmsimplex2, dim);
    gsl_multimin_fminimizer_set(s, &fn, x, step);
    for (int it = 0; it < 400; ++it) {
      if (gsl_multimin_fminimizer_iterate(s) != GSL_SUCCESS) break;
      if (gsl_multimin_test_size(gsl_multimin_fminimizer_size(s), 1e-9) == GSL_SUCCESS) break;
    }
    Candidate c = ctx.decode(gsl_multimin_fminimizer_x(s), nullptr);
    c.residual = obj(c.ct_mt, c.ct_st);
    if (better(c.residual, c.ct_st, best.residual, best.ct_st)) best = c;
    gsl_multimin_fminimizer_free(s);
    gsl_vector_free(step);
    gsl_vector_free(x);
  }
  return finish(design, window, obj, best);
}

CancellationResult exhaustive_sweet_spot(const LnaDesign& design, const Window& window,
                                         Knobs knobs, int n) {
  const bool st_on = design.st_active();
  const bool free_st = knobs.ct_st && st_on;
  Objective obj{design, window.grid(), st_on};
  const SearchBox& box = design.analysis.search;
  const auto g_mt = knobs.ct_mt ? log_grid(box.ct_mt_min, box.ct_mt_max, n)
                                : std::vector<double>{ct_ratio(design.bias.ct_mt)};
  const auto g_st = free_st ? log_grid(box.ct_st_min, box.ct_st_max, n)
                            : std::vector<double>{st_on ? ct_ratio(design.bias.ct_st) : 0.0};

  // Branches bias independently, so each table is solved once.
  std::vector<std::optional<std::vector<double>>> t_mt, t_st;
  for (double mt : g_mt) t_mt.push_back(obj.table(Branch::mt, mt));
  if (st_on)
    for (double st : g_st) t_st.push_back(obj.table(Branch::st, st));

  Candidate best;
  best.ct_st = kInfeasible;
  for (std::size_t j = 0; j < g_st.size(); ++j) {
    for (std::size_t i = 0; i < g_mt.size(); ++i) {
      ++obj.evaluations;
      if (!t_mt[i] || (st_on && !t_st[j])) continue;
      const double r = st_on ? window_max_abs(*t_mt[i], &*t_st[j]) : window_max_abs(*t_mt[i]);
      if (better(r, g_st[j], best.residual, best.ct_st)) best = {g_mt[i], g_st[j], r};
    }
  }
  if (!std::isfinite(best.residual)) {
    obj.infeasible("no feasible cancellation: every grid point failed to bias");
  }
  return finish(design, window, obj, best);
}

LnaDesign apply_cancellation(const LnaDesign& design, const CancellationResult& r) {
  LnaDesign d = design;
  set_ct_ratio(d.bias.ct_mt, r.ct_mt_wl);
  if (d.st_active()) {
    if (r.st_disabled) {
      d.st.w = 0.0;
    } else {
      set_ct_ratio(d.bias.ct_st, r.ct_st_wl);
    }
  }
  return d;
}

std::vector<Gm2Row> gm2_profile(const LnaDesign& design, const std::vector<double>& v_grid) {
  std::vector<Gm2Row> rows;
  rows.reserve(v_grid.size());
  for (double v : v_grid) {
    Gm2Row row;
    row.v_b = v;
    LnaDesign d = design;
    d.bias.v_b = v;
    try {
      const OperatingPoints ops = solve_self_bias(d);
      row.gm2_mt = ops.mt.series.gm2;
      row.gm2_st = ops.st_active ? ops.st.series.gm2 : 0.0;
      row.gm2_sum = composite_series(ops.mt.series, ops.st.series).gm2;
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace mgtr
