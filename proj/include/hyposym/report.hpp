#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hyposym/conditions.hpp"
#include "hyposym/corpus.hpp"
#include "hyposym/curvature.hpp"
#include "hyposym/curve.hpp"
#include "hyposym/variation.hpp"

namespace hyposym {

using json = nlohmann::json;

inline constexpr int report_schema = 1;
inline constexpr const char* convention_banner =
    "H = (1/n) sum of principal curvatures w.r.t. the outer normal; unit sphere has H = +1. "
    "dS/dt = int v (H_sum_upper - H_sum_lower) dx' with H_sum = nH.";

struct RunConfig {
  std::string command;  // check | variation | symmetry | corpus-list | all
  std::string surface;
  CorpusParams params;
  double h = 0.01;
  std::vector<double> deltas = {0.3, 0.15};
  std::optional<double> r;         // Condition S' radius
  std::optional<double> ball_rho;  // interior-ball radius for Claim 2
  double tol = 1e-6;               // Main Assumption (inequality)
  double equality_tol = 1e-3;      // curvature equality
  double symmetry_tol = 1e-6;
  double delta_eval = 0.1;
  double h_t = 1e-3;
  int audit_fields = 5;
  unsigned seed = 1;
  bool use_profile = true;
  std::string out;
  std::string csv_dir;
};

struct RunReport {
  json doc;
  bool pass = false;
  int exit_code = 1;
};

// ---- JSON conversion ----

inline json to_json(Vec2 v) { return json::array({v.x, v.y}); }

inline json to_json(const ConditionVerdict& v) {
  json w = json::array();
  for (const auto& x : v.witnesses) w.push_back({{"point", x.point}, {"margin", x.margin}, {"values", x.values}});
  return {{"condition", v.id},   {"pass", v.pass},    {"worst_margin", v.worst_margin}, {"tolerance", v.tolerance},
          {"witnesses", w},      {"params", v.params}, {"notes", v.notes}};
}

inline json to_json(const SprimeRadius& r) {
  json j = {{"radius", r.radius}, {"capped", r.capped}, {"cap", r.cap}};
  if (r.capped) j["status"] = "S-limit";
  return j;
}

inline json to_json(const SymmetryResult& s) {
  json j = {{"symmetric", s.symmetric}, {"max_deviation", s.max_deviation}};
  if (s.symmetric) {
    j["midplane"] = s.midplane;
  } else {
    j["witness"] = to_json(s.witness);
    j["witness_sum"] = s.witness_value;
  }
  return j;
}

inline json to_json(const FirstVariationFD& f) {
  json samples = json::array();
  for (const auto& [t, S] : f.samples) samples.push_back({{"t", t}, {"S", S}});
  return {{"h_t", f.h_t},           {"delta_cut", f.delta_cut}, {"rate", f.rate},
          {"rate_half", f.rate_half}, {"richardson", f.richardson}, {"samples", samples}};
}

inline json to_json(const Decomposition& d) {
  return {{"delta", d.delta},         {"I", d.I},
          {"I1", d.I1},               {"I2", d.I2},
          {"split_error", d.split_error}, {"F_min", d.F_min},
          {"F_integral", d.F_integral}, {"support_cells", d.support_cells},
          {"collar_cells", d.collar_cells}};
}

inline json to_json(const Claim1& c) {
  return {{"a0", c.a0}, {"xbar", to_json(c.xbar)}, {"eps", c.eps}, {"b1", c.b1}, {"b2", c.b2},
          {"ball_measure", c.ball_measure}, {"ball_cells", c.ball_cells}, {"delta", c.delta}, {"I1", c.I1},
          {"holds", c.holds}};
}

inline json to_json(const Claim2Row& r) {
  return {{"delta", r.delta},       {"max_T3", r.max_T3},
          {"max_T3_normals", r.max_T3_normals}, {"max_form_gap", r.max_form_gap},
          {"bound", r.bound},       {"argmax", to_json(r.argmax)},
          {"cells", r.cells},       {"pass", r.pass}};
}

inline json config_to_json(const RunConfig& c) {
  json j = {{"command", c.command},
            {"surface", c.surface},
            {"h", c.h},
            {"delta", c.deltas},
            {"tol", c.tol},
            {"equality_tol", c.equality_tol},
            {"symmetry_tol", c.symmetry_tol},
            {"delta_eval", c.delta_eval},
            {"ht", c.h_t},
            {"audit", c.audit_fields},
            {"seed", c.seed},
            {"profile", c.use_profile},
            {"params",
             {{"radius", c.params.r},
              {"a", c.params.a},
              {"c", c.params.c},
              {"R0", c.params.R0},
              {"rho", c.params.rho},
              {"eps", c.params.eps},
              {"shift", c.params.shift}}}};
  if (c.r) j["r"] = *c.r;
  if (c.ball_rho) j["ball_rho"] = *c.ball_rho;
  return j;
}

// ---- field dumps ----

inline void write_cell_csv(const std::filesystem::path& path, const GridRegion& region,
                           const std::function<double(std::size_t)>& value) {
  std::ofstream os(path);
  if (!os) throw Error("io", "cannot write " + path.string());
  os.precision(12);
  os << "x1,x2,value\n";
  const auto& g = region.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (!region.inside(k)) continue;
    const Vec2 x = g.center(k);
    os << x.x << ',' << x.y << ',' << value(k) << '\n';
  }
}

// Writes to a sibling temporary file and renames it over the target.
inline void write_atomically(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw Error("io", "cannot write " + tmp.string());
    os << text;
    if (!os) throw Error("io", "write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

// ---- orchestration ----

namespace detail {

class Runner {
public:
  explicit Runner(const RunConfig& c) : cfg_(c) {}

  RunReport run() {
    json doc;
    doc["schema"] = report_schema;
    doc["tool"] = "hyposym";
    doc["convention"] = convention_banner;
    doc["config"] = config_to_json(cfg_);
    if (cfg_.command == "corpus-list") {
      json list = json::array();
      for (const auto& e : corpus_list())
        list.push_back({{"name", e.name},
                        {"kind", e.kind},
                        {"parameters", e.parameters},
                        {"expected",
                         {{"main_assumption", e.expected.main_assumption},
                          {"condition_S", e.expected.condition_S},
                          {"condition_Sprime", e.expected.condition_Sprime},
                          {"symmetric", e.expected.symmetric}}}});
      doc["corpus"] = list;
      doc["summary"] = {{"pass", true}};
      return {doc, true, 0};
    }
    info_ = corpus_info(cfg_.surface);
    const bool is_curve = info_.kind == "curve";
    if (is_curve) {
      timed("build", [&] { curve_ = build_curve(); });
      if (wants("check") || wants("symmetry")) run_curve_checks();
    } else {
      timed("build", [&] {
        CorpusParams p = cfg_.params;
        surface_ = std::make_shared<const DoubleGraphSurface>(corpus_surface(cfg_.surface, p, cfg_.h));
      });
      doc["surface"] = {{"label", surface_->label},
                        {"n", surface_->dim()},
                        {"h", surface_->h()},
                        {"hat_area", surface_->hat_area},
                        {"region_measure", measure(surface_->region->mask())},
                        {"boundary_samples", surface_->region->boundary().size()}};
      if (surface_->interior_ball_radius) doc["surface"]["interior_ball_radius"] = *surface_->interior_ball_radius;
      {
        // Empirical C1 in |R \ R_delta| <= C1 delta.
        json rows = json::array();
        const auto& R = *surface_->region;
        for (double d : cfg_.deltas) {
          const double collar = measure_difference(R.mask(), erode(R, d).mask);
          rows.push_back({{"delta", d}, {"collar_measure", collar}, {"ratio", collar / d}});
        }
        doc["surface"]["erosion"] = rows;
      }
      if (wants("check")) run_surface_checks();
      if (wants("symmetry")) run_surface_symmetry();
      if (wants("variation")) run_variation();
      if (!cfg_.csv_dir.empty()) timed("csv", [&] { dump_csv(); });
    }
    bool pass = true;
    json comps = json::array();
    for (const auto& c : components_) {
      pass = pass && c["ok"].get<bool>();
      comps.push_back(c);
    }
    doc["results"] = results_;
    doc["components"] = comps;
    doc["notes"] = notes_;
    doc["summary"] = {{"pass", pass}, {"components", components_.size()}, {"expected_profile", cfg_.use_profile}};
    doc["timings"] = timings_;
    return {doc, pass, pass ? 0 : 1};
  }

private:
  bool wants(const char* what) const { return cfg_.command == what || cfg_.command == "all"; }

  template <class Fn>
  void timed(const std::string& name, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  // Runs a component; a thrown Error is recorded as an observed failure.
  void component(const std::string& name, bool expected, const std::function<bool(json&)>& fn) {
    json detail;
    bool observed = false;
    std::string error;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      observed = fn(detail);
    } catch (const Error& e) {
      error = e.what();
      detail["error"] = e.code();
    }
    timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!cfg_.use_profile) expected = true;
    json c = {{"name", name}, {"observed", observed}, {"expected", expected}, {"ok", observed == expected}};
    if (!error.empty()) c["error"] = error;
    components_.push_back(c);
    results_[name] = detail;
  }

  ClosedCurve build_curve() const {
    if (cfg_.surface == "slanted_tube") return make_slanted_tube();
    if (cfg_.surface == "circle") return make_circle_curve(cfg_.params.r);
    return make_ellipse_curve(cfg_.params.a, cfg_.params.c);
  }

  void run_surface_checks() {
    const auto& s = *surface_;
    component("main_assumption", info_.expected.main_assumption, [&](json& d) {
      const auto v = check_main_assumption(s, cfg_.delta_eval, cfg_.tol);
      d = to_json(v);
      return v.pass;
    });
    component("main_assumption_equality", info_.expected.symmetric, [&](json& d) {
      const auto v = check_main_assumption(s, cfg_.delta_eval, cfg_.equality_tol, MainAssumptionMode::equality);
      d = to_json(v);
      return v.pass;
    });
    const double tol_S = default_S_tolerance(*s.region);
    component("condition_S", info_.expected.condition_S, [&](json& d) {
      const auto v = check_condition_S(s, tol_S);
      d = to_json(v);
      return v.pass;
    });
    if (cfg_.r) {
      component("condition_Sprime", info_.expected.condition_Sprime, [&](json& d) {
        const auto v = check_condition_Sprime(s, *cfg_.r, default_Sprime_tolerance(*s.region));
        d = to_json(v);
        return v.pass;
      });
    }
    component("max_Sprime_radius", info_.expected.condition_Sprime, [&](json& d) {
      sprime_ = max_Sprime_radius(s, default_Sprime_tolerance(*s.region));
      d = to_json(*sprime_);
      return true;
    });
  }

  void run_curve_checks() {
    const auto& c = curve_;
    results_["curve"] = {{"label", c.label()}, {"length", c.length()}, {"period", c.period()}};
    if (wants("check")) {
      component("pairwise_main_assumption", info_.expected.main_assumption, [&](json& d) {
        const auto v = check_pairwise_main_assumption(c, cfg_.equality_tol);
        d = to_json(v);
        return v.pass;
      });
      component("condition_S", info_.expected.condition_S, [&](json& d) {
        const auto v = check_condition_S(c, 1e-6);
        d = to_json(v);
        return v.pass;
      });
      if (cfg_.r) {
        component("condition_Sprime", info_.expected.condition_Sprime, [&](json& d) {
          const auto v = check_condition_Sprime(c, *cfg_.r, 1e-6);
          d = to_json(v);
          return v.pass;
        });
      }
      component("max_Sprime_radius", info_.expected.condition_Sprime, [&](json& d) {
        const auto r = max_Sprime_radius(c, 1e-6, cfg_.h, 0.25 * cfg_.h);
        d = to_json(r);
        return true;
      });
    }
    component("symmetry", info_.expected.symmetric, [&](json& d) {
      const auto s = detect_symmetry(c, cfg_.symmetry_tol);
      d = to_json(s);
      return s.symmetric;
    });
  }

  void run_surface_symmetry() {
    if (symmetry_done_) return;
    symmetry_done_ = true;
    component("symmetry", info_.expected.symmetric, [&](json& d) {
      const auto s = detect_symmetry(*surface_, cfg_.symmetry_tol);
      d = to_json(s);
      symmetric_ = s.symmetric;
      return s.symmetric;
    });
  }

  void run_variation() {
    const auto& s = *surface_;
    run_surface_symmetry();
    component("translation_invariance", true, [&](json& d) {
      const auto fd = first_variation_fd(s, translation_field(), cfg_.h_t);
      d = to_json(fd);
      const double S = fd.samples[3].second;
      d["area"] = S;
      return std::abs(fd.rate) <= 1e-6 * S;
    });
    std::vector<double> sup_scaled;
    json ladder = json::array();
    for (double delta : cfg_.deltas) {
      const std::string tag = "delta=" + format(delta);
      component("variation[" + tag + "]", true, [&](json& d) {
        const auto sh = build_shear(s, delta);
        const auto& cut = *sh.cutoff;
        sup_scaled.push_back(cut.sup_grad() * delta);
        d["cutoff"] = {{"sup_grad", cut.sup_grad()},
                       {"sup_grad_times_delta", cut.sup_grad() * delta},
                       {"degenerate", cut.degenerate()},
                       {"kernel_mass", cut.kernel().mass()}};
        const auto fd = first_variation_fd(s, sh.field, cfg_.h_t);
        const double an = first_variation_analytic(s, sh.field);
        const auto dec = decompose_I(s, cut);
        d["first_variation_fd"] = to_json(fd);
        d["first_variation_analytic"] = an;
        d["decomposition"] = to_json(dec);
        const bool agree = std::abs(fd.rate - an) <= std::max(1e-3 * std::abs(fd.rate), 1e-5);
        const bool exact = dec.split_error <= 1e-8 * (std::abs(dec.I1) + std::abs(dec.I2) + 1);
        const bool matches = std::abs(dec.I - fd.rate) <= std::max(1e-3 * std::abs(fd.rate), 1e-5);
        d["checks"] = {{"fd_vs_analytic", agree}, {"split_exact", exact}, {"I_vs_fd", matches},
                       {"F_nonnegative", dec.F_min >= -1e-9}};
        bool ok = agree && exact && matches && dec.F_min >= -1e-9;
        if (!symmetric_) {
          try {
            const auto c1 = claim1_bound(s, delta);
            d["claim1"] = to_json(c1);
            ok = ok && c1.holds;
          } catch (const Error& e) {
            d["claim1"] = {{"error", e.code()}};
            ok = false;
          }
        } else {
          d["claim1"] = {{"status", "symmetric-surface"}};
        }
        ladder.push_back({{"delta", delta}, {"I1", dec.I1}, {"I2", dec.I2},
                          {"I2_over_sqrt_delta", dec.I2 / std::sqrt(delta)}});
        return ok;
      });
    }
    results_["I2_ladder"] = ladder;
    if (sup_scaled.size() >= 2) {
      const auto [lo, hi] = std::minmax_element(sup_scaled.begin(), sup_scaled.end());
      results_["cutoff_gradient_spread"] = *hi > 0 ? (*hi - *lo) / *hi : 0.0;
    }
    component("first_variation_audit", true, [&](json& d) {
      json rows = json::array();
      bool ok = true;
      for (int i = 0; i < cfg_.audit_fields; ++i) {
        const unsigned seed = cfg_.seed + static_cast<unsigned>(i);
        const auto v = random_smooth_field(*s.region, 0.1, seed);
        const double fd = first_variation_fd(s, v, cfg_.h_t).rate;
        const double an = first_variation_analytic(s, v);
        const bool agree = std::abs(fd - an) <= std::max(1e-3 * std::abs(fd), 1e-5);
        ok = ok && agree;
        rows.push_back({{"seed", seed}, {"fd", fd}, {"analytic", an}, {"agree", agree}});
      }
      d["fields"] = rows;
      return ok;
    });
    std::optional<double> rho = cfg_.ball_rho ? cfg_.ball_rho : s.interior_ball_radius;
    std::optional<double> r = cfg_.r;
    if (!r) {
      try {
        if (!sprime_) sprime_ = max_Sprime_radius(s, default_Sprime_tolerance(*s.region));
        r = sprime_->radius;
      } catch (const Error& e) {
        notes_.push_back(std::string("claim2 skipped: ") + e.what());
      }
    }
    if (rho && r) {
      component("claim2", true, [&](json& d) {
        const auto rows = claim2_check(s, *rho, *r, cfg_.deltas);
        json out = json::array();
        bool ok = true;
        for (const auto& row : rows) {
          out.push_back(to_json(row));
          ok = ok && row.pass && row.max_form_gap <= 1e-9;
        }
        d = {{"rho", *rho}, {"r", *r}, {"rows", out}};
        return ok;
      });
    } else if (!rho) {
      notes_.push_back("claim2 skipped: no interior-ball radius for this surface (pass --ball-rho)");
    }
  }

  void dump_csv() {
    namespace fs = std::filesystem;
    const fs::path dir(cfg_.csv_dir);
    fs::create_directories(dir);
    const auto& s = *surface_;
    {
      std::ofstream os(dir / "surface.csv");
      write_curvature_csv(os, s, 2 * s.h());
    }
    const auto& g = s.region->grid();
    for (double delta : cfg_.deltas) {
      const auto sh = build_shear(s, delta);
      const auto& cut = *sh.cutoff;
      write_cell_csv(dir / ("phi_delta_" + format(delta) + ".csv"), *s.region, [&](std::size_t k) { return cut.phi(k); });
      write_cell_csv(dir / ("v_delta_" + format(delta) + ".csv"), *s.region,
                     [&](std::size_t k) { return sh.field.value(g.center(k)); });
    }
    write_cell_csv(dir / "F.csv", *s.region, [&](std::size_t k) {
      return s.region->dist(k) > 2 * s.h() ? F_field(s, g.center(k)).F : 0.0;
    });
  }

  static std::string format(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
  }

  const RunConfig& cfg_;
  CorpusInfo info_;
  std::shared_ptr<const DoubleGraphSurface> surface_;
  ClosedCurve curve_;
  std::optional<SprimeRadius> sprime_;
  bool symmetric_ = false;
  bool symmetry_done_ = false;
  std::vector<json> components_;
  json results_ = json::object();
  json timings_ = json::object();
  std::vector<std::string> notes_;
};

} // namespace detail

// Executes the requested command. Component errors are recorded and the run
// continues; the report passes iff every component matches its expectation.
inline RunReport run(const RunConfig& config) {
  detail::Runner r(config);
  auto rep = r.run();
  if (!config.out.empty()) write_atomically(config.out, rep.doc.dump(2) + "\n");
  return rep;
}

} // namespace hyposym
