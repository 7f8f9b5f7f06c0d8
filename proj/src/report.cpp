#include "fiberscope/report.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>

#include "fiberscope/errors.hpp"
#include "fiberscope/group_transform.hpp"
#include "fiberscope/random.hpp"

namespace fiberscope {

int exit_code_for(const Json& report);

namespace {

constexpr int kReportFormat = 1;
constexpr std::size_t kMaxListedViolations = 20;

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream out;
  out << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return out.str();
}

std::string error_type(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return "config";
  if (dynamic_cast<const InvalidConfig*>(&e)) return "invalid-config";
  if (dynamic_cast<const GridMismatch*>(&e)) return "grid-mismatch";
  if (dynamic_cast<const CrossSectionViolation*>(&e)) return "cross-section";
  if (dynamic_cast<const ShapeError*>(&e)) return "shape";
  if (dynamic_cast<const InvalidResidue*>(&e)) return "invalid-residue";
  if (dynamic_cast<const DecompositionInfeasible*>(&e)) return "decomposition-infeasible";
  if (dynamic_cast<const IoError*>(&e)) return "io";
  return "internal";
}

Json header(const RunConfig& config) {
  Json r;
  r["tool"] = "fiberscope";
  r["format"] = kReportFormat;
  r["generated_at"] = utc_timestamp();
  r["seed"] = config.seed;
  r["config"] = render(config);
  return r;
}

Json shape_json(const FiberShape& shape) {
  Json j;
  j["d"] = shape.lattice.d;
  j["c"] = shape.lattice.center_spacing;
  j["N"] = shape.lattice.refinement;
  j["S"] = shape.grid.size();
  j["K"] = shape.residues.band_half_width();
  j["M"] = shape.rep.points_per_axis();
  j["L"] = shape.rep.window();
  j["block_dim"] = shape.block_dim();
  j["band"] = {shape.residues.band_begin(), shape.residues.band_end()};
  return j;
}

Json verdict_json(const VerdictResult& v) {
  return Json{{"verdict", v.verdict},
              {"max_residual", v.max_residual},
              {"threshold", v.threshold},
              {"margin_ok", v.margin_ok()}};
}

FiberField load_generator(const RunConfig& config, const FiberShape& shape, std::size_t index) {
  const GeneratorSpec& g = config.generators[index];
  if (g.kind == "sampled-file") {
    const FiberField field = fiberize(read_sampled_function(g.path), shape);
    return field;
  }
  SynthSpec spec;
  spec.kind = synth_kind_from_string(g.kind);
  spec.seed = config.generator_seed(index);
  spec.residues = g.residues;
  spec.residue = g.residue;
  spec.path = g.path;
  return synthesize(spec, shape);
}

Json occupancy(const FiberField& f) {
  const auto& shape = f.shape();
  Json rows = Json::array();
  for (std::size_t s = 0; s < shape.grid.size(); ++s) {
    Json row = Json::array();
    for (std::size_t slot = 0; slot < shape.band_size(); ++slot) row.push_back(f.block_at(s, slot).norm());
    rows.push_back(std::move(row));
  }
  return rows;
}

Json beta_json(const RunConfig& config, const FiberShape& shape, const std::vector<FiberField>& generators) {
  const FiberField& phi = generators.at(config.beta_phi);
  const GammaSet gamma = config.gamma();
  const auto translates = translated_generators({phi}, gamma);
  const std::size_t k = translates.size();
  Json j;
  j["phi"] = config.beta_phi;
  j["target"] = config.beta_target;

  std::vector<std::vector<Complex>> planted;
  FiberField f(shape);
  if (config.beta_target == "planted") {
    Rng rng(derive_seed(config.seed, 0xbe7aU));
    planted.resize(shape.grid.size());
    for (std::size_t s = 0; s < shape.grid.size(); ++s) {
      CVector fiber = CVector::Zero(static_cast<Eigen::Index>(shape.fiber_length()));
      for (std::size_t g = 0; g < k; ++g) {
        planted[s].push_back(rng.complex_symmetric());
        fiber += planted[s][g] * translates[g].fiber(s);
      }
      f.set_fiber(s, fiber);
    }
  } else {
    f = generators.at(static_cast<std::size_t>(std::stoul(config.beta_target)));
  }

  const BetaDecomposition beta = beta_decompose(f, phi, gamma, config.tol);
  j["max_reconstruction_residual"] = beta.max_reconstruction_residual;
  j["max_projection_formula_residual"] = beta.max_projection_formula_residual;
  bool verdict = beta.max_reconstruction_residual < config.tol.member;

  if (!planted.empty()) {
    const RangeBasis span = span_basis(shape, translates, config.tol.rank);
    double worst = 0.0;
    std::size_t compared = 0;
    for (std::size_t s = 0; s < shape.grid.size(); ++s) {
      if (span.rank(s) != k) continue;
      ++compared;
      for (std::size_t g = 0; g < k; ++g) worst = std::max(worst, std::abs(beta.coefficients[s][g] - planted[s][g]));
    }
    j["independent_points"] = compared;
    j["max_coefficient_error"] = worst;
    if (compared > 0) verdict = verdict && worst < config.tol.member;
  }
  j["verdict"] = verdict;
  return j;
}

int finish(Json& r) {
  const int code = exit_code_for(r);
  r["exit_code"] = code;
  return code;
}

}  // namespace

int exit_code_for(const Json& report) {
  if (report.contains("error") && !report["error"].is_null()) return kExitError;
  if (!report.contains("verdicts")) return kExitError;
  for (const auto& [name, v] : report["verdicts"].items())
    if (!v.get<bool>()) return kExitVerdictFalse;
  return kExitOk;
}

RunResult run(const RunConfig& config) {
  RunResult result;
  Json& r = result.report;
  r = header(config);
  r["shape"] = nullptr;
  r["analyses"] = Json::object();
  r["verdicts"] = Json::object();
  r["plotdata"] = Json::object();
  r["error"] = nullptr;

  try {
    if (auto problems = config.problems(); !problems.empty()) throw ConfigError(std::move(problems));
    const FiberShape shape = config.shape();
    r["shape"] = shape_json(shape);
    Json& out = r["analyses"];
    Json& verdicts = r["verdicts"];
    Json& plot = r["plotdata"];
    plot["sigma"] = shape.grid.points();
    plot["band"] = {shape.residues.band_begin(), shape.residues.band_end()};

    if (config.requested("tile-check")) {
      const TilingReport t = tiling_check(shape.grid, shape.residues);
      Json j;
      j["verdict"] = t.holds;
      j["window_cells"] = t.window_cells;
      j["covered_cells"] = t.covered_cells;
      j["violation_count"] = t.violations.size();
      Json listed = Json::array();
      for (std::size_t i = 0; i < std::min(t.violations.size(), kMaxListedViolations); ++i) {
        const auto& v = t.violations[i];
        listed.push_back({{"kind", to_string(v.kind)},
                          {"n", v.fiber_index},
                          {"cell", v.cell},
                          {"lower_edge", v.lower_edge},
                          {"cover_count", v.cover_count}});
      }
      j["violations"] = std::move(listed);
      j["section_issue"] = t.section_issue;
      out["tile-check"] = std::move(j);
      verdicts["tile-check"] = t.holds;
    }

    const bool needs_problem = std::any_of(config.analyses.begin(), config.analyses.end(),
                                           [](const std::string& a) { return a != "tile-check"; });
    if (!needs_problem) {
      result.exit_code = finish(r);
      return result;
    }

    for (std::size_t i = 0; i < config.generators.size(); ++i) result.generators.push_back(load_generator(config, shape, i));
    plot["occupancy"] = Json::array();
    for (const auto& g : result.generators) plot["occupancy"].push_back(occupancy(g));

    const InvarianceProblem problem(shape, result.generators, config.gamma(), config.tol);
    std::optional<VerdictResult> oracle;
    auto invariant = [&]() {
      if (!oracle) oracle = test_oracle(problem);
      return oracle->verdict;
    };

    if (config.requested("range")) {
      const RangeBasis& range = problem.range();
      Json j;
      j["dim_W"] = dimension_function(range);
      j["min_retained_ratio"] = range.min_retained_ratio();
      j["max_dropped_ratio"] = range.max_dropped_ratio();
      j["rank_margin_ok"] = range.rank_margin_ok();
      out["range"] = std::move(j);
      plot["dim_W"] = dimension_function(range);
    }
    if (config.requested("oracle")) {
      invariant();
      out["oracle"] = verdict_json(*oracle);
      verdicts["oracle"] = oracle->verdict;
    }
    if (config.requested("containment")) {
      const VerdictResult v = test_containment(problem);
      out["containment"] = verdict_json(v);
      verdicts["containment"] = v.verdict;
    }
    if (config.requested("membership")) {
      const VerdictResult v = test_membership(problem);
      out["membership"] = verdict_json(v);
      verdicts["membership"] = v.verdict;
    }
    if (config.requested("dimension")) {
      const DimensionResult dim = test_dimension(problem);
      Json j;
      j["verdict"] = dim.verdict;
      j["dim_W"] = dim.dim_w;
      j["dim_V"] = dim.dim_v;
      std::size_t mismatched = 0;
      for (std::size_t s = 0; s < dim.dim_w.size(); ++s) mismatched += dim.dim_w[s] != dim.dim_v_sum(s);
      j["mismatched_points"] = mismatched;
      j["rank_margin_ok"] = dim.rank_margin_ok;
      out["dimension"] = std::move(j);
      verdicts["dimension"] = dim.verdict;
      plot["dim_W"] = dim.dim_w;
      plot["dim_V"] = dim.dim_v;
    }
    if (config.requested("decompose")) {
      const DecompositionReport d = decompose(problem, invariant(), derive_seed(config.seed, 0xdec0U));
      out["decompose"] = {{"verdict", d.verdict},
                          {"elements", d.elements},
                          {"sum_exact", d.sum_exact},
                          {"max_pythagoras_error", d.max_pythagoras_error},
                          {"components_checked", d.components_checked},
                          {"max_component_residual", d.max_component_residual}};
      verdicts["decompose"] = d.verdict;
    }
    if (config.requested("measure")) {
      const MeasureReport m = measure_report(problem, invariant());
      out["measure"] = {{"verdict", m.verdict},   {"advisory", m.advisory}, {"lhs", m.lhs},
                        {"rhs", m.rhs},           {"rhs_integral", m.rhs_integral},
                        {"bound", m.bound},       {"level_counts", m.level_counts},
                        {"lhs_ok", m.lhs_ok},     {"rhs_ok", m.rhs_ok}};
      if (!m.advisory) verdicts["measure"] = m.verdict;
    }
    if (config.requested("support-bound")) {
      Json list = Json::array();
      bool any_checked = false;
      bool all_hold = true;
      for (const auto& phi : result.generators) {
        const SupportBoundReport sb = support_bound(shape, phi, config.gamma(), config.tol);
        list.push_back({{"status", to_string(sb.status)},
                        {"measured_zero", sb.measured_zero},
                        {"bound", sb.bound},
                        {"note", sb.note}});
        if (sb.status == SupportBoundReport::Status::holds || sb.status == SupportBoundReport::Status::violated) {
          any_checked = true;
          all_hold = all_hold && sb.status == SupportBoundReport::Status::holds;
        }
      }
      out["support-bound"] = {{"generators", std::move(list)}};
      if (any_checked) verdicts["support-bound"] = all_hold;
    }
    if (config.requested("beta") && result.generators.empty()) {
      out["beta"] = {{"skipped", "no generators"}};
    } else if (config.requested("beta")) {
      Json j = beta_json(config, shape, result.generators);
      verdicts["beta"] = j["verdict"];
      out["beta"] = std::move(j);
    }
  } catch (const std::exception& e) {
    Json err{{"type", error_type(e)}, {"message", e.what()}};
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) err["problems"] = ce->problems();
    r["error"] = std::move(err);
  }
  result.exit_code = finish(r);
  return result;
}

RunResult run_transform(const RunConfig& config) {
  RunResult result;
  Json& r = result.report;
  r = header(config);
  r["shape"] = nullptr;
  r["analyses"] = Json::object();
  r["verdicts"] = Json::object();
  r["plotdata"] = Json::object();
  r["error"] = nullptr;
  try {
    if (auto problems = config.problems(); !problems.empty()) throw ConfigError(std::move(problems));
    const FiberShape shape = config.shape();
    r["shape"] = shape_json(shape);
    r["plotdata"]["sigma"] = shape.grid.points();
    r["plotdata"]["band"] = {shape.residues.band_begin(), shape.residues.band_end()};
    r["plotdata"]["occupancy"] = Json::array();
    Json list = Json::array();
    bool all_ok = true;
    std::size_t count = 0;
    const auto elements = config.gamma().elements();
    for (std::size_t i = 0; i < config.generators.size(); ++i) {
      if (config.generators[i].kind != "sampled-file") continue;
      ++count;
      const SampledFunction f = read_sampled_function(config.generators[i].path);
      result.generators.push_back(fiberize(f, shape));
      r["plotdata"]["occupancy"].push_back(occupancy(result.generators.back()));
      Json j;
      j["generator"] = i;
      j["plancherel_error"] = plancherel_check(f, shape);
      j["central_intertwining_error"] = intertwining_check(f, GroupElement::identity(1), 1, shape);
      double worst = 0.0;
      for (const auto& g : elements) worst = std::max(worst, intertwining_check(f, g, 0, shape));
      j["gamma_intertwining_error"] = worst;
      const bool ok = j["plancherel_error"].get<double>() < config.plancherel_tol &&
                      j["central_intertwining_error"].get<double>() < config.intertwining_tol &&
                      worst < config.intertwining_tol;
      j["verdict"] = ok;
      all_ok = all_ok && ok;
      list.push_back(std::move(j));
    }
    if (count == 0) throw InvalidConfig("transform needs at least one sampled-file generator");
    r["analyses"]["transform"] = {{"generators", std::move(list)}};
    r["verdicts"]["transform"] = all_ok;
  } catch (const std::exception& e) {
    Json err{{"type", error_type(e)}, {"message", e.what()}};
    if (const auto* ce = dynamic_cast<const ConfigError*>(&e)) err["problems"] = ce->problems();
    r["error"] = std::move(err);
  }
  result.exit_code = finish(r);
  return result;
}

void write_outputs(const RunResult& result, const RunConfig& config, const std::filesystem::path& dir,
                   const OutputOptions& options) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  if (options.json) {
    const auto path = dir / "report.json";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << result.report.dump(2) << '\n';
    if (!out) throw IoError("write failed for " + path.string());
  }
  if (options.csv) emit_plotdata(result.report, dir);
  if (config.dumps)
    for (std::size_t i = 0; i < result.generators.size(); ++i)
      write_fiber_field(dir / ("generator_" + std::to_string(i) + ".fibf"), result.generators[i]);
}

void emit_plotdata(const Json& report, const std::filesystem::path& dir) {
  const Json empty = Json::object();
  const Json& plot = report.contains("plotdata") && report["plotdata"].is_object() ? report["plotdata"] : empty;
  int N = 0;
  if (report.contains("shape") && report["shape"].is_object()) N = report["shape"]["N"].get<int>();

  {
    const auto path = dir / "dimension.csv";
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "sigma,dim_W";
    for (int j = 0; j < N; ++j) out << ",dim_V" << j;
    out << '\n' << std::setprecision(17);
    if (plot.contains("sigma") && plot.contains("dim_W")) {
      const auto& sigma = plot["sigma"];
      const auto& dw = plot["dim_W"];
      const bool with_v = plot.contains("dim_V") && plot["dim_V"].size() == static_cast<std::size_t>(N);
      for (std::size_t s = 0; s < sigma.size() && s < dw.size(); ++s) {
        out << sigma[s].get<double>() << ',' << dw[s].get<std::size_t>();
        for (int j = 0; j < N; ++j) {
          out << ',';
          if (with_v) out << plot["dim_V"][static_cast<std::size_t>(j)][s].get<std::size_t>();
        }
        out << '\n';
      }
    }
    if (!out) throw IoError("write failed for " + path.string());
  }

  if (!plot.contains("occupancy")) return;
  const int band_begin = plot["band"][0].get<int>();
  const int band_end = plot["band"][1].get<int>();
  for (std::size_t g = 0; g < plot["occupancy"].size(); ++g) {
    const auto path = dir / ("occupancy_" + std::to_string(g) + ".csv");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << "s,sigma";
    for (int n = band_begin; n < band_end; ++n) out << ",n" << n;
    out << '\n' << std::setprecision(17);
    const auto& rows = plot["occupancy"][g];
    for (std::size_t s = 0; s < rows.size(); ++s) {
      out << s << ',' << plot["sigma"][s].get<double>();
      for (const auto& v : rows[s]) out << ',' << v.get<double>();
      out << '\n';
    }
    if (!out) throw IoError("write failed for " + path.string());
  }
}

void print_summary(const Json& report, std::ostream& out) {
  if (report.contains("error") && !report["error"].is_null()) {
    out << "error (" << report["error"]["type"].get<std::string>() << "): "
        << report["error"]["message"].get<std::string>() << '\n';
  }
  if (report.contains("analyses"))
    for (const auto& [name, a] : report["analyses"].items()) {
      out << std::left << std::setw(14) << name << ' ';
      if (report["verdicts"].contains(name))
        out << (report["verdicts"][name].get<bool>() ? "true " : "false");
      else
        out << "n/a  ";
      if (a.contains("max_residual")) out << "  max residual " << a["max_residual"].get<double>();
      if (name == "dimension") out << "  mismatched points " << a["mismatched_points"].get<std::size_t>();
      if (name == "measure" && a["advisory"].get<bool>()) out << "  (advisory)";
      out << '\n';
    }
  out << "exit code " << report.value("exit_code", kExitError) << '\n';
}

Json deterministic_part(Json report) {
  report.erase("generated_at");
  return report;
}

}  // namespace fiberscope
