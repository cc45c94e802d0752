#include "cplap/config.hpp"

#include <fstream>
#include <set>

namespace cplap {

namespace {

void require_keys(const Json& block, const std::set<std::string>& allowed,
                  const std::string& where) {
  if (!block.is_object())
    throw ValidationError(where + ": expected an object");
  for (auto it = block.begin(); it != block.end(); ++it)
    if (allowed.find(it.key()) == allowed.end())
      throw ValidationError(where + ": unknown key '" + it.key() + "'");
}

Complex complex_from(const Json& j, const std::string& where) {
  if (!j.is_array() || j.size() != 2)
    throw ValidationError(where + ": expected [re, im]");
  return {j[0].get<double>(), j[1].get<double>()};
}

Json complex_to(Complex c) { return Json::array({c.real(), c.imag()}); }

template <typename T>
void read_if(const Json& j, const std::string& key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

ExperimentConfig ExperimentConfig::parse(const Json& j) {
  require_keys(j, {"version", "kind", "output_dir", "problem", "run"}, "config");
  ExperimentConfig cfg;
  read_if(j, "version", cfg.version);
  read_if(j, "kind", cfg.kind);
  read_if(j, "output_dir", cfg.output_dir);

  if (j.contains("problem")) {
    const Json& p = j.at("problem");
    require_keys(p,
                 {"p", "eps", "N", "grid", "domain", "nu", "L", "holder_exponent",
                  "holder_bound", "coefficient", "source", "boundary", "parametric",
                  "region", "allow_inadmissible", "allow_singular_floor"},
                 "problem");
    read_if(p, "p", cfg.problem.p);
    read_if(p, "eps", cfg.problem.eps);
    read_if(p, "N", cfg.problem.N);
    read_if(p, "nu", cfg.problem.nu);
    read_if(p, "L", cfg.problem.L);
    read_if(p, "holder_exponent", cfg.problem.holder_exponent);
    read_if(p, "holder_bound", cfg.problem.holder_bound);
    read_if(p, "allow_inadmissible", cfg.problem.allow_inadmissible);
    read_if(p, "allow_singular_floor", cfg.problem.allow_singular_floor);
    if (p.contains("grid")) {
      require_keys(p.at("grid"), {"nx", "ny"}, "problem.grid");
      read_if(p.at("grid"), "nx", cfg.problem.grid.nx);
      read_if(p.at("grid"), "ny", cfg.problem.grid.ny);
    }
    if (p.contains("domain")) {
      require_keys(p.at("domain"), {"x", "y"}, "problem.domain");
      if (p.at("domain").contains("x"))
        cfg.problem.grid.x = p.at("domain").at("x").get<std::array<double, 2>>();
      if (p.at("domain").contains("y"))
        cfg.problem.grid.y = p.at("domain").at("y").get<std::array<double, 2>>();
    }
    if (p.contains("coefficient")) cfg.problem.coefficient = p.at("coefficient");
    if (p.contains("source")) cfg.problem.source = p.at("source");
    if (p.contains("boundary")) cfg.problem.boundary = p.at("boundary");
    if (p.contains("parametric")) cfg.problem.parametric = p.at("parametric");
    if (p.contains("region")) {
      require_keys(p.at("region"), {"center", "radius"}, "problem.region");
      if (p.at("region").contains("center"))
        cfg.problem.region_center =
            complex_from(p.at("region").at("center"), "problem.region.center");
      read_if(p.at("region"), "radius", cfg.problem.region_radius);
    }
  }

  if (j.contains("run")) {
    const Json& r = j.at("run");
    require_keys(r,
                 {"tol", "max_picard", "max_newton", "damping", "switch_threshold",
                  "seed", "samples", "p_list", "eps_list", "mat_rows", "mat_cols",
                  "z", "theta", "t_list", "strict", "center", "radii", "meshes",
                  "input_solution", "compare"},
                 "run");
    read_if(r, "tol", cfg.run.tol);
    read_if(r, "max_picard", cfg.run.max_picard);
    read_if(r, "max_newton", cfg.run.max_newton);
    read_if(r, "damping", cfg.run.damping);
    read_if(r, "switch_threshold", cfg.run.switch_threshold);
    if (r.contains("seed")) cfg.run.seed = r.at("seed").get<std::uint64_t>();
    read_if(r, "samples", cfg.run.samples);
    read_if(r, "p_list", cfg.run.p_list);
    read_if(r, "eps_list", cfg.run.eps_list);
    read_if(r, "mat_rows", cfg.run.mat_rows);
    read_if(r, "mat_cols", cfg.run.mat_cols);
    if (r.contains("z")) cfg.run.z = complex_from(r.at("z"), "run.z");
    if (r.contains("theta")) cfg.run.theta = complex_from(r.at("theta"), "run.theta");
    read_if(r, "t_list", cfg.run.t_list);
    read_if(r, "strict", cfg.run.strict);
    if (r.contains("center")) {
      const auto c = r.at("center").get<std::array<double, 2>>();
      cfg.run.center = {c[0], c[1]};
    }
    read_if(r, "radii", cfg.run.radii);
    read_if(r, "meshes", cfg.run.meshes);
    read_if(r, "input_solution", cfg.run.input_solution);
    read_if(r, "compare", cfg.run.compare);
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  Json j;
  try {
    in >> j;
  } catch (const Json::parse_error& e) {
    throw ValidationError(std::string("config parse error: ") + e.what());
  }
  return parse(j);
}

Json ExperimentConfig::echo() const {
  Json j;
  j["version"] = version;
  j["kind"] = kind;
  j["output_dir"] = output_dir;
  Json p;
  p["p"] = problem.p;
  p["eps"] = problem.eps;
  p["N"] = problem.N;
  p["grid"] = Json{{"nx", problem.grid.nx}, {"ny", problem.grid.ny}};
  p["domain"] = Json{{"x", problem.grid.x}, {"y", problem.grid.y}};
  p["nu"] = problem.nu;
  p["L"] = problem.L;
  p["holder_exponent"] = problem.holder_exponent;
  p["holder_bound"] = problem.holder_bound;
  p["coefficient"] = problem.coefficient;
  p["source"] = problem.source;
  p["boundary"] = problem.boundary;
  p["parametric"] = problem.parametric;
  p["region"] =
      Json{{"center", complex_to(problem.region_center)}, {"radius", problem.region_radius}};
  p["allow_inadmissible"] = problem.allow_inadmissible;
  p["allow_singular_floor"] = problem.allow_singular_floor;
  j["problem"] = p;
  Json r;
  r["tol"] = run.tol;
  r["max_picard"] = run.max_picard;
  r["max_newton"] = run.max_newton;
  r["damping"] = run.damping;
  r["switch_threshold"] = run.switch_threshold;
  if (run.seed) r["seed"] = *run.seed;
  r["samples"] = run.samples;
  r["p_list"] = run.p_list;
  r["eps_list"] = run.eps_list;
  r["mat_rows"] = run.mat_rows;
  r["mat_cols"] = run.mat_cols;
  r["z"] = complex_to(run.z);
  r["theta"] = complex_to(run.theta);
  r["t_list"] = run.t_list;
  r["strict"] = run.strict;
  r["center"] = Json::array({run.center.x, run.center.y});
  r["radii"] = run.radii;
  r["meshes"] = run.meshes;
  r["input_solution"] = run.input_solution;
  r["compare"] = run.compare;
  j["run"] = r;
  return j;
}

void ExperimentConfig::validate() const {
  if (version != 1)
    throw ValidationError("config: unsupported schema version " +
                          std::to_string(version));
  const std::set<std::string> kinds{"solve", "structure-test", "sensitivity",
                                    "regularity", "convergence-study"};
  if (kinds.find(kind) == kinds.end())
    throw ValidationError("config: unknown kind '" + kind + "'");
  if (!(problem.p > 1.0)) throw ValidationError("config: p must be > 1");
  if (!(problem.eps >= 0.0 && problem.eps <= 1.0))
    throw ValidationError("config: eps must lie in [0,1]");
  if (kind == "sensitivity" && !(problem.eps > 0.0))
    throw ValidationError(
        "config: sensitivity requires eps > 0 — differentiability of the "
        "solution map along line segments is only available for positive "
        "regularization eps in (0,1); the degenerate case eps = 0 is excluded");
  if (problem.N < 1) throw ValidationError("config: N must be >= 1");
  if (problem.grid.nx < 1 || problem.grid.ny < 1)
    throw ValidationError("config: grid must have at least one cell per axis");
  if (kind == "structure-test") {
    if (!run.seed)
      throw ValidationError(
          "config: structure-test requires an explicit seed for reproducible "
          "counterexample hunting");
    if (run.mat_rows < 1 || run.mat_rows > 3 || run.mat_cols < 1 || run.mat_cols > 3)
      throw ValidationError("config: structure-test matrix dims must lie in [1,3]");
    for (double p : run.p_list)
      if (!(p > 1.0)) throw ValidationError("config: p_list entries must be > 1");
    for (double e : run.eps_list)
      if (!(e >= 0.0 && e <= 1.0))
        throw ValidationError("config: eps_list entries must lie in [0,1]");
  }
  if (kind == "convergence-study") {
    if (problem.source.value("name", std::string()) != "manufactured")
      throw ValidationError(
          "config: convergence-study requires the manufactured source family");
    if (run.meshes.empty())
      throw ValidationError("config: convergence-study needs a mesh list");
  }
  // family names must resolve; constructing them performs the check
  coefficient_field();
  source_field();
  boundary_data();
  if (kind == "sensitivity") parametric_field();
}

GridPtr ExperimentConfig::make_grid_ptr() const {
  return make_grid({problem.grid.x[0], problem.grid.y[0]},
                   {problem.grid.x[1], problem.grid.y[1]},
                   {problem.grid.nx, problem.grid.ny});
}

CoefficientField ExperimentConfig::coefficient_field() const {
  return make_coefficient(problem.coefficient, problem.nu, problem.L,
                          problem.holder_exponent, problem.holder_bound);
}

SourceField ExperimentConfig::source_field() const {
  return make_source(problem.source, problem.N, coefficient_field(), flux_params(),
                     problem.holder_exponent, problem.holder_bound);
}

BoundaryData ExperimentConfig::boundary_data() const {
  return make_boundary(problem.boundary, problem.N);
}

ParametricCoefficient ExperimentConfig::parametric_field() const {
  return make_parametric(problem.parametric, problem.nu, problem.L,
                         problem.holder_exponent, problem.holder_bound,
                         problem.region_center, problem.region_radius);
}

}  // namespace cplap
