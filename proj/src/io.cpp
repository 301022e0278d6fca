#include "manipyr/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

#include "manipyr/error.hpp"

namespace manipyr::io {

namespace {

const json& field(const json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(where + ": missing field '" + key + "'");
  return j.at(key);
}

std::vector<double> doubles(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array of numbers");
  std::vector<double> out;
  out.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(to_double(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

int to_int(const json& j, const std::string& where) {
  if (!j.is_number_integer()) throw ValidationError(where + ": expected an integer");
  return j.get<int>();
}

json doubles_json(std::span<const double> v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

json number(double v) { return std::isfinite(v) ? json(v) : json(format_double(v)); }

double to_double(const json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto& s = j.get_ref<const std::string&>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    if (s == "nan") return std::nan("");
  }
  throw ValidationError(where + ": expected a number");
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  fs::path tmp = target;
  tmp += ".tmp" + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot open '" + tmp.string() + "' for writing");
    f << content;
    f.flush();
    if (!f) throw Error("write to '" + tmp.string() + "' failed");
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move output into place at '" + path + "': " + ec.message());
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ValidationError("cannot read '" + path + "'");
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

json read_json_file(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw ValidationError("'" + path + "' is not valid JSON: " + e.what());
  }
}

json to_json(const LaurentPoly& p, json meta) {
  return {{"min_index", p.min_index()}, {"coeffs", doubles_json(p.coeffs())}, {"meta", std::move(meta)}};
}

LaurentPoly laurent_from_json(const json& j) {
  return LaurentPoly(to_int(field(j, "min_index", "laurent"), "min_index"), doubles(field(j, "coeffs", "laurent"), "coeffs"));
}

json to_json(const DecimationKernel& k) {
  json meta = {{"xi", number(k.xi)},
               {"truncation_tol", number(k.truncation_tol)},
               {"dft_size", k.dft_size},
               {"residual", number(k.residual)},
               {"normalized", k.normalized},
               {"fingerprint", k.fingerprint()},
               {"inverted_symbol", to_json(k.inverted_symbol)}};
  return to_json(k.gamma, std::move(meta));
}

DecimationKernel kernel_from_json(const json& j) {
  DecimationKernel k;
  k.gamma = laurent_from_json(j);
  const json& meta = field(j, "meta", "kernel");
  k.xi = to_double(field(meta, "xi", "kernel.meta"), "kernel.meta.xi");
  k.truncation_tol = to_double(field(meta, "truncation_tol", "kernel.meta"), "kernel.meta.truncation_tol");
  k.dft_size = to_int(field(meta, "dft_size", "kernel.meta"), "kernel.meta.dft_size");
  k.normalized = field(meta, "normalized", "kernel.meta").get<bool>();
  k.inverted_symbol = laurent_from_json(field(meta, "inverted_symbol", "kernel.meta"));
  k.residual = convolution_residual(k.gamma, k.inverted_symbol);
  const double stored = to_double(field(meta, "residual", "kernel.meta"), "kernel.meta.residual");
  if (std::abs(stored - k.residual) > 1e-12)
    throw ValidationError("kernel: stored residual does not match a recomputation");
  if (k.normalized && std::abs(k.gamma.sum() - 1.0) > 1e-12)
    throw ValidationError("kernel: marked normalized but coefficients do not sum to 1");
  return k;
}

json to_json(const ExperimentConfig& c) {
  return {{"mask", c.mask},
          {"xi", number(c.xi)},
          {"mode", c.mode},
          {"layers", c.layers},
          {"scale", c.scale},
          {"seed", c.seed},
          {"truncation_tol", number(c.truncation_tol)},
          {"dft_size", c.dft_size},
          {"root_tol", number(c.root_tol)},
          {"mean_tol", number(c.mean_tol)},
          {"mean_max_iter", c.mean_max_iter},
          {"keep_fraction", number(c.keep_fraction)},
          {"enhance_fraction", number(c.enhance_fraction)},
          {"gain", number(c.gain)},
          {"noise_frac", number(c.noise_frac)},
          {"cone", {{"r0", number(c.cone.r0)}, {"h", number(c.cone.h)}, {"nu", number(c.cone.nu)}}}};
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  ExperimentConfig c;
  for (const auto& [key, v] : j.items()) {
    const std::string where = "config." + key;
    if (key == "mask") c.mask = v.get<std::string>();
    else if (key == "xi") c.xi = to_double(v, where);
    else if (key == "mode") c.mode = v.get<std::string>();
    else if (key == "layers") c.layers = to_int(v, where);
    else if (key == "scale") c.scale = to_int(v, where);
    else if (key == "seed") {
      if (!v.is_number_unsigned()) throw ValidationError(where + ": expected a non-negative integer");
      c.seed = v.get<std::uint64_t>();
    } else if (key == "truncation_tol") c.truncation_tol = to_double(v, where);
    else if (key == "dft_size") c.dft_size = to_int(v, where);
    else if (key == "root_tol") c.root_tol = to_double(v, where);
    else if (key == "mean_tol") c.mean_tol = to_double(v, where);
    else if (key == "mean_max_iter") c.mean_max_iter = to_int(v, where);
    else if (key == "keep_fraction") c.keep_fraction = to_double(v, where);
    else if (key == "enhance_fraction") c.enhance_fraction = to_double(v, where);
    else if (key == "gain") c.gain = to_double(v, where);
    else if (key == "noise_frac") c.noise_frac = to_double(v, where);
    else if (key == "cone") {
      if (v.contains("r0")) c.cone.r0 = to_double(v["r0"], where + ".r0");
      if (v.contains("h")) c.cone.h = to_double(v["h"], where + ".h");
      if (v.contains("nu")) c.cone.nu = to_double(v["nu"], where + ".nu");
    } else {
      throw ValidationError("config: unknown field '" + key + "'");
    }
  }
  c.validate();
  return c;
}

json to_json(const RealSequence& c) {
  return {{"scale", c.scale}, {"origin", number(c.origin)}, {"values", doubles_json(c.values)}};
}

RealSequence sequence_from_json(const json& j) {
  RealSequence c;
  c.scale = to_int(field(j, "scale", "sequence"), "sequence.scale");
  c.origin = j.contains("origin") ? to_double(j["origin"], "sequence.origin") : 0.0;
  c.values = doubles(field(j, "values", "sequence"), "sequence.values");
  for (std::size_t i = 0; i < c.size(); ++i)
    if (!std::isfinite(c.values[i])) throw ValidationError("sequence.values[" + std::to_string(i) + "]: not finite");
  return c;
}

std::string sequence_to_csv(const RealSequence& c) {
  std::string out = "index,value\n";
  for (std::size_t i = 0; i < c.size(); ++i) out += std::to_string(i) + ',' + format_double(c.values[i]) + '\n';
  return out;
}

RealSequence sequence_from_csv(const std::string& text, int scale, double origin) {
  RealSequence c{{}, scale, origin};
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      if (line != "index,value") throw ValidationError("csv line " + std::to_string(lineno) + ": expected header 'index,value'");
      header = true;
      continue;
    }
    const auto comma = line.find(',');
    double v = 0.0;
    std::size_t idx = 0;
    bool ok = comma != std::string::npos;
    if (ok) {
      const auto r1 = std::from_chars(line.data(), line.data() + comma, idx);
      const auto r2 = std::from_chars(line.data() + comma + 1, line.data() + line.size(), v);
      ok = r1.ec == std::errc{} && r1.ptr == line.data() + comma && r2.ec == std::errc{} &&
           r2.ptr == line.data() + line.size() && idx == c.size() && std::isfinite(v);
    }
    if (!ok) throw ValidationError("csv line " + std::to_string(lineno) + ": expected '" + std::to_string(c.size()) + ",<finite value>'");
    c.values.push_back(v);
  }
  if (!header) throw ValidationError("csv: missing header 'index,value'");
  return c;
}

json to_json(const LinearPyramid& p, const ExperimentConfig& cfg) {
  json details = json::array();
  for (const auto& d : p.details) details.push_back(to_json(d));
  return {{"coarse", to_json(p.coarse)},
          {"details", std::move(details)},
          {"meta", {{"mask", p.mask_name}, {"xi", number(p.xi)}, {"kernel", p.kernel_fingerprint}, {"seed", cfg.seed}}},
          {"config", to_json(cfg)}};
}

LinearPyramid linear_pyramid_from_json(const json& j) {
  LinearPyramid p;
  p.coarse = sequence_from_json(field(j, "coarse", "pyramid"));
  const json& details = field(j, "details", "pyramid");
  if (!details.is_array()) throw ValidationError("pyramid.details: expected an array");
  for (std::size_t l = 0; l < details.size(); ++l) {
    try {
      p.details.push_back(sequence_from_json(details[l]));
    } catch (const ValidationError& e) {
      throw ValidationError("pyramid.details[" + std::to_string(l) + "]: " + e.what());
    }
  }
  const json& meta = field(j, "meta", "pyramid");
  p.mask_name = field(meta, "mask", "pyramid.meta").get<std::string>();
  p.xi = to_double(field(meta, "xi", "pyramid.meta"), "pyramid.meta.xi");
  p.kernel_fingerprint = field(meta, "kernel", "pyramid.meta").get<std::string>();
  return p;
}

json to_json(const ManifoldSequence& c) {
  json pts = json::array();
  for (const auto& p : c.points) pts.push_back(doubles_json(p.coords()));
  return {{"manifold", to_string(c.kind())}, {"points", std::move(pts)}, {"grid", {{"scale", c.scale}, {"origin", number(c.origin)}}}};
}

ManifoldSequence curve_from_json(const json& j) {
  ManifoldSequence c;
  const ManifoldKind kind = manifold_kind_from_string(field(j, "manifold", "curve").get<std::string>());
  const json& grid = field(j, "grid", "curve");
  c.scale = to_int(field(grid, "scale", "curve.grid"), "curve.grid.scale");
  c.origin = grid.contains("origin") ? to_double(grid["origin"], "curve.grid.origin") : 0.0;
  const json& pts = field(j, "points", "curve");
  if (!pts.is_array() || pts.empty()) throw ValidationError("curve.points: expected a non-empty array");
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const std::string where = "curve.points[" + std::to_string(i) + "]";
    const auto coords = doubles(pts[i], where);
    try {
      c.points.push_back(ManifoldPoint::from_coords(kind, coords));
    } catch (const InvalidPoint& e) {
      throw InvalidPoint(where + ": " + e.what());
    }
    if (kind == ManifoldKind::Euclidean && c.points.back().x.size() != c.points.front().x.size())
      throw TagMismatch(where + ": dimension differs from points[0]");
  }
  return c;
}

json to_json(const ManifoldPyramid& p, const ExperimentConfig& cfg) {
  json layers = json::array();
  for (const auto& layer : p.details) {
    json l = json::array();
    for (const auto& d : layer) l.push_back(doubles_json(d.coords()));
    layers.push_back(std::move(l));
  }
  return {{"manifold", to_string(p.coarse.kind())},
          {"coarse", to_json(p.coarse)},
          {"details", std::move(layers)},
          {"meta",
           {{"mask", p.mask_name},
            {"xi", number(p.xi)},
            {"kernel", p.kernel_fingerprint},
            {"seed", cfg.seed},
            {"mean_tol", number(p.mean.tol)},
            {"mean_max_iter", p.mean.max_iter}}},
          {"config", to_json(cfg)}};
}

ManifoldPyramid manifold_pyramid_from_json(const json& j) {
  ManifoldPyramid p;
  p.coarse = curve_from_json(field(j, "coarse", "pyramid"));
  const ManifoldKind kind = p.coarse.kind();
  const json& layers = field(j, "details", "pyramid");
  if (!layers.is_array()) throw ValidationError("pyramid.details: expected an array");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    std::vector<TangentVector> layer;
    for (std::size_t i = 0; i < layers[l].size(); ++i) {
      const std::string where = "pyramid.details[" + std::to_string(l) + "][" + std::to_string(i) + "]";
      try {
        layer.push_back(TangentVector::from_coords(kind, doubles(layers[l][i], where)));
      } catch (const ValidationError& e) {
        throw ValidationError(where + ": " + e.what());
      }
    }
    p.details.push_back(std::move(layer));
  }
  const json& meta = field(j, "meta", "pyramid");
  p.mask_name = field(meta, "mask", "pyramid.meta").get<std::string>();
  p.xi = to_double(field(meta, "xi", "pyramid.meta"), "pyramid.meta.xi");
  p.kernel_fingerprint = field(meta, "kernel", "pyramid.meta").get<std::string>();
  if (meta.contains("mean_tol")) p.mean.tol = to_double(meta["mean_tol"], "pyramid.meta.mean_tol");
  if (meta.contains("mean_max_iter")) p.mean.max_iter = to_int(meta["mean_max_iter"], "pyramid.meta.mean_max_iter");
  return p;
}

json to_json(const CompressionReport& r) {
  return {{"original_count", r.original_count},
          {"stored_coarse_count", r.stored_coarse_count},
          {"total_detail_count", r.total_detail_count},
          {"stored_detail_count", r.stored_detail_count},
          {"max_error", number(r.max_error)},
          {"mean_error", number(r.mean_error)},
          {"argmax_error", r.argmax_error},
          {"errors", doubles_json(r.errors)}};
}

}  // namespace manipyr::io
