#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <iostream>
#include <optional>
#include <string>

#include "manipyr/apps.hpp"
#include "manipyr/error.hpp"
#include "manipyr/io.hpp"

using namespace manipyr;
using nlohmann::json;

namespace {

struct Globals {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> xi;
  std::optional<int> layers;
  std::string out;
};

ExperimentConfig load_config(const Globals& g) {
  ExperimentConfig cfg = g.config_path.empty() ? ExperimentConfig{} : io::config_from_json(io::read_json_file(g.config_path));
  if (g.seed) cfg.seed = *g.seed;
  if (g.xi) cfg.xi = *g.xi;
  if (g.layers) cfg.layers = *g.layers;
  cfg.validate();
  return cfg;
}

void emit(const Globals& g, const std::string& text) {
  if (g.out.empty() || g.out == "-") std::cout << text;
  else io::write_file_atomic(g.out, text);
}

void emit_json(const Globals& g, const json& j) { emit(g, j.dump(2) + "\n"); }

void emit_csv(const Globals& g, const ExperimentConfig& cfg, const std::string& csv) {
  emit(g, "# config: " + io::to_json(cfg).dump() + "\n" + csv);
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

RealSequence load_sequence(const std::string& path, int scale) {
  if (ends_with(path, ".json")) return io::sequence_from_json(io::read_json_file(path));
  return io::sequence_from_csv(io::read_file(path), scale);
}

ManifoldSequence generated_curve(const std::string& kind, const ExperimentConfig& cfg) {
  const auto so3 = gen_so3_curve(cfg.seed, cfg.mean_options());
  if (kind == "so3") return so3;
  if (kind == "se3") return wrap_on_cone(so3, cfg.cone);
  throw ValidationError("unknown curve kind '" + kind + "' (so3|se3)");
}

std::string sweep_csv(const ExperimentConfig& cfg, double from, double to, double step) {
  if (!(step > 0.0) || !(from >= 0.0) || !(to >= from)) throw ValidationError("sweep: need 0 <= from <= to and step > 0");
  const Mask mask = mask_by_name(cfg.mask);
  std::string out = "xi,kappa,mask_perturbation_l1,gamma_l1,residual\n";
  const int count = static_cast<int>(std::floor((to - from) / step + 1e-9));
  for (int i = 0; i <= count; ++i) {
    const double xi = from + step * i;
    const auto pr = pseudo_reverse_symbol(mask.even_symbol(), xi, displace_mode_from_string(cfg.mode), cfg.root_tol);
    const LaurentPoly approx = interleave(pr.approx_poly, mask.odd_symbol());
    std::string gamma_l1 = "inf";
    std::string residual = "nan";
    if (std::isfinite(pr.kappa_after)) {
      const auto k = invert_symbol(pr.approx_poly, cfg.dft_size, cfg.truncation_tol);
      gamma_l1 = io::format_double(k.gamma.l1_norm());
      residual = io::format_double(k.residual);
    }
    out += io::format_double(xi) + ',' + io::format_double(pr.kappa_after) + ',' +
           io::format_double((mask.alpha - approx).l1_norm()) + ',' + gamma_l1 + ',' + residual + '\n';
  }
  return out;
}

int run(int argc, char** argv) {
  CLI::App app{"manipyr: pyramid transforms with pseudo-reversed decimation"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "experiment config JSON")->check(CLI::ExistingFile);
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--xi", g.xi, "pseudo-reversing parameter");
  app.add_option("--layers", g.layers, "number of pyramid layers");
  app.add_option("--out", g.out, "output path (default stdout)");
  app.fallthrough();

  std::string mask_opt;
  std::string mode_opt;
  auto add_mask = [&](CLI::App* s) {
    s->add_option("--mask", mask_opt, "least_squares|linear|four_point|bspline<n>");
    s->add_option("--mode", mode_opt, "on_circle|outside_circle");
  };
  auto config = [&]() {
    ExperimentConfig cfg = load_config(g);
    if (!mask_opt.empty()) cfg.mask = mask_opt;
    if (!mode_opt.empty()) cfg.mode = mode_opt;
    cfg.validate();
    return cfg;
  };

  auto* symbol = app.add_subcommand("symbol", "roots, kappa and decimation kernel of a mask");
  add_mask(symbol);
  bool symbol_csv = false;
  symbol->add_flag("--csv", symbol_csv, "print the xi sweep as CSV instead");

  auto* sweep = app.add_subcommand("sweep-xi", "kappa, perturbation and kernel statistics over a xi grid");
  add_mask(sweep);
  double from = 0.0, to = 1.2, step = 0.1;
  sweep->add_option("--from", from);
  sweep->add_option("--to", to);
  sweep->add_option("--step", step);

  std::string in_path;
  std::string gen_kind;
  int csv_scale = -1;
  auto* analyze_cmd = app.add_subcommand("analyze", "scalar pyramid analysis");
  add_mask(analyze_cmd);
  analyze_cmd->add_option("--in", in_path, "sequence file (.csv with index,value or .json)");
  analyze_cmd->add_option("--gen", gen_kind, "morlet|noisy-morlet instead of --in");
  analyze_cmd->add_option("--scale", csv_scale, "grid scale of CSV input (default config scale)");

  auto* synth_cmd = app.add_subcommand("synthesize", "scalar pyramid synthesis");
  synth_cmd->add_option("--in", in_path, "pyramid JSON")->required();
  bool zero_even = false;
  std::optional<double> keep;
  synth_cmd->add_flag("--zero-even", zero_even, "drop all even details first");
  synth_cmd->add_option("--keep", keep, "keep this fraction of details per layer first");

  auto* manalyze = app.add_subcommand("m-analyze", "manifold pyramid analysis");
  add_mask(manalyze);
  manalyze->add_option("--in", in_path, "curve JSON");
  manalyze->add_option("--gen", gen_kind, "so3|se3 instead of --in");

  auto* msynth = app.add_subcommand("m-synthesize", "manifold pyramid synthesis");
  msynth->add_option("--in", in_path, "manifold pyramid JSON")->required();

  auto* compress_cmd = app.add_subcommand("compress", "keep the largest detail vectors across all layers");
  add_mask(compress_cmd);
  compress_cmd->add_option("--in", in_path, "curve JSON (default: generated SE3 cone curve)");
  std::optional<double> q;
  compress_cmd->add_option("--keep", q, "fraction of detail vectors kept");

  auto* enhance_cmd = app.add_subcommand("enhance", "amplify the largest details of each layer");
  add_mask(enhance_cmd);
  enhance_cmd->add_option("--in", in_path, "curve JSON (default: generated SO3 curve)");
  std::optional<double> fraction, gain;
  enhance_cmd->add_option("--fraction", fraction, "fraction of each layer amplified");
  enhance_cmd->add_option("--gain", gain, "relative amplification");

  auto* gen = app.add_subcommand("gen", "generate experiment data");
  gen->add_option("--kind", gen_kind, "morlet|noisy-morlet|so3|se3")->required();

  auto* table = app.add_subcommand("table", "reproduce a table as CSV");
  int table_id = 0;
  table->add_option("--id", table_id, "1..4")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (*symbol) {
    const auto cfg = config();
    if (symbol_csv) {
      emit_csv(g, cfg, sweep_csv(cfg, 0.0, 1.2, 0.1));
      return 0;
    }
    const Mask mask = mask_by_name(cfg.mask);
    const auto pr = pseudo_reverse_symbol(mask.even_symbol(), cfg.xi, displace_mode_from_string(cfg.mode), cfg.root_tol);
    json roots = json::array();
    for (const auto& r : find_roots(mask.even_symbol()).roots)
      roots.push_back({{"re", r.value.real()}, {"im", r.value.imag()}, {"multiplicity", r.multiplicity}});
    json out = {{"config", io::to_json(cfg)},
                {"mask", io::to_json(mask.alpha, {{"name", mask.name}})},
                {"even_symbol", io::to_json(mask.even_symbol())},
                {"roots", roots},
                {"displaced_count", pr.displaced_count},
                {"kappa_before", io::number(pr.kappa_before)},
                {"kappa_after", io::number(pr.kappa_after)},
                {"approx_even_symbol", io::to_json(pr.approx_poly)},
                {"mask_perturbation_l1", io::number((mask.alpha - interleave(pr.approx_poly, mask.odd_symbol())).l1_norm())}};
    const auto k = invert_symbol(pr.approx_poly, cfg.dft_size, cfg.truncation_tol);
    auto kj = io::to_json(k);
    kj["meta"]["xi"] = io::number(cfg.xi);
    out["kernel"] = kj;
    emit_json(g, out);
  } else if (*sweep) {
    const auto cfg = config();
    emit_csv(g, cfg, sweep_csv(cfg, from, to, step));
  } else if (*analyze_cmd) {
    const auto cfg = config();
    RealSequence c;
    if (!in_path.empty()) c = load_sequence(in_path, csv_scale >= 0 ? csv_scale : cfg.scale);
    else if (gen_kind == "morlet") c = gen_morlet(cfg.scale);
    else if (gen_kind == "noisy-morlet") c = add_noise(gen_morlet(cfg.scale), cfg.noise_frac, cfg.seed);
    else throw ValidationError("analyze: give --in or --gen morlet|noisy-morlet");
    const auto pair = make_pair(cfg);
    emit_json(g, io::to_json(analyze(pair.mask, pair.kernel, c, cfg.layers), cfg));
  } else if (*synth_cmd) {
    const json doc = io::read_json_file(in_path);
    auto pyr = io::linear_pyramid_from_json(doc);
    ExperimentConfig cfg = doc.contains("config") ? io::config_from_json(doc["config"]) : load_config(g);
    if (zero_even) pyr = threshold_details(pyr, ThresholdPolicy::zero_even());
    if (keep) pyr = threshold_details(pyr, ThresholdPolicy::keep_top_fraction(*keep));
    const auto c = synthesize(mask_by_name(pyr.mask_name), pyr);
    if (ends_with(g.out, ".json")) emit_json(g, {{"config", io::to_json(cfg)}, {"sequence", io::to_json(c)}});
    else emit_csv(g, cfg, io::sequence_to_csv(c));
  } else if (*manalyze) {
    const auto cfg = config();
    ManifoldSequence c;
    if (!in_path.empty()) c = io::curve_from_json(io::read_json_file(in_path));
    else if (!gen_kind.empty()) c = generated_curve(gen_kind, cfg);
    else throw ValidationError("m-analyze: give --in or --gen so3|se3");
    const auto pair = make_pair(cfg);
    emit_json(g, io::to_json(m_analyze(pair.mask, pair.kernel, c, cfg.layers, cfg.mean_options()), cfg));
  } else if (*msynth) {
    const json doc = io::read_json_file(in_path);
    const auto pyr = io::manifold_pyramid_from_json(doc);
    ExperimentConfig cfg = doc.contains("config") ? io::config_from_json(doc["config"]) : load_config(g);
    json out = io::to_json(m_synthesize(mask_by_name(pyr.mask_name), pyr));
    out["config"] = io::to_json(cfg);
    emit_json(g, out);
  } else if (*compress_cmd) {
    auto cfg = config();
    if (q) cfg.keep_fraction = *q;
    cfg.validate();
    const ManifoldSequence c = in_path.empty() ? generated_curve("se3", cfg) : io::curve_from_json(io::read_json_file(in_path));
    const auto pair = make_pair(cfg);
    const auto pyr = m_analyze(pair.mask, pair.kernel, c, cfg.layers, cfg.mean_options());
    const auto res = compress(pair.mask, pyr, cfg.keep_fraction, &c);
    emit_json(g, {{"config", io::to_json(cfg)}, {"report", io::to_json(res.report)}, {"pyramid", io::to_json(res.pyramid, cfg)}});
  } else if (*enhance_cmd) {
    auto cfg = config();
    if (fraction) cfg.enhance_fraction = *fraction;
    if (gain) cfg.gain = *gain;
    cfg.validate();
    const ManifoldSequence c = in_path.empty() ? generated_curve("so3", cfg) : io::curve_from_json(io::read_json_file(in_path));
    const auto pair = make_pair(cfg);
    const auto pyr = m_analyze(pair.mask, pair.kernel, c, cfg.layers, cfg.mean_options());
    const auto res = enhance(pyr, cfg.enhance_fraction, cfg.gain);
    const auto out_curve = m_synthesize(pair.mask, res.pyramid);
    json dist = json::array();
    for (std::size_t i = 0; i < c.size(); ++i) dist.push_back(io::number(distance(c.points[i], out_curve.points[i])));
    json out = io::to_json(out_curve);
    out["config"] = io::to_json(cfg);
    out["distance_to_input"] = dist;
    emit_json(g, out);
  } else if (*gen) {
    const auto cfg = config();
    if (gen_kind == "morlet" || gen_kind == "noisy-morlet") {
      RealSequence c = gen_morlet(cfg.scale);
      if (gen_kind == "noisy-morlet") c = add_noise(c, cfg.noise_frac, cfg.seed);
      if (ends_with(g.out, ".json")) {
        json j = io::to_json(c);
        j["config"] = io::to_json(cfg);
        emit_json(g, j);
      } else {
        emit_csv(g, cfg, io::sequence_to_csv(c));
      }
    } else {
      json j = io::to_json(generated_curve(gen_kind, cfg));
      j["config"] = io::to_json(cfg);
      emit_json(g, j);
    }
  } else if (*table) {
    const auto cfg = load_config(g);
    emit_csv(g, cfg, run_table(table_id, cfg));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
