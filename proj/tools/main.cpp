// circleflow CLI: map I/O, group operations, metric queries, family generation,
// straightening runs, plot emission, and the acceptance selftest.
#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "circleflow/flows.hpp"
#include "circleflow/json_io.hpp"
#include "circleflow/log.hpp"
#include "circleflow/metric.hpp"
#include "circleflow/pac_map.hpp"
#include "circleflow/straighten.hpp"
#include "selftest_suite.hpp"

using namespace circleflow;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitVerification = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw validation_error("cannot read file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw validation_error("cannot write file: " + path);
  out << content;
}

void emit(const std::string& out_path, const std::string& content) {
  if (out_path.empty())
    std::cout << content << std::endl;
  else
    write_file(out_path, content);
}

PacMap load_map(const std::string& path) { return pac_map_from_json(read_file(path)); }

std::vector<Rat> parse_rat_list(const std::string& csv, const char* what) {
  std::vector<Rat> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    out.push_back(parse_rat(item));
  }
  if (out.empty()) throw validation_error(std::string(what) + ": empty list");
  return out;
}

struct FamilyOpts {
  std::string family;
  std::string lambda_csv = "1/3,1/3,1/3";
  std::string alpha_csv = "1/3,0,1/2";
};

Flow build_flow(const FamilyOpts& fo) {
  if (fo.family == "torus")
    return torus_flow(make_torus_params(parse_rat_list(fo.lambda_csv, "--lambda"),
                                        parse_rat_list(fo.alpha_csv, "--alpha")));
  if (fo.family == "glued61") return glued61_flow();
  if (fo.family == "dyadic63") return dyadic63_flow();
  if (fo.family == "example62") return example62_flow();
  throw validation_error("unknown flow family: " + fo.family +
                         " (expected torus|glued61|dyadic63|example62)");
}

PacMap build_family_map(const FamilyOpts& fo, const std::string& t_str, int n) {
  if (fo.family == "example31") return example31(n);
  if (fo.family == "example41") return example41(n);
  if (fo.family == "cauchy46") return cauchy46(n);
  if (t_str.empty())
    throw validation_error("--t is required for family " + fo.family);
  return build_flow(fo).at(parse_rat(t_str));
}

void add_family_flags(CLI::App* cmd, FamilyOpts& fo, bool with_indexed) {
  std::string families = with_indexed
                             ? "torus|glued61|dyadic63|example62|example31|example41|cauchy46"
                             : "torus|glued61|dyadic63|example62";
  cmd->add_option("--family", fo.family, "family name (" + families + ")")->required();
  cmd->add_option("--lambda", fo.lambda_csv, "torus block lengths, comma-separated rationals");
  cmd->add_option("--alpha", fo.alpha_csv, "torus block angles, comma-separated rationals");
}

// --- plotting -----------------------------------------------------------------

double global_target_coord(const PacMap& m, int comp, double pos) {
  double off = 0;
  for (int c = 0; c < comp; ++c) off += to_double(m.target().len(c));
  return off + pos;
}

void write_plot(const PacMap& m, const std::string& prefix, int samples) {
  if (samples < 2) throw validation_error("plot needs at least 2 samples");
  // One CSV per source component: x, target_component, y.
  for (int c = 0; c < m.source().components(); ++c) {
    std::ostringstream csv;
    csv << "x,target_component,y\n";
    csv.precision(17);
    for (const Piece& p : m.pieces()) {
      if (p.src_comp != c) continue;
      for (int k = 0; k < samples; ++k) {
        Rat x = p.start + p.len * k / (samples - 1);
        if (k == samples - 1) x = p.start + p.len;  // right endpoint as a limit
        Rat y = transform_apply(p.tf, x);
        const Rat& ld = m.target().len(p.dst_comp);
        const Rat& ls = m.source().len(c);
        csv << to_double(reduce_mod(x, ls)) << "," << p.dst_comp << ","
            << to_double(reduce_mod(y, ld)) << "\n";
      }
    }
    write_file(prefix + "_comp" + std::to_string(c) + ".csv", csv.str());
  }

  // One SVG with a panel per source component; y is the stacked target coordinate.
  double total_y = to_double(m.target().total());
  const double W = 640, H = 480, pad = 40;
  int ncomp = m.source().components();
  std::ostringstream svg;
  svg.precision(8);
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W
      << "\" height=\"" << (H * ncomp) << "\">\n";
  for (int c = 0; c < ncomp; ++c) {
    double lx = to_double(m.source().len(c));
    double top = H * c;
    auto X = [&](double x) { return pad + (W - 2 * pad) * x / lx; };
    auto Y = [&](double y) { return top + H - pad - (H - 2 * pad) * y / total_y; };
    svg << "<rect x=\"" << pad << "\" y=\"" << (top + pad) << "\" width=\""
        << (W - 2 * pad) << "\" height=\"" << (H - 2 * pad)
        << "\" fill=\"white\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << pad << "\" y=\"" << (top + pad - 8)
        << "\" font-size=\"13\">source component " << c << " (circumference "
        << format_rat(m.source().len(c)) << ")</text>\n";
    for (const Piece& p : m.pieces()) {
      if (p.src_comp != c) continue;
      svg << "<polyline fill=\"none\" stroke=\"#1f77b4\" stroke-width=\"1.5\" points=\"";
      for (int k = 0; k < samples; ++k) {
        Rat x = p.start + p.len * k / (samples - 1);
        Rat y = transform_apply(p.tf, x);
        const Rat& ld = m.target().len(p.dst_comp);
        double gy = global_target_coord(m, p.dst_comp, to_double(reduce_mod(y, ld)));
        double gx = to_double(reduce_mod(x, m.source().len(c)));
        // A wrapped sample would draw a spurious vertical line; break the polyline.
        if (k > 0 && gx < to_double(p.start)) {
          svg << "\"/>\n<polyline fill=\"none\" stroke=\"#1f77b4\" "
                 "stroke-width=\"1.5\" points=\"";
        }
        svg << X(gx) << "," << Y(gy) << " ";
      }
      svg << "\"/>\n";
    }
    for (const DPoint& b : m.bp0()) {
      if (b.comp != c) continue;
      DPoint v = m.evaluate(b);
      double gy = global_target_coord(m, v.comp, to_double(v.pos));
      svg << "<circle cx=\"" << X(to_double(b.pos)) << "\" cy=\"" << Y(gy)
          << "\" r=\"3.5\" fill=\"#d62728\"/>\n";
    }
  }
  svg << "</svg>\n";
  write_file(prefix + ".svg", svg.str());
}

// --- command implementations ----------------------------------------------------

int run(int argc, char** argv) {
  CLI::App app{
      "circleflow: piecewise absolutely continuous circle bijections - exact algebra, "
      "L1 metric, one-parameter families and flow straightening"};
  app.require_subcommand(1);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a map at a point");
  std::string eval_f, eval_x;
  int eval_comp = 0;
  bool eval_left = false;
  eval_cmd->add_option("--f", eval_f, "map JSON file")->required();
  eval_cmd->add_option("--x", eval_x, "position, rational p/q")->required();
  eval_cmd->add_option("--comp", eval_comp, "source component (default 0)");
  eval_cmd->add_flag("--left-limit", eval_left, "evaluate the left limit instead");

  // compose
  auto* comp_cmd = app.add_subcommand("compose", "compose two maps (f after g)");
  std::string comp_f, comp_g, comp_out;
  comp_cmd->add_option("--f", comp_f, "outer map JSON file")->required();
  comp_cmd->add_option("--g", comp_g, "inner map JSON file")->required();
  comp_cmd->add_option("--out", comp_out, "output path (default stdout)");

  // invert
  auto* inv_cmd = app.add_subcommand("invert", "invert a map");
  std::string inv_f, inv_out;
  inv_cmd->add_option("--f", inv_f, "map JSON file")->required();
  inv_cmd->add_option("--out", inv_out, "output path (default stdout)");

  // bp0
  auto* bp_cmd = app.add_subcommand("bp0", "list the discontinuity points of a map");
  std::string bp_f;
  double bp_tol = -1;
  bp_cmd->add_option("--f", bp_f, "map JSON file")->required();
  bp_cmd->add_option("--tol", bp_tol, "jump detection tolerance (default: automatic)");

  // dist
  auto* dist_cmd = app.add_subcommand("dist", "metric d between two maps");
  std::string dist_f, dist_g;
  bool dist_oracle = false;
  bool dist_tilde = false;
  dist_cmd->add_option("--f", dist_f, "first map JSON file")->required();
  dist_cmd->add_option("--g", dist_g, "second map JSON file")->required();
  dist_cmd->add_flag("--oracle", dist_oracle,
                     "also print the quadrature oracle value and the difference");
  dist_cmd->add_flag("--dtilde", dist_tilde, "print d~1 instead of d");

  // flow
  auto* flow_cmd = app.add_subcommand("flow", "emit one map of a named family");
  FamilyOpts flow_fo;
  std::string flow_t, flow_out;
  int flow_n = 1;
  add_family_flags(flow_cmd, flow_fo, true);
  flow_cmd->add_option("--t", flow_t, "time parameter, rational p/q");
  flow_cmd->add_option("--n", flow_n, "index for example31|example41|cauchy46");
  flow_cmd->add_option("--out", flow_out, "output path (default stdout)");

  // straighten
  auto* str_cmd = app.add_subcommand("straighten", "run the straightening pipeline");
  FamilyOpts str_fo;
  std::string str_out;
  int str_qmax = 12;
  double str_tol = 1e-9;
  add_family_flags(str_cmd, str_fo, false);
  str_cmd->add_option("--q-max", str_qmax, "finest dyadic sampling exponent (default 12)");
  str_cmd->add_option("--tol", str_tol, "stability / verification tolerance (default 1e-9)");
  str_cmd->add_option("--out", str_out, "output path (default stdout)");

  // verify
  auto* ver_cmd = app.add_subcommand(
      "verify", "re-verify a straightening result against its family");
  FamilyOpts ver_fo;
  std::string ver_f;
  double ver_tol = 1e-9;
  ver_cmd->add_option("--f", ver_f, "straightening result JSON file")->required();
  add_family_flags(ver_cmd, ver_fo, false);
  ver_cmd->add_option("--tol", ver_tol, "residual tolerance (default 1e-9)");

  // plot
  auto* plot_cmd = app.add_subcommand("plot", "emit CSV samples and an SVG graph");
  std::string plot_f, plot_out;
  int plot_samples = 256;
  plot_cmd->add_option("--f", plot_f, "map JSON file")->required();
  plot_cmd->add_option("--out", plot_out, "output prefix (files <prefix>_compN.csv, <prefix>.svg)")
      ->required();
  plot_cmd->add_option("--samples", plot_samples, "samples per piece (default 256)");

  // selftest
  auto* self_cmd = app.add_subcommand("selftest", "run the acceptance suite");
  std::uint64_t self_seed = 20260819;
  int self_criterion = 0;
  self_cmd->add_option("--seed", self_seed, "seed for the randomized suites");
  self_cmd->add_option("--criterion", self_criterion, "run a single criterion (1-8)");

  CLI11_PARSE(app, argc, argv);

  if (*eval_cmd) {
    PacMap m = load_map(eval_f);
    DPoint x{eval_comp, parse_rat(eval_x)};
    DPoint y = eval_left ? m.left_limit(x) : m.evaluate(x);
    std::cout << format_dpoint(y) << std::endl;
    return kExitOk;
  }

  if (*comp_cmd) {
    PacMap f = load_map(comp_f);
    PacMap g = load_map(comp_g);
    emit(comp_out, pac_map_to_json(compose(f, g)));
    return kExitOk;
  }

  if (*inv_cmd) {
    emit(inv_out, pac_map_to_json(load_map(inv_f).inverse()));
    return kExitOk;
  }

  if (*bp_cmd) {
    PacMap m = load_map(bp_f);
    auto bps = m.bp0(bp_tol);
    std::cout << "sharp " << bps.size() << "\n";
    for (const DPoint& p : bps) std::cout << format_dpoint(p) << "\n";
    return kExitOk;
  }

  if (*dist_cmd) {
    PacMap f = load_map(dist_f);
    PacMap g = load_map(dist_g);
    MetricValue d = dist_tilde ? d_tilde1(f, g) : metric_d(f, g);
    if (d.exact) {
      std::cout << format_rat(d.value) << std::endl;
    } else {
      std::ostringstream line;
      line.precision(17);
      line << d.approx << " (error bound " << d.err << ")";
      std::cout << line.str() << std::endl;
    }
    if (dist_oracle) {
      double est = quad_oracle_d_tilde1(f, g, 1000000);
      if (!dist_tilde) est += quad_oracle_d_tilde1(f.inverse(), g.inverse(), 1000000);
      std::ostringstream line;
      line.precision(17);
      line << "oracle " << est << " (difference " << std::abs(est - d.approx) << ")";
      std::cout << line.str() << std::endl;
    }
    return kExitOk;
  }

  if (*flow_cmd) {
    emit(flow_out, pac_map_to_json(build_family_map(flow_fo, flow_t, flow_n)));
    return kExitOk;
  }

  if (*str_cmd) {
    Flow fam = build_flow(str_fo);
    StraightenConfig cfg;
    cfg.q_max = str_qmax;
    cfg.tol = str_tol;
    StraighteningResult sr = straighten(fam, cfg);
    emit(str_out, straighten_result_to_json(sr, fam.name));
    if (!sr.verification.passed) {
      std::cerr << "verification failed: " << sr.verification.message << std::endl;
      return kExitVerification;
    }
    return kExitOk;
  }

  if (*ver_cmd) {
    PacMap f = conjugator_from_json(read_file(ver_f));
    Flow fam = build_flow(ver_fo);
    std::vector<Rat> ts = {Rat(-1) / 2, Rat(-1) / 8, Rat(-1) / 32,
                           Rat(1) / 32, Rat(1) / 8,  Rat(1) / 2};
    VerificationReport rep =
        verify_conjugate_continuity(f.target(), f, fam, ts, ver_tol);
    std::ostringstream out;
    out << "verification: " << (rep.passed ? "PASS" : "FAIL") << " (" << rep.message
        << ")\n";
    for (const VerificationEntry& e : rep.entries)
      out << "  t=" << format_rat(e.t) << " invariant=" << (e.invariant ? "yes" : "no")
          << " max_residual=" << e.max_residual << "\n";
    std::cout << out.str();
    return rep.passed ? kExitOk : kExitVerification;
  }

  if (*plot_cmd) {
    write_plot(load_map(plot_f), plot_out, plot_samples);
    return kExitOk;
  }

  if (*self_cmd) {
    if (self_criterion != 0) {
      selftest::CriterionResult r = selftest::run_criterion(self_criterion, self_seed);
      std::cout << "criterion " << r.id << ": " << (r.passed ? "PASS" : "FAIL") << "  "
                << r.name << " -- " << r.detail << std::endl;
      return r.passed ? kExitOk : kExitVerification;
    }
    int failures = selftest::run_acceptance(self_seed, std::cout);
    return failures == 0 ? kExitOk : kExitVerification;
  }

  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const validation_error& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << std::endl;
    return kExitValidation;
  }
}
