// Command-line front end: builds and verifies nets, randomizes them, and
// emits the dependence diagnostics and lemma certificates as JSON/CSV.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

#include "negadep/boxes.hpp"
#include "negadep/counting.hpp"
#include "negadep/dependence.hpp"
#include "negadep/gfnet.hpp"
#include "negadep/lemmas.hpp"
#include "negadep/randomize.hpp"

using json = nlohmann::ordered_json;
using namespace negadep;

namespace {

constexpr const char* kVersion = "negadep 0.1.0";

json rat_json(const Rat& q) {
  return json{{"num", q.get_num().get_str()},
              {"den", q.get_den().get_str()},
              {"approx", rat_double(q)}};
}

Rat parse_endpoint(const std::string& tok) {
  if (tok.empty()) throw CLI::ValidationError("empty endpoint");
  auto caret = tok.find('^');
  auto slash = tok.find('/');
  if (slash != std::string::npos) {
    Int num(tok.substr(0, slash));
    if (caret != std::string::npos && caret > slash) {
      Int base(tok.substr(slash + 1, caret - slash - 1));
      long exp = std::stol(tok.substr(caret + 1));
      Int den(1);
      for (long i = 0; i < exp; ++i) den *= base;
      return rat(num, den);
    }
    return rat(num, Int(tok.substr(slash + 1)));
  }
  auto dot = tok.find('.');
  if (dot != std::string::npos) {
    std::string digitsonly = tok.substr(0, dot) + tok.substr(dot + 1);
    long frac = static_cast<long>(tok.size() - dot - 1);
    Int den(1);
    for (long i = 0; i < frac; ++i) den *= 10;
    return rat(Int(digitsonly), den);
  }
  return Rat(Int(tok));
}

Rat round_badic(long b, const Rat& x, long depth, const std::string& what) {
  if (boxes::is_badic(b, x)) return x;
  Rat scale(ipow(b, depth));
  Rat rounded = rat(rat_floor(x * scale), ipow(b, depth));
  std::cerr << "warning: " << what << " " << x.get_str()
            << " is not base-" << b << " rational; rounded to depth " << depth
            << " (" << rounded.get_str() << ")\n";
  return rounded;
}

boxes::Box parse_box_literal(long b, const std::string& lit, bool force_badic) {
  std::vector<boxes::BoxInterval> factors;
  std::size_t pos = 0;
  while (pos < lit.size()) {
    auto open = lit.find('[', pos);
    auto comma = lit.find(',', open);
    auto close = lit.find(')', comma);
    if (open == std::string::npos || comma == std::string::npos ||
        close == std::string::npos)
      throw CLI::ValidationError("bad box literal: " + lit);
    Rat lo = parse_endpoint(lit.substr(open + 1, comma - open - 1));
    Rat hi = parse_endpoint(lit.substr(comma + 1, close - comma - 1));
    if (force_badic) {
      lo = round_badic(b, lo, 12, "left endpoint");
      hi = round_badic(b, hi, 12, "right endpoint");
    }
    factors.emplace_back(b, lo, hi);
    pos = close + 1;
    if (pos < lit.size() && (lit[pos] == 'x' || lit[pos] == 'X')) ++pos;
  }
  if (factors.empty()) throw CLI::ValidationError("empty box literal");
  return boxes::Box(b, std::move(factors));
}

std::string box_str(const boxes::Box& box) {
  std::string out;
  for (long j = 0; j < box.s(); ++j) {
    if (j) out += "x";
    out += "[" + box.f[j].a.get_str() + "," + box.f[j].A.get_str() + ")";
  }
  return out;
}

void write_report(const json& payload, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << payload.dump(2) << std::endl;
  } else {
    std::ofstream os(out);
    if (!os) throw CLI::ValidationError("cannot open output file " + out);
    os << payload.dump(2) << '\n';
  }
}

struct NetOptions {
  long b = 0, s = 0, m = 0, E = -1;
  std::string net_file;

  void attach(CLI::App* cmd) {
    cmd->add_option("--net", net_file, "net file produced by the net subcommand");
    cmd->add_option("--b", b, "prime base");
    cmd->add_option("--s", s, "dimension");
    cmd->add_option("--m", m, "digit depth, n = b^m");
    cmd->add_option("--E", E, "stored digits per coordinate (default m+20)");
  }

  PointSet acquire() const {
    if (!net_file.empty()) {
      NetFile nf = load_net_file(net_file);
      if (nf.points) return *nf.points;
      return generate_net(nf.gm, nf.E);
    }
    if (b == 0 || s == 0 || m == 0)
      throw CLI::ValidationError("need --net or all of --b --s --m");
    return faure_net(b, s, m, E);
  }
};

json config_json(const NetOptions& net, uint64_t seed, long replicates) {
  json cfg;
  if (!net.net_file.empty()) cfg["net"] = net.net_file;
  if (net.b) cfg["b"] = net.b;
  if (net.s) cfg["s"] = net.s;
  if (net.m) cfg["m"] = net.m;
  if (net.E >= 0) cfg["E"] = net.E;
  cfg["seed"] = seed;
  cfg["replicates"] = replicates;
  return cfg;
}

lemmas::GridSpec parse_grid(const std::string& spec) {
  lemmas::GridSpec grid;
  std::istringstream is(spec);
  std::string item;
  while (std::getline(is, item, ',')) {
    auto eq = item.find('=');
    if (eq == std::string::npos) throw CLI::ValidationError("bad grid item: " + item);
    std::string key = item.substr(0, eq), val = item.substr(eq + 1);
    if (key == "smax")
      grid.smax = std::stol(val);
    else if (key == "kmax")
      grid.kmax = std::stol(val);
    else if (key == "mslack")
      grid.mslack = std::stol(val);
    else if (key == "trials")
      grid.trials = std::stol(val);
    else if (key == "seed")
      grid.seed = std::stoull(val);
    else if (key == "bases") {
      grid.bases.clear();
      std::istringstream bs(val);
      std::string tok;
      while (std::getline(bs, tok, ';')) grid.bases.push_back(std::stol(tok));
    } else {
      throw CLI::ValidationError("unknown grid key: " + key);
    }
  }
  return grid;
}

json certificate_json(const lemmas::LemmaCertificate& cert) {
  json j;
  j["lemma"] = cert.lemma;
  j["grid"] = cert.grid;
  j["checked"] = cert.checked;
  j["exact"] = cert.exact;
  j["failures"] = cert.failures;
  if (cert.has_tightest)
    j["tightest"] = json{{"point", cert.tightest_point},
                         {"margin", rat_json(cert.tightest_margin)}};
  else
    j["tightest"] = nullptr;
  if (!cert.note.empty()) j["note"] = cert.note;
  j["pass"] = cert.passed();
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"digital nets, scrambling and pairwise sampling dependence"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  try {
    // ---- net ----
    auto* net_cmd = app.add_subcommand("net", "build a Faure net and optionally verify it");
    NetOptions net_net;
    net_net.attach(net_cmd);
    bool net_check = false, net_points = false;
    std::string net_out;
    net_cmd->add_flag("--check", net_check, "run the elementary-interval verifier");
    net_cmd->add_flag("--points", net_points, "include the point dump in the file");
    net_cmd->add_option("--out", net_out, "net file to write");

    // ---- scramble / shift ----
    auto* scr_cmd = app.add_subcommand("scramble", "Owen-scramble a net");
    auto* shf_cmd = app.add_subcommand("shift", "digitally shift a net");
    NetOptions net_scr, net_shf;
    net_scr.attach(scr_cmd);
    net_shf.attach(shf_cmd);
    uint64_t scr_seed = 1, shf_seed = 1;
    long scr_reps = 1, shf_reps = 1;
    std::string scr_out, shf_out;
    scr_cmd->add_option("--seed", scr_seed, "base seed");
    scr_cmd->add_option("--replicates", scr_reps, "replicate count");
    scr_cmd->add_option("--out", scr_out, "output file (point values)");
    shf_cmd->add_option("--seed", shf_seed, "base seed");
    shf_cmd->add_option("--replicates", shf_reps, "replicate count");
    shf_cmd->add_option("--out", shf_out, "output file (point values)");

    // ---- diagnose ----
    auto* diag_cmd = app.add_subcommand("diagnose", "counting-number report");
    NetOptions net_diag;
    net_diag.attach(diag_cmd);
    long diag_kmax = -1, diag_dmax = -1;
    std::string diag_out, diag_format = "csv";
    diag_cmd->add_option("--kmax", diag_kmax, "cap on |k| (default m+2)");
    diag_cmd->add_option("--dmax", diag_dmax, "cap on |d|_J (default m+2)");
    diag_cmd->add_option("--out", diag_out, "output file");
    diag_cmd->add_option("--format", diag_format, "csv or json");

    // ---- hbox ----
    auto* hbox_cmd = app.add_subcommand("hbox", "pair probability H_n(A) for one box");
    NetOptions net_hbox;
    net_hbox.attach(hbox_cmd);
    std::string hbox_box, hbox_out, hbox_rnd = "scramble";
    bool hbox_exact = false, hbox_emp = false;
    long hbox_reps = 10000;
    uint64_t hbox_seed = 1;
    hbox_cmd->add_option("--box", hbox_box, "box literal, e.g. \"[0,1/3)x[0,2/3)\"")
        ->required();
    hbox_cmd->add_flag("--exact", hbox_exact, "exact rational H (default)");
    hbox_cmd->add_flag("--empirical", hbox_emp, "empirical H over replicates");
    hbox_cmd->add_option("--replicates", hbox_reps, "replicates for --empirical");
    hbox_cmd->add_option("--seed", hbox_seed, "seed for --empirical");
    hbox_cmd->add_option("--randomizer", hbox_rnd, "scramble or shift");
    hbox_cmd->add_option("--out", hbox_out, "output file");
    bool hbox_dump = false;
    hbox_cmd->add_flag("--dump-decomp", hbox_dump,
                       "include per-coordinate volume vectors and decomposition "
                       "coefficients");

    // ---- index ----
    auto* idx_cmd = app.add_subcommand("index", "pairwise sampling dependence index over a family");
    NetOptions net_idx;
    net_idx.attach(idx_cmd);
    std::string idx_family, idx_out, idx_rnd = "scramble";
    bool idx_emp = false;
    long idx_reps = 10000;
    uint64_t idx_seed = 1;
    idx_cmd->add_option("--family", idx_family,
                        "box family: file with one literal per line, or random:N:p")
        ->required();
    idx_cmd->add_flag("--empirical", idx_emp, "empirical mode");
    idx_cmd->add_option("--replicates", idx_reps, "replicates for empirical mode");
    idx_cmd->add_option("--seed", idx_seed, "seed");
    idx_cmd->add_option("--randomizer", idx_rnd, "scramble or shift");
    idx_cmd->add_option("--out", idx_out, "output file");

    // ---- variance ----
    auto* var_cmd = app.add_subcommand("variance", "variance of the indicator estimator");
    NetOptions net_var;
    net_var.attach(var_cmd);
    std::string var_box, var_out, var_rnd = "scramble";
    long var_reps = 10000;
    uint64_t var_seed = 1;
    var_cmd->add_option("--box", var_box, "box literal")->required();
    var_cmd->add_option("--replicates", var_reps, "replicates");
    var_cmd->add_option("--seed", var_seed, "seed");
    var_cmd->add_option("--randomizer", var_rnd, "scramble or shift");
    var_cmd->add_option("--out", var_out, "output file");

    // ---- verify ----
    auto* ver_cmd = app.add_subcommand("verify", "machine-check the lemma battery");
    std::string ver_lemma = "all", ver_out, ver_grid;
    ver_cmd->add_option("--lemma", ver_lemma, "lemma id or 'all'");
    ver_cmd->add_option("--grid", ver_grid, "grid overrides, e.g. kmax=6,smax=5");
    ver_cmd->add_option("--out", ver_out, "certificate JSON file");

    // ---- example-shift ----
    auto* ex_cmd = app.add_subcommand("example-shift",
                                      "digital-shift counterexample with exact values");
    std::string ex_out;
    long ex_reps = 0;
    uint64_t ex_seed = 1;
    ex_cmd->add_option("--replicates", ex_reps, "optional empirical replicates");
    ex_cmd->add_option("--seed", ex_seed, "seed for the empirical estimate");
    ex_cmd->add_option("--out", ex_out, "output file");

    CLI11_PARSE(app, argc, argv);

    auto randomizer_of = [](const std::string& s) {
      if (s == "scramble") return dependence::Randomizer::scramble;
      if (s == "shift") return dependence::Randomizer::shift;
      throw CLI::ValidationError("randomizer must be scramble or shift");
    };

    if (net_cmd->parsed()) {
      if (net_net.b == 0 || net_net.s == 0 || net_net.m == 0)
        throw CLI::ValidationError("net: need --b --s --m");
      auto gm = build_faure_matrices(PrimeBase(net_net.b), net_net.s, net_net.m);
      long E = net_net.E >= 0 ? net_net.E : default_digit_depth(net_net.m);
      PointSet ps = generate_net(gm, E);
      if (!net_out.empty()) save_net_file(net_out, gm, net_points ? &ps : nullptr);
      if (net_check) {
        bool ok = verify_tms_net(ps, 0) && verify_all_elementary(ps);
        if (!ok) {
          std::cout << "(0," << net_net.m << "," << net_net.s << ")-net FAILED verification\n";
          return 2;
        }
        std::cout << "(0," << net_net.m << "," << net_net.s << ")-net verified\n";
      }
      return 0;
    }

    if (scr_cmd->parsed() || shf_cmd->parsed()) {
      bool scramble = scr_cmd->parsed();
      const NetOptions& no = scramble ? net_scr : net_shf;
      uint64_t seed = scramble ? scr_seed : shf_seed;
      long reps = scramble ? scr_reps : shf_reps;
      std::string out = scramble ? scr_out : shf_out;
      PointSet ps = no.acquire();
      std::ostringstream os;
      os << "# " << kVersion << (scramble ? " scramble" : " shift") << " seed="
         << seed << " replicates=" << reps << "\n";
      for (long r = 0; r < reps; ++r) {
        PointSet rnd = scramble ? owen_scramble(ps, {seed, static_cast<uint64_t>(r)})
                                : digital_shift(ps, {seed, static_cast<uint64_t>(r)});
        os << "# replicate " << r << "\n";
        for (long i = 0; i < rnd.n; ++i) {
          os << i << ':';
          for (long j = 0; j < rnd.s; ++j) {
            os << (j ? " | " : " ");
            for (long l = 0; l < rnd.E; ++l)
              os << (l ? " " : "") << static_cast<int>(rnd.digit(i, j, l));
          }
          os << '\n';
        }
      }
      if (out.empty()) {
        std::cout << os.str();
      } else {
        std::ofstream f(out);
        f << os.str();
      }
      return 0;
    }

    if (diag_cmd->parsed()) {
      PointSet ps = net_diag.acquire();
      long kmax = diag_kmax >= 0 ? diag_kmax : ps.m + 2;
      long dmax = diag_dmax >= 0 ? diag_dmax : ps.m + 2;
      auto report = counting::diagnose(ps, kmax, dmax);
      bool all_ok = true;
      for (const auto& row : report.rows) all_ok = all_ok && row.bound_ok;
      std::string prov = std::string(kVersion) + " diagnose kmax=" +
                         std::to_string(kmax) + " dmax=" + std::to_string(dmax);
      if (diag_format == "csv") {
        if (diag_out.empty()) {
          counting::write_csv(report, std::cout, prov);
        } else {
          std::ofstream f(diag_out);
          counting::write_csv(report, f, prov);
        }
      } else {
        json rows = json::array();
        for (const auto& row : report.rows) {
          rows.push_back(json{{"k", row.k},
                              {"d", row.d},
                              {"J", row.J},
                              {"I", row.I},
                              {"brute", row.brute},
                              {"closed_form", row.closed_form.get_str()},
                              {"C_b", rat_json(row.cb)},
                              {"psi", rat_json(row.psi)},
                              {"m_tilde", rat_json(row.mtilde)},
                              {"bound_ok", row.bound_ok}});
        }
        json payload{{"version", kVersion},
                     {"config", config_json(net_diag, 0, 0)},
                     {"b", report.b},
                     {"s", report.s},
                     {"m", report.m},
                     {"verified_net", report.verified_net},
                     {"rows", rows}};
        write_report(payload, diag_out);
      }
      return (report.verified_net && !all_ok) ? 2 : 0;
    }

    if (hbox_cmd->parsed()) {
      PointSet ps = net_hbox.acquire();
      bool emp = hbox_emp;
      bool exact = hbox_exact || !emp;
      json payload{{"version", kVersion},
                   {"config", config_json(net_hbox, hbox_seed, hbox_reps)}};
      boxes::Box box = parse_box_literal(ps.b, hbox_box, exact);
      payload["box"] = box_str(box);
      Rat vol = box.volume();
      payload["vol2"] = rat_json(vol * vol);
      bool pass = true;
      if (exact) {
        dependence::Calculator calc(ps);
        Rat h = calc.h_unanchored(box);
        Rat gap = h - vol * vol;
        payload["h_exact"] = rat_json(h);
        payload["gap"] = rat_json(gap);
        payload["verified_net"] = calc.verified_net();
        if (calc.verified_net())
          pass = gap <= 0;
        else
          std::cerr << "warning: NotAVerifiedNet: the point set failed the net "
                       "check; H is reported but the bound is not asserted\n";
      } else {
        payload["h_exact"] = nullptr;
      }
      if (hbox_dump) {
        json coords = json::array();
        for (const auto& f : box.f) {
          auto V = boxes::volume_vector(f);
          json prefix = json::array();
          for (const auto& v : V.prefix) prefix.push_back(rat_json(v));
          auto dc = boxes::unanchored_decompose(f);
          json alpha = json::array(), tau = json::array();
          for (const auto& a : dc.alpha) alpha.push_back(rat_json(a));
          for (const auto& t : dc.tau) tau.push_back(rat_json(t));
          coords.push_back(json{
              {"interval", "[" + f.a.get_str() + "," + f.A.get_str() + ")"},
              {"volume_vector", json{{"prefix", prefix},
                                     {"tail", json{{"q", V.q()},
                                                   {"c", rat_json(V.tail_c)}}}}},
              {"coefficients",
               json{{"kind", dc.kind == boxes::DecompCoefficients::Kind::anchored
                                 ? "anchored"
                                 : "unanchored"},
                    {"r", dc.r},
                    {"alpha", alpha},
                    {"tau", tau}}}});
        }
        payload["decomposition"] = coords;
      }
      if (emp) {
        auto est = dependence::h_empirical(box, ps, randomizer_of(hbox_rnd),
                                           hbox_reps, hbox_seed);
        payload["h_emp"] = json{{"mean", est.estimate}, {"se", est.se}, {"R", est.replicates}};
      } else {
        payload["h_emp"] = nullptr;
      }
      payload["pass"] = pass;
      write_report(payload, hbox_out);
      return pass ? 0 : 2;
    }

    if (idx_cmd->parsed()) {
      PointSet ps = net_idx.acquire();
      std::vector<boxes::Box> family;
      if (idx_family.rfind("random:", 0) == 0) {
        auto rest = idx_family.substr(7);
        auto colon = rest.find(':');
        long count = std::stol(rest.substr(0, colon));
        long depth = colon == std::string::npos ? ps.m + 2
                                                : std::stol(rest.substr(colon + 1));
        family = dependence::random_box_family(ps.b, ps.s, depth, count, idx_seed);
      } else {
        std::ifstream f(idx_family);
        if (!f) throw CLI::ValidationError("cannot open family file " + idx_family);
        std::string line;
        while (std::getline(f, line)) {
          if (line.empty() || line[0] == '#') continue;
          family.push_back(parse_box_literal(ps.b, line, !idx_emp));
        }
      }
      auto report = dependence::pairwise_index(ps, family, !idx_emp,
                                               randomizer_of(idx_rnd), idx_reps,
                                               idx_seed);
      json boxesj = json::array();
      for (const auto& g : report.gaps) {
        json row{{"box", box_str(g.box)}, {"vol2", rat_json(g.vol2)}};
        if (g.exact) {
          row["h_exact"] = rat_json(g.h);
          row["gap"] = rat_json(g.gap);
        } else {
          row["h_emp"] = json{{"mean", g.h_emp}, {"se", g.se}};
          row["gap"] = g.h_emp - rat_double(g.vol2);
        }
        boxesj.push_back(std::move(row));
      }
      bool pass = !report.exact || !report.verified_net || report.max_gap <= 0;
      json payload{{"version", kVersion},
                   {"config", config_json(net_idx, idx_seed, idx_reps)},
                   {"family_size", family.size()},
                   {"exact", report.exact},
                   {"verified_net", report.verified_net},
                   {"argmax", report.argmax},
                   {"max_gap", report.exact ? rat_json(report.max_gap) : json(nullptr)},
                   {"boxes", boxesj},
                   {"pass", pass}};
      write_report(payload, idx_out);
      return pass ? 0 : 2;
    }

    if (var_cmd->parsed()) {
      PointSet ps = net_var.acquire();
      boxes::Box box = parse_box_literal(ps.b, var_box, true);
      auto vr = dependence::variance_compare(box, ps, randomizer_of(var_rnd),
                                             var_reps, var_seed);
      json payload{{"version", kVersion},
                   {"config", config_json(net_var, var_seed, var_reps)},
                   {"box", box_str(box)},
                   {"mu", rat_json(vr.mu)},
                   {"h_exact", rat_json(vr.h)},
                   {"var_analytic", rat_json(vr.var_analytic)},
                   {"mc_bound", rat_json(vr.mc_bound)},
                   {"decomposition_term", rat_json(vr.decomposition_term)},
                   {"var_le_mc", vr.var_le_mc},
                   {"var_empirical", vr.var_empirical},
                   {"se_var", vr.se_var},
                   {"replicates", vr.replicates}};
      write_report(payload, var_out);
      return vr.var_le_mc ? 0 : 2;
    }

    if (ver_cmd->parsed()) {
      lemmas::GridSpec grid = ver_grid.empty() ? lemmas::GridSpec{} : parse_grid(ver_grid);
      std::vector<lemmas::LemmaCertificate> certs;
      if (ver_lemma == "all")
        certs = lemmas::run_all(grid);
      else
        certs.push_back(lemmas::run_one(ver_lemma, grid));
      json arr = json::array();
      bool all_pass = true;
      for (const auto& c : certs) {
        arr.push_back(certificate_json(c));
        all_pass = all_pass && c.passed();
        std::cout << (c.passed() ? "[PASS] " : "[FAIL] ") << c.lemma << " ("
                  << c.checked << " checks)\n";
      }
      json payload{{"version", kVersion},
                   {"grid", grid.describe()},
                   {"certificates", arr},
                   {"pass", all_pass}};
      write_report(payload, ver_out);
      return all_pass ? 0 : 2;
    }

    if (ex_cmd->parsed()) {
      auto ex = dependence::shift_example();
      json cbt = json::array();
      for (const auto& [k, v] : ex.cb_table)
        cbt.push_back(json{{"k", k}, {"C_b", rat_json(v)}});
      bool positive = ex.h_shift_exact > ex.vol2;
      json payload{{"version", kVersion},
                   {"box", box_str(ex.box)},
                   {"h_shift", rat_json(ex.h_shift_exact)},
                   {"vol2", rat_json(ex.vol2)},
                   {"cb_table", cbt},
                   {"verdict", positive ? "positive dependence index"
                                        : "nonpositive dependence index"}};
      if (ex_reps >= 2) {
        auto shift_est = dependence::h_empirical(ex.box, ex.points,
                                                 dependence::Randomizer::shift,
                                                 ex_reps, ex_seed);
        auto scr_est = dependence::h_empirical(ex.box, ex.points,
                                               dependence::Randomizer::scramble,
                                               ex_reps, ex_seed);
        payload["h_emp_shift"] = json{{"mean", shift_est.estimate},
                                      {"se", shift_est.se},
                                      {"R", shift_est.replicates}};
        payload["h_emp_scramble"] = json{{"mean", scr_est.estimate},
                                         {"se", scr_est.se},
                                         {"R", scr_est.replicates}};
      }
      write_report(payload, ex_out);
      return 0;
    }
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
