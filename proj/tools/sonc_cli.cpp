#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <string>

#include "sonc/sonc.hpp"

using namespace sonc;

namespace {

constexpr int kInputError = 2;

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CliConfig {
  std::string poly;
  std::string input;
  std::size_t nvars = 0;
  std::string out;
  std::string mode;
  double eps = 1e-8;
  bool eps_given = false;
  bool pretty = false;
  std::uint64_t seed = 0x5eedULL;
  std::string cert;
  std::string points;
  std::int64_t scale = 1;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t infer_nvars(const std::string& text) {
  static const std::regex var("x([0-9]+)");
  std::size_t n = 0;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), var); it != std::sregex_iterator(); ++it)
    n = std::max<std::size_t>(n, std::stoul((*it)[1].str()));
  return std::max<std::size_t>(n, 1);
}

std::string poly_text(const CliConfig& c) {
  if (!c.poly.empty() && !c.input.empty()) throw InputError("give either --poly or --input, not both");
  if (!c.poly.empty()) return c.poly;
  if (!c.input.empty()) return read_file(c.input);
  throw InputError("no polynomial given (use --poly or --input)");
}

SparsePoly read_poly(const CliConfig& c, std::string text) {
  while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.pop_back();
  const std::size_t n = c.nvars ? c.nvars : infer_nvars(text);
  try {
    return parse_poly(text, n);
  } catch (const Error& e) {
    throw InputError(std::string("cannot parse polynomial: ") + e.what());
  }
}

std::optional<VerifyMode> requested_mode(const CliConfig& c) {
  if (c.mode.empty()) return std::nullopt;
  if (c.mode == "exact") return VerifyMode::exact();
  return VerifyMode::eps(c.eps);
}

void emit(const CliConfig& c, const Json& j) {
  const std::string text = j.dump(c.pretty ? 2 : -1) + "\n";
  if (c.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream o(c.out);
  if (!o) throw InputError("cannot write " + c.out);
  o << text;
}

int cmd_decompose(const CliConfig& c) {
  const SparsePoly f = read_poly(c, poly_text(c));
  DecomposeOptions opt;
  opt.critical.seed = c.seed;
  if (c.eps_given) opt.epsilon = c.eps;
  const DecomposeOutcome o = decompose(f, opt);
  Json j = outcome_json(o);
  j["polynomial"] = f.to_string();
  j["nvars"] = f.nvars();
  if (o.certificate) {
    const SoncCertificate& cert = *o.certificate;
    VerifyMode m = requested_mode(c).value_or(
        cert.mode == CertMode::exact ? VerifyMode::exact() : VerifyMode::eps(cert.epsilon.value_or(opt.epsilon)));
    const auto rep = verify_sonc(cert, f, m);
    j["verification"] = report_json(rep);
  }
  emit(c, j);
  switch (o.verdict) {
    case Verdict::sonc: return 0;
    case Verdict::not_sonc: return 10;
    case Verdict::not_psd: return 11;
    default: return 12;
  }
}

int cmd_verify(const CliConfig& c) {
  if (c.cert.empty()) throw InputError("--cert is required");
  std::string text = read_file(c.cert);
  SoncCertificate cert;
  try {
    Json j = Json::parse(text);
    // accept both a bare certificate and the output of the decompose command
    if (j.is_object() && j.contains("certificate") && !j.contains("version")) j = j["certificate"];
    cert = certificate_from_json(j);
  } catch (const Json::parse_error& e) {
    throw InputError(std::string("invalid JSON in ") + c.cert + ": " + e.what());
  } catch (const SchemaError& e) {
    throw InputError(std::string("schema error in ") + c.cert + ": " + e.what());
  }
  const SparsePoly f = (!c.poly.empty() || !c.input.empty()) ? read_poly(c, poly_text(c)) : cert.claimed_sum;
  if (f.nvars() != cert.nvars) throw InputError("polynomial and certificate disagree on the number of variables");
  VerifyMode m = requested_mode(c).value_or(
      cert.mode == CertMode::exact ? VerifyMode::exact() : VerifyMode::eps(cert.epsilon.value_or(c.eps)));
  const auto rep = verify_sonc(cert, f, m);
  emit(c, report_json(rep));
  return rep.pass ? 0 : 1;
}

// "0 4" or "0,0 4,2 2,4": points separated by spaces or ';', coordinates by ','.
std::vector<Exponent> parse_points(const std::string& s) {
  std::vector<Exponent> pts;
  std::string token;
  std::istringstream in(s);
  auto flush = [&](std::string t) {
    if (t.empty()) return;
    std::vector<std::int64_t> v;
    std::istringstream cs(t);
    std::string part;
    while (std::getline(cs, part, ',')) {
      if (part.empty() || part.find_first_not_of("0123456789") != std::string::npos)
        throw InputError("bad coordinate '" + part + "' in point '" + t + "'");
      v.push_back(std::stoll(part));
    }
    pts.emplace_back(std::move(v));
  };
  char ch;
  while (in.get(ch)) {
    if (std::isspace(static_cast<unsigned char>(ch)) || ch == ';') {
      flush(token);
      token.clear();
    } else {
      token += ch;
    }
  }
  flush(token);
  if (pts.empty()) throw InputError("no points given");
  return pts;
}

int cmd_mediated(const CliConfig& c) {
  if (c.points.empty()) throw InputError("--points is required");
  if (c.scale < 1) throw InputError("--scale must be at least 1");
  std::vector<Exponent> pts;
  Trellis t;
  try {
    for (const auto& p : parse_points(c.points)) pts.push_back(p.scaled(c.scale));
    t = Trellis::make(pts);
  } catch (const Error& e) {
    throw InputError(std::string("invalid trellis: ") + e.what());
  }
  const MediatedSet ms = maximal_mediated_set(t);
  emit(c, mediated_json(ms, ms.members.size() == lattice_points(t).size()));
  return 0;
}

int cmd_circuit(const CliConfig& c) {
  const SparsePoly f = read_poly(c, poly_text(c));
  const CircuitDetection det = detect_circuit(f);
  Json j{{"polynomial", f.to_string()}};
  if (det.shape == CircuitShape::monomial_squares) {
    j["is_circuit"] = true;
    j["shape"] = "monomial_squares";
    j["verdict"] = "nonnegative";
  } else if (det.shape == CircuitShape::not_circuit) {
    j["is_circuit"] = false;
    j["shape"] = "not_circuit";
    j["reason"] = det.reason;
  } else {
    const CircuitPoly& cp = *det.circuit;
    const CircuitNumber th = circuit_number(cp);
    const ThetaOrder ord = theta_compare(cp);
    j["is_circuit"] = true;
    j["shape"] = "circuit";
    j["inner"] = term_json(-cp.d(), cp.beta());
    Json lam = Json::array();
    for (const auto& l : cp.lambdas()) lam.push_back(l.get_str());
    j["lambdas"] = lam;
    j["theta"] = Json{{"log", static_cast<double>(th.log_value)}, {"value", th.value()}};
    j["theta_compare"] = to_string(ord);
    const bool nonneg = is_nonnegative_circuit(cp);
    j["verdict"] = !nonneg ? "negative_somewhere" : (ord == ThetaOrder::d_equal ? "nonnegative_boundary" : "nonnegative");
    if (nonneg && ord == ThetaOrder::d_equal && !(cp.beta().is_even() && cp.d() < 0)) {
      auto z = circuit_zero(cp.with_d(abs(cp.d())));
      // odd inner exponent with a positive coefficient: the zero sits in another orthant
      if (cp.d() < 0)
        for (std::size_t k = 0; k < z.size(); ++k)
          if (cp.beta()[k] % 2 != 0) {
            z[k] = -z[k];
            break;
          }
      j["zero"] = z;
    }
  }
  emit(c, j);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nonnegativity certificates from sums of nonnegative circuit polynomials"};
  app.require_subcommand(1);
  CliConfig cfg;
  auto common = [&](CLI::App* s, bool poly) {
    if (poly) {
      s->add_option("--poly", cfg.poly, "polynomial in x1..xn, e.g. \"1 + x1^2 - x1\"");
      s->add_option("--input", cfg.input, "file holding the polynomial");
      s->add_option("--nvars", cfg.nvars, "number of variables (default: largest index used)");
    }
    s->add_option("--out", cfg.out, "write JSON here instead of stdout");
    s->add_flag("--pretty", cfg.pretty, "indent the JSON output");
  };
  auto modes = [&](CLI::App* s) {
    s->add_option("--mode", cfg.mode, "verification mode")->check(CLI::IsMember({"exact", "eps"}));
    s->add_option_function<double>("--eps", [&](double v) {
      if (!(v > 0)) throw CLI::ValidationError("--eps", "must be positive");
      cfg.eps = v;
      cfg.eps_given = true;
    }, "relative residual tolerance");
  };
  auto* dec = app.add_subcommand("decompose", "decide SONC membership and emit a certificate or witness");
  common(dec, true);
  modes(dec);
  dec->add_option("--seed", cfg.seed, "seed for the critical-point multistart");
  auto* ver = app.add_subcommand("verify", "check a certificate against a polynomial");
  common(ver, true);
  modes(ver);
  ver->add_option("--cert", cfg.cert, "certificate JSON file");
  auto* med = app.add_subcommand("mediated", "maximal mediated set of a trellis");
  common(med, false);
  med->add_option("--points", cfg.points, "trellis points, e.g. \"0,0 4,2 2,4\"");
  med->add_option("--scale", cfg.scale, "multiply every point by this factor");
  auto* cir = app.add_subcommand("circuit", "circuit number and nonnegativity of a circuit polynomial");
  common(cir, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kInputError;
  }
  try {
    if (*dec) return cmd_decompose(cfg);
    if (*ver) return cmd_verify(cfg);
    if (*med) return cmd_mediated(cfg);
    return cmd_circuit(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInputError;
  }
}
