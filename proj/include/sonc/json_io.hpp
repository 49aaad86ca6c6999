#pragma once

#include <json.hpp>

#include <string>
#include <vector>

#include "sonc/certificate.hpp"
#include "sonc/decompose.hpp"
#include "sonc/error.hpp"
#include "sonc/mediated.hpp"
#include "sonc/verify.hpp"

namespace sonc {

using Json = nlohmann::ordered_json;

inline constexpr int kCertificateVersion = 1;

// Schema violation; pointer() is the JSON pointer of the offending value.
class SchemaError : public Error {
 public:
  SchemaError(const std::string& pointer, const std::string& what)
      : Error((pointer.empty() ? std::string("/") : pointer) + ": " + what), pointer_(pointer) {}
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

inline Json exponent_json(const Exponent& e) { return Json(e.entries()); }

inline Json term_json(const Rational& c, const Exponent& e) { return Json{{"coeff", c.get_str()}, {"exp", exponent_json(e)}}; }

inline Json poly_json(const SparsePoly& f) {
  Json terms = Json::array();
  for (const auto& [e, c] : f.terms()) terms.push_back(term_json(c, e));
  return Json{{"terms", terms}};
}

inline Json point_json(const std::vector<Rational>& x) {
  Json a = Json::array();
  for (const auto& v : x) a.push_back(v.get_str());
  return a;
}

inline Json certificate_json(const SoncCertificate& cert) {
  Json j;
  j["version"] = kCertificateVersion;
  j["nvars"] = cert.nvars;
  j["polynomial"] = poly_json(cert.claimed_sum);
  Json circuits = Json::array();
  for (const auto& c : cert.circuits) {
    Json o = Json::array();
    for (const auto& t : c.poly.outer()) o.push_back(term_json(t.coeff, t.exponent));
    Json cj{{"outer", o}, {"inner", term_json(-c.poly.d(), c.poly.beta())}};
    if (c.slack) cj["slack"] = *c.slack;
    circuits.push_back(cj);
  }
  j["circuits"] = circuits;
  Json squares = Json::array();
  for (const auto& t : cert.monomial_squares) squares.push_back(term_json(t.coeff, t.exponent));
  j["monomial_squares"] = squares;
  j["mode"] = to_string(cert.mode);
  if (cert.epsilon) j["epsilon"] = *cert.epsilon;
  if (!cert.info.empty()) j["info"] = cert.info;
  return j;
}

inline std::string serialize(const SoncCertificate& cert, bool pretty = false) {
  return certificate_json(cert).dump(pretty ? 2 : -1);
}

namespace detail {

inline const Json& field(const Json& j, const std::string& ptr, const char* key) {
  if (!j.is_object()) throw SchemaError(ptr, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(ptr + "/" + key, "missing field");
  return *it;
}

inline Rational read_rational(const Json& j, const std::string& ptr) {
  if (j.is_number_integer()) return Rational(j.get<long>());
  if (!j.is_string()) throw SchemaError(ptr, "expected a rational string \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const ParseError& e) {
    throw SchemaError(ptr, e.what());
  }
}

inline double read_double(const Json& j, const std::string& ptr) {
  if (!j.is_number()) throw SchemaError(ptr, "expected a number");
  return j.get<double>();
}

inline Exponent read_exponent(const Json& j, const std::string& ptr, std::size_t nvars) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array of exponents");
  if (j.size() != nvars) throw SchemaError(ptr, "expected " + std::to_string(nvars) + " entries");
  std::vector<std::int64_t> v;
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number_integer() || j[i].get<std::int64_t>() < 0 || j[i].get<std::int64_t>() > kMaxExponentEntry)
      throw SchemaError(ptr + "/" + std::to_string(i), "expected a nonnegative integer");
    v.push_back(j[i].get<std::int64_t>());
  }
  return Exponent(std::move(v));
}

inline Term read_term(const Json& j, const std::string& ptr, std::size_t nvars) {
  return {read_rational(field(j, ptr, "coeff"), ptr + "/coeff"), read_exponent(field(j, ptr, "exp"), ptr + "/exp", nvars)};
}

inline std::vector<Term> read_terms(const Json& j, const std::string& ptr, std::size_t nvars) {
  if (!j.is_array()) throw SchemaError(ptr, "expected an array");
  std::vector<Term> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(read_term(j[i], ptr + "/" + std::to_string(i), nvars));
  return out;
}

}  // namespace detail

inline SparsePoly poly_from_json(const Json& j, std::size_t nvars, const std::string& ptr = "") {
  SparsePoly f(nvars);
  for (const auto& t : detail::read_terms(detail::field(j, ptr, "terms"), ptr + "/terms", nvars)) f.add_term(t.exponent, t.coeff);
  return f;
}

// Structural checks only; nonnegativity and the sum are left to the verifier.
inline SoncCertificate certificate_from_json(const Json& j) {
  if (!j.is_object()) throw SchemaError("", "expected an object");
  const Json& ver = detail::field(j, "", "version");
  if (!ver.is_number_integer() || ver.get<long>() != kCertificateVersion) throw SchemaError("/version", "unsupported version");
  const Json& nv = detail::field(j, "", "nvars");
  if (!nv.is_number_integer() || nv.get<long>() < 0) throw SchemaError("/nvars", "expected a nonnegative integer");
  SoncCertificate cert;
  cert.nvars = nv.get<std::size_t>();
  cert.claimed_sum = poly_from_json(detail::field(j, "", "polynomial"), cert.nvars, "/polynomial");
  const Json& cs = detail::field(j, "", "circuits");
  if (!cs.is_array()) throw SchemaError("/circuits", "expected an array");
  for (std::size_t i = 0; i < cs.size(); ++i) {
    const std::string p = "/circuits/" + std::to_string(i);
    auto outer = detail::read_terms(detail::field(cs[i], p, "outer"), p + "/outer", cert.nvars);
    Term inner = detail::read_term(detail::field(cs[i], p, "inner"), p + "/inner", cert.nvars);
    std::vector<Exponent> members;
    for (const auto& t : outer) members.push_back(t.exponent);
    if (members.size() < 2 || !affinely_independent(members)) throw SchemaError(p + "/outer", "outer exponents do not form a simplex");
    auto lam = affine_coefficients(members, to_point(inner.exponent));
    if (!lam) throw SchemaError(p + "/inner/exp", "inner exponent is outside the affine hull");
    for (std::size_t k = 0; k < lam->size(); ++k)
      if ((*lam)[k] <= 0) throw SchemaError(p + "/outer/" + std::to_string(k), "barycentric coordinate is not positive");
    CertCircuit cc{CircuitPoly::unchecked(std::move(outer), inner.exponent, -inner.coeff), std::nullopt};
    if (cs[i].contains("slack")) cc.slack = detail::read_double(cs[i]["slack"], p + "/slack");
    cert.circuits.push_back(std::move(cc));
  }
  cert.monomial_squares = detail::read_terms(detail::field(j, "", "monomial_squares"), "/monomial_squares", cert.nvars);
  const Json& mode = detail::field(j, "", "mode");
  if (mode == "exact") cert.mode = CertMode::exact;
  else if (mode == "epsilon") cert.mode = CertMode::epsilon;
  else throw SchemaError("/mode", "expected \"exact\" or \"epsilon\"");
  if (j.contains("epsilon")) cert.epsilon = detail::read_double(j["epsilon"], "/epsilon");
  if (j.contains("info")) {
    if (!j["info"].is_object()) throw SchemaError("/info", "expected an object");
    for (const auto& [k, v] : j["info"].items()) {
      if (!v.is_string()) throw SchemaError("/info/" + k, "expected a string");
      cert.info[k] = v.get<std::string>();
    }
  }
  return cert;
}

inline SoncCertificate deserialize(const std::string& text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw SchemaError("", std::string("invalid JSON: ") + e.what());
  }
  return certificate_from_json(j);
}

inline Json system_json(const CircuitSystem& cs) {
  Json rows = Json::array();
  for (const auto& e : cs.outer_rows) rows.push_back(Json{{"kind", "outer"}, {"exp", exponent_json(e)}});
  for (const auto& e : cs.inner_rows) rows.push_back(Json{{"kind", "inner"}, {"exp", exponent_json(e)}});
  Json cols = Json::array();
  for (const auto& c : cs.columns) {
    Json trellis = Json::array();
    for (const auto& m : c.circuit.trellis.members()) trellis.push_back(exponent_json(m));
    Json lambdas = Json::array();
    for (const auto& l : c.circuit.lambdas) lambdas.push_back(l.get_str());
    cols.push_back(Json{{"inner", exponent_json(c.circuit.target)}, {"trellis", trellis}, {"lambdas", lambdas}});
  }
  Json matrix = Json::array();
  for (std::size_t i = 0; i < cs.system.rows(); ++i) {
    Json row = Json::array();
    for (std::size_t k = 0; k < cs.system.cols(); ++k) row.push_back(cs.system.matrix(i, k).get_str());
    matrix.push_back(row);
  }
  return Json{{"x_star", point_json(cs.x_star)}, {"rows", rows}, {"columns", cols}, {"matrix", matrix}, {"rhs", point_json(cs.system.rhs)}};
}

inline Json outcome_json(const DecomposeOutcome& o) {
  Json j{{"verdict", to_string(o.verdict)}};
  if (!o.reason.empty()) j["reason"] = o.reason;
  if (o.certificate) j["certificate"] = certificate_json(*o.certificate);
  if (o.system) j["system"] = system_json(*o.system);
  if (o.lp) {
    Json lp{{"feasible", o.lp->feasible()}, {"phase_one_value", o.lp->phase_one_value.get_str()}};
    if (!o.lp->farkas.empty()) lp["farkas"] = point_json(o.lp->farkas);
    j["lp"] = lp;
  }
  if (o.point) j["point"] = point_json(*o.point);
  return j;
}

inline Json report_json(const VerificationReport& r) {
  Json circuits = Json::array();
  for (const auto& c : r.per_circuit) {
    Json cj{{"index", c.index}, {"nonnegative", c.nonnegative}};
    cj["theta"] = c.theta ? Json(to_string(*c.theta)) : Json(nullptr);
    if (!c.reason.empty()) cj["reason"] = c.reason;
    circuits.push_back(cj);
  }
  Json j{{"pass", r.pass}, {"mode", to_string(r.mode.mode)}};
  if (r.mode.mode == CertMode::epsilon) j["epsilon"] = r.mode.epsilon;
  j["residual"] = r.residual;
  j["sum_residual"] = poly_json(r.sum_residual);
  j["circuits"] = circuits;
  j["reasons"] = r.reasons;
  return j;
}

inline Json mediated_json(const MediatedSet& ms, bool h_trellis) {
  Json members = Json::array();
  for (const auto& e : ms.members) members.push_back(exponent_json(e));
  Json trellis = Json::array();
  for (const auto& e : ms.trellis.members()) trellis.push_back(exponent_json(e));
  return Json{{"trellis", trellis}, {"members", members}, {"is_h_trellis", h_trellis}};
}

}  // namespace sonc
