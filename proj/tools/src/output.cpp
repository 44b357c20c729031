#include "output.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace rsl::cli {
namespace {

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json to_json(const Estimate& e) { return Json{{"value", e.value}, {"se", e.se}}; }

Json to_json(const Regime& r) {
  Json j{{"regime", to_string(r.tag)}};
  if (r.tag == RegimeTag::Cramer) {
    j["kappa"] = r.kappa;
    j["m"] = r.m;
  }
  if (r.tag == RegimeTag::Intermediate) {
    j["gamma"] = r.gamma;
    j["phi_gamma"] = r.phi_gamma;
  }
  return j;
}

Json to_json(const AsymptoticPrediction& p) {
  Json j = to_json(p.regime);
  j["constant"] = p.constant;
  j["se"] = p.constant_se;
  if (p.bounds) {
    j["bounds"] = Json{{"lower", p.bounds->lower ? to_json(*p.bounds->lower) : Json(nullptr)},
                       {"upper", p.bounds->upper}};
  } else {
    j["bounds"] = nullptr;
  }
  j["form"] = p.form;
  return j;
}

Json to_json(const IdentityReport& r) {
  Json points = Json::array();
  for (const auto& pt : r.points) {
    points.push_back(Json{{"x", pt.x},
                          {"lhs", pt.lhs},
                          {"lhs_se", pt.lhs_se},
                          {"rhs", pt.rhs},
                          {"rhs_se", pt.rhs_se},
                          {"z", pt.z},
                          {"pass", pt.pass}});
  }
  return Json{{"name", r.name}, {"tolerance_z", r.tolerance_z}, {"max_abs_z", r.max_abs_z}, {"points", points},
              {"passed", r.passed}};
}

Json to_json(const TwoSampleResult& r) {
  return Json{{"statistic", r.statistic}, {"critical", r.critical}, {"alpha", r.alpha},
              {"n_a", r.n_a},           {"n_b", r.n_b},           {"passed", r.passed}};
}

Json to_json(const BoundsReport& r) {
  Json points = Json::array();
  for (const auto& pt : r.points) {
    points.push_back(Json{{"x", pt.x},
                          {"w", pt.w},
                          {"w_se", pt.w_se},
                          {"upper", pt.upper},
                          {"upper_se", pt.upper_se},
                          {"lower", pt.lower},
                          {"lower_se", pt.lower_se},
                          {"z_upper", pt.z_upper},
                          {"z_lower", pt.z_lower},
                          {"pass", pt.pass}});
  }
  return Json{{"tolerance_z", r.tolerance_z}, {"points", points}, {"passed", r.passed}};
}

Json to_json(const CramerConstant& c) {
  return Json{{"representation", to_json(c.representation)},
              {"goldie", to_json(c.goldie)},
              {"upper_bound", c.upper_bound},
              {"n", c.n},
              {"effective_n", c.effective_n},
              {"top_share", c.top_share},
              {"heavy_integrand", c.heavy_integrand}};
}

Json to_json(const ContinuityCheck& c) {
  return Json{{"direct", to_json(c.direct)}, {"laplace", to_json(c.laplace)}, {"z", c.z}, {"pass", c.pass}};
}

Json to_json(const SlopeFit& s) {
  return Json{{"slope", s.slope}, {"se", s.se}, {"intercept", s.intercept}, {"points", s.points}};
}

std::string tail_csv(const TailCurve& curve, const RatioDiagnostic& d) {
  std::string out = "x,p_hat,se,predicted,ratio,ci_lo,ci_hi\n";
  std::size_t k = 0;
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out += num(curve.grid[i]) + "," + num(curve.p_hat[i]) + "," + num(curve.se[i]);
    if (k < d.grid.size() && d.grid[k] == curve.grid[i]) {
      out += "," + num(d.predicted[k]) + "," + num(d.ratio[k]) + "," + num(d.ci_lo[k]) + "," + num(d.ci_hi[k]);
      ++k;
    } else {
      out += ",,,,";
    }
    out += "\n";
  }
  return out;
}

std::string sample_csv(const StationarySample& s) {
  const Json meta{{"seed", s.meta.seed},
                  {"p", s.meta.p},
                  {"law", s.meta.law},
                  {"law_digest", hex64(s.meta.law_digest)},
                  {"policy", s.meta.policy},
                  {"n", s.values.size()},
                  {"n_cycles", s.n_cycles},
                  {"effective_n", s.effective_n}};
  std::string out = "# " + meta.dump() + "\nw\n";
  out.reserve(out.size() + s.values.size() * 24);
  for (double v : s.values) {
    out += num(v);
    out += '\n';
  }
  return out;
}

std::string write_file(const std::string& dir, const std::string& name, const std::string& content) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir + ": " + ec.message());
  const fs::path path = fs::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << content;
  f.close();
  if (!f) throw IoError("failed writing " + path.string());
  return path.string();
}

}  // namespace rsl::cli
