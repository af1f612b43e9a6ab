#include "efb/specio.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>

namespace efb {

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open spec file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
  return j;
}

void check_keys(const json& obj, const std::vector<std::string>& allowed,
                const std::string& context) {
  if (!obj.is_object()) throw ConfigError(context + ": expected a JSON object");
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const auto& k : allowed)
      if (it.key() == k) {
        ok = true;
        break;
      }
    if (!ok) throw ConfigError(context + ": unknown field '" + it.key() + "'");
  }
}

FamilyModel parse_family(const json& j) {
  check_keys(j, {"kind", "atoms"}, "family");
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "bernoulli") return FamilyModel::bernoulli();
  if (kind == "gaussian") return FamilyModel::gaussian_mean_var();
  if (kind == "discrete") {
    if (!j.contains("atoms")) throw ConfigError("discrete family needs 'atoms'");
    return FamilyModel::discrete(j.at("atoms").get<std::vector<double>>());
  }
  throw ConfigError("unknown family kind: " + kind);
}

NaturalParam parse_theta(const json& j, int K) {
  auto v = j.get<std::vector<double>>();
  if (static_cast<int>(v.size()) != K) throw ConfigError("theta has wrong dimension");
  return NaturalParam{std::move(v)};
}

ParamRegion parse_region(const FamilyModel& m, const json& j) {
  check_keys(j, {"box", "rho", "grid_points_per_axis"}, "region");
  const json& b = j.at("box");
  RegionBox box;
  switch (m.kind) {
    case FamilyKind::Bernoulli: {
      check_keys(b, {"mean"}, "region.box");
      const auto r = b.at("mean").get<std::vector<double>>();
      if (r.size() != 2) throw ConfigError("mean range needs [lo, hi]");
      box.mean_lo = r[0];
      box.mean_hi = r[1];
      break;
    }
    case FamilyKind::GaussianMeanVar: {
      check_keys(b, {"mean", "variance"}, "region.box");
      const auto mr = b.at("mean").get<std::vector<double>>();
      const auto vr = b.at("variance").get<std::vector<double>>();
      if (mr.size() != 2 || vr.size() != 2) throw ConfigError("ranges need [lo, hi]");
      box.mean_lo = mr[0];
      box.mean_hi = mr[1];
      box.var_lo = vr[0];
      box.var_hi = vr[1];
      break;
    }
    case FamilyKind::DiscreteAtoms: {
      check_keys(b, {"prob"}, "region.box");
      const auto pr = b.at("prob").get<std::vector<std::vector<double>>>();
      if (static_cast<int>(pr.size()) != m.K) throw ConfigError("prob box needs K ranges");
      for (const auto& r : pr) {
        if (r.size() != 2) throw ConfigError("ranges need [lo, hi]");
        box.prob_lo.push_back(r[0]);
        box.prob_hi.push_back(r[1]);
      }
      break;
    }
  }
  const double rho = j.at("rho").get<double>();
  const int gp = j.value("grid_points_per_axis", 101);
  return region_curvature(m, box, rho, gp);
}

BanditInstance parse_instance(const json& j) {
  check_keys(j, {"arms"}, "instance");
  std::vector<std::pair<FamilyModel, NaturalParam>> arms;
  for (const auto& a : j.at("arms")) {
    check_keys(a, {"family", "theta", "mean"}, "instance.arms[]");
    FamilyModel m = parse_family(a.at("family"));
    if (a.contains("theta")) {
      arms.emplace_back(m, parse_theta(a.at("theta"), m.K));
    } else if (a.contains("mean") && m.kind == FamilyKind::Bernoulli) {
      arms.emplace_back(m, NaturalParam{{bernoulli_theta(a.at("mean").get<double>())}});
    } else {
      throw ConfigError("arm needs 'theta' (or 'mean' for bernoulli)");
    }
  }
  return make_instance(std::move(arms));
}

std::string format_real(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string hash_hex(const json& j) {
  const std::string s = j.dump();
  uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

}  // namespace efb
