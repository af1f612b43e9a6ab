// pybind11 bindings for the main operations.
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "efb/bandit.hpp"
#include "efb/bounds.hpp"
#include "efb/kinf.hpp"
#include "efb/mcverify.hpp"

namespace py = pybind11;
using namespace efb;

namespace {

FamilyModel family_of(const std::string& kind, const std::vector<double>& atoms) {
  if (kind == "bernoulli") return FamilyModel::bernoulli();
  if (kind == "gaussian") return FamilyModel::gaussian_mean_var();
  if (kind == "discrete") return FamilyModel::discrete(atoms);
  throw ConfigError("unknown family kind: " + kind);
}

ParamRegion region_of(const FamilyModel& m, const py::dict& box, double rho, int grid) {
  RegionBox rb;
  switch (m.kind) {
    case FamilyKind::Bernoulli: {
      const auto r = box["mean"].cast<std::vector<double>>();
      rb.mean_lo = r[0];
      rb.mean_hi = r[1];
      break;
    }
    case FamilyKind::GaussianMeanVar: {
      const auto mr = box["mean"].cast<std::vector<double>>();
      const auto vr = box["variance"].cast<std::vector<double>>();
      rb.mean_lo = mr[0];
      rb.mean_hi = mr[1];
      rb.var_lo = vr[0];
      rb.var_hi = vr[1];
      break;
    }
    case FamilyKind::DiscreteAtoms: {
      for (const auto& r : box["prob"].cast<std::vector<std::vector<double>>>()) {
        rb.prob_lo.push_back(r[0]);
        rb.prob_hi.push_back(r[1]);
      }
      break;
    }
  }
  return region_curvature(m, rb, rho, grid);
}

}  // namespace

PYBIND11_MODULE(_efbounds, mod) {
  mod.doc() = "exponential-family geometry, Kinf, boundary-crossing bounds, KL-UCB";

  py::register_exception<DomainError>(mod, "DomainError");
  py::register_exception<BoundaryError>(mod, "BoundaryError");
  py::register_exception<InversionError>(mod, "InversionError");
  py::register_exception<RegionError>(mod, "RegionError");
  py::register_exception<UnreachableMean>(mod, "UnreachableMean");
  py::register_exception<ValidityError>(mod, "ValidityError");
  py::register_exception<ConfigError>(mod, "ConfigError");

  py::class_<FamilyModel>(mod, "FamilyModel")
      .def(py::init([](const std::string& kind, const std::vector<double>& atoms) {
             return family_of(kind, atoms);
           }),
           py::arg("kind"), py::arg("atoms") = std::vector<double>{})
      .def_readonly("K", &FamilyModel::K)
      .def_readonly("atoms", &FamilyModel::atoms)
      .def("mu_plus", &FamilyModel::mu_plus);

  py::class_<ParamRegion>(mod, "ParamRegion")
      .def_readonly("rho", &ParamRegion::rho)
      .def_readonly("v_rho", &ParamRegion::v_rho)
      .def_readonly("V_rho", &ParamRegion::V_rho)
      .def_readonly("theta_lo", &ParamRegion::theta_lo)
      .def_readonly("theta_hi", &ParamRegion::theta_hi)
      .def("contains",
           [](const ParamRegion& r, const std::vector<double>& th) {
             return r.contains(NaturalParam{th});
           });

  mod.def("region_curvature", &region_of, py::arg("family"), py::arg("box"), py::arg("rho"),
          py::arg("grid_points_per_axis") = 101);

  mod.def("log_partition", [](const FamilyModel& m, const std::vector<double>& th) {
    return log_partition(m, NaturalParam{th});
  });
  mod.def("grad_log_partition", [](const FamilyModel& m, const std::vector<double>& th) {
    return grad_log_partition(m, NaturalParam{th}).f_mean;
  });
  mod.def("hessian_log_partition", [](const FamilyModel& m, const std::vector<double>& th) {
    return hessian_log_partition(m, NaturalParam{th});
  });
  mod.def("bregman",
          [](const FamilyModel& m, const std::vector<double>& a, const std::vector<double>& b) {
            return bregman(m, NaturalParam{a}, NaturalParam{b});
          });
  mod.def("fenchel_dual",
          [](const FamilyModel& m, const std::vector<double>& ts, const std::vector<double>& f) {
            return fenchel_dual(m, NaturalParam{ts}, MeanParam{f});
          });
  mod.def("mean_to_natural", [](const FamilyModel& m, const std::vector<double>& f) {
    return mean_to_natural(m, MeanParam{f}).theta;
  });
  mod.def("mean_of", [](const FamilyModel& m, const std::vector<double>& th) {
    return mean_of(m, NaturalParam{th});
  });
  mod.def("sample_sufficient_stats",
          [](const FamilyModel& m, const std::vector<double>& th, std::size_t n, uint64_t seed) {
            std::vector<std::vector<double>> out;
            for (auto& s : sample_sufficient_stats(m, NaturalParam{th}, n, seed))
              out.push_back(std::move(s.f_mean));
            return out;
          });
  mod.def("bernoulli_theta", &bernoulli_theta);
  mod.def("kl_bernoulli", &kl_bernoulli);
  mod.def("kl_gaussian", &kl_gaussian);

  py::class_<KinfResult>(mod, "KinfResult")
      .def_readonly("value", &KinfResult::value)
      .def_readonly("lambda_", &KinfResult::lambda)
      .def_readonly("active", &KinfResult::active)
      .def_property_readonly("minimizer",
                             [](const KinfResult& r) { return r.minimizer.theta; });
  mod.def("kinf", [](const FamilyModel& m, const std::vector<double>& th, double mu) {
    return kinf(m, NaturalParam{th}, mu);
  });
  mod.def("kinf_discrete_dual", &kinf_discrete_dual);
  mod.def("kkt_residual", [](const FamilyModel& m, const std::vector<double>& th,
                             const std::vector<double>& th2, double lambda, double mu) {
    return kkt_residual(m, NaturalParam{th}, NaturalParam{th2}, lambda, mu);
  });

  mod.def("threshold_f", &threshold_f);
  mod.def("omega", &omega);
  mod.def("cone_cover_count", [](int K, double p, double eta) {
    return cone_cover(K, p, eta).count;
  });
  mod.def("constant_bigC", &constant_bigC);
  mod.def("bigC_bernoulli_remark", &bigC_bernoulli_remark);
  mod.def("rho_epsilon", [](const FamilyModel& m, const std::vector<double>& ts, double eps) {
    return rho_epsilon(m, NaturalParam{ts}, eps);
  });
  mod.def("t_chi_exact", &t_chi_exact);
  mod.def("t_chi_closed_form", &t_chi_closed_form);
  mod.def("prior_bound_cgmms", &prior_bound_cgmms);
  mod.def("dim1_maximal_bound", &dim1_maximal_bound);
  mod.def("sanov_bound", [](const FamilyModel& m, const std::vector<double>& th, double mu,
                            double t) { return sanov_bound(m, NaturalParam{th}, mu, t); });

  py::class_<BoundConfig>(mod, "BoundConfig")
      .def_readonly("rho_eps", &BoundConfig::rho_eps)
      .def_readonly("alpha", &BoundConfig::alpha)
      .def_readonly("chi_unit", &BoundConfig::chi_unit)
      .def_readonly("chi_eps", &BoundConfig::chi_eps)
      .def_readonly("cover_count", &BoundConfig::cover_count)
      .def_readonly("big_C", &BoundConfig::big_C)
      .def_readonly("big_C4", &BoundConfig::big_C4);
  mod.def("make_bound_config",
          [](const FamilyModel& m, const ParamRegion& region, const std::vector<double>& ts,
             double eps, double b, double p, double q, double eta, double xi) {
            return make_bound_config(m, region, NaturalParam{ts}, eps, b, p, q, eta, xi);
          },
          py::arg("family"), py::arg("region"), py::arg("theta_star"), py::arg("epsilon"),
          py::arg("b") = 4.0, py::arg("p") = 0.5, py::arg("q") = 1.0, py::arg("eta") = 0.5,
          py::arg("xi") = 0.0);
  mod.def("theorem_main_bound", [](double t, const BoundConfig& cfg, const std::string& variant) {
    return theorem_main_bound(
        t, cfg, variant == "f_of_t_over_n" ? BoundVariant::f_of_t_over_n : BoundVariant::f_of_t);
  });
  mod.def("cor1_bound", &cor1_bound);
  mod.def("cor2_bound", [](double t, const BoundConfig& cfg) {
    const auto r = cor2_bound(t, cfg);
    const char* w = r.window == Cor2Window::below_range ? "below_range"
                    : r.window == Cor2Window::mid_range ? "mid_range"
                                                        : "high_range";
    return py::make_tuple(r.value, w);
  });

  py::class_<BanditInstance>(mod, "BanditInstance")
      .def_readonly("means", &BanditInstance::means)
      .def_readonly("gaps", &BanditInstance::gaps)
      .def_readonly("mu_star", &BanditInstance::mu_star)
      .def_readonly("best_arm", &BanditInstance::best_arm);
  mod.def("make_instance",
          [](const std::vector<std::pair<FamilyModel, std::vector<double>>>& arms) {
            std::vector<std::pair<FamilyModel, NaturalParam>> a;
            for (const auto& [m, th] : arms) a.emplace_back(m, NaturalParam{th});
            return make_instance(std::move(a));
          });
  py::class_<EpisodeRecord>(mod, "EpisodeRecord")
      .def_readonly("T", &EpisodeRecord::T)
      .def_readonly("pulls", &EpisodeRecord::pulls)
      .def_readonly("checkpoints", &EpisodeRecord::checkpoints)
      .def_readonly("regret_at", &EpisodeRecord::regret_at)
      .def_readonly("crossings_at", &EpisodeRecord::crossings_at)
      .def_readonly("final_regret", &EpisodeRecord::final_regret);
  mod.def("ucb_index", [](const FamilyModel& m, const std::vector<double>& emp, uint64_t n,
                          double budget) { return ucb_index(m, MeanParam{emp}, n, budget); });
  mod.def("run_episode",
          [](const BanditInstance& inst, const std::string& strategy, double xi, int T,
             uint64_t seed, uint64_t stream, double epsilon) {
            return run_episode(inst,
                               strategy == "klucb+" ? Strategy::KLUCBplus : Strategy::KLUCB, xi,
                               T, seed, stream, epsilon);
          },
          py::arg("instance"), py::arg("strategy"), py::arg("xi"), py::arg("T"), py::arg("seed"),
          py::arg("stream") = 0, py::arg("epsilon") = -1.0);
  mod.def("pseudo_regret", &pseudo_regret);

  py::class_<CrossingEstimate>(mod, "CrossingEstimate")
      .def_readonly("p_hat", &CrossingEstimate::p_hat)
      .def_readonly("ci_low", &CrossingEstimate::ci_low)
      .def_readonly("ci_high", &CrossingEstimate::ci_high)
      .def_readonly("n_runs", &CrossingEstimate::n_runs)
      .def_property_readonly("exact", [](const CrossingEstimate& e) -> py::object {
        if (e.exact) return py::float_(*e.exact);
        return py::none();
      });
  mod.def("estimate_crossing",
          [](const FamilyModel& m, const std::vector<double>& theta_star, double epsilon,
             const ParamRegion& region, int t, double xi, const std::string& variant,
             bool restrict_to_region, uint64_t n_runs, uint64_t seed, int threads) {
            CrossingSpec spec;
            spec.model = m;
            spec.theta_star = NaturalParam{theta_star};
            spec.epsilon = epsilon;
            spec.region = region;
            spec.t = t;
            spec.xi = xi;
            spec.variant =
                variant == "f_of_t_over_n" ? BoundVariant::f_of_t_over_n : BoundVariant::f_of_t;
            spec.restrict_to_region = restrict_to_region;
            return estimate_crossing(spec, n_runs, seed, threads);
          },
          py::arg("family"), py::arg("theta_star"), py::arg("epsilon"), py::arg("region"),
          py::arg("t"), py::arg("xi") = 0.0, py::arg("variant") = "f_of_t",
          py::arg("restrict_to_region") = true, py::arg("n_runs") = 10000, py::arg("seed") = 0,
          py::arg("threads") = 1);
  mod.def("exact_crossing_bernoulli",
          [](const FamilyModel& m, const std::vector<double>& theta_star, double epsilon,
             const ParamRegion& region, int t, double xi, const std::string& variant,
             bool restrict_to_region, bool strict_union) {
            CrossingSpec spec;
            spec.model = m;
            spec.theta_star = NaturalParam{theta_star};
            spec.epsilon = epsilon;
            spec.region = region;
            spec.t = t;
            spec.xi = xi;
            spec.variant =
                variant == "f_of_t_over_n" ? BoundVariant::f_of_t_over_n : BoundVariant::f_of_t;
            spec.restrict_to_region = restrict_to_region;
            return exact_crossing_bernoulli(spec, strict_union);
          },
          py::arg("family"), py::arg("theta_star"), py::arg("epsilon"), py::arg("region"),
          py::arg("t"), py::arg("xi") = 0.0, py::arg("variant") = "f_of_t",
          py::arg("restrict_to_region") = true, py::arg("strict_union") = false);
}
