// Copyright 2026 The OptiVote Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "optivote/channel.hpp"
#include "optivote/config.hpp"
#include "optivote/errors.hpp"
#include "optivote/montecarlo.hpp"
#include "optivote/orchestrator.hpp"
#include "optivote/phy.hpp"
#include "optivote/power.hpp"
#include "optivote/theory.hpp"

namespace py = pybind11;
using nlohmann::json;

namespace {

// Plain dict/list values cross the boundary as JSON text.
json from_py(const py::object& o) {
  return json::parse(py::module_::import("json").attr("dumps")(o).cast<std::string>());
}

py::object to_py(const json& j) { return py::module_::import("json").attr("loads")(j.dump()); }

optivote::Config config_of(const py::object& cfg) {
  return cfg.is_none() ? optivote::Config{} : optivote::config_from_json(from_py(cfg));
}

std::vector<optivote::ChannelDraw> draws_of(const std::vector<double>& intensities) {
  std::vector<optivote::ChannelDraw> d(intensities.size());
  for (std::size_t k = 0; k < d.size(); ++k) {
    d[k].h_l = intensities[k];
    d[k].h_p = 1.0;
    d[k].intensity = intensities[k];
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  namespace ov = optivote;
  m.doc() = "Sign-based over-the-air federated learning on optical links";
  m.attr("__version__") = "0.1.0";

  py::register_exception<ov::ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<ov::NumericError>(m, "NumericError", PyExc_ArithmeticError);
  py::register_exception<ov::UsageError>(m, "UsageError", PyExc_ValueError);

  py::class_<ov::ChannelParams>(m, "ChannelParams")
      .def(py::init([](double d_min, double d_max, double lambda_opt, double a0, double xi_p,
                       double sigma_n2, std::optional<double> c_fspl) {
             ov::ChannelParams p{d_min, d_max, lambda_opt, a0, xi_p, sigma_n2, c_fspl};
             p.validate(true);
             return p;
           }),
           py::arg("d_min") = 500e3, py::arg("d_max") = 2000e3, py::arg("lambda_opt") = 1550e-9,
           py::arg("a0") = 0.9, py::arg("xi_p") = 1.5, py::arg("sigma_n2") = 0.1,
           py::arg("c_fspl") = py::none())
      .def_readwrite("d_min", &ov::ChannelParams::d_min)
      .def_readwrite("d_max", &ov::ChannelParams::d_max)
      .def_readwrite("lambda_opt", &ov::ChannelParams::lambda_opt)
      .def_readwrite("a0", &ov::ChannelParams::a0)
      .def_readwrite("xi_p", &ov::ChannelParams::xi_p)
      .def_readwrite("sigma_n2", &ov::ChannelParams::sigma_n2)
      .def_readwrite("c_fspl_override", &ov::ChannelParams::c_fspl_override)
      .def_property_readonly("c_fspl", &ov::ChannelParams::c_fspl);

  m.def("lambda_eff", &ov::lambda_eff, py::arg("params"));
  m.def("lambda_oracle", &ov::lambda_oracle, py::arg("params"));

  m.def("superpose",
        [](const std::vector<int>& signs, const std::vector<double>& powers,
           const std::vector<double>& intensities, double sigma_n2, std::uint64_t seed) {
          ov::SignVector s(signs.begin(), signs.end());
          ov::RandomStream rng(seed);
          const auto e = ov::superpose(s, powers, draws_of(intensities), sigma_n2, rng);
          return py::make_tuple(e.e_plus, e.e_minus);
        },
        py::arg("signs"), py::arg("powers"), py::arg("intensities"), py::arg("sigma_n2") = 0.0,
        py::arg("seed") = 1, "Slot energies (e_plus, e_minus) of one coordinate.");
  m.def("detect_mv",
        [](const std::vector<double>& deltas) {
          std::vector<ov::SlotEnergyPair> pairs(deltas.size());
          for (std::size_t i = 0; i < deltas.size(); ++i) pairs[i] = {deltas[i], 0.0};
          const auto v = ov::detect_mv(pairs);
          return std::vector<int>(v.begin(), v.end());
        },
        py::arg("deltas"));
  m.def("ideal_majority",
        [](const std::vector<std::vector<int>>& nodes) {
          std::vector<ov::SignVector> s;
          for (const auto& n : nodes) s.emplace_back(n.begin(), n.end());
          const auto v = ov::ideal_majority(s);
          return std::vector<int>(v.begin(), v.end());
        },
        py::arg("node_signs"));

  m.def("consistency_score",
        [](const std::vector<int>& local, const std::vector<int>& prev) {
          const ov::SignVector a(local.begin(), local.end()), b(prev.begin(), prev.end());
          return ov::consistency_score(a, b);
        },
        py::arg("local_signs"), py::arg("mv_prev"));
  m.def("update_powers",
        [](std::vector<double> p, std::vector<double> a, double p_avg, double p_min, double p_max,
           double rho) {
          ov::PowerParams pp{p_avg, p_min, p_max, rho};
          pp.validate();
          const auto u = ov::update_powers(ov::PowerState{std::move(p), std::move(a)}, pp);
          return u.next.p;
        },
        py::arg("p"), py::arg("a"), py::arg("p_avg") = 1.0, py::arg("p_min") = 0.1,
        py::arg("p_max") = 2.0, py::arg("rho") = 0.05);

  m.def("theta", &ov::theory::theta, py::arg("p_avg"), py::arg("lam"), py::arg("c_r") = 1.0,
        py::arg("e_s") = 1.0);
  m.def("energy_means",
        [](double mp, double mm, double th, double s2) {
          const auto e = ov::theory::energy_means(mp, mm, th, s2);
          return py::make_tuple(e.plus, e.minus);
        },
        py::arg("m_plus"), py::arg("m_minus"), py::arg("theta"), py::arg("sigma_n2"));
  m.def("xi_snr", &ov::theory::xi_snr, py::arg("theta"), py::arg("sigma_n2"));
  m.def("error_bound", &ov::theory::error_bound, py::arg("M"), py::arg("xi"), py::arg("q"));
  m.def("q_bound", &ov::theory::q_bound, py::arg("g_abs"), py::arg("alpha"), py::arg("d_b"));
  m.def("error_bound_full", &ov::theory::error_bound_full, py::arg("M"), py::arg("xi"),
        py::arg("g_abs"), py::arg("alpha"), py::arg("d_b"));
  m.def("convergence_bound",
        [](double M, double xi, double l1, double gap, std::vector<double> alpha, long long gamma,
           long long N) {
          ov::theory::ConvergenceInputs in;
          in.M = M;
          in.xi = xi;
          in.l1_smoothness = l1;
          in.initial_gap = gap;
          in.alpha = std::move(alpha);
          in.gamma = gamma;
          in.N = N;
          return ov::theory::convergence_bound(in);
        },
        py::arg("M"), py::arg("xi"), py::arg("l1_smoothness"), py::arg("initial_gap"),
        py::arg("alpha"), py::arg("gamma"), py::arg("N"));

  m.def("config_defaults", []() { return to_py(ov::to_json(ov::Config{})); },
        "Fully resolved default configuration as a dict.");
  m.def("run",
        [](const py::object& cfg, std::size_t threads) {
          const ov::Config c = config_of(cfg);
          ov::RunOptions o;
          o.threads = threads;
          ov::RunSummary s;
          {
            py::gil_scoped_release release;
            s = ov::run(c, o);
          }
          return to_py(ov::summary_to_json(s));
        },
        py::arg("config") = py::none(), py::arg("threads") = 1,
        "Runs a simulation; `config` is a (partial) config dict.");
  m.def("verify",
        [](std::size_t samples, std::uint64_t seed, std::size_t threads) {
          ov::mc::SuiteOptions so;
          so.samples = samples;
          so.mc.seed = seed;
          so.mc.threads = threads;
          so.channel = ov::Config{}.channel.params();
          std::vector<ov::mc::McReport> reports;
          {
            py::gil_scoped_release release;
            reports = ov::mc::run_suite(so);
          }
          return to_py(ov::mc::to_json(reports));
        },
        py::arg("samples") = 100000, py::arg("seed") = 1, py::arg("threads") = 1);
}
