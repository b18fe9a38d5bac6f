#include <pybind11/eigen.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "relaylab/analytics.hpp"
#include "relaylab/channel.hpp"
#include "relaylab/linksim.hpp"
#include "relaylab/model_core.hpp"

namespace py = pybind11;
using namespace relaylab;

namespace {

ScalingExponents exps_from(const std::string& rk, const std::string& rp, const std::string& rq,
                           const std::string& rc, double k0, double p0, double q0, double c0) {
    return ScalingExponents{parse_rational(rk), parse_rational(rp), parse_rational(rq),
                            parse_rational(rc), k0, p0, q0, c0};
}

py::array_t<double> as_array(const std::vector<double>& v) {
    py::array_t<double> a(py::ssize_t(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

}  // namespace

PYBIND11_MODULE(_relaylab, m) {
    m.doc() = "Multi-pair massive-MIMO MRC/MRT relay link laboratory";

    py::class_<NetworkParams>(m, "NetworkParams")
        .def_readonly("M", &NetworkParams::M)
        .def_readonly("K", &NetworkParams::K)
        .def_readonly("P", &NetworkParams::P)
        .def_readonly("Q", &NetworkParams::Q)
        .def_readonly("tau", &NetworkParams::tau)
        .def_readonly("P_t", &NetworkParams::P_t)
        .def_readonly("P_c", &NetworkParams::P_c)
        .def("__repr__", [](const NetworkParams& p) {
            return "NetworkParams(M=" + std::to_string(p.M) + ", K=" + std::to_string(p.K) +
                   ", P=" + std::to_string(p.P) + ", Q=" + std::to_string(p.Q) +
                   ", P_c=" + std::to_string(p.P_c) + ")";
        });

    m.def("csi_quality", &csi_quality, py::arg("tau"), py::arg("P_t"));
    m.def("make_params", &make_params_from_quality, py::arg("M"), py::arg("K"), py::arg("P"),
          py::arg("Q"), py::arg("P_c"));
    m.def("make_params_training", &make_params, py::arg("M"), py::arg("K"), py::arg("P"),
          py::arg("Q"), py::arg("tau"), py::arg("P_t"));

    m.def(
        "scaling_report",
        [](const std::string& rk, const std::string& rp, const std::string& rq,
           const std::string& rc, double k0, double p0, double q0, double c0) {
            const auto e = exps_from(rk, rp, rq, rc, k0, p0, q0, c0);
            const SinrScaleReport r = scaling_exponent(e);
            py::dict d;
            d["r_s"] = to_string(r.r_s);
            d["r_s_float"] = boost::rational_cast<double>(r.r_s);
            d["favourable"] = r.favourable;
            d["deterministic_sufficient"] = r.deterministic_sufficient;
            d["linear_regime"] = r.linear_regime;
            d["binding_term"] = r.binding_term == BindingTerm::source_power
                                    ? "source-power"
                                    : "relay-per-user-power";
            return d;
        },
        py::arg("r_k") = "0", py::arg("r_p") = "0", py::arg("r_q") = "0", py::arg("r_c") = "0",
        py::arg("k0") = 1.0, py::arg("p0") = 1.0, py::arg("q0") = 1.0, py::arg("c0") = 1.0);

    m.def(
        "realize_parameters",
        [](const std::string& rk, const std::string& rp, const std::string& rq,
           const std::string& rc, double k0, double p0, double q0, double c0, int M) {
            return realize_parameters(exps_from(rk, rp, rq, rc, k0, p0, q0, c0), M);
        },
        py::arg("r_k"), py::arg("r_p"), py::arg("r_q"), py::arg("r_c"), py::arg("k0"),
        py::arg("p0"), py::arg("q0"), py::arg("c0"), py::arg("M"));

    m.def(
        "draw_channels",
        [](int M, int K, std::uint64_t seed, std::uint64_t trial) {
            const ChannelRealization ch = draw_channels(M, K, {seed, trial});
            return py::make_tuple(ch.F, ch.G);
        },
        py::arg("M"), py::arg("K"), py::arg("seed"), py::arg("trial") = 0);

    m.def(
        "mmse_estimate_direct",
        [](int M, int K, double P_c, std::uint64_t seed, std::uint64_t trial) {
            const EstimatedChannel est = mmse_estimate_direct(M, K, P_c, {seed, trial});
            py::dict d;
            d["F_hat"] = est.F_hat;
            d["G_hat"] = est.G_hat;
            d["E_f"] = est.E_f;
            d["E_g"] = est.E_g;
            d["P_c"] = est.P_c;
            return d;
        },
        py::arg("M"), py::arg("K"), py::arg("P_c"), py::arg("seed"), py::arg("trial") = 0);

    m.def(
        "simulate",
        [](const NetworkParams& p, std::size_t trials, std::uint64_t seed, int threads,
           bool average_all_users, bool pilot) {
            SimulateOptions opt;
            opt.threads = threads;
            opt.average_all_users = average_all_users;
            opt.path = pilot ? EstimationPath::pilot : EstimationPath::direct;
            const SampleSet s = simulate(p, trials, seed, opt);
            py::dict d;
            d["P_se"] = as_array(s.p_se);
            d["P_ie"] = as_array(s.p_ie);
            d["P_ne"] = as_array(s.p_ne);
            d["P_e1"] = as_array(s.p_e1);
            d["P_e2"] = as_array(s.p_e2);
            d["P_e3"] = as_array(s.p_e3);
            d["sinr"] = as_array(s.sinr);
            d["denominator"] = as_array(s.denominator());
            return d;
        },
        py::arg("params"), py::arg("trials"), py::arg("seed"), py::arg("threads") = 1,
        py::arg("average_all_users") = false, py::arg("pilot") = false);

    m.def("amplification_factor_sq", &amplification_factor_sq);
    m.def("relay_denominator_term", &relay_denominator_term);

    m.def("component_moments", [](const NetworkParams& p) {
        const ComponentMoments c = component_moments(p);
        py::dict d;
        d["mean"] = py::dict(py::arg("P_se") = c.mean_se, py::arg("P_ie") = c.mean_ie,
                             py::arg("P_ne") = c.mean_ne, py::arg("P_e1") = c.mean_e1,
                             py::arg("P_e2") = c.mean_e2, py::arg("P_e3") = c.mean_e3);
        d["scv"] = py::dict(py::arg("P_se") = c.scv_se, py::arg("P_ie") = c.scv_ie,
                            py::arg("P_ne") = c.scv_ne, py::arg("P_e1") = c.scv_e1,
                            py::arg("P_e2") = c.scv_e2, py::arg("P_e3") = c.scv_e3);
        d["small_m_warning"] = c.small_m_warning;
        return d;
    });

    m.def("rate_lower_bound", [](const NetworkParams& p) {
        const RateBound rb = rate_lower_bound(p);
        return py::make_tuple(rb.tilde_sinr, rb.c_lb);
    });

    m.def("linear_regime_sinr", &linear_regime_sinr, py::arg("p_ie"), py::arg("params"));
    m.def("xi_term", &xi_term);

    m.def(
        "gamma_mix_params",
        [](const NetworkParams& p, bool simplified) {
            const GammaMixParams g = gamma_mix_params(p, simplified);
            py::dict d;
            d["rho_e"] = g.rho_e;
            d["b_e"] = g.b_e;
            d["c_e"] = g.c_e;
            d["d_e"] = g.d_e;
            return d;
        },
        py::arg("params"), py::arg("simplified") = false);

    m.def(
        "interference_pdf",
        [](py::array_t<double> y, const NetworkParams& p, const std::string& form) {
            const GammaMixParams g = gamma_mix_params(p);
            const PdfForm f = form == "series" ? PdfForm::series : PdfForm::closed;
            py::array_t<double> out(y.size());
            auto yin = y.unchecked<1>();
            auto o = out.mutable_unchecked<1>();
            for (py::ssize_t i = 0; i < yin.shape(0); ++i)
                o(i) = interference_pdf(yin(i), g, f);
            return out;
        },
        py::arg("y"), py::arg("params"), py::arg("form") = "closed");

    m.def(
        "sinr_pdf",
        [](py::array_t<double> r, const NetworkParams& p) {
            py::array_t<double> out(r.size());
            auto rin = r.unchecked<1>();
            auto o = out.mutable_unchecked<1>();
            for (py::ssize_t i = 0; i < rin.shape(0); ++i) o(i) = sinr_pdf(rin(i), p);
            return out;
        },
        py::arg("r"), py::arg("params"));

    m.def(
        "outage_probability",
        [](double gamma_th, const NetworkParams& p, const std::string& form) {
            const Probability pr = outage_probability(
                gamma_th, p, form == "high_snr" ? OutageForm::high_snr : OutageForm::exact);
            py::dict d;
            d["value"] = pr.value;
            d["log_value"] = pr.log_value;
            d["clamped"] = pr.clamped;
            return d;
        },
        py::arg("gamma_th"), py::arg("params"), py::arg("form") = "exact");

    m.def(
        "aber",
        [](const NetworkParams& p, double A, double B) {
            const AberResult a = aber(p, A, B);
            py::dict d;
            d["value"] = a.value;
            d["log_value"] = a.log_value;
            d["valid"] = a.valid;
            d["bridge_gamma_th"] = a.bridge_gamma_th;
            return d;
        },
        py::arg("params"), py::arg("A") = 0.5, py::arg("B") = 1.0);

    m.def("upper_incomplete_gamma", &upper_incomplete_gamma, py::arg("s"), py::arg("x"));
    m.def("erfc", &relaylab::erfc, py::arg("x"));
}
