#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ccpxva/margining.hpp"
#include "ccpxva/netgen.hpp"
#include "ccpxva/network.hpp"
#include "ccpxva/porting.hpp"
#include "ccpxva/simulation.hpp"
#include "ccpxva/stress.hpp"
#include "ccpxva/xva.hpp"

namespace py = pybind11;
using namespace ccpxva;

PYBIND11_MODULE(_ccpxva, m) {
    m.doc() = "Clearing-network XVA engine";

    py::class_<ClearingNetwork>(m, "ClearingNetwork")
        .def_property_readonly("n_members",
                               [](const ClearingNetwork& n) { return n.members.size(); })
        .def_property_readonly("n_ccps",
                               [](const ClearingNetwork& n) { return n.ccps.size(); })
        .def("member_ids", [](const ClearingNetwork& n) {
            std::vector<int> ids;
            for (const auto& mm : n.members) ids.push_back(mm.id);
            return ids;
        });

    py::class_<CopulaParams>(m, "CopulaParams")
        .def(py::init<>())
        .def_readwrite("rho_cr", &CopulaParams::rho_cr)
        .def_readwrite("rho_mkt", &CopulaParams::rho_mkt)
        .def_readwrite("rho_wwr", &CopulaParams::rho_wwr)
        .def_readwrite("nu", &CopulaParams::nu);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("n_paths", &SimConfig::n_paths)
        .def_readwrite("n_batches", &SimConfig::n_batches)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("copula", &SimConfig::copula)
        .def_readwrite("threads", &SimConfig::threads)
        .def_readwrite("keep_losses", &SimConfig::keep_losses);

    py::class_<XvaBreakdown>(m, "XvaBreakdown")
        .def_readonly("member_id", &XvaBreakdown::member_id)
        .def_readonly("ccva", &XvaBreakdown::ccva)
        .def_readonly("cmva", &XvaBreakdown::cmva)
        .def_readonly("bcva", &XvaBreakdown::bcva)
        .def_readonly("bmva", &XvaBreakdown::bmva)
        .def_readonly("fva", &XvaBreakdown::fva)
        .def_readonly("ec", &XvaBreakdown::ec)
        .def_readonly("kva", &XvaBreakdown::kva)
        .def_readonly("ca", &XvaBreakdown::ca)
        .def_readonly("ftp", &XvaBreakdown::ftp)
        .def_readonly("ccva_std_err", &XvaBreakdown::ccva_std_err)
        .def_readonly("ec_std_err", &XvaBreakdown::ec_std_err)
        .def_readonly("n_paths_surviving", &XvaBreakdown::n_paths_surviving);

    py::class_<EngineResult>(m, "EngineResult")
        .def_readonly("breakdowns", &EngineResult::breakdowns)
        .def("losses_for", [](const EngineResult& r, const ClearingNetwork& net, int member_id) {
            const int idx = net.member_index(member_id);
            if (idx < 0 || r.losses.empty()) throw py::value_error("no losses for member");
            return r.losses[idx].losses;
        });

    py::class_<QuantileReportRow>(m, "QuantileReportRow")
        .def_readonly("q", &QuantileReportRow::q)
        .def_readonly("ci_lo", &QuantileReportRow::ci_lo)
        .def_readonly("ci_hi", &QuantileReportRow::ci_hi)
        .def_readonly("p", &QuantileReportRow::p)
        .def_readonly("n_paths", &QuantileReportRow::n_paths);

    py::class_<FtpQuote>(m, "FtpQuote")
        .def_readonly("assignment", &FtpQuote::assignment)
        .def_readonly("delta_cmva", &FtpQuote::delta_cmva)
        .def_readonly("delta_ccva", &FtpQuote::delta_ccva)
        .def_readonly("delta_kva", &FtpQuote::delta_kva)
        .def_readonly("ftp_total", &FtpQuote::ftp_total);

    m.def("load_network", &load_network, py::arg("path"));
    m.def("save_network", &save_network, py::arg("network"), py::arg("path"));
    m.def("demo_network", &single_ccp_demo_network);
    m.def("two_ccp_network", [] { return build_two_ccp_network(TwoCcpSpec{}); });
    m.def("validate", [](const ClearingNetwork& net) {
        std::vector<std::string> out;
        for (const auto& v : validate_network(net)) out.push_back(v.what);
        return out;
    });
    m.def("run_engine", &run_engine, py::arg("network"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def(
        "extreme_quantile",
        [](std::vector<double> losses, double p) { return extreme_quantile(std::move(losses), p); },
        py::arg("losses"), py::arg("p"));
    m.def("optimize_porting",
          [](const ClearingNetwork& net, const std::set<int>& defaulted, const SimConfig& cfg) {
              return optimize_porting(net, defaulted, cfg);
          },
          py::arg("network"), py::arg("defaulted"), py::arg("config"),
          py::call_guard<py::gil_scoped_release>());
    m.def("student_t_quantile", &student_t_quantile, py::arg("p"), py::arg("nu"));
}
