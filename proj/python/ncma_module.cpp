#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ncma/analysis.hpp"
#include "ncma/crc.hpp"
#include "ncma/fec.hpp"
#include "ncma/macode.hpp"
#include "ncma/modem.hpp"
#include "ncma/rag.hpp"
#include "ncma/sim.hpp"

namespace py = pybind11;
using namespace ncma;

namespace {

std::string entry_value(py::handle v) {
    if (py::isinstance<py::list>(v) || py::isinstance<py::tuple>(v)) {
        std::string out;
        for (auto e : v) {
            if (!out.empty()) out += ",";
            out += py::str(e).cast<std::string>();
        }
        return out;
    }
    return py::str(v).cast<std::string>();
}

ScenarioConfig config_from_dict(const py::dict& d) {
    ScenarioConfig cfg;
    for (auto item : d)
        apply_config_entry(cfg, py::str(item.first).cast<std::string>(),
                           entry_value(item.second));
    cfg.validate();
    return cfg;
}

py::list rows_to_py(const std::vector<ResultRow>& rows) {
    py::list out;
    for (const auto& r : rows) {
        py::dict d;
        d["profile"] = to_string(r.profile);
        d["snr_c_db"] = r.snr_c_db;
        d["th_a"] = r.th.th_a;
        d["th_b"] = r.th.th_b;
        d["th_c"] = r.th.th_c;
        d["th_sys"] = r.th.th_sys;
        d["stage"] = to_string(r.stage);
        d["slots"] = r.slots;
        d["seed"] = r.seed;
        out.append(d);
    }
    return out;
}

}  // namespace

PYBIND11_MODULE(_ncma, m) {
    m.doc() = "link-level codec and simulator kernels";

    // channel coding
    m.def("conv_encode", &conv_encode, py::arg("payload"),
          "rate-1/2 terminated convolutional encoding (generators 133/171 octal)");
    m.def(
        "viterbi_decode",
        [](const LlrVec& llr, double llr_clip) {
            return viterbi_decode(llr, ViterbiOptions{llr_clip});
        },
        py::arg("llr"), py::arg("llr_clip") = 50.0,
        "soft-decision decode; positive LLR favors bit 0");
    m.def("crc32_bits", &crc32_bits, py::arg("bits"));
    m.def("crc32_field", &crc32_field, py::arg("payload"));
    m.def("crc32_check", &crc32_check, py::arg("payload"), py::arg("field"),
          py::arg("xor_weight") = 1);

    // erasure coding
    m.def(
        "mac_encode",
        [](const Bits& message, int l, int n_total, int packet_bits) {
            return mac_encode(message, MacCodeSpec{l, n_total, packet_bits});
        },
        py::arg("message"), py::arg("l"), py::arg("n_total"), py::arg("packet_bits"),
        "systematic MDS coding of a message into n_total packets");
    m.def(
        "mac_decode",
        [](const std::vector<std::pair<int, Bits>>& packets, int l, int n_total,
           int packet_bits) {
            return mac_decode(packets, MacCodeSpec{l, n_total, packet_bits});
        },
        py::arg("packets"), py::arg("l"), py::arg("n_total"), py::arg("packet_bits"),
        "reconstruct the message from any l distinct (index, packet) pairs");
    m.def(
        "mac_reencode",
        [](const Bits& message, int l, int n_total, int packet_bits, int index) {
            return mac_reencode(message, MacCodeSpec{l, n_total, packet_bits}, index);
        },
        py::arg("message"), py::arg("l"), py::arg("n_total"), py::arg("packet_bits"),
        py::arg("index"));

    // modulation
    m.def("bpsk_modulate", &bpsk_modulate, py::arg("coded"));
    m.def("qpsk_modulate", &qpsk_modulate, py::arg("coded"));
    m.def("qpsk_split_modulate", &qpsk_split_modulate, py::arg("rail_i"), py::arg("rail_q"));
    m.def("pnc_bit_map", &pnc_bit_map, py::arg("symbol_product"),
          "XOR bit carried by a +-1 symbol product");

    // closed forms
    m.def("rate_gain", &rate_gain, py::arg("power_linear"));
    m.def("sic_first_user_sinr", &sic_first_user_sinr, py::arg("power_linear"),
          py::arg("sigma2") = 1.0);

    // random access
    m.def("zc_generate", &zc_generate, py::arg("u"), py::arg("n_zc"), py::arg("shift") = 0);
    m.def(
        "detect_preambles",
        [](const CVec& received, int u, int n_cs, double threshold) {
            return detect_preambles(received, u, n_cs, threshold).shifts;
        },
        py::arg("received"), py::arg("u"), py::arg("n_cs"), py::arg("threshold") = 6.0,
        "detected cyclic shifts, ascending");
    m.def("analytic_mean_rounds", &analytic_mean_rounds, py::arg("k"), py::arg("b"),
          "expected admission rounds for k users over b preambles");
    m.def(
        "group_users",
        [](const std::vector<double>& snrs_db, double strong_threshold_db, bool pair_first) {
            std::vector<RagUser> users;
            for (size_t i = 0; i < snrs_db.size(); ++i)
                users.push_back({int(i), snrs_db[i]});
            py::list out;
            for (const auto& g : group_users(users, strong_threshold_db, pair_first)) {
                py::list ids;
                for (const auto& u : g.members) ids.append(u.id);
                out.append(py::make_tuple(g.ncma, ids));
            }
            return out;
        },
        py::arg("snrs_db"), py::arg("strong_threshold_db") = 15.0, py::arg("pair_first") = true,
        "(shared_slot, member_ids) tuples");
    m.def(
        "run_rag",
        [](const std::vector<double>& snrs_db, uint64_t seed, int n_zc, int n_cs,
           bool signal_detection, double noise_sigma) {
            std::vector<RagUser> users;
            for (size_t i = 0; i < snrs_db.size(); ++i)
                users.push_back({int(i), snrs_db[i]});
            RagParams params;
            params.n_zc = n_zc;
            params.n_cs = n_cs;
            params.signal_detection = signal_detection;
            params.noise_sigma = noise_sigma;
            auto out = run_rag(users, params, seed);
            py::dict d;
            d["rounds"] = out.rounds;
            d["collisions"] = out.collisions;
            d["admitted_per_round"] = out.admitted_per_round;
            py::list plan;
            for (const auto& g : out.plan) {
                py::list ids;
                for (const auto& u : g.members) ids.append(u.id);
                plan.append(py::make_tuple(g.ncma, ids));
            }
            d["plan"] = plan;
            return d;
        },
        py::arg("snrs_db"), py::arg("seed"), py::arg("n_zc") = 257, py::arg("n_cs") = 20,
        py::arg("signal_detection") = false, py::arg("noise_sigma") = 0.0);

    // sweeps
    m.def(
        "sweep",
        [](const py::dict& config) {
            ScenarioConfig cfg = config_from_dict(config);
            std::vector<ResultRow> rows;
            {
                py::gil_scoped_release release;
                rows = run_scenario(cfg);
            }
            return rows_to_py(rows);
        },
        py::arg("config"),
        "run a throughput sweep from flat config entries; returns one dict per row");
    m.def(
        "sweep_csv",
        [](const py::dict& config) {
            ScenarioConfig cfg = config_from_dict(config);
            py::gil_scoped_release release;
            return render_csv(run_scenario(cfg));
        },
        py::arg("config"), "like sweep() but rendered to the canonical CSV text");
    m.def(
        "config_text",
        [](const py::dict& config) { return config_text(config_from_dict(config)); },
        py::arg("config"), "canonical key = value rendering of a config");
    m.def(
        "manifest",
        [](const py::dict& config, const std::string& csv_path) {
            return render_manifest(config_from_dict(config), csv_path);
        },
        py::arg("config"), py::arg("csv_path"), "reproducibility manifest as JSON text");
}
