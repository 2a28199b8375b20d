#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <string_view>

#include "p2pir/common/errors.hpp"
#include "p2pir/common/id.hpp"
#include "p2pir/common/prg.hpp"
#include "p2pir/content/content.hpp"
#include "p2pir/crypto/hash.hpp"
#include "p2pir/netsim/netsim.hpp"
#include "p2pir/pir/pir.hpp"
#include "p2pir/routing/private_routing.hpp"

namespace py = pybind11;
using namespace p2pir;

namespace {

py::bytes to_py(const Bytes& b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }
py::bytes to_py(ByteSpan b) { return py::bytes(reinterpret_cast<const char*>(b.data()), b.size()); }

Bytes from_py(const py::bytes& b) {
    const std::string_view s = b;
    return Bytes(s.begin(), s.end());
}

Id256 id_from_py(const py::bytes& b) {
    const Bytes raw = from_py(b);
    if (raw.size() != 32) throw InvalidArgument("identifiers are 32 bytes");
    return Id256::from_span(raw);
}

pir::SchemeId scheme_from(const std::string& name) {
    auto s = pir::parse_scheme(name);
    if (!s) throw InvalidArgument("unknown scheme: " + name);
    return *s;
}

Prg make_rng(std::optional<std::uint64_t> seed) {
    return seed ? Prg(crypto::seed_from_u64(*seed)) : Prg::from_entropy();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Private information retrieval for peer-to-peer lookups";

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<InvalidArgument>(m, "InvalidArgument", error.ptr());
    py::register_exception<WireFormatError>(m, "WireFormatError", error.ptr());
    py::register_exception<SchemeMismatch>(m, "SchemeMismatch", error.ptr());
    py::register_exception<DecryptionFailure>(m, "DecryptionFailure", error.ptr());
    py::register_exception<StoreCorruption>(m, "StoreCorruption", error.ptr());
    py::register_exception<CryptoBackendError>(m, "CryptoBackendError", error.ptr());

    m.def("schemes", [] {
        std::vector<std::string> names;
        for (auto s : pir::all_schemes()) names.emplace_back(pir::scheme_name(s));
        return names;
    });

    m.def(
        "expected_sizes",
        [](const std::string& scheme, std::size_t rows, std::size_t row_width) {
            const pir::WireSizes w = pir::expected_sizes(scheme_from(scheme), rows, row_width);
            py::dict d;
            d["key_bytes"] = w.key_bytes;
            d["query_bytes"] = w.query_bytes;
            d["response_bytes"] = w.response_bytes;
            d["cells"] = w.cells;
            d["query_unit"] = w.query_unit;
            d["response_unit"] = w.response_unit;
            return d;
        },
        py::arg("scheme"), py::arg("rows"), py::arg("row_width"));

    py::class_<pir::PirDatabase>(m, "Database")
        .def(py::init([](const std::vector<py::bytes>& records, std::size_t row_width) {
                 std::vector<Bytes> recs;
                 recs.reserve(records.size());
                 for (const auto& r : records) recs.push_back(from_py(r));
                 return pir::PirDatabase(recs, row_width);
             }),
             py::arg("records"), py::arg("row_width") = 0)
        .def_property_readonly("rows", &pir::PirDatabase::rows)
        .def_property_readonly("row_width", &pir::PirDatabase::row_width)
        .def("record", [](const pir::PirDatabase& db, std::size_t j) { return to_py(db.record(j)); })
        .def("row", [](const pir::PirDatabase& db, std::size_t j) { return to_py(db.row(j)); })
        .def("__len__", &pir::PirDatabase::rows);

    py::class_<pir::ClientKeys>(m, "ClientKeys")
        .def(py::init([](std::optional<std::uint64_t> seed) {
                 return seed ? std::make_unique<pir::ClientKeys>(crypto::seed_from_u64(*seed))
                             : std::make_unique<pir::ClientKeys>();
             }),
             py::arg("seed") = py::none());

    py::class_<pir::ClientState>(m, "ClientState")
        .def_property_readonly("scheme", [](const pir::ClientState& s) { return pir::scheme_name(s.scheme); })
        .def_readonly("index", &pir::ClientState::index)
        .def_readonly("rows", &pir::ClientState::rows);

    m.def(
        "query",
        [](const std::string& scheme, std::size_t index, std::size_t rows, std::size_t row_width,
           std::optional<std::uint64_t> seed, pir::ClientKeys* keys) {
            Prg rng = make_rng(seed);
            std::pair<pir::ClientState, pir::PirQueryBundle> q;
            {
                py::gil_scoped_release release;
                q = pir::query(scheme_from(scheme), index, rows, row_width, rng, keys);
            }
            return py::make_tuple(std::move(q.first), to_py(q.second.serialize()));
        },
        py::arg("scheme"), py::arg("index"), py::arg("rows"), py::arg("row_width") = 0, py::arg("seed") = py::none(),
        py::arg("keys") = nullptr,
        "Returns (state, serialized query). Pass ClientKeys to reuse key material across queries.");

    m.def(
        "respond",
        [](const pir::PirDatabase& db, const py::bytes& query, unsigned threads, bool fold_tail) {
            const Bytes wire = from_py(query);
            Bytes out;
            {
                py::gil_scoped_release release;
                pir::RespondOptions opts;
                opts.threads = threads;
                opts.fold_tail = fold_tail;
                out = pir::respond(db, pir::PirQueryBundle::deserialize(wire), opts).serialize();
            }
            return to_py(out);
        },
        py::arg("db"), py::arg("query"), py::arg("threads") = 1, py::arg("fold_tail") = false);

    m.def(
        "extract",
        [](const pir::ClientState& st, const py::bytes& answer) {
            return to_py(pir::extract(st, pir::PirAnswer::deserialize(from_py(answer))));
        },
        py::arg("state"), py::arg("answer"));

    m.def("sha256", [](const py::bytes& data) {
        const auto d = crypto::sha256(from_py(data));
        return to_py(ByteSpan(d.data(), d.size()));
    });
    m.def("cid_of", [](const py::bytes& block) { return to_py(content::cid_of(from_py(block)).span()); });
    m.def("cpl", [](const py::bytes& a, const py::bytes& b) { return cpl(id_from_py(a), id_from_py(b)); });
    m.def(
        "target_index",
        [](const py::bytes& target, const py::bytes& server) {
            return routing::target_index(id_from_py(target), id_from_py(server));
        },
        py::arg("target"), py::arg("server"));

    m.def(
        "simulate",
        [](std::size_t peers, std::size_t lookups, std::uint64_t seed, const std::string& scheme) {
            netsim::SimConfig cfg;
            cfg.routing_scheme = scheme_from(scheme);
            std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t, std::size_t>> rows;
            {
                py::gil_scoped_release release;
                if (peers < 2) throw InvalidArgument("need at least two peers");
                netsim::SimNetwork net(peers, seed, cfg);
                Prg pick(crypto::seed_from_u64(seed), 7);
                for (std::size_t l = 0; l < lookups; ++l) {
                    const std::size_t client = pick.uniform(peers);
                    std::size_t target = pick.uniform(peers - 1);
                    if (target >= client) ++target;
                    const PeerId id = net.peer(target).id;
                    const auto plain = net.iterative_lookup(client, id, netsim::LookupMode::Plain);
                    const auto priv = net.iterative_lookup(client, id, netsim::LookupMode::Private);
                    rows.emplace_back(client, target, plain.hops, priv.hops,
                                      priv.bytes_up + priv.bytes_down);
                }
            }
            py::list out;
            for (const auto& [client, target, plain, priv, bytes] : rows) {
                py::dict d;
                d["client"] = client;
                d["target"] = target;
                d["plain_hops"] = plain;
                d["private_hops"] = priv;
                d["private_bytes"] = bytes;
                out.append(d);
            }
            return out;
        },
        py::arg("peers"), py::arg("lookups"), py::arg("seed") = 1, py::arg("scheme") = "rlwe-logn",
        "Runs plain and private lookups for the same (client, target) pairs on a simulated network.");
}
