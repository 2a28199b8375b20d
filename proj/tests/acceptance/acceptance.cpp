// Acceptance run: one PASS/FAIL line per criterion.
// Correctness and size checks decide the exit status. Wall-clock bounds are
// reported on the same line but do not change the exit status, since they
// depend on the machine.

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <deque>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "p2pir/bench/workloads.hpp"
#include "p2pir/common/errors.hpp"
#include "p2pir/common/id.hpp"
#include "p2pir/common/parallel.hpp"
#include "p2pir/content/content.hpp"
#include "p2pir/crypto/hash.hpp"
#include "p2pir/crypto/robust.hpp"
#include "p2pir/netsim/netsim.hpp"
#include "p2pir/pir/pir.hpp"
#include "p2pir/provider/provider_store.hpp"
#include "p2pir/rlwe/expansion.hpp"
#include "p2pir/rlwe/rlwe.hpp"
#include "p2pir/rlwe/rlwe_pir.hpp"
#include "p2pir/routing/private_routing.hpp"
#include "p2pir/routing/routing_table.hpp"

using namespace p2pir;
using pir::SchemeId;

namespace {

using Clock = std::chrono::steady_clock;
constexpr double KB = 1024;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }
double ms_since(Clock::time_point t0) { return 1000 * seconds_since(t0); }

struct Options {
    bool quick = false;
    std::set<int> only;
    std::uint64_t seed = 2024;
    unsigned threads = 1;
};

// Result of one criterion. `ok` gates the exit status, `timing_ok` does not.
struct Outcome {
    bool ok = true;
    bool timing_ok = true;
    std::string detail;
};

Prg stream_rng(const Options& o, std::uint64_t stream) { return Prg(crypto::seed_from_u64(o.seed), stream); }

std::string fmt(const char* f, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

bool within(double measured, double target, double tol) {
    return measured >= target * (1 - tol) && measured <= target * (1 + tol);
}

// ---------------------------------------------------------------- 1

Outcome pir_correctness(const Options& o) {
    const std::size_t per_scheme = o.quick ? 40 : 1000;
    const auto t0 = Clock::now();
    Prg key_rng = stream_rng(o, 100);
    pir::ClientKeys keys(key_rng.next_seed());
    pir::KeyCache cache(16);
    std::mutex mu;
    std::string first_failure;
    std::size_t total = 0, failures = 0;
    std::ostringstream per;
    const SchemeId schemes[] = {SchemeId::Paillier, SchemeId::RlweLogN, SchemeId::Rlwe3, SchemeId::Rlwe2,
                                SchemeId::Trivial};
    for (SchemeId s : schemes) {
        std::vector<std::size_t> sizes{1, 16, 256};
        if (pir::is_rlwe(s)) sizes.push_back(4096);
        // Keys are created up front so workers only read them.
        if (s == SchemeId::Paillier) keys.paillier();
        if (pir::is_rlwe(s))
            for (std::size_t n : sizes) keys.rlwe(s, rlwe::expansion_levels(n));
        // One Paillier cell per row keeps the 256-row trials affordable.
        const std::size_t max_len =
            s == SchemeId::Paillier ? paillier::kModulusBytes - 1 - pir::kRecordHeader : 2160;
        std::atomic<std::size_t> bad{0};
        const auto ts = Clock::now();
        for (std::size_t si = 0; si < sizes.size(); ++si) {
            const std::size_t n = sizes[si];
            const std::size_t count = per_scheme / sizes.size() + (si < per_scheme % sizes.size() ? 1 : 0);
            parallel_for(0, count, o.threads, [&](std::size_t trial) {
                Prg rng = stream_rng(o, (std::uint64_t(s) << 40) | (std::uint64_t(n) << 20) | trial);
                std::vector<Bytes> recs(n);
                for (auto& r : recs) {
                    r.resize(rng.uniform(max_len + 1));
                    rng.fill(r);
                }
                const pir::PirDatabase db(recs);
                const std::size_t idx = rng.uniform(n);
                bool ok = false;
                std::string why;
                try {
                    auto [st, q] = pir::query(s, idx, n, db.row_width(), rng, s == SchemeId::Trivial ? nullptr : &keys);
                    pir::RespondOptions opts;
                    opts.key_cache = &cache;
                    const auto wire_q = pir::PirQueryBundle::deserialize(q.serialize());
                    const auto a = pir::PirAnswer::deserialize(pir::respond(db, wire_q, opts).serialize());
                    const ByteSpan row = db.row(idx);
                    ok = pir::extract(st, a) == recs[idx] && pir::extract_row(st, a) == Bytes(row.begin(), row.end());
                    if (!ok) why = "wrong row";
                } catch (const std::exception& e) {
                    why = e.what();
                }
                if (!ok) {
                    ++bad;
                    std::lock_guard<std::mutex> lock(mu);
                    if (first_failure.empty())
                        first_failure = std::string(pir::scheme_name(s)) + " n=" + std::to_string(n) + " trial " +
                                        std::to_string(trial) + ": " + why;
                }
            });
            total += count;
        }
        failures += bad;
        per << " " << pir::scheme_name(s) << "=" << per_scheme << "/" << fmt("%.0fs", seconds_since(ts));
    }
    const double elapsed = seconds_since(t0);
    Outcome out;
    out.ok = failures == 0;
    out.timing_ok = elapsed < 600;
    out.detail = std::to_string(total) + " trials, " + std::to_string(failures) + " failures;" + per.str() + "; " +
                 fmt("%.0f s", elapsed) + " on " + std::to_string(o.threads) +
                 " thread(s) (bound 600 s on a 4-core desktop)";
    if (!first_failure.empty()) out.detail += "; first failure: " + first_failure;
    return out;
}

// ---------------------------------------------------------------- 2

rlwe::Plaintext monomial(std::size_t e, std::uint64_t c) {
    rlwe::Plaintext m(rlwe::kDegree, 0);
    m[e] = c;
    return m;
}

// Breadth-first closure of {1} under multiplication by the generators mod 2N.
std::set<std::uint32_t> closure(const std::vector<std::uint32_t>& gens) {
    std::set<std::uint32_t> seen{1u};
    std::deque<std::uint32_t> queue{1u};
    while (!queue.empty()) {
        const std::uint32_t x = queue.front();
        queue.pop_front();
        for (std::uint32_t g : gens) {
            const auto y = static_cast<std::uint32_t>(std::uint64_t(x) * g % rlwe::kTwoN);
            if (seen.insert(y).second) queue.push_back(y);
        }
    }
    return seen;
}

double response_margin(const rlwe::RlweClientSecret& secret, const Bytes& payload, const pir::PirDatabase& db) {
    ByteReader r(payload);
    const unsigned bits = r.u8();
    const std::uint32_t cells = r.u32be();
    double worst = 1e9;
    for (std::uint32_t c = 0; c < cells; ++c) {
        const rlwe::Ciphertext ct = rlwe::deserialize_ciphertext(r);
        const rlwe::Plaintext want = rlwe::encode_cell(db.row(secret.index), c, bits);
        worst = std::min(worst, rlwe::noise_threshold_bits(ct.limbs()) - rlwe::noise_bits(secret.sk, ct, want));
    }
    return worst;
}

Outcome oblivious_expansion(const Options& o) {
    using rlwe::KeyVariant;
    const KeyVariant variants[] = {KeyVariant::LogN, KeyVariant::Three, KeyVariant::Two};
    Prg rng = stream_rng(o, 200);
    const rlwe::SecretKey sk = rlwe::generate_secret_key(rng);
    std::size_t checked = 0, failures = 0;

    auto check_indicator = [&](const rlwe::ExpansionKeys& keys, unsigned levels, std::size_t i) {
        rlwe::Ciphertext ct = rlwe::encrypt(sk, monomial(i, 1), 2, rng);
        rlwe::prepare_for_evaluation(ct);
        const auto outs = rlwe::oblivious_expand(keys, ct, levels, o.threads);
        const std::size_t n = std::size_t{1} << levels;
        bool ok = outs.size() == n;
        for (std::size_t u = 0; ok && u < n; ++u) ok = rlwe::decrypt(sk, outs[u]) == monomial(0, u == i ? n : 0);
        ++checked;
        if (!ok) ++failures;
    };

    for (KeyVariant v : variants)
        for (unsigned levels = 1; levels <= 4; ++levels) {
            const rlwe::ExpansionKeys keys(rlwe::generate_keys(sk, v, levels, rng));
            for (std::size_t i = 0; i < (std::size_t{1} << levels); ++i) check_indicator(keys, levels, i);
        }
    const std::size_t exhaustive = checked;

    const std::size_t random_trials = o.quick ? 6 : 50;
    for (unsigned levels : {8u, 12u}) {
        std::vector<rlwe::ExpansionKeys> keys;
        for (KeyVariant v : variants) keys.emplace_back(rlwe::generate_keys(sk, v, levels, rng));
        for (std::size_t trial = 0; trial < random_trials; ++trial)
            check_indicator(keys[trial % 3], levels, rng.uniform(std::size_t{1} << levels));
    }

    // Reachability of every level target 1 + N/2^i, computed without the library.
    bool reach_ok = true;
    const std::vector<std::vector<std::uint32_t>> sets = {{3, 1173}, {3, 5, 1167}};
    const KeyVariant set_variant[] = {KeyVariant::Two, KeyVariant::Three};
    for (std::size_t k = 0; k < sets.size(); ++k) {
        const auto reach = closure(sets[k]);
        for (unsigned i = 0; i < rlwe::kLogDegree; ++i) reach_ok &= reach.count(rlwe::kDegree / (1u << i) + 1) == 1;
        reach_ok &= rlwe::generator_exponents(set_variant[k], rlwe::kLogDegree) == sets[k];
        const rlwe::GeneratorReach lib(sets[k]);
        for (std::uint32_t g = 1; g < rlwe::kTwoN; g += 2) reach_ok &= lib.reachable(g) == (reach.count(g) == 1);
    }

    // Noise headroom of a full 12-level response, per variant.
    std::string margins;
    {
        std::vector<Bytes> recs(4096);
        for (auto& r : recs) {
            r.resize(1200);
            rng.fill(r);
        }
        const pir::PirDatabase db(recs);
        for (KeyVariant v : variants) {
            rlwe::RlweQuery q = rlwe::rlwe_query(v, rng.uniform(4096), 4096, rng);
            pir::RespondOptions opts;
            opts.threads = o.threads;
            const Bytes payload = rlwe::rlwe_respond(v, q.key_material, q.body, db, 4096, opts);
            const double m = response_margin(q.secret, payload, db);
            if (m <= 0) ++failures;
            margins += std::string(margins.empty() ? "" : ", ") + rlwe::variant_name(v) + " " + fmt("%.1f", m);
        }
    }

    Outcome out;
    out.ok = failures == 0 && reach_ok;
    out.detail = std::to_string(exhaustive) + " exhaustive indicator queries (levels 1-4, all key sets), " +
                 std::to_string(checked - exhaustive) + " random queries at levels 8 and 12, " +
                 std::to_string(failures) + " failures; generator reachability " + (reach_ok ? "holds" : "FAILS") +
                 "; 12-level noise margin bits: " + margins;
    return out;
}

// ---------------------------------------------------------------- 3

Id256 id_with_cpl(const Id256& base, int c, Prg& rng) {
    Id256 id = random_id(rng);
    for (int i = 0; i < c; ++i) id.set_bit(i, base.bit(i));
    id.set_bit(c, !base.bit(c));
    return id;
}

std::string prefix_key(const Id256& d, std::size_t bits) {
    std::string key;
    for (std::size_t i = 0; i < bits; ++i) key += d.bit(i) ? '1' : '0';
    return key;
}

// Peers every normalized bucket must contain, plus `need` more from `boundary`.
struct Expectation {
    std::set<PeerId> forced;
    std::vector<PeerId> boundary;
    std::size_t need = 0;
};

Expectation normalization_oracle(const PeerId& self, const std::vector<std::vector<PeerId>>& buckets, std::size_t t,
                                 std::size_t k) {
    Expectation e;
    std::size_t total = 0;
    for (const auto& b : buckets) total += b.size();
    if (total <= k) {
        for (const auto& b : buckets) e.forced.insert(b.begin(), b.end());
        return e;
    }
    const std::size_t r = buckets.size() - 1, target = std::min(t, r);
    e.forced.insert(buckets[target].begin(), buckets[target].end());
    std::size_t room = k - buckets[target].size();
    std::vector<PeerId> closer_peers;
    for (std::size_t i = target + 1; i <= r; ++i)
        closer_peers.insert(closer_peers.end(), buckets[i].begin(), buckets[i].end());
    if (closer_peers.size() > room) {
        e.boundary = closer_peers;
        e.need = room;
        return e;
    }
    e.forced.insert(closer_peers.begin(), closer_peers.end());
    room -= closer_peers.size();
    for (std::size_t l = target; l-- > 0;) {
        if (buckets[l].size() <= room) {
            e.forced.insert(buckets[l].begin(), buckets[l].end());
            room -= buckets[l].size();
            continue;
        }
        // Sub-buckets by the leading target+1 bits of the distance to self, nearest first.
        std::map<std::string, std::vector<PeerId>> groups;
        for (const auto& p : buckets[l]) groups[prefix_key(p ^ self, target + 1)].push_back(p);
        for (auto& [key, g] : groups) {
            if (g.size() <= room) {
                e.forced.insert(g.begin(), g.end());
                room -= g.size();
            } else {
                e.boundary = g;
                e.need = room;
                return e;
            }
        }
        return e;
    }
    return e;
}

bool satisfies(const Expectation& e, const std::vector<PeerId>& out) {
    if (!std::is_sorted(out.begin(), out.end())) return false;
    const std::set<PeerId> s(out.begin(), out.end());
    if (s.size() != out.size()) return false;
    for (const auto& p : e.forced)
        if (!s.count(p)) return false;
    const std::set<PeerId> boundary(e.boundary.begin(), e.boundary.end());
    std::size_t from_boundary = 0;
    for (const auto& p : out) {
        if (e.forced.count(p)) continue;
        if (!boundary.count(p)) return false;
        ++from_boundary;
    }
    return from_boundary == e.need;
}

Outcome normalization(const Options& o) {
    Prg rng = stream_rng(o, 300);
    const std::size_t trials = o.quick ? 500 : 10000;
    std::size_t failures = 0, full_buckets = 0, done = 0;
    while (done < trials) {
        routing::RoutingTable rt(random_id(rng));
        const std::size_t inserts = rng.uniform(120);
        for (std::size_t i = 0; i < inserts; ++i) {
            const int c = rng.uniform(4) == 0 ? int(rng.uniform(14)) : int(rng.uniform(5));
            rt.insert(id_with_cpl(rt.self(), c, rng));
        }
        if (rt.empty()) continue;
        ++done;
        const std::size_t t = rng.uniform(10) == 0 ? 200 : rng.uniform(rt.last_index() + 3);
        const auto out = routing::normalize(rt, t, rng);
        bool ok = out.size() == std::min(rt.k(), rt.size()) &&
                  satisfies(normalization_oracle(rt.self(), rt.bucket_ids(), t, rt.k()), out);
        const auto& target = rt.bucket(std::min(t, rt.last_index()));
        if (target.size() == rt.k()) {
            ++full_buckets;
            std::vector<PeerId> want;
            for (const auto& e : target) want.push_back(e.id);
            std::sort(want.begin(), want.end());
            ok = ok && out == want;
        }
        if (!ok) ++failures;
    }
    Outcome out;
    out.ok = failures == 0;
    out.detail = std::to_string(done) + " random (table, bucket) pairs, " + std::to_string(full_buckets) +
                 " with a full target bucket, " + std::to_string(failures) + " disagreements with the brute-force oracle";
    return out;
}

// ---------------------------------------------------------------- 4

Outcome hop_counts(const Options& o) {
    const std::size_t peers = o.quick ? 300 : 2000, lookups = o.quick ? 50 : 500;
    const auto t0 = Clock::now();
    netsim::SimConfig cfg;
    cfg.threads = o.threads;
    netsim::SimNetwork net(peers, o.seed, cfg);
    const double build_s = seconds_since(t0);
    Prg pick = stream_rng(o, 400);
    std::size_t identical = 0, max_diff = 0, max_hops = 0, hop_sum = 0, failed = 0;
    for (std::size_t l = 0; l < lookups; ++l) {
        const std::size_t client = pick.uniform(peers);
        std::size_t target = pick.uniform(peers - 1);
        if (target >= client) ++target;
        const PeerId id = net.peer(target).id;
        const auto plain = net.iterative_lookup(client, id, netsim::LookupMode::Plain);
        const auto priv = net.iterative_lookup(client, id, netsim::LookupMode::Private);
        const std::size_t diff = plain.hops > priv.hops ? plain.hops - priv.hops : priv.hops - plain.hops;
        max_diff = std::max(max_diff, diff);
        identical += diff == 0;
        hop_sum += priv.hops;
        max_hops = std::max(max_hops, priv.hops);
        failed += !(plain.success && priv.success);
    }
    const double mean = double(hop_sum) / double(lookups);
    const double elapsed = seconds_since(t0);
    Outcome out;
    out.ok = identical == lookups && max_diff <= 2 && failed == 0 && mean >= 1.5 && mean <= 3.5;
    out.timing_ok = elapsed < 300;
    out.detail = std::to_string(peers) + " peers, " + std::to_string(lookups) + " lookups: " +
                 std::to_string(identical) + " identical, max difference " + std::to_string(max_diff) +
                 ", mean hops " + fmt("%.2f", mean) + ", max " + std::to_string(max_hops) + ", " +
                 std::to_string(failed) + " unsuccessful; " + fmt("%.0f s", elapsed) + " incl. " +
                 fmt("%.0f s", build_s) + " network build (bound 300 s)";
    return out;
}

// ---------------------------------------------------------------- 5

std::size_t answer_bytes(SchemeId s, std::size_t width, pir::ClientKeys& keys, Prg& rng) {
    std::vector<Bytes> recs(2, Bytes(width - pir::kRecordHeader, 0x42));
    const pir::PirDatabase db(recs, width);
    auto [st, q] = pir::query(s, 1, 2, width, rng, &keys);
    const pir::PirAnswer a = pir::respond(db, q);
    if (pir::extract(st, a) != recs[1]) throw Error("size probe returned the wrong row");
    return a.serialize().size();
}

Outcome communication_sizes(const Options& o) {
    Prg rng = stream_rng(o, 500);
    pir::ClientKeys keys(rng.next_seed());
    std::ostringstream d;
    bool ok = true;
    auto check = [&](const std::string& what, double measured, double target_kb) {
        const bool good = within(measured, target_kb * KB, 0.2);
        ok &= good;
        d << what << " " << fmt("%.2f", measured / KB) << " KB (" << fmt("%.2f", target_kb) << ")"
          << (good ? "" : " OUT OF RANGE") << "; ";
    };

    {
        auto [s1, q1] = pir::query(SchemeId::Paillier, 0, 1, 383, rng, &keys);
        auto [s2, q2] = pir::query(SchemeId::Paillier, 0, 2, 383, rng, &keys);
        check("Paillier key", double(q1.key_material.size()), 1.14);
        check("query/row", double(q2.serialize().size() - q1.serialize().size()), 0.38);
        const std::size_t cb = paillier::kModulusBytes - 1;
        check("response/cell",
              double(answer_bytes(SchemeId::Paillier, 2 * cb, keys, rng) - answer_bytes(SchemeId::Paillier, cb, keys, rng)),
              0.76);
    }
    const std::pair<SchemeId, double> key_targets[] = {
        {SchemeId::RlweLogN, 750}, {SchemeId::Rlwe3, 192}, {SchemeId::Rlwe2, 128}};
    for (const auto& [s, target] : key_targets) {
        const std::string name = pir::scheme_name(s);
        auto [sa, qa] = pir::query(s, 0, 4096, 64, rng, &keys);
        auto [sb, qb] = pir::query(s, 0, 4097, 64, rng, &keys);
        check(name + " key (12 levels)", double(qa.key_material.size()), target);
        check("query ct", double(qb.serialize().size() - qa.serialize().size()), 64);
        const std::size_t cap = rlwe::cell_capacity(rlwe::packing_bits(pir::rlwe_variant(s), 1));
        check("response ct", double(answer_bytes(s, cap + 1, keys, rng) - answer_bytes(s, cap, keys, rng)), 65);
    }
    Outcome out;
    out.ok = ok;
    out.detail = d.str() + "tolerance 20%, 1 KB = 1024 B";
    return out;
}

// ---------------------------------------------------------------- 6

Outcome routing_cost(const Options& o) {
    Prg rng = stream_rng(o, 600);
    routing::RoutingTable rt(random_id(rng));
    routing::AddressBook book;
    for (int i = 0; i < 5000; ++i) {
        const PeerId p = random_id(rng);
        if (rt.insert(p)) book.set(p, routing::make_multiaddr(rng.next_u32(), 4001));
    }
    const auto nrt = routing::build_normalized(rt, book, rng.next_seed());
    pir::ClientKeys keys(rng.next_seed());
    const std::size_t runs = o.quick ? 3 : 10;
    std::size_t round_trip = 0, wrong = 0;

    auto measure = [&](unsigned threads, bool warm) {
        pir::KeyCache cache(4);
        std::vector<double> ms;
        for (std::size_t r = 0; r < runs + (warm ? 1 : 0); ++r) {
            const PeerId target = random_id(rng);
            auto [st, q] = routing::private_peer_query(target, rt.self(), SchemeId::Rlwe3, rng, &keys);
            const Bytes up = q.serialize();
            const auto t0 = Clock::now();
            const auto received = pir::PirQueryBundle::deserialize(up);
            const Bytes down =
                routing::private_peer_respond(nrt, received, threads, warm ? &cache : nullptr).serialize();
            const double elapsed = ms_since(t0);
            if (!(warm && r == 0)) ms.push_back(elapsed);
            round_trip = std::max(round_trip, up.size() + down.size());
            const auto got = routing::private_peer_extract(st, pir::PirAnswer::deserialize(down));
            if (got != nrt.lookup(routing::target_index(target, rt.self()))) ++wrong;
        }
        return bench::summarize(ms).mean;
    };
    const double cold1 = measure(1, false);
    const double warm1 = measure(1, true);
    const double warm8 = measure(8, true);

    Outcome out;
    out.ok = round_trip <= 370 * KB && wrong == 0;
    out.timing_ok = warm1 <= 500 && warm8 <= 150;
    out.detail = "Rlwe3 round trip " + fmt("%.1f", double(round_trip) / KB) + " KB (bound 370), " +
                 std::to_string(wrong) + " wrong buckets; respond " + fmt("%.0f", warm1) + " ms at 1 thread (bound 500), " +
                 fmt("%.0f", warm8) + " ms at 8 threads (bound 150) with cached keys, " + fmt("%.0f", cold1) +
                 " ms at 1 thread including key preparation; " + std::to_string(std::thread::hardware_concurrency()) +
                 " hardware thread(s)";
    return out;
}

// ---------------------------------------------------------------- 7

Outcome provider_ads(const Options& o) {
    Prg rng = stream_rng(o, 700);
    const std::uint64_t now = 1'700'000'000;
    const std::size_t ads = 50000, queries = o.quick ? 10 : 200;
    // A quarter of the ads add a second provider to an existing CID.
    provider::ProviderStore store;
    routing::AddressBook book;
    std::vector<PeerId> providers;
    for (int i = 0; i < 1000; ++i) {
        providers.push_back(random_id(rng));
        book.set(providers.back(), routing::make_multiaddr(rng.next_u32(), std::uint16_t(1024 + rng.uniform(60000))));
    }
    std::vector<Cid> cids;
    for (std::size_t i = 0; i < ads; ++i) {
        if (!cids.empty() && rng.uniform(4) == 0) {
            store.add(cids[rng.uniform(cids.size())], providers[rng.uniform(providers.size())], now);
        } else {
            cids.push_back(random_id(rng));
            store.add(cids.back(), providers[rng.uniform(providers.size())], now);
        }
    }
    const provider::BinnedTable table = provider::build_binned(store, book, now);
    pir::ClientKeys keys(rng.next_seed());
    pir::KeyCache cache(4);
    std::size_t wrong = 0, spurious = 0, max_bytes = 0;
    std::vector<double> ms;
    for (std::size_t i = 0; i < queries; ++i) {
        const bool present = i % 2 == 0;
        const Cid c = present ? cids[rng.uniform(cids.size())] : random_id(rng);
        auto [st, q] = provider::prov_ad_query(c, SchemeId::Rlwe3, rng, &keys);
        const Bytes up = q.serialize();
        const auto t0 = Clock::now();
        const Bytes down = provider::prov_ad_respond(table, pir::PirQueryBundle::deserialize(up), 1, &cache).serialize();
        ms.push_back(ms_since(t0));
        max_bytes = std::max(max_bytes, up.size() + down.size());
        const auto r = provider::prov_ad_open(st, pir::PirAnswer::deserialize(down), c);
        if (present) {
            const auto want = provider::provider_record(store, book, c, now);
            if (r.successes != 1 || !r.addresses || !want || provider::encode_address_list(*r.addresses) != *want)
                ++wrong;
        } else {
            if (r.addresses) ++wrong;
            spurious += r.successes;
        }
    }
    const double worst = *std::max_element(ms.begin(), ms.end());
    Outcome out;
    out.ok = wrong == 0 && spurious == 0 && max_bytes <= 0.55e6;
    out.timing_ok = worst <= 5000;
    out.detail = std::to_string(ads) + " ads over " + std::to_string(cids.size()) + " CIDs, " + std::to_string(queries) +
                 " queries (half absent): " + std::to_string(wrong) + " wrong, " + std::to_string(spurious) +
                 " spurious decryptions; round trip " + fmt("%.3f", double(max_bytes) / 1e6) +
                 " MB (bound 0.55); respond mean " + fmt("%.0f", bench::summarize(ms).mean) + " ms, max " +
                 fmt("%.0f", worst) + " ms single-threaded (bound 5000)";
    return out;
}

// ---------------------------------------------------------------- 8

Outcome symmetric_game(const Options& o) {
    Prg rng = stream_rng(o, 800);
    const std::uint64_t now = 1'700'000'000;
    const std::size_t trials = o.quick ? 50 : 1000;
    bench::ProviderWorkload w = bench::make_provider_workload(1000, rng, now, 50);
    const provider::BinnedTable real = provider::build_binned(w.store, w.book, now);
    const auto stored = real.cids();
    std::size_t differing = 0, opened = 0;
    for (std::size_t trial = 0; trial < trials; ++trial) {
        const bool present = trial % 2 == 0;
        const Cid c = present ? w.cids[rng.uniform(w.cids.size())] : random_id(rng);
        provider::BinnedTable fake(crypto::kLabelProviderAds);
        for (const Cid& other : stored) {
            const Bytes rec = *provider::provider_record(w.store, w.book, other, now);
            if (other == c) {
                fake.put(other, rec);
            } else {
                Bytes junk(rec.size() + crypto::RobustCipher::kOverhead);
                rng.fill(junk);
                fake.put_ciphertext(other, junk);
            }
        }
        auto [st, q] = provider::prov_ad_query(c, SchemeId::TrivialS, rng);
        const auto r1 = provider::prov_ad_open(st, provider::prov_ad_respond(real, q), c);
        const auto r2 = provider::prov_ad_open(st, provider::prov_ad_respond(fake, q), c);
        opened += r1.successes;
        if (r1.successes != r2.successes || r1.addresses != r2.addresses || r1.records != r2.records ||
            r1.successes != (present ? 1u : 0u))
            ++differing;
    }
    Outcome out;
    out.ok = differing == 0;
    out.detail = std::to_string(trials) + " trials (half absent CIDs), " + std::to_string(opened) +
                 " records opened, " + std::to_string(differing) + " outcomes changed by randomizing foreign records";
    return out;
}

// ---------------------------------------------------------------- 9

Outcome private_block(const Options& o) {
    Prg rng = stream_rng(o, 900);
    const content::BlockStore store = bench::make_block_store(64, content::kBlockBytes, rng);
    const SchemeId scheme = content::recommend_scheme(store.size());
    pir::ClientKeys keys(rng.next_seed());
    pir::KeyCache cache(4);
    const std::size_t rows = o.quick ? 4 : store.size();
    std::size_t exact = 0, opened_wrong = 0, attempts = 0;
    for (std::size_t k = 0; k < rows; ++k) {
        const std::size_t i = o.quick ? rng.uniform(store.size()) : k;
        auto [st, q] = content::private_block_query(i, store.size(), scheme, rng, &keys);
        const pir::PirAnswer a = pir::PirAnswer::deserialize(
            content::private_block_respond(store, pir::PirQueryBundle::deserialize(q.serialize()), 1, &cache).serialize());
        if (content::private_block_extract(st, a, store.cids()[i]) == store.block(i)) ++exact;
        std::vector<Cid> wrong_cids{random_id(rng)};
        for (std::size_t j = 0; j < store.size(); ++j)
            if (j != i) wrong_cids.push_back(store.cids()[j]);
        for (const Cid& c : wrong_cids) {
            ++attempts;
            try {
                content::private_block_extract(st, a, c);
                ++opened_wrong;
            } catch (const DecryptionFailure&) {
            }
        }
    }
    Outcome out;
    out.ok = exact == rows && opened_wrong == 0;
    out.detail = std::string("64 blocks of 256 KB via ") + pir::scheme_name(scheme) + ": " + std::to_string(exact) +
                 "/" + std::to_string(rows) + " rows bit-exact; " + std::to_string(opened_wrong) + " of " +
                 std::to_string(attempts) + " wrong-CID extractions succeeded";
    return out;
}

// ---------------------------------------------------------------- 10

Outcome leak_scan(const Options& o) {
    Prg rng = stream_rng(o, 1000);
    const std::size_t peers = o.quick ? 120 : 300, fetches = o.quick ? 5 : 100;
    netsim::SimConfig cfg;
    cfg.threads = o.threads;
    netsim::SimNetwork net(peers, o.seed + 1, cfg);
    std::size_t fetched = 0, leaks = 0, frames = 0;
    for (std::size_t f = 0; f < fetches; ++f) {
        const std::size_t prov = rng.uniform(peers);
        Bytes block(1000 + rng.uniform(3000));
        rng.fill(block);
        const Cid c = net.publish_block(prov, block);
        std::size_t client = rng.uniform(peers - 1);
        if (client >= prov) ++client;
        net.clear_watch();
        net.watch(c);
        net.watch(net.peer(prov).id);
        const netsim::FetchResult r = net.end_to_end_fetch(client, c);
        fetched += r.block && *r.block == block;
        leaks += net.leaks();
        frames += net.frames_scanned();
    }
    // Positive control: a plain lookup for a CID is caught by the same scan.
    net.clear_watch();
    const Cid probe = Id256::hash_of(as_bytes("scanner control"));
    net.watch(probe);
    net.iterative_lookup(0, probe, netsim::LookupMode::Plain);
    const bool control = net.leaks() > 0;
    Outcome out;
    out.ok = fetched == fetches && leaks == 0 && control;
    out.detail = std::to_string(fetched) + "/" + std::to_string(fetches) + " private fetches succeeded, " +
                 std::to_string(frames) + " frames scanned, " + std::to_string(leaks) +
                 " containing the CID or provider id; plain-lookup control " + (control ? "detected" : "NOT detected");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    o.threads = std::max(1u, std::thread::hardware_concurrency());
    std::vector<int> only;
    std::string log_path;
    CLI::App app{"Acceptance checks; one PASS/FAIL line per criterion"};
    app.add_flag("--quick", o.quick, "Reduced trial counts for development");
    app.add_option("--only", only, "Run only these criteria (1-10)")->check(CLI::Range(1, 10));
    app.add_option("--seed", o.seed, "Experiment seed");
    app.add_option("--threads", o.threads, "Worker threads for trials and expansion")->check(CLI::PositiveNumber);
    app.add_option("--log", log_path, "Also write the result lines to this file");
    CLI11_PARSE(app, argc, argv);
    std::ofstream log;
    if (!log_path.empty()) log.open(log_path);
    auto emit = [&](const std::string& line) {
        std::fputs(line.c_str(), stdout);
        std::fflush(stdout);
        if (log) log << line << std::flush;
    };
    o.only.insert(only.begin(), only.end());

    const std::vector<std::pair<std::string, std::function<Outcome(const Options&)>>> criteria = {
        {"PIR correctness", pir_correctness},
        {"oblivious expansion", oblivious_expansion},
        {"bucket normalization", normalization},
        {"hop counts, plain vs private", hop_counts},
        {"communication sizes", communication_sizes},
        {"private peer routing cost", routing_cost},
        {"provider advertisements", provider_ads},
        {"symmetric PIR game", symmetric_game},
        {"private block retrieval", private_block},
        {"wire leak scan", leak_scan},
    };
    std::size_t passed = 0, run = 0;
    bool gate = true;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = int(i) + 1;
        if (!o.only.empty() && !o.only.count(id)) continue;
        ++run;
        Outcome out;
        const auto t0 = Clock::now();
        try {
            out = criteria[i].second(o);
        } catch (const std::exception& e) {
            out.ok = false;
            out.detail = std::string("exception: ") + e.what();
        }
        const bool pass = out.ok && out.timing_ok;
        passed += pass;
        gate &= out.ok;
        std::string note;
        if (out.ok && !out.timing_ok) note = " [wall-clock bound missed; correctness holds]";
        char head[64];
        std::snprintf(head, sizeof head, "%s %2d ", pass ? "PASS" : "FAIL", id);
        emit(head + criteria[i].first + ": " + out.detail + " (" + fmt("%.0f s", seconds_since(t0)) + ")" +
             (o.quick ? " [quick]" : "") + note + "\n");
    }
    emit(std::to_string(passed) + "/" + std::to_string(run) + " criteria passed; correctness and size checks " +
         (gate ? "all hold" : "FAILED") + "\n");
    return gate ? 0 : 1;
}
