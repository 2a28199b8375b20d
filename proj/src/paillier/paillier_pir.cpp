#include "p2pir/paillier/paillier_pir.hpp"

#include <algorithm>

#include "p2pir/common/errors.hpp"
#include "p2pir/common/parallel.hpp"
#include "p2pir/crypto/hash.hpp"

namespace p2pir::paillier {

namespace {

constexpr std::size_t kMaxRows = std::size_t{1} << 20;

std::size_t bit_length(const mpz_class& v) { return mpz_sizeinbase(v.get_mpz_t(), 2); }

}  // namespace

std::size_t element_bytes(const PublicKey& pk) { return (bit_length(pk.n) + 7) / 8; }
std::size_t cell_bytes(const PublicKey& pk) { return (bit_length(pk.n) - 1) / 8; }

std::size_t cells_for_width(const PublicKey& pk, std::size_t row_width) {
    const std::size_t c = cell_bytes(pk);
    return std::max<std::size_t>(1, (row_width + c - 1) / c);
}

Bytes serialize_public_key(const PublicKey& pk) {
    const std::size_t nb = element_bytes(pk);
    ByteWriter w(8 + 3 * nb);
    w.segment(to_bytes(pk.n, nb));
    w.segment(to_bytes(pk.g, 2 * nb));
    return w.take();
}

PublicKey parse_public_key(ByteSpan data) {
    ByteReader r(data);
    ByteSpan nb = r.segment();
    ByteSpan gb = r.segment();
    r.expect_done();
    mpz_class n = from_bytes(nb);
    if (n < 3 || mpz_even_p(n.get_mpz_t())) throw WireFormatError("invalid Paillier modulus");
    if (bit_length(n) < 64 || nb.size() != (bit_length(n) + 7) / 8)
        throw WireFormatError("Paillier modulus encoding has the wrong width");
    PublicKey pk = PublicKey::from_modulus(n);
    if (gb.size() != 2 * nb.size() || from_bytes(gb) != pk.g)
        throw WireFormatError("unsupported Paillier generator");
    return pk;
}

mpz_class expand_seed_element(const PublicKey& pk, const Seed& seed, std::size_t j) {
    const std::size_t bits = bit_length(pk.n2);
    const std::size_t len = (bits + 7) / 8;
    Bytes input(seed.size() + 8);
    std::copy(seed.begin(), seed.end(), input.begin());
    store_u32be(input.data() + seed.size(), static_cast<std::uint32_t>(j));
    mpz_class c, g;
    for (std::uint32_t attempt = 0;; ++attempt) {
        store_u32be(input.data() + seed.size() + 4, attempt);
        Bytes cand = crypto::shake256(input, len);
        if (bits % 8) cand[0] &= static_cast<std::uint8_t>((1u << (bits % 8)) - 1);
        c = from_bytes(cand);
        if (c == 0 || c >= pk.n2) continue;
        mpz_gcd(g.get_mpz_t(), c.get_mpz_t(), pk.n.get_mpz_t());
        if (g == 1) return c;
    }
}

std::vector<mpz_class> expand_seed(const PublicKey& pk, const Seed& seed, std::size_t n) {
    std::vector<mpz_class> out(n);
    for (std::size_t j = 0; j < n; ++j) out[j] = expand_seed_element(pk, seed, j);
    return out;
}

PaillierQuery paillier_query(std::shared_ptr<const KeyPair> keys, std::size_t index,
                             std::size_t rows, Prg& rng) {
    if (!keys) throw InvalidArgument("missing Paillier keys");
    if (rows == 0 || rows > kMaxRows) throw InvalidArgument("unsupported row count");
    if (index >= rows) throw InvalidArgument("index out of range");
    const PublicKey& pk = keys->pk;
    const std::size_t nb = element_bytes(pk);
    Seed seed = rng.next_seed();
    PaillierQuery q;
    q.key_material = serialize_public_key(pk);
    ByteWriter w(seed.size() + rows * nb);
    w.raw(seed);
    for (std::size_t j = 0; j < rows; ++j) {
        mpz_class r = decrypt(*keys, expand_seed_element(pk, seed, j));
        mpz_class p = (j == index ? 1 : 0) - r;
        p %= pk.n;
        if (p < 0) p += pk.n;
        w.raw(to_bytes(p, nb));
    }
    q.body = w.take();
    q.secret = {std::move(keys), index, rows};
    return q;
}

Bytes paillier_respond(ByteSpan key_material, ByteSpan body, const pir::PirDatabase& db,
                       std::size_t declared_rows, const pir::RespondOptions& opts) {
    if (declared_rows == 0 || declared_rows > kMaxRows) throw InvalidArgument("unsupported declared row count");
    if (db.rows() > declared_rows) throw InvalidArgument("database larger than the declared row count");
    const PublicKey pk = parse_public_key(key_material);
    const std::size_t nb = element_bytes(pk);
    ByteReader r(body);
    Seed seed;
    ByteSpan sb = r.raw(seed.size());
    std::copy(sb.begin(), sb.end(), seed.begin());
    std::vector<mpz_class> masked(declared_rows);
    for (auto& p : masked) {
        p = from_bytes(r.raw(nb));
        if (p >= pk.n) throw WireFormatError("masked plaintext outside Z_M");
    }
    r.expect_done();

    // Rows past the table are zero and contribute nothing; with fold_tail
    // every position from the last row on is summed onto the last row.
    const std::size_t n_db = db.rows();
    const std::size_t live = opts.fold_tail ? declared_rows : n_db;
    std::vector<mpz_class> bases(n_db);
    for (std::size_t j = 0; j < live; ++j) {
        mpz_class c = expand_seed_element(pk, seed, j);
        c = c * ((1 + masked[j] * pk.n) % pk.n2) % pk.n2;
        std::size_t slot = std::min(j, n_db - 1);
        if (bases[slot] == 0) bases[slot] = c;
        else bases[slot] = bases[slot] * c % pk.n2;
    }

    const std::size_t width = db.row_width();
    const std::size_t cb = cell_bytes(pk);
    const std::size_t cells = cells_for_width(pk, width);
    std::vector<mpz_class> results(cells);
    parallel_for(0, cells, opts.threads, [&](std::size_t k) {
        std::vector<mpz_class> exps(n_db);
        const std::size_t off = k * cb;
        for (std::size_t j = 0; j < n_db; ++j) {
            ByteSpan row = db.row(j);
            if (off < width) exps[j] = from_bytes(row.subspan(off, std::min(cb, width - off)));
        }
        results[k] = multi_exp(bases, exps, pk.n2);
    });
    ByteWriter w(4 + cells * 2 * nb);
    w.u32be(static_cast<std::uint32_t>(cells));
    for (const auto& c : results) w.raw(to_bytes(c, 2 * nb));
    return w.take();
}

Bytes paillier_extract_row(const PaillierClientSecret& st, ByteSpan payload, std::size_t row_width) {
    if (!st.keys) throw InvalidArgument("missing Paillier keys");
    const KeyPair& kp = *st.keys;
    const std::size_t nb = element_bytes(kp.pk);
    const std::size_t cb = cell_bytes(kp.pk);
    ByteReader r(payload);
    const std::size_t cells = r.u32be();
    if (cells != cells_for_width(kp.pk, row_width)) throw WireFormatError("unexpected cell count");
    Bytes row(row_width);
    for (std::size_t k = 0; k < cells; ++k) {
        mpz_class c = from_bytes(r.raw(2 * nb));
        mpz_class m = decrypt(kp, c);
        const std::size_t off = k * cb;
        const std::size_t len = std::min(cb, row_width - std::min(row_width, off));
        if (bit_length(m) > 8 * len && m != 0) throw DecryptionFailure("cell value exceeds the row width");
        if (len) {
            Bytes v = to_bytes(m, len);
            std::copy(v.begin(), v.end(), row.begin() + off);
        }
    }
    r.expect_done();
    return row;
}

}  // namespace p2pir::paillier
