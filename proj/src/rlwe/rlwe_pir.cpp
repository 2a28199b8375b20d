#include "p2pir/rlwe/rlwe_pir.hpp"

#include <algorithm>
#include <cmath>

#include "p2pir/common/errors.hpp"
#include "p2pir/rlwe/modarith.hpp"

namespace p2pir::rlwe {

namespace {

// Measured noise of a full response is roughly
//   offset(variant) + levels + (bits - 1)   bits,
// against a threshold of log2(q1 / 2t) ~ 36.7 bits.
constexpr double kNoiseCeilingBits = 28.0;
constexpr unsigned kMaxPackingBits = 14;
constexpr std::size_t kMaxRows = std::size_t{1} << 20;

double noise_offset(KeyVariant v) {
    switch (v) {
        case KeyVariant::LogN: return 12.4;
        case KeyVariant::Three: return 14.3;
        case KeyVariant::Two: return 15.2;
    }
    throw InvalidArgument("unsupported key variant");
}

}  // namespace

unsigned expansion_levels(std::size_t rows) {
    if (rows == 0) throw InvalidArgument("row count must be positive");
    std::size_t span = std::min(rows, kDegree);
    unsigned levels = 0;
    while ((std::size_t{1} << levels) < span) ++levels;
    return levels;
}

std::size_t query_ciphertexts(std::size_t rows) { return (rows + kDegree - 1) / kDegree; }

unsigned packing_bits(KeyVariant variant, unsigned levels) {
    double room = kNoiseCeilingBits - noise_offset(variant) - static_cast<double>(levels) + 1.0;
    int bits = static_cast<int>(std::floor(room));
    return static_cast<unsigned>(std::clamp(bits, 1, static_cast<int>(kMaxPackingBits)));
}

std::size_t cell_capacity(unsigned bits) { return kDegree * bits / 8; }

std::size_t cells_for_width(std::size_t row_width, unsigned bits) {
    std::size_t cap = cell_capacity(bits);
    return std::max<std::size_t>(1, (row_width + cap - 1) / cap);
}

void encode_cell(ByteSpan row, std::size_t cell, unsigned bits, std::int64_t* coeffs) {
    const std::size_t cap = cell_capacity(bits);
    const std::size_t begin = cell * cap;
    const std::size_t end = std::min(row.size(), begin + cap);
    const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
    const std::int64_t offset = std::int64_t{1} << (bits - 1);
    for (std::size_t k = 0; k < kDegree; ++k) {
        std::size_t bit = k * bits;
        std::size_t byte = begin + bit / 8;
        std::uint64_t window = 0;
        for (std::size_t b = 0; b < 3 && byte + b < end; ++b) window |= std::uint64_t{row[byte + b]} << (8 * b);
        std::int64_t x = static_cast<std::int64_t>((window >> (bit % 8)) & mask);
        coeffs[k] = x - offset;
    }
}

Plaintext encode_cell(ByteSpan row, std::size_t cell, unsigned bits) {
    std::vector<std::int64_t> c(kDegree);
    encode_cell(row, cell, bits, c.data());
    Plaintext m(kDegree);
    for (std::size_t k = 0; k < kDegree; ++k)
        m[k] = static_cast<std::uint64_t>((c[k] % static_cast<std::int64_t>(kPlainModulus) + kPlainModulus) % kPlainModulus);
    return m;
}

void decode_cell(const Plaintext& m, unsigned bits, std::span<std::uint8_t> out) {
    const std::uint64_t offset = std::uint64_t{1} << (bits - 1);
    std::fill(out.begin(), out.end(), 0);
    for (std::size_t k = 0; k < kDegree; ++k) {
        std::uint64_t x = (m[k] + offset) % kPlainModulus;
        if (x >> bits) throw DecryptionFailure("plaintext coefficient outside the packing range");
        std::size_t bit = k * bits;
        for (unsigned b = 0; b < bits; ++b, ++bit) {
            if (bit / 8 >= out.size()) {
                if ((x >> b) != 0) throw DecryptionFailure("nonzero data past the row end");
                break;
            }
            if ((x >> b) & 1) out[bit / 8] |= static_cast<std::uint8_t>(1u << (bit % 8));
        }
    }
}

RlweClientKeys make_client_keys(KeyVariant variant, unsigned levels, Prg& rng) {
    RlweClientKeys keys;
    keys.sk = generate_secret_key(rng);
    keys.material = generate_keys(keys.sk, variant, levels, rng);
    keys.material_bytes = serialize(keys.material);
    return keys;
}

RlweQuery rlwe_query(const RlweClientKeys& keys, std::size_t index, std::size_t rows, Prg& rng) {
    if (rows == 0 || rows > kMaxRows) throw InvalidArgument("unsupported row count");
    if (index >= rows) throw InvalidArgument("index out of range");
    const unsigned levels = expansion_levels(rows);
    if (keys.material.levels < levels) throw InvalidArgument("client keys cover too few expansion levels");
    RlweQuery q;
    q.secret.sk = keys.sk;
    q.secret.variant = keys.material.variant;
    q.secret.index = index;
    q.secret.rows = rows;
    q.key_material = keys.material_bytes;

    const std::uint64_t scale = inv_mod((std::uint64_t{1} << levels) % kPlainModulus, kPlainModulus);
    const std::size_t count = query_ciphertexts(rows);
    ByteWriter w(4 + count * (2 + 32 + kMaxLimbs * kPolyBytes));
    w.u32be(static_cast<std::uint32_t>(count));
    for (std::size_t k = 0; k < count; ++k) {
        Plaintext m(kDegree, 0);
        if (index / kDegree == k) m[index % kDegree] = scale;
        serialize_into(w, encrypt(keys.sk, m, kMaxLimbs, rng));
    }
    q.body = w.take();
    return q;
}

RlweQuery rlwe_query(KeyVariant variant, std::size_t index, std::size_t rows, Prg& rng) {
    if (rows == 0 || rows > kMaxRows) throw InvalidArgument("unsupported row count");
    return rlwe_query(make_client_keys(variant, expansion_levels(rows), rng), index, rows, rng);
}

namespace {

struct Accumulator {
    std::size_t cells;
    std::vector<u128> acc;  // [cell][component][coefficient]

    explicit Accumulator(std::size_t cells_) : cells(cells_), acc(cells_ * 2 * kDegree, 0) {}

    u128* slot(std::size_t cell, std::size_t comp) { return acc.data() + (cell * 2 + comp) * kDegree; }
};

class RowEncoder {
public:
    RowEncoder(unsigned bits) : bits_(bits), coeffs_(kDegree), plain_(kDegree) {}

    // Transformed centered plaintext of one cell.
    const std::uint64_t* encode(ByteSpan row, std::size_t cell) {
        const auto& ctx = RingContext::instance();
        const std::uint64_t q = ctx.modulus(0);
        encode_cell(row, cell, bits_, coeffs_.data());
        for (std::size_t k = 0; k < kDegree; ++k) {
            std::int64_t c = coeffs_[k];
            plain_[k] = c >= 0 ? static_cast<std::uint64_t>(c) : q - static_cast<std::uint64_t>(-c);
        }
        ctx.ntt(0).forward(plain_.data());
        return plain_.data();
    }

private:
    unsigned bits_;
    std::vector<std::int64_t> coeffs_;
    std::vector<std::uint64_t> plain_;
};

void multiply_accumulate(Accumulator& acc, RowEncoder& enc, const Ciphertext& ct, ByteSpan row) {
    const std::uint64_t* b = ct.b.limb(0);
    const std::uint64_t* a = ct.a.limb(0);
    for (std::size_t cell = 0; cell < acc.cells; ++cell) {
        const std::uint64_t* p = enc.encode(row, cell);
        u128* x = acc.slot(cell, 0);
        u128* y = acc.slot(cell, 1);
        for (std::size_t k = 0; k < kDegree; ++k) {
            x[k] += static_cast<u128>(b[k]) * p[k];
            y[k] += static_cast<u128>(a[k]) * p[k];
        }
    }
}

struct SubtreeState {
    Accumulator acc;
    RowEncoder enc;
    Ciphertext fold_sum;
    Ciphertext pad_sum;
    bool has_fold = false, has_pad = false;

    SubtreeState(std::size_t cells, unsigned bits) : acc(cells), enc(bits) {}
};

void accumulate_into(Ciphertext& sum, bool& has, const Ciphertext& ct) {
    if (!has) {
        sum = ct;
        has = true;
    } else {
        add_inplace(sum, ct);
    }
}

}  // namespace

Bytes rlwe_respond(const ExpansionKeys& keys, ByteSpan body, const pir::PirDatabase& db,
                   std::size_t declared_rows, const pir::RespondOptions& opts) {
    if (declared_rows == 0 || declared_rows > kMaxRows) throw InvalidArgument("unsupported declared row count");
    if (db.rows() > declared_rows) throw InvalidArgument("database larger than the declared row count");
    const unsigned levels = expansion_levels(declared_rows);
    if (levels > keys.levels() && keys.variant() == KeyVariant::LogN)
        throw InvalidArgument("key set too small for the declared row count");
    const unsigned bits = packing_bits(keys.variant(), levels);
    const std::size_t cells = cells_for_width(db.row_width(), bits);
    const std::size_t n_db = db.rows();
    const std::size_t fold_row = opts.fold_tail ? n_db - 1 : SIZE_MAX;

    ByteReader r(body);
    const std::size_t count = r.u32be();
    if (count != query_ciphertexts(declared_rows)) throw WireFormatError("query ciphertext count mismatch");
    std::vector<Ciphertext> queries;
    for (std::size_t k = 0; k < count; ++k) {
        Ciphertext ct = deserialize_ciphertext(r);
        if (ct.limbs() != kMaxLimbs) throw WireFormatError("query ciphertext at the wrong modulus");
        prepare_for_evaluation(ct);
        queries.push_back(std::move(ct));
    }
    r.expect_done();

    const std::size_t subtrees = expansion_subtrees(levels, opts.threads);
    std::vector<SubtreeState> states;
    states.reserve(subtrees);
    for (std::size_t s = 0; s < subtrees; ++s) states.emplace_back(cells, bits);

    for (std::size_t k = 0; k < count; ++k) {
        const std::size_t base = k * kDegree;
        const std::size_t limit = std::min(declared_rows - base, std::size_t{1} << levels);
        expand_depth_first(keys, queries[k], levels, opts.threads,
                           [&](std::size_t s, std::size_t u, const Ciphertext& ct) {
                               SubtreeState& st = states[s];
                               const std::size_t j = base + u;
                               if (j >= fold_row)
                                   accumulate_into(st.fold_sum, st.has_fold, ct);
                               else if (j < n_db)
                                   multiply_accumulate(st.acc, st.enc, ct, db.row(j));
                               else
                                   accumulate_into(st.pad_sum, st.has_pad, ct);
                           },
                           limit);
    }

    // Combine subtrees; folded and padding positions take one product each.
    SubtreeState& total = states[0];
    for (std::size_t s = 1; s < subtrees; ++s) {
        for (std::size_t i = 0; i < total.acc.acc.size(); ++i) total.acc.acc[i] += states[s].acc.acc[i];
        if (states[s].has_fold) accumulate_into(total.fold_sum, total.has_fold, states[s].fold_sum);
        if (states[s].has_pad) accumulate_into(total.pad_sum, total.has_pad, states[s].pad_sum);
    }
    if (total.has_fold) multiply_accumulate(total.acc, total.enc, total.fold_sum, db.row(fold_row));
    if (total.has_pad) {
        Bytes zero_row(db.row_width(), 0);
        multiply_accumulate(total.acc, total.enc, total.pad_sum, zero_row);
    }

    const std::uint64_t q = RingContext::instance().modulus(0);
    ByteWriter w(5 + cells * (2 + 2 * kPolyBytes));
    w.u8(static_cast<std::uint8_t>(bits));
    w.u32be(static_cast<std::uint32_t>(cells));
    for (std::size_t cell = 0; cell < cells; ++cell) {
        Ciphertext out = zero_ciphertext(1, true);
        const u128* x = total.acc.slot(cell, 0);
        const u128* y = total.acc.slot(cell, 1);
        for (std::size_t i = 0; i < kDegree; ++i) {
            out.b.limb(0)[i] = static_cast<std::uint64_t>(x[i] % q);
            out.a.limb(0)[i] = static_cast<std::uint64_t>(y[i] % q);
        }
        serialize_into(w, out);
    }
    return w.take();
}

Bytes rlwe_respond(KeyVariant variant, ByteSpan key_material, ByteSpan body,
                   const pir::PirDatabase& db, std::size_t declared_rows,
                   const pir::RespondOptions& opts) {
    RlweKeyMaterial km = deserialize_key_material(key_material);
    if (km.variant != variant) throw SchemeMismatch("key material variant does not match the scheme");
    ExpansionKeys keys(km);
    return rlwe_respond(keys, body, db, declared_rows, opts);
}

Bytes rlwe_extract_row(const RlweClientSecret& st, ByteSpan payload, std::size_t row_width) {
    ByteReader r(payload);
    const unsigned bits = r.u8();
    const std::size_t cells = r.u32be();
    if (bits != packing_bits(st.variant, expansion_levels(st.rows)))
        throw WireFormatError("unexpected packing width");
    if (cells != cells_for_width(row_width, bits)) throw WireFormatError("unexpected cell count");
    Bytes row(row_width, 0);
    const std::size_t cap = cell_capacity(bits);
    for (std::size_t cell = 0; cell < cells; ++cell) {
        Ciphertext ct = deserialize_ciphertext(r);
        if (ct.limbs() != 1 || ct.seed) throw WireFormatError("answer ciphertext at the wrong modulus");
        Plaintext m = decrypt(st.sk, ct);
        const std::size_t begin = cell * cap;
        const std::size_t len = std::min(cap, row_width - std::min(row_width, begin));
        decode_cell(m, bits, std::span<std::uint8_t>(row.data() + begin, len));
    }
    r.expect_done();
    return row;
}

}  // namespace p2pir::rlwe
