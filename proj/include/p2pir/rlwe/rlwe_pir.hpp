#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

#include "p2pir/common/bytes.hpp"
#include "p2pir/common/prg.hpp"
#include "p2pir/pir/types.hpp"
#include "p2pir/rlwe/expansion.hpp"

namespace p2pir::rlwe {

// Expansion depth for a table of `rows` rows: ceil(log2(min(rows, N))).
unsigned expansion_levels(std::size_t rows);
std::size_t query_ciphertexts(std::size_t rows);

// Bits of row data carried per plaintext coefficient. Chosen so the
// decryption noise of a full response stays about 2^8 below the threshold.
unsigned packing_bits(KeyVariant variant, unsigned levels);
std::size_t cell_capacity(unsigned bits);
std::size_t cells_for_width(std::size_t row_width, unsigned bits);

// Packs bytes [cell * capacity, (cell + 1) * capacity) of the row into
// centered coefficients: value x is stored as x - 2^(bits-1) mod t.
void encode_cell(ByteSpan row, std::size_t cell, unsigned bits, std::int64_t* coeffs);
Plaintext encode_cell(ByteSpan row, std::size_t cell, unsigned bits);
// Inverse of encode_cell; throws DecryptionFailure on out-of-range values.
void decode_cell(const Plaintext& m, unsigned bits, std::span<std::uint8_t> out);

struct RlweClientKeys {
    SecretKey sk;
    RlweKeyMaterial material;
    Bytes material_bytes;
};

RlweClientKeys make_client_keys(KeyVariant variant, unsigned levels, Prg& rng);

struct RlweClientSecret {
    SecretKey sk;
    KeyVariant variant = KeyVariant::LogN;
    std::size_t index = 0;
    std::size_t rows = 0;
};

struct RlweQuery {
    RlweClientSecret secret;
    Bytes key_material;
    Bytes body;
};

RlweQuery rlwe_query(KeyVariant variant, std::size_t index, std::size_t rows, Prg& rng);
RlweQuery rlwe_query(const RlweClientKeys& keys, std::size_t index, std::size_t rows, Prg& rng);

// Answer payload: packing bits (1 byte), cell count (4 bytes), then one
// data-prime ciphertext per cell.
Bytes rlwe_respond(KeyVariant variant, ByteSpan key_material, ByteSpan body,
                   const pir::PirDatabase& db, std::size_t declared_rows,
                   const pir::RespondOptions& opts = {});
// Same, with server-side keys already prepared.
Bytes rlwe_respond(const ExpansionKeys& keys, ByteSpan body, const pir::PirDatabase& db,
                   std::size_t declared_rows, const pir::RespondOptions& opts = {});

// Returns the padded row.
Bytes rlwe_extract_row(const RlweClientSecret& st, ByteSpan payload, std::size_t row_width);

}  // namespace p2pir::rlwe
