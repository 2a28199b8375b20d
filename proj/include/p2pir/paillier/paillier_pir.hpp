#pragma once

#include <cstddef>
#include <memory>
#include <vector>

#include "p2pir/common/bytes.hpp"
#include "p2pir/common/prg.hpp"
#include "p2pir/paillier/paillier.hpp"
#include "p2pir/pir/types.hpp"

namespace p2pir::paillier {

// Bytes of one element of Z_M on the wire, and of row data per cell
// (strictly below M so every cell value is a valid plaintext).
std::size_t element_bytes(const PublicKey& pk);
std::size_t cell_bytes(const PublicKey& pk);
std::size_t cells_for_width(const PublicKey& pk, std::size_t row_width);

// Key material: 4-byte length + M, then 4-byte length + g as an element of Z_{M^2}.
Bytes serialize_public_key(const PublicKey& pk);
PublicKey parse_public_key(ByteSpan data);

// Deterministic expansion of a seed into n units of Z_{M^2}.
std::vector<mpz_class> expand_seed(const PublicKey& pk, const Seed& seed, std::size_t n);
mpz_class expand_seed_element(const PublicKey& pk, const Seed& seed, std::size_t j);

struct PaillierClientSecret {
    std::shared_ptr<const KeyPair> keys;
    std::size_t index = 0;
    std::size_t rows = 0;
};

struct PaillierQuery {
    PaillierClientSecret secret;
    Bytes key_material;
    Bytes body;  // seed || n masked plaintexts
};

PaillierQuery paillier_query(std::shared_ptr<const KeyPair> keys, std::size_t index,
                             std::size_t rows, Prg& rng);

// Answer payload: 4-byte cell count, then one ciphertext per cell.
Bytes paillier_respond(ByteSpan key_material, ByteSpan body, const pir::PirDatabase& db,
                       std::size_t declared_rows, const pir::RespondOptions& opts = {});

// Returns the padded row.
Bytes paillier_extract_row(const PaillierClientSecret& st, ByteSpan payload, std::size_t row_width);

}  // namespace p2pir::paillier
