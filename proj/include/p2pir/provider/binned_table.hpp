#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "p2pir/common/bytes.hpp"
#include "p2pir/common/id.hpp"
#include "p2pir/pir/types.hpp"

namespace p2pir::provider {

inline constexpr std::size_t kBinBits = 12;
inline constexpr std::size_t kBins = std::size_t{1} << kBinBits;

// First 12 bits of the CID.
std::size_t bin_index(const Cid& c);

// Values keyed by CID, each robustly encrypted under kdf(cid, label) and
// placed in the bin of its CID. A bin is the concatenation of
// 4-byte big-endian length || ciphertext, ordered by ciphertext bytes; all
// bins are zero-padded to the largest bin.
class BinnedTable {
public:
    explicit BinnedTable(std::string_view label);

    const std::string& label() const { return label_; }
    void put(const Cid& c, ByteSpan value);
    bool erase(const Cid& c);
    void clear();
    // Replaces a stored ciphertext verbatim (for tests of the SPIR property).
    void put_ciphertext(const Cid& c, ByteSpan ciphertext);

    std::size_t records() const { return records_; }
    std::size_t bin_records(std::size_t b) const { return bins_.at(b).size(); }
    Bytes bin_bytes(std::size_t b) const;
    std::size_t max_bin_bytes() const;
    std::size_t row_width() const;
    std::vector<Cid> cids() const;

    // Immutable snapshot of the padded table; only bins touched since the
    // previous snapshot are re-encoded unless the padding width changed.
    std::shared_ptr<const pir::PirDatabase> database() const;

    bool operator==(const BinnedTable& o) const { return label_ == o.label_ && bins_ == o.bins_; }

private:
    void mark(std::size_t b);

    std::string label_;
    std::vector<std::map<Cid, Bytes>> bins_;
    std::vector<std::size_t> bin_sizes_;
    std::multiset<std::size_t> size_index_;
    std::size_t records_ = 0;
    mutable std::shared_ptr<const pir::PirDatabase> snapshot_;
    mutable std::set<std::size_t> dirty_;
};

std::vector<Bytes> split_bin(ByteSpan bin);

struct BinOpenResult {
    std::optional<Bytes> value;
    std::size_t successes = 0;
    std::size_t records = 0;
};

// Tries every record of a recovered bin under kdf(c, label).
BinOpenResult open_bin(ByteSpan bin, const Cid& c, std::string_view label);

}  // namespace p2pir::provider
