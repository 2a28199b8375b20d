#include "p2pir/provider/binned_table.hpp"

#include <algorithm>

#include "p2pir/common/errors.hpp"
#include "p2pir/crypto/robust.hpp"

namespace p2pir::provider {

std::size_t bin_index(const Cid& c) {
    return (static_cast<std::size_t>(c.bytes[0]) << 4) | (c.bytes[1] >> 4);
}

BinnedTable::BinnedTable(std::string_view label) : label_(label), bins_(kBins), bin_sizes_(kBins, 0) {
    crypto::kdf(Cid{}, label);  // validates the label
    size_index_.insert(bin_sizes_.begin(), bin_sizes_.end());
}

void BinnedTable::mark(std::size_t b) {
    std::size_t bytes = 0;
    for (const auto& [c, ct] : bins_[b]) bytes += 4 + ct.size();
    size_index_.erase(size_index_.find(bin_sizes_[b]));
    bin_sizes_[b] = bytes;
    size_index_.insert(bytes);
    dirty_.insert(b);
}

void BinnedTable::put(const Cid& c, ByteSpan value) {
    put_ciphertext(c, crypto::RobustCipher(crypto::kdf(c, label_)).encrypt(value));
}

void BinnedTable::put_ciphertext(const Cid& c, ByteSpan ciphertext) {
    const std::size_t b = bin_index(c);
    auto [it, inserted] = bins_[b].insert_or_assign(c, Bytes(ciphertext.begin(), ciphertext.end()));
    if (inserted) ++records_;
    mark(b);
}

bool BinnedTable::erase(const Cid& c) {
    const std::size_t b = bin_index(c);
    if (bins_[b].erase(c) == 0) return false;
    --records_;
    mark(b);
    return true;
}

void BinnedTable::clear() {
    for (std::size_t b = 0; b < kBins; ++b)
        if (!bins_[b].empty()) {
            bins_[b].clear();
            mark(b);
        }
    records_ = 0;
}

Bytes BinnedTable::bin_bytes(std::size_t b) const {
    std::vector<const Bytes*> cts;
    for (const auto& [c, ct] : bins_.at(b)) cts.push_back(&ct);
    std::sort(cts.begin(), cts.end(), [](const Bytes* x, const Bytes* y) { return *x < *y; });
    ByteWriter w(bin_sizes_[b]);
    for (const Bytes* ct : cts) w.segment(*ct);
    return w.take();
}

std::size_t BinnedTable::max_bin_bytes() const { return *size_index_.rbegin(); }

std::size_t BinnedTable::row_width() const { return pir::framed_size(max_bin_bytes()); }

std::vector<Cid> BinnedTable::cids() const {
    std::vector<Cid> out;
    for (const auto& bin : bins_)
        for (const auto& [c, ct] : bin) out.push_back(c);
    std::sort(out.begin(), out.end());
    return out;
}

std::shared_ptr<const pir::PirDatabase> BinnedTable::database() const {
    if (snapshot_ && snapshot_->row_width() == row_width()) {
        if (dirty_.empty()) return snapshot_;
        auto next = std::make_shared<pir::PirDatabase>(*snapshot_);
        for (std::size_t b : dirty_) next->set_record(b, bin_bytes(b));
        dirty_.clear();
        snapshot_ = std::move(next);
        return snapshot_;
    }
    std::vector<Bytes> rows(kBins);
    for (std::size_t b = 0; b < kBins; ++b) rows[b] = bin_bytes(b);
    snapshot_ = std::make_shared<const pir::PirDatabase>(rows, row_width());
    dirty_.clear();
    return snapshot_;
}

std::vector<Bytes> split_bin(ByteSpan bin) {
    std::vector<Bytes> out;
    ByteReader r(bin);
    while (!r.done()) {
        ByteSpan ct = r.segment();
        out.emplace_back(ct.begin(), ct.end());
    }
    return out;
}

BinOpenResult open_bin(ByteSpan bin, const Cid& c, std::string_view label) {
    const crypto::RobustCipher cipher(crypto::kdf(c, label));
    BinOpenResult res;
    for (const Bytes& ct : split_bin(bin)) {
        ++res.records;
        if (auto pt = cipher.decrypt(ct)) {
            ++res.successes;
            if (!res.value) res.value = std::move(*pt);
        }
    }
    return res;
}

}  // namespace p2pir::provider
