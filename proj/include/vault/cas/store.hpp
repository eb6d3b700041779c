#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "vault/bytes.hpp"
#include "vault/error.hpp"
#include "vault/hash.hpp"

namespace vault::cas {

inline constexpr std::size_t chunk_size = 262144;  // 256 KiB
inline constexpr std::size_t fan_out = 174;
inline constexpr char cid_prefix[] = "cidv1-";

// Splits a blob into 256 KiB chunks; every chunk except possibly the last is
// full. The empty blob maps to a single empty chunk so CIDs stay total.
inline std::vector<Bytes> chunk_bytes(ByteView blob) {
    std::vector<Bytes> chunks;
    if (blob.empty()) {
        chunks.emplace_back();
        return chunks;
    }
    for (std::size_t at = 0; at < blob.size(); at += chunk_size) {
        std::size_t len = std::min(chunk_size, blob.size() - at);
        chunks.emplace_back(blob.begin() + at, blob.begin() + at + len);
    }
    return chunks;
}

struct MerkleNode {
    enum class Kind : std::uint8_t { leaf = 0, interior = 1 };

    Kind kind = Kind::leaf;
    Bytes data;                         // leaf payload
    std::vector<std::string> children;  // interior child CIDs, in order
    std::uint64_t total_size = 0;       // bytes of all descendant leaf data

    // Canonical encoding: kind byte || u64be total_size || leaf data, or the
    // concatenated child CID texts for interior nodes.
    Bytes encode() const {
        Bytes out;
        out.push_back(static_cast<std::uint8_t>(kind));
        put_u64be(out, total_size);
        if (kind == Kind::leaf) {
            append(out, data);
        } else {
            for (const auto& cid : children) append(out, as_view(cid));
        }
        return out;
    }

    static MerkleNode decode(ByteView raw) {
        if (raw.size() < 9) raise(Errc::malformed_input, "node encoding too short");
        MerkleNode node;
        if (raw[0] > 1) raise(Errc::malformed_input, "unknown node kind");
        node.kind = static_cast<Kind>(raw[0]);
        node.total_size = get_u64be(raw, 1);
        ByteView body = raw.subspan(9);
        if (node.kind == Kind::leaf) {
            node.data.assign(body.begin(), body.end());
            if (node.data.size() != node.total_size)
                raise(Errc::malformed_input, "leaf size mismatch");
        } else {
            constexpr std::size_t cid_len = sizeof(cid_prefix) - 1 + 64;
            if (body.empty() || body.size() % cid_len != 0)
                raise(Errc::malformed_input, "interior body not a CID list");
            for (std::size_t at = 0; at < body.size(); at += cid_len)
                node.children.push_back(to_string(body.subspan(at, cid_len)));
        }
        return node;
    }
};

inline std::string cid_of(const MerkleNode& node) {
    return cid_prefix + hex_encode(sha256(node.encode()));
}

inline std::string cid_hex(const std::string& cid) {
    constexpr std::size_t prefix_len = sizeof(cid_prefix) - 1;
    if (cid.size() != prefix_len + 64 || cid.rfind(cid_prefix, 0) != 0)
        raise(Errc::not_found, "not a CID: " + cid);
    for (std::size_t i = prefix_len; i < cid.size(); ++i)
        if (hex_nibble(cid[i]) < 0 || (cid[i] >= 'A' && cid[i] <= 'F'))
            raise(Errc::not_found, "not a CID: " + cid);
    return cid.substr(prefix_len);
}

// Builds the DAG bottom-up, level by level, grouping up to fan_out children
// per interior node. Returns every node with the root last.
inline std::vector<MerkleNode> build_dag_nodes(const std::vector<Bytes>& chunks) {
    if (chunks.empty()) raise(Errc::empty_chunk_list, "cannot build a DAG over zero chunks");

    std::vector<MerkleNode> nodes;
    struct LevelEntry {
        std::string cid;
        std::uint64_t total_size;
    };
    std::vector<LevelEntry> level;
    for (const auto& chunk : chunks) {
        MerkleNode leaf;
        leaf.kind = MerkleNode::Kind::leaf;
        leaf.data = chunk;
        leaf.total_size = chunk.size();
        level.push_back({cid_of(leaf), leaf.total_size});
        nodes.push_back(std::move(leaf));
    }
    while (level.size() > 1) {
        std::vector<LevelEntry> next;
        for (std::size_t at = 0; at < level.size(); at += fan_out) {
            std::size_t end = std::min(at + fan_out, level.size());
            MerkleNode interior;
            interior.kind = MerkleNode::Kind::interior;
            for (std::size_t i = at; i < end; ++i) {
                interior.children.push_back(level[i].cid);
                interior.total_size += level[i].total_size;
            }
            next.push_back({cid_of(interior), interior.total_size});
            nodes.push_back(std::move(interior));
        }
        level = std::move(next);
    }
    return nodes;
}

inline MerkleNode build_dag(const std::vector<Bytes>& chunks) {
    auto nodes = build_dag_nodes(chunks);
    return nodes.back();
}

// One file per node under <root>/objects/<first-2-hex>/<full-hex>, written
// temp-then-rename. Concurrent readers are fine; callers serialize writes.
class Store {
public:
    explicit Store(std::filesystem::path root) : root_(std::move(root)) {
        std::error_code ec;
        std::filesystem::create_directories(root_ / "objects", ec);
        if (ec) raise(Errc::storage_failure, "cannot create store at " + root_.string());
    }

    std::string put(ByteView blob) {
        auto nodes = build_dag_nodes(chunk_bytes(blob));
        for (const auto& node : nodes) put_node(node);
        return cid_of(nodes.back());
    }

    Bytes get(const std::string& cid) const {
        MerkleNode node = load_node(cid);
        if (node.kind == MerkleNode::Kind::leaf) return node.data;
        Bytes out;
        out.reserve(node.total_size);
        for (const auto& child : node.children) {
            Bytes part = get(child);
            append(out, part);
        }
        if (out.size() != node.total_size)
            raise(Errc::integrity_failure, "reassembled size diverges from " + cid);
        return out;
    }

    bool has(const std::string& cid) const {
        try {
            return std::filesystem::exists(object_path(cid_hex(cid)));
        } catch (const Error&) {
            return false;
        }
    }

    bool verify(const std::string& cid) const {
        try {
            MerkleNode node = load_node(cid);
            if (node.kind == MerkleNode::Kind::interior)
                for (const auto& child : node.children)
                    if (!verify(child)) return false;
            return true;
        } catch (const Error&) {
            return false;
        }
    }

    std::size_t object_count() const {
        std::size_t count = 0;
        for (const auto& entry :
             std::filesystem::recursive_directory_iterator(root_ / "objects"))
            if (entry.is_regular_file()) ++count;
        return count;
    }

    std::filesystem::path object_path(const std::string& hex) const {
        return root_ / "objects" / hex.substr(0, 2) / hex;
    }

    const std::filesystem::path& root() const { return root_; }

private:
    void put_node(const MerkleNode& node) {
        Bytes encoded = node.encode();
        std::string hex = hex_encode(sha256(encoded));
        auto path = object_path(hex);
        if (std::filesystem::exists(path)) return;  // dedup

        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
        if (ec) raise(Errc::storage_failure, "cannot create " + path.parent_path().string());
        auto tmp = path;
        tmp += ".tmp";
        {
            std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
            out.write(reinterpret_cast<const char*>(encoded.data()),
                      static_cast<std::streamsize>(encoded.size()));
            if (!out) raise(Errc::storage_failure, "write failed for " + tmp.string());
        }
        std::filesystem::rename(tmp, path, ec);
        if (ec) raise(Errc::storage_failure, "rename failed for " + path.string());
    }

    MerkleNode load_node(const std::string& cid) const {
        std::string hex = cid_hex(cid);
        auto path = object_path(hex);
        std::ifstream in(path, std::ios::binary);
        if (!in) raise(Errc::not_found, "no object for " + cid);
        Bytes raw((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        if (hex_encode(sha256(raw)) != hex)
            raise(Errc::integrity_failure, "stored bytes no longer match " + cid);
        try {
            return MerkleNode::decode(raw);
        } catch (const Error&) {
            raise(Errc::integrity_failure, "undecodable node for " + cid);
        }
    }

    std::filesystem::path root_;
};

}  // namespace vault::cas
