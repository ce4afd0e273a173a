#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lasagne/sgns.hpp"

namespace lasagne {

namespace {
constexpr char kBinaryMagic[4] = {'L', 'E', 'M', 'B'};
}

void save_embeddings(const std::string& path, const Eigen::MatrixXd& emb, const CsrGraph& g,
                     bool binary) {
    if (emb.rows() != static_cast<Eigen::Index>(g.num_nodes()))
        throw DataError("save_embeddings: row count does not match the graph");
    if (binary) {
        std::FILE* f = std::fopen(path.c_str(), "wb");
        if (!f) throw DataError("cannot write embedding file: " + path);
        std::fwrite(kBinaryMagic, 1, 4, f);
        const auto n = static_cast<std::uint32_t>(emb.rows());
        const auto d = static_cast<std::uint32_t>(emb.cols());
        std::fwrite(&n, 4, 1, f);
        std::fwrite(&d, 4, 1, f);
        for (std::uint32_t i = 0; i < n; ++i) {
            const auto& label = g.external_id(i);
            const auto len = static_cast<std::uint32_t>(label.size());
            std::fwrite(&len, 4, 1, f);
            std::fwrite(label.data(), 1, len, f);
            for (std::uint32_t j = 0; j < d; ++j) {
                const double v = emb(i, j);
                std::fwrite(&v, 8, 1, f);
            }
        }
        if (std::fclose(f) != 0) throw DataError("failed to flush embedding file: " + path);
        return;
    }
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw DataError("cannot write embedding file: " + path);
    std::fprintf(f, "%u %u\n", static_cast<std::uint32_t>(emb.rows()),
                 static_cast<std::uint32_t>(emb.cols()));
    for (Eigen::Index i = 0; i < emb.rows(); ++i) {
        std::fputs(g.external_id(static_cast<NodeId>(i)).c_str(), f);
        for (Eigen::Index j = 0; j < emb.cols(); ++j) std::fprintf(f, " %.17g", emb(i, j));
        std::fputc('\n', f);
    }
    if (std::fclose(f) != 0) throw DataError("failed to flush embedding file: " + path);
}

Eigen::MatrixXd load_embeddings(const std::string& path, const CsrGraph& g) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open embedding file: " + path);

    char magic[4] = {};
    in.read(magic, 4);
    if (in.gcount() == 4 && std::memcmp(magic, kBinaryMagic, 4) == 0) {
        std::uint32_t n = 0, d = 0;
        in.read(reinterpret_cast<char*>(&n), 4);
        in.read(reinterpret_cast<char*>(&d), 4);
        if (!in || n != g.num_nodes()) throw DataError("embedding file does not match the graph");
        Eigen::MatrixXd emb(n, d);
        std::vector<char> buf;
        for (std::uint32_t i = 0; i < n; ++i) {
            std::uint32_t len = 0;
            in.read(reinterpret_cast<char*>(&len), 4);
            if (!in || len > (1u << 20)) throw DataError("corrupt embedding file: " + path);
            buf.assign(len, 0);
            in.read(buf.data(), len);
            const std::string label(buf.begin(), buf.end());
            auto id = g.internal_id(label);
            if (!id) throw DataError("embedding file references unknown node '" + label + "'");
            for (std::uint32_t j = 0; j < d; ++j) {
                double v = 0;
                in.read(reinterpret_cast<char*>(&v), 8);
                emb(*id, j) = v;
            }
            if (!in) throw DataError("truncated embedding file: " + path);
        }
        return emb;
    }

    in.clear();
    in.seekg(0);
    std::uint64_t n = 0, d = 0;
    if (!(in >> n >> d)) throw DataError("embedding file: bad header line");
    if (n != g.num_nodes())
        throw DataError("embedding file node count does not match the graph");
    Eigen::MatrixXd emb(n, d);
    std::vector<char> seen(n, 0);
    for (std::uint64_t i = 0; i < n; ++i) {
        std::string label;
        if (!(in >> label)) throw DataError("truncated embedding file: " + path);
        auto id = g.internal_id(label);
        if (!id) throw DataError("embedding file references unknown node '" + label + "'");
        if (seen[*id]) throw DataError("duplicate embedding row for node '" + label + "'");
        seen[*id] = 1;
        for (std::uint64_t j = 0; j < d; ++j) {
            double v;
            if (!(in >> v)) throw DataError("embedding file: bad value on row for '" + label + "'");
            emb(*id, j) = v;
        }
    }
    return emb;
}

} // namespace lasagne
