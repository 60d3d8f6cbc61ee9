#include "embcomp/vector_store.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include <nlohmann/json.hpp>

#include "byte_io.hpp"
#include "embcomp/error.hpp"

namespace embcomp {

namespace fs = std::filesystem;

namespace detail {

std::vector<std::uint8_t> read_binary_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) throw IoError("read failed for '" + path + "'");
    return bytes;
}

void write_binary_file(const std::string& path, const std::vector<std::uint8_t>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace detail

namespace {

constexpr char kEvecMagic[4] = {'E', 'V', 'C', '1'};

std::string join_ids(const std::vector<std::string>& ids) {
    std::string s;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (i) s += '\n';
        s += ids[i];
    }
    return s;
}

std::vector<std::string> split_ids(std::string_view block, std::size_t rows) {
    std::vector<std::string> ids;
    if (rows == 0) {
        if (!block.empty()) throw FormatError("EVEC: id block present for zero rows");
        return ids;
    }
    ids.reserve(rows);
    std::size_t start = 0;
    while (true) {
        const std::size_t nl = block.find('\n', start);
        ids.emplace_back(block.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start));
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    if (ids.size() != rows) {
        throw FormatError("EVEC: id block holds " + std::to_string(ids.size()) + " ids for " + std::to_string(rows) +
                          " rows");
    }
    return ids;
}

std::string trim(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    return std::string(s);
}

}  // namespace

std::vector<std::uint8_t> serialize_matrix(const QuantizedMatrix& m) {
    m.validate();
    if (m.dims > UINT32_MAX || m.rows() > UINT32_MAX) throw ValidationError("matrix too large for EVEC");
    const std::string ids = join_ids(m.ids);
    detail::ByteWriter w;
    w.bytes(kEvecMagic, 4);
    w.u8(static_cast<std::uint8_t>(m.dtype));
    w.u8(m.calibration ? 1 : 0);
    w.u32(static_cast<std::uint32_t>(m.dims));
    w.u32(static_cast<std::uint32_t>(m.rows()));
    w.u32(static_cast<std::uint32_t>(ids.size()));
    w.text(ids);
    if (m.calibration) {
        for (std::size_t d = 0; d < m.dims; ++d) {
            w.f32(m.calibration->min[d]);
            w.f32(m.calibration->max[d]);
        }
    }
    w.bytes(m.payload.data(), m.payload.size());
    return std::move(w.buffer());
}

QuantizedMatrix deserialize_matrix(const std::vector<std::uint8_t>& bytes) {
    detail::ByteReader r(bytes, "EVEC");
    const std::uint8_t* magic = r.take(4, "magic");
    if (std::memcmp(magic, kEvecMagic, 4) != 0) {
        throw FormatError("EVEC: bad magic '" + std::string(reinterpret_cast<const char*>(magic), 4) + "'");
    }
    QuantizedMatrix m;
    m.dtype = dtype_from_code(r.u8("dtype"));
    const std::uint8_t flags = r.u8("flags");
    if (flags & ~1u) throw FormatError("EVEC: unknown flag bits " + std::to_string(flags));
    m.dims = r.u32("dims");
    const std::uint32_t rows = r.u32("rows");
    const std::uint32_t id_len = r.u32("id block length");
    if (m.dims == 0) throw FormatError("EVEC: dims must be positive");
    const std::uint8_t* id_block = r.take(id_len, "id block");
    m.ids = split_ids({reinterpret_cast<const char*>(id_block), id_len}, rows);
    try {
        check_ids(m.ids);
    } catch (const ValidationError& e) {
        throw FormatError(std::string("EVEC: ") + e.what());
    }
    const bool has_calibration = flags & 1u;
    if (has_calibration != (m.dtype == DType::int8)) {
        throw FormatError(has_calibration ? "EVEC: calibration flag set on non-int8 matrix"
                                          : "EVEC: int8 matrix without calibration block");
    }
    if (has_calibration) {
        Calibration c;
        c.min.resize(m.dims);
        c.max.resize(m.dims);
        for (std::size_t d = 0; d < m.dims; ++d) {
            c.min[d] = r.f32("calibration");
            c.max[d] = r.f32("calibration");
        }
        try {
            c.validate();
        } catch (const ValidationError& e) {
            throw FormatError(std::string("EVEC: ") + e.what());
        }
        m.calibration = std::move(c);
    }
    const std::size_t expected = std::size_t{rows} * m.row_bytes();
    if (r.remaining() != expected) {
        throw FormatError("EVEC: payload length mismatch (expected " + std::to_string(expected) + " bytes, got " +
                          std::to_string(r.remaining()) + ")");
    }
    const std::uint8_t* payload = r.take(expected, "payload");
    m.payload.assign(payload, payload + expected);
    return m;
}

void write_matrix(const QuantizedMatrix& m, const fs::path& path) {
    detail::write_binary_file(path.string(), serialize_matrix(m));
}

void write_matrix(const EmbeddingMatrix& m, const fs::path& path) { write_matrix(to_quantized(m), path); }

QuantizedMatrix read_matrix(const fs::path& path) {
    const auto bytes = detail::read_binary_file(path.string());
    try {
        return deserialize_matrix(bytes);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

EmbeddingMatrix read_embeddings(const fs::path& path) {
    QuantizedMatrix q = read_matrix(path);
    if (q.dtype != DType::f32) {
        throw ValidationError(path.string() + ": expected an f32 matrix, found " + std::string(dtype_name(q.dtype)));
    }
    EmbeddingMatrix m = to_embeddings(q);
    m.validate();
    return m;
}

QuantizedMatrix to_quantized(const EmbeddingMatrix& m) {
    QuantizedMatrix q{m.ids, m.dims, DType::f32, std::vector<std::uint8_t>(m.data.size() * 4), std::nullopt};
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        const auto bits = std::bit_cast<std::uint32_t>(m.data[i]);
        for (int b = 0; b < 4; ++b) q.payload[4 * i + b] = static_cast<std::uint8_t>(bits >> (8 * b));
    }
    return q;
}

EmbeddingMatrix to_embeddings(const QuantizedMatrix& q) {
    if (q.dtype != DType::f32) throw ValidationError("to_embeddings needs an f32 payload");
    EmbeddingMatrix m{q.ids, q.dims, std::vector<float>(q.rows() * q.dims)};
    for (std::size_t i = 0; i < m.data.size(); ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) bits |= std::uint32_t{q.payload[4 * i + b]} << (8 * b);
        m.data[i] = std::bit_cast<float>(bits);
    }
    return m;
}

QrelSet parse_qrels(const std::string& text) {
    QrelSet qrels;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cols;
        std::size_t start = 0;
        while (true) {
            const std::size_t tab = line.find('\t', start);
            cols.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
            if (tab == std::string::npos) break;
            start = tab + 1;
        }
        if (lineno == 1 && cols.size() == 3 && (cols[0] == "query-id" || cols[0] == "query_id" || cols[0] == "qid")) {
            continue;
        }
        if (cols.size() != 3) {
            throw FormatError("qrels line " + std::to_string(lineno) + ": expected 3 tab-separated columns, found " +
                              std::to_string(cols.size()));
        }
        const std::string q = trim(cols[0]);
        const std::string d = trim(cols[1]);
        const std::string g = trim(cols[2]);
        if (q.empty() || d.empty()) throw FormatError("qrels line " + std::to_string(lineno) + ": empty id");
        long grade = 0;
        const auto [ptr, ec] = std::from_chars(g.data(), g.data() + g.size(), grade);
        if (ec != std::errc{} || ptr != g.data() + g.size()) {
            throw FormatError("qrels line " + std::to_string(lineno) + ": grade '" + g + "' is not an integer");
        }
        if (grade < 0) throw FormatError("qrels line " + std::to_string(lineno) + ": negative grade " + g);
        if (grade > INT32_MAX) throw FormatError("qrels line " + std::to_string(lineno) + ": grade too large");
        auto& docs = qrels[q];
        if (!docs.emplace(d, static_cast<int>(grade)).second) {
            throw FormatError("qrels line " + std::to_string(lineno) + ": duplicate pair (" + q + ", " + d + ")");
        }
    }
    return qrels;
}

QrelSet read_qrels(const fs::path& path) {
    try {
        return parse_qrels(read_text_file(path));
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

EmbeddingMatrix parse_jsonl(const std::string& text, const std::string& id_field, const std::string& vector_field) {
    EmbeddingMatrix m;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.find_first_not_of(" \t") == std::string::npos) continue;
        const std::string where = "jsonl line " + std::to_string(lineno);
        nlohmann::json obj;
        try {
            obj = nlohmann::json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw FormatError(where + ": invalid JSON (" + e.what() + ")");
        }
        if (!obj.is_object()) throw FormatError(where + ": not a JSON object");
        const auto id = obj.find(id_field);
        if (id == obj.end()) throw FormatError(where + ": missing field '" + id_field + "'");
        const auto vec = obj.find(vector_field);
        if (vec == obj.end()) throw FormatError(where + ": missing field '" + vector_field + "'");
        if (!vec->is_array() || vec->empty()) throw FormatError(where + ": '" + vector_field + "' is not a non-empty array");
        std::string id_text;
        if (id->is_string()) {
            id_text = id->get<std::string>();
        } else if (id->is_number_integer()) {
            id_text = id->dump();
        } else {
            throw FormatError(where + ": id field '" + id_field + "' is not a string");
        }
        if (m.ids.empty()) {
            m.dims = vec->size();
        } else if (vec->size() != m.dims) {
            throw FormatError(where + ": ragged dimensions (" + std::to_string(vec->size()) + " values, expected " +
                              std::to_string(m.dims) + ")");
        }
        for (const auto& v : *vec) {
            if (!v.is_number()) throw FormatError(where + ": non-numeric vector value " + v.dump());
            const auto f = static_cast<float>(v.get<double>());
            if (!std::isfinite(f)) throw FormatError(where + ": non-finite vector value " + v.dump());
            m.data.push_back(f);
        }
        m.ids.push_back(std::move(id_text));
    }
    if (m.ids.empty()) throw FormatError("jsonl input holds no vectors");
    try {
        m.validate();
    } catch (const ValidationError& e) {
        throw FormatError(std::string("jsonl: ") + e.what());
    }
    return m;
}

EmbeddingMatrix ingest_jsonl(const fs::path& path, const std::string& id_field, const std::string& vector_field) {
    try {
        return parse_jsonl(read_text_file(path), id_field, vector_field);
    } catch (const FormatError& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

std::vector<DatasetManifest> read_manifest(const fs::path& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(path.string() + ": invalid manifest JSON (" + e.what() + ")");
    }
    if (j.is_object() && j.contains("datasets")) j = j["datasets"];
    if (j.is_object()) j = nlohmann::json::array({j});
    if (!j.is_array() || j.empty()) throw FormatError(path.string() + ": manifest lists no datasets");

    const fs::path base = path.parent_path();
    std::vector<DatasetManifest> out;
    for (const auto& e : j) {
        DatasetManifest m;
        try {
            m.name = e.at("name").get<std::string>();
            m.docs = e.at("docs").get<std::string>();
            m.queries = e.at("queries").get<std::string>();
            m.qrels = e.at("qrels").get<std::string>();
            m.token_count = e.at("token_count").get<double>();
        } catch (const nlohmann::json::exception& ex) {
            throw FormatError(path.string() + ": manifest entry invalid (" + ex.what() + ")");
        }
        if (!(m.token_count > 0)) throw FormatError(path.string() + ": token_count must be positive for " + m.name);
        for (fs::path* p : {&m.docs, &m.queries, &m.qrels}) {
            if (p->is_relative()) *p = base / *p;
            if (!fs::exists(*p)) throw IoError("dataset '" + m.name + "': missing file " + p->string());
        }
        out.push_back(std::move(m));
    }
    return out;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

}  // namespace embcomp
