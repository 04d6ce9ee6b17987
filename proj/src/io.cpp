#include "livsic/io.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace livsic::io {

json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

json to_json(const Mat& M) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(to_json(M(i, j)));
        rows.push_back(row);
    }
    return rows;
}

json to_json(const Vec& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(to_json(v(i)));
    return out;
}

cplx complex_from_json(const json& j, const std::string& what) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ParseError(what + ": expected a [re, im] pair");
    cplx z{j[0].get<double>(), j[1].get<double>()};
    if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) throw ParseError(what + ": non-finite entry");
    return z;
}

Mat matrix_from_json(const json& j, Eigen::Index rows, Eigen::Index cols, const std::string& what) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw ParseError(what + ": expected " + std::to_string(rows) + " rows");
    Mat M(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j[static_cast<std::size_t>(i)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError(what + ": row " + std::to_string(i) + " must have " + std::to_string(cols) + " entries");
        for (Eigen::Index k = 0; k < cols; ++k)
            M(i, k) = complex_from_json(row[static_cast<std::size_t>(k)], what);
    }
    return M;
}

Mat matrix_from_json(const json& j, const std::string& what) {
    if (!j.is_array()) throw ParseError(what + ": expected an array of rows");
    Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    Eigen::Index cols = rows == 0 ? 0 : (j[0].is_array() ? static_cast<Eigen::Index>(j[0].size()) : -1);
    if (cols < 0) throw ParseError(what + ": expected an array of rows");
    return matrix_from_json(j, rows, cols, what);
}

json to_json(const Colligation& c) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["n"] = c.n();
    j["r"] = c.r();
    j["A"] = to_json(c.A);
    j["Phi"] = to_json(c.Phi);
    j["J"] = c.J.signs;
    return j;
}

namespace {

void check_schema(const json& j) {
    if (!j.is_object()) throw ParseError("expected a JSON object");
    if (!j.contains("schema_version") || !j["schema_version"].is_number_integer() ||
        j["schema_version"].get<int>() != kSchemaVersion)
        throw ParseError("unsupported or missing schema_version");
}

Signature signature_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("J: expected an array of +1/-1");
    std::vector<int> s;
    for (const auto& v : j) {
        if (!v.is_number_integer() || (v.get<int>() != 1 && v.get<int>() != -1))
            throw ParseError("J: entries must be +1 or -1");
        s.push_back(v.get<int>());
    }
    return Signature(std::move(s));
}

Eigen::Index get_count(const json& j, const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer() || j[key].get<long>() < 0)
        throw ParseError(std::string("missing or invalid '") + key + "'");
    return j[key].get<Eigen::Index>();
}

}  // namespace

Colligation colligation_from_json(const json& j) {
    check_schema(j);
    Eigen::Index n = get_count(j, "n"), r = get_count(j, "r");
    if (!j.contains("A") || !j.contains("Phi") || !j.contains("J")) throw ParseError("colligation needs A, Phi and J");
    Colligation c;
    c.A = matrix_from_json(j["A"], n, n, "A");
    c.Phi = matrix_from_json(j["Phi"], r, n, "Phi");
    c.J = signature_from_json(j["J"]);
    if (c.J.r() != r) throw ParseError("J must have r entries");
    double tol = 1e-8 * std::max(1.0, norm2(c.A) + std::pow(norm2(c.Phi), 2));
    ValidationReport rep = validate(c, tol);
    if (!rep.pass)
        throw ParseError("colligation identity fails: residual " + std::to_string(rep.identity_residual));
    return c;
}

json to_json(const BlaschkeProduct& bp) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["J"] = bp.J.signs;
    json fs = json::array();
    for (const auto& f : bp.factors) fs.push_back({{"lambda", to_json(f.lambda)}, {"eta", to_json(f.eta)}});
    j["factors"] = fs;
    return j;
}

BlaschkeProduct blaschke_from_json(const json& j) {
    check_schema(j);
    if (!j.contains("J") || !j.contains("factors") || !j["factors"].is_array())
        throw ParseError("factor list needs J and factors");
    BlaschkeProduct bp;
    bp.J = signature_from_json(j["J"]);
    for (const auto& f : j["factors"]) {
        if (!f.is_object() || !f.contains("lambda") || !f.contains("eta") || !f["eta"].is_array())
            throw ParseError("factor needs lambda and eta");
        ElementaryFactor ef;
        ef.lambda = complex_from_json(f["lambda"], "lambda");
        ef.eta.resize(static_cast<Eigen::Index>(f["eta"].size()));
        for (std::size_t i = 0; i < f["eta"].size(); ++i)
            ef.eta(static_cast<Eigen::Index>(i)) = complex_from_json(f["eta"][i], "eta");
        if (ef.eta.size() != bp.J.r()) throw ParseError("eta must have r entries");
        bp.factors.push_back(ef);
    }
    return bp;
}

std::string serialize(const Colligation& c) { return to_json(c).dump(2) + "\n"; }

json parse_json(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(e.what());
    }
}

Colligation parse_colligation(const std::string& text) { return colligation_from_json(parse_json(text)); }

Mat parse_matrix(const std::string& text) {
    json j = parse_json(text);
    if (j.is_object()) {
        if (!j.contains("A")) throw ParseError("matrix file needs key 'A'");
        j = j["A"];
    }
    Mat A = matrix_from_json(j, "A");
    if (A.rows() != A.cols()) throw ParseError("A must be square");
    return A;
}

namespace {

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

CsvTable read_csv(const std::string& text) {
    CsvTable t;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (t.header.empty()) {
            t.header = cells;
            continue;
        }
        if (cells.size() != t.header.size())
            throw ParseError("csv line " + std::to_string(lineno) + ": expected " + std::to_string(t.header.size()) +
                             " fields");
        std::vector<double> row;
        for (const auto& c : cells) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(c, &used));
                if (used != c.size() && c.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(c);
            } catch (const std::exception&) {
                throw ParseError("csv line " + std::to_string(lineno) + ": bad number '" + c + "'");
            }
        }
        t.rows.push_back(row);
    }
    if (t.header.empty()) throw ParseError("csv: missing header row");
    return t;
}

Mat unpack(const std::vector<double>& row, std::size_t offset, Eigen::Index rows, Eigen::Index cols) {
    Mat M(rows, cols);
    std::size_t k = offset;
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j, k += 2) M(i, j) = cplx(row[k], row[k + 1]);
    return M;
}

}  // namespace

ContinuousModelData parse_continuous_csv(const std::string& text, Eigen::Index r) {
    CsvTable t = read_csv(text);
    if (r <= 0) throw ParseError("continuous csv: r must be positive");
    if (t.header.size() < 4 || (t.header.size() - 2) % static_cast<std::size_t>(2 * r) != 0)
        throw ParseError("continuous csv: columns must be t, a, then 2 r q xi entries");
    if (t.rows.size() < 2) throw ParseError("continuous csv: need at least two rows");
    Eigen::Index q = static_cast<Eigen::Index>(t.header.size() - 2) / (2 * r);
    ContinuousModelData d;
    for (const auto& row : t.rows) {
        d.t.push_back(row[0]);
        d.a.push_back(row[1]);
        d.xi.push_back(unpack(row, 2, r, q));
    }
    if (std::abs(d.t.front()) > 1e-12) throw ParseError("continuous csv: t must start at 0");
    d.ell = d.t.back();
    d.p = rank_parameter(d.xi);
    return d;
}

StieltjesWeight parse_weight_csv(const std::string& text) {
    CsvTable t = read_csv(text);
    std::size_t entries = t.header.size() - 1;
    Eigen::Index r = static_cast<Eigen::Index>(std::lround(std::sqrt(entries / 2.0)));
    if (t.header.size() < 3 || static_cast<std::size_t>(2 * r * r) != entries)
        throw ParseError("weight csv: columns must be t then 2 r^2 entries");
    std::vector<double> grid;
    std::vector<Mat> H;
    for (const auto& row : t.rows) {
        grid.push_back(row[0]);
        H.push_back(unpack(row, 1, r, r));
    }
    try {
        return StieltjesWeight::from_samples(grid, H);
    } catch (const ShapeMismatch& e) {
        throw ParseError(std::string("weight csv: ") + e.what());
    }
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write " + path);
    out << text;
}

}  // namespace livsic::io
