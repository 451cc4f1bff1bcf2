#pragma once

// Experiment tables: ingestion, natural <-> coded transforms, polynomial design
// matrices and replicate groups.

#include <cmath>
#include <cstddef>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hybreg/config.hpp"
#include "hybreg/errors.hpp"
#include "hybreg/linalg.hpp"

namespace hybreg {

/// One explanatory variable and its coding. Coding maps low/center/high to -1/0/+1.
struct FactorSpec {
    std::string name;
    double low = -1.0;
    double high = 1.0;
    double center = 0.0;
    std::string units;
    /// Table column holding pre-coded levels, if the table carries one.
    std::optional<std::string> coded_column;

    double half_range() const { return 0.5 * (high - low); }

    double code(double natural) const {
        const double h = half_range();
        if (!(h > 0.0)) throw DegenerateFactorError("factor '" + name + "' has zero half-range");
        if (natural == low) return -1.0;
        if (natural == high) return 1.0;
        if (natural == center) return 0.0;
        return (natural - center) / h;
    }

    double decode(double coded) const {
        if (coded == -1.0) return low;
        if (coded == 1.0) return high;
        if (coded == 0.0) return center;
        return center + coded * half_range();
    }
};

/// Validates low < center < high; the center defaults to the midpoint.
inline FactorSpec make_factor(std::string name, double low, double high, std::optional<double> center = std::nullopt) {
    FactorSpec f;
    f.name = std::move(name);
    f.low = low;
    f.high = high;
    f.center = center.value_or(0.5 * (low + high));
    if (!(f.low < f.high))
        throw DegenerateFactorError("factor '" + f.name + "': low must be below high");
    if (!(f.low < f.center && f.center < f.high))
        throw ContractError("factor '" + f.name + "': center must lie strictly between low and high");
    return f;
}

struct Schema {
    std::vector<FactorSpec> factors;
    std::string response;
    std::string response_units;
};

/// Reads `factor.<name> = low, high[, center]`, `factor.<name>.units`, `factor.<name>.coded`,
/// `response` and `response.units`.
inline Schema schema_from_config(const KeyValueConfig& cfg) {
    Schema s;
    for (const auto& [key, value] : cfg.entries()) {
        if (!detail::starts_with(key, "factor.")) continue;
        const std::string rest = key.substr(7);
        if (rest.find('.') != std::string::npos) continue;
        const auto parts = detail::split_list(value);
        if (parts.size() < 2 || parts.size() > 3)
            throw SchemaError("factor '" + rest + "' needs 'low, high[, center]'");
        std::vector<double> nums;
        for (const auto& p : parts) {
            const auto d = detail::parse_double(p);
            if (!d) throw SchemaError("factor '" + rest + "': '" + p + "' is not a number");
            nums.push_back(*d);
        }
        FactorSpec f = make_factor(rest, nums[0], nums[1],
                                   nums.size() == 3 ? std::optional<double>(nums[2]) : std::nullopt);
        f.units = cfg.get("factor." + rest + ".units").value_or("");
        if (auto c = cfg.get("factor." + rest + ".coded")) f.coded_column = *c;
        s.factors.push_back(std::move(f));
    }
    if (s.factors.empty()) throw SchemaError("spec declares no factors");
    const auto resp = cfg.get("response");
    if (!resp || resp->empty()) throw SchemaError("spec declares no response column");
    s.response = *resp;
    s.response_units = cfg.get("response.units").value_or("");
    return s;
}

/// Observation table. Rows keep run order; every numeric column of the source
/// table is retained so auxiliary columns (printed theory values etc.) stay addressable.
struct Dataset {
    std::vector<FactorSpec> factors;
    Matrix natural;  ///< n x k, natural units
    Vector response;
    std::string response_name;
    std::string response_units;
    std::optional<Matrix> declared_coded;  ///< n x k, from coded columns when the schema names them
    std::vector<std::string> column_names;
    Matrix table;  ///< every column of the source, file order

    std::size_t rows() const { return static_cast<std::size_t>(natural.rows()); }
    std::size_t factor_count() const { return factors.size(); }

    std::optional<Vector> column(const std::string& name) const {
        for (std::size_t j = 0; j < column_names.size(); ++j)
            if (column_names[j] == name) return Vector(table.col(static_cast<Index>(j)));
        return std::nullopt;
    }
};

namespace detail {

inline std::vector<std::string> split_row(const std::string& line, char delim) {
    std::vector<std::string> out;
    if (delim == ' ') {
        std::istringstream in(line);
        std::string tok;
        while (in >> tok) out.push_back(tok);
        return out;
    }
    std::string cur;
    for (char c : line) {
        if (c == delim) {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(trim(cur));
    return out;
}

inline char detect_delimiter(const std::string& header) {
    if (header.find('\t') != std::string::npos) return '\t';
    if (header.find(',') != std::string::npos) return ',';
    return ' ';
}

inline std::size_t find_column(const std::vector<std::string>& names, const std::string& wanted) {
    for (std::size_t j = 0; j < names.size(); ++j)
        if (names[j] == wanted) return j;
    throw SchemaError("column '" + wanted + "' not found in table header");
}

}  // namespace detail

/// Parses a header-row delimited table (tab, comma or whitespace; '.' decimals; '#' comments).
inline Dataset load_table(std::istream& source, const Schema& schema) {
    std::string line;
    std::vector<std::string> header;
    char delim = '\t';
    std::vector<std::vector<double>> cells;
    std::size_t data_row = 0;
    while (std::getline(source, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::string t = detail::trim(line);
        if (t.empty() || t.front() == '#') continue;
        if (header.empty()) {
            delim = detail::detect_delimiter(t);
            header = detail::split_row(t, delim);
            continue;
        }
        ++data_row;
        const auto parts = detail::split_row(t, delim);
        if (parts.size() != header.size())
            throw ParseError("expected " + std::to_string(header.size()) + " cells, found " +
                                 std::to_string(parts.size()),
                             data_row, parts.size());
        std::vector<double> row;
        row.reserve(parts.size());
        for (std::size_t j = 0; j < parts.size(); ++j) {
            const auto v = detail::parse_double(parts[j]);
            if (!v) throw ParseError("non-numeric cell '" + parts[j] + "'", data_row, j);
            row.push_back(*v);
        }
        cells.push_back(std::move(row));
    }
    if (header.empty()) throw SchemaError("table has no header row");
    if (cells.empty()) throw SchemaError("no data rows");

    Dataset ds;
    ds.factors = schema.factors;
    ds.response_name = schema.response;
    ds.response_units = schema.response_units;
    ds.column_names = header;

    const auto n = static_cast<Index>(cells.size());
    const auto ncol = static_cast<Index>(header.size());
    ds.table.resize(n, ncol);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < ncol; ++j) ds.table(i, j) = cells[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];

    const auto k = static_cast<Index>(schema.factors.size());
    ds.natural.resize(n, k);
    bool any_coded = false;
    for (const auto& f : schema.factors) any_coded = any_coded || f.coded_column.has_value();
    Matrix coded = Matrix::Zero(n, k);
    for (Index j = 0; j < k; ++j) {
        const auto& f = schema.factors[static_cast<std::size_t>(j)];
        ds.natural.col(j) = ds.table.col(static_cast<Index>(detail::find_column(header, f.name)));
        if (f.coded_column)
            coded.col(j) = ds.table.col(static_cast<Index>(detail::find_column(header, *f.coded_column)));
    }
    if (any_coded) {
        // Factors without a coded column fall back to the affine coding.
        for (Index j = 0; j < k; ++j) {
            const auto& f = schema.factors[static_cast<std::size_t>(j)];
            if (!f.coded_column)
                for (Index i = 0; i < n; ++i) coded(i, j) = f.code(ds.natural(i, j));
        }
        ds.declared_coded = coded;
    }
    ds.response = ds.table.col(static_cast<Index>(detail::find_column(header, schema.response)));
    return ds;
}

inline Dataset load_table(const std::string& text, const Schema& schema) {
    std::istringstream in(text);
    return load_table(in, schema);
}

/// Affine coding of the natural factor levels: (xi - center) / half-range.
inline Matrix code(const Dataset& ds) {
    Matrix out(ds.natural.rows(), ds.natural.cols());
    for (Index j = 0; j < ds.natural.cols(); ++j) {
        const auto& f = ds.factors[static_cast<std::size_t>(j)];
        for (Index i = 0; i < ds.natural.rows(); ++i) out(i, j) = f.code(ds.natural(i, j));
    }
    return out;
}

inline Matrix decode(const std::vector<FactorSpec>& factors, const Matrix& coded) {
    Matrix out(coded.rows(), coded.cols());
    for (Index j = 0; j < coded.cols(); ++j) {
        const auto& f = factors[static_cast<std::size_t>(j)];
        for (Index i = 0; i < coded.rows(); ++i) out(i, j) = f.decode(coded(i, j));
    }
    return out;
}

/// The coded levels used for fitting: declared coded columns win over the affine coding.
inline Matrix coded_levels(const Dataset& ds) {
    return ds.declared_coded ? *ds.declared_coded : code(ds);
}

struct CodingDiscrepancy {
    std::size_t row = 0;  ///< 0-based
    std::string factor;
    double natural = 0.0;
    double computed = 0.0;
    double declared = 0.0;
};

/// Rows where the declared coded level disagrees with the coding of the natural value.
inline std::vector<CodingDiscrepancy> coding_discrepancies(const Dataset& ds, double tol = 1e-3) {
    std::vector<CodingDiscrepancy> out;
    if (!ds.declared_coded) return out;
    const Matrix computed = code(ds);
    for (Index i = 0; i < computed.rows(); ++i)
        for (Index j = 0; j < computed.cols(); ++j)
            if (std::abs(computed(i, j) - (*ds.declared_coded)(i, j)) > tol)
                out.push_back({static_cast<std::size_t>(i), ds.factors[static_cast<std::size_t>(j)].name,
                               ds.natural(i, j), computed(i, j), (*ds.declared_coded)(i, j)});
    return out;
}

enum class ModelOrder { first, second };

struct DesignMatrix {
    Matrix x;
    std::vector<std::string> labels;

    Index rows() const { return x.rows(); }
    Index cols() const { return x.cols(); }

    bool full_column_rank(double rank_tol = default_tolerances.rank) const {
        return x.rows() >= x.cols() && numerical_rank(x, rank_tol) == x.cols();
    }
};

/// Polynomial basis expansion: [1, x_1..x_k] for first order; second order appends
/// x_1^2..x_k^2 and then x_i x_j (i < j) in lexicographic order.
inline DesignMatrix build_design(const Matrix& coded, ModelOrder order, std::vector<std::string> names = {}) {
    const Index n = coded.rows();
    const Index k = coded.cols();
    if (names.empty())
        for (Index j = 0; j < k; ++j) names.push_back("x" + std::to_string(j + 1));

    Index cols = 1 + k;
    if (order == ModelOrder::second) cols += k + k * (k - 1) / 2;

    DesignMatrix dm;
    dm.x.resize(n, cols);
    dm.x.col(0).setOnes();
    dm.labels.push_back("1");
    Index c = 1;
    for (Index j = 0; j < k; ++j, ++c) {
        dm.x.col(c) = coded.col(j);
        dm.labels.push_back(names[static_cast<std::size_t>(j)]);
    }
    if (order == ModelOrder::second) {
        for (Index j = 0; j < k; ++j, ++c) {
            dm.x.col(c) = coded.col(j).cwiseAbs2();
            dm.labels.push_back(names[static_cast<std::size_t>(j)] + "^2");
        }
        for (Index a = 0; a < k; ++a)
            for (Index b = a + 1; b < k; ++b, ++c) {
                dm.x.col(c) = coded.col(a).cwiseProduct(coded.col(b));
                dm.labels.push_back(names[static_cast<std::size_t>(a)] + "*" + names[static_cast<std::size_t>(b)]);
            }
    }
    return dm;
}

using ReplicateGroups = std::vector<std::vector<std::size_t>>;

/// Rows with exactly equal coded settings, in order of first appearance. Singletons included.
inline ReplicateGroups replicate_groups(const Matrix& coded) {
    std::map<std::vector<double>, std::size_t> slot;
    ReplicateGroups groups;
    for (Index i = 0; i < coded.rows(); ++i) {
        std::vector<double> key(static_cast<std::size_t>(coded.cols()));
        for (Index j = 0; j < coded.cols(); ++j) key[static_cast<std::size_t>(j)] = coded(i, j);
        auto [it, inserted] = slot.try_emplace(std::move(key), groups.size());
        if (inserted) groups.emplace_back();
        groups[it->second].push_back(static_cast<std::size_t>(i));
    }
    return groups;
}

inline ReplicateGroups replicate_groups(const Dataset& ds) { return replicate_groups(coded_levels(ds)); }

}  // namespace hybreg
