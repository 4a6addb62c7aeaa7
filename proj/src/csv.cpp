#include <mgqda/csv.hpp>

#include <mgqda/error.hpp>

#include <fmt/format.h>

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <unordered_map>

namespace mgqda {

namespace {

std::vector<std::string> split_record(std::istream& in, std::string& line, bool& ok)
{
    // A quoted cell may span physical lines, so keep reading until quotes balance.
    std::vector<std::string> cells;
    std::string cell;
    bool quoted = false;
    ok = static_cast<bool>(std::getline(in, line));
    if (!ok) return cells;
    for (;;) {
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char c = line[i];
            if (quoted) {
                if (c == '"') {
                    if (i + 1 < line.size() && line[i + 1] == '"') {
                        cell += '"';
                        ++i;
                    } else {
                        quoted = false;
                    }
                } else {
                    cell += c;
                }
            } else if (c == '"') {
                quoted = true;
            } else if (c == ',') {
                cells.push_back(std::move(cell));
                cell.clear();
            } else if (c == '\r' && i + 1 == line.size()) {
                break;
            } else {
                cell += c;
            }
        }
        if (!quoted) break;
        cell += '\n';
        if (!std::getline(in, line)) throw InvalidInput("csv: unterminated quoted cell");
    }
    cells.push_back(std::move(cell));
    return cells;
}

bool blank(const std::string& line)
{
    return line.find_first_not_of(" \t\r") == std::string::npos;
}

std::string trim(const std::string& s)
{
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

} // namespace

std::size_t CsvTable::column(const std::string& name) const
{
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (header[k] == name) return k;
    }
    throw InvalidInput("csv: no column named '" + name + "'");
}

CsvTable parse_csv(std::istream& in)
{
    CsvTable t;
    std::string line;
    bool ok = true;
    while (t.header.empty()) {
        auto cells = split_record(in, line, ok);
        if (!ok) throw InvalidInput("csv: missing header row");
        if (!blank(line)) t.header = std::move(cells);
    }
    for (auto& h : t.header) h = trim(h);
    std::size_t line_no = 1;
    for (;;) {
        auto cells = split_record(in, line, ok);
        if (!ok) break;
        ++line_no;
        if (blank(line) && cells.size() == 1) continue;
        if (cells.size() != t.header.size()) {
            throw InvalidInput(fmt::format("csv: record {} has {} cells, header has {}", line_no, cells.size(),
                                           t.header.size()));
        }
        t.rows.push_back(std::move(cells));
    }
    return t;
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw InvalidInput("cannot open '" + path.string() + "'");
    return parse_csv(in);
}

double parse_number(const std::string& cell)
{
    const std::string s = trim(cell);
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(first, last, value);
    if (s.empty() || ec != std::errc() || ptr != last) {
        throw InvalidInput("not a number: '" + cell + "'");
    }
    return value;
}

bool is_number(const std::string& cell)
{
    try {
        parse_number(cell);
        return true;
    } catch (const InvalidInput&) {
        return false;
    }
}

std::string csv_field(const std::string& text)
{
    if (text.find_first_of(",\"\r\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

LabeledData dataset_from_csv(const CsvTable& table, const std::string& label_col,
                             const std::vector<std::string>& features)
{
    const std::size_t label_at = table.column(label_col);
    std::vector<std::size_t> cols;
    if (!features.empty()) {
        for (const auto& f : features) {
            const auto k = table.column(f);
            if (k == label_at) throw InvalidInput("the label column cannot also be a feature");
            cols.push_back(k);
        }
    } else {
        for (std::size_t k = 0; k < table.header.size(); ++k) {
            if (k != label_at && !table.rows.empty() && is_number(table.rows.front()[k])) cols.push_back(k);
        }
    }
    if (cols.empty()) throw InvalidInput("no numeric feature columns");

    LabeledData out;
    const auto n = static_cast<Index>(table.rows.size());
    Matrix x(n, static_cast<Index>(cols.size()));
    std::vector<int> group;
    std::unordered_map<std::string, int> index;
    for (Index i = 0; i < n; ++i) {
        const auto& row = table.rows[static_cast<std::size_t>(i)];
        for (std::size_t c = 0; c < cols.size(); ++c) {
            try {
                x(i, static_cast<Index>(c)) = parse_number(row[cols[c]]);
            } catch (const InvalidInput&) {
                throw InvalidInput(fmt::format("non-numeric value '{}' in column '{}', data row {}", row[cols[c]],
                                               table.header[cols[c]], i + 1));
            }
        }
        const std::string label = trim(row[label_at]);
        auto [it, fresh] = index.try_emplace(label, static_cast<int>(out.labels.size()));
        if (fresh) out.labels.push_back(label);
        group.push_back(it->second);
    }
    std::vector<std::string> names;
    for (auto k : cols) names.push_back(table.header[k]);
    out.data = make_dataset(std::move(x), std::move(group), std::move(names));
    return out;
}

Matrix features_for_prediction(const CsvTable& table, Index p, const std::vector<std::string>& names)
{
    std::vector<std::size_t> cols;
    bool by_name = !names.empty();
    for (const auto& name : names) {
        const auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end()) {
            by_name = false;
            break;
        }
        cols.push_back(static_cast<std::size_t>(it - table.header.begin()));
    }
    if (!by_name) {
        cols.clear();
        for (std::size_t k = 0; k < table.header.size(); ++k) {
            if (table.rows.empty() || is_number(table.rows.front()[k])) cols.push_back(k);
        }
        if (table.rows.empty()) return Matrix(0, p);
        if (static_cast<Index>(cols.size()) != p) {
            throw InvalidInput(fmt::format("model expects {} features, data has {} numeric columns", p, cols.size()));
        }
    }

    Matrix x(static_cast<Index>(table.rows.size()), p);
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        for (std::size_t c = 0; c < cols.size(); ++c) {
            const auto& cell = table.rows[i][cols[c]];
            try {
                x(static_cast<Index>(i), static_cast<Index>(c)) = parse_number(cell);
            } catch (const InvalidInput&) {
                throw InvalidInput(fmt::format("non-numeric value '{}' in column '{}', data row {}", cell,
                                               table.header[cols[c]], i + 1));
            }
        }
    }
    return x;
}

void write_dataset_csv(std::ostream& out, const Dataset& data, const std::vector<std::string>& labels,
                       const std::string& label_col)
{
    for (Index j = 0; j < data.p(); ++j) {
        const auto ju = static_cast<std::size_t>(j);
        out << csv_field(ju < data.feature_names.size() ? data.feature_names[ju] : fmt::format("x{}", j + 1)) << ',';
    }
    out << csv_field(label_col) << '\n';
    for (Index i = 0; i < data.n(); ++i) {
        for (Index j = 0; j < data.p(); ++j) out << fmt::format("{:.17g},", data.x(i, j));
        const auto g = static_cast<std::size_t>(data.group[static_cast<std::size_t>(i)]);
        out << csv_field(g < labels.size() ? labels[g] : std::to_string(g + 1)) << '\n';
    }
}

} // namespace mgqda
