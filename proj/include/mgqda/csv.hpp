#pragma once

#include <mgqda/stats.hpp>

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace mgqda {

/// Header plus raw string cells. Every row has as many cells as the header.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Position of `name` in the header; throws InvalidInput when absent.
    std::size_t column(const std::string& name) const;
};

/*
 * Comma separated, header row required. Double-quoted cells may contain
 * commas and "" escapes; CRLF line ends are accepted and blank lines are
 * skipped. Throws InvalidInput on ragged rows or an empty file.
 */
CsvTable parse_csv(std::istream& in);
CsvTable read_csv(const std::filesystem::path& path);

/// Strict decimal parse of a whole cell (surrounding blanks allowed). Throws InvalidInput.
double parse_number(const std::string& cell);
bool is_number(const std::string& cell);

/// Cell text for output, quoted when it holds a comma, quote or line break.
std::string csv_field(const std::string& text);

struct LabeledData
{
    Dataset data;
    std::vector<std::string> labels;  // labels[g] is the original label of group g
};

/*
 * Labels map to groups in order of first appearance. Features are the
 * columns listed in `features`, or when that is empty every non-label
 * column whose first value is numeric, in file order. Throws InvalidInput
 * for an unknown column or a non-numeric feature value.
 */
LabeledData dataset_from_csv(const CsvTable& table, const std::string& label_col,
                             const std::vector<std::string>& features = {});

/*
 * Feature matrix for prediction. When `names` is non-empty and every name
 * is in the header those columns are used; otherwise all numeric columns
 * are taken and their count must equal `p`.
 */
Matrix features_for_prediction(const CsvTable& table, Index p, const std::vector<std::string>& names);

/// Writes feature columns (17 significant digits) followed by a label column.
void write_dataset_csv(std::ostream& out, const Dataset& data, const std::vector<std::string>& labels,
                       const std::string& label_col = "label");

} // namespace mgqda
