#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "metadist/graph.hpp"
#include "metadist/point.hpp"

namespace metadist {

// Dataset and point files are plain CSV. The header lists the variable names
// in graph declaration order, optionally followed by `target`. Excluded
// variables are written as the literal token EXC; reals carry 17 significant
// digits so the written form round-trips bit-exactly.

struct Dataset {
  std::vector<ExtendedPoint> points;
  std::vector<double> targets;  // empty when the file had no target column
  bool has_targets = false;
};

inline std::string format_value(const RoleGraph& g, int v, const Value& value) {
  if (value.is_exc()) return kExcToken;
  switch (g.var(v).kind) {
    case VariableKind::continuous: return format_real(value.as_real());
    case VariableKind::integer: return std::to_string(value.as_integer());
    case VariableKind::categorical:
      return g.var(v).labels[static_cast<std::size_t>(value.as_category())];
  }
  throw ValidationError("corrupt value");
}

inline Value parse_value(const RoleGraph& g, int v, const std::string& cell,
                         const std::string& context) {
  if (cell == kExcToken) return Value::exc();
  try {
    switch (g.var(v).kind) {
      case VariableKind::continuous: {
        std::size_t used = 0;
        const double x = std::stod(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return Value::real(x);
      }
      case VariableKind::integer: {
        std::size_t used = 0;
        const long long i = std::stoll(cell, &used);
        if (used != cell.size()) throw std::invalid_argument(cell);
        return Value::integer(i);
      }
      case VariableKind::categorical: {
        const auto& labels = g.var(v).labels;
        const auto it = std::find(labels.begin(), labels.end(), cell);
        if (it == labels.end())
          throw ParseError(context + ": unknown label '" + cell + "' for variable '" +
                           g.var(v).name + "'");
        return Value::category(static_cast<std::int32_t>(it - labels.begin()));
      }
    }
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError(context + ": cannot parse '" + cell + "' for variable '" + g.var(v).name +
                     "'");
  }
  throw ParseError(context + ": corrupt variable kind");
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::string dataset_to_csv(const RoleGraph& g, const Dataset& data) {
  std::string out;
  for (int v = 0; v < g.size(); ++v) {
    if (v) out += ',';
    out += g.var(v).name;
  }
  if (data.has_targets) out += ",target";
  out += '\n';
  for (std::size_t row = 0; row < data.points.size(); ++row) {
    const auto& point = data.points[row];
    for (int v = 0; v < g.size(); ++v) {
      if (v) out += ',';
      out += format_value(g, v, point[v]);
    }
    if (data.has_targets) {
      out += ',';
      out += format_real(data.targets[row]);
    }
    out += '\n';
  }
  return out;
}

inline Dataset dataset_from_csv(const RoleGraph& g, std::istream& in, const std::string& context,
                                bool validate_points = true) {
  Dataset data;
  std::string line;
  if (!std::getline(in, line)) throw ParseError(context + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = split_csv_line(line);
  const bool has_target = !header.empty() && header.back() == "target";
  const std::size_t n_vars = header.size() - (has_target ? 1 : 0);
  if (n_vars != static_cast<std::size_t>(g.size()))
    throw ParseError(context + ": header lists " + std::to_string(n_vars) +
                     " variables, domain has " + std::to_string(g.size()));
  std::vector<int> column_var(n_vars);
  for (std::size_t i = 0; i < n_vars; ++i) column_var[i] = g.index_of(header[i]);
  data.has_targets = has_target;

  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size())
      throw ParseError(context + ", row " + std::to_string(row) + ": expected " +
                       std::to_string(header.size()) + " cells, found " +
                       std::to_string(cells.size()));
    ExtendedPoint point;
    point.values.assign(static_cast<std::size_t>(g.size()), Value::exc());
    for (std::size_t i = 0; i < n_vars; ++i)
      point[column_var[i]] =
          parse_value(g, column_var[i], cells[i], context + ", row " + std::to_string(row));
    if (validate_points) {
      if (const auto problem = check_extended(g, point))
        throw ValidationError(context + ", row " + std::to_string(row) + ": " + *problem);
    }
    data.points.push_back(std::move(point));
    if (has_target) {
      try {
        data.targets.push_back(std::stod(cells.back()));
      } catch (const std::exception&) {
        throw ParseError(context + ", row " + std::to_string(row) + ": bad target '" +
                         cells.back() + "'");
      }
    }
  }
  return data;
}

inline Dataset load_dataset(const RoleGraph& g, const std::string& path,
                            bool validate_points = true) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return dataset_from_csv(g, in, path, validate_points);
}

inline void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write '" + path + "'");
  out << content;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace metadist
