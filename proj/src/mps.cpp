#include "coex/mps.hpp"

#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include "coex/csv.hpp"

namespace coex {

namespace {

std::string format_value(double v) { return csv_number(v); }

double parse_value(const std::string& tok) {
  double v = 0.0;
  const auto res = std::from_chars(tok.data(), tok.data() + tok.size(), v);
  if (res.ec != std::errc{} || res.ptr != tok.data() + tok.size())
    throw std::runtime_error("mps: bad number '" + tok + "'");
  return v;
}

std::vector<std::string> tokenize(const std::string& line) {
  std::vector<std::string> toks;
  std::istringstream in(line);
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

char sense_letter(Sense s) {
  switch (s) {
    case Sense::le: return 'L';
    case Sense::eq: return 'E';
    case Sense::ge: return 'G';
  }
  return '?';
}

}  // namespace

std::string export_mps(const LinearModel& m, const std::string& name) {
  // Entries regrouped by column; within a column, objective first, then
  // rows in model order.
  std::vector<std::vector<std::pair<int, double>>> col_entries(m.n_vars());
  for (int i = 0; i < m.n_rows(); ++i)
    for (const auto& t : m.rows[i].terms)
      if (t.coef != 0.0) col_entries[t.var].push_back({i, t.coef});

  std::ostringstream out;
  out << "NAME " << name << "\n";
  out << "ROWS\n";
  out << " N  OBJ\n";
  for (const auto& row : m.rows) out << " " << sense_letter(row.sense) << "  " << row.name << "\n";

  out << "COLUMNS\n";
  bool in_integer_block = false;
  int marker = 0;
  for (int j = 0; j < m.n_vars(); ++j) {
    const auto& var = m.vars[j];
    if (var.integral != in_integer_block) {
      out << "    M" << ++marker << " 'MARKER' " << (var.integral ? "'INTORG'" : "'INTEND'")
          << "\n";
      in_integer_block = var.integral;
    }
    // Every variable must appear in COLUMNS to survive a round trip; an
    // explicit zero objective entry carries columns with no other use.
    if (m.objective[j] != 0.0 || col_entries[j].empty())
      out << "    " << var.name << " OBJ " << format_value(m.objective[j]) << "\n";
    for (const auto& [row, coef] : col_entries[j])
      out << "    " << var.name << " " << m.rows[row].name << " " << format_value(coef) << "\n";
  }
  if (in_integer_block) out << "    M" << ++marker << " 'MARKER' 'INTEND'\n";

  out << "RHS\n";
  if (m.objective_constant != 0.0)
    out << "    RHS OBJ " << format_value(-m.objective_constant) << "\n";
  for (const auto& row : m.rows)
    if (row.rhs != 0.0) out << "    RHS " << row.name << " " << format_value(row.rhs) << "\n";

  out << "BOUNDS\n";
  for (const auto& var : m.vars) {
    if (var.lb == var.ub) {
      out << " FX BND " << var.name << " " << format_value(var.lb) << "\n";
      continue;
    }
    if (var.integral) {
      // Explicit bounds: integer-column defaults vary across readers.
      out << " LO BND " << var.name << " " << format_value(var.lb) << "\n";
      if (std::isfinite(var.ub)) out << " UP BND " << var.name << " " << format_value(var.ub) << "\n";
      else out << " PL BND " << var.name << "\n";
      continue;
    }
    if (var.lb == -kInf) out << " MI BND " << var.name << "\n";
    else if (var.lb != 0.0) out << " LO BND " << var.name << " " << format_value(var.lb) << "\n";
    if (std::isfinite(var.ub)) out << " UP BND " << var.name << " " << format_value(var.ub) << "\n";
  }
  out << "ENDATA\n";
  return out.str();
}

LinearModel parse_mps(const std::string& text) {
  LinearModel m;
  std::unordered_map<std::string, int> row_index;
  std::string obj_name;

  enum class Section { none, rows, columns, rhs, ranges, bounds, done };
  Section section = Section::none;
  bool integer_mode = false;

  auto var_of = [&](const std::string& name) {
    const int j = m.var_index(name);
    if (j >= 0) return j;
    Variable v;
    v.name = name;
    v.integral = integer_mode;
    return m.add_var(std::move(v));
  };
  auto row_of = [&](const std::string& name) {
    const auto it = row_index.find(name);
    if (it == row_index.end()) throw std::runtime_error("mps: unknown row '" + name + "'");
    return it->second;
  };

  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '*') continue;
    const bool indented = line[0] == ' ' || line[0] == '\t';
    auto toks = tokenize(line);
    if (toks.empty()) continue;

    if (!indented) {
      const std::string& head = toks[0];
      if (head == "NAME") continue;
      if (head == "ROWS") { section = Section::rows; continue; }
      if (head == "COLUMNS") { section = Section::columns; continue; }
      if (head == "RHS") { section = Section::rhs; continue; }
      if (head == "RANGES") { section = Section::ranges; continue; }
      if (head == "BOUNDS") { section = Section::bounds; continue; }
      if (head == "ENDATA") { section = Section::done; break; }
      if (head == "OBJSENSE") { continue; }  // MIN is the only mode written
      throw std::runtime_error("mps: unknown section '" + head + "'");
    }

    switch (section) {
      case Section::rows: {
        if (toks.size() != 2) throw std::runtime_error("mps: bad ROWS line: " + line);
        const std::string& type = toks[0];
        if (type == "N") {
          if (!obj_name.empty())
            throw std::runtime_error("mps: multiple objective rows unsupported");
          obj_name = toks[1];
          continue;
        }
        Row row;
        row.name = toks[1];
        if (type == "L") row.sense = Sense::le;
        else if (type == "G") row.sense = Sense::ge;
        else if (type == "E") row.sense = Sense::eq;
        else throw std::runtime_error("mps: unknown row type '" + type + "'");
        if (row_index.count(row.name))
          throw std::runtime_error("mps: duplicate row '" + row.name + "'");
        // add_row consumes the name; index it before the move.
        row_index.emplace(row.name, m.n_rows());
        m.add_row(std::move(row));
        break;
      }
      case Section::columns: {
        if (toks.size() >= 3 && toks[1] == "'MARKER'") {
          if (toks[2] == "'INTORG'") integer_mode = true;
          else if (toks[2] == "'INTEND'") integer_mode = false;
          else throw std::runtime_error("mps: unknown marker: " + line);
          continue;
        }
        if (toks.size() != 3 && toks.size() != 5)
          throw std::runtime_error("mps: bad COLUMNS line: " + line);
        const int j = var_of(toks[0]);
        for (size_t k = 1; k + 1 < toks.size(); k += 2) {
          const double v = parse_value(toks[k + 1]);
          if (toks[k] == obj_name) m.add_objective(j, v);
          else m.rows[row_of(toks[k])].terms.push_back({j, v});
        }
        break;
      }
      case Section::rhs: {
        if (toks.size() != 3 && toks.size() != 5)
          throw std::runtime_error("mps: bad RHS line: " + line);
        for (size_t k = 1; k + 1 < toks.size(); k += 2) {
          const double v = parse_value(toks[k + 1]);
          if (toks[k] == obj_name) m.objective_constant = -v;
          else m.rows[row_of(toks[k])].rhs = v;
        }
        break;
      }
      case Section::ranges: {
        if (toks.size() != 3 && toks.size() != 5)
          throw std::runtime_error("mps: bad RANGES line: " + line);
        for (size_t k = 1; k + 1 < toks.size(); k += 2) {
          const double r = parse_value(toks[k + 1]);
          Row& base = m.rows[row_of(toks[k])];
          Row companion;
          companion.name = base.name + "__rng";
          companion.terms = base.terms;
          if (base.sense == Sense::le) {
            companion.sense = Sense::ge;
            companion.rhs = base.rhs - std::abs(r);
          } else if (base.sense == Sense::ge) {
            companion.sense = Sense::le;
            companion.rhs = base.rhs + std::abs(r);
          } else {
            // Ranged equality spans [rhs, rhs+r] (r >= 0) or [rhs+r, rhs].
            const double lo = std::min(base.rhs, base.rhs + r);
            const double hi = std::max(base.rhs, base.rhs + r);
            base.sense = Sense::le;
            base.rhs = hi;
            companion.sense = Sense::ge;
            companion.rhs = lo;
          }
          m.add_row(std::move(companion));
        }
        break;
      }
      case Section::bounds: {
        const std::string& code = toks[0];
        const bool has_value = code == "UP" || code == "LO" || code == "FX" || code == "UI" ||
                               code == "LI";
        if (toks.size() != (has_value ? 4u : 3u))
          throw std::runtime_error("mps: bad BOUNDS line: " + line);
        const int j = m.var_index(toks[2]);
        if (j < 0) throw std::runtime_error("mps: bound on unknown variable '" + toks[2] + "'");
        Variable& var = m.vars[j];
        const double v = has_value ? parse_value(toks[3]) : 0.0;
        if (code == "UP") var.ub = v;
        else if (code == "LO") var.lb = v;
        else if (code == "FX") var.lb = var.ub = v;
        else if (code == "FR") { var.lb = -kInf; var.ub = kInf; }
        else if (code == "MI") var.lb = -kInf;
        else if (code == "PL") var.ub = kInf;
        else if (code == "BV") { var.lb = 0; var.ub = 1; var.integral = true; }
        else if (code == "UI") { var.ub = v; var.integral = true; }
        else if (code == "LI") { var.lb = v; var.integral = true; }
        else throw std::runtime_error("mps: unknown bound code '" + code + "'");
        break;
      }
      case Section::none:
      case Section::done:
        throw std::runtime_error("mps: data before any section: " + line);
    }
  }
  if (obj_name.empty()) throw std::runtime_error("mps: no objective row");
  return m;
}

MipSolution import_solution(const LinearModel& m, const std::string& csv_text,
                            std::vector<std::string>* warnings) {
  std::vector<double> values(m.n_vars(), 0.0);
  std::vector<bool> seen(m.n_vars(), false);

  std::istringstream in(csv_text);
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("solution: malformed row '" + line + "'");
    const std::string name = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    if (first) {
      first = false;
      double probe;
      const auto res = std::from_chars(value.data(), value.data() + value.size(), probe);
      if (res.ec != std::errc{} || res.ptr != value.data() + value.size()) continue;  // header
    }
    const int j = m.var_index(name);
    if (j < 0) throw std::runtime_error("solution: unknown variable '" + name + "'");
    values[j] = parse_value(value);
    seen[j] = true;
  }

  if (warnings) {
    int missing = 0;
    std::string example;
    for (int j = 0; j < m.n_vars(); ++j)
      if (!seen[j] && ++missing == 1) example = m.vars[j].name;
    if (missing > 0)
      warnings->push_back(std::to_string(missing) + " variable(s) absent from solution file (e.g. '" +
                          example + "'); defaulted to 0");
  }

  MipSolution sol;
  sol.status = MipStatus::optimal;
  sol.values = std::move(values);
  sol.objective = m.eval_objective(sol.values);
  sol.best_bound = sol.objective;
  sol.nodes = 0;
  return sol;
}

}  // namespace coex
